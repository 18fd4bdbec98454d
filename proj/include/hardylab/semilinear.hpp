#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardylab/field.hpp"
#include "hardylab/grid_domain.hpp"
#include "hardylab/measures.hpp"
#include "hardylab/nonlinearity.hpp"
#include "hardylab/spectral_green.hpp"

namespace hardylab {

enum class SolverKind { newton, fixed_point };
SolverKind parse_solver(const std::string& s);

struct SolveOptions {
    SolverKind solver = SolverKind::newton;
    double tolerance = 1e-9;
    int max_iterations = 0;  // 0: 200 for Newton, 50000 for the fixed point
    double theta = 0.5;      // fixed-point damping, halved when the residual grows
    std::optional<Field> initial;
};

struct SolveResult {
    Field u;
    int iterations = 0;
    // ||u + G[f(u)] - G[tau] - K[nu]||_inf / ||G[tau] + K[nu]||_inf
    double residual = 0.0;
    double f_of_u_norm = 0.0;  // sum |f(u)| phi h^d
    bool converged = false;
    std::string status;
};

/// Solve -L_V u + f(u) = tau with boundary trace nu.
SolveResult solve_bvp(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                      const BoundaryMeasure& nu, const SolveOptions& opts = {});

/// G[tau] + K[nu]
Field linear_solution(const Lab& lab, const InteriorMeasure& tau, const BoundaryMeasure& nu);

double representation_residual(const Lab& lab, const Nonlinearity& f, const Field& u, const Field& w);

/// u_sub <= u_super + tol at every node.
bool compare_sub_super(const Field& u_sub, const Field& u_super, double tol = 1e-10);

struct KatoReport {
    double worst_violation = 0.0;  // max_i (A w_+)_i - sign_+(w_i) (A w)_i
    int worst_node = -1;
    int sign_change_nodes = 0;
};

KatoReport kato_check(const OperatorLV& op, const Field& w);

struct ExhaustionSolveResult {
    SolveResult result;                // limit field (final level)
    std::vector<SolveResult> levels;   // extended by the supersolution off D_n
    bool decreasing = true;
    double worst_increase = 0.0;       // max over levels of (z_{n+1} - z_n)_+
};

/// Solve on each exhaustion level with boundary data taken from the supersolution w.
ExhaustionSolveResult solve_by_exhaustion(const Lab& lab, const Nonlinearity& f,
                                          const InteriorMeasure& tau, const Field& w,
                                          const Exhaustion& ex, const SolveOptions& opts = {});

/// Discrete W^{1,p} proxy: (sum |grad_h u|^p h^d)^{1/p} over {delta > inradius/4}.
double interior_gradient_norm(const GridDomain& d, const Field& u, double p = 1.2);

}  // namespace hardylab
