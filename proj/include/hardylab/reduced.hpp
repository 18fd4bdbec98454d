#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hardylab/field.hpp"
#include "hardylab/hardy_potential.hpp"
#include "hardylab/measures.hpp"
#include "hardylab/nonlinearity.hpp"
#include "hardylab/semilinear.hpp"
#include "hardylab/spectral_green.hpp"

namespace hardylab {

/// Clamp levels 1, 2, 4, ..., 2^max_exponent. Near a boundary atom u ~ 1/h in 2D, so
/// f(u) outgrows a 2^20 clamp already at moderate resolution; the sequence stops once Cauchy.
std::vector<double> default_schedule(int max_exponent = 40);

struct ReduceOptions {
    std::vector<double> schedule = default_schedule();
    double limit_tol = 1e-8;        // ||u_n - u_{n+1}||_inf < limit_tol ||u_1||_inf
    double monotone_slack = 1e-10;
    SolveOptions solve;
    bool with_strip_estimate = false;
    double strip_regularization = 0.0;
};

struct LevelRecord {
    double level = 0.0;
    int iterations = 0;
    double residual = 0.0;
    double f_n_integral = 0.0;  // sum f_n(u_n) phi h^d
    double change = 0.0;        // ||u_n - u_{n-1}||_inf, infinite at the first level
    double gradient_norm = 0.0;
    bool clamp_active = false;  // f_n(u_n) != f(u_n) somewhere
};

struct ReducedResult {
    Field u_sharp;
    InteriorMeasure tau_sharp;
    BoundaryMeasure nu_sharp;
    std::vector<LevelRecord> per_level;
    bool monotone_ok = true;
    bool cauchy_ok = false;
    double worst_increase = 0.0;
    double representation_residual = 0.0;  // u + G[f(u)] = G[tau#] + K[nu#]
    double stencil_residual = 0.0;         // weighted mass of -L_V u + f(u) - tau#
    bool bounds_ok = true;                 // 0 <= tau# <= tau, 0 <= nu# <= nu
    double estimate_constant = 0.0;        // (||u||_{L1(phi/delta)} + ||f(u)||_{L1(phi)}) / data
    std::optional<BoundaryMeasure> strip_estimate;
};

ReducedResult reduced_couple(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                             const BoundaryMeasure& nu, const ReduceOptions& opts = {});
ReducedResult reduced_boundary(const Lab& lab, const Nonlinearity& f, const BoundaryMeasure& nu,
                               const ReduceOptions& opts = {});

struct IndependenceReport {
    double nu_discrepancy = 0.0;   // ||nu#(tau,nu) - nu*(nu)||
    double tau_discrepancy = 0.0;  // ||tau#(tau,nu) - tau#(tau,0)||
    double nu_norm = 0.0, tau_norm = 0.0;
    bool pass = false;
};

IndependenceReport verify_independence(const Lab& lab, const Nonlinearity& f,
                                       const InteriorMeasure& tau, const BoundaryMeasure& nu,
                                       const ReduceOptions& opts = {}, double rel_tol = 1e-6);

struct LatticeReport {
    double restriction_gap = 0.0;        // max over subsets ||nu* chi_A - (nu chi_A)*||
    double restriction_violation = 0.0;  // max (nu* chi_A - (nu chi_A)*)_+ mass
    double additivity_gap = 0.0;         // ||(nu1+nu2)* - nu1* - nu2*||
    int candidates = 0;
    int certified = 0;
    double reduced_distance = 0.0;   // ||nu - nu*||
    double best_candidate = 0.0;     // min ||nu - lambda|| over certified candidates
    bool optimal = false;
    double nu_norm = 0.0;
    bool pass = false;
};

LatticeReport verify_lattice(const Lab& lab, const Nonlinearity& f, const BoundaryMeasure& nu,
                             const std::vector<std::vector<int>>& subsets, std::uint64_t seed,
                             int n_candidates = 24, const ReduceOptions& opts = {},
                             double rel_tol = 1e-6);

struct SignedBounds {
    InteriorMeasure tau1, tau2;
    BoundaryMeasure nu1, nu2;
};

struct SignedReport {
    bool bounds_ok = false;  // -tau1 <= tau <= tau2, -nu1 <= nu <= nu2
    bool squeeze_ok = true;
    double worst_squeeze_violation = 0.0;
    bool cauchy_ok = false;
    double oscillation = 0.0;  // last ||u_n - u_{n-1}||_inf
    int levels = 0;
    Field u_tilde;
    InteriorMeasure tau_tilde;
    BoundaryMeasure nu_tilde;
    ReducedResult upper;  // (tau2, nu2) reduced for f
    ReducedResult lower;  // (tau1, nu1) reduced for f^
    bool sandwich_ok = false;
    double sandwich_violation = 0.0;
    double representation_residual = 0.0;
    std::string status;
};

SignedReport reduced_signed(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                            const BoundaryMeasure& nu, const SignedBounds& bounds,
                            const ReduceOptions& opts = {});

struct GoodnessReport {
    bool in_sandwich = false;
    bool converged = false;
    double residual = 0.0;
    bool positive_part_good = false;  // (lambda_+, sigma_+) for f
    bool negative_part_good = false;  // (lambda_-, sigma_-) for f^
    bool pass = false;
};

GoodnessReport verify_sandwich_goodness(const Lab& lab, const Nonlinearity& f,
                                        const MeasureCouple& candidate,
                                        const ReducedResult& upper, const ReducedResult& lower,
                                        const SolveOptions& opts = {});

struct CharacterizationRow {
    std::string label;
    bool predicted_good = false;
    bool observed_good = false;
};

struct CharacterizationReport {
    std::vector<CharacterizationRow> rows;
    bool negative_couple_good = false;
    bool agreement = false;
};

CharacterizationReport verify_positive_part_characterization(const Lab& lab, const Nonlinearity& f,
                                                             const InteriorMeasure& tau,
                                                             const BoundaryMeasure& nu,
                                                             const ReduceOptions& opts = {});

struct L1Report {
    std::vector<double> levels;
    std::vector<double> gaps;             // sum |f_n(u_n) - f(u)| phi h^d
    std::vector<double> identity_errors;  // |direct - lambda_V route| per level
    double final_gap = 0.0;
    double decay_rate = 0.0;  // mean log ratio of successive nonzero gaps
    bool converges = false;
    bool good = false;
};

L1Report verify_L1_convergence(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                               const BoundaryMeasure& nu, const ReduceOptions& opts = {});

struct MaximalityReport {
    std::vector<double> scalings;
    double worst_excess = 0.0;  // max (w - u#)_+ over scaled-data solutions
    bool maximal = false;
    bool gate_agreement = false;  // scaled couples below (tau#, nu*) all solve
};

MaximalityReport verify_maximality(const Lab& lab, const Nonlinearity& f,
                                   const InteriorMeasure& tau, const BoundaryMeasure& nu,
                                   const ReducedResult& reduced, const SolveOptions& opts = {});

struct ProbeSpec {
    Shape shape = Shape::square;
    std::vector<int> n_cells{32, 64, 128};
    double gamma = 0.0;
    SingularSet singular_set;
    double p = 5.0;
    double mass = 1.0;
    Point atom_at{0.5, 0.0};
    double strip_regularization = 1e-12;  // corner-adjacent columns are collinear on the square
    ReduceOptions reduce;
};

struct ProbeRow {
    int n_cells = 0;
    double h = 0.0;
    double strip_mass = 0.0;   // total mass of the strip least-squares trace of u*
    double layer_mass = 0.0;   // total mass of the boundary-layer trace
    int levels = 0;
    bool cauchy_ok = false;
};

struct ProbeReport {
    std::vector<ProbeRow> rows;
    bool nonincreasing = false;
    double relative_spread = 0.0;  // (max - min) / max of strip masses
};

ProbeReport refinement_probe(const ProbeSpec& spec);

}  // namespace hardylab
