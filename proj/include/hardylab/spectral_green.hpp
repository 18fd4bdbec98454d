#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hardylab/field.hpp"
#include "hardylab/grid_domain.hpp"
#include "hardylab/hardy_potential.hpp"
#include "hardylab/measures.hpp"
#include "hardylab/operator.hpp"

namespace hardylab {

struct GroundStateOptions {
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

struct SpectralData {
    std::vector<double> phi;  // interior values, phi[x0] = 1
    double lambda = 0.0;
    double alpha_fit = 0.0;       // steepest fitted decay exponent
    double alpha_star_fit = 0.0;  // shallowest fitted decay exponent
    std::vector<double> sector_slopes;  // NaN where the band holds too few nodes
    double band_lo = 0.0, band_hi = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

SpectralData ground_state(const OperatorLV& op, const GroundStateOptions& opts = {});

/// Least-squares slope of log y against log x (positive entries only).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// log-log slopes of phi against delta over delta in [lo, hi], per sector:
/// the two halves of the interval, 16 angular sectors in 2D.
std::vector<double> sector_decay_slopes(const GridDomain& d, std::span<const double> phi,
                                        double lo, double hi);

struct B1B2Report {
    std::vector<double> betas;
    std::vector<double> strip_integrals;  // of phi^2 / delta over Sigma_beta
    double decay_rate = 0.0;
    double alpha_fit = 0.0;
    double alpha_star_fit = 0.0;
    bool b1_holds = false;
    bool b2_window = false;  // alpha - 1/2 < alpha* <= alpha
    bool near_critical = false;
    std::string verdict;
};

B1B2Report check_B1_B2(const GridDomain& d, const SpectralData& s, int n_betas = 8);

class GreenOperator {
public:
    GreenOperator(std::shared_ptr<const OperatorLV> op, std::shared_ptr<const Factorization> f,
                  bool materialize_dense = false);

    /// Solution of (-L_V) u = tau with zero boundary values.
    Field apply(const InteriorMeasure& tau) const;
    std::vector<double> solve(std::span<const double> rhs) const;
    const Eigen::MatrixXd* dense() const { return dense_ ? &*dense_ : nullptr; }
    static constexpr std::size_t dense_limit = 5000;

private:
    std::shared_ptr<const OperatorLV> op_;
    std::shared_ptr<const Factorization> factor_;
    std::optional<Eigen::MatrixXd> dense_;
};

/// Boundary kernel columns normalised at x0. Square corners have no link to the
/// interior; their column is the normalised sum of the two neighbouring columns.
class MartinOperator {
public:
    MartinOperator(std::shared_ptr<const OperatorLV> op, std::shared_ptr<const Factorization> f);

    /// omega[y] = H_y(x0): discrete harmonic measure of node y seen from x0.
    std::span<const double> omega() const { return omega_; }
    const std::vector<char>& active() const { return op_->domain().boundary_active; }

    /// Dirichlet data g with K_V[nu] = harmonic extension of g.
    std::vector<double> boundary_data(const BoundaryMeasure& nu) const;
    Field apply(const BoundaryMeasure& nu) const;
    Field column(int y) const;
    /// K(i, y) for every boundary node y.
    std::vector<double> row(int i) const;

private:
    std::shared_ptr<const OperatorLV> op_;
    std::shared_ptr<const Factorization> factor_;
    std::vector<double> omega_;
    std::vector<std::pair<int, int>> corner_nbrs_;  // per boundary node, (-1,-1) if active
};

struct LabOptions {
    GroundStateOptions ground_state;
    bool dense_green = false;
};

/// Domain, potential and the linear machinery built on them.
struct Lab {
    std::shared_ptr<const GridDomain> domain;
    Potential potential;
    std::shared_ptr<const OperatorLV> op;
    std::shared_ptr<const Factorization> factor;
    SpectralData spectral;
    std::unique_ptr<GreenOperator> green;
    std::unique_ptr<MartinOperator> martin;

    const GridDomain& dom() const { return *domain; }
    std::span<const double> phi() const { return spectral.phi; }
    double vol() const { return domain->cell_volume(); }
    /// <a, b>_h = sum a b h^d
    double inner(std::span<const double> a, std::span<const double> b) const;
};

std::shared_ptr<Lab> make_lab(GridDomain d, Potential v, const LabOptions& opts = {});

/// int_{Sigma_beta} (phi/delta) values dS
double strip_integral(const Lab& lab, const Strip& s, std::span<const double> values);
/// Geometric sequence of n levels in [lo, hi].
std::vector<double> geometric_levels(double lo, double hi, int n);

struct WeightedEstimatesReport {
    int samples = 0;
    std::vector<double> betas;
    // int (phi/delta) G[tau] dx  against  int phi dtau
    double green_ratio_min = 0.0, green_ratio_max = 0.0;
    // strip integral of (phi/delta) K[nu] against ||nu|| across the band
    double martin_ratio_min = 0.0, martin_ratio_max = 0.0;
    // slope of the strip integrals of (phi/delta) G[tau] in beta
    double green_strip_slope_min = 0.0;
    bool green_strip_decays = false;
    double zero_data_integral = 0.0;
};

WeightedEstimatesReport verify_weighted_estimates(const Lab& lab, std::uint64_t seed,
                                                  int samples = 10);

/// CSV with columns node,x,y,value.
void write_field_csv(const GridDomain& d, std::span<const double> values, const std::string& path);

}  // namespace hardylab
