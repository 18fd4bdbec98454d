#include "hardylab/spectral_green.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/io.hpp"
#include "hardylab/kernels.hpp"

namespace hardylab {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (!(x[k] > 0) || !(y[k] > 0)) continue;
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-14 * std::max(1.0, n * sxx))
        return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / den;
}

std::vector<double> sector_decay_slopes(const GridDomain& d, std::span<const double> phi,
                                        double lo, double hi) {
    const int sectors = d.dim == 1 ? 2 : 16;
    std::vector<std::vector<double>> xs(sectors), ys(sectors);
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        if (d.delta[i] < lo || d.delta[i] > hi) continue;
        const Point p = d.interior[i];
        int s;
        if (d.dim == 1) {
            s = p.x < d.center.x ? 0 : 1;
        } else {
            double a = std::atan2(p.y - d.center.y, p.x - d.center.x);
            if (a < 0) a += 2.0 * std::numbers::pi;
            s = std::min(sectors - 1, static_cast<int>(a / (2.0 * std::numbers::pi) * sectors));
        }
        xs[s].push_back(d.delta[i]);
        ys[s].push_back(phi[i]);
    }
    std::vector<double> out(sectors);
    for (int s = 0; s < sectors; ++s)
        out[s] = xs[s].size() >= 3 ? loglog_slope(xs[s], ys[s])
                                   : std::numeric_limits<double>::quiet_NaN();
    return out;
}

SpectralData ground_state(const OperatorLV& op, const GroundStateOptions& opts) {
    const EigenPair ep = smallest_eigenpair(op.matrix(), {opts.tolerance, opts.max_iterations});
    if (!(ep.value > 0.0))
        throw LabError(Stage::spectral, "admissibility failure: lambda_V = " +
                                            std::to_string(ep.value) + " is not positive");
    const GridDomain& d = op.domain();
    SpectralData s;
    s.lambda = ep.value;
    s.iterations = ep.iterations;
    s.residual = ep.residual;
    s.phi = ep.vector;
    const double scale = s.phi[d.reference_node];
    for (double& v : s.phi) v /= scale;
    for (std::size_t i = 0; i < s.phi.size(); ++i)
        if (!(s.phi[i] > 0.0))
            throw LabError(Stage::spectral, "ground state not positive at node " + std::to_string(i));

    s.band_lo = 4.0 * d.h;
    s.band_hi = d.inradius / 4.0;
    s.sector_slopes = sector_decay_slopes(d, s.phi, s.band_lo, s.band_hi);
    s.alpha_fit = -std::numeric_limits<double>::infinity();
    s.alpha_star_fit = std::numeric_limits<double>::infinity();
    bool any = false;
    for (double v : s.sector_slopes)
        if (std::isfinite(v)) {
            s.alpha_fit = std::max(s.alpha_fit, v);
            s.alpha_star_fit = std::min(s.alpha_star_fit, v);
            any = true;
        }
    if (!any) s.alpha_fit = s.alpha_star_fit = std::numeric_limits<double>::quiet_NaN();
    return s;
}

std::vector<double> geometric_levels(double lo, double hi, int n) {
    std::vector<double> r;
    if (n <= 1 || hi <= lo) return {std::min(lo, hi)};
    for (int k = 0; k < n; ++k) r.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
    return r;
}

B1B2Report check_B1_B2(const GridDomain& d, const SpectralData& s, int n_betas) {
    B1B2Report r;
    r.alpha_fit = s.alpha_fit;
    r.alpha_star_fit = s.alpha_star_fit;
    r.betas = geometric_levels(2.0 * d.h, d.inradius / 4.0, n_betas);
    for (double b : r.betas) {
        const Strip st = extract_strip(d, b);
        double acc = 0.0;
        for (std::size_t k = 0; k < st.nodes.size(); ++k) {
            const int i = st.nodes[k];
            acc += st.weights[k] * s.phi[i] * s.phi[i] / d.delta[i];
        }
        r.strip_integrals.push_back(acc);
    }
    r.decay_rate = r.betas.size() >= 2 ? loglog_slope(r.betas, r.strip_integrals)
                                       : std::numeric_limits<double>::quiet_NaN();
    const bool fits = std::isfinite(s.alpha_fit) && std::isfinite(s.alpha_star_fit);
    r.b2_window = fits && s.alpha_fit - 0.5 < s.alpha_star_fit && s.alpha_star_fit <= s.alpha_fit + 1e-12;
    r.near_critical = !(r.decay_rate >= 0.1);
    r.b1_holds = std::isfinite(r.decay_rate) && r.decay_rate > 0.0 && !r.near_critical;
    if (!fits || !std::isfinite(r.decay_rate))
        r.verdict = "inconclusive at this resolution";
    else if (r.near_critical)
        r.verdict = "near-critical decay, inconclusive at this resolution";
    else if (r.b1_holds && r.b2_window)
        r.verdict = "B1 and B2 hold on the fitted band";
    else
        r.verdict = "B1/B2 window not met on the fitted band";
    return r;
}

GreenOperator::GreenOperator(std::shared_ptr<const OperatorLV> op,
                             std::shared_ptr<const Factorization> f, bool materialize_dense)
    : op_(std::move(op)), factor_(std::move(f)) {
    const std::size_t n = op_->size();
    if (materialize_dense && n <= dense_limit) {
        Eigen::MatrixXd g(n, n);
        std::vector<double> e(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[j] = 1.0;
            factor_->solve_in_place(e);
            for (std::size_t i = 0; i < n; ++i) g(i, j) = e[i];
        }
        dense_ = std::move(g);
    }
}

std::vector<double> GreenOperator::solve(std::span<const double> rhs) const {
    if (dense_) {
        Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
        Eigen::VectorXd x = *dense_ * b;
        return {x.data(), x.data() + x.size()};
    }
    return factor_->solve(rhs);
}

Field GreenOperator::apply(const InteriorMeasure& tau) const {
    const GridDomain& d = op_->domain();
    Field u;
    u.interior = solve(tau.loads(d.cell_volume()));
    u.boundary.assign(d.n_boundary(), 0.0);
    return u;
}

MartinOperator::MartinOperator(std::shared_ptr<const OperatorLV> op,
                               std::shared_ptr<const Factorization> f)
    : op_(std::move(op)), factor_(std::move(f)) {
    const GridDomain& d = op_->domain();
    std::vector<double> e(d.n_interior(), 0.0);
    e[d.reference_node] = 1.0;
    factor_->solve_in_place(e);
    omega_ = op_->boundary_adjoint(e);
    const int nb = static_cast<int>(d.n_boundary());
    corner_nbrs_.assign(nb, {-1, -1});
    for (int b = 0; b < nb; ++b) {
        if (d.boundary_active[b]) {
            if (!(omega_[b] > 0.0))
                throw LabError(Stage::martin, "nonpositive harmonic measure at boundary node " +
                                                  std::to_string(b));
            continue;
        }
        omega_[b] = 0.0;
        corner_nbrs_[b] = {(b + nb - 1) % nb, (b + 1) % nb};
    }
}

std::vector<double> MartinOperator::boundary_data(const BoundaryMeasure& nu) const {
    const std::size_t nb = omega_.size();
    if (nu.size() != nb) throw LabError(Stage::martin, "boundary measure size mismatch");
    std::vector<double> g(nb, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
        if (nu.masses[b] == 0.0) continue;
        const auto [a, c] = corner_nbrs_[b];
        if (a < 0) {
            g[b] += nu.masses[b] / omega_[b];
        } else {
            const double share = nu.masses[b] / (omega_[a] + omega_[c]);
            g[a] += share;
            g[c] += share;
        }
    }
    return g;
}

Field MartinOperator::apply(const BoundaryMeasure& nu) const {
    Field u;
    u.boundary = boundary_data(nu);
    u.interior = op_->boundary_load(u.boundary);
    factor_->solve_in_place(u.interior);
    return u;
}

Field MartinOperator::column(int y) const {
    BoundaryMeasure nu(omega_.size());
    nu.masses.at(y) = 1.0;
    return apply(nu);
}

std::vector<double> MartinOperator::row(int i) const {
    std::vector<double> e(op_->size(), 0.0);
    e[i] = 1.0;
    factor_->solve_in_place(e);
    const std::vector<double> hy = op_->boundary_adjoint(e);
    std::vector<double> k(hy.size());
    for (std::size_t b = 0; b < hy.size(); ++b) {
        const auto [a, c] = corner_nbrs_[b];
        k[b] = a < 0 ? hy[b] / omega_[b] : (hy[a] + hy[c]) / (omega_[a] + omega_[c]);
    }
    return k;
}

double Lab::inner(std::span<const double> a, std::span<const double> b) const {
    return kernels::dot(a, b) * vol();
}

std::shared_ptr<Lab> make_lab(GridDomain d, Potential v, const LabOptions& opts) {
    auto lab = std::make_shared<Lab>();
    lab->domain = std::make_shared<const GridDomain>(std::move(d));
    lab->potential = std::move(v);
    lab->op = std::make_shared<const OperatorLV>(lab->domain, lab->potential.values);
    lab->spectral = ground_state(*lab->op, opts.ground_state);
    auto f = std::make_shared<Factorization>(lab->op->matrix());
    if (!f->ok()) throw LabError(Stage::green, "factorization of -L_V failed");
    lab->factor = f;
    lab->green = std::make_unique<GreenOperator>(lab->op, lab->factor, opts.dense_green);
    lab->martin = std::make_unique<MartinOperator>(lab->op, lab->factor);
    return lab;
}

double strip_integral(const Lab& lab, const Strip& s, std::span<const double> values) {
    const GridDomain& d = lab.dom();
    double acc = 0.0;
    for (std::size_t k = 0; k < s.nodes.size(); ++k) {
        const int i = s.nodes[k];
        acc += s.weights[k] * lab.spectral.phi[i] / d.delta[i] * values[i];
    }
    return acc;
}

WeightedEstimatesReport verify_weighted_estimates(const Lab& lab, std::uint64_t seed, int samples) {
    const GridDomain& d = lab.dom();
    Rng rng(seed);
    WeightedEstimatesReport r;
    r.samples = samples;
    r.betas = geometric_levels(4.0 * d.h, d.inradius / 4.0, 6);
    std::vector<Strip> strips;
    for (double b : r.betas) strips.push_back(extract_strip(d, b));

    std::vector<double> phi_over_delta(d.n_interior());
    for (std::size_t i = 0; i < d.n_interior(); ++i)
        phi_over_delta[i] = lab.spectral.phi[i] / d.delta[i];

    r.green_ratio_min = r.martin_ratio_min = 1e300;
    r.green_ratio_max = r.martin_ratio_max = 0.0;
    r.green_strip_slope_min = 1e300;
    r.green_strip_decays = true;
    for (int s = 0; s < samples; ++s) {
        InteriorMeasure tau = s == 0 ? InteriorMeasure(d.n_interior()) : random_interior(d, rng, true);
        if (s == 0) tau.add_atom(d.reference_node, 1.0);
        const Field g = lab.green->apply(tau);
        const double lhs = kernels::dot(phi_over_delta, g.interior) * lab.vol();
        const double rhs = pair(tau, lab.phi(), lab.vol());
        r.green_ratio_min = std::min(r.green_ratio_min, lhs / rhs);
        r.green_ratio_max = std::max(r.green_ratio_max, lhs / rhs);
        std::vector<double> gs;
        for (const Strip& st : strips) gs.push_back(strip_integral(lab, st, g.interior));
        const double slope = loglog_slope(r.betas, gs);
        r.green_strip_slope_min = std::min(r.green_strip_slope_min, slope);
        if (!(slope > 0.0)) r.green_strip_decays = false;

        BoundaryMeasure nu = random_boundary(d, rng, true);
        const Field k = lab.martin->apply(nu);
        const double mass = total_variation(nu);
        for (const Strip& st : strips) {
            const double ratio = strip_integral(lab, st, k.interior) / mass;
            r.martin_ratio_min = std::min(r.martin_ratio_min, ratio);
            r.martin_ratio_max = std::max(r.martin_ratio_max, ratio);
        }
    }
    const Field z = lab.green->apply(InteriorMeasure(d.n_interior()));
    const Field zk = lab.martin->apply(BoundaryMeasure(d.n_boundary()));
    r.zero_data_integral = std::abs(kernels::dot(phi_over_delta, z.interior)) +
                           std::abs(strip_integral(lab, strips.front(), zk.interior));
    return r;
}

void write_field_csv(const GridDomain& d, std::span<const double> values, const std::string& path) {
    std::ostringstream os;
    os.precision(17);
    os << "node,x,y,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        os << i << ',' << d.interior[i].x << ',' << d.interior[i].y << ',' << values[i] << '\n';
    write_atomic(path, os.str());
}

}  // namespace hardylab
