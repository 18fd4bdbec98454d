#include "hardylab/trace.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hardylab/error.hpp"

namespace hardylab {

const char* verdict_name(TraceVerdict v) {
    switch (v) {
        case TraceVerdict::trace_exists: return "trace_exists";
        case TraceVerdict::inconclusive: return "inconclusive";
        case TraceVerdict::no_trace: return "no_trace";
    }
    return "?";
}

Dictionary parse_dictionary(const std::string& s) {
    if (s == "polynomial") return Dictionary::polynomial;
    if (s == "nodal") return Dictionary::nodal;
    if (s == "auto") return Dictionary::automatic;
    throw LabError(Stage::config, "unknown trace dictionary '" + s + "'");
}

std::vector<double> default_trace_betas(const GridDomain& d) {
    std::vector<double> b;
    for (double beta = d.h; beta <= max_strip_beta(d) * (1 + 1e-12); beta *= 2) b.push_back(beta);
    return b;
}

namespace {

TraceVerdict decide(const TraceReport& r, double tol, double threshold) {
    const double bound = tol * r.scale;
    const bool all_small = std::all_of(r.residuals.begin(), r.residuals.end(),
                                       [&](double v) { return v <= bound; });
    if (r.limit_residual <= bound && (all_small || r.decay_rate > threshold))
        return TraceVerdict::trace_exists;
    // Residuals that grow as beta -> 0 faster than the threshold rate rule out a trace.
    if (std::isfinite(r.decay_rate) && r.decay_rate < -threshold) return TraceVerdict::no_trace;
    return TraceVerdict::inconclusive;
}

double residual_slope(std::span<const double> betas, std::span<const double> res) {
    double slope = loglog_slope(betas, res);
    // Residuals at round-off level everywhere carry no decay information.
    return std::isfinite(slope) ? slope : 0.0;
}

}  // namespace

BoundaryMeasure strip_trace_estimate(const Lab& lab, const Field& u, std::span<const double> betas,
                                     double regularization) {
    const GridDomain& d = lab.dom();
    std::vector<int> cols;
    for (std::size_t b = 0; b < d.n_boundary(); ++b)
        if (d.boundary_active[b]) cols.push_back(static_cast<int>(b));
    std::vector<double> sorted(betas.begin(), betas.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.resize(std::min<std::size_t>(2, sorted.size()));

    std::vector<int> rows;
    std::vector<double> wts;
    for (double beta : sorted) {
        const Strip s = extract_strip(d, beta);
        for (std::size_t k = 0; k < s.nodes.size(); ++k) {
            const int i = s.nodes[k];
            rows.push_back(i);
            wts.push_back(std::sqrt(s.weights[k] * lab.spectral.phi[i] / d.delta[i]));
        }
    }
    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index n = static_cast<Eigen::Index>(cols.size());
    const Eigen::Index extra = regularization > 0 ? n : 0;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m + extra, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + extra);
    for (Eigen::Index r = 0; r < m; ++r) {
        const std::vector<double> krow = lab.martin->row(rows[r]);
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = wts[r] * krow[cols[c]];
        rhs[r] = wts[r] * u.interior[rows[r]];
    }
    if (extra > 0) {
        const double ridge = std::sqrt(regularization) * a.topRows(m).colwise().norm().maxCoeff();
        for (Eigen::Index c = 0; c < extra; ++c) a(m + c, c) = ridge;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < n)
        throw LabError(Stage::trace, "singular strip least-squares system (rank " +
                                         std::to_string(qr.rank()) + " of " + std::to_string(n) +
                                         "); set a regularization parameter");
    const Eigen::VectorXd x = qr.solve(rhs);
    BoundaryMeasure nu(d.n_boundary());
    for (Eigen::Index c = 0; c < n; ++c) nu.masses[cols[c]] = x[c];
    return nu;
}

TraceReport trace_normalized(const Lab& lab, const Field& u, std::span<const double> betas,
                             const TraceOptions& opts) {
    const GridDomain& d = lab.dom();
    if (u.interior.size() != d.n_interior() || u.boundary.size() != d.n_boundary())
        throw LabError(Stage::trace, "field does not match the domain");
    if (betas.empty()) throw LabError(Stage::trace, "no strip levels given");
    const auto omega = lab.martin->omega();

    TraceReport r;
    r.estimated_measure = BoundaryMeasure(d.n_boundary());
    for (std::size_t b = 0; b < d.n_boundary(); ++b) {
        if (!d.boundary_active[b]) continue;
        r.estimated_measure.masses[b] =
            opts.regularization > 0 ? u.boundary[b] / (1.0 / omega[b] + opts.regularization)
                                    : u.boundary[b] * omega[b];
    }
    const Field k = lab.martin->apply(r.estimated_measure);
    for (std::size_t b = 0; b < d.n_boundary(); ++b)
        r.limit_residual += omega[b] * std::abs(u.boundary[b] - k.boundary[b]);

    std::vector<double> diff(d.n_interior()), absu(d.n_interior());
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        diff[i] = std::abs(u.interior[i] - k.interior[i]);
        absu[i] = std::abs(u.interior[i]);
    }
    double field_scale = 0.0;
    for (double beta : betas) {
        const Strip s = extract_strip(d, beta);
        r.betas.push_back(beta);
        r.residuals.push_back(strip_integral(lab, s, diff));
        field_scale = std::max(field_scale, strip_integral(lab, s, absu));
    }
    r.scale = std::max({field_scale, total_variation(r.estimated_measure), 1e-300});
    r.decay_rate = residual_slope(r.betas, r.residuals);
    r.verdict = decide(r, opts.residual_tol, opts.decay_threshold);
    if (opts.with_strip_estimate)
        r.strip_estimate = strip_trace_estimate(lab, u, betas, opts.strip_regularization);
    return r;
}

namespace {

struct DictionaryEval {
    const GridDomain& d;
    Dictionary kind;
    int degree;
    std::vector<double> params;  // sorted active boundary parameters
    std::vector<int> order;      // active boundary node per hat
    double period = 1.0;

    int size() const {
        if (kind == Dictionary::nodal) return static_cast<int>(order.size());
        return d.dim == 1 ? degree + 1 : (degree + 1) * (degree + 2) / 2;
    }

    double param_of(Point p) const {
        if (d.shape == Shape::disk) {
            double a = std::atan2(p.y, p.x);
            return a < 0 ? a + 2.0 * std::numbers::pi : a;
        }
        // Square: parameter of the foot point on the nearest edge.
        const double db = p.y, dr = 1 - p.x, dt = 1 - p.y, dl = p.x;
        const double m = std::min({db, dr, dt, dl});
        if (m == db) return p.x;
        if (m == dr) return 1 + p.y;
        if (m == dt) return 2 + (1 - p.x);
        return 3 + (1 - p.y);
    }

    // Adds coefficient * h_k(p) into out for every dictionary function.
    void accumulate(Point p, double coeff, std::vector<double>& out) const {
        if (kind == Dictionary::polynomial) {
            const double sx = (p.x - d.center.x) / d.inradius;
            const double sy = (p.y - d.center.y) / d.inradius;
            int k = 0;
            if (d.dim == 1) {
                double t = 1.0;
                for (int a = 0; a <= degree; ++a, t *= sx) out[k++] += coeff * t;
                return;
            }
            for (int tot = 0; tot <= degree; ++tot)
                for (int a = tot; a >= 0; --a)
                    out[k++] += coeff * std::pow(sx, a) * std::pow(sy, tot - a);
            return;
        }
        if (d.dim == 1) {
            out[0] += coeff * (1.0 - p.x);
            out[1] += coeff * p.x;
            return;
        }
        const double gauge = std::min(1.0, std::hypot(p.x - d.center.x, p.y - d.center.y) /
                                               (0.5 * d.inradius));
        const double s = param_of(p);
        const std::size_t m = params.size();
        auto up = std::upper_bound(params.begin(), params.end(), s);
        std::size_t j1 = static_cast<std::size_t>(up - params.begin()) % m;
        std::size_t j0 = (j1 + m - 1) % m;
        double s0 = params[j0], s1 = params[j1];
        double ss = s;
        if (s1 <= s0) s1 += period;
        if (ss < s0) ss += period;
        const double t = (ss - s0) / (s1 - s0);
        out[j0] += coeff * gauge * (1.0 - t);
        out[j1] += coeff * gauge * t;
    }
};

DictionaryEval make_dictionary(const GridDomain& d, Dictionary kind, int degree) {
    DictionaryEval de{d, kind, degree, {}, {}, 1.0};
    if (kind != Dictionary::nodal || d.dim == 1) {
        if (d.dim == 1)
            for (std::size_t b = 0; b < d.n_boundary(); ++b) de.order.push_back(static_cast<int>(b));
        return de;
    }
    de.period = d.shape == Shape::disk ? 2.0 * std::numbers::pi : 4.0;
    for (std::size_t b = 0; b < d.n_boundary(); ++b)
        if (d.boundary_active[b]) {
            de.order.push_back(static_cast<int>(b));
            de.params.push_back(d.boundary_param[b]);
        }
    for (std::size_t k = 1; k < de.params.size(); ++k)
        if (!(de.params[k] > de.params[k - 1]))
            throw LabError(Stage::trace, "boundary parameters are not strictly increasing");
    return de;
}

Eigen::MatrixXd boundary_moment_matrix(const GridDomain& d, const DictionaryEval& de,
                                       const std::vector<int>& cols) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(de.size(), static_cast<Eigen::Index>(cols.size()));
    std::vector<double> buf(de.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
        std::fill(buf.begin(), buf.end(), 0.0);
        de.accumulate(d.boundary[cols[c]], 1.0, buf);
        for (int k = 0; k < de.size(); ++k) m(k, static_cast<Eigen::Index>(c)) = buf[k];
    }
    return m;
}

}  // namespace

TraceLVReport trace_LV(const Lab& lab, const Field& u, const Exhaustion& ex,
                       const TraceLVOptions& opts) {
    const GridDomain& d = lab.dom();
    if (u.interior.size() != d.n_interior() || u.boundary.size() != d.n_boundary())
        throw LabError(Stage::trace, "field does not match the domain");
    if (ex.levels.empty()) throw LabError(Stage::trace, "empty exhaustion");

    std::vector<int> cols;
    for (std::size_t b = 0; b < d.n_boundary(); ++b)
        if (d.boundary_active[b]) cols.push_back(static_cast<int>(b));

    TraceLVReport out;
    Dictionary kind = opts.dictionary;
    Eigen::MatrixXd mb;
    if (kind == Dictionary::automatic) {
        DictionaryEval poly = make_dictionary(d, Dictionary::polynomial, opts.degree);
        mb = boundary_moment_matrix(d, poly, cols);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mb);
        kind = qr.rank() == static_cast<Eigen::Index>(cols.size()) ? Dictionary::polynomial
                                                                   : Dictionary::nodal;
    }
    const DictionaryEval dict = make_dictionary(d, kind, opts.degree);
    mb = boundary_moment_matrix(d, dict, cols);
    out.dictionary_used = kind;

    const int w = d.width();
    const double coef = lab.op->coupling();
    const auto diag = lab.op->diagonal();
    std::vector<double> betas_pos, level_res;
    for (const Subdomain& sd : ex.levels) {
        // Harmonic measure of D_n seen from x0: omega_n(z) = sum_{i in D, i~z} psi_i / h^2.
        const int n = static_cast<int>(sd.nodes.size());
        std::vector<int> local(d.n_interior(), -1);
        for (int k = 0; k < n; ++k) local[sd.nodes[k]] = k;
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < n; ++k) {
            const int i = sd.nodes[k];
            trip.emplace_back(k, k, diag[i]);
            for (int q = 0; q < w; ++q) {
                const std::int32_t v = d.links[i * w + q];
                if (v >= 0 && local[v] >= 0) trip.emplace_back(k, local[v], -coef);
            }
        }
        SparseMatrix a(n, n);
        a.setFromTriplets(trip.begin(), trip.end());
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
        if (ldlt.info() != Eigen::Success)
            throw LabError(Stage::trace, "factorization failed on an exhaustion level");
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[local[d.reference_node]] = 1.0;
        const Eigen::VectorXd psi = ldlt.solve(e);

        std::vector<double> mom(dict.size(), 0.0);
        double hm = 0.0;
        // Accumulate link by link: each (i in D, z outside D) pair adds psi_i/h^2 at z.
        for (int k = 0; k < n; ++k) {
            const int i = sd.nodes[k];
            for (int q = 0; q < w; ++q) {
                const std::int32_t v = d.links[i * w + q];
                if (v >= 0 && local[v] >= 0) continue;
                const double om = psi[k] * coef;
                Point z;
                double uz;
                if (v >= 0) {
                    z = d.interior[v];
                    uz = u.interior[v];
                } else {
                    z = d.boundary[-v - 1];
                    uz = u.boundary[-v - 1];
                }
                hm += om;
                dict.accumulate(z, om * uz, mom);
            }
        }
        out.moments.push_back(std::move(mom));
        out.harmonic_mass.push_back(hm);
    }

    const std::vector<double>& last = out.moments.back();
    Eigen::Map<const Eigen::VectorXd> ml(last.data(), static_cast<Eigen::Index>(last.size()));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mb);
    if (qr.rank() < static_cast<Eigen::Index>(cols.size()))
        throw LabError(Stage::trace, "moment system rank deficiency (rank " +
                                         std::to_string(qr.rank()) + " of " +
                                         std::to_string(cols.size()) + ")");
    const Eigen::VectorXd nu = qr.solve(ml);

    TraceReport& r = out.trace;
    r.estimated_measure = BoundaryMeasure(d.n_boundary());
    for (std::size_t c = 0; c < cols.size(); ++c)
        r.estimated_measure.masses[cols[c]] = nu[static_cast<Eigen::Index>(c)];
    const Eigen::VectorXd fitted = mb * nu;
    double scale = 0.0;
    for (std::size_t l = 0; l < out.moments.size(); ++l) {
        Eigen::Map<const Eigen::VectorXd> m(out.moments[l].data(),
                                            static_cast<Eigen::Index>(out.moments[l].size()));
        const double res = (m - fitted).lpNorm<1>();
        scale = std::max(scale, m.lpNorm<1>());
        if (ex.levels[l].beta > 0) {
            r.betas.push_back(ex.levels[l].beta);
            r.residuals.push_back(res);
        } else {
            r.limit_residual = res;
        }
    }
    r.scale = std::max(scale, 1e-300);
    r.decay_rate = r.betas.size() >= 2 ? residual_slope(r.betas, r.residuals) : 0.0;
    r.verdict = decide(r, opts.residual_tol, opts.decay_threshold);
    return out;
}

EquivalenceReport check_trace_equivalence(const Lab& lab, const Field& u, const Exhaustion& ex,
                                          const TraceOptions& nopts, const TraceLVOptions& lopts) {
    EquivalenceReport r;
    const std::vector<double> betas = default_trace_betas(lab.dom());
    r.normalized = trace_normalized(lab, u, betas, nopts);
    r.lv = trace_LV(lab, u, ex, lopts);
    r.discrepancy = total_variation_diff(r.normalized.estimated_measure, r.lv.trace.estimated_measure);
    r.verdicts_agree = r.normalized.verdict == r.lv.trace.verdict;
    return r;
}

}  // namespace hardylab
