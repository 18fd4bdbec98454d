#include "hardylab/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hardylab/error.hpp"
#include "hardylab/kernels.hpp"

namespace hardylab {

SolverKind parse_solver(const std::string& s) {
    if (s == "newton") return SolverKind::newton;
    if (s == "fixed_point") return SolverKind::fixed_point;
    throw LabError(Stage::config, "unknown solver '" + s + "'");
}

namespace {

// Interior system A u + f(u) = b with A symmetric positive definite.
struct System {
    std::function<void(std::span<const double>, std::span<double>)> apply;
    std::vector<double> b;
    const Factorization* base = nullptr;  // A
    Factorization* jac = nullptr;         // pattern of A, refactored as A + diag f'(u)
    std::vector<double> w;                // A^{-1} b
};

void eval_f(const Nonlinearity& f, std::span<const double> u, std::span<double> out) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double v = f(u[i]);
        if (!std::isfinite(v))
            throw LabError(Stage::solve, "non-finite f(u) = " + std::to_string(v) + " at node " +
                                             std::to_string(i) + " (u = " + std::to_string(u[i]) +
                                             ")");
        out[i] = v;
    }
}

bool all_finite(const Nonlinearity& f, std::span<const double> u) {
    for (double v : u)
        if (!std::isfinite(f(v))) return false;
    return true;
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// ||u + A^{-1} f(u) - w||_inf / ||w||_inf, given fu = f(u)
double rep_residual(const System& s, std::span<const double> u, std::span<const double> fu,
                    double wscale) {
    std::vector<double> g = s.base->solve(fu);
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] + g[i] - s.w[i]));
    return m / wscale;
}

struct CoreResult {
    std::vector<double> u;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

CoreResult newton(const System& s, const Nonlinearity& f, std::vector<double> u, double tol,
                  int cap) {
    const std::size_t n = u.size();
    const double wscale = std::max(norm_inf(s.w), 1e-300);
    std::vector<double> fu(n), fp(n), au(n), ad(n), F(n), d(n), trial(n), ftrial(n);
    eval_f(f, u, fu);
    double res = rep_residual(s, u, fu, wscale);
    CoreResult best{u, 0, res, false};
    double prev = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < cap; ++it) {
        if (res < 1e-3 * tol) break;
        if (res < tol && res > 0.5 * prev) break;
        s.apply(u, au);
        for (std::size_t i = 0; i < n; ++i) {
            F[i] = au[i] + fu[i] - s.b[i];
            fp[i] = f.derivative(u[i]);
            if (!std::isfinite(fp[i]))
                throw LabError(Stage::solve, "non-finite f'(u) at node " + std::to_string(i));
        }
        if (!s.jac->refactor(fp)) throw LabError(Stage::solve, "Jacobian factorization failed");
        for (std::size_t i = 0; i < n; ++i) d[i] = -F[i];
        s.jac->solve_in_place(d);
        s.apply(d, ad);

        // Exact line search on the convex energy: phi'(t) = d . F(u + t d).
        auto dphi = [&](double t) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = u[i] + t * d[i];
                const double v = f(trial[i]);
                if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
                ftrial[i] = v;
                acc += d[i] * (au[i] + t * ad[i] + v - s.b[i]);
            }
            return std::isfinite(acc) ? acc : std::numeric_limits<double>::infinity();
        };
        double t = 1.0;
        if (!(dphi(1.0) <= 0.0)) {
            double lo = 0.0, hi = 1.0;
            for (int k = 0; k < 50; ++k) {
                const double mid = 0.5 * (lo + hi);
                (dphi(mid) <= 0.0 ? lo : hi) = mid;
            }
            t = lo;
            if (t == 0.0) break;
        }
        for (std::size_t i = 0; i < n; ++i) u[i] += t * d[i];
        eval_f(f, u, fu);
        prev = res;
        res = rep_residual(s, u, fu, wscale);
        if (res < best.residual) best = {u, it + 1, res, false};
    }
    best.iterations = std::max(best.iterations, it);
    best.converged = best.residual < tol;
    return best;
}

CoreResult fixed_point(const System& s, const Nonlinearity& f, std::vector<double> u, double tol,
                       int cap, double theta) {
    const std::size_t n = u.size();
    const double wscale = std::max(norm_inf(s.w), 1e-300);
    std::vector<double> fu(n), tu(n), cand(n), tc(n);
    auto T = [&](std::span<const double> x, std::span<double> out) {
        eval_f(f, x, fu);
        std::vector<double> g = s.base->solve(fu);
        for (std::size_t i = 0; i < n; ++i) out[i] = s.w[i] - g[i];
    };
    auto gap = [&](std::span<const double> x, std::span<const double> tx) {
        return kernels::max_abs_diff(x, tx) / wscale;
    };
    T(u, tu);
    double res = gap(u, tu);
    int it = 0;
    for (; it < cap && res >= tol; ++it) {
        for (std::size_t i = 0; i < n; ++i) cand[i] = u[i] + theta * (tu[i] - u[i]);
        T(cand, tc);
        const double rc = gap(cand, tc);
        if (rc > res) {
            theta *= 0.5;
            if (theta < 1e-12) break;
            continue;
        }
        u.swap(cand);
        tu.swap(tc);
        res = rc;
    }
    return {u, it, res, res < tol};
}

CoreResult run(const System& s, const Nonlinearity& f, std::vector<double> u0,
               const SolveOptions& opts) {
    if (!(opts.tolerance > 0)) throw LabError(Stage::solve, "tolerance must be positive");
    if (opts.solver == SolverKind::newton)
        return newton(s, f, std::move(u0), opts.tolerance,
                      opts.max_iterations > 0 ? opts.max_iterations : 200);
    return fixed_point(s, f, std::move(u0), opts.tolerance,
                       opts.max_iterations > 0 ? opts.max_iterations : 50000, opts.theta);
}

SolveResult package(const Lab& lab, const Nonlinearity& f, CoreResult c, std::vector<double> g,
                    const SolveOptions& opts) {
    SolveResult r;
    r.u.interior = std::move(c.u);
    r.u.boundary = std::move(g);
    r.iterations = c.iterations;
    r.residual = c.residual;
    r.converged = c.converged;
    std::vector<double> fu(r.u.interior.size());
    for (std::size_t i = 0; i < fu.size(); ++i) fu[i] = std::abs(f(r.u.interior[i]));
    r.f_of_u_norm = kernels::dot(fu, lab.phi()) * lab.vol();
    r.status = r.converged ? "converged"
                           : "not converged after " + std::to_string(r.iterations) +
                                 " iterations (" +
                                 (opts.solver == SolverKind::newton ? "newton" : "fixed_point") + ")";
    return r;
}

}  // namespace

Field linear_solution(const Lab& lab, const InteriorMeasure& tau, const BoundaryMeasure& nu) {
    return lab.green->apply(tau) + lab.martin->apply(nu);
}

double representation_residual(const Lab& lab, const Nonlinearity& f, const Field& u, const Field& w) {
    std::vector<double> fu(u.interior.size());
    for (std::size_t i = 0; i < fu.size(); ++i) fu[i] = f(u.interior[i]);
    std::vector<double> g = lab.green->solve(fu);
    double m = 0.0;
    for (std::size_t i = 0; i < fu.size(); ++i)
        m = std::max(m, std::abs(u.interior[i] + g[i] - w.interior[i]));
    return m / std::max(w.max_abs(), 1e-300);
}

SolveResult solve_bvp(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                      const BoundaryMeasure& nu, const SolveOptions& opts) {
    const GridDomain& d = lab.dom();
    if (tau.size() != d.n_interior() || nu.size() != d.n_boundary())
        throw LabError(Stage::solve, "data do not match the domain");
    std::vector<double> g = lab.martin->boundary_data(nu);
    System s;
    const OperatorLV& op = *lab.op;
    s.apply = [&op](std::span<const double> x, std::span<double> y) {
        std::vector<double> r = op.apply_interior(x);
        std::copy(r.begin(), r.end(), y.begin());
    };
    s.b = tau.loads(d.cell_volume());
    kernels::axpy(1.0, op.boundary_load(g), s.b);
    s.base = lab.factor.get();
    Factorization jac(op.matrix());
    s.jac = &jac;
    s.w = s.base->solve(s.b);

    std::vector<double> u0;
    if (opts.initial) {
        if (opts.initial->interior.size() != d.n_interior())
            throw LabError(Stage::solve, "initial guess does not match the domain");
        u0 = opts.initial->interior;
    } else if (all_finite(f, s.w)) {
        u0 = s.w;
    } else {
        u0.assign(d.n_interior(), 0.0);
    }
    return package(lab, f, run(s, f, std::move(u0), opts), std::move(g), opts);
}

bool compare_sub_super(const Field& u_sub, const Field& u_super, double tol) {
    return leq(u_sub, u_super, tol);
}

KatoReport kato_check(const OperatorLV& op, const Field& w) {
    const std::size_t n = op.size();
    std::vector<double> x = w.extended();
    std::vector<double> xp(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xp[i] = std::max(x[i], 0.0);
    std::vector<double> y(n), yp(n);
    op.apply_extended(x, y);
    op.apply_extended(xp, yp);
    KatoReport r;
    r.worst_violation = -std::numeric_limits<double>::infinity();
    const GridDomain& d = op.domain();
    const int wd = d.width();
    for (std::size_t i = 0; i < n; ++i) {
        const double sgn = x[i] > 0 ? 1.0 : 0.0;
        const double v = yp[i] - sgn * y[i];
        if (v > r.worst_violation) {
            r.worst_violation = v;
            r.worst_node = static_cast<int>(i);
        }
        for (int k = 0; k < wd; ++k)
            if ((x[d.gather[i * wd + k]] > 0) != (x[i] > 0)) {
                ++r.sign_change_nodes;
                break;
            }
    }
    return r;
}

ExhaustionSolveResult solve_by_exhaustion(const Lab& lab, const Nonlinearity& f,
                                          const InteriorMeasure& tau, const Field& w,
                                          const Exhaustion& ex, const SolveOptions& opts) {
    const GridDomain& d = lab.dom();
    if (w.interior.size() != d.n_interior() || w.boundary.size() != d.n_boundary())
        throw LabError(Stage::solve, "supersolution does not match the domain");
    const std::vector<double> loads = tau.loads(d.cell_volume());
    const int wd = d.width();
    const double coef = lab.op->coupling();
    const auto diag = lab.op->diagonal();

    ExhaustionSolveResult out;
    for (const Subdomain& sd : ex.levels) {
        const int n = static_cast<int>(sd.nodes.size());
        std::vector<int> local(d.n_interior(), -1);
        for (int k = 0; k < n; ++k) local[sd.nodes[k]] = k;
        std::vector<Eigen::Triplet<double>> trip;
        System s;
        s.b.assign(n, 0.0);
        for (int k = 0; k < n; ++k) {
            const int i = sd.nodes[k];
            trip.emplace_back(k, k, diag[i]);
            s.b[k] = loads[i];
            for (int q = 0; q < wd; ++q) {
                const std::int32_t v = d.links[i * wd + q];
                if (v >= 0 && local[v] >= 0)
                    trip.emplace_back(k, local[v], -coef);
                else
                    s.b[k] += coef * (v >= 0 ? w.interior[v] : w.boundary[-v - 1]);
            }
        }
        SparseMatrix a(n, n);
        a.setFromTriplets(trip.begin(), trip.end());
        a.makeCompressed();
        Factorization base(a), jac(a);
        if (!base.ok()) throw LabError(Stage::solve, "subdomain factorization failed");
        s.base = &base;
        s.jac = &jac;
        s.apply = [&a](std::span<const double> x, std::span<double> y) {
            Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
            Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
            yv = a * xv;
        };
        s.w = base.solve(s.b);
        std::vector<double> u0(n);
        for (int k = 0; k < n; ++k) u0[k] = w.interior[sd.nodes[k]];
        if (!all_finite(f, u0)) std::fill(u0.begin(), u0.end(), 0.0);
        CoreResult c = run(s, f, std::move(u0), opts);

        SolveResult lvl;
        lvl.u = w;
        for (int k = 0; k < n; ++k) lvl.u.interior[sd.nodes[k]] = c.u[k];
        lvl.iterations = c.iterations;
        lvl.residual = c.residual;
        lvl.converged = c.converged;
        std::vector<double> fu(d.n_interior());
        for (std::size_t i = 0; i < fu.size(); ++i) fu[i] = std::abs(f(lvl.u.interior[i]));
        lvl.f_of_u_norm = kernels::dot(fu, lab.phi()) * lab.vol();
        lvl.status = c.converged ? "converged" : "not converged";
        if (!c.converged)
            throw LabError(Stage::solve, "exhaustion level with beta = " + std::to_string(sd.beta) +
                                             " did not converge");
        if (!out.levels.empty()) {
            const Field& prev = out.levels.back().u;
            for (std::size_t i = 0; i < d.n_interior(); ++i)
                out.worst_increase =
                    std::max(out.worst_increase, lvl.u.interior[i] - prev.interior[i]);
        }
        out.levels.push_back(std::move(lvl));
    }
    out.decreasing = out.worst_increase <= 1e-10 * std::max(1.0, w.max_abs());
    out.result = out.levels.back();
    return out;
}

double interior_gradient_norm(const GridDomain& d, const Field& u, double p) {
    const std::vector<double> x = u.extended();
    const int wd = d.width();
    double acc = 0.0;
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        if (d.delta[i] <= d.inradius / 4.0) continue;
        double g2 = 0.0;
        for (int k = 1; k < wd; k += 2) {
            const double diff = (x[d.gather[i * wd + k]] - x[i]) / d.h;
            g2 += diff * diff;
        }
        acc += std::pow(std::sqrt(g2), p);
    }
    return std::pow(acc * d.cell_volume(), 1.0 / p);
}

}  // namespace hardylab
