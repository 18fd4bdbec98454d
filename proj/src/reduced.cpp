#include "hardylab/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/kernels.hpp"
#include "hardylab/trace.hpp"

namespace hardylab {

std::vector<double> default_schedule(int max_exponent) {
    std::vector<double> s;
    for (int k = 0; k <= max_exponent; ++k) s.push_back(std::ldexp(1.0, k));
    return s;
}

namespace {

bool nonnegative(const InteriorMeasure& t) {
    return std::all_of(t.density.begin(), t.density.end(), [](double v) { return v >= 0; }) &&
           std::all_of(t.atoms.begin(), t.atoms.end(), [](const Atom& a) { return a.mass >= 0; });
}

bool nonnegative(const BoundaryMeasure& n) {
    return std::all_of(n.masses.begin(), n.masses.end(), [](double v) { return v >= 0; });
}

double max_entry(const InteriorMeasure& t) {
    double m = 0.0;
    for (double v : t.density) m = std::max(m, std::abs(v));
    for (const Atom& a : t.atoms) m = std::max(m, std::abs(a.mass));
    return m;
}

double max_entry(const BoundaryMeasure& n) {
    double m = 0.0;
    for (double v : n.masses) m = std::max(m, std::abs(v));
    return m;
}

// One monotone truncation sequence u_n for fixed data.
struct Sequence {
    const Lab& lab;
    Nonlinearity f;
    InteriorMeasure tau;
    BoundaryMeasure nu;
    bool expect_monotone;

    Sequence(const Lab& l, Nonlinearity fn, InteriorMeasure t, BoundaryMeasure n, bool mono)
        : lab(l), f(std::move(fn)), tau(std::move(t)), nu(std::move(n)), expect_monotone(mono) {}

    std::optional<Field> prev;
    double level = 0.0;
    double first_norm = 0.0;
    bool at_limit = false;
    bool monotone_ok = true;
    double worst_increase = 0.0;
    std::vector<LevelRecord> records;

    void step(double n, const ReduceOptions& opts) {
        const Nonlinearity fn = truncate(f, n);
        SolveOptions so = opts.solve;
        if (prev) so.initial = prev;
        SolveResult r = solve_bvp(lab, fn, tau, nu, so);
        if (!r.converged)
            throw LabError(Stage::reduce, "truncation level " + std::to_string(n) + ": " + r.status);
        LevelRecord rec;
        rec.level = n;
        rec.iterations = r.iterations;
        rec.residual = r.residual;
        rec.gradient_norm = interior_gradient_norm(lab.dom(), r.u);
        std::vector<double> fv(r.u.interior.size());
        for (std::size_t i = 0; i < fv.size(); ++i) {
            const double t = r.u.interior[i];
            fv[i] = fn(t);
            if (fv[i] != f(t)) rec.clamp_active = true;
        }
        rec.f_n_integral = kernels::dot(fv, lab.phi()) * lab.vol();
        if (prev) {
            rec.change = max_abs_diff(r.u, *prev);
            if (expect_monotone) {
                double inc = 0.0;
                for (std::size_t i = 0; i < r.u.interior.size(); ++i)
                    inc = std::max(inc, r.u.interior[i] - prev->interior[i]);
                worst_increase = std::max(worst_increase, inc);
                if (inc > opts.monotone_slack) monotone_ok = false;
            }
            at_limit = rec.change <= opts.limit_tol * first_norm;
        } else {
            rec.change = std::numeric_limits<double>::infinity();
            first_norm = r.u.max_abs();
        }
        records.push_back(rec);
        level = n;
        prev = std::move(r.u);
    }
};

ReducedResult finalize(const Lab& lab, const Sequence& seq, const ReduceOptions& opts) {
    const GridDomain& d = lab.dom();
    ReducedResult out;
    out.u_sharp = *seq.prev;
    out.per_level = seq.records;
    out.monotone_ok = seq.monotone_ok;
    out.cauchy_ok = seq.at_limit;
    out.worst_increase = seq.worst_increase;

    // Exact bookkeeping of the last truncation: -L_V u + f(u) = tau + (f(u) - f_N(u)).
    const Nonlinearity fn = truncate(seq.f, seq.level);
    out.tau_sharp = seq.tau;
    const double vol = d.cell_volume();
    for (std::size_t i = 0; i < d.n_interior(); ++i) {
        const double t = out.u_sharp.interior[i];
        const double defect = seq.f(t) - fn(t);
        if (defect == 0.0) continue;
        if (seq.tau.atom_at(static_cast<int>(i)) != 0.0)
            out.tau_sharp.add_atom(static_cast<int>(i), defect * vol);
        else
            out.tau_sharp.density[i] += defect;
    }
    TraceOptions topts;
    topts.with_strip_estimate = opts.with_strip_estimate;
    topts.strip_regularization = opts.strip_regularization;
    const TraceReport tr = trace_normalized(lab, out.u_sharp, default_trace_betas(d), topts);
    out.nu_sharp = tr.estimated_measure;
    out.strip_estimate = tr.strip_estimate;

    const Field w = linear_solution(lab, out.tau_sharp, out.nu_sharp);
    out.representation_residual = representation_residual(lab, seq.f, out.u_sharp, w);

    std::vector<double> r = lab.op->apply(out.u_sharp);
    const std::vector<double> loads = out.tau_sharp.loads(vol);
    std::vector<double> fu(d.n_interior()), absr(d.n_interior()), u_over(d.n_interior());
    for (std::size_t i = 0; i < r.size(); ++i) {
        fu[i] = std::abs(seq.f(out.u_sharp.interior[i]));
        absr[i] = std::abs(r[i] + seq.f(out.u_sharp.interior[i]) - loads[i]);
        u_over[i] = std::abs(out.u_sharp.interior[i]) / d.delta[i];
    }
    const double data = weighted_norm(seq.tau, lab.phi(), vol) + total_variation(seq.nu);
    const double data_scale = std::max(data, 1e-300);
    out.stencil_residual = kernels::dot(absr, lab.phi()) * vol / data_scale;
    out.estimate_constant =
        (kernels::dot(u_over, lab.phi()) + kernels::dot(fu, lab.phi())) * vol / data_scale;

    if (seq.expect_monotone) {
        const double st = 1e-9 * std::max(max_entry(seq.tau), 1e-300);
        const double sn = 1e-12 * std::max(max_entry(seq.nu), 1e-300);
        InteriorMeasure zt(d.n_interior());
        BoundaryMeasure zn(d.n_boundary());
        out.bounds_ok = leq(zt, out.tau_sharp, st) && leq(out.tau_sharp, seq.tau, st) &&
                        leq(zn, out.nu_sharp, sn) && leq(out.nu_sharp, seq.nu, sn);
    }
    return out;
}

}  // namespace

ReducedResult reduced_couple(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                             const BoundaryMeasure& nu, const ReduceOptions& opts) {
    if (opts.schedule.empty()) throw LabError(Stage::reduce, "empty truncation schedule");
    for (std::size_t k = 1; k < opts.schedule.size(); ++k)
        if (!(opts.schedule[k] > opts.schedule[k - 1]))
            throw LabError(Stage::reduce, "truncation schedule must be strictly increasing");
    InteriorMeasure t = tau;
    t.canonicalize();
    Sequence seq(lab, f, t, nu, nonnegative(t) && nonnegative(nu));
    for (double n : opts.schedule) {
        seq.step(n, opts);
        if (seq.at_limit) break;
    }
    return finalize(lab, seq, opts);
}

ReducedResult reduced_boundary(const Lab& lab, const Nonlinearity& f, const BoundaryMeasure& nu,
                               const ReduceOptions& opts) {
    return reduced_couple(lab, f, InteriorMeasure(lab.dom().n_interior()), nu, opts);
}

IndependenceReport verify_independence(const Lab& lab, const Nonlinearity& f,
                                       const InteriorMeasure& tau, const BoundaryMeasure& nu,
                                       const ReduceOptions& opts, double rel_tol) {
    const GridDomain& d = lab.dom();
    const ReducedResult both = reduced_couple(lab, f, tau, nu, opts);
    const ReducedResult bnd = reduced_couple(lab, f, InteriorMeasure(d.n_interior()), nu, opts);
    const ReducedResult inr = reduced_couple(lab, f, tau, BoundaryMeasure(d.n_boundary()), opts);
    IndependenceReport r;
    r.nu_discrepancy = total_variation_diff(both.nu_sharp, bnd.nu_sharp);
    r.tau_discrepancy = weighted_distance(both.tau_sharp, inr.tau_sharp, lab.phi(), d.cell_volume());
    r.nu_norm = total_variation(nu);
    r.tau_norm = weighted_norm(tau, lab.phi(), d.cell_volume());
    r.pass = r.nu_discrepancy <= rel_tol * r.nu_norm && r.tau_discrepancy <= rel_tol * r.tau_norm;
    return r;
}

LatticeReport verify_lattice(const Lab& lab, const Nonlinearity& f, const BoundaryMeasure& nu,
                             const std::vector<std::vector<int>>& subsets, std::uint64_t seed,
                             int n_candidates, const ReduceOptions& opts, double rel_tol) {
    const GridDomain& d = lab.dom();
    LatticeReport r;
    r.nu_norm = total_variation(nu);
    const ReducedResult full = reduced_boundary(lab, f, nu, opts);
    for (const auto& a : subsets) {
        const BoundaryMeasure lhs = restrict(full.nu_sharp, a);
        const BoundaryMeasure rhs = reduced_boundary(lab, f, restrict(nu, a), opts).nu_sharp;
        r.restriction_gap = std::max(r.restriction_gap, total_variation_diff(lhs, rhs));
        double viol = 0.0;
        for (std::size_t b = 0; b < lhs.size(); ++b) viol += std::max(0.0, lhs.masses[b] - rhs.masses[b]);
        r.restriction_violation = std::max(r.restriction_violation, viol);

        std::vector<char> in(d.n_boundary(), 0);
        for (int b : a) in[b] = 1;
        std::vector<int> comp;
        for (std::size_t b = 0; b < d.n_boundary(); ++b)
            if (!in[b]) comp.push_back(static_cast<int>(b));
        const BoundaryMeasure n1 = restrict(nu, a), n2 = restrict(nu, comp);
        const BoundaryMeasure s12 = reduced_boundary(lab, f, n1 + n2, opts).nu_sharp;
        const BoundaryMeasure s1 = reduced_boundary(lab, f, n1, opts).nu_sharp;
        const BoundaryMeasure s2 = reduced_boundary(lab, f, n2, opts).nu_sharp;
        r.additivity_gap = std::max(r.additivity_gap, total_variation_diff(s12, s1 + s2));
    }

    // nu* minimises ||nu - lambda|| over good lambda <= nu.
    r.reduced_distance = total_variation_diff(nu, full.nu_sharp);
    r.best_candidate = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const InteriorMeasure zero(d.n_interior());
    for (int c = 0; c < n_candidates; ++c) {
        BoundaryMeasure lam(d.n_boundary());
        for (std::size_t b = 0; b < d.n_boundary(); ++b) lam.masses[b] = u01(rng) * nu.masses[b];
        ++r.candidates;
        bool good = false;
        try {
            good = solve_bvp(lab, f, zero, lam, opts.solve).converged;
        } catch (const LabError&) {
            good = false;
        }
        if (!good) continue;
        ++r.certified;
        r.best_candidate = std::min(r.best_candidate, total_variation_diff(nu, lam));
    }
    const double tol = rel_tol * std::max(r.nu_norm, 1e-300);
    r.optimal = r.certified == 0 || r.reduced_distance <= r.best_candidate + tol;
    r.pass = r.restriction_gap <= tol && r.restriction_violation <= tol &&
             r.additivity_gap <= tol && r.optimal;
    return r;
}

SignedReport reduced_signed(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                            const BoundaryMeasure& nu, const SignedBounds& bounds,
                            const ReduceOptions& opts) {
    SignedReport r;
    const InteriorMeasure mt1 = -1.0 * bounds.tau1;
    const BoundaryMeasure mn1 = -1.0 * bounds.nu1;
    r.bounds_ok = nonnegative(bounds.tau1) && nonnegative(bounds.tau2) &&
                  nonnegative(bounds.nu1) && nonnegative(bounds.nu2) && leq(mt1, tau) &&
                  leq(tau, bounds.tau2) && leq(mn1, nu) && leq(nu, bounds.nu2);
    if (!r.bounds_ok) throw LabError(Stage::reduce, "data are not bracketed by the given bounds");

    const Nonlinearity fhat = reflect(f);
    InteriorMeasure t = tau, t1 = bounds.tau1, t2 = bounds.tau2;
    t.canonicalize();
    t1.canonicalize();
    t2.canonicalize();
    Sequence up(lab, f, t2, bounds.nu2, true);
    Sequence lo(lab, fhat, t1, bounds.nu1, true);
    Sequence mid(lab, f, t, nu, false);
    for (double n : opts.schedule) {
        up.step(n, opts);
        lo.step(n, opts);
        mid.step(n, opts);
        ++r.levels;
        // v1_n = -w1_n <= u_n <= v2_n
        const Field& u = *mid.prev;
        const double slack = opts.monotone_slack * std::max(1.0, up.prev->max_abs());
        for (std::size_t i = 0; i < u.interior.size(); ++i) {
            const double a = -lo.prev->interior[i] - u.interior[i];
            const double b = u.interior[i] - up.prev->interior[i];
            r.worst_squeeze_violation = std::max({r.worst_squeeze_violation, a, b});
        }
        if (r.worst_squeeze_violation > slack) r.squeeze_ok = false;
        if (up.at_limit && lo.at_limit && mid.at_limit) break;
    }
    r.cauchy_ok = mid.at_limit;
    r.oscillation = mid.records.back().change;
    r.status = r.cauchy_ok ? "sequence is Cauchy"
                           : "subsequence required: oscillation " + std::to_string(r.oscillation);

    r.upper = finalize(lab, up, opts);
    r.lower = finalize(lab, lo, opts);
    const ReducedResult mr = finalize(lab, mid, opts);
    r.u_tilde = mr.u_sharp;
    r.tau_tilde = mr.tau_sharp;
    r.nu_tilde = mr.nu_sharp;
    r.representation_residual = mr.representation_residual;

    const GridDomain& d = lab.dom();
    const double tol = 1e-6 * std::max(max_entry(bounds.tau1) + max_entry(bounds.tau2) +
                                           max_entry(bounds.nu1) + max_entry(bounds.nu2),
                                       1e-300);
    const InteriorMeasure low_t = -1.0 * r.lower.tau_sharp;
    const BoundaryMeasure low_n = -1.0 * r.lower.nu_sharp;
    r.sandwich_ok = leq(low_t, r.tau_tilde, tol) && leq(r.tau_tilde, r.upper.tau_sharp, tol) &&
                    leq(low_n, r.nu_tilde, tol) && leq(r.nu_tilde, r.upper.nu_sharp, tol);
    // Largest nodewise excursion outside the sandwich.
    double v = 0.0;
    for (std::size_t b = 0; b < d.n_boundary(); ++b)
        v = std::max({v, low_n.masses[b] - r.nu_tilde.masses[b],
                      r.nu_tilde.masses[b] - r.upper.nu_sharp.masses[b]});
    for (std::size_t i = 0; i < d.n_interior(); ++i)
        v = std::max({v, low_t.density[i] - r.tau_tilde.density[i],
                      r.tau_tilde.density[i] - r.upper.tau_sharp.density[i]});
    for (const Atom& a : r.tau_tilde.atoms)
        v = std::max({v, low_t.atom_at(a.node) - a.mass, a.mass - r.upper.tau_sharp.atom_at(a.node)});
    r.sandwich_violation = v;
    return r;
}

namespace {

bool certified_good(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                    const BoundaryMeasure& nu, const SolveOptions& opts, double* residual = nullptr) {
    try {
        const SolveResult s = solve_bvp(lab, f, tau, nu, opts);
        if (residual) *residual = s.residual;
        return s.converged;
    } catch (const LabError&) {
        return false;
    }
}

}  // namespace

GoodnessReport verify_sandwich_goodness(const Lab& lab, const Nonlinearity& f,
                                        const MeasureCouple& candidate,
                                        const ReducedResult& upper, const ReducedResult& lower,
                                        const SolveOptions& opts) {
    GoodnessReport r;
    const double tol = 1e-9 * std::max({max_entry(upper.tau_sharp), max_entry(upper.nu_sharp),
                                        max_entry(lower.tau_sharp), max_entry(lower.nu_sharp),
                                        1e-300});
    const MeasureCouple lo{-1.0 * lower.tau_sharp, -1.0 * lower.nu_sharp};
    const MeasureCouple hi{upper.tau_sharp, upper.nu_sharp};
    r.in_sandwich = couple_leq(lo, candidate, tol) && couple_leq(candidate, hi, tol);
    if (!r.in_sandwich) throw LabError(Stage::reduce, "candidate couple lies outside the sandwich");
    r.converged = certified_good(lab, f, candidate.tau, candidate.nu, opts, &r.residual);
    const auto [tp, tm] = jordan_split(candidate.tau);
    const auto [np, nm] = jordan_split(candidate.nu);
    r.positive_part_good = certified_good(lab, f, tp, np, opts);
    r.negative_part_good = certified_good(lab, reflect(f), tm, nm, opts);
    r.pass = r.converged && r.positive_part_good && r.negative_part_good;
    return r;
}

CharacterizationReport verify_positive_part_characterization(const Lab& lab, const Nonlinearity& f,
                                                             const InteriorMeasure& tau,
                                                             const BoundaryMeasure& nu,
                                                             const ReduceOptions& opts) {
    if (!f.vanishes_on_nonpositive())
        throw LabError(Stage::reduce, "characterization needs f = 0 on (-inf, 0]");
    const GridDomain& d = lab.dom();
    InteriorMeasure t = tau;
    t.canonicalize();
    const auto [tp, tm] = jordan_split(t);
    const auto [np, nm] = jordan_split(nu);
    const ReducedResult red = reduced_couple(lab, f, tp, np, opts);
    const MeasureCouple sharp{red.tau_sharp, red.nu_sharp};
    const double tol = 1e-9 * std::max({max_entry(tp), max_entry(np), 1e-300});
    const InteriorMeasure zt(d.n_interior());
    const BoundaryMeasure zn(d.n_boundary());

    CharacterizationReport r;
    auto row = [&](std::string label, const InteriorMeasure& a, const BoundaryMeasure& b) {
        CharacterizationRow cr;
        cr.label = std::move(label);
        cr.predicted_good = couple_leq({a, b}, sharp, tol);
        cr.observed_good = certified_good(lab, f, a, b, opts.solve);
        r.rows.push_back(cr);
    };
    row("(tau, nu)", t, nu);
    row("(tau, 0)", t, zn);
    row("(0, nu)", zt, nu);
    row("(tau+, nu+)#", red.tau_sharp, red.nu_sharp);
    const InteriorMeasure ntm = -1.0 * tm;
    const BoundaryMeasure nnm = -1.0 * nm;
    row("(-tau-, -nu-)", ntm, nnm);
    r.negative_couple_good = r.rows.back().observed_good;
    r.agreement = std::all_of(r.rows.begin(), r.rows.end(), [](const CharacterizationRow& c) {
        return c.predicted_good == c.observed_good;
    });
    return r;
}

L1Report verify_L1_convergence(const Lab& lab, const Nonlinearity& f, const InteriorMeasure& tau,
                               const BoundaryMeasure& nu, const ReduceOptions& opts) {
    const GridDomain& d = lab.dom();
    L1Report r;
    const SolveResult full = solve_bvp(lab, f, tau, nu, opts.solve);
    r.good = full.converged;
    if (!r.good) return r;
    const double vol = d.cell_volume();
    const Field k = lab.martin->apply(nu);
    const double tau_phi = pair(tau, lab.phi(), vol);
    std::vector<double> fu(d.n_interior());
    for (std::size_t i = 0; i < fu.size(); ++i) fu[i] = f(full.u.interior[i]);

    std::optional<Field> prev;
    for (double n : opts.schedule) {
        const Nonlinearity fn = truncate(f, n);
        SolveOptions so = opts.solve;
        if (prev) so.initial = prev;
        const SolveResult s = solve_bvp(lab, fn, tau, nu, so);
        if (!s.converged) throw LabError(Stage::reduce, "truncated solve failed: " + s.status);
        double gap = 0.0, direct = 0.0;
        for (std::size_t i = 0; i < fu.size(); ++i) {
            const double v = fn(s.u.interior[i]);
            gap += std::abs(v - fu[i]) * lab.spectral.phi[i];
            direct += v * lab.spectral.phi[i];
        }
        gap *= vol;
        direct *= vol;
        // lambda <u_n, phi> + <f_n(u_n), phi> = <tau, phi> + lambda <K[nu], phi>
        const Field diff = k - s.u;
        const double route = tau_phi + lab.spectral.lambda * lab.inner(diff.interior, lab.phi());
        r.levels.push_back(n);
        r.gaps.push_back(gap);
        r.identity_errors.push_back(std::abs(direct - route));
        prev = s.u;
        if (gap == 0.0) break;
    }
    r.final_gap = r.gaps.back();
    double acc = 0.0;
    int cnt = 0;
    for (std::size_t k2 = 1; k2 < r.gaps.size(); ++k2)
        if (r.gaps[k2] > 0 && r.gaps[k2 - 1] > 0) {
            acc += std::log(r.gaps[k2] / r.gaps[k2 - 1]);
            ++cnt;
        }
    r.decay_rate = cnt ? acc / cnt : 0.0;
    const double scale = std::max(weighted_norm(tau, lab.phi(), vol) + total_variation(nu), 1e-300);
    r.converges = r.final_gap <= 1e-8 * scale;
    return r;
}

MaximalityReport verify_maximality(const Lab& lab, const Nonlinearity& f,
                                   const InteriorMeasure& tau, const BoundaryMeasure& nu,
                                   const ReducedResult& reduced, const SolveOptions& opts) {
    MaximalityReport r;
    r.scalings = {0.25, 0.5, 0.75, 1.0};
    r.gate_agreement = true;
    const double tol = 1e-9 * std::max(reduced.u_sharp.max_abs(), 1e-300);
    for (double s : r.scalings) {
        const InteriorMeasure ts = s * tau;
        const BoundaryMeasure ns = s * nu;
        SolveResult w;
        bool good = false;
        try {
            w = solve_bvp(lab, f, ts, ns, opts);
            good = w.converged;
        } catch (const LabError&) {
            good = false;
        }
        // Below (tau#, nu*) the full problem must be solvable and vice versa.
        const bool predicted = leq(ts, reduced.tau_sharp, tol) && leq(ns, reduced.nu_sharp, tol);
        if (predicted != good) r.gate_agreement = false;
        if (!good) continue;
        for (std::size_t i = 0; i < w.u.interior.size(); ++i)
            r.worst_excess = std::max(r.worst_excess, w.u.interior[i] - reduced.u_sharp.interior[i]);
    }
    r.maximal = r.worst_excess <= tol;
    return r;
}

ProbeReport refinement_probe(const ProbeSpec& spec) {
    ProbeReport rep;
    for (int n : spec.n_cells) {
        GridDomain d = build_domain(spec.shape, n);
        Potential v = build_hardy_potential(d, spec.gamma, spec.singular_set);
        auto lab = make_lab(std::move(d), std::move(v));
        BoundaryMeasure nu(lab->dom().n_boundary());
        nu.masses[nearest_boundary_node(lab->dom(), spec.atom_at)] = spec.mass;
        ReduceOptions ro = spec.reduce;
        ro.with_strip_estimate = true;
        ro.strip_regularization = spec.strip_regularization;
        const ReducedResult red = reduced_boundary(*lab, Nonlinearity::positive_power(spec.p), nu, ro);
        ProbeRow row;
        row.n_cells = n;
        row.h = lab->dom().h;
        row.strip_mass = red.strip_estimate->total_mass();
        row.layer_mass = red.nu_sharp.total_mass();
        row.levels = static_cast<int>(red.per_level.size());
        row.cauchy_ok = red.cauchy_ok;
        rep.rows.push_back(row);
    }
    rep.nonincreasing = true;
    double mx = -1e300, mn = 1e300;
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        mx = std::max(mx, rep.rows[k].strip_mass);
        mn = std::min(mn, rep.rows[k].strip_mass);
        if (k > 0 && rep.rows[k].strip_mass > rep.rows[k - 1].strip_mass) rep.nonincreasing = false;
    }
    rep.relative_spread = mx > 0 ? (mx - mn) / mx : 0.0;
    return rep;
}

}  // namespace hardylab
