#include "hardylab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <sstream>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/io.hpp"
#include "hardylab/kernels.hpp"

namespace hardylab {

using nlohmann::json;

namespace {

struct Context {
    const ExperimentConfig& cfg;
    const Lab& lab;
    Nonlinearity f;
    InteriorMeasure tau;
    BoundaryMeasure nu;

    const GridDomain& d() const { return lab.dom(); }

    // Seed derived from the check name so batteries do not depend on check order.
    Rng rng(const std::string& name) const {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        return Rng(cfg.seed ^ h);
    }
    double tau_norm(const InteriorMeasure& t) const { return weighted_norm(t, lab.phi(), lab.vol()); }
};

class Csv {
public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size()) {
        for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
        out_ << "\n";
    }
    void row(std::initializer_list<double> v) {
        std::size_t k = 0;
        char buf[32];
        for (double x : v) {
            std::snprintf(buf, sizeof buf, "%.17g", x);
            out_ << (k++ ? "," : "") << buf;
        }
        out_ << "\n";
    }
    std::string str() const { return out_.str(); }

private:
    std::size_t cols_;
    std::ostringstream out_;
};

struct Outcome {
    bool pass = false;
    json evidence = json::object();
    std::string csv;  // empty when the check has no table
};

double finite_or_sentinel(double v) { return std::isfinite(v) ? v : -1.0; }

// JSON has no NaN or infinity; store null so the in-memory document matches the file.
void null_nonfinite(json& j) {
    if (j.is_structured()) {
        for (auto& v : j) null_nonfinite(v);
    } else if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        j = nullptr;
    }
}

json measure_summary(const BoundaryMeasure& n) {
    return {{"total_mass", n.total_mass()}, {"total_variation", total_variation(n)}};
}

Outcome check_spectral(const Context& c) {
    const SpectralData& s = c.lab.spectral;
    Outcome o;
    double oracle = 0.0;
    const bool free = c.cfg.potential.gamma == 0.0;
    if (free) {
        switch (c.d().shape) {
            case Shape::interval: oracle = std::numbers::pi * std::numbers::pi; break;
            case Shape::square: oracle = 2.0 * std::numbers::pi * std::numbers::pi; break;
            case Shape::disk: oracle = 2.404825557695773 * 2.404825557695773; break;
        }
    }
    o.evidence = {{"lambda", s.lambda}, {"residual", s.residual}, {"iterations", s.iterations}};
    if (free) {
        const double rel = std::abs(s.lambda - oracle) / oracle;
        o.evidence["oracle"] = oracle;
        o.evidence["relative_error"] = rel;
        o.pass = rel <= c.cfg.tol.spectral && s.residual <= 1e-8;
    } else {
        o.evidence["oracle"] = nullptr;
        o.pass = s.lambda > 0 && s.residual <= 1e-8;
    }
    return o;
}

Outcome check_lambda_identity(const Context& c) {
    Rng rng = c.rng("lambda_identity");
    Csv csv({"sample", "positive", "lambda_G_phi", "tau_phi", "relative_error"});
    double worst = 0.0;
    for (int k = 0; k < c.cfg.samples; ++k) {
        const bool positive = k % 2 == 0;
        const InteriorMeasure t = random_interior(c.d(), rng, positive);
        const Field g = c.lab.green->apply(t);
        const double lhs = c.lab.spectral.lambda * c.lab.inner(g.interior, c.lab.phi());
        const double rhs = pair(t, c.lab.phi(), c.lab.vol());
        const double rel = std::abs(lhs - rhs) / std::max(c.tau_norm(t), 1e-300);
        worst = std::max(worst, rel);
        csv.row({double(k), double(positive), lhs, rhs, rel});
    }
    Outcome o;
    o.evidence = {{"samples", c.cfg.samples}, {"worst_relative_error", worst},
                  {"tolerance", c.cfg.tol.identity}};
    o.pass = worst <= c.cfg.tol.identity;
    o.csv = csv.str();
    return o;
}

Outcome check_weighted_estimates(const Context& c) {
    const WeightedEstimatesReport r =
        verify_weighted_estimates(c.lab, c.rng("weighted_estimates")(), std::min(c.cfg.samples, 10));
    Outcome o;
    o.evidence = {{"samples", r.samples},
                  {"betas", r.betas},
                  {"green_ratio_min", r.green_ratio_min},
                  {"green_ratio_max", r.green_ratio_max},
                  {"martin_ratio_min", r.martin_ratio_min},
                  {"martin_ratio_max", r.martin_ratio_max},
                  {"green_strip_slope_min", r.green_strip_slope_min},
                  {"green_strip_decays", r.green_strip_decays},
                  {"zero_data_integral", r.zero_data_integral}};
    o.pass = r.green_ratio_min > 0 && std::isfinite(r.green_ratio_max) && r.martin_ratio_min > 0 &&
             std::isfinite(r.martin_ratio_max) && r.green_strip_decays && r.zero_data_integral == 0.0;
    return o;
}

Outcome check_representation(const Context& c) {
    Rng rng = c.rng("representation");
    Csv csv({"sample", "converged", "iterations", "solver_residual", "recomputed_residual"});
    const SolveOptions so = c.cfg.solve_options();
    int converged = 0, failed = 0;
    double worst = 0.0;
    const int n = std::max(3, c.cfg.samples / 4);
    for (int k = 0; k <= n; ++k) {
        InteriorMeasure t = c.tau;
        BoundaryMeasure b = c.nu;
        if (k > 0) {
            t = random_interior(c.d(), rng, true);
            b = random_boundary(c.d(), rng, true);
        }
        const SolveResult s = solve_bvp(c.lab, c.f, t, b, so);
        double rec = std::numeric_limits<double>::quiet_NaN();
        if (s.converged) {
            ++converged;
            rec = representation_residual(c.lab, c.f, s.u, linear_solution(c.lab, t, b));
            worst = std::max(worst, rec);
        } else {
            ++failed;
        }
        csv.row({double(k), double(s.converged), double(s.iterations), s.residual, rec});
    }
    Outcome o;
    o.evidence = {{"solves", n + 1}, {"converged", converged}, {"not_converged", failed},
                  {"worst_residual", worst}, {"tolerance", c.cfg.tol.solve}};
    o.pass = converged > 0 && worst <= c.cfg.tol.solve;
    o.csv = csv.str();
    return o;
}

TraceOptions trace_options(const ExperimentConfig& cfg) {
    TraceOptions t;
    t.residual_tol = cfg.tol.trace;
    t.regularization = cfg.trace.regularization;
    t.strip_regularization = cfg.trace.strip_regularization;
    return t;
}

Outcome check_trace_recovery(const Context& c) {
    Rng rng = c.rng("trace_recovery");
    const auto betas = default_trace_betas(c.d());
    const TraceOptions topts = trace_options(c.cfg);
    Csv csv({"sample", "kind", "error", "norm", "relative_error", "verdict"});
    double worst_k = 0.0, worst_g = 0.0;
    std::map<std::string, int> verdicts;
    const int n = std::max(2, c.cfg.samples / 2);
    for (int k = 0; k < n; ++k) {
        BoundaryMeasure b = (k == 0 && !c.nu.is_zero()) ? c.nu : random_boundary(c.d(), rng, k % 2 == 0);
        const TraceReport tk = trace_normalized(c.lab, c.lab.martin->apply(b), betas, topts);
        const double ek = total_variation_diff(tk.estimated_measure, b), nk = total_variation(b);
        worst_k = std::max(worst_k, ek / nk);
        ++verdicts[std::string("martin_") + verdict_name(tk.verdict)];
        csv.row({double(k), 0.0, ek, nk, ek / nk, double(static_cast<int>(tk.verdict))});

        InteriorMeasure t = (k == 0 && !c.tau.is_zero()) ? c.tau : random_interior(c.d(), rng, k % 2 == 0);
        const TraceReport tg = trace_normalized(c.lab, c.lab.green->apply(t), betas, topts);
        const double eg = total_variation(tg.estimated_measure), ng = c.tau_norm(t);
        worst_g = std::max(worst_g, eg / ng);
        ++verdicts[std::string("green_") + verdict_name(tg.verdict)];
        csv.row({double(k), 1.0, eg, ng, eg / ng, double(static_cast<int>(tg.verdict))});
    }
    Outcome o;
    o.evidence = {{"samples", n}, {"worst_martin_error", worst_k}, {"worst_green_mass", worst_g},
                  {"verdicts", verdicts}, {"tolerance", c.cfg.tol.trace}};
    o.pass = worst_k <= c.cfg.tol.trace && worst_g <= c.cfg.tol.trace;
    o.csv = csv.str();
    return o;
}

TraceLVOptions lv_options(const ExperimentConfig& cfg) {
    TraceLVOptions l;
    l.dictionary = cfg.trace.dictionary;
    l.degree = cfg.trace.degree;
    l.residual_tol = cfg.tol.trace;
    return l;
}

Outcome check_trace_equivalence(const Context& c) {
    Rng rng = c.rng("trace_equivalence");
    const Exhaustion ex = build_exhaustion(c.d(), c.cfg.trace.exhaustion_levels);
    Csv csv({"sample", "discrepancy", "nu_norm", "relative", "verdicts_agree"});
    double worst = 0.0;
    bool agree = true;
    std::string dict;
    const int n = std::min(c.cfg.samples, 20);
    for (int k = 0; k < n; ++k) {
        const InteriorMeasure t = random_interior(c.d(), rng, true);
        const BoundaryMeasure b = random_boundary(c.d(), rng, true);
        const EquivalenceReport r = check_trace_equivalence(
            c.lab, linear_solution(c.lab, t, b), ex, trace_options(c.cfg), lv_options(c.cfg));
        const double rel = r.discrepancy / total_variation(b);
        worst = std::max(worst, rel);
        agree = agree && r.verdicts_agree;
        dict = r.lv.dictionary_used == Dictionary::polynomial ? "polynomial" : "nodal";
        csv.row({double(k), r.discrepancy, total_variation(b), rel, double(r.verdicts_agree)});
    }
    Outcome o;
    o.evidence = {{"samples", n}, {"levels", ex.levels.size()}, {"dictionary", dict},
                  {"worst_relative_discrepancy", worst}, {"verdicts_agree", agree},
                  {"tolerance", c.cfg.tol.equivalence}};
    o.pass = worst <= c.cfg.tol.equivalence;
    o.csv = csv.str();
    return o;
}

Outcome check_kato(const Context& c) {
    Rng rng = c.rng("kato");
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = -std::numeric_limits<double>::infinity();
    int sign_changes = 0;
    const int n = 100;
    for (int k = 0; k < n; ++k) {
        Field w(c.d().n_interior(), c.d().n_boundary());
        if (k % 2 == 0) {
            for (double& v : w.interior) v = u(rng);
            for (double& v : w.boundary) v = u(rng);
        } else {
            // Smooth signed field: a linear solution with signed data.
            w = linear_solution(c.lab, random_interior(c.d(), rng, false),
                                random_boundary(c.d(), rng, false));
        }
        const KatoReport r = kato_check(*c.lab.op, w);
        worst = std::max(worst, r.worst_violation);
        sign_changes += r.sign_change_nodes;
    }
    Outcome o;
    o.evidence = {{"fields", n}, {"worst_violation", worst}, {"sign_change_nodes", sign_changes},
                  {"tolerance", c.cfg.tol.kato}};
    o.pass = worst <= c.cfg.tol.kato;
    return o;
}

std::string level_csv(const std::vector<LevelRecord>& levels) {
    Csv csv({"level", "iterations", "residual", "f_n_integral", "change", "gradient_norm",
             "clamp_active"});
    for (const LevelRecord& r : levels)
        csv.row({r.level, double(r.iterations), r.residual, r.f_n_integral,
                 std::isfinite(r.change) ? r.change : -1.0, r.gradient_norm, double(r.clamp_active)});
    return csv.str();
}

json reduced_json(const Context& c, const ReducedResult& r) {
    return {{"levels", r.per_level.size()},
            {"final_level", r.per_level.back().level},
            {"monotone", r.monotone_ok},
            {"cauchy", r.cauchy_ok},
            {"worst_increase", r.worst_increase},
            {"bounds", r.bounds_ok},
            {"representation_residual", r.representation_residual},
            {"stencil_residual", r.stencil_residual},
            {"estimate_constant", r.estimate_constant},
            {"tau_sharp_norm", c.tau_norm(r.tau_sharp)},
            {"nu_sharp", measure_summary(r.nu_sharp)}};
}

Outcome check_reduction(const Context& c) {
    const ReducedResult r = reduced_couple(c.lab, c.f, c.tau, c.nu, c.cfg.reduce_options());
    Outcome o;
    o.evidence = reduced_json(c, r);
    o.evidence["tau_norm"] = c.tau_norm(c.tau);
    o.evidence["nu"] = measure_summary(c.nu);
    o.pass = r.monotone_ok && r.bounds_ok && r.representation_residual <= c.cfg.tol.limit;
    o.csv = level_csv(r.per_level);
    return o;
}

Outcome check_independence(const Context& c) {
    const IndependenceReport r =
        verify_independence(c.lab, c.f, c.tau, c.nu, c.cfg.reduce_options(), c.cfg.tol.relative);
    Outcome o;
    o.evidence = {{"nu_discrepancy", r.nu_discrepancy}, {"tau_discrepancy", r.tau_discrepancy},
                  {"nu_norm", r.nu_norm}, {"tau_norm", r.tau_norm},
                  {"tolerance", c.cfg.tol.relative}};
    o.pass = r.pass;
    return o;
}

Outcome check_lattice(const Context& c) {
    const GridDomain& d = c.d();
    std::vector<int> active;
    for (std::size_t b = 0; b < d.n_boundary(); ++b)
        if (d.boundary_active[b]) active.push_back(static_cast<int>(b));
    std::vector<std::vector<int>> subsets(3);
    for (std::size_t k = 0; k < active.size(); ++k) {
        if (k < active.size() / 2) subsets[0].push_back(active[k]);
        if (k % 2 == 0) subsets[1].push_back(active[k]);
        if (k % 3 == 1) subsets[2].push_back(active[k]);
    }
    const BoundaryMeasure nu = jordan_split(c.nu).first;
    const int candidates = std::max(24, c.cfg.samples);
    const LatticeReport r = verify_lattice(c.lab, c.f, nu, subsets, c.rng("lattice")(), candidates,
                                           c.cfg.reduce_options(), c.cfg.tol.relative);
    Outcome o;
    o.evidence = {{"subsets", subsets.size()},
                  {"restriction_gap", r.restriction_gap},
                  {"restriction_violation", r.restriction_violation},
                  {"additivity_gap", r.additivity_gap},
                  {"candidates", r.candidates},
                  {"certified", r.certified},
                  {"reduced_distance", r.reduced_distance},
                  {"best_candidate", finite_or_sentinel(r.best_candidate)},
                  {"optimal", r.optimal},
                  {"nu_norm", r.nu_norm},
                  {"tolerance", c.cfg.tol.relative}};
    o.pass = r.pass && r.certified >= 20;
    return o;
}

Outcome check_diffuse(const Context& c) {
    const ReducedResult r = reduced_couple(c.lab, c.f, c.tau, c.nu, c.cfg.reduce_options());
    double diff = 0.0;
    for (std::size_t i = 0; i < c.tau.density.size(); ++i)
        diff = std::max(diff, std::abs(r.tau_sharp.density[i] - c.tau.density[i]));
    json atoms = json::array();
    for (const Atom& a : c.tau.atoms)
        atoms.push_back({{"node", a.node}, {"mass", a.mass}, {"reduced", r.tau_sharp.atom_at(a.node)}});
    Outcome o;
    o.evidence = {{"density_max_difference", diff}, {"atoms", atoms},
                  {"density_nodes", c.tau.density.size()}, {"cauchy", r.cauchy_ok}};
    o.pass = diff == 0.0;
    return o;
}

struct SignedRun {
    SignedReport report;
    bool parts_good = false;
    double tau_deviation = 0.0, nu_deviation = 0.0;
};

SignedRun signed_run(const Context& c) {
    auto [tp, tm] = jordan_split(c.tau);
    auto [np, nm] = jordan_split(c.nu);
    SignedBounds bounds{tm, tp, nm, np};
    SignedRun s{reduced_signed(c.lab, c.f, c.tau, c.nu, bounds, c.cfg.reduce_options())};
    const double tol = c.cfg.tol.relative;
    auto same_t = [&](const InteriorMeasure& a, const InteriorMeasure& b) {
        return weighted_distance(a, b, c.lab.phi(), c.lab.vol()) <= tol * std::max(c.tau_norm(b), 1e-300);
    };
    auto same_n = [&](const BoundaryMeasure& a, const BoundaryMeasure& b) {
        return total_variation_diff(a, b) <= tol * std::max(total_variation(b), 1e-300);
    };
    s.parts_good = same_t(s.report.upper.tau_sharp, tp) && same_n(s.report.upper.nu_sharp, np) &&
                          same_t(s.report.lower.tau_sharp, tm) && same_n(s.report.lower.nu_sharp, nm);
    s.tau_deviation = weighted_distance(s.report.tau_tilde, c.tau, c.lab.phi(), c.lab.vol());
    s.nu_deviation = total_variation_diff(s.report.nu_tilde, c.nu);
    return s;
}

Outcome check_signed(const Context& c) {
    const SignedRun s = signed_run(c);
    const SignedReport& r = s.report;
    const double tol = c.cfg.tol.relative;
    const bool recovery_ok =
        !s.parts_good ||
        (s.tau_deviation <= tol * std::max(c.tau_norm(c.tau), 1e-300) &&
         s.nu_deviation <= tol * std::max(total_variation(c.nu), 1e-300));
    Outcome o;
    o.evidence = {{"levels", r.levels},
                  {"squeeze", r.squeeze_ok},
                  {"worst_squeeze_violation", r.worst_squeeze_violation},
                  {"cauchy", r.cauchy_ok},
                  {"oscillation", r.oscillation},
                  {"status", r.status},
                  {"sandwich", r.sandwich_ok},
                  {"sandwich_violation", r.sandwich_violation},
                  {"representation_residual", r.representation_residual},
                  {"parts_good", s.parts_good},
                  {"tau_deviation", s.tau_deviation},
                  {"nu_deviation", s.nu_deviation},
                  {"nu_tilde", measure_summary(r.nu_tilde)}};
    o.pass = r.squeeze_ok && r.sandwich_ok && recovery_ok;
    return o;
}

Outcome check_sandwich_goodness(const Context& c) {
    const SignedRun s = signed_run(c);
    const GoodnessReport g = verify_sandwich_goodness(
        c.lab, c.f, {s.report.tau_tilde, s.report.nu_tilde}, s.report.upper, s.report.lower,
        c.cfg.solve_options());
    Outcome o;
    o.evidence = {{"in_sandwich", g.in_sandwich}, {"converged", g.converged},
                  {"residual", g.residual}, {"positive_part_good", g.positive_part_good},
                  {"negative_part_good", g.negative_part_good}};
    o.pass = g.pass;
    return o;
}

Outcome check_exhaustion(const Context& c) {
    const InteriorMeasure tp = jordan_split(c.tau).first;
    const BoundaryMeasure np = jordan_split(c.nu).first;
    const Exhaustion ex = build_exhaustion(c.d(), c.cfg.trace.exhaustion_levels);
    const Field w = linear_solution(c.lab, tp, np);
    const ExhaustionSolveResult e = solve_by_exhaustion(c.lab, c.f, tp, w, ex, c.cfg.solve_options());
    const SolveResult ref = solve_bvp(c.lab, c.f, tp, np, c.cfg.solve_options());
    Csv csv({"level", "beta", "iterations", "residual", "max_abs"});
    for (std::size_t k = 0; k < e.levels.size(); ++k)
        csv.row({double(k), ex.levels[k].beta, double(e.levels[k].iterations), e.levels[k].residual,
                 e.levels[k].u.max_abs()});
    const double rel = max_abs_diff(e.result.u, ref.u) / std::max(ref.u.max_abs(), 1e-300);
    Outcome o;
    o.evidence = {{"levels", ex.levels.size()}, {"decreasing", e.decreasing},
                  {"worst_increase", e.worst_increase}, {"relative_difference", rel},
                  {"bounded_f", c.f.bounded()}, {"reference_converged", ref.converged},
                  {"tolerance", c.cfg.tol.exhaustion}};
    o.pass = ref.converged && e.result.converged && e.decreasing && rel <= c.cfg.tol.exhaustion;
    o.csv = csv.str();
    return o;
}

Outcome check_characterization(const Context& c) {
    Outcome o;
    if (!c.f.vanishes_on_nonpositive()) {
        o.evidence = {{"precondition", "f must vanish on (-inf, 0]"}, {"nonlinearity", c.f.name()}};
        return o;
    }
    const CharacterizationReport r =
        verify_positive_part_characterization(c.lab, c.f, c.tau, c.nu, c.cfg.reduce_options());
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"couple", row.label}, {"predicted_good", row.predicted_good},
                        {"observed_good", row.observed_good}});
    o.evidence = {{"rows", rows}, {"negative_couple_good", r.negative_couple_good},
                  {"agreement", r.agreement}};
    o.pass = r.agreement && r.negative_couple_good;
    return o;
}

Outcome check_l1(const Context& c) {
    const InteriorMeasure tp = jordan_split(c.tau).first;
    const BoundaryMeasure np = jordan_split(c.nu).first;
    const L1Report r = verify_L1_convergence(c.lab, c.f, tp, np, c.cfg.reduce_options());
    Outcome o;
    Csv csv({"level", "gap", "identity_error"});
    double worst_identity = 0.0;
    for (std::size_t k = 0; k < r.levels.size(); ++k) {
        csv.row({r.levels[k], r.gaps[k], r.identity_errors[k]});
        worst_identity = std::max(worst_identity, r.identity_errors[k]);
    }
    const double scale = std::max(c.tau_norm(tp) + total_variation(np), 1e-300);
    o.evidence = {{"good", r.good}, {"levels", r.levels.size()}, {"final_gap", r.final_gap},
                  {"decay_rate", r.decay_rate}, {"converges", r.converges},
                  {"worst_identity_error", worst_identity}, {"data_norm", scale}};
    o.pass = r.good && r.converges && worst_identity <= c.cfg.tol.identity * scale;
    o.csv = csv.str();
    return o;
}

Outcome check_maximality(const Context& c) {
    const InteriorMeasure tp = jordan_split(c.tau).first;
    const BoundaryMeasure np = jordan_split(c.nu).first;
    const ReducedResult red = reduced_couple(c.lab, c.f, tp, np, c.cfg.reduce_options());
    const MaximalityReport r = verify_maximality(c.lab, c.f, tp, np, red, c.cfg.solve_options());
    Outcome o;
    o.evidence = {{"scalings", r.scalings}, {"worst_excess", r.worst_excess},
                  {"maximal", r.maximal}, {"gate_agreement", r.gate_agreement}};
    o.pass = r.maximal && r.gate_agreement;
    return o;
}

Outcome check_probe(const Context& c) {
    const ProbeConfig& q = c.cfg.probe;
    const int dim = q.shape == Shape::interval ? 1 : 2;
    // Boundary-atom critical exponent (N+1)/(N-1) of the unperturbed problem.
    const double critical = dim == 1 ? std::numeric_limits<double>::infinity() : 3.0;
    Csv csv({"p", "n_cells", "h", "strip_mass", "layer_mass", "levels", "cauchy"});
    json rows = json::array();
    bool pass = true;
    for (double p : q.p) {
        ProbeSpec s;
        s.shape = q.shape;
        s.n_cells = q.n_cells;
        s.gamma = q.gamma;
        s.singular_set = q.singular_set;
        s.p = p;
        s.mass = q.mass;
        s.atom_at = q.atom_at;
        s.strip_regularization = q.strip_regularization;
        s.reduce = c.cfg.reduce_options();
        s.reduce.schedule = default_schedule(q.max_exponent);
        const ProbeReport r = refinement_probe(s);
        const bool super = p > critical;
        const bool ok = super ? r.nonincreasing : r.relative_spread <= q.stability;
        pass = pass && ok;
        json masses = json::array();
        for (const ProbeRow& row : r.rows) {
            csv.row({p, double(row.n_cells), row.h, row.strip_mass, row.layer_mass,
                     double(row.levels), double(row.cauchy_ok)});
            masses.push_back({{"n_cells", row.n_cells}, {"strip_mass", row.strip_mass},
                              {"layer_mass", row.layer_mass}, {"cauchy", row.cauchy_ok}});
        }
        rows.push_back({{"p", p}, {"regime", super ? "supercritical" : "subcritical"},
                        {"rows", masses}, {"nonincreasing", r.nonincreasing},
                        {"relative_spread", r.relative_spread}, {"pass", ok}});
    }
    Outcome o;
    o.evidence = {{"shape", shape_name(q.shape)}, {"critical_exponent", dim == 1 ? -1.0 : critical},
                  {"exponents", rows}};
    o.pass = pass;
    o.csv = csv.str();
    return o;
}

Outcome check_hardy(const Context& c) {
    const HardyEstimate e = estimate_hardy_constant(c.d(), c.cfg.potential.singular_set);
    Outcome o;
    o.evidence = {{"value", e.value}, {"lower", e.lower}, {"upper", e.upper},
                  {"at_bracket_edge", e.at_bracket_edge}, {"bisections", e.bisections},
                  {"gamma", c.cfg.potential.gamma}};
    o.pass = !e.at_bracket_edge && c.cfg.potential.gamma <= e.upper;
    return o;
}

struct Entry {
    CheckInfo info;
    std::function<Outcome(const Context&)> run;
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> e = {
        {{"spectral_sanity", "ground-state eigenvalue against the closed form when V = 0"}, check_spectral},
        {{"lambda_identity", "lambda <G[tau], phi> = <tau, phi> over random tau"}, check_lambda_identity},
        {{"weighted_estimates", "weighted L1 bounds for G and strip bounds for K"}, check_weighted_estimates},
        {{"representation", "u + G[f(u)] = G[tau] + K[nu] for converged solves"}, check_representation},
        {{"trace_recovery", "normalized trace of K[nu] is nu, of G[tau] is 0"}, check_trace_recovery},
        {{"trace_equivalence", "normalized and L_V traces agree on random positive data"}, check_trace_equivalence},
        {{"kato", "Kato inequality on random fields"}, check_kato},
        {{"reduction", "monotone truncation scheme and bounds of the reduced couple"}, check_reduction},
        {{"independence", "nu# ignores tau and tau# ignores nu"}, check_independence},
        {{"lattice", "restriction, additivity and min-norm optimality of nu*"}, check_lattice},
        {{"diffuse_preservation", "density part of tau# equals that of tau"}, check_diffuse},
        {{"signed_sandwich", "squeeze and sandwich for signed data"}, check_signed},
        {{"sandwich_goodness", "recovered couple and its Jordan parts are good"}, check_sandwich_goodness},
        {{"exhaustion", "exhaustion solve agrees with the direct solve"}, check_exhaustion},
        {{"characterization", "goodness iff positive part below the reduced couple"}, check_characterization},
        {{"l1_convergence", "f_n(u_n) -> f(u) in L1(phi) and the lambda identity route"}, check_l1},
        {{"maximality", "reduced solution dominates solutions with scaled-down data"}, check_maximality},
        {{"refinement_probe", "mass of the reduced boundary trace under grid refinement"}, check_probe},
        {{"hardy_constant", "bisection estimate of the discrete Hardy constant"}, check_hardy},
    };
    return e;
}

struct Assembled {
    GridDomain domain;
    Potential potential;
    std::shared_ptr<Lab> lab;
    Admissibility adm;
};

Assembled assemble(const ExperimentConfig& c) {
    Assembled a;
    a.domain = build_domain(c.domain.shape, c.domain.n_cells);
    validate_against(c, a.domain);
    a.potential = build_hardy_potential(a.domain, c.potential.gamma, c.potential.singular_set);
    const A2Report a2 = check_A2(a.domain, a.potential);
    json& b = a.adm.block;
    b["A1"] = {{"a_bar", a.potential.a_bar}, {"gamma", c.potential.gamma},
               {"singular_set", a.potential.singular_set.describe()}};
    b["A2"] = {{"satisfied", a2.satisfied}, {"margin", a2.margin}, {"iterations", a2.iterations}};
    if (!a2.satisfied) {
        b["admissible"] = false;
        return a;
    }
    a.lab = make_lab(a.domain, a.potential);
    const SpectralData& s = a.lab->spectral;
    const B1B2Report r = check_B1_B2(a.lab->dom(), s);
    b["spectral"] = {{"lambda", s.lambda}, {"alpha_fit", s.alpha_fit},
                     {"alpha_star_fit", s.alpha_star_fit}, {"band", {s.band_lo, s.band_hi}},
                     {"iterations", s.iterations}, {"residual", s.residual}};
    b["B1B2"] = {{"betas", r.betas}, {"strip_integrals", r.strip_integrals},
                 {"decay_rate", r.decay_rate}, {"b1_holds", r.b1_holds},
                 {"b2_window", r.b2_window}, {"near_critical", r.near_critical},
                 {"verdict", r.verdict}};
    a.adm.admissible = s.lambda > 0;
    b["admissible"] = a.adm.admissible;
    return a;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace

const std::vector<CheckInfo>& check_registry() {
    static const std::vector<CheckInfo> r = [] {
        std::vector<CheckInfo> v;
        for (const Entry& e : entries()) v.push_back(e.info);
        return v;
    }();
    return r;
}

Admissibility assess_admissibility(const ExperimentConfig& c) { return assemble(c).adm; }

std::string resolve_output(const ExperimentConfig& c) {
    namespace fs = std::filesystem;
    const char* root = std::getenv("HARDYLAB_OUTPUT_ROOT");
    if (!root || !*root) return c.output;
    fs::path out(c.output);
    if (out.is_absolute()) out = out.filename();
    return (fs::path(root) / out).string();
}

RunReport run_experiment(const ExperimentConfig& c, bool write_outputs) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    for (const std::string& name : c.checks)
        if (std::none_of(entries().begin(), entries().end(),
                         [&](const Entry& e) { return e.info.name == name; }))
            throw LabError(Stage::config, "checks: unknown check '" + name + "'");

    Assembled a = assemble(c);
    RunReport rep;
    rep.admissible = a.adm.admissible;
    rep.directory = resolve_output(c);
    json results;
    results["config"] = c.source;
    results["admissibility"] = a.adm.block;

    std::vector<Outcome> outcomes(c.checks.size());
    std::vector<double> seconds(c.checks.size(), 0.0);
    if (rep.admissible) {
        const Context ctx{c, *a.lab, c.nonlinearity.build(), build_measure_tau(a.lab->dom(), c.data.tau),
                          build_measure_nu(a.lab->dom(), c.data.nu)};
        // Checks are independent; run them concurrently and collect in config order.
        std::vector<std::future<std::pair<Outcome, double>>> jobs;
        for (const std::string& name : c.checks) {
            const Entry& e = *std::find_if(entries().begin(), entries().end(),
                                           [&](const Entry& x) { return x.info.name == name; });
            jobs.push_back(std::async(std::launch::async, [&ctx, &e] {
                const auto s = clock::now();
                Outcome o = e.run(ctx);
                return std::pair{std::move(o), std::chrono::duration<double>(clock::now() - s).count()};
            }));
        }
        std::exception_ptr first;
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            try {
                auto [o, s] = jobs[k].get();
                outcomes[k] = std::move(o);
                seconds[k] = s;
            } catch (...) {
                if (!first) first = std::current_exception();
            }
        }
        if (first) std::rethrow_exception(first);
    } else {
        for (Outcome& o : outcomes)
            o.evidence = {{"skipped", "potential is not admissible"}};
    }

    json checks = json::array();
    int passed = 0;
    for (std::size_t k = 0; k < c.checks.size(); ++k) {
        json e = {{"name", c.checks[k]}, {"pass", outcomes[k].pass}, {"evidence", outcomes[k].evidence}};
        if (!outcomes[k].csv.empty()) {
            const std::string file = c.checks[k] + ".csv";
            e["artifact"] = file;
            rep.artifacts.push_back(file);
        }
        passed += outcomes[k].pass;
        checks.push_back(std::move(e));
    }
    rep.all_pass = rep.admissible && passed == static_cast<int>(c.checks.size());
    results["checks"] = checks;
    results["summary"] = {{"checks", c.checks.size()}, {"passed", passed},
                          {"failed", static_cast<int>(c.checks.size()) - passed},
                          {"admissible", rep.admissible}, {"all_pass", rep.all_pass}};
    rep.artifacts.insert(rep.artifacts.begin(), {"results.json", "summary.txt"});
    results["artifacts"] = rep.artifacts;
    null_nonfinite(results);
    rep.results = results;

    std::ostringstream s;
    s << "experiment " << c.name << "\n";
    s << "domain " << shape_name(c.domain.shape) << " n_cells=" << c.domain.n_cells
      << "  potential gamma=" << c.potential.gamma << " E=" << a.potential.singular_set.describe()
      << "\n";
    s << "A2 " << (a.adm.block["A2"]["satisfied"].get<bool>() ? "satisfied" : "violated")
      << " margin=" << fixed(a.adm.block["A2"]["margin"].get<double>(), 6) << "\n";
    if (rep.admissible)
        s << "lambda_V=" << fixed(a.lab->spectral.lambda, 10) << "  B1/B2: "
          << a.adm.block["B1B2"]["verdict"].get<std::string>() << "\n";
    for (std::size_t k = 0; k < c.checks.size(); ++k)
        s << (outcomes[k].pass ? "PASS " : "FAIL ") << c.checks[k] << "  (" << fixed(seconds[k], 3)
          << " s)\n";
    s << passed << "/" << c.checks.size() << " checks passed; total "
      << fixed(std::chrono::duration<double>(clock::now() - t0).count(), 3) << " s\n";
    rep.summary = s.str();

    if (write_outputs) {
        namespace fs = std::filesystem;
        const fs::path dir(rep.directory);
        try {
            for (std::size_t k = 0; k < c.checks.size(); ++k)
                if (!outcomes[k].csv.empty())
                    write_atomic((dir / (c.checks[k] + ".csv")).string(), outcomes[k].csv);
            write_atomic((dir / "results.json").string(), results.dump(2) + "\n");
            write_atomic((dir / "summary.txt").string(), rep.summary);
        } catch (const LabError&) {
            throw;
        } catch (const std::exception& e) {
            throw LabError(Stage::io, e.what());
        }
    }
    return rep;
}

namespace {

void flatten(const json& j, const std::string& path, std::map<std::string, json>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
    } else if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], path + "[" + std::to_string(k) + "]", out);
    } else {
        out[path] = j;
    }
}

}  // namespace

json compare_runs(const json& a, const json& b) {
    auto names = [](const json& r) {
        std::vector<std::string> n;
        if (!r.contains("checks") || !r["checks"].is_array())
            throw LabError(Stage::io, "document has no checks list");
        for (const auto& c : r["checks"]) n.push_back(c.at("name").get<std::string>());
        return n;
    };
    const auto na = names(a), nb = names(b);
    if (na != nb) throw LabError(Stage::config, "mismatched check lists");
    json diff = json::array();
    for (std::size_t k = 0; k < na.size(); ++k) {
        const json& ca = a["checks"][k];
        const json& cb = b["checks"][k];
        json entries = json::array();
        if (ca["pass"] != cb["pass"])
            entries.push_back({{"field", "pass"}, {"a", ca["pass"]}, {"b", cb["pass"]}});
        std::map<std::string, json> fa, fb;
        flatten(ca["evidence"], "", fa);
        flatten(cb["evidence"], "", fb);
        for (const auto& [key, va] : fa) {
            const auto it = fb.find(key);
            if (it == fb.end()) {
                entries.push_back({{"field", key}, {"a", va}, {"b", nullptr}});
            } else if (va != it->second) {
                json e = {{"field", key}, {"a", va}, {"b", it->second}};
                if (va.is_number() && it->second.is_number())
                    e["delta"] = it->second.get<double>() - va.get<double>();
                entries.push_back(std::move(e));
            }
        }
        for (const auto& [key, vb] : fb)
            if (!fa.count(key)) entries.push_back({{"field", key}, {"a", nullptr}, {"b", vb}});
        if (!entries.empty()) diff.push_back({{"check", na[k]}, {"differences", entries}});
    }
    return diff;
}

}  // namespace hardylab
