// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardylab/battery.hpp"
#include "hardylab/config.hpp"
#include "hardylab/experiment.hpp"
#include "hardylab/reduced.hpp"
#include "hardylab/semilinear.hpp"
#include "hardylab/trace.hpp"

using namespace hardylab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

struct Config {
    Shape shape;
    int n;
    double gamma;
};

std::shared_ptr<Lab> lab_for(const Config& c) {
    GridDomain d = build_domain(c.shape, c.n);
    Potential v = build_hardy_potential(d, c.gamma, SingularSet::whole());
    return make_lab(std::move(d), std::move(v));
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::vector<double> gammas{0.0, 0.2, -0.2};

std::vector<Config> grid_of(std::vector<std::pair<Shape, int>> shapes) {
    std::vector<Config> out;
    for (auto [s, n] : shapes)
        for (double g : gammas) out.push_back({s, n, g});
    return out;
}

double tau_norm(const Lab& lab, const InteriorMeasure& t) { return weighted_norm(t, lab.phi(), lab.vol()); }

// Interior density 1 + x, an interior atom and unit atoms at both endpoints.
MeasureCouple interval_battery(const Lab& lab, double atom_mass, double end_mass) {
    MeasureCouple c{InteriorMeasure(lab.dom().n_interior()), BoundaryMeasure(lab.dom().n_boundary())};
    for (std::size_t i = 0; i < c.tau.size(); ++i) c.tau.density[i] = 1.0 + lab.dom().interior[i].x;
    c.tau.add_atom(nearest_interior_node(lab.dom(), {0.3, 0.0}), atom_mass);
    c.nu.masses = {end_mass, 0.5 * end_mass};
    return c;
}

Verdict ac1() {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double l1 = lab_for({Shape::interval, 128, 0.0})->spectral.lambda;
    const double l2 = lab_for({Shape::square, 64, 0.0})->spectral.lambda;
    const double e1 = std::abs(l1 - pi2) / pi2, e2 = std::abs(l2 - 2 * pi2) / (2 * pi2);
    return {e1 <= 0.01 && e2 <= 0.02,
            "interval rel err " + num(e1) + ", square rel err " + num(e2)};
}

Verdict ac2() {
    double worst = 0.0;
    int samples = 0;
    for (const Config& c : grid_of({{Shape::interval, 64}, {Shape::disk, 48}, {Shape::square, 32}})) {
        auto lab = lab_for(c);
        Rng rng(1000 + samples);
        for (int k = 0; k < 50; ++k, ++samples) {
            const InteriorMeasure t = random_interior(lab->dom(), rng, k % 2 == 0);
            const double lhs = lab->spectral.lambda * lab->inner(lab->green->apply(t).interior, lab->phi());
            const double rhs = pair(t, lab->phi(), lab->vol());
            worst = std::max(worst, std::abs(lhs - rhs) / tau_norm(*lab, t));
        }
    }
    return {worst <= 1e-8, std::to_string(samples) + " samples, worst " + num(worst)};
}

Verdict ac3() {
    double worst = 0.0;
    int converged = 0, total = 0;
    const std::vector<Nonlinearity> fs{Nonlinearity::power(3), Nonlinearity::positive_power(2),
                                       Nonlinearity::exponential(), Nonlinearity::linear(2.0),
                                       truncate(Nonlinearity::power(5), 20.0)};
    for (const Config& c : grid_of({{Shape::interval, 64}, {Shape::disk, 48}, {Shape::square, 32}})) {
        auto lab = lab_for(c);
        Rng rng(2000 + total);
        for (const Nonlinearity& f : fs)
            for (int k = 0; k < 3; ++k, ++total) {
                const InteriorMeasure t = random_interior(lab->dom(), rng, k != 2);
                const BoundaryMeasure b = random_boundary(lab->dom(), rng, k != 2);
                const SolveResult s = solve_bvp(*lab, f, t, b);
                if (!s.converged) continue;
                ++converged;
                worst = std::max(worst, representation_residual(*lab, f, s.u, linear_solution(*lab, t, b)));
            }
    }
    return {converged > 0 && worst <= 1e-9,
            std::to_string(converged) + "/" + std::to_string(total) + " converged, worst " + num(worst)};
}

Verdict ac4() {
    double worst_k = 0.0, worst_g = 0.0;
    for (const Config& c : grid_of({{Shape::interval, 64}, {Shape::disk, 48}})) {
        auto lab = lab_for(c);
        const auto betas = default_trace_betas(lab->dom());
        Rng rng(3000);
        for (int k = 0; k < 10; ++k) {
            const BoundaryMeasure b = random_boundary(lab->dom(), rng, k % 2 == 0);
            const TraceReport tk = trace_normalized(*lab, lab->martin->apply(b), betas);
            worst_k = std::max(worst_k, total_variation_diff(tk.estimated_measure, b) / total_variation(b));
            const InteriorMeasure t = random_interior(lab->dom(), rng, k % 2 == 0);
            const TraceReport tg = trace_normalized(*lab, lab->green->apply(t), betas);
            worst_g = std::max(worst_g, total_variation(tg.estimated_measure) / tau_norm(*lab, t));
        }
    }
    return {worst_k <= 1e-4 && worst_g <= 1e-4,
            "K error " + num(worst_k) + ", G mass " + num(worst_g)};
}

Verdict ac5() {
    double worst = 0.0;
    int samples = 0;
    for (const Config& c : std::vector<Config>{{Shape::interval, 64, 0.2}, {Shape::disk, 48, 0.2}}) {
        auto lab = lab_for(c);
        const Exhaustion ex = build_exhaustion(lab->dom(), 6);
        Rng rng(4000);
        for (int k = 0; k < 20; ++k, ++samples) {
            const InteriorMeasure t = random_interior(lab->dom(), rng, true);
            const BoundaryMeasure b = random_boundary(lab->dom(), rng, true);
            // Alternate linear fields and semilinear solutions with the same data.
            Field u = linear_solution(*lab, t, b);
            if (k % 2 == 1) u = solve_bvp(*lab, Nonlinearity::positive_power(2), t, b).u;
            const EquivalenceReport r = check_trace_equivalence(*lab, u, ex);
            worst = std::max(worst, r.discrepancy / total_variation(b));
        }
    }
    return {worst <= 1e-3, std::to_string(samples) + " couples, worst " + num(worst)};
}

Verdict ac6() {
    int runs = 0, bad = 0;
    double worst = 0.0;
    const std::vector<Nonlinearity> fs{Nonlinearity::positive_power(3), Nonlinearity::power(2),
                                       Nonlinearity::exponential()};
    for (const Config& c : grid_of({{Shape::interval, 64}, {Shape::disk, 32}, {Shape::square, 24}})) {
        auto lab = lab_for(c);
        Rng rng(6000);
        for (const Nonlinearity& f : fs)
            for (int k = 0; k < 2; ++k, ++runs) {
                const InteriorMeasure t = random_interior(lab->dom(), rng, true);
                const BoundaryMeasure b = 10.0 * random_boundary(lab->dom(), rng, true);
                const ReducedResult r = reduced_couple(*lab, f, t, b);
                worst = std::max(worst, r.worst_increase);
                if (!(r.monotone_ok && r.bounds_ok)) ++bad;
            }
    }
    return {bad == 0, std::to_string(runs) + " sequences, " + std::to_string(bad) +
                          " violations, worst increase " + num(worst)};
}

Verdict ac7() {
    auto lab = lab_for({Shape::interval, 64, 0.2});
    double worst_n = 0.0, worst_t = 0.0;
    bool pass = true;
    for (auto [a, e] : {std::pair{0.5, 1.0}, {5.0, 20.0}, {50.0, 200.0}}) {
        const MeasureCouple c = interval_battery(*lab, a, e);
        const IndependenceReport r = verify_independence(*lab, Nonlinearity::positive_power(3), c.tau, c.nu);
        worst_n = std::max(worst_n, r.nu_discrepancy / r.nu_norm);
        worst_t = std::max(worst_t, r.tau_discrepancy / r.tau_norm);
        pass = pass && r.pass;
    }
    return {pass && worst_n <= 1e-6 && worst_t <= 1e-6,
            "nu rel " + num(worst_n) + ", tau rel " + num(worst_t)};
}

Verdict ac8() {
    bool pass = true;
    int certified = 0;
    double gap = 0.0;
    for (const Config& c : std::vector<Config>{{Shape::interval, 64, 0.2}, {Shape::disk, 32, 0.2}}) {
        auto lab = lab_for(c);
        Rng rng(8000);
        const BoundaryMeasure nu = 5.0 * random_boundary(lab->dom(), rng, true, 4);
        std::vector<int> active;
        for (std::size_t b = 0; b < lab->dom().n_boundary(); ++b)
            if (lab->dom().boundary_active[b]) active.push_back(static_cast<int>(b));
        std::vector<std::vector<int>> subsets(3);
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (k < active.size() / 2) subsets[0].push_back(active[k]);
            if (k % 2 == 0) subsets[1].push_back(active[k]);
            if (k % 3 == 1) subsets[2].push_back(active[k]);
        }
        const LatticeReport r = verify_lattice(*lab, Nonlinearity::power(3), nu, subsets, 81, 24);
        pass = pass && r.pass && r.certified >= 20;
        certified = std::max(certified, r.certified);
        gap = std::max({gap, r.restriction_gap / r.nu_norm, r.additivity_gap / r.nu_norm});
    }
    return {pass, "certified candidates up to " + std::to_string(certified) + ", worst gap " + num(gap)};
}

Verdict ac9() {
    int runs = 0, bad = 0;
    for (const Config& c : grid_of({{Shape::interval, 64}, {Shape::disk, 32}})) {
        auto lab = lab_for(c);
        Rng rng(9000);
        for (int k = 0; k < 3; ++k, ++runs) {
            const InteriorMeasure t = 10.0 * random_interior(lab->dom(), rng, true, 3);
            const BoundaryMeasure b = random_boundary(lab->dom(), rng, true);
            const ReducedResult r = reduced_couple(*lab, Nonlinearity::positive_power(3), t, b);
            InteriorMeasure tc = t;
            tc.canonicalize();
            if (r.tau_sharp.density != tc.density) ++bad;
        }
    }
    return {bad == 0, std::to_string(runs) + " mixed couples, " + std::to_string(bad) + " density mismatches"};
}

Verdict ac10() {
    bool squeeze = true, sandwich = true, exact = true;
    int applied = 0;
    double worst_dev = 0.0;
    struct Case {
        Config c;
        Nonlinearity f;
        bool expect_parts_good;
    };
    const std::vector<Case> cases{
        {{Shape::interval, 64, 0.2}, Nonlinearity::power(3), true},
        {{Shape::disk, 32, 0.2}, Nonlinearity::power(3), false},
        {{Shape::disk, 32, -0.2}, truncate(Nonlinearity::power(3), 50.0), true},
    };
    for (const Case& k : cases) {
        auto lab = lab_for(k.c);
        Rng rng(10000);
        for (int s = 0; s < 2; ++s) {
            const InteriorMeasure t = random_interior(lab->dom(), rng, false);
            const BoundaryMeasure b = 5.0 * random_boundary(lab->dom(), rng, false);
            auto [tp, tm] = jordan_split(t);
            auto [np, nm] = jordan_split(b);
            const SignedReport r = reduced_signed(*lab, k.f, t, b, {tm, tp, nm, np});
            squeeze = squeeze && r.squeeze_ok;
            sandwich = sandwich && r.sandwich_ok;
            auto same_t = [&](const InteriorMeasure& x, const InteriorMeasure& y) {
                return weighted_distance(x, y, lab->phi(), lab->vol()) <= 1e-6 * std::max(tau_norm(*lab, y), 1e-300);
            };
            auto same_n = [&](const BoundaryMeasure& x, const BoundaryMeasure& y) {
                return total_variation_diff(x, y) <= 1e-6 * std::max(total_variation(y), 1e-300);
            };
            const bool applies = same_t(r.upper.tau_sharp, tp) && same_n(r.upper.nu_sharp, np) &&
                                 same_t(r.lower.tau_sharp, tm) && same_n(r.lower.nu_sharp, nm);
            if (k.expect_parts_good && !applies) exact = false;
            if (applies) {
                ++applied;
                const double dt = weighted_distance(r.tau_tilde, t, lab->phi(), lab->vol()) / tau_norm(*lab, t);
                const double dn = total_variation_diff(r.nu_tilde, b) / total_variation(b);
                worst_dev = std::max({worst_dev, dt, dn});
            }
        }
    }
    exact = exact && applied > 0 && worst_dev <= 1e-6;
    return {squeeze && sandwich && exact,
            std::string("squeeze ") + (squeeze ? "ok" : "violated") + ", sandwich " + (sandwich ? "ok" : "violated") +
                ", exact-recovery cases " + std::to_string(applied) + " with deviation " + num(worst_dev)};
}

Verdict ac11() {
    double worst = -1.0;
    int fields = 0;
    for (const Config& c : grid_of({{Shape::interval, 64}, {Shape::disk, 48}, {Shape::square, 32}})) {
        auto lab = lab_for(c);
        Rng rng(11000);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int k = 0; k < 100; ++k, ++fields) {
            Field w(lab->dom().n_interior(), lab->dom().n_boundary());
            if (k % 2 == 0) {
                for (double& v : w.interior) v = u(rng);
                for (double& v : w.boundary) v = u(rng);
            } else {
                w = linear_solution(*lab, random_interior(lab->dom(), rng, false),
                                    random_boundary(lab->dom(), rng, false));
            }
            worst = std::max(worst, kato_check(*lab->op, w).worst_violation);
        }
    }
    return {worst <= 1e-12, std::to_string(fields) + " fields, worst violation " + num(worst)};
}

Verdict ac12() {
    double worst = 0.0;
    bool ok = true;
    const std::vector<Nonlinearity> fs{truncate(Nonlinearity::power(3), 5.0),
                                       truncate(Nonlinearity::exponential(), 10.0)};
    for (const Config& c : grid_of({{Shape::interval, 64}, {Shape::disk, 48}, {Shape::square, 32}})) {
        auto lab = lab_for(c);
        const Exhaustion ex = build_exhaustion(lab->dom(), 6);
        Rng rng(12000);
        for (const Nonlinearity& f : fs) {
            const InteriorMeasure t = random_interior(lab->dom(), rng, true);
            const BoundaryMeasure b = random_boundary(lab->dom(), rng, true);
            const ExhaustionSolveResult e = solve_by_exhaustion(*lab, f, t, linear_solution(*lab, t, b), ex);
            const SolveResult s = solve_bvp(*lab, f, t, b);
            ok = ok && s.converged && e.result.converged;
            worst = std::max(worst, max_abs_diff(e.result.u, s.u) / s.u.max_abs());
        }
    }
    return {ok && worst <= 1e-6, "worst relative difference " + num(worst)};
}

Verdict ac13() {
    std::ifstream in(std::string(HARDYLAB_TEST_DATA) + "/probe_golden.json");
    if (!in) return {false, "missing probe_golden.json"};
    const json golden = json::parse(in);
    const double gtol = golden.at("relative_tolerance").get<double>();
    bool pass = true;
    std::string detail;
    for (const auto& entry : golden.at("runs")) {
        ProbeSpec s;
        s.p = entry.at("p").get<double>();
        const ProbeReport r = refinement_probe(s);
        const std::vector<double> want = entry.at("strip_mass").get<std::vector<double>>();
        std::vector<double> got;
        for (const ProbeRow& row : r.rows) got.push_back(row.strip_mass);
        const bool trend = entry.at("regime") == "supercritical" ? r.nonincreasing : r.relative_spread <= 0.05;
        bool match = got.size() == want.size();
        for (std::size_t k = 0; match && k < got.size(); ++k)
            match = std::abs(got[k] - want[k]) <= gtol * std::abs(want[k]);
        pass = pass && trend && match;
        detail += "p=" + num(s.p) + " masses";
        for (double m : got) detail += " " + num(m);
        detail += trend ? " (trend ok" : " (trend broken";
        detail += match ? ", golden ok) " : ", golden mismatch) ";
    }
    return {pass, detail};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict ac14() {
    const fs::path base = fs::temp_directory_path() / "hardylab_acceptance_repro";
    fs::remove_all(base);
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(HARDYLAB_CONFIG_DIR))
        if (e.path().extension() == ".json") configs.push_back(e.path());
    std::sort(configs.begin(), configs.end());
    int identical = 0;
    for (const fs::path& p : configs) {
        const ExperimentConfig c = load_config(p.string());
        std::string text[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path root = base / std::to_string(k);
            ::setenv("HARDYLAB_OUTPUT_ROOT", root.c_str(), 1);
            const RunReport r = run_experiment(c);
            text[k] = slurp(fs::path(r.directory) / "results.json");
        }
        ::unsetenv("HARDYLAB_OUTPUT_ROOT");
        identical += !text[0].empty() && text[0] == text[1];
    }
    fs::remove_all(base);
    return {!configs.empty() && identical == static_cast<int>(configs.size()),
            std::to_string(identical) + "/" + std::to_string(configs.size()) + " configs byte-identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"spectral sanity", ac1},
        {"ground-state identity", ac2},
        {"representation identity", ac3},
        {"trace recovery", ac4},
        {"trace equivalence", ac5},
        {"monotone truncation scheme", ac6},
        {"independence", ac7},
        {"lattice suite", ac8},
        {"diffuse-part preservation", ac9},
        {"signed sandwich", ac10},
        {"Kato inequality", ac11},
        {"exhaustion cross-validation", ac12},
        {"refinement probe", ac13},
        {"reproducibility", ac14},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !v.pass;
        std::printf("%s AC%zu %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                    v.detail.c_str(), s);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
