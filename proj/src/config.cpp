#include "hardylab/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "hardylab/battery.hpp"
#include "hardylab/error.hpp"
#include "hardylab/expression.hpp"
#include "hardylab/io.hpp"

namespace hardylab {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw LabError(Stage::config, where + ": " + msg);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            fail(where, "unknown key '" + k + "'");
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "must be finite");
    return v;
}

double positive(const json& j, const std::string& where) {
    const double v = number(j, where);
    if (!(v > 0)) fail(where, "must be positive");
    return v;
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

std::string string(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

Point point(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || j.size() > 2) fail(where, "expected [x] or [x, y]");
    Point p;
    p.x = number(j[0], where);
    if (j.size() == 2) p.y = number(j[1], where);
    return p;
}

SingularSet singular_set(const json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() != "all") fail(where, "expected \"all\" or an object");
        return SingularSet::whole();
    }
    check_keys(j, {"endpoints", "arcs", "nodes"}, where);
    if (j.size() != 1) fail(where, "give exactly one of endpoints, arcs, nodes");
    if (j.contains("endpoints")) {
        std::vector<double> e;
        for (const auto& v : j["endpoints"]) {
            const double x = number(v, where + ".endpoints");
            if (x != 0.0 && x != 1.0) fail(where + ".endpoints", "endpoints are 0 or 1");
            e.push_back(x);
        }
        return SingularSet::at_endpoints(std::move(e));
    }
    if (j.contains("arcs")) {
        std::vector<std::pair<double, double>> a;
        for (const auto& v : j["arcs"]) {
            if (!v.is_array() || v.size() != 2) fail(where + ".arcs", "expected [from, to]");
            const double lo = number(v[0], where + ".arcs"), hi = number(v[1], where + ".arcs");
            if (!(lo <= hi)) fail(where + ".arcs", "arc must satisfy from <= to");
            a.emplace_back(lo, hi);
        }
        return SingularSet::on_arcs(std::move(a));
    }
    std::vector<int> n;
    for (const auto& v : j["nodes"]) n.push_back(integer(v, where + ".nodes"));
    return SingularSet::at_nodes(std::move(n));
}

json singular_set_json(const SingularSet& e) {
    switch (e.kind) {
        case SingularSet::Kind::all: return "all";
        case SingularSet::Kind::endpoints: return json{{"endpoints", e.endpoints}};
        case SingularSet::Kind::arcs: {
            json a = json::array();
            for (auto [lo, hi] : e.arcs) a.push_back({lo, hi});
            return json{{"arcs", a}};
        }
        case SingularSet::Kind::nodes: return json{{"nodes", e.nodes}};
    }
    return "all";
}

std::vector<MeasureTerm> terms(const json& j, const std::string& where, bool boundary) {
    if (!j.is_array()) fail(where, "expected a list of terms");
    std::vector<MeasureTerm> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string w = where + "[" + std::to_string(k) + "]";
        const json& t = j[k];
        if (!t.is_object()) fail(w, "expected an object");
        MeasureTerm m;
        if (t.contains("uniform")) {
            check_keys(t, {"uniform"}, w);
            m.kind = MeasureTerm::Kind::uniform;
            m.value = number(t["uniform"], w + ".uniform");
        } else if (t.contains("density")) {
            if (boundary) fail(w, "boundary measures take uniform or atom terms");
            check_keys(t, {"density"}, w);
            m.kind = MeasureTerm::Kind::density;
            m.expression = string(t["density"], w + ".density");
            Expression probe(m.expression);  // parse now so errors surface at load time
        } else if (t.contains("atom")) {
            check_keys(t, {"atom", "mass"}, w);
            m.kind = MeasureTerm::Kind::atom;
            const json& a = t["atom"];
            check_keys(a, {"at", "node"}, w + ".atom");
            if (a.size() != 1) fail(w + ".atom", "give exactly one of at, node");
            if (a.contains("at")) m.at = point(a["at"], w + ".atom.at");
            else m.node = integer(a["node"], w + ".atom.node");
            if (!t.contains("mass")) fail(w, "atom needs a mass");
            m.value = number(t["mass"], w + ".mass");
        } else {
            fail(w, "expected one of uniform, density, atom");
        }
        out.push_back(std::move(m));
    }
    return out;
}

json terms_json(const std::vector<MeasureTerm>& ts) {
    json a = json::array();
    for (const MeasureTerm& t : ts) {
        switch (t.kind) {
            case MeasureTerm::Kind::uniform: a.push_back({{"uniform", t.value}}); break;
            case MeasureTerm::Kind::density: a.push_back({{"density", t.expression}}); break;
            case MeasureTerm::Kind::atom: {
                json at = t.at ? json{{"at", {t.at->x, t.at->y}}} : json{{"node", *t.node}};
                a.push_back({{"atom", at}, {"mass", t.value}});
                break;
            }
        }
    }
    return a;
}

Shape shape(const json& j, const std::string& where) {
    try {
        return parse_shape(string(j, where));
    } catch (const LabError&) {
        throw;
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

std::vector<double> schedule(const json& j) {
    std::vector<double> s;
    if (j.is_object()) {
        check_keys(j, {"max_exponent"}, "schedule");
        const int m = integer(j.at("max_exponent"), "schedule.max_exponent");
        if (m < 0 || m > 60) fail("schedule.max_exponent", "must lie in [0, 60]");
        s = default_schedule(m);
    } else if (j.is_array()) {
        for (const auto& v : j) s.push_back(positive(v, "schedule"));
    } else {
        fail("schedule", "expected {max_exponent} or a list of levels");
    }
    if (s.empty()) fail("schedule", "must not be empty");
    for (std::size_t k = 1; k < s.size(); ++k)
        if (!(s[k] > s[k - 1])) fail("schedule", "must be strictly increasing");
    return s;
}

}  // namespace

Nonlinearity NonlinearitySpec::build() const {
    Nonlinearity f = Nonlinearity::zero();
    if (kind == "zero") f = Nonlinearity::zero();
    else if (kind == "power") f = Nonlinearity::power(p);
    else if (kind == "exponential") f = Nonlinearity::exponential();
    else if (kind == "positive_power") f = Nonlinearity::positive_power(p);
    else if (kind == "linear") f = Nonlinearity::linear(c);
    else throw LabError(Stage::config, "nonlinearity: unknown kind '" + kind + "'");
    return clamp ? truncate(f, *clamp) : f;
}

SolveOptions ExperimentConfig::solve_options() const {
    SolveOptions o;
    o.solver = solver;
    o.tolerance = tol.solve;
    o.max_iterations = max_iterations;
    o.theta = theta;
    return o;
}

ReduceOptions ExperimentConfig::reduce_options() const {
    ReduceOptions o;
    o.schedule = schedule;
    o.limit_tol = tol.limit;
    o.monotone_slack = tol.monotone;
    o.solve = solve_options();
    o.strip_regularization = trace.strip_regularization;
    return o;
}

ExperimentConfig parse_config(const json& j) {
    check_keys(j, {"name", "domain", "potential", "nonlinearity", "data", "schedule", "solver",
                   "tolerances", "trace", "checks", "output", "seed", "samples", "probe"},
               "config");
    ExperimentConfig c;
    if (j.contains("name")) c.name = string(j["name"], "name");
    if (!j.contains("domain")) fail("config", "missing domain");
    {
        const json& d = j["domain"];
        check_keys(d, {"shape", "n_cells"}, "domain");
        c.domain.shape = shape(d.at("shape"), "domain.shape");
        if (d.contains("n_cells")) c.domain.n_cells = integer(d["n_cells"], "domain.n_cells");
    }
    if (j.contains("potential")) {
        const json& p = j["potential"];
        check_keys(p, {"gamma", "singular_set"}, "potential");
        if (p.contains("gamma")) c.potential.gamma = number(p["gamma"], "potential.gamma");
        if (p.contains("singular_set"))
            c.potential.singular_set = singular_set(p["singular_set"], "potential.singular_set");
    }
    if (j.contains("nonlinearity")) {
        const json& f = j["nonlinearity"];
        check_keys(f, {"kind", "p", "c", "clamp"}, "nonlinearity");
        c.nonlinearity.kind = string(f.at("kind"), "nonlinearity.kind");
        if (f.contains("p")) c.nonlinearity.p = number(f["p"], "nonlinearity.p");
        if (f.contains("c")) c.nonlinearity.c = number(f["c"], "nonlinearity.c");
        if (f.contains("clamp")) c.nonlinearity.clamp = positive(f["clamp"], "nonlinearity.clamp");
        try {
            (void)c.nonlinearity.build();
        } catch (const LabError&) {
            throw;
        } catch (const std::exception& e) {
            fail("nonlinearity", e.what());
        }
    }
    if (j.contains("data")) {
        const json& d = j["data"];
        check_keys(d, {"tau", "nu"}, "data");
        if (d.contains("tau")) c.data.tau = terms(d["tau"], "data.tau", false);
        if (d.contains("nu")) c.data.nu = terms(d["nu"], "data.nu", true);
    }
    if (j.contains("schedule")) c.schedule = schedule(j["schedule"]);
    if (j.contains("solver")) {
        const json& s = j["solver"];
        check_keys(s, {"kind", "max_iterations", "theta"}, "solver");
        if (s.contains("kind")) c.solver = parse_solver(string(s["kind"], "solver.kind"));
        if (s.contains("max_iterations")) {
            c.max_iterations = integer(s["max_iterations"], "solver.max_iterations");
            if (c.max_iterations < 0) fail("solver.max_iterations", "must be nonnegative");
        }
        if (s.contains("theta")) {
            c.theta = positive(s["theta"], "solver.theta");
            if (c.theta > 1) fail("solver.theta", "must lie in (0, 1]");
        }
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        check_keys(t, {"solve", "limit", "monotone", "trace", "equivalence", "identity",
                       "relative", "kato", "exhaustion", "spectral"},
                   "tolerances");
        auto get = [&](const char* key, double& dst) {
            if (t.contains(key)) dst = positive(t[key], std::string("tolerances.") + key);
        };
        get("solve", c.tol.solve);
        get("limit", c.tol.limit);
        get("monotone", c.tol.monotone);
        get("trace", c.tol.trace);
        get("equivalence", c.tol.equivalence);
        get("identity", c.tol.identity);
        get("relative", c.tol.relative);
        get("kato", c.tol.kato);
        get("exhaustion", c.tol.exhaustion);
        get("spectral", c.tol.spectral);
    }
    if (j.contains("trace")) {
        const json& t = j["trace"];
        check_keys(t, {"dictionary", "degree", "exhaustion_levels", "regularization",
                       "strip_regularization"},
                   "trace");
        if (t.contains("dictionary")) {
            try {
                c.trace.dictionary = parse_dictionary(string(t["dictionary"], "trace.dictionary"));
            } catch (const LabError&) {
                throw;
            } catch (const std::exception& e) {
                fail("trace.dictionary", e.what());
            }
        }
        if (t.contains("degree")) c.trace.degree = integer(t["degree"], "trace.degree");
        if (c.trace.degree < 0) fail("trace.degree", "must be nonnegative");
        if (t.contains("exhaustion_levels"))
            c.trace.exhaustion_levels = integer(t["exhaustion_levels"], "trace.exhaustion_levels");
        if (c.trace.exhaustion_levels < 2) fail("trace.exhaustion_levels", "must be at least 2");
        if (t.contains("regularization")) {
            c.trace.regularization = number(t["regularization"], "trace.regularization");
            if (c.trace.regularization < 0) fail("trace.regularization", "must be nonnegative");
        }
        if (t.contains("strip_regularization")) {
            c.trace.strip_regularization =
                number(t["strip_regularization"], "trace.strip_regularization");
            if (c.trace.strip_regularization < 0)
                fail("trace.strip_regularization", "must be nonnegative");
        }
    }
    if (j.contains("checks")) {
        if (!j["checks"].is_array()) fail("checks", "expected a list of names");
        for (const auto& v : j["checks"]) {
            std::string n = string(v, "checks");
            if (std::find(c.checks.begin(), c.checks.end(), n) != c.checks.end())
                fail("checks", "duplicate check '" + n + "'");
            c.checks.push_back(std::move(n));
        }
    }
    if (j.contains("output")) c.output = string(j["output"], "output");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("samples")) {
        c.samples = integer(j["samples"], "samples");
        if (c.samples < 1) fail("samples", "must be positive");
    }
    if (j.contains("probe")) {
        const json& p = j["probe"];
        check_keys(p, {"shape", "n_cells", "p", "gamma", "singular_set", "mass", "atom_at",
                       "max_exponent", "strip_regularization", "stability"},
                   "probe");
        ProbeConfig& q = c.probe;
        if (p.contains("shape")) q.shape = shape(p["shape"], "probe.shape");
        if (p.contains("n_cells")) {
            q.n_cells.clear();
            for (const auto& v : p["n_cells"]) q.n_cells.push_back(integer(v, "probe.n_cells"));
            if (q.n_cells.size() < 2) fail("probe.n_cells", "need at least two grids");
            for (std::size_t k = 1; k < q.n_cells.size(); ++k)
                if (q.n_cells[k] <= q.n_cells[k - 1]) fail("probe.n_cells", "must be increasing");
        }
        if (p.contains("p")) {
            q.p.clear();
            for (const auto& v : p["p"]) {
                q.p.push_back(number(v, "probe.p"));
                if (q.p.back() < 1) fail("probe.p", "exponents must be >= 1");
            }
        }
        if (p.contains("gamma")) q.gamma = number(p["gamma"], "probe.gamma");
        if (p.contains("singular_set")) q.singular_set = singular_set(p["singular_set"], "probe.singular_set");
        if (p.contains("mass")) q.mass = positive(p["mass"], "probe.mass");
        if (p.contains("atom_at")) q.atom_at = point(p["atom_at"], "probe.atom_at");
        if (p.contains("max_exponent")) {
            q.max_exponent = integer(p["max_exponent"], "probe.max_exponent");
            if (q.max_exponent < 0 || q.max_exponent > 60)
                fail("probe.max_exponent", "must lie in [0, 60]");
        }
        if (p.contains("strip_regularization")) {
            q.strip_regularization = number(p["strip_regularization"], "probe.strip_regularization");
            if (q.strip_regularization < 0) fail("probe.strip_regularization", "must be nonnegative");
        }
        if (p.contains("stability")) q.stability = positive(p["stability"], "probe.stability");
    }
    c.source = to_json(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw LabError(Stage::config, e.what());
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw LabError(Stage::config, path + ": " + e.what());
    }
    return parse_config(j);
}

void validate_against(const ExperimentConfig& c, const GridDomain& d) {
    auto nodes = [&](const std::vector<MeasureTerm>& ts, std::size_t n, const char* where) {
        for (const MeasureTerm& t : ts)
            if (t.node && (*t.node < 0 || static_cast<std::size_t>(*t.node) >= n))
                fail(where, "node " + std::to_string(*t.node) + " does not exist (" +
                                std::to_string(n) + " nodes)");
    };
    nodes(c.data.tau, d.n_interior(), "data.tau");
    nodes(c.data.nu, d.n_boundary(), "data.nu");
    const SingularSet& e = c.potential.singular_set;
    for (int n : e.nodes)
        if (n < 0 || static_cast<std::size_t>(n) >= d.n_boundary())
            fail("potential.singular_set", "boundary node " + std::to_string(n) + " does not exist");
    if (e.kind == SingularSet::Kind::endpoints && d.shape != Shape::interval)
        fail("potential.singular_set", "endpoints apply to the interval only");
}

InteriorMeasure build_measure_tau(const GridDomain& d, const std::vector<MeasureTerm>& terms) {
    InteriorMeasure t(d.n_interior());
    for (const MeasureTerm& m : terms) {
        switch (m.kind) {
            case MeasureTerm::Kind::uniform:
                for (double& v : t.density) v += m.value;
                break;
            case MeasureTerm::Kind::density: {
                const Expression e(m.expression);
                for (std::size_t i = 0; i < d.n_interior(); ++i) {
                    const double v = e(d.interior[i].x, d.interior[i].y);
                    if (!std::isfinite(v))
                        throw LabError(Stage::config, "density '" + m.expression +
                                                          "' is not finite at node " + std::to_string(i));
                    t.density[i] += v;
                }
                break;
            }
            case MeasureTerm::Kind::atom:
                t.add_atom(m.node ? *m.node : nearest_interior_node(d, *m.at), m.value);
                break;
        }
    }
    t.canonicalize();
    return t;
}

BoundaryMeasure build_measure_nu(const GridDomain& d, const std::vector<MeasureTerm>& terms) {
    BoundaryMeasure n(d.n_boundary());
    for (const MeasureTerm& m : terms) {
        if (m.kind == MeasureTerm::Kind::uniform) {
            for (std::size_t b = 0; b < d.n_boundary(); ++b)
                if (d.boundary_active[b]) n.masses[b] += m.value * d.surface_weights[b];
        } else if (m.kind == MeasureTerm::Kind::atom) {
            const int b = m.node ? *m.node : nearest_boundary_node(d, *m.at);
            if (!d.boundary_active[b])
                throw LabError(Stage::config, "atom at boundary node " + std::to_string(b) +
                                                  " sits on an inactive corner");
            n.masses[b] += m.value;
        } else {
            throw LabError(Stage::config, "boundary measures take uniform or atom terms");
        }
    }
    return n;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["domain"] = {{"shape", shape_name(c.domain.shape)}, {"n_cells", c.domain.n_cells}};
    j["potential"] = {{"gamma", c.potential.gamma},
                      {"singular_set", singular_set_json(c.potential.singular_set)}};
    json f = {{"kind", c.nonlinearity.kind}, {"p", c.nonlinearity.p}, {"c", c.nonlinearity.c}};
    if (c.nonlinearity.clamp) f["clamp"] = *c.nonlinearity.clamp;
    j["nonlinearity"] = f;
    j["data"] = {{"tau", terms_json(c.data.tau)}, {"nu", terms_json(c.data.nu)}};
    j["schedule"] = c.schedule;
    j["solver"] = {{"kind", c.solver == SolverKind::newton ? "newton" : "fixed_point"},
                   {"max_iterations", c.max_iterations},
                   {"theta", c.theta}};
    j["tolerances"] = {{"solve", c.tol.solve},       {"limit", c.tol.limit},
                       {"monotone", c.tol.monotone}, {"trace", c.tol.trace},
                       {"equivalence", c.tol.equivalence}, {"identity", c.tol.identity},
                       {"relative", c.tol.relative}, {"kato", c.tol.kato},
                       {"exhaustion", c.tol.exhaustion}, {"spectral", c.tol.spectral}};
    const char* dict = c.trace.dictionary == Dictionary::polynomial ? "polynomial"
                       : c.trace.dictionary == Dictionary::nodal    ? "nodal"
                                                                    : "auto";
    j["trace"] = {{"dictionary", dict},
                  {"degree", c.trace.degree},
                  {"exhaustion_levels", c.trace.exhaustion_levels},
                  {"regularization", c.trace.regularization},
                  {"strip_regularization", c.trace.strip_regularization}};
    j["checks"] = c.checks;
    j["output"] = c.output;
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    j["probe"] = {{"shape", shape_name(c.probe.shape)},
                  {"n_cells", c.probe.n_cells},
                  {"p", c.probe.p},
                  {"gamma", c.probe.gamma},
                  {"singular_set", singular_set_json(c.probe.singular_set)},
                  {"mass", c.probe.mass},
                  {"atom_at", {c.probe.atom_at.x, c.probe.atom_at.y}},
                  {"max_exponent", c.probe.max_exponent},
                  {"strip_regularization", c.probe.strip_regularization},
                  {"stability", c.probe.stability}};
    return j;
}

}  // namespace hardylab
