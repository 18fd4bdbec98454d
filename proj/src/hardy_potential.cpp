#include "hardylab/hardy_potential.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "hardylab/error.hpp"
#include "hardylab/operator.hpp"

namespace hardylab {

SingularSet SingularSet::at_endpoints(std::vector<double> e) {
    SingularSet s;
    s.kind = Kind::endpoints;
    s.endpoints = std::move(e);
    return s;
}

SingularSet SingularSet::on_arcs(std::vector<std::pair<double, double>> a) {
    SingularSet s;
    s.kind = Kind::arcs;
    s.arcs = std::move(a);
    return s;
}

SingularSet SingularSet::at_nodes(std::vector<int> n) {
    SingularSet s;
    s.kind = Kind::nodes;
    s.nodes = std::move(n);
    return s;
}

std::string SingularSet::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::all: return "all";
        case Kind::endpoints:
            os << "endpoints";
            for (double e : endpoints) os << ' ' << e;
            break;
        case Kind::arcs:
            os << "arcs";
            for (auto [a, b] : arcs) os << " [" << a << ',' << b << ']';
            break;
        case Kind::nodes:
            os << "nodes";
            for (int n : nodes) os << ' ' << n;
            break;
    }
    return os.str();
}

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double seg_dist(Point p, Point a, Point b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.x - a.x - t * vx, p.y - a.y - t * vy);
}

Point square_point(double s) {
    s = std::fmod(s, 4.0);
    if (s < 0) s += 4.0;
    const int k = std::min(3, static_cast<int>(s));
    const double t = s - k;
    switch (k) {
        case 0: return {t, 0.0};
        case 1: return {1.0, t};
        case 2: return {1.0 - t, 1.0};
        default: return {0.0, 1.0 - t};
    }
}

double square_arc_dist(Point p, double a, double b) {
    double best = 1e300;
    double s = a;
    while (s < b) {
        const double edge_end = std::floor(s + 1e-14) + 1.0;
        const double e = std::min(b, edge_end);
        best = std::min(best, seg_dist(p, square_point(s), square_point(e - 1e-15)));
        s = e;
    }
    if (a == b) best = std::hypot(p.x - square_point(a).x, p.y - square_point(a).y);
    return best;
}

bool angle_in_arc(double t, double a, double b) {
    if (b - a >= two_pi) return true;
    double u = std::fmod(t - a, two_pi);
    if (u < 0) u += two_pi;
    return u <= b - a + 1e-12;
}

double disk_arc_dist(Point p, double a, double b) {
    const double r = std::hypot(p.x, p.y);
    double t = std::atan2(p.y, p.x);
    if (t < 0) t += two_pi;
    if (r > 0 && angle_in_arc(t, a, b)) return 1.0 - r;
    const double da = std::hypot(p.x - std::cos(a), p.y - std::sin(a));
    const double db = std::hypot(p.x - std::cos(b), p.y - std::sin(b));
    return std::min(da, db);
}

bool param_in_arc(const GridDomain& d, double s, double a, double b) {
    if (d.shape == Shape::disk) return angle_in_arc(s, a, b);
    if (b - a >= 4.0) return true;
    double u = std::fmod(s - a, 4.0);
    if (u < 0) u += 4.0;
    return u <= b - a + 1e-12;
}

void validate(const GridDomain& d, const SingularSet& e) {
    using K = SingularSet::Kind;
    switch (e.kind) {
        case K::all: return;
        case K::endpoints:
            if (d.shape != Shape::interval)
                throw LabError(Stage::potential, "endpoints only make sense on the interval");
            if (e.endpoints.empty()) throw LabError(Stage::potential, "empty singular set");
            for (double x : e.endpoints)
                if (x != 0.0 && x != 1.0)
                    throw LabError(Stage::potential, "interval endpoints are 0 and 1");
            return;
        case K::arcs:
            if (d.shape == Shape::interval)
                throw LabError(Stage::potential, "arcs need a 2D domain");
            if (e.arcs.empty()) throw LabError(Stage::potential, "empty singular set");
            for (auto [a, b] : e.arcs)
                if (b < a) throw LabError(Stage::potential, "arc with end before start");
            return;
        case K::nodes:
            if (e.nodes.empty()) throw LabError(Stage::potential, "empty singular set");
            for (int n : e.nodes)
                if (n < 0 || static_cast<std::size_t>(n) >= d.n_boundary())
                    throw LabError(Stage::potential, "singular node out of range");
            return;
    }
}

}  // namespace

std::vector<int> singular_nodes(const GridDomain& d, const SingularSet& e) {
    validate(d, e);
    using K = SingularSet::Kind;
    std::vector<int> out;
    for (std::size_t b = 0; b < d.n_boundary(); ++b) {
        bool in = false;
        switch (e.kind) {
            case K::all: in = true; break;
            case K::endpoints:
                in = std::find(e.endpoints.begin(), e.endpoints.end(), d.boundary[b].x) !=
                     e.endpoints.end();
                break;
            case K::arcs:
                for (auto [a, c] : e.arcs) in = in || param_in_arc(d, d.boundary_param[b], a, c);
                break;
            case K::nodes:
                in = std::find(e.nodes.begin(), e.nodes.end(), static_cast<int>(b)) != e.nodes.end();
                break;
        }
        if (in) out.push_back(static_cast<int>(b));
    }
    return out;
}

std::vector<double> distance_to_set(const GridDomain& d, const SingularSet& e) {
    validate(d, e);
    using K = SingularSet::Kind;
    const std::size_t n = d.n_interior();
    std::vector<double> r(n, 1e300);
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = d.interior[i];
        switch (e.kind) {
            case K::all: r[i] = d.delta[i]; break;
            case K::endpoints:
                for (double x : e.endpoints) r[i] = std::min(r[i], std::abs(p.x - x));
                break;
            case K::arcs:
                for (auto [a, b] : e.arcs)
                    r[i] = std::min(r[i], d.shape == Shape::disk ? disk_arc_dist(p, a, b)
                                                                 : square_arc_dist(p, a, b));
                break;
            case K::nodes:
                for (int b : e.nodes) {
                    const Point f = d.boundary_foot[b];
                    r[i] = std::min(r[i], std::hypot(p.x - f.x, p.y - f.y));
                }
                break;
        }
        // Never closer than the analytic boundary itself.
        r[i] = std::max(r[i], d.delta[i]);
    }
    return r;
}

Potential make_potential(const GridDomain& d, std::vector<double> values) {
    if (values.size() != d.n_interior()) throw LabError(Stage::potential, "potential size mismatch");
    Potential v;
    v.values = std::move(values);
    for (std::size_t i = 0; i < d.n_interior(); ++i)
        v.a_bar = std::max(v.a_bar, std::abs(v.values[i]) * d.delta[i] * d.delta[i]);
    return v;
}

Potential build_hardy_potential(const GridDomain& d, double gamma, const SingularSet& e) {
    const std::vector<double> de = distance_to_set(d, e);
    std::vector<double> vals(d.n_interior());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = gamma / (de[i] * de[i]);
    Potential v = make_potential(d, std::move(vals));
    v.gamma = gamma;
    v.singular_set = e;
    return v;
}

namespace {

SparseMatrix pencil(const GridDomain& d, const std::vector<double>& values) {
    auto dom = std::make_shared<const GridDomain>(d);
    return OperatorLV(dom, values).matrix();
}

}  // namespace

A2Report check_A2(const GridDomain& d, const Potential& v) {
    const SparseMatrix a = pencil(d, v.values);
    const EigenPair ep = smallest_eigenpair(a);
    A2Report r;
    r.margin = ep.value;
    r.iterations = ep.iterations;
    r.satisfied = ep.value >= 0.0;
    return r;
}

HardyEstimate estimate_hardy_constant(const GridDomain& d, const SingularSet& e, double gamma_lo,
                                      double gamma_hi, double rel_tol) {
    if (!(gamma_lo < gamma_hi)) throw LabError(Stage::potential, "empty gamma bracket");
    const std::vector<double> de = distance_to_set(d, e);
    auto dom = std::make_shared<const GridDomain>(d);
    const OperatorLV base(dom, std::vector<double>(d.n_interior(), 0.0));
    std::vector<double> w(de.size());
    for (std::size_t i = 0; i < de.size(); ++i) w[i] = 1.0 / (de[i] * de[i]);
    auto passes = [&](double gamma) {
        SparseMatrix m = base.matrix();
        for (std::size_t i = 0; i < w.size(); ++i) m.coeffRef(i, i) -= gamma * w[i];
        return is_positive_definite(m);
    };

    HardyEstimate h;
    if (!passes(gamma_lo))
        throw LabError(Stage::potential, "bisection bracket failure: lower end does not satisfy A2");
    if (passes(gamma_hi)) {
        h.value = h.lower = h.upper = gamma_hi;
        h.at_bracket_edge = true;
        return h;
    }
    double lo = gamma_lo, hi = gamma_hi;
    while (hi - lo > rel_tol * std::max(std::abs(hi), std::abs(lo)) && h.bisections < 200) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
        ++h.bisections;
    }
    h.lower = lo;
    h.upper = hi;
    h.value = lo;
    return h;
}

}  // namespace hardylab
