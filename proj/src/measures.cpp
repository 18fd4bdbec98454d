#include "hardylab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hardylab/error.hpp"

namespace hardylab {

void InteriorMeasure::add_atom(int node, double mass) {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), node,
                               [](const Atom& a, int n) { return a.node < n; });
    if (it != atoms.end() && it->node == node)
        it->mass += mass;
    else
        atoms.insert(it, Atom{node, mass});
}

double InteriorMeasure::atom_at(int node) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), node,
                               [](const Atom& a, int n) { return a.node < n; });
    return it != atoms.end() && it->node == node ? it->mass : 0.0;
}

void InteriorMeasure::canonicalize() {
    std::map<int, double> m;
    for (const Atom& a : atoms) m[a.node] += a.mass;
    atoms.clear();
    for (auto [n, v] : m)
        if (v != 0.0) atoms.push_back({n, v});
}

std::vector<double> InteriorMeasure::loads(double cell_volume) const {
    std::vector<double> r(density);
    for (const Atom& a : atoms) r[a.node] += a.mass / cell_volume;
    return r;
}

bool InteriorMeasure::is_zero() const {
    for (double v : density)
        if (v != 0.0) return false;
    for (const Atom& a : atoms)
        if (a.mass != 0.0) return false;
    return true;
}

double BoundaryMeasure::total_mass() const {
    double s = 0.0;
    for (double v : masses) s += v;
    return s;
}

bool BoundaryMeasure::is_zero() const {
    return std::all_of(masses.begin(), masses.end(), [](double v) { return v == 0.0; });
}

namespace {

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw LabError(Stage::domain, "measures live on different grids");
}

InteriorMeasure combine(const InteriorMeasure& a, double sa, const InteriorMeasure& b, double sb) {
    check_sizes(a.size(), b.size());
    InteriorMeasure r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.density[i] = sa * a.density[i] + sb * b.density[i];
    for (const Atom& x : a.atoms) r.add_atom(x.node, sa * x.mass);
    for (const Atom& x : b.atoms) r.add_atom(x.node, sb * x.mass);
    return r;
}

BoundaryMeasure combine(const BoundaryMeasure& a, double sa, const BoundaryMeasure& b, double sb) {
    check_sizes(a.size(), b.size());
    BoundaryMeasure r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.masses[i] = sa * a.masses[i] + sb * b.masses[i];
    return r;
}

}  // namespace

InteriorMeasure operator+(const InteriorMeasure& a, const InteriorMeasure& b) {
    return combine(a, 1.0, b, 1.0);
}
InteriorMeasure operator-(const InteriorMeasure& a, const InteriorMeasure& b) {
    return combine(a, 1.0, b, -1.0);
}
InteriorMeasure operator*(double s, const InteriorMeasure& a) {
    InteriorMeasure r = a;
    for (double& v : r.density) v *= s;
    for (Atom& x : r.atoms) x.mass *= s;
    return r;
}
BoundaryMeasure operator+(const BoundaryMeasure& a, const BoundaryMeasure& b) {
    return combine(a, 1.0, b, 1.0);
}
BoundaryMeasure operator-(const BoundaryMeasure& a, const BoundaryMeasure& b) {
    return combine(a, 1.0, b, -1.0);
}
BoundaryMeasure operator*(double s, const BoundaryMeasure& a) {
    BoundaryMeasure r = a;
    for (double& v : r.masses) v *= s;
    return r;
}

double weighted_norm(const InteriorMeasure& t, std::span<const double> phi, double cell_volume) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += std::abs(t.density[i]) * phi[i];
    s *= cell_volume;
    for (const Atom& a : t.atoms) s += std::abs(a.mass) * phi[a.node];
    return s;
}

double pair(const InteriorMeasure& t, std::span<const double> phi, double cell_volume) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += t.density[i] * phi[i];
    s *= cell_volume;
    for (const Atom& a : t.atoms) s += a.mass * phi[a.node];
    return s;
}

double total_variation(const BoundaryMeasure& n) {
    double s = 0.0;
    for (double v : n.masses) s += std::abs(v);
    return s;
}

double total_variation_diff(const BoundaryMeasure& a, const BoundaryMeasure& b) {
    check_sizes(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.masses[i] - b.masses[i]);
    return s;
}

double weighted_distance(const InteriorMeasure& a, const InteriorMeasure& b,
                         std::span<const double> phi, double cell_volume) {
    return weighted_norm(a - b, phi, cell_volume);
}

std::pair<InteriorMeasure, InteriorMeasure> jordan_split(const InteriorMeasure& m) {
    InteriorMeasure pos(m.size()), neg(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        pos.density[i] = std::max(m.density[i], 0.0);
        neg.density[i] = std::max(-m.density[i], 0.0);
    }
    for (const Atom& a : m.atoms) {
        if (a.mass > 0) pos.add_atom(a.node, a.mass);
        if (a.mass < 0) neg.add_atom(a.node, -a.mass);
    }
    return {pos, neg};
}

std::pair<BoundaryMeasure, BoundaryMeasure> jordan_split(const BoundaryMeasure& m) {
    BoundaryMeasure pos(m.size()), neg(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        pos.masses[i] = std::max(m.masses[i], 0.0);
        neg.masses[i] = std::max(-m.masses[i], 0.0);
    }
    return {pos, neg};
}

std::pair<InteriorMeasure, InteriorMeasure> diffuse_concentrated_split(const InteriorMeasure& m) {
    InteriorMeasure diffuse(m.size()), conc(m.size());
    diffuse.density = m.density;
    conc.atoms = m.atoms;
    return {diffuse, conc};
}

bool leq(const InteriorMeasure& a, const InteriorMeasure& b, double slack) {
    check_sizes(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.density[i] > b.density[i] + slack) return false;
    std::map<int, double> diff;
    for (const Atom& x : a.atoms) diff[x.node] += x.mass;
    for (const Atom& x : b.atoms) diff[x.node] -= x.mass;
    for (auto [n, v] : diff)
        if (v > slack) return false;
    return true;
}

bool leq(const BoundaryMeasure& a, const BoundaryMeasure& b, double slack) {
    check_sizes(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.masses[i] > b.masses[i] + slack) return false;
    return true;
}

bool couple_leq(const MeasureCouple& a, const MeasureCouple& b, double slack) {
    return leq(a.tau, b.tau, slack) && leq(a.nu, b.nu, slack);
}

BoundaryMeasure restrict(const BoundaryMeasure& nu, std::span<const int> subset) {
    BoundaryMeasure r(nu.size());
    for (int b : subset) {
        if (b < 0 || static_cast<std::size_t>(b) >= nu.size())
            throw LabError(Stage::domain, "restriction subset names a missing boundary node");
        r.masses[b] = nu.masses[b];
    }
    return r;
}

}  // namespace hardylab
