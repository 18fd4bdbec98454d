#pragma once

#include <span>
#include <utility>
#include <vector>

namespace hardylab {

struct Atom {
    int node = 0;
    double mass = 0.0;
};

/// Signed interior measure: nodal density (mass per unit volume) plus point masses.
struct InteriorMeasure {
    std::vector<double> density;
    std::vector<Atom> atoms;  // canonical: sorted by node, one entry per node

    InteriorMeasure() = default;
    explicit InteriorMeasure(std::size_t n) : density(n, 0.0) {}

    std::size_t size() const { return density.size(); }
    void add_atom(int node, double mass);
    double atom_at(int node) const;
    void canonicalize();
    /// Nodal right-hand side: density + mass / cell_volume at atom nodes.
    std::vector<double> loads(double cell_volume) const;
    bool is_zero() const;
};

struct BoundaryMeasure {
    std::vector<double> masses;

    BoundaryMeasure() = default;
    explicit BoundaryMeasure(std::size_t n) : masses(n, 0.0) {}
    std::size_t size() const { return masses.size(); }
    double total_mass() const;
    bool is_zero() const;
};

struct MeasureCouple {
    InteriorMeasure tau;
    BoundaryMeasure nu;
};

InteriorMeasure operator+(const InteriorMeasure& a, const InteriorMeasure& b);
InteriorMeasure operator-(const InteriorMeasure& a, const InteriorMeasure& b);
InteriorMeasure operator*(double s, const InteriorMeasure& a);
BoundaryMeasure operator+(const BoundaryMeasure& a, const BoundaryMeasure& b);
BoundaryMeasure operator-(const BoundaryMeasure& a, const BoundaryMeasure& b);
BoundaryMeasure operator*(double s, const BoundaryMeasure& a);

/// sum |density| phi h^d + sum |m| phi(node)
double weighted_norm(const InteriorMeasure& t, std::span<const double> phi, double cell_volume);
/// sum density phi h^d + sum m phi(node)
double pair(const InteriorMeasure& t, std::span<const double> phi, double cell_volume);
double total_variation(const BoundaryMeasure& n);
double total_variation_diff(const BoundaryMeasure& a, const BoundaryMeasure& b);
/// Weighted norm of a - b.
double weighted_distance(const InteriorMeasure& a, const InteriorMeasure& b,
                         std::span<const double> phi, double cell_volume);

// Density and atom components are split separately; under the capacity proxy they
// are mutually singular, so the split is exact in the weighted norm.
std::pair<InteriorMeasure, InteriorMeasure> jordan_split(const InteriorMeasure& m);
std::pair<BoundaryMeasure, BoundaryMeasure> jordan_split(const BoundaryMeasure& m);

/// (diffuse, concentrated) = (density component, atom component).
std::pair<InteriorMeasure, InteriorMeasure> diffuse_concentrated_split(const InteriorMeasure& m);

bool leq(const InteriorMeasure& a, const InteriorMeasure& b, double slack = 0.0);
bool leq(const BoundaryMeasure& a, const BoundaryMeasure& b, double slack = 0.0);
bool couple_leq(const MeasureCouple& a, const MeasureCouple& b, double slack = 0.0);

/// Zero the masses outside `subset` (boundary node indices).
BoundaryMeasure restrict(const BoundaryMeasure& nu, std::span<const int> subset);

}  // namespace hardylab
