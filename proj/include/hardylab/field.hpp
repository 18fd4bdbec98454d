#pragma once

#include <vector>

namespace hardylab {

/// Nodal function on the grid: interior values plus values on the boundary nodes.
struct Field {
    std::vector<double> interior;
    std::vector<double> boundary;

    Field() = default;
    Field(std::size_t ni, std::size_t nb) : interior(ni, 0.0), boundary(nb, 0.0) {}

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(double s);

    /// Interior values followed by boundary values.
    std::vector<double> extended() const;
    double max_abs() const;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
Field positive_part(const Field& f);

double max_abs_diff(const Field& a, const Field& b);
/// True when a <= b + slack at every interior and boundary node.
bool leq(const Field& a, const Field& b, double slack);

}  // namespace hardylab
