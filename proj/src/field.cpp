#include "hardylab/field.hpp"

#include <algorithm>
#include <cmath>

#include "hardylab/kernels.hpp"

namespace hardylab {

Field& Field::operator+=(const Field& o) {
    kernels::axpy(1.0, o.interior, interior);
    kernels::axpy(1.0, o.boundary, boundary);
    return *this;
}

Field& Field::operator-=(const Field& o) {
    kernels::axpy(-1.0, o.interior, interior);
    kernels::axpy(-1.0, o.boundary, boundary);
    return *this;
}

Field& Field::operator*=(double s) {
    for (double& v : interior) v *= s;
    for (double& v : boundary) v *= s;
    return *this;
}

std::vector<double> Field::extended() const {
    std::vector<double> x(interior);
    x.insert(x.end(), boundary.begin(), boundary.end());
    return x;
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : interior) m = std::max(m, std::abs(v));
    for (double v : boundary) m = std::max(m, std::abs(v));
    return m;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field positive_part(const Field& f) {
    Field r = f;
    for (double& v : r.interior) v = std::max(v, 0.0);
    for (double& v : r.boundary) v = std::max(v, 0.0);
    return r;
}

double max_abs_diff(const Field& a, const Field& b) {
    return std::max(kernels::max_abs_diff(a.interior, b.interior),
                    kernels::max_abs_diff(a.boundary, b.boundary));
}

bool leq(const Field& a, const Field& b, double slack) {
    for (std::size_t i = 0; i < a.interior.size(); ++i)
        if (a.interior[i] > b.interior[i] + slack) return false;
    for (std::size_t i = 0; i < a.boundary.size(); ++i)
        if (a.boundary[i] > b.boundary[i] + slack) return false;
    return true;
}

}  // namespace hardylab
