#include "hardylab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace hardylab::kernels {
namespace {

double dot_scalar(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double weighted_abs_sum_scalar(std::span<const double> w, std::span<const double> a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::abs(a[i]);
    return s;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double max_abs_diff_scalar(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void stencil_apply_scalar(const StencilView& s, std::span<const double> x,
                          std::span<double> y) {
    const std::size_t n = y.size();
    const int w = s.width;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t* nb = s.nbr.data() + i * w;
        double acc = 0.0;
        for (int k = 0; k < w; ++k) acc += x[nb[k]];
        y[i] = s.diag[i] * x[i] - s.coef * acc;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar",          dot_scalar,
                                   weighted_abs_sum_scalar, axpy_scalar,
                                   max_abs_diff_scalar,     stencil_apply_scalar};
    return table;
}

}  // namespace hardylab::kernels
