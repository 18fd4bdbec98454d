#pragma once

// Data-parallel inner loops shared by the operator, the quadratures and the
// nonlinear solvers. Every kernel has a scalar reference implementation and an
// AVX2/FMA variant; the variant is chosen once at startup from CPUID and can be
// forced with HARDYLAB_SIMD=scalar|avx2.

#include <cstdint>
#include <span>
#include <string_view>

namespace hardylab::kernels {

/// Fixed-width neighbour stencil: y[i] = diag[i]*x[i] - coef * sum_k x[nbr[i*width+k]].
/// `x` is the interior vector followed by one slot per boundary node; boundary
/// links index those slots, so zero-filled slots give the homogeneous operator.
struct StencilView {
    std::span<const double> diag;
    std::span<const std::int32_t> nbr;
    int width = 2;
    double coef = 0.0;
};

struct KernelTable {
    std::string_view name;
    double (*dot)(std::span<const double> a, std::span<const double> b);
    // sum_i w[i] * |a[i]|
    double (*weighted_abs_sum)(std::span<const double> w, std::span<const double> a);
    // y += alpha * x
    void (*axpy)(double alpha, std::span<const double> x, std::span<double> y);
    double (*max_abs_diff)(std::span<const double> a, std::span<const double> b);
    void (*stencil_apply)(const StencilView& s, std::span<const double> x_padded,
                          std::span<double> y);
};

const KernelTable& scalar_table();
/// Only valid when avx2_supported() is true.
const KernelTable& avx2_table();
bool avx2_supported();

/// Dispatch table in use for this process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a, b);
}
inline double weighted_abs_sum(std::span<const double> w, std::span<const double> a) {
    return active().weighted_abs_sum(w, a);
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x, y);
}
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    return active().max_abs_diff(a, b);
}
inline void stencil_apply(const StencilView& s, std::span<const double> x_padded,
                          std::span<double> y) {
    active().stencil_apply(s, x_padded, y);
}

}  // namespace hardylab::kernels
