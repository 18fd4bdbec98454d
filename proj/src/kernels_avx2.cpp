#include "hardylab/kernels.hpp"

#include <cmath>
#include <cstddef>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define HARDYLAB_X86 1
#else
#define HARDYLAB_X86 0
#endif

namespace hardylab::kernels {

#if HARDYLAB_X86
namespace {

#define HL_AVX2 __attribute__((target("avx2,fma")))

HL_AVX2 double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

HL_AVX2 double dot_avx2(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i + 4),
                             _mm256_loadu_pd(b.data() + i + 4), s1);
    }
    for (; i + 4 <= n; i += 4)
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), s0);
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

HL_AVX2 double weighted_abs_sum_avx2(std::span<const double> w, std::span<const double> a) {
    const std::size_t n = a.size();
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d s0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d av = _mm256_and_pd(_mm256_loadu_pd(a.data() + i), mask);
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), av, s0);
    }
    double s = hsum(s0);
    for (; i < n; ++i) s += w[i] * std::abs(a[i]);
    return s;
}

HL_AVX2 void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y.data() + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x.data() + i), yv);
        _mm256_storeu_pd(y.data() + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

HL_AVX2 double max_abs_diff_avx2(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        m = _mm256_max_pd(m, _mm256_and_pd(d, mask));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

// Same operation order as the scalar reference (sum neighbours left to right,
// then diag*x - coef*acc without contraction), so results agree bitwise.
HL_AVX2 void stencil_apply_avx2(const StencilView& s, std::span<const double> x,
                                std::span<double> y) {
    const std::size_t n = y.size();
    const int w = s.width;
    const std::int32_t* nb = s.nbr.data();
    const __m256d coef = _mm256_set1_pd(s.coef);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const std::int32_t* r = nb + i * w;
        __m256d acc = _mm256_i32gather_pd(
            x.data(), _mm_setr_epi32(r[0], r[w], r[2 * w], r[3 * w]), 8);
        for (int k = 1; k < w; ++k) {
            __m128i idx = _mm_setr_epi32(r[k], r[w + k], r[2 * w + k], r[3 * w + k]);
            acc = _mm256_add_pd(acc, _mm256_i32gather_pd(x.data(), idx, 8));
        }
        __m256d dx = _mm256_mul_pd(_mm256_loadu_pd(s.diag.data() + i),
                                   _mm256_loadu_pd(x.data() + i));
        _mm256_storeu_pd(y.data() + i, _mm256_sub_pd(dx, _mm256_mul_pd(coef, acc)));
    }
    for (; i < n; ++i) {
        const std::int32_t* r = nb + i * w;
        double acc = 0.0;
        for (int k = 0; k < w; ++k) acc += x[r[k]];
        y[i] = s.diag[i] * x[i] - s.coef * acc;
    }
}

}  // namespace

bool avx2_supported() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2",           dot_avx2,
                                   weighted_abs_sum_avx2, axpy_avx2,
                                   max_abs_diff_avx2,     stencil_apply_avx2};
    return table;
}

#else

bool avx2_supported() { return false; }
const KernelTable& avx2_table() { return scalar_table(); }

#endif

}  // namespace hardylab::kernels
