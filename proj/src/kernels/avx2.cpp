// Compiled with -mavx2 -mfma; only reached through runtime dispatch.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdflab/kernels/kernels.hpp"

namespace cdflab::kernels::avx2
{
namespace
{

// exp(x) by range reduction x = n ln2 + r, |r| <= ln2/2, and a degree-13
// Taylor polynomial for exp(r). Relative error is a few ulp on
// [-708, ln(DBL_MAX)]; below -708 the result is flushed to 0 and above
// ln(DBL_MAX) it is +inf.
inline __m256d exp_pd(__m256d x)
{
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d hi = _mm256_set1_pd(709.782712893384);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    const __m256d overflow = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // Horner with 1/k! coefficients, k = 13 .. 0.
    constexpr double inv_fact[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
        1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
        1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
        1.0 / 24.0,         1.0 / 6.0,         0.5,
        1.0,                1.0,
    };
    __m256d p = _mm256_set1_pd(inv_fact[0]);
    for (int k = 1; k < 14; ++k)
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));

    // 2^n as 2^h * 2^(n-h) with h = floor(n/2), so n = 1024 stays
    // representable. The 0x1.8p52 shift puts an integer in the low mantissa
    // bits.
    const __m256d shift = _mm256_set1_pd(0x1.8p52);
    auto pow2 = [&](__m256d k) {
        const __m256i k_int = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, shift)),
                                               _mm256_castpd_si256(shift));
        const __m256i biased = _mm256_add_epi64(k_int, _mm256_set1_epi64x(1023));
        return _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));
    };
    const __m256d half = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
    const __m256d result =
        _mm256_mul_pd(_mm256_mul_pd(p, pow2(half)), pow2(_mm256_sub_pd(n, half)));
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    return _mm256_blendv_pd(_mm256_blendv_pd(result, _mm256_setzero_pd(), underflow), inf,
                            overflow);
}

// Load the first `count` (< 4) lanes, zero-filling the rest.
inline __m256d load_partial(const double* src, std::size_t count)
{
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    std::copy_n(src, count, buf);
    return _mm256_load_pd(buf);
}

inline void store_partial(double* dst, __m256d v, std::size_t count)
{
    alignas(32) double buf[4];
    _mm256_store_pd(buf, v);
    std::copy_n(buf, count, dst);
}

inline double hmax(__m256d v)
{
    alignas(32) double buf[4];
    _mm256_store_pd(buf, v);
    return std::max(std::max(buf[0], buf[1]), std::max(buf[2], buf[3]));
}

}  // namespace

void exp(const double* x, double* out, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
    if (i < n)
        store_partial(out + i, exp_pd(load_partial(x + i, n - i)), n - i);
}

void decay_intensity(double base, double excitation, double decay,
                     const double* elapsed, double* out, std::size_t n)
{
    const __m256d vbase = _mm256_set1_pd(base);
    const __m256d vexc = _mm256_set1_pd(excitation);
    const __m256d vneg = _mm256_set1_pd(-decay);
    auto eval = [&](__m256d t) {
        return _mm256_fmadd_pd(vexc, exp_pd(_mm256_mul_pd(vneg, t)), vbase);
    };
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, eval(_mm256_loadu_pd(elapsed + i)));
    if (i < n)
        store_partial(out + i, eval(load_partial(elapsed + i, n - i)), n - i);
}

double exponential_ks_statistic(const double* sorted, std::size_t n)
{
    if (n == 0)
        return 0.0;
    const __m256d inv_n = _mm256_set1_pd(1.0 / static_cast<double>(n));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d neg_inf = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    const __m256d sign = _mm256_set1_pd(-0.0);

    __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    __m256d d_plus = _mm256_setzero_pd();
    __m256d d_minus = _mm256_setzero_pd();

    auto accumulate = [&](__m256d x, __m256d valid) {
        const __m256d cdf = _mm256_sub_pd(one, exp_pd(_mm256_xor_pd(x, sign)));
        __m256d above = _mm256_fmsub_pd(_mm256_add_pd(idx, one), inv_n, cdf);
        __m256d below = _mm256_fnmadd_pd(idx, inv_n, cdf);
        above = _mm256_blendv_pd(neg_inf, above, valid);
        below = _mm256_blendv_pd(neg_inf, below, valid);
        d_plus = _mm256_max_pd(d_plus, above);
        d_minus = _mm256_max_pd(d_minus, below);
        idx = _mm256_add_pd(idx, four);
    };

    const __m256d all = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        accumulate(_mm256_loadu_pd(sorted + i), all);
    if (i < n)
    {
        const __m256d limit = _mm256_set1_pd(static_cast<double>(n));
        accumulate(load_partial(sorted + i, n - i), _mm256_cmp_pd(idx, limit, _CMP_LT_OQ));
    }
    return std::max(hmax(d_plus), hmax(d_minus));
}

}  // namespace cdflab::kernels::avx2
