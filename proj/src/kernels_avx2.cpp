// AVX2 variant of the KDE kernel sum. Four samples per iteration: vectorized
// standardization, Hermite recurrence, exp, and per-lane Kahan accumulation.
// Lane sums are combined in a fixed order so the result is deterministic for a
// given sample order.
#ifdef OTD_HAVE_AVX2

#include <immintrin.h>

#include <cmath>

#include "otd/kernels.hpp"

namespace otd::kernels {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// exp(x) for x <= 0, accurate to ~1 ulp: x = n*ln2 + r with |r| <= ln2/2,
// exp(r) by a degree-13 Taylor polynomial, scaling by 2^n via the exponent bits.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d underflow = _mm256_set1_pd(-708.0);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    const double c[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                        1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                        1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                        1.0 / 24.0,         1.0 / 6.0,         0.5,
                        1.0,                1.0};
    __m256d p = _mm256_set1_pd(c[0]);
    for (int i = 1; i < 14; ++i)
        p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

    // scale by 2^n
    __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i nl = _mm256_cvtepi32_epi64(ni);
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(nl, _mm256_set1_epi64x(1023)), 52);
    p = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));

    __m256d mask = _mm256_cmp_pd(x, underflow, _CMP_LT_OQ);
    return _mm256_andnot_pd(mask, p);
}

}  // namespace

double kde_kernel_sum_avx2(std::span<const double> xs, int m, double b, double y) {
    const size_t n = xs.size();
    const __m256d vy = _mm256_set1_pd(y);
    const __m256d vinvb = _mm256_set1_pd(1.0 / b);
    const __m256d vhalf = _mm256_set1_pd(-0.5);
    const __m256d vnorm = _mm256_set1_pd((m % 2 == 0 ? 1.0 : -1.0) * kInvSqrt2Pi);

    __m256d sum = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(xs.data() + i);
        __m256d z = _mm256_mul_pd(_mm256_sub_pd(vy, x), vinvb);
        __m256d he;
        if (m == 0) {
            he = _mm256_set1_pd(1.0);
        } else {
            __m256d prev = _mm256_set1_pd(1.0);
            __m256d cur = z;
            for (int k = 1; k < m; ++k) {
                __m256d next = _mm256_fmsub_pd(z, cur, _mm256_mul_pd(_mm256_set1_pd(double(k)), prev));
                prev = cur;
                cur = next;
            }
            he = cur;
        }
        __m256d e = exp_pd(_mm256_mul_pd(vhalf, _mm256_mul_pd(z, z)));
        __m256d v = _mm256_mul_pd(_mm256_mul_pd(vnorm, he), e);

        // branchless Neumaier update per lane
        __m256d t = _mm256_add_pd(sum, v);
        const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
        __m256d big_sum = _mm256_cmp_pd(_mm256_and_pd(sum, absmask),
                                        _mm256_and_pd(v, absmask), _CMP_GE_OQ);
        __m256d corr_a = _mm256_add_pd(_mm256_sub_pd(sum, t), v);
        __m256d corr_b = _mm256_add_pd(_mm256_sub_pd(v, t), sum);
        comp = _mm256_add_pd(comp, _mm256_blendv_pd(corr_b, corr_a, big_sum));
        sum = t;
    }

    alignas(32) double ls[4], lc[4];
    _mm256_store_pd(ls, sum);
    _mm256_store_pd(lc, comp);
    double total = ((ls[0] + ls[1]) + (ls[2] + ls[3])) + ((lc[0] + lc[1]) + (lc[2] + lc[3]));
    if (i < n) total += kde_kernel_sum_scalar(xs.subspan(i), m, b, y);
    return total;
}

}  // namespace otd::kernels

#endif  // OTD_HAVE_AVX2
