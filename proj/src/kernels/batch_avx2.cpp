// SPDX-License-Identifier: Apache-2.0

// AVX2 variants of the batch kinematic kernels. Every arithmetic step
// mirrors the scalar core in the same order using only correctly-rounded
// operations (+,-,*,/,sqrt,floor,compare,blend), so results are bitwise
// identical to the scalar kernels; the equivalence tests assert exactly
// that. Compiled with -mavx2 only (no -mfma: contraction would break the
// bitwise contract).

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "everkin/kernels/batch.hpp"

namespace everkin::kernels::detail {

namespace {

inline __m256d select(__m256d if_false, __m256d if_true, __m256d mask) {
    return _mm256_blendv_pd(if_false, if_true, mask);
}

}  // namespace

void forward_avx2(const double* p1, const double* p2, const double* p3,
                  std::size_t n, double k, double* alpha, double* theta) {
    const __m256d kv = _mm256_set1_pd(k);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d c120 = _mm256_set1_pd(120.0);
    const __m256d c240 = _mm256_set1_pd(240.0);
    const __m256d c360 = _mm256_set1_pd(360.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(p1 + i);
        __m256d b = _mm256_loadu_pd(p2 + i);
        __m256d c = _mm256_loadu_pd(p3 + i);

        // ((a*a - a*b) + b*b) + c*((c - b) - a)
        __m256d q = _mm256_add_pd(
            _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(a, b)),
                          _mm256_mul_pd(b, b)),
            _mm256_mul_pd(c, _mm256_sub_pd(_mm256_sub_pd(c, b), a)));
        _mm256_storeu_pd(alpha + i, _mm256_mul_pd(kv, _mm256_sqrt_pd(q)));

        __m256d w1 = select(zero, c360, _mm256_cmp_pd(c, zero, _CMP_GT_OQ));
        __m256d num = _mm256_add_pd(
            _mm256_add_pd(_mm256_mul_pd(w1, a), _mm256_mul_pd(c120, b)),
            _mm256_mul_pd(c240, c));
        __m256d den = _mm256_add_pd(_mm256_add_pd(a, b), c);
        __m256d th = _mm256_div_pd(num, den);
        th = select(th, _mm256_sub_pd(th, c360),
                    _mm256_cmp_pd(th, c360, _CMP_GE_OQ));
        th = select(zero, th, _mm256_cmp_pd(den, zero, _CMP_GT_OQ));
        _mm256_storeu_pd(theta + i, th);
    }
    if (i < n)
        forward_scalar(p1 + i, p2 + i, p3 + i, n - i, k, alpha + i, theta + i);
}

void inverse_avx2(const double* alpha, const double* theta, std::size_t n,
                  double k, double* p1, double* p2, double* p3) {
    const __m256d kv = _mm256_set1_pd(k);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d three = _mm256_set1_pd(3.0);
    const __m256d c120 = _mm256_set1_pd(120.0);
    const __m256d c360 = _mm256_set1_pd(360.0);
    const __m256d two = _mm256_set1_pd(2.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d al = _mm256_loadu_pd(alpha + i);
        __m256d th = _mm256_loadu_pd(theta + i);

        // wrap into [0, 360)
        __m256d w = _mm256_sub_pd(
            th, _mm256_mul_pd(c360, _mm256_floor_pd(_mm256_div_pd(th, c360))));
        w = select(w, _mm256_sub_pd(w, c360),
                   _mm256_cmp_pd(w, c360, _CMP_GE_OQ));

        __m256d s = _mm256_floor_pd(_mm256_div_pd(w, c120));
        __m256d t = _mm256_div_pd(_mm256_sub_pd(w, _mm256_mul_pd(c120, s)), c120);

        // (1 - 3t) + (3t)*t
        __m256d three_t = _mm256_mul_pd(three, t);
        __m256d disc = _mm256_add_pd(_mm256_sub_pd(one, three_t),
                                     _mm256_mul_pd(three_t, t));
        __m256d scale = _mm256_div_pd(al, _mm256_mul_pd(kv, _mm256_sqrt_pd(disc)));
        __m256d lead = _mm256_mul_pd(_mm256_sub_pd(one, t), scale);
        __m256d trail = _mm256_mul_pd(t, scale);

        __m256d m0 = _mm256_cmp_pd(s, zero, _CMP_EQ_OQ);
        __m256d m1 = _mm256_cmp_pd(s, one, _CMP_EQ_OQ);
        __m256d m2 = _mm256_cmp_pd(s, two, _CMP_EQ_OQ);

        _mm256_storeu_pd(p1 + i, select(select(zero, trail, m2), lead, m0));
        _mm256_storeu_pd(p2 + i, select(select(zero, trail, m0), lead, m1));
        _mm256_storeu_pd(p3 + i, select(select(zero, trail, m1), lead, m2));
    }
    if (i < n)
        inverse_scalar(alpha + i, theta + i, n - i, k, p1 + i, p2 + i, p3 + i);
}

}  // namespace everkin::kernels::detail

#endif  // x86_64
