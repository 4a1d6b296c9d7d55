// Compiled with -mavx2 (and without -mfma); only reached after a runtime check.
#include <immintrin.h>

#include <cmath>

#include "itr/kernels/kernels.hpp"

namespace itr::kernels {
namespace {

void partial_residual(const double* latent, const double* total, const double* tree, double* out,
                      std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d z = _mm256_loadu_pd(latent + i);
        __m256d g = _mm256_loadu_pd(total + i);
        __m256d f = _mm256_loadu_pd(tree + i);
        _mm256_storeu_pd(out + i, _mm256_sub_pd(z, _mm256_sub_pd(g, f)));
    }
    for (; i < n; ++i) out[i] = latent[i] - (total[i] - tree[i]);
}

void apply_delta(double* total, const double* fresh, const double* stale, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d g = _mm256_loadu_pd(total + i);
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(fresh + i), _mm256_loadu_pd(stale + i));
        _mm256_storeu_pd(total + i, _mm256_add_pd(g, d));
    }
    for (; i < n; ++i) total[i] = total[i] + (fresh[i] - stale[i]);
}

void joint_po(const double* p1, const double* p0, double rho, double* t11, double* t10,
              double* t01, double* t00, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d r = _mm256_set1_pd(rho);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a1 = _mm256_loadu_pd(p1 + i);
        __m256d a0 = _mm256_loadu_pd(p0 + i);
        __m256d v1 = _mm256_mul_pd(a1, _mm256_sub_pd(one, a1));
        __m256d v0 = _mm256_mul_pd(a0, _mm256_sub_pd(one, a0));
        __m256d both = _mm256_add_pd(_mm256_mul_pd(r, _mm256_sqrt_pd(_mm256_mul_pd(v1, v0))),
                                     _mm256_mul_pd(a1, a0));
        __m256d only1 = _mm256_sub_pd(a1, both);
        __m256d only0 = _mm256_sub_pd(a0, both);
        __m256d none = _mm256_sub_pd(_mm256_sub_pd(_mm256_sub_pd(one, both), only1), only0);
        _mm256_storeu_pd(t11 + i, both);
        _mm256_storeu_pd(t10 + i, only1);
        _mm256_storeu_pd(t01 + i, only0);
        _mm256_storeu_pd(t00 + i, none);
    }
    for (; i < n; ++i) {
        const double a = p1[i] * (1.0 - p1[i]);
        const double b = p0[i] * (1.0 - p0[i]);
        const double both = rho * std::sqrt(a * b) + p1[i] * p0[i];
        t11[i] = both;
        t10[i] = p1[i] - both;
        t01[i] = p0[i] - both;
        t00[i] = ((1.0 - both) - t10[i]) - t01[i];
    }
}

void expected_loss(const double* t00, const double* t01, const double* t10, const double* t11,
                   const double* l, double* out, std::size_t n) {
    const __m256d l0 = _mm256_set1_pd(l[0]);
    const __m256d l1 = _mm256_set1_pd(l[1]);
    const __m256d l2 = _mm256_set1_pd(l[2]);
    const __m256d l3 = _mm256_set1_pd(l[3]);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d s = _mm256_add_pd(_mm256_mul_pd(l0, _mm256_loadu_pd(t00 + i)),
                                  _mm256_mul_pd(l1, _mm256_loadu_pd(t01 + i)));
        s = _mm256_add_pd(s, _mm256_mul_pd(l2, _mm256_loadu_pd(t10 + i)));
        s = _mm256_add_pd(s, _mm256_mul_pd(l3, _mm256_loadu_pd(t11 + i)));
        _mm256_storeu_pd(out + i, s);
    }
    for (; i < n; ++i)
        out[i] = ((l[0] * t00[i] + l[1] * t01[i]) + l[2] * t10[i]) + l[3] * t11[i];
}

void count_less(const double* a, const double* b, double* counts, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), _CMP_LT_OQ);
        __m256d c = _mm256_loadu_pd(counts + i);
        _mm256_storeu_pd(counts + i, _mm256_add_pd(c, _mm256_and_pd(mask, one)));
    }
    for (; i < n; ++i)
        if (a[i] < b[i]) counts[i] += 1.0;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, v);
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

double horizontal_sum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1,
                             _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double s = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

}  // namespace

const Table& avx2_table_unchecked() {
    static const Table t{Isa::avx2, partial_residual, apply_delta, joint_po, expected_loss,
                         count_less, axpy,             dot,         sum};
    return t;
}

}  // namespace itr::kernels
