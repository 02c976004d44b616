#include "subembed/kernels.hpp"

#if defined(SUBEMBED_HAVE_AVX2)

#include <immintrin.h>

namespace subembed::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double squared_norm(const double* x, std::size_t n) { return dot(x, x, n); }

void scale(double* x, double alpha, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), a));
    for (; i < n; ++i) x[i] *= alpha;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(a, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Four rows of A against one vector, sharing the loads of x.
inline void dot4(const double* a0, const double* a1, const double* a2, const double* a3,
                 const double* x, std::size_t n, double* out) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd();
    __m256d s3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + i), xv, s0);
        s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + i), xv, s1);
        s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + i), xv, s2);
        s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + i), xv, s3);
    }
    double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
    for (; i < n; ++i) {
        r0 += a0[i] * x[i];
        r1 += a1[i] * x[i];
        r2 += a2[i] * x[i];
        r3 += a3[i] * x[i];
    }
    out[0] = r0;
    out[1] = r1;
    out[2] = r2;
    out[3] = r3;
}

void gemv(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4)
        dot4(a + i * n, a + (i + 1) * n, a + (i + 2) * n, a + (i + 3) * n, x, n, y + i);
    for (; i < m; ++i) y[i] = dot(a + i * n, x, n);
}

void gemm_rc(const double* a, std::size_t m, std::size_t n, const double* b, std::size_t k,
             double* c) {
    for (std::size_t j = 0; j < k; ++j) gemv(a, m, n, b + j * n, c + j * m);
}

constexpr Table kTable{dot, squared_norm, scale, axpy, gemv, gemm_rc};

}  // namespace

const Table* table() noexcept { return &kTable; }

}  // namespace subembed::kernels::avx2

#else

namespace subembed::kernels::avx2 {
const Table* table() noexcept { return nullptr; }
}  // namespace subembed::kernels::avx2

#endif
