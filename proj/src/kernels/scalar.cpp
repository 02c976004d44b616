#include "subembed/kernels.hpp"

namespace subembed::kernels::scalar {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double squared_norm(const double* x, std::size_t n) { return dot(x, x, n); }

void scale(double* x, double alpha, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] = dot(a + i * n, x, n);
}

void gemm_rc(const double* a, std::size_t m, std::size_t n, const double* b, std::size_t k,
             double* c) {
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < m; ++i) c[j * m + i] = dot(a + i * n, b + j * n, n);
}

constexpr Table kTable{dot, squared_norm, scale, axpy, gemv, gemm_rc};

}  // namespace

const Table& table() noexcept { return kTable; }

}  // namespace subembed::kernels::scalar
