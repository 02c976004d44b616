#pragma once

// Dense double-precision inner loops. Every kernel has a portable scalar
// reference in kernels::scalar; an AVX2+FMA variant is selected at runtime
// when the CPU supports it. Results of the two backends agree to within
// floating-point reassociation error, not bitwise.

#include <cstddef>
#include <string_view>

namespace subembed::kernels {

enum class Backend { scalar, avx2 };

struct Table {
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*squared_norm)(const double* x, std::size_t n);
    void (*scale)(double* x, double alpha, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y[i] = sum_j a[i*n + j] * x[j] for a row-major m x n matrix.
    void (*gemv)(const double* a, std::size_t m, std::size_t n, const double* x, double* y);
    // c(:, j) = A * b(:, j); A row-major m x n, b and c column-major
    // (n x k and m x k).
    void (*gemm_rc)(const double* a, std::size_t m, std::size_t n, const double* b,
                    std::size_t k, double* c);
};

namespace scalar {
const Table& table() noexcept;
}

namespace avx2 {
// Null when the binary was built without AVX2 support.
const Table* table() noexcept;
}

bool cpu_has_avx2() noexcept;

// Currently dispatched backend. Defaults to the fastest supported one unless
// SUBEMBED_KERNELS=scalar is set in the environment.
Backend active_backend() noexcept;
const Table& active() noexcept;
const Table& table_for(Backend backend);

// Forces a backend; throws ConfigError if it is unavailable here.
void set_backend(Backend backend);

std::string_view backend_name(Backend backend) noexcept;

inline double dot(const double* x, const double* y, std::size_t n) {
    return active().dot(x, y, n);
}
inline double squared_norm(const double* x, std::size_t n) {
    return active().squared_norm(x, n);
}
inline void scale(double* x, double alpha, std::size_t n) { active().scale(x, alpha, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
inline void gemv(const double* a, std::size_t m, std::size_t n, const double* x, double* y) {
    active().gemv(a, m, n, x, y);
}
inline void gemm_rc(const double* a, std::size_t m, std::size_t n, const double* b, std::size_t k,
                    double* c) {
    active().gemm_rc(a, m, n, b, k, c);
}

}  // namespace subembed::kernels
