#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "subembed/errors.hpp"
#include "subembed/kernels.hpp"

using namespace subembed;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::vector<double> v(n);
    for (double& x : v) x = normal(rng);
    return v;
}

// Reassociation error bound for a length-n dot product.
double dot_tolerance(const std::vector<double>& x, const std::vector<double>& y) {
    double mag = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mag += std::abs(x[i] * y[i]);
    return 2.0 * static_cast<double>(x.size() + 1) * 1.1102230246251565e-16 * mag + 1e-300;
}

const kernels::Table* simd_table() {
    return kernels::cpu_has_avx2() ? kernels::avx2::table() : nullptr;
}

}  // namespace

TEST_CASE("scalar dot matches a long-double reference") {
    std::mt19937_64 rng(1);
    for (std::size_t n : {0u, 1u, 3u, 17u, 256u}) {
        const auto x = random_vector(n, rng);
        const auto y = random_vector(n, rng);
        long double ref = 0.0L;
        for (std::size_t i = 0; i < n; ++i) ref += static_cast<long double>(x[i]) * y[i];
        CHECK(std::abs(kernels::scalar::table().dot(x.data(), y.data(), n) - static_cast<double>(ref)) <=
              dot_tolerance(x, y));
    }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    const kernels::Table* simd = simd_table();
    if (simd == nullptr) {
        MESSAGE("AVX2 unavailable on this host; equivalence test skipped");
        return;
    }
    const kernels::Table& ref = kernels::scalar::table();
    std::mt19937_64 rng(7);

    SUBCASE("dot and squared_norm over every tail length") {
        for (std::size_t n = 0; n <= 70; ++n) {
            const auto x = random_vector(n, rng);
            const auto y = random_vector(n, rng);
            CHECK(std::abs(simd->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= dot_tolerance(x, y));
            CHECK(std::abs(simd->squared_norm(x.data(), n) - ref.squared_norm(x.data(), n)) <= dot_tolerance(x, x));
        }
    }

    SUBCASE("scale and axpy are exact elementwise") {
        for (std::size_t n : {0u, 1u, 5u, 8u, 33u}) {
            auto a = random_vector(n, rng);
            auto b = a;
            simd->scale(a.data(), 1.75, n);
            ref.scale(b.data(), 1.75, n);
            CHECK(a == b);

            const auto x = random_vector(n, rng);
            auto y1 = random_vector(n, rng);
            auto y2 = y1;
            simd->axpy(-0.5, x.data(), y1.data(), n);
            ref.axpy(-0.5, x.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (std::abs(y2[i]) + 1.0));
        }
    }

    SUBCASE("gemv and gemm_rc across ragged shapes") {
        for (std::size_t m : {1u, 3u, 4u, 7u, 27u})
            for (std::size_t n : {1u, 2u, 5u, 16u, 64u})
                for (std::size_t k : {1u, 3u}) {
                    const auto a = random_vector(m * n, rng);
                    const auto b = random_vector(n * k, rng);
                    std::vector<double> c1(m * k), c2(m * k);
                    simd->gemm_rc(a.data(), m, n, b.data(), k, c1.data());
                    ref.gemm_rc(a.data(), m, n, b.data(), k, c2.data());
                    for (std::size_t j = 0; j < k; ++j)
                        for (std::size_t i = 0; i < m; ++i) {
                            const std::vector<double> row(a.begin() + static_cast<long>(i * n),
                                                          a.begin() + static_cast<long>((i + 1) * n));
                            const std::vector<double> col(b.begin() + static_cast<long>(j * n),
                                                          b.begin() + static_cast<long>((j + 1) * n));
                            CHECK(std::abs(c1[j * m + i] - c2[j * m + i]) <= dot_tolerance(row, col));
                        }
                    std::vector<double> y1(m), y2(m);
                    simd->gemv(a.data(), m, n, b.data(), y1.data());
                    ref.gemv(a.data(), m, n, b.data(), y2.data());
                    for (std::size_t i = 0; i < m; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
                }
    }
}

TEST_CASE("gemm_rc computes A times B into column-major C") {
    // A = [[1, 2], [3, 4], [5, 6]], B columns (1, 0) and (1, 1).
    const std::vector<double> a{1, 2, 3, 4, 5, 6};
    const std::vector<double> b{1, 0, 1, 1};
    std::vector<double> c(6);
    kernels::gemm_rc(a.data(), 3, 2, b.data(), 2, c.data());
    CHECK(c == std::vector<double>{1, 3, 5, 3, 7, 11});
}

TEST_CASE("backend selection can be forced") {
    const kernels::Backend original = kernels::active_backend();
    kernels::set_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    CHECK(kernels::backend_name(kernels::Backend::scalar) == "scalar");
    if (simd_table() != nullptr) {
        kernels::set_backend(kernels::Backend::avx2);
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
    } else {
        CHECK_THROWS_AS(kernels::set_backend(kernels::Backend::avx2), ConfigError);
    }
    kernels::set_backend(original);
}
