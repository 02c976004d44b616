#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "subembed/geometry.hpp"

namespace subembed {

struct Psi2Estimate {
    double value = 0.0;
    std::size_t sample_count = 0;
};

struct ConcentrationEstimate {
    double epsilon = 0.0;
    double value = 0.0;
    std::size_t sample_count = 0;
};

struct WidthEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_draws = 0;
};

inline constexpr std::size_t kMinPsi2Samples = 1000;

// Smallest C with mean(exp(X^2 / C^2)) <= 2 over the samples, by bisection to
// relative tolerance 1e-4. Scale-equivariant: the search runs on |X| / max|X|.
Psi2Estimate psi2_estimate(std::span<const double> samples);

// sup over L of the fraction of samples in (L - eps, L + eps).
ConcentrationEstimate concentration_estimate(std::span<const double> samples, double epsilon);

// min(1, (6 alpha)^m lambda^{m/2}).
double small_ball_bound(double alpha, std::size_t m, double lambda);

// True iff Pr(|X| > t) <= 2 exp(-t^2 / beta^2) holds empirically at
// t = 0.5, 1, ..., 3 with three binomial standard errors of slack.
bool psi2_tail_check(std::span<const double> samples, double beta);

// Monte Carlo estimate of E max_l |P_{W_l} g| for standard Gaussian g, which
// equals E sup over the union of unit spheres of <x, g>.
WidthEstimate gaussian_width_mc(const SubspaceFamily& family, std::size_t n_draws, std::uint64_t seed,
                                unsigned parallelism = 1);

// 3 (sqrt(ln p) + sqrt(k) + r (sqrt(ln p) + sqrt(n - k))).
double width_upper_bound(std::size_t k, std::size_t p, double r, std::size_t n);

// ceil(5 (k + ln p / ln D)).
std::size_t required_m(std::size_t k, std::size_t p, double D);

// max(0, 1 - 2 D^{-m/5}).
double success_prob_bound(double D, std::size_t m);

// Sample mean and its standard error.
struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};
MeanEstimate mean_and_error(std::span<const double> values);

}  // namespace subembed
