#include "subembed/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "subembed/errors.hpp"
#include "subembed/kernels.hpp"
#include "subembed/parallel.hpp"
#include "subembed/rng.hpp"

namespace subembed {

namespace {

double mean_exp(const std::vector<double>& squares, double inv_c2) {
    double s = 0.0;
    for (double y2 : squares) s += std::exp(y2 * inv_c2);
    return s / static_cast<double>(squares.size());
}

}  // namespace

Psi2Estimate psi2_estimate(std::span<const double> samples) {
    if (samples.empty()) throw InputError("psi2_estimate: empty sample");
    if (samples.size() < kMinPsi2Samples)
        throw InputError("psi2_estimate needs at least " + std::to_string(kMinPsi2Samples) + " samples");
    Psi2Estimate out;
    out.sample_count = samples.size();
    double peak = 0.0;
    for (double x : samples) peak = std::max(peak, std::abs(x));
    if (peak == 0.0) return out;

    std::vector<double> squares(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double y = samples[i] / peak;
        squares[i] = y * y;
    }
    const double n = static_cast<double>(samples.size());
    // At lo the largest term alone contributes 2N / N = 2.
    double lo = 1.0 / std::sqrt(std::log(2.0 * n));
    double hi = 10.0;
    while (mean_exp(squares, 1.0 / (hi * hi)) > 2.0) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-4 * lo) {
        const double mid = 0.5 * (lo + hi);
        if (mean_exp(squares, 1.0 / (mid * mid)) <= 2.0)
            hi = mid;
        else
            lo = mid;
    }
    out.value = hi * peak;
    return out;
}

ConcentrationEstimate concentration_estimate(std::span<const double> samples, double epsilon) {
    if (!(epsilon > 0.0)) throw InputError("concentration_estimate needs epsilon > 0");
    if (samples.empty()) throw InputError("concentration_estimate: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double width = 2.0 * epsilon;
    std::size_t best = 0;
    std::size_t lo = 0;
    for (std::size_t hi = 0; hi < sorted.size(); ++hi) {
        while (sorted[hi] - sorted[lo] >= width) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    ConcentrationEstimate out;
    out.epsilon = epsilon;
    out.sample_count = sorted.size();
    out.value = static_cast<double>(best) / static_cast<double>(sorted.size());
    return out;
}

double small_ball_bound(double alpha, std::size_t m, double lambda) {
    if (!(alpha > 0.0) || !(lambda > 0.0) || m == 0)
        throw InputError("small_ball_bound needs alpha > 0, lambda > 0, m >= 1");
    const double md = static_cast<double>(m);
    const double log_bound = md * std::log(6.0 * alpha) + 0.5 * md * std::log(lambda);
    return log_bound >= 0.0 ? 1.0 : std::exp(log_bound);
}

bool psi2_tail_check(std::span<const double> samples, double beta) {
    if (samples.empty()) throw InputError("psi2_tail_check: empty sample");
    if (!(beta > 0.0)) throw InputError("psi2_tail_check needs beta > 0");
    constexpr std::array<double, 6> kLevels{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    const double n = static_cast<double>(samples.size());
    for (double t : kLevels) {
        const double bound = std::min(1.0, 2.0 * std::exp(-(t * t) / (beta * beta)));
        const auto exceed = std::count_if(samples.begin(), samples.end(), [t](double x) { return std::abs(x) > t; });
        const double empirical = static_cast<double>(exceed) / n;
        const double se = std::sqrt(bound * (1.0 - bound) / n);
        if (empirical > bound + 3.0 * se) return false;
    }
    return true;
}

MeanEstimate mean_and_error(std::span<const double> values) {
    MeanEstimate out;
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

WidthEstimate gaussian_width_mc(const SubspaceFamily& family, std::size_t n_draws, std::uint64_t seed,
                                unsigned parallelism) {
    if (n_draws == 0) throw InputError("gaussian_width_mc needs n_draws >= 1");
    const std::size_t n = family.ambient_dim();
    std::vector<double> values(n_draws);
    parallel_for(n_draws, parallelism, [&](std::size_t d) {
        Engine engine = make_engine(derive(seed, d));
        std::normal_distribution<double> normal;
        std::vector<double> g(n);
        for (double& x : g) x = normal(engine);
        std::vector<double> coords;
        double best = 0.0;
        for (const auto& member : family.members()) {
            const Subspace& w = member.direction;
            coords.resize(w.dim());
            // B^T g, with g as a 1 x n row against the column-major basis.
            kernels::gemm_rc(g.data(), 1, n, w.basis().data(), w.dim(), coords.data());
            best = std::max(best, kernels::squared_norm(coords.data(), coords.size()));
        }
        values[d] = std::sqrt(best);
    });
    const MeanEstimate est = mean_and_error(values);
    return {est.mean, est.std_error, n_draws};
}

double width_upper_bound(std::size_t k, std::size_t p, double r, std::size_t n) {
    if (k < 1 || k > n || p < 1) throw InputError("width_upper_bound needs 1 <= k <= n and p >= 1");
    if (!(r >= 0.0 && r < 1.0)) throw InputError("width_upper_bound needs 0 <= r < 1");
    const double sl = std::sqrt(std::log(static_cast<double>(p)));
    return 3.0 * (sl + std::sqrt(static_cast<double>(k)) + r * (sl + std::sqrt(static_cast<double>(n - k))));
}

std::size_t required_m(std::size_t k, std::size_t p, double D) {
    if (!(D > 1.0)) throw InputError("required_m needs D > 1");
    if (k < 1 || p < 1) throw InputError("required_m needs k >= 1 and p >= 1");
    const double value = 5.0 * (static_cast<double>(k) + std::log(static_cast<double>(p)) / std::log(D));
    // Round-off in the log ratio must not push exact integers up by one.
    return static_cast<std::size_t>(std::ceil(value * (1.0 - 1e-12)));
}

double success_prob_bound(double D, std::size_t m) {
    if (!(D > 1.0) || m == 0) throw InputError("success_prob_bound needs D > 1 and m >= 1");
    return std::max(0.0, 1.0 - 2.0 * std::pow(D, -static_cast<double>(m) / 5.0));
}

}  // namespace subembed
