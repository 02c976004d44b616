#include "subembed/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "subembed/errors.hpp"
#include "subembed/kernels.hpp"
#include "subembed/rng.hpp"
#include "subembed/stats.hpp"

namespace subembed {

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

EnsembleSpec EnsembleSpec::gaussian() { return {}; }

EnsembleSpec EnsembleSpec::sphere_scaled() {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::sphere_scaled;
    return spec;
}

EnsembleSpec EnsembleSpec::iid_uniform() {
    EnsembleSpec spec;
    spec.kind = EnsembleKind::iid_bounded;
    spec.density_bound = 1.0 / (2.0 * kSqrt3);
    spec.entry_psi2 = 2.0 * kSqrt3;
    return spec;
}

std::string_view kind_name(EnsembleKind kind) noexcept {
    switch (kind) {
        case EnsembleKind::gaussian: return "gaussian";
        case EnsembleKind::sphere_scaled: return "sphere";
        case EnsembleKind::iid_bounded: return "iid_bounded";
    }
    return "unknown";
}

EnsembleKind parse_kind(std::string_view name) {
    if (name == "gaussian") return EnsembleKind::gaussian;
    if (name == "sphere" || name == "sphere_scaled") return EnsembleKind::sphere_scaled;
    if (name == "iid_bounded") return EnsembleKind::iid_bounded;
    throw ConfigError("unknown ensemble kind '" + std::string(name) + "'");
}

std::string_view source_name(ConstantSource source) noexcept {
    return source == ConstantSource::closed_form ? "closed_form" : "empirical";
}

void validate(const EnsembleSpec& spec) {
    if (spec.kind != EnsembleKind::iid_bounded) return;
    if (!(spec.density_bound > 0.0) || !std::isfinite(spec.density_bound))
        throw ConfigError("iid_bounded ensemble needs density_bound > 0");
    if (!(spec.entry_psi2 > 0.0) || !std::isfinite(spec.entry_psi2))
        throw ConfigError("iid_bounded ensemble needs entry_psi2 > 0");
}

double entry_support(const EnsembleSpec& spec) {
    switch (spec.entry) {
        case EntryDistribution::uniform_unit_variance: return kSqrt3;
    }
    return kSqrt3;
}

void sample_row_into(const EnsembleSpec& spec, std::uint64_t seed, std::span<double> out) {
    validate(spec);
    Engine engine = make_engine(seed);
    switch (spec.kind) {
        case EnsembleKind::gaussian: {
            std::normal_distribution<double> normal;
            for (double& x : out) x = normal(engine);
            break;
        }
        case EnsembleKind::sphere_scaled: {
            std::normal_distribution<double> normal;
            double norm2 = 0.0;
            // A zero Gaussian vector has probability zero; redraw anyway.
            while (norm2 == 0.0) {
                for (double& x : out) x = normal(engine);
                norm2 = kernels::squared_norm(out.data(), out.size());
            }
            kernels::scale(out.data(), std::sqrt(static_cast<double>(out.size()) / norm2), out.size());
            break;
        }
        case EnsembleKind::iid_bounded: {
            const double a = entry_support(spec);
            std::uniform_real_distribution<double> uniform(-a, a);
            for (double& x : out) x = uniform(engine);
            break;
        }
    }
}

std::vector<double> sample_row(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InputError("sample_row needs n >= 1");
    std::vector<double> row(n);
    sample_row_into(spec, seed, row);
    return row;
}

RandomMatrix sample_matrix(const EnsembleSpec& spec, std::size_t m, std::size_t n, std::uint64_t seed,
                           std::size_t entry_budget) {
    if (m == 0 || n == 0) throw InputError("sample_matrix needs m, n >= 1");
    validate(spec);
    if (n > entry_budget / m)
        throw ResourceError("matrix of " + std::to_string(m) + "x" + std::to_string(n) +
                            " entries exceeds the budget of " + std::to_string(entry_budget));
    RandomMatrix out;
    out.rows = m;
    out.cols = n;
    out.entries.resize(m * n);
    out.ensemble = spec;
    out.seed = seed;
    for (std::size_t i = 0; i < m; ++i)
        sample_row_into(spec, derive(seed, i), std::span<double>(out.row(i), n));
    return out;
}

namespace {

// Worst observed C_eps / eps over e_1 and random unit directions.
double empirical_alpha(const EnsembleSpec& spec, const EmpiricalAlphaOptions& opt) {
    const std::size_t n = std::max<std::size_t>(opt.dim, 1);
    std::vector<double> direction(n);
    std::vector<double> projections(opt.samples);
    std::vector<double> row(n);
    double worst = 0.0;
    for (std::size_t d = 0; d < std::max<std::size_t>(opt.directions, 1); ++d) {
        if (d == 0) {
            std::fill(direction.begin(), direction.end(), 0.0);
            direction[0] = 1.0;
        } else {
            direction = sample_row(EnsembleSpec::sphere_scaled(), n, derive(opt.seed, d));
            kernels::scale(direction.data(), 1.0 / std::sqrt(static_cast<double>(n)), n);
        }
        const std::uint64_t row_seed = derive(opt.seed ^ stream::probe, d);
        for (std::size_t s = 0; s < opt.samples; ++s) {
            sample_row_into(spec, derive(row_seed, s), row);
            projections[s] = kernels::dot(row.data(), direction.data(), n);
        }
        for (double eps : opt.epsilons) {
            const ConcentrationEstimate c = concentration_estimate(projections, eps);
            worst = std::max(worst, c.value / eps);
        }
    }
    return worst;
}

}  // namespace

EnsembleConstants theoretical_constants(const EnsembleSpec& spec, const EmpiricalAlphaOptions& options) {
    validate(spec);
    switch (spec.kind) {
        case EnsembleKind::gaussian:
            return {std::sqrt(2.0 / std::numbers::pi), std::sqrt(8.0 / 3.0), ConstantSource::closed_form,
                    ConstantSource::closed_form};
        case EnsembleKind::sphere_scaled:
            return {2.0, 4.0, ConstantSource::closed_form, ConstantSource::closed_form};
        case EnsembleKind::iid_bounded:
            // Independent entries with psi_2 norm b give rows with constant 4b.
            return {empirical_alpha(spec, options), 4.0 * spec.entry_psi2, ConstantSource::empirical,
                    ConstantSource::closed_form};
    }
    return {};
}

}  // namespace subembed
