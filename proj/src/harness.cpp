#include "subembed/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "subembed/errors.hpp"
#include "subembed/io.hpp"
#include "subembed/parallel.hpp"
#include "subembed/rng.hpp"

namespace subembed {

std::string_view family_kind_name(FamilyKind kind) noexcept {
    switch (kind) {
        case FamilyKind::haar_random: return "haar_random";
        case FamilyKind::k_sparse: return "k_sparse";
        case FamilyKind::user_file: return "user_file";
    }
    return "unknown";
}

FamilyKind parse_family_kind(std::string_view name) {
    if (name == "haar_random") return FamilyKind::haar_random;
    if (name == "k_sparse") return FamilyKind::k_sparse;
    if (name == "user_file") return FamilyKind::user_file;
    throw ConfigError("unknown family_kind '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& config) {
    if (config.family_kind != FamilyKind::user_file && (config.k < 1 || config.k > config.n))
        throw ConfigError("config needs 1 <= k <= n");
    if (config.p < 1) throw ConfigError("config needs p >= 1");
    if (config.trials < 1) throw ConfigError("config needs trials >= 1");
    if (!(config.D > 1.0) || !std::isfinite(config.D)) throw ConfigError("config needs a finite D > 1");
    if (config.m_override && *config.m_override < 1) throw ConfigError("m_override must be >= 1");
    if (config.family_kind == FamilyKind::user_file && config.family_path.empty())
        throw ConfigError("family_kind user_file needs family_path");
    validate(config.ensemble);
}

std::size_t trial_dimension(const ExperimentConfig& config) {
    return config.m_override ? *config.m_override : required_m(config.k, config.p, config.D);
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t result = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t num = n - k + i;
        // result * num / i is exact at every step; guard the product.
        if (result > std::numeric_limits<std::size_t>::max() / num) return std::numeric_limits<std::size_t>::max();
        result = result * num / i;
    }
    return result;
}

SubspaceFamily k_sparse_family(std::size_t n, std::size_t k, std::size_t p, std::uint64_t seed) {
    if (k < 1 || k > n) throw InputError("k_sparse_family needs 1 <= k <= n");
    if (p < 1) throw InputError("k_sparse_family needs p >= 1");
    const std::size_t count = std::min(p, binomial(n, k));
    if (count > kDefaultFamilyBudget) throw ResourceError("k-sparse family larger than the family budget");
    Engine engine = make_engine(seed);
    std::vector<std::size_t> pool(n);
    std::set<std::vector<std::size_t>> seen;
    std::vector<Subspace> members;
    members.reserve(count);
    while (members.size() < count) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(pool[i], pool[pick(engine)]);
        }
        std::vector<std::size_t> support(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(support.begin(), support.end());
        if (seen.insert(support).second) members.push_back(sparse_subspace(n, support));
    }
    return SubspaceFamily::linear(std::move(members));
}

SubspaceFamily haar_family(std::size_t n, std::size_t k, std::size_t p, std::uint64_t seed) {
    std::vector<Subspace> members;
    members.reserve(p);
    for (std::size_t l = 0; l < p; ++l) members.push_back(random_subspace(n, k, derive(seed, l)));
    return SubspaceFamily::linear(std::move(members));
}

SubspaceFamily build_family(const ExperimentConfig& config, std::size_t trial_index) {
    const std::uint64_t base = derive(config.seed, stream::family);
    switch (config.family_kind) {
        case FamilyKind::haar_random:
            return haar_family(config.n, config.k, config.p, config.quenched ? base : derive(base, trial_index + 1));
        case FamilyKind::k_sparse:
            return k_sparse_family(config.n, config.k, config.p, base);
        case FamilyKind::user_file:
            return io::load_family_json(config.family_path);
    }
    throw ConfigError("unknown family kind");
}

std::uint64_t trial_matrix_seed(const ExperimentConfig& config, std::size_t trial_index) {
    return derive(derive(config.seed, stream::matrix), trial_index);
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index, const SubspaceFamily& family,
                      std::size_t m) {
    const auto start = std::chrono::steady_clock::now();
    const RandomMatrix gamma =
        sample_matrix(config.ensemble, m, family.ambient_dim(), trial_matrix_seed(config, trial_index));
    const DistortionReport report = family_distortion(gamma, reduce_affine(family));
    const ScaleChoice scale = choose_scale(report, config.D);
    TrialResult out;
    out.trial_index = trial_index;
    out.m_used = m;
    out.feasible = scale.feasible;
    out.achieved_distortion = report.achieved_distortion;
    out.L = scale.L;
    out.family_sigma_min = report.family_sigma_min;
    out.family_sigma_max = report.family_sigma_max;
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index) {
    validate(config);
    return run_trial(config, trial_index, build_family(config, trial_index), trial_dimension(config));
}

namespace {

bool family_is_fixed(const ExperimentConfig& config) {
    return config.family_kind != FamilyKind::haar_random || config.quenched;
}

// Trials at dimension m, reusing one family when it does not vary per trial.
std::vector<TrialResult> trials_at(const ExperimentConfig& config, std::size_t m) {
    std::vector<TrialResult> results(config.trials);
    if (family_is_fixed(config)) {
        const SubspaceFamily family = build_family(config, 0);
        parallel_for(config.trials, config.parallelism,
                     [&](std::size_t t) { results[t] = run_trial(config, t, family, m); });
    } else {
        parallel_for(config.trials, config.parallelism,
                     [&](std::size_t t) { results[t] = run_trial(config, t, build_family(config, t), m); });
    }
    return results;
}

}  // namespace

std::vector<TrialResult> run_trials(const ExperimentConfig& config) {
    validate(config);
    return trials_at(config, trial_dimension(config));
}

std::vector<double> isotonic_increasing(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size()) throw InputError("isotonic_increasing: size mismatch");
    struct Block {
        double mean;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        blocks.push_back({values[i], weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& prev = blocks.back();
            const double w = prev.weight + top.weight;
            prev.mean = w > 0.0 ? (prev.mean * prev.weight + top.mean * top.weight) / w
                                : 0.5 * (prev.mean + top.mean);
            prev.weight = w;
            prev.count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

SweepResult sweep_m(const ExperimentConfig& config, const std::vector<std::size_t>& m_values, double target_rate) {
    validate(config);
    if (m_values.empty()) throw InputError("sweep_m needs at least one m value");
    if (!(target_rate > 0.0 && target_rate < 1.0)) throw InputError("sweep_m needs target_rate in (0, 1)");
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        if (m_values[i] < 1) throw InputError("sweep_m: m values must be >= 1");
        if (i > 0 && m_values[i] <= m_values[i - 1]) throw InputError("sweep_m: m values must be strictly increasing");
    }
    SweepResult sweep;
    sweep.target_rate = target_rate;
    std::vector<double> rates, weights;
    for (std::size_t m : m_values) {
        const std::vector<TrialResult> results = trials_at(config, m);
        SweepPoint pt;
        pt.m = m;
        pt.trials = results.size();
        double total = 0.0;
        for (const auto& r : results) {
            if (r.feasible) ++pt.successes;
            total += r.achieved_distortion;
        }
        pt.success_rate = static_cast<double>(pt.successes) / static_cast<double>(pt.trials);
        pt.mean_achieved_distortion = total / static_cast<double>(pt.trials);
        rates.push_back(pt.success_rate);
        weights.push_back(static_cast<double>(pt.trials));
        sweep.points.push_back(pt);
    }
    const std::vector<double> smoothed = isotonic_increasing(rates, weights);
    for (std::size_t i = 0; i < smoothed.size(); ++i) {
        sweep.points[i].smoothed_rate = smoothed[i];
        if (!sweep.minimal_m && smoothed[i] >= target_rate) sweep.minimal_m = sweep.points[i].m;
    }
    return sweep;
}

EmbedResult metric_embed(const std::vector<Eigen::VectorXd>& points, double D, const EnsembleSpec& ensemble,
                         std::uint64_t seed, std::optional<std::size_t> m_override) {
    if (points.size() < 2) throw InputError("metric_embed needs at least two points");
    if (!(D >= 1.0)) throw InputError("metric_embed needs D >= 1");
    const std::size_t n = static_cast<std::size_t>(points.front().size());
    std::vector<Subspace> directions;
    std::vector<std::string> warnings;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<std::size_t>(points[i].size()) != n) throw DimensionError("points have different dimensions");
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            Eigen::VectorXd diff = points[i] - points[j];
            const double norm = diff.norm();
            if (norm == 0.0) {
                ++skipped;
                warnings.push_back("points " + std::to_string(i) + " and " + std::to_string(j) +
                                   " coincide; pair skipped");
                continue;
            }
            Eigen::MatrixXd basis = diff / norm;
            directions.emplace_back(std::move(basis));
        }
    }
    if (directions.empty()) throw InputError("metric_embed needs at least two distinct points");
    const std::size_t p = directions.size();
    // With a single pair the log term vanishes for every D.
    const std::size_t m = m_override ? *m_override : (p == 1 ? std::size_t{5} : required_m(1, p, D));
    SubspaceFamily family = SubspaceFamily::linear(std::move(directions));
    RandomMatrix gamma = sample_matrix(ensemble, m, n, derive(seed, stream::matrix));
    DistortionReport report = family_distortion(gamma, family);
    ScaleChoice scale = choose_scale(report, D);
    return EmbedResult{std::move(gamma), scale, std::move(report), m, p, skipped, std::move(warnings),
                       std::move(family)};
}

void check_separation(const SubspaceFamily& family, double delta) {
    for (std::size_t a = 0; a < family.size(); ++a)
        for (std::size_t b = 0; b < family.size(); ++b) {
            if (a == b) continue;
            const double rho = grassmann_distance(family[a].direction, family[b].direction);
            if (rho < delta)
                throw SeparationError("members " + std::to_string(a) + " and " + std::to_string(b) +
                                          " are only " + std::to_string(rho) + " apart (need " +
                                          std::to_string(delta) + ")",
                                      a, b);
        }
}

std::vector<LowerBoundRow> lower_bound_study(std::size_t n, std::size_t k, double D, double delta,
                                             const std::vector<std::size_t>& p_values, const EnsembleSpec& ensemble,
                                             std::uint64_t seed, const LowerBoundOptions& options) {
    if (p_values.empty()) throw InputError("lower_bound_study needs p values");
    const std::size_t p_cap = binomial(n, k);
    std::size_t m_hi = k;
    for (std::size_t p : p_values) m_hi = std::max(m_hi, required_m(k, std::min(p, p_cap), D));
    std::vector<std::size_t> m_values;
    for (std::size_t m = k; m <= m_hi; ++m) m_values.push_back(m);

    std::vector<LowerBoundRow> rows;
    for (std::size_t p : p_values) {
        ExperimentConfig config;
        config.n = n;
        config.k = k;
        config.p = p;
        config.D = D;
        config.ensemble = ensemble;
        config.family_kind = FamilyKind::k_sparse;
        config.trials = options.trials;
        config.seed = seed;
        config.parallelism = options.parallelism;
        const SubspaceFamily family = build_family(config, 0);
        check_separation(family, delta);

        LowerBoundRow row;
        row.p = p;
        row.p_used = family.size();
        row.required_m = required_m(k, row.p_used, D);
        row.minimal_m = sweep_m(config, m_values, options.target_rate).minimal_m;
        row.width = gaussian_width_mc(family, options.width_draws, derive(seed, stream::width), options.parallelism);
        rows.push_back(row);
    }
    return rows;
}

MeanEstimate expected_max_energy(const ExperimentConfig& config, std::size_t m) {
    validate(config);
    std::vector<double> energy(config.trials);
    const bool fixed = family_is_fixed(config);
    const std::optional<SubspaceFamily> shared =
        fixed ? std::optional<SubspaceFamily>(build_family(config, 0)) : std::nullopt;
    parallel_for(config.trials, config.parallelism, [&](std::size_t t) {
        const SubspaceFamily family = fixed ? *shared : build_family(config, t);
        const RandomMatrix gamma = sample_matrix(config.ensemble, m, family.ambient_dim(), trial_matrix_seed(config, t));
        const DistortionReport report = family_distortion(gamma, reduce_affine(family));
        energy[t] = report.family_sigma_max * report.family_sigma_max;
    });
    return mean_and_error(energy);
}

}  // namespace subembed
