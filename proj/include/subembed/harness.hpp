#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subembed/distortion.hpp"
#include "subembed/ensembles.hpp"
#include "subembed/geometry.hpp"
#include "subembed/stats.hpp"

namespace subembed {

enum class FamilyKind { haar_random, k_sparse, user_file };

std::string_view family_kind_name(FamilyKind kind) noexcept;
FamilyKind parse_family_kind(std::string_view name);

struct ExperimentConfig {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t p = 1;
    double D = 2.0;
    EnsembleSpec ensemble;
    FamilyKind family_kind = FamilyKind::haar_random;
    std::string family_path;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::optional<std::size_t> m_override;
    // Quenched: one fixed family for all trials. Annealed draws a fresh
    // haar_random family per trial.
    bool quenched = true;
    unsigned parallelism = 1;
};

// Throws ConfigError on violated invariants.
void validate(const ExperimentConfig& config);

std::size_t trial_dimension(const ExperimentConfig& config);

// n choose k, saturating at SIZE_MAX.
std::size_t binomial(std::size_t n, std::size_t k);

// The first p distinct k-sparse supports from a seeded stream. The prefix
// property holds: the family for p is a prefix of the family for any p' > p.
// p is capped at n choose k.
SubspaceFamily k_sparse_family(std::size_t n, std::size_t k, std::size_t p, std::uint64_t seed);

SubspaceFamily haar_family(std::size_t n, std::size_t k, std::size_t p, std::uint64_t seed);

// Family used by a given trial (fixed unless haar_random in annealed mode).
SubspaceFamily build_family(const ExperimentConfig& config, std::size_t trial_index);

// Seed of the matrix drawn in a trial; independent of m so that rows nest.
std::uint64_t trial_matrix_seed(const ExperimentConfig& config, std::size_t trial_index);

struct TrialResult {
    std::size_t trial_index = 0;
    std::size_t m_used = 0;
    bool feasible = false;
    double achieved_distortion = 0.0;
    std::optional<double> L;
    double family_sigma_min = 0.0;
    double family_sigma_max = 0.0;
    double wall_time = 0.0;  // seconds
};

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index);
TrialResult run_trial(const ExperimentConfig& config, std::size_t trial_index, const SubspaceFamily& family,
                      std::size_t m);

// All config.trials trials, ordered by trial index.
std::vector<TrialResult> run_trials(const ExperimentConfig& config);

struct SweepPoint {
    std::size_t m = 0;
    std::size_t trials = 0;
    std::size_t successes = 0;
    double success_rate = 0.0;
    double smoothed_rate = 0.0;
    double mean_achieved_distortion = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double target_rate = 0.0;
    std::optional<std::size_t> minimal_m;
};

// Weighted pool-adjacent-violators fit; returns a nondecreasing sequence.
std::vector<double> isotonic_increasing(const std::vector<double>& values, const std::vector<double>& weights);

SweepResult sweep_m(const ExperimentConfig& config, const std::vector<std::size_t>& m_values, double target_rate);

struct EmbedResult {
    RandomMatrix gamma;
    ScaleChoice scale;
    DistortionReport report;
    std::size_t m = 0;
    std::size_t pairs = 0;
    std::size_t skipped_pairs = 0;
    std::vector<std::string> warnings;
    SubspaceFamily family;
};

// One-dimensional subspaces span{x_i - x_j} for all pairs, m = required_m(1, p, D).
EmbedResult metric_embed(const std::vector<Eigen::VectorXd>& points, double D, const EnsembleSpec& ensemble,
                         std::uint64_t seed, std::optional<std::size_t> m_override = std::nullopt);

// Throws SeparationError naming the first pair closer than delta.
void check_separation(const SubspaceFamily& family, double delta);

struct LowerBoundRow {
    std::size_t p = 0;          // requested
    std::size_t p_used = 0;     // after capping at n choose k
    std::optional<std::size_t> minimal_m;
    std::size_t required_m = 0;
    WidthEstimate width;
};

struct LowerBoundOptions {
    std::size_t trials = 50;
    double target_rate = 0.95;
    std::size_t width_draws = 2000;
    unsigned parallelism = 1;
};

std::vector<LowerBoundRow> lower_bound_study(std::size_t n, std::size_t k, double D, double delta,
                                             const std::vector<std::size_t>& p_values, const EnsembleSpec& ensemble,
                                             std::uint64_t seed, const LowerBoundOptions& options = {});

// Empirical E max_{x in S} |Gamma x|^2 over trials, S the union of unit
// spheres of the family built for each trial.
MeanEstimate expected_max_energy(const ExperimentConfig& config, std::size_t m);

}  // namespace subembed
