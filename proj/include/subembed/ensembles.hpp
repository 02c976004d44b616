#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace subembed {

enum class EnsembleKind { gaussian, sphere_scaled, iid_bounded };

// Entry law for iid_bounded rows. Only the unit-variance uniform law on
// [-sqrt(3), sqrt(3)] is built in.
enum class EntryDistribution { uniform_unit_variance };

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::gaussian;
    EntryDistribution entry = EntryDistribution::uniform_unit_variance;
    // Supremum of the per-entry density; used only for iid_bounded.
    double density_bound = 0.0;
    // psi_2 norm bound of a single entry; used only for iid_bounded.
    double entry_psi2 = 0.0;

    static EnsembleSpec gaussian();
    static EnsembleSpec sphere_scaled();
    // Uniform on [-sqrt(3), sqrt(3)]: density 1/(2 sqrt 3), entry psi_2 bound
    // 4^{1/2} * sqrt(3) from the bounded-variable estimate.
    static EnsembleSpec iid_uniform();

    friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

std::string_view kind_name(EnsembleKind kind) noexcept;
// Accepts "gaussian", "sphere" (or "sphere_scaled") and "iid_bounded".
EnsembleKind parse_kind(std::string_view name);

// Throws ConfigError when the descriptor is unusable.
void validate(const EnsembleSpec& spec);

// Half-width of the support of one iid_bounded entry.
double entry_support(const EnsembleSpec& spec);

enum class ConstantSource { closed_form, empirical };
std::string_view source_name(ConstantSource source) noexcept;

struct EnsembleConstants {
    double alpha = 0.0;
    double beta = 0.0;
    ConstantSource alpha_source = ConstantSource::closed_form;
    ConstantSource beta_source = ConstantSource::closed_form;
};

// Controls the directional estimate of alpha for iid_bounded rows.
struct EmpiricalAlphaOptions {
    std::size_t dim = 8;
    std::size_t directions = 8;
    std::size_t samples = 20000;
    std::vector<double> epsilons{0.1, 0.2, 0.5};
    std::uint64_t seed = 0x5eed;
};

EnsembleConstants theoretical_constants(const EnsembleSpec& spec,
                                        const EmpiricalAlphaOptions& options = {});

// One row drawn from the ensemble; deterministic in (spec, n, seed).
std::vector<double> sample_row(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed);
void sample_row_into(const EnsembleSpec& spec, std::uint64_t seed, std::span<double> out);

struct RandomMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> entries;  // row-major
    EnsembleSpec ensemble;
    std::uint64_t seed = 0;

    const double* row(std::size_t i) const { return entries.data() + i * cols; }
    double* row(std::size_t i) { return entries.data() + i * cols; }
    double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

inline constexpr std::size_t kDefaultMatrixBudget = std::size_t{1} << 28;

// Row i is sample_row(spec, n, derive(seed, i)), so prefixes agree across m.
RandomMatrix sample_matrix(const EnsembleSpec& spec, std::size_t m, std::size_t n, std::uint64_t seed,
                           std::size_t entry_budget = kDefaultMatrixBudget);

}  // namespace subembed
