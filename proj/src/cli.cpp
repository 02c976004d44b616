#include "subembed/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "subembed/errors.hpp"
#include "subembed/harness.hpp"
#include "subembed/io.hpp"
#include "subembed/parallel.hpp"
#include "subembed/rng.hpp"

namespace subembed::cli {

using nlohmann::json;

namespace {

struct EnsembleFlags {
    std::string kind = "gaussian";
    std::optional<double> density_bound;
    std::optional<double> entry_psi2;

    void attach(CLI::App* app) {
        app->add_option("--ensemble", kind, "gaussian | sphere | iid_bounded");
        app->add_option("--density-bound", density_bound, "per-entry density bound (iid_bounded)");
        app->add_option("--entry-psi2", entry_psi2, "per-entry psi_2 bound (iid_bounded)");
    }

    EnsembleSpec spec() const {
        json doc{{"kind", kind}};
        if (density_bound) doc["density_bound"] = *density_bound;
        if (entry_psi2) doc["entry_psi2"] = *entry_psi2;
        return io::ensemble_from_json(doc);
    }
};

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("SUBEMBED_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') throw ConfigError("SUBEMBED_SEED must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
}

// Explicit flag, then SUBEMBED_SEED, then the fallback.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
    if (flag) return *flag;
    if (auto env = env_seed()) return *env;
    return fallback;
}

ExperimentConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed_flag,
                             const std::optional<unsigned>& threads) {
    ExperimentConfig config = io::config_from_json(io::parse_json(io::read_file(path), path));
    config.seed = resolve_seed(seed_flag, config.seed);
    if (threads) config.parallelism = std::max(1u, *threads);
    return config;
}

// Applies the default thread count when neither config nor flag chose one.
void default_threads(ExperimentConfig& config, const std::string& path, const std::optional<unsigned>& threads) {
    if (threads) return;
    const json doc = io::parse_json(io::read_file(path), path);
    if (!doc.contains("parallelism") || doc["parallelism"].is_null()) config.parallelism = default_parallelism();
}

void emit(const std::string& contents, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << contents;
    else
        io::write_file_atomic(path, contents);
}

std::vector<std::size_t> parse_m_values(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        try {
            if (dash != std::string::npos) {
                const std::size_t lo = std::stoul(item.substr(0, dash));
                const std::size_t hi = std::stoul(item.substr(dash + 1));
                for (std::size_t m = lo; m <= hi; ++m) out.push_back(m);
            } else {
                out.push_back(std::stoul(item));
            }
        } catch (const std::exception&) {
            throw InputError("cannot parse m value '" + item + "'");
        }
    }
    return out;
}

std::string fixed4(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Large-distortion random subspace embeddings: sampling, certification and Monte Carlo studies",
                 "subembed"};
    app.require_subcommand(1);
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    // constants
    auto* constants = app.add_subcommand("constants", "Admissibility constants (alpha, beta) of an ensemble");
    EnsembleFlags c_ens;
    c_ens.attach(constants);
    std::string c_out;
    constants->add_option("--out", c_out, "write the constants as JSON");
    constants->add_option("--seed", seed, "seed for empirical constants");

    // gen-matrix
    auto* gen = app.add_subcommand("gen-matrix", "Sample a random matrix and store it as CSV");
    EnsembleFlags g_ens;
    g_ens.attach(gen);
    std::size_t g_m = 0, g_n = 0;
    std::string g_out, g_config;
    gen->add_option("--m", g_m, "rows");
    gen->add_option("--n", g_n, "columns");
    gen->add_option("--config", g_config, "take ensemble, n and m from a config");
    gen->add_option("--seed", seed, "RNG seed");
    gen->add_option("--out", g_out, "output CSV")->required();

    // verify
    auto* verify = app.add_subcommand("verify", "Certify the distortion of a matrix on a subspace family");
    std::string v_matrix, v_family, v_report, v_summary;
    double v_D = 2.0;
    bool v_require = false;
    verify->add_option("--matrix", v_matrix, "matrix CSV")->required();
    verify->add_option("--family", v_family, "family JSON")->required();
    verify->add_option("--D", v_D, "target distortion")->required();
    verify->add_flag("--require-feasible", v_require, "exit 1 when no scale achieves D");
    verify->add_option("--report-csv", v_report, "per-member extremes CSV");
    verify->add_option("--summary-json", v_summary, "summary JSON (default: stdout)");

    // trial
    auto* trial = app.add_subcommand("trial", "Run main-theorem trials from a config");
    std::string t_config, t_out;
    bool t_timing = false, t_annealed = false;
    trial->add_option("--config", t_config, "config JSON")->required();
    trial->add_option("--out", t_out, "JSON-lines output (default: stdout)");
    trial->add_flag("--timing", t_timing, "include wall_time in each record");
    trial->add_flag("--annealed", t_annealed, "fresh haar_random family per trial");
    trial->add_option("--seed", seed, "override the config seed");
    trial->add_option("--threads", threads, "worker threads");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Success rate as a function of m");
    std::string s_config, s_out, s_m_values;
    double s_target = 0.95;
    bool s_annealed = false;
    sweep->add_option("--config", s_config, "config JSON")->required();
    sweep->add_option("--m-values", s_m_values, "comma list with ranges, e.g. 1-10,12,16")->required();
    sweep->add_option("--target", s_target, "target success rate");
    sweep->add_option("--out", s_out, "CSV output (default: stdout)");
    sweep->add_flag("--annealed", s_annealed, "fresh haar_random family per trial");
    sweep->add_option("--seed", seed, "override the config seed");
    sweep->add_option("--threads", threads, "worker threads");

    // embed-points
    auto* embed = app.add_subcommand("embed-points", "Embed a finite point set with distortion D");
    EnsembleFlags e_ens;
    e_ens.attach(embed);
    std::string e_points, e_matrix_out, e_summary;
    std::size_t e_random = 0, e_dim = 0, e_check = 0;
    double e_D = 2.0;
    embed->add_option("--points", e_points, "points CSV, one point per line");
    embed->add_option("--random", e_random, "draw this many Gaussian points instead");
    embed->add_option("--dim", e_dim, "dimension of random points");
    embed->add_option("--D", e_D, "target distortion")->required();
    embed->add_option("--seed", seed, "RNG seed");
    embed->add_option("--out-matrix", e_matrix_out, "store the sampled matrix as CSV");
    embed->add_option("--summary", e_summary, "summary JSON (default: stdout)");
    embed->add_option("--check-pairs", e_check, "pointwise check on this many random pairs");

    // width
    auto* width = app.add_subcommand("width", "Monte Carlo Gaussian width of a config's family");
    std::string w_config, w_out;
    std::size_t w_draws = 10000;
    width->add_option("--config", w_config, "config JSON")->required();
    width->add_option("--draws", w_draws, "Gaussian draws");
    width->add_option("--out", w_out, "JSON output (default: stdout)");
    width->add_option("--seed", seed, "override the config seed");
    width->add_option("--threads", threads, "worker threads");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*constants) {
            const EnsembleSpec spec = c_ens.spec();
            EmpiricalAlphaOptions opt;
            opt.seed = resolve_seed(seed, opt.seed);
            const EnsembleConstants k = theoretical_constants(spec, opt);
            out << "alpha=" << fixed4(k.alpha) << " beta=" << fixed4(k.beta) << " alpha_source="
                << source_name(k.alpha_source) << " beta_source=" << source_name(k.beta_source) << "\n";
            if (!c_out.empty()) {
                const json doc{{"ensemble", io::ensemble_to_json(spec)},
                               {"alpha", k.alpha},
                               {"beta", k.beta},
                               {"alpha_source", std::string(source_name(k.alpha_source))},
                               {"beta_source", std::string(source_name(k.beta_source))}};
                io::write_file_atomic(c_out, doc.dump(2) + "\n");
            }
            return kExitOk;
        }
        if (*gen) {
            EnsembleSpec spec = g_ens.spec();
            std::uint64_t base_seed = 0;
            std::size_t m = g_m, n = g_n;
            if (!g_config.empty()) {
                const ExperimentConfig config = load_config(g_config, std::nullopt, std::nullopt);
                spec = config.ensemble;
                base_seed = config.seed;
                if (n == 0) n = config.n;
                if (m == 0) m = trial_dimension(config);
            }
            if (m == 0 || n == 0) throw InputError("gen-matrix needs --m and --n (or --config)");
            io::store_matrix_csv(sample_matrix(spec, m, n, resolve_seed(seed, base_seed)), g_out);
            return kExitOk;
        }
        if (*verify) {
            const RandomMatrix gamma = io::load_matrix_csv(v_matrix);
            const SubspaceFamily family = io::load_family_json(v_family);
            const DistortionReport report = family_distortion(gamma, reduce_affine(family));
            const ScaleChoice scale = choose_scale(report, v_D);
            if (!v_report.empty()) io::write_file_atomic(v_report, io::report_to_csv(report));
            emit(io::report_summary(report, scale).dump(2) + "\n", v_summary, out);
            return (v_require && !scale.feasible) ? kExitInfeasible : kExitOk;
        }
        if (*trial) {
            ExperimentConfig config = load_config(t_config, seed, threads);
            default_threads(config, t_config, threads);
            config.quenched = !t_annealed;
            std::string lines;
            for (const auto& r : run_trials(config)) lines += io::trial_to_json(r, t_timing).dump() + "\n";
            emit(lines, t_out, out);
            return kExitOk;
        }
        if (*sweep) {
            ExperimentConfig config = load_config(s_config, seed, threads);
            default_threads(config, s_config, threads);
            config.quenched = !s_annealed;
            const SweepResult result = sweep_m(config, parse_m_values(s_m_values), s_target);
            emit(io::sweep_to_csv(result), s_out, out);
            if (!s_out.empty()) {
                out << "minimal_m=" << (result.minimal_m ? std::to_string(*result.minimal_m) : std::string("none"))
                    << " target_rate=" << s_target << "\n";
            }
            return kExitOk;
        }
        if (*embed) {
            const std::uint64_t s = resolve_seed(seed, 0);
            std::vector<Eigen::VectorXd> points;
            if (!e_points.empty()) {
                points = io::points_from_csv(io::read_file(e_points));
            } else if (e_random >= 2 && e_dim >= 1) {
                for (std::size_t i = 0; i < e_random; ++i) {
                    const auto row = sample_row(EnsembleSpec::gaussian(), e_dim, derive(derive(s, stream::points), i));
                    points.emplace_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(e_dim)));
                }
            } else {
                throw InputError("embed-points needs --points or --random N --dim d");
            }
            const EmbedResult result = metric_embed(points, e_D, e_ens.spec(), s);
            for (const auto& w : result.warnings) err << "warning: " << w << "\n";
            json summary = io::report_summary(result.report, result.scale);
            summary["m"] = result.m;
            summary["pairs"] = result.pairs;
            summary["skipped_pairs"] = result.skipped_pairs;
            if (e_check > 0 && result.scale.feasible) {
                const PointwiseCheck check = verify_pointwise(result.gamma, result.family, result.scale, e_check,
                                                              derive(s, stream::probe));
                summary["pointwise_pairs"] = check.pairs;
                summary["pointwise_violations"] = check.violations;
            }
            if (!e_matrix_out.empty()) io::store_matrix_csv(result.gamma, e_matrix_out);
            emit(summary.dump(2) + "\n", e_summary, out);
            return kExitOk;
        }
        if (*width) {
            ExperimentConfig config = load_config(w_config, seed, threads);
            default_threads(config, w_config, threads);
            const SubspaceFamily family = reduce_affine(build_family(config, 0));
            const WidthEstimate est =
                gaussian_width_mc(family, w_draws, derive(config.seed, stream::width), config.parallelism);
            const json doc{{"mean", est.mean},
                           {"std_error", est.std_error},
                           {"n_draws", est.n_draws},
                           {"upper_bound_formula",
                            width_upper_bound(family.max_dim(), family.size(), 0.0, family.ambient_dim())}};
            emit(doc.dump(2) + "\n", w_out, out);
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace subembed::cli
