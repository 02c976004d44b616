// End-to-end acceptance checks; one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "subembed/cli.hpp"
#include "subembed/distortion.hpp"
#include "subembed/harness.hpp"
#include "subembed/io.hpp"
#include "subembed/kernels.hpp"
#include "subembed/parallel.hpp"
#include "subembed/rng.hpp"

using namespace subembed;
namespace fs = std::filesystem;

namespace {

const std::vector<EnsembleSpec> kEnsembles{EnsembleSpec::gaussian(), EnsembleSpec::sphere_scaled(),
                                           EnsembleSpec::iid_uniform()};

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string name(const EnsembleSpec& e) { return std::string(kind_name(e.kind)); }

// 1. Main theorem at desk scale.
Outcome ac1() {
    bool ok = true;
    std::string detail;
    for (const auto& e : kEnsembles) {
        ExperimentConfig c;
        c.n = 64;
        c.k = 4;
        c.p = 16;
        c.D = 8.0;
        c.ensemble = e;
        c.trials = 200;
        c.seed = 2024;
        c.parallelism = default_parallelism();
        const auto t0 = std::chrono::steady_clock::now();
        const auto results = run_trials(c);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::size_t wins = 0;
        for (const auto& r : results) wins += r.feasible && r.m_used == 27;
        const double rate = wins / 200.0;
        ok = ok && rate >= 0.95;
        detail += fmt("%s rate=%.3f (%.1fs) ", name(e).c_str(), rate, secs);
    }
    return {ok, detail + fmt("bound=%.5f", success_prob_bound(8.0, 27))};
}

// 2. SVD extremes against sampled unit vectors.
Outcome ac2() {
    std::size_t violations = 0;
    double worst_gap = 0.0;
    for (std::size_t inst = 0; inst < 50; ++inst) {
        const RandomMatrix g = sample_matrix(EnsembleSpec::gaussian(), 8, 16, derive(31, inst));
        const Subspace w = random_subspace(16, 3, derive(32, inst));
        const Extremes ex = subspace_extremes(g, w);
        const Eigen::MatrixXd gb = restrict_to(g, w);
        Engine rng = make_engine(derive(33, inst));
        std::normal_distribution<double> normal;
        double lo = INFINITY, hi = 0.0;
        for (int s = 0; s < 100000; ++s) {
            Eigen::Vector3d u(normal(rng), normal(rng), normal(rng));
            u.normalize();
            const double v = (gb * u).norm();
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo < ex.sigma_min * (1 - 1e-12) || hi > ex.sigma_max * (1 + 1e-12)) ++violations;
        worst_gap = std::max({worst_gap, (lo - ex.sigma_min) / ex.sigma_min, (ex.sigma_max - hi) / ex.sigma_max});
    }
    return {violations == 0 && worst_gap <= 0.01, fmt("violations=%zu worst_relative_gap=%.5f", violations, worst_gap)};
}

// 3. Small-ball probability for uniform entries.
Outcome ac3() {
    const std::size_t draws = 1000000;
    const RandomMatrix x = sample_matrix(EnsembleSpec::iid_uniform(), draws, 3, 77);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < draws; ++i)
        if (kernels::squared_norm(&x.entries[3 * i], 3) <= 0.1 * 3) ++hits;
    const double p = double(hits) / draws;
    const double a = std::sqrt(3.0);
    const double oracle = 4.0 / 3.0 * std::numbers::pi * std::pow(0.3, 1.5) / std::pow(2 * a, 3);
    const double se = std::sqrt(oracle * (1 - oracle) / draws);
    const double bound = small_ball_bound(1.0 / (2 * a), 3, 0.1);
    const bool ok = std::abs(p - oracle) <= 3 * se && p <= bound;
    return {ok, fmt("empirical=%.6f oracle=%.6f se=%.6f bound=%.4f", p, oracle, se, bound)};
}

// 4. Estimated constants.
Outcome ac4() {
    Engine rng = make_engine(404);
    std::normal_distribution<double> normal;
    std::vector<double> g(1000000);
    for (double& v : g) v = normal(rng);
    const double psi = psi2_estimate(g).value;
    const double conc = concentration_estimate(g, 0.1).value;
    bool ok = psi >= 1.55 && psi <= 1.72 && conc <= 0.0838;
    std::string detail = fmt("psi2(normal)=%.4f conc(normal,0.1)=%.5f ", psi, conc);
    for (const auto& e : kEnsembles) {
        const std::size_t n = 8, rows = 200000;
        const RandomMatrix x = sample_matrix(e, rows, n, 405);
        double beta_hat = INFINITY, alpha_hat = INFINITY;
        for (std::size_t d = 0; d < 4; ++d) {
            const Eigen::VectorXd dir = random_unit_vector(n, derive(406, d));
            std::vector<double> proj(rows);
            kernels::gemv(x.entries.data(), rows, n, dir.data(), proj.data());
            beta_hat = std::min(beta_hat, psi2_estimate(proj).value);
            alpha_hat = std::min(alpha_hat, concentration_estimate(proj, 2.0).value / 2.0);
        }
        ok = ok && beta_hat >= 0.97 && alpha_hat >= 3.0 / 8.0;
        detail += fmt("%s beta_hat=%.3f conc(2)/2=%.3f ", name(e).c_str(), beta_hat, alpha_hat);
    }
    return {ok, detail};
}

// 5. Gaussian width.
Outcome ac5() {
    const auto r4 = SubspaceFamily::linear({sparse_subspace(16, {0, 1, 2, 3})});
    const WidthEstimate w = gaussian_width_mc(r4, 10000, 55, default_parallelism());
    const WidthEstimate ws = gaussian_width_mc(k_sparse_family(16, 3, 256, 56), 10000, 57, default_parallelism());
    const double bound = width_upper_bound(3, 256, 0.0, 16);
    const bool ok = w.mean >= 1.83 && w.mean <= 1.93 && ws.mean <= bound;
    return {ok, fmt("width(R^4)=%.4f width(k_sparse 16,3,256)=%.4f bound=%.3f", w.mean, ws.mean, bound)};
}

// 6. E^2 >= m.
Outcome ac6() {
    bool ok = true;
    std::string detail;
    for (const auto& e : kEnsembles) {
        ExperimentConfig c;
        c.n = 32;
        c.k = 3;
        c.p = 8;
        c.D = 4.0;
        c.ensemble = e;
        c.trials = 1000;
        c.seed = 66;
        c.parallelism = default_parallelism();
        const MeanEstimate est = expected_max_energy(c, 12);
        ok = ok && est.mean >= 12 * 0.98;
        detail += fmt("%s E^2=%.3f+-%.3f ", name(e).c_str(), est.mean, est.std_error);
    }
    return {ok, detail + "m=12"};
}

// 7. Metric embedding of 32 points.
Outcome ac7() {
    const std::size_t seeds = 100;
    std::vector<int> feasible(seeds, 0), clean(seeds, 0), dims(seeds, 0);
    parallel_for(seeds, default_parallelism(), [&](std::size_t s) {
        std::vector<Eigen::VectorXd> pts;
        for (std::size_t i = 0; i < 32; ++i) {
            const auto row = sample_row(EnsembleSpec::gaussian(), 32, derive(derive(s, stream::points), i));
            pts.emplace_back(Eigen::Map<const Eigen::VectorXd>(row.data(), 32));
        }
        const EmbedResult r = metric_embed(pts, 12.01, EnsembleSpec::gaussian(), s);
        dims[s] = static_cast<int>(r.m);
        feasible[s] = r.scale.feasible;
        if (r.scale.feasible)
            clean[s] = verify_pointwise(r.gamma, r.family, r.scale, 10000, derive(s, stream::probe)).violations == 0;
    });
    std::size_t ok_runs = 0, dirty = 0;
    bool m_ok = true;
    for (std::size_t s = 0; s < seeds; ++s) {
        ok_runs += feasible[s];
        dirty += feasible[s] && !clean[s];
        m_ok = m_ok && dims[s] == 18;
    }
    const double rate = double(ok_runs) / seeds;
    return {rate >= 0.95 && dirty == 0 && m_ok,
            fmt("m=%d rate=%.2f runs_with_pointwise_violations=%zu", dims[0], rate, dirty)};
}

// 8. Tightness in p and rank deficiency.
Outcome ac8() {
    LowerBoundOptions opt;
    opt.trials = 50;
    opt.parallelism = default_parallelism();
    const auto rows =
        lower_bound_study(20, 2, 4.0, std::sqrt(2.0) - 1e-9, {5, 50, 500}, EnsembleSpec::gaussian(), 88, opt);
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ok = ok && rows[i].minimal_m.has_value();
        if (i > 0 && rows[i].minimal_m && rows[i - 1].minimal_m) ok = ok && *rows[i].minimal_m >= *rows[i - 1].minimal_m;
        detail += fmt("p=%zu(used %zu) minimal_m=%s ", rows[i].p, rows[i].p_used,
                      rows[i].minimal_m ? std::to_string(*rows[i].minimal_m).c_str() : "none");
    }
    ExperimentConfig c;
    c.n = 20;
    c.k = 2;
    c.p = 1;
    c.D = 4.0;
    c.family_kind = FamilyKind::k_sparse;
    c.trials = 50;
    c.seed = 89;
    const SweepResult s = sweep_m(c, {1}, 0.95);
    ok = ok && s.points[0].success_rate == 0.0;
    return {ok, detail + fmt("rate(m=k-1)=%.2f", s.points[0].success_rate)};
}

// 9. Affine and cross-family reductions.
Outcome ac9() {
    bool ok = true;
    std::size_t max_dim = 0, max_count_excess = 0;
    for (std::size_t inst = 0; inst < 20; ++inst) {
        const std::size_t n = 24, p = 2 + inst % 5, k = 1 + inst % 4;
        std::vector<AffineSubspace> members;
        for (std::size_t l = 0; l < p; ++l) {
            const auto base = sample_row(EnsembleSpec::gaussian(), n, derive(derive(91, inst), l));
            members.emplace_back(Eigen::Map<const Eigen::VectorXd>(base.data(), n),
                                 random_subspace(n, k - (l % 2 && k > 1 ? 1 : 0), derive(derive(92, inst), l)));
        }
        const SubspaceFamily fam(members);
        const RandomMatrix g = sample_matrix(EnsembleSpec::gaussian(), 10, n, derive(93, inst));
        const DistortionReport a = family_distortion(g, fam);
        const DistortionReport b = family_distortion(g, reduce_affine(fam));
        ok = ok && a.family_sigma_min == b.family_sigma_min && a.family_sigma_max == b.family_sigma_max &&
             a.achieved_distortion == b.achieved_distortion;
        for (std::size_t i = 0; i < a.per_subspace.size(); ++i)
            ok = ok && a.per_subspace[i].sigma_min == b.per_subspace[i].sigma_min &&
                 a.per_subspace[i].sigma_max == b.per_subspace[i].sigma_max;
        const ScaleChoice sc = choose_scale(a, a.achieved_distortion * 1.01);
        ok = ok && verify_pointwise(g, fam, sc, 2000, derive(94, inst)).violations == 0;

        const SubspaceFamily cross = cross_family(fam);
        if (cross.size() > p * (p + 1) / 2) ++max_count_excess;
        for (std::size_t l = 0; l < cross.size(); ++l) {
            max_dim = std::max(max_dim, cross[l].direction.dim());
            ok = ok && cross[l].direction.dim() <= 2 * k;
        }
    }
    ok = ok && max_count_excess == 0;
    return {ok, fmt("affine invariance exact, max cross dim=%zu, count violations=%zu", max_dim, max_count_excess)};
}

// 10. Byte-identical outputs on re-runs.
Outcome ac10() {
    const fs::path dir = fs::temp_directory_path() / ("subembed_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto p = [&](const std::string& f) { return (dir / f).string(); };
    io::write_file_atomic(p("cfg.json"), R"({"n": 32, "k": 3, "p": 6, "D": 4.0, "ensemble": {"kind": "iid_bounded"},
  "family_kind": "haar_random", "trials": 8, "seed": 100})");
    io::write_file_atomic(p("family.json"),
                          R"({"n": 4, "members": [{"basis_columns": [[1, 0, 0, 0], [0, 1, 1, 0]]},
  {"base": [1, 2, 3, 4], "basis_columns": [[0, 0, 0, 1]]}]})");
    io::write_file_atomic(p("points.csv"), "0,0,0\n1,0,0\n0,1,0\n0,0,1\n1,1,1\n");

    std::vector<std::vector<std::string>> commands;
    std::vector<std::vector<std::string>> outputs;
    for (int run = 0; run < 2; ++run) {
        const std::string r = std::to_string(run);
        const std::string threads = run == 0 ? "1" : "3";
        commands.push_back({"constants", "--ensemble", "iid_bounded", "--seed", "5", "--out", p("constants" + r + ".json")});
        commands.push_back({"gen-matrix", "--config", p("cfg.json"), "--out", p("matrix" + r + ".csv")});
        commands.push_back({"gen-matrix", "--m", "3", "--n", "4", "--seed", "9", "--out", p("small" + r + ".csv")});
        commands.push_back({"verify", "--matrix", p("small" + r + ".csv"), "--family", p("family.json"), "--D", "8",
                            "--report-csv", p("report" + r + ".csv"), "--summary-json", p("summary" + r + ".json")});
        commands.push_back({"trial", "--config", p("cfg.json"), "--threads", threads, "--out", p("trial" + r + ".jsonl")});
        commands.push_back({"trial", "--config", p("cfg.json"), "--annealed", "--threads", threads, "--out",
                            p("annealed" + r + ".jsonl")});
        commands.push_back({"sweep", "--config", p("cfg.json"), "--m-values", "2-12,20", "--threads", threads, "--out",
                            p("sweep" + r + ".csv")});
        commands.push_back({"embed-points", "--points", p("points.csv"), "--D", "6", "--seed", "7", "--check-pairs",
                            "500", "--out-matrix", p("embed" + r + ".csv"), "--summary", p("embed" + r + ".json")});
        commands.push_back({"embed-points", "--random", "20", "--dim", "8", "--D", "8", "--seed", "8", "--summary",
                            p("embedr" + r + ".json")});
        commands.push_back({"width", "--config", p("cfg.json"), "--draws", "2000", "--threads", threads, "--out",
                            p("width" + r + ".json")});
    }
    bool ok = true;
    std::string failed;
    for (const auto& cmd : commands) {
        std::ostringstream out, err;
        if (cli::dispatch(cmd, out, err) != 0) {
            ok = false;
            failed += cmd[0] + "(exit) ";
        }
    }
    const std::vector<std::pair<std::string, std::string>> files{
        {"constants", ".json"}, {"matrix", ".csv"}, {"small", ".csv"}, {"report", ".csv"}, {"summary", ".json"}, {"trial", ".jsonl"},
        {"annealed", ".jsonl"}, {"sweep", ".csv"},  {"embed", ".csv"},  {"embed", ".json"},  {"embedr", ".json"},
        {"width", ".json"}};
    for (const auto& [stem, ext] : files) {
        std::string a, b;
        try {
            a = io::read_file(p(stem + "0" + ext));
            b = io::read_file(p(stem + "1" + ext));
        } catch (const std::exception&) {
            ok = false;
            failed += stem + ext + "(missing) ";
            continue;
        }
        if (a != b || a.empty()) {
            ok = false;
            failed += stem + ext + " ";
        }
    }
    fs::remove_all(dir);
    return {ok, fmt("%zu files compared across 2 runs (threads 1 vs 3)%s%s", files.size(), failed.empty() ? "" : "; differ: ",
                    failed.c_str())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1 main theorem (n=64,k=4,p=16,D=8,m=27)", ac1},
        {"AC2 certification oracle", ac2},
        {"AC3 small-ball lemma", ac3},
        {"AC4 ensemble constants", ac4},
        {"AC5 gaussian width", ac5},
        {"AC6 E^2 >= m", ac6},
        {"AC7 metric embedding", ac7},
        {"AC8 tightness", ac8},
        {"AC9 affine/cross reductions", ac9},
        {"AC10 determinism", ac10},
    };
    std::printf("kernels: %s\n", std::string(kernels::backend_name(kernels::active_backend())).c_str());
    int failures = 0;
    for (const auto& [label, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", label, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
