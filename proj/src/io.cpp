#include "subembed/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "subembed/errors.hpp"

namespace subembed::io {

using nlohmann::json;

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        const std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        lines.push_back(trim(line));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

template <typename T>
std::vector<T> parse_fields(std::string_view line, std::size_t line_no) {
    std::vector<T> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        const std::string_view field =
            trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        T value{};
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
            throw IoError("line " + std::to_string(line_no) + ": cannot parse field '" + std::string(field) + "'");
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string matrix_to_csv(const RandomMatrix& matrix) {
    std::string out = std::to_string(matrix.rows) + "," + std::to_string(matrix.cols) + "\n";
    for (std::size_t i = 0; i < matrix.rows; ++i) {
        for (std::size_t j = 0; j < matrix.cols; ++j) {
            if (j > 0) out += ',';
            out += format_double(matrix(i, j));
        }
        out += '\n';
    }
    return out;
}

RandomMatrix matrix_from_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw IoError("matrix CSV is empty");
    const auto header = parse_fields<std::size_t>(lines[0], 1);
    if (header.size() != 2 || header[0] == 0 || header[1] == 0)
        throw IoError("matrix CSV header must be 'm,n' with positive integers");
    RandomMatrix out;
    out.rows = header[0];
    out.cols = header[1];
    if (lines.size() - 1 != out.rows)
        throw IoError("matrix CSV header declares " + std::to_string(out.rows) + " rows but the body has " +
                      std::to_string(lines.size() - 1));
    out.entries.reserve(out.rows * out.cols);
    for (std::size_t i = 0; i < out.rows; ++i) {
        const auto values = parse_fields<double>(lines[i + 1], i + 2);
        if (values.size() != out.cols)
            throw IoError("matrix CSV row " + std::to_string(i) + " (line " + std::to_string(i + 2) + ") has " +
                          std::to_string(values.size()) + " entries, expected " + std::to_string(out.cols));
        for (double v : values) {
            if (!std::isfinite(v)) throw IoError("matrix CSV row " + std::to_string(i) + " has a non-finite entry");
            out.entries.push_back(v);
        }
    }
    return out;
}

void store_matrix_csv(const RandomMatrix& matrix, const std::filesystem::path& path) {
    write_file_atomic(path, matrix_to_csv(matrix));
}

RandomMatrix load_matrix_csv(const std::filesystem::path& path) { return matrix_from_csv(read_file(path)); }

json parse_json(std::string_view text, std::string_view origin) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw IoError(std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": malformed JSON");
    }
}

namespace {

void reject_unknown(const json& doc, const std::set<std::string>& allowed, std::string_view where) {
    if (!doc.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& item : doc.items())
        if (!allowed.count(item.key()))
            throw ConfigError("unknown key '" + item.key() + "' in " + std::string(where));
}

template <typename T>
T get_required(const json& doc, const char* key, std::string_view where) {
    if (!doc.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + std::string(where));
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + std::string(key) + "' in " + std::string(where) + " has the wrong type");
    }
}

std::size_t get_count(const json& doc, const char* key, std::string_view where) {
    const json& v = doc.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
        throw ConfigError("key '" + std::string(key) + "' in " + std::string(where) + " must be a nonnegative integer");
    return v.get<std::size_t>();
}

std::vector<double> get_vector(const json& v, std::string_view what) {
    if (!v.is_array()) throw IoError(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        if (!x.is_number()) throw IoError(std::string(what) + " must contain only numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

json family_to_json(const SubspaceFamily& family) {
    json members = json::array();
    for (const auto& m : family.members()) {
        json cols = json::array();
        const Subspace& w = m.direction;
        for (std::size_t j = 0; j < w.dim(); ++j) cols.push_back(std::vector<double>(w.column(j), w.column(j) + w.ambient_dim()));
        members.push_back({{"base", std::vector<double>(m.base_point.data(), m.base_point.data() + m.base_point.size())},
                           {"basis_columns", cols}});
    }
    return {{"n", family.ambient_dim()}, {"members", members}};
}

SubspaceFamily family_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("members"))
        throw IoError("family JSON needs keys 'n' and 'members'");
    if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 1) throw IoError("family 'n' must be a positive integer");
    const std::size_t n = doc["n"].get<std::size_t>();
    const json& members = doc["members"];
    if (!members.is_array() || members.empty()) throw IoError("family 'members' must be a nonempty array");
    std::vector<AffineSubspace> out;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const json& m = members[i];
        const std::string where = "member " + std::to_string(i);
        if (!m.is_object() || !m.contains("basis_columns")) throw IoError(where + " needs 'basis_columns'");
        const json& cols = m["basis_columns"];
        if (!cols.is_array() || cols.empty()) throw IoError(where + ": 'basis_columns' must be a nonempty array");
        Eigen::MatrixXd span(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const auto col = get_vector(cols[j], where + " basis column");
            if (col.size() != n) throw IoError(where + ": basis column " + std::to_string(j) + " has the wrong length");
            for (std::size_t r = 0; r < n; ++r) span(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = col[r];
        }
        Eigen::VectorXd base = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        if (m.contains("base")) {
            const auto b = get_vector(m["base"], where + " base");
            if (b.size() != n) throw IoError(where + ": base has the wrong length");
            for (std::size_t r = 0; r < n; ++r) base(static_cast<Eigen::Index>(r)) = b[r];
        }
        try {
            out.emplace_back(std::move(base), orthonormalize(span));
        } catch (const DegenerateInputError& e) {
            throw IoError(where + ": " + e.what());
        }
    }
    return SubspaceFamily(std::move(out));
}

SubspaceFamily load_family_json(const std::filesystem::path& path) {
    return family_from_json(parse_json(read_file(path), path.string()));
}

json ensemble_to_json(const EnsembleSpec& spec) {
    json out{{"kind", std::string(kind_name(spec.kind))}};
    if (spec.kind == EnsembleKind::iid_bounded) {
        out["density_bound"] = spec.density_bound;
        out["entry_psi2"] = spec.entry_psi2;
    }
    return out;
}

EnsembleSpec ensemble_from_json(const json& doc) {
    reject_unknown(doc, {"kind", "density_bound", "entry_psi2"}, "ensemble");
    const EnsembleKind kind = parse_kind(get_required<std::string>(doc, "kind", "ensemble"));
    EnsembleSpec spec;
    switch (kind) {
        case EnsembleKind::gaussian: spec = EnsembleSpec::gaussian(); break;
        case EnsembleKind::sphere_scaled: spec = EnsembleSpec::sphere_scaled(); break;
        case EnsembleKind::iid_bounded: spec = EnsembleSpec::iid_uniform(); break;
    }
    if (doc.contains("density_bound")) spec.density_bound = get_required<double>(doc, "density_bound", "ensemble");
    if (doc.contains("entry_psi2")) spec.entry_psi2 = get_required<double>(doc, "entry_psi2", "ensemble");
    validate(spec);
    return spec;
}

ExperimentConfig config_from_json(const json& doc) {
    static const std::set<std::string> kKeys{"n",     "k",    "p",          "D",           "ensemble", "family_kind",
                                             "family_path", "trials", "seed", "m_override", "parallelism"};
    reject_unknown(doc, kKeys, "config");
    ExperimentConfig c;
    if (doc.contains("family_kind")) c.family_kind = parse_family_kind(get_required<std::string>(doc, "family_kind", "config"));
    if (doc.contains("family_path")) c.family_path = get_required<std::string>(doc, "family_path", "config");
    const bool from_file = c.family_kind == FamilyKind::user_file;
    for (const char* key : {"n", "k", "p"}) {
        if (!doc.contains(key)) {
            if (from_file) continue;
            throw ConfigError("missing key '" + std::string(key) + "' in config");
        }
        const std::size_t v = get_count(doc, key, "config");
        if (std::string_view(key) == "n") c.n = v;
        if (std::string_view(key) == "k") c.k = v;
        if (std::string_view(key) == "p") c.p = v;
    }
    c.D = get_required<double>(doc, "D", "config");
    if (!doc.contains("trials")) throw ConfigError("missing key 'trials' in config");
    c.trials = get_count(doc, "trials", "config");
    if (!doc.contains("seed")) throw ConfigError("missing key 'seed' in config");
    c.seed = get_count(doc, "seed", "config");
    if (doc.contains("ensemble")) c.ensemble = ensemble_from_json(doc["ensemble"]);
    if (doc.contains("m_override") && !doc["m_override"].is_null()) c.m_override = get_count(doc, "m_override", "config");
    if (doc.contains("parallelism") && !doc["parallelism"].is_null()) {
        const std::size_t par = get_count(doc, "parallelism", "config");
        if (par < 1) throw ConfigError("parallelism must be >= 1");
        c.parallelism = static_cast<unsigned>(par);
    }
    if (from_file) {
        const SubspaceFamily family = load_family_json(c.family_path);
        c.n = family.ambient_dim();
        c.k = family.max_dim();
        c.p = family.size();
    }
    validate(c);
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json out{{"n", c.n},
             {"k", c.k},
             {"p", c.p},
             {"D", c.D},
             {"ensemble", ensemble_to_json(c.ensemble)},
             {"family_kind", std::string(family_kind_name(c.family_kind))},
             {"trials", c.trials},
             {"seed", c.seed},
             {"parallelism", c.parallelism}};
    if (!c.family_path.empty()) out["family_path"] = c.family_path;
    if (c.m_override) out["m_override"] = *c.m_override;
    return out;
}

namespace {
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

std::string report_to_csv(const DistortionReport& report) {
    std::string out = "member_index,sigma_min,sigma_max\n";
    for (std::size_t i = 0; i < report.per_subspace.size(); ++i)
        out += std::to_string(i) + "," + format_double(report.per_subspace[i].sigma_min) + "," +
               format_double(report.per_subspace[i].sigma_max) + "\n";
    return out;
}

json report_summary(const DistortionReport& report, const ScaleChoice& scale) {
    return {{"family_sigma_min", report.family_sigma_min},
            {"family_sigma_max", report.family_sigma_max},
            {"achieved_distortion", finite_or_null(report.achieved_distortion)},
            {"rank_collapse", report.rank_collapse()},
            {"feasible", scale.feasible},
            {"L", scale.L ? json(*scale.L) : json(nullptr)},
            {"D", scale.D}};
}

json trial_to_json(const TrialResult& t, bool with_timing) {
    json out{{"trial_index", t.trial_index},
             {"m_used", t.m_used},
             {"feasible", t.feasible},
             {"achieved_distortion", finite_or_null(t.achieved_distortion)},
             {"L", t.L ? json(*t.L) : json(nullptr)},
             {"family_sigma_min", t.family_sigma_min},
             {"family_sigma_max", t.family_sigma_max}};
    if (with_timing) out["wall_time"] = t.wall_time;
    return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
    std::string out = "m,trials,successes,success_rate,mean_achieved_distortion\n";
    for (const auto& pt : sweep.points)
        out += std::to_string(pt.m) + "," + std::to_string(pt.trials) + "," + std::to_string(pt.successes) + "," +
               format_double(pt.success_rate) + "," + format_double(pt.mean_achieved_distortion) + "\n";
    return out;
}

std::vector<Eigen::VectorXd> points_from_csv(std::string_view text) {
    std::vector<Eigen::VectorXd> points;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i].front() == '#') continue;
        const auto values = parse_fields<double>(lines[i], i + 1);
        if (!points.empty() && static_cast<std::size_t>(points.front().size()) != values.size())
            throw IoError("points file line " + std::to_string(i + 1) + " has " + std::to_string(values.size()) +
                          " coordinates, expected " + std::to_string(points.front().size()));
        points.emplace_back(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    }
    return points;
}

}  // namespace subembed::io
