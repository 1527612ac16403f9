#pragma once

// Report tables with a CSV and a JSON form that round-trip exactly, and
// JSON encodings of the library's result types.

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "moment_kernel.hpp"
#include "poly_engine.hpp"
#include "quad_twist.hpp"
#include "random_model.hpp"
#include "zeta_engine.hpp"

namespace zetalab {

using Json = nlohmann::ordered_json;
using Cell = std::variant<long long, double, std::string>;

/// Numbers print as the shortest string that reads back to the same double.
inline std::string format_number(double v)
{
    char buf[64];
    return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

inline std::string format_cell(const Cell& c)
{
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    return std::get<std::string>(c);
}

inline Cell parse_cell(std::string_view s)
{
    const char* b = s.data();
    const char* e = s.data() + s.size();
    long long i = 0;
    if (auto r = std::from_chars(b, e, i); r.ec == std::errc{} && r.ptr == e) return i;
    double d = 0.0;
    if (auto r = std::from_chars(b, e, d); r.ec == std::errc{} && r.ptr == e) return d;
    return std::string(s);
}

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void set(const std::string& key, const std::string& value)
    {
        for (auto& [k, v] : meta)
            if (k == key) {
                v = value;
                return;
            }
        meta.emplace_back(key, value);
    }
    void set(const std::string& key, double value) { set(key, format_number(value)); }

    std::string get(const std::string& key) const
    {
        for (const auto& [k, v] : meta)
            if (k == key) return v;
        return {};
    }

    bool operator==(const Table&) const = default;
};

inline std::string utc_timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// CSV: "# key=value" meta lines, a header row, then data rows.

inline std::string to_csv(const Table& t)
{
    auto check = [](const std::string& s) {
        if (s.find_first_of(",\n\r") != std::string::npos)
            detail::raise<IoError>("csv: field contains a separator: " + s);
    };
    std::string out;
    for (const auto& [k, v] : t.meta) {
        if (k.find('=') != std::string::npos || v.find('\n') != std::string::npos)
            detail::raise<IoError>("csv: bad meta entry " + k);
        out += "# " + k + "=" + v + "\n";
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        check(t.columns[i]);
        out += (i ? "," : "") + t.columns[i];
    }
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto s = format_cell(row[i]);
            check(s);
            out += (i ? "," : "") + s;
        }
        out += "\n";
    }
    return out;
}

inline Table parse_csv(std::string_view text)
{
    Table t;
    bool header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.rfind("# ", 0) == 0) {
            if (header) detail::raise<IoError>("csv: meta line after header");
            const auto body = line.substr(2);
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) detail::raise<IoError>("csv: meta line without '='");
            t.meta.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
            continue;
        }
        std::vector<std::string_view> fields;
        std::size_t f = 0;
        while (true) {
            const std::size_t c = line.find(',', f);
            fields.push_back(line.substr(f, c == std::string_view::npos ? std::string_view::npos : c - f));
            if (c == std::string_view::npos) break;
            f = c + 1;
        }
        if (!header) {
            for (auto s : fields) t.columns.emplace_back(s);
            header = true;
            continue;
        }
        if (fields.size() != t.columns.size()) detail::raise<IoError>("csv: row width does not match header");
        std::vector<Cell> row;
        for (auto s : fields) row.push_back(parse_cell(s));
        t.rows.push_back(std::move(row));
    }
    if (!header) detail::raise<IoError>("csv: missing header row");
    return t;
}

// JSON: {"meta": {...}, "columns": [...], "rows": [[...], ...]}

inline Json cell_to_json(const Cell& c)
{
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d)) return *d;
        return format_number(*d);
    }
    return std::get<std::string>(c);
}

inline Json to_json_doc(const Table& t)
{
    Json meta = Json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json r = Json::array();
        for (const auto& c : row) r.push_back(cell_to_json(c));
        rows.push_back(std::move(r));
    }
    return Json{{"meta", meta}, {"columns", t.columns}, {"rows", rows}};
}

inline std::string to_json_text(const Table& t) { return to_json_doc(t).dump(2) + "\n"; }

inline Table parse_json(std::string_view text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::exception& e) {
        detail::raise<IoError>(std::string("json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("meta") || !doc.contains("columns") || !doc.contains("rows"))
        detail::raise<IoError>("json: expected meta, columns and rows");
    Table t;
    for (const auto& [k, v] : doc["meta"].items()) t.meta.emplace_back(k, v.get<std::string>());
    for (const auto& c : doc["columns"]) t.columns.push_back(c.get<std::string>());
    for (const auto& r : doc["rows"]) {
        if (r.size() != t.columns.size()) detail::raise<IoError>("json: row width does not match columns");
        std::vector<Cell> row;
        for (const auto& c : r) {
            if (c.is_number_integer()) row.emplace_back(c.get<long long>());
            else if (c.is_number()) row.emplace_back(c.get<double>());
            else if (c.is_string()) {
                // only the non-finite spellings written by to_json_doc turn back into numbers
                const auto str = c.get<std::string>();
                if (str == "nan" || str == "-nan" || str == "inf" || str == "-inf")
                    row.push_back(parse_cell(str));
                else
                    row.emplace_back(str);
            }
            else detail::raise<IoError>("json: unsupported cell type");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

enum class Format { csv, json };

inline std::string render(const Table& t, Format f) { return f == Format::csv ? to_csv(t) : to_json_text(t); }

inline Table parse_table(std::string_view text, Format f) { return f == Format::csv ? parse_csv(text) : parse_json(text); }

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) detail::raise<IoError>("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) detail::raise<IoError>("failed writing " + path.string());
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::raise<IoError>("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// JSON encodings

inline void to_json(Json& j, const ExponentSchedule& s)
{
    j = Json{{"k", s.k},
             {"logT", s.log_height},
             {"betas", s.levels},
             {"log_betas", Json::array()},
             {"cap_index", s.cap_index},
             {"overrides", {{"ratio", s.ratio}, {"log_threshold", s.log_threshold}, {"log_base", s.log_base}}}};
    for (double v : s.log_levels) j["log_betas"].push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
}

inline void from_json(const Json& j, ExponentSchedule& s)
{
    s.k = j.at("k").get<double>();
    s.log_height = j.at("logT").get<double>();
    s.levels = j.at("betas").get<std::vector<double>>();
    s.log_levels.clear();
    for (const auto& v : j.at("log_betas"))
        s.log_levels.push_back(v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>());
    s.cap_index = j.at("cap_index").get<int>();
    const auto& o = j.at("overrides");
    s.ratio = o.at("ratio").get<double>();
    s.log_threshold = o.at("log_threshold").get<double>();
    s.log_base = o.at("log_base").get<double>();
}

inline void to_json(Json& j, const BetaSchedule& s) { to_json(j, static_cast<const ExponentSchedule&>(s)); }
inline void from_json(const Json& j, BetaSchedule& s) { from_json(j, static_cast<ExponentSchedule&>(s)); }
inline void to_json(Json& j, const AlphaSchedule& s) { to_json(j, static_cast<const ExponentSchedule&>(s)); }
inline void from_json(const Json& j, AlphaSchedule& s) { from_json(j, static_cast<ExponentSchedule&>(s)); }

inline void to_json(Json& j, const DirichletPolynomial& p)
{
    Json terms = Json::array();
    for (const auto& t : p.terms) terms.push_back(Json::array({t.prime, t.coeff}));
    j = Json{{"label", to_string(p.label)}, {"i", p.index_i}, {"j", p.index_j}, {"freq", p.freq}, {"terms", terms}};
}

inline void from_json(const Json& j, DirichletPolynomial& p)
{
    const auto label = j.at("label").get<std::string>();
    p.label = PolyLabel::custom;
    for (auto l : {PolyLabel::G, PolyLabel::F, PolyLabel::P, PolyLabel::prop1_main, PolyLabel::prop1_squares})
        if (label == to_string(l)) p.label = l;
    p.index_i = j.at("i").get<int>();
    p.index_j = j.at("j").get<int>();
    p.freq = j.at("freq").get<int>();
    p.terms.clear();
    for (const auto& t : j.at("terms")) p.add(t.at(0).get<std::uint64_t>(), t.at(1).get<double>());
}

inline void to_json(Json& j, const SplitMomentReport& r)
{
    Json classes = Json::array();
    for (const auto& c : r.classes) {
        Json e{{"label", c.label},
               {"count", c.count},
               {"measure_fraction", c.measure_fraction},
               {"contribution", c.contribution},
               {"stderr", c.stderr_}};
        e["surrogate"] = c.surrogate ? Json(*c.surrogate) : Json(nullptr);
        e["surrogate_stderr"] = c.surrogate_stderr ? Json(*c.surrogate_stderr) : Json(nullptr);
        classes.push_back(std::move(e));
    }
    j = Json{{"k", r.k},           {"T", r.T},
             {"samples", r.samples}, {"seed", r.seed},
             {"schedule", r.schedule}, {"classes", classes},
             {"total", r.total},   {"total_stderr", r.total_stderr},
             {"unsplit", r.unsplit}, {"unsplit_stderr", r.unsplit_stderr},
             {"consistent", r.consistent}};
}

inline void to_json(Json& j, const MgfResult& r)
{
    j = Json{{"monte_carlo", r.monte_carlo},
             {"stderr", r.stderr_},
             {"exact_product", r.exact_product},
             {"gaussian", r.gaussian},
             {"variance", r.variance}};
}

inline void to_json(Json& j, const ModelConfig& c)
{
    j = Json{{"x", c.x},
             {"weight_scheme", to_string(c.weight_scheme)},
             {"k", c.k},
             {"n_samples", c.n_samples},
             {"seed", c.seed}};
}

inline void to_json(Json& j, const MomentEstimate& m)
{
    j = Json{{"k", m.k},         {"t0", m.t0},       {"t1", m.t1},
             {"value", m.value}, {"nodes", m.nodes}, {"max_node_spacing", m.max_node_spacing}};
}

inline void to_json(Json& j, const Theorem2Report& r)
{
    j = Json{{"k", r.k},         {"X", r.X},           {"tol", r.tol},
             {"count", r.count}, {"count_pos", r.count_pos}, {"count_neg", r.count_neg},
             {"sum", r.sum},     {"sum_pos", r.sum_pos},     {"sum_neg", r.sum_neg},
             {"normalizer", r.normalizer}, {"ratio", r.ratio}, {"ratio_pos", r.ratio_pos},
             {"ratio_neg", r.ratio_neg}, {"min_value", r.min_value}};
}

} // namespace zetalab
