#pragma once

// Deterministic I/O for the laboratory: INI-style run configs with
// line-number diagnostics, CSV serialization with LF endings and floats at
// 17 significant digits (value-preserving), FNV-1a content hashing, JSON
// conversion for every module report, and the run-manifest writer that
// records each emitted file with its content hash.  Identical inputs must
// produce byte-identical outputs; nothing here consults locale, time, or
// environment.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "conelab/cone_properties.hpp"
#include "conelab/cones.hpp"
#include "conelab/deformation.hpp"
#include "conelab/diagnostics.hpp"
#include "conelab/geometry.hpp"
#include "conelab/solver.hpp"
#include "conelab/viscosity.hpp"

namespace conelab::io {

using geometry::CohomOneModel;
using geometry::EigenField;
using geometry::GridField;
using nlohmann::json;

// Configuration / serialization failure with a 1-based line number when one
// is known (-1 otherwise).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, int line_ = -1)
      : std::runtime_error(line_ >= 1
                               ? "line " + std::to_string(line_) + ": " + msg
                               : msg),
        line(line_) {}
  int line;
};

// ---------------------------------------------------------------------------
// Strict scalar parsing (shared by the INI reader, CSV reader, field specs).

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto issp = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && issp(s.front())) s.remove_prefix(1);
  while (!s.empty() && issp(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

inline double parse_double_strict(std::string_view text,
                                  const std::string& what, int line = -1) {
  const std::string_view s = detail::trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("cannot parse '" + std::string(s) + "' as a real for " +
                          what,
                      line);
  return value;
}

inline long long parse_int_strict(std::string_view text,
                                  const std::string& what, int line = -1) {
  const std::string_view s = detail::trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("cannot parse '" + std::string(s) +
                          "' as an integer for " + what,
                      line);
  return value;
}

inline bool parse_bool_strict(std::string_view text, const std::string& what,
                              int line = -1) {
  const std::string_view s = detail::trim(text);
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError("cannot parse '" + std::string(s) + "' as a boolean for " +
                        what,
                    line);
}

// ---------------------------------------------------------------------------
// INI-style run configuration.
//
// Grammar: optional [section] headers; 'key = value' lines; full-line
// comments starting with '#' or ';'.  Values are taken verbatim after
// trimming (no inline comments, no quoting).  Keys are addressed as
// "section.key" ("key" alone before any section header).  Duplicate keys
// are rejected with both line numbers.

class IniConfig {
 public:
  static IniConfig from_string(std::string text) {
    IniConfig cfg;
    cfg.raw_ = std::move(text);
    std::string section;
    int lineno = 0;
    std::istringstream in(cfg.raw_);
    for (std::string line; std::getline(in, line);) {
      ++lineno;
      const std::string_view body = detail::trim(line);
      if (body.empty() || body.front() == '#' || body.front() == ';') continue;
      if (body.front() == '[') {
        if (body.back() != ']')
          throw ConfigError("section header does not end with ']'", lineno);
        const std::string_view name = detail::trim(body.substr(1, body.size() - 2));
        if (name.empty())
          throw ConfigError("empty section name", lineno);
        section = std::string(name);
        continue;
      }
      const size_t eq = body.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("expected 'key = value' or '[section]'", lineno);
      const std::string_view key = detail::trim(body.substr(0, eq));
      const std::string_view value = detail::trim(body.substr(eq + 1));
      if (key.empty()) throw ConfigError("empty key", lineno);
      const std::string full =
          section.empty() ? std::string(key) : section + "." + std::string(key);
      if (auto it = cfg.lines_.find(full); it != cfg.lines_.end())
        throw ConfigError("duplicate key '" + full + "' (first set on line " +
                              std::to_string(it->second) + ")",
                          lineno);
      cfg.values_[full] = std::string(value);
      cfg.lines_[full] = lineno;
    }
    return cfg;
  }

  static IniConfig from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
  }

  const std::string& raw() const { return raw_; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  int line_of(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? -1 : it->second;
  }
  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
  }

  const std::string& require_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw ConfigError("missing required key '" + key + "'");
    return it->second;
  }
  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double require_double(const std::string& key) const {
    return parse_double_strict(require_string(key), "'" + key + "'",
                               line_of(key));
  }
  double get_double(const std::string& key, double fallback) const {
    return has(key) ? require_double(key) : fallback;
  }

  long long require_int(const std::string& key) const {
    return parse_int_strict(require_string(key), "'" + key + "'",
                            line_of(key));
  }
  long long get_int(const std::string& key, long long fallback) const {
    return has(key) ? require_int(key) : fallback;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    return has(key) ? parse_bool_strict(require_string(key), "'" + key + "'",
                                        line_of(key))
                    : fallback;
  }

  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto part : detail::split(require_string(key), ','))
      out.push_back(
          parse_double_strict(part, "'" + key + "'", line_of(key)));
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  std::string raw_;
};

// ---------------------------------------------------------------------------
// Number formatting and CSV.

// 17 significant digits: enough to reproduce any double exactly on re-parse.
inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string model_metadata_line(const CohomOneModel& model,
                                       std::string_view extra = "") {
  std::string line = "# n=" + std::to_string(model.n) +
                     ",kappa=" + format_double(model.kappa) +
                     ",L=" + format_double(model.L) +
                     ",m=" + std::to_string(model.m) +
                     ",vol_fiber=" + format_double(model.vol_fiber);
  if (!extra.empty()) line += "," + std::string(extra);
  line += "\n";
  return line;
}

// Columns (t, <names>...) over the periodic grid, LF endings throughout.
inline std::string grid_fields_to_csv(
    const CohomOneModel& model,
    std::span<const std::pair<std::string, const GridField*>> columns,
    std::string_view extra_metadata = "") {
  for (const auto& [name, f] : columns)
    if (f->size() != model.m)
      throw std::invalid_argument("grid_fields_to_csv: column '" + name +
                                  "' has size " + std::to_string(f->size()) +
                                  ", grid has " + std::to_string(model.m));
  std::string out = model_metadata_line(model, extra_metadata);
  out += "t";
  for (const auto& [name, f] : columns) out += "," + name;
  out += "\n";
  for (int i = 0; i < model.m; ++i) {
    out += format_double(model.grid_t(i));
    for (const auto& [name, f] : columns) out += "," + format_double((*f)[i]);
    out += "\n";
  }
  return out;
}

inline std::string grid_field_to_csv(const CohomOneModel& model,
                                     const std::string& name,
                                     const GridField& f,
                                     std::string_view extra_metadata = "") {
  const std::pair<std::string, const GridField*> col{name, &f};
  return grid_fields_to_csv(model, std::span(&col, 1), extra_metadata);
}

// Columns (t, lambda_1..lambda_n); the metadata line names the
// normalization so downstream readers know which endomorphism was taken.
inline std::string eigen_field_to_csv(const CohomOneModel& model,
                                      const EigenField& field) {
  if (field.size() != model.m)
    throw std::invalid_argument("eigen_field_to_csv: field/grid size mismatch");
  const std::string norm =
      field.norm == geometry::Normalization::MetricInverse
          ? "metric_inverse"
          : "background_inverse";
  std::string out = model_metadata_line(model, "normalization=" + norm);
  out += "t";
  for (int j = 1; j <= field.n; ++j) out += ",lambda_" + std::to_string(j);
  out += "\n";
  for (int i = 0; i < model.m; ++i) {
    out += format_double(model.grid_t(i));
    for (double x : field.pts[static_cast<size_t>(i)])
      out += "," + format_double(x);
    out += "\n";
  }
  return out;
}

struct CsvTable {
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const {
    for (size_t j = 0; j < columns.size(); ++j)
      if (columns[j] == name) return static_cast<int>(j);
    throw ConfigError("csv has no column '" + name + "'");
  }
  std::vector<double> column(const std::string& name) const {
    const int j = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[static_cast<size_t>(j)]);
    return out;
  }
};

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  int lineno = 0;
  bool header_seen = false;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      // "# key=value,key=value" metadata; fragments without '=' are skipped.
      for (const auto part : detail::split(body.substr(1), ',')) {
        const size_t eq = part.find('=');
        if (eq == std::string_view::npos) continue;
        table.metadata[std::string(detail::trim(part.substr(0, eq)))] =
            std::string(detail::trim(part.substr(eq + 1)));
      }
      continue;
    }
    const auto cells = detail::split(body, ',');
    if (!header_seen) {
      for (const auto c : cells)
        table.columns.push_back(std::string(detail::trim(c)));
      header_seen = true;
      continue;
    }
    if (cells.size() != table.columns.size())
      throw ConfigError("expected " + std::to_string(table.columns.size()) +
                            " fields, got " + std::to_string(cells.size()),
                        lineno);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto c : cells)
      row.push_back(parse_double_strict(c, "csv cell", lineno));
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ConfigError("csv has no header row");
  return table;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

inline CsvTable read_csv_file(const std::string& path) {
  return parse_csv(read_text_file(path));
}

inline GridField grid_field_from_csv(const CsvTable& table, int expected_m,
                                     const std::string& column = "u") {
  const std::vector<double> col = table.column(column);
  if (static_cast<int>(col.size()) != expected_m)
    throw ConfigError("csv column '" + column + "' has " +
                      std::to_string(col.size()) + " rows, grid needs " +
                      std::to_string(expected_m));
  GridField f(col.size());
  for (size_t i = 0; i < col.size(); ++i) f[static_cast<int>(i)] = col[i];
  return f;
}

// ---------------------------------------------------------------------------
// Content hashing (FNV-1a, 64-bit) for the run manifest.

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string content_hash(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

// ---------------------------------------------------------------------------
// Cone specs: JSON round trip and config parsing.

inline json json_of(const cones::ConeSpec& cone) {
  if (cone.kind() == cones::ConeSpec::Kind::ElemSym)
    return json{{"kind", "gamma_k"}, {"n", cone.dimension()}, {"k", cone.k()}};
  return json{{"kind", "tau_transform"},
              {"tau_prime", cone.tau_prime()},
              {"base", json_of(cone.base())}};
}

inline cones::ConeSpec cone_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw ConfigError("cone json must be an object with a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gamma_k")
    return cones::ConeSpec::gamma_k(j.at("n").get<int>(),
                                    j.at("k").get<int>());
  if (kind == "tau_transform")
    return cones::ConeSpec::tau_transform(cone_from_json(j.at("base")),
                                          j.at("tau_prime").get<double>());
  throw ConfigError("unknown cone kind '" + kind + "'");
}

// [cone] n = ..., k = ..., optional tau_prime = ... (single transform).
inline cones::ConeSpec cone_from_config(const IniConfig& cfg) {
  const int n = static_cast<int>(cfg.require_int("cone.n"));
  const int k = static_cast<int>(cfg.require_int("cone.k"));
  cones::ConeSpec cone = cones::ConeSpec::gamma_k(n, k);
  if (cfg.has("cone.tau_prime"))
    cone = cones::ConeSpec::tau_transform(cone,
                                          cfg.require_double("cone.tau_prime"));
  return cone;
}

// [model] n, kappa, m, optional L (default 2 pi), vol_fiber (default: round
// fiber volume for kappa > 0, else 1).
inline CohomOneModel model_from_config(const IniConfig& cfg) {
  return CohomOneModel::make(
      static_cast<int>(cfg.require_int("model.n")),
      cfg.require_double("model.kappa"),
      static_cast<int>(cfg.require_int("model.m")),
      cfg.get_double("model.L", 2.0 * std::numbers::pi),
      cfg.get_double("model.vol_fiber", -1.0));
}

// ---------------------------------------------------------------------------
// Initial/test field specs: "zero", "constant:C", "sine:AMP[,MODE[,PHASE]]",
// "wedge:DEPTH[,CENTER]", "csv:PATH[,COLUMN]".

inline GridField parse_field_spec(const std::string& spec,
                                  const CohomOneModel& model) {
  const size_t colon = spec.find(':');
  const std::string form = spec.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  const auto parts = detail::split(args, ',');
  const auto arg = [&](size_t i) -> std::string_view { return parts[i]; };

  if (form == "zero") {
    if (!args.empty()) throw ConfigError("field spec 'zero' takes no arguments");
    return GridField::constant(model.m, 0.0);
  }
  if (form == "constant") {
    if (args.empty()) throw ConfigError("field spec 'constant' needs a value");
    return GridField::constant(
        model.m, parse_double_strict(arg(0), "constant field level"));
  }
  if (form == "sine") {
    if (args.empty() || parts.size() > 3)
      throw ConfigError("field spec 'sine' takes amp[,mode[,phase]]");
    const double amp = parse_double_strict(arg(0), "sine amplitude");
    const int mode = parts.size() > 1
                         ? static_cast<int>(parse_int_strict(arg(1), "sine mode"))
                         : 1;
    const double phase =
        parts.size() > 2 ? parse_double_strict(arg(2), "sine phase") : 0.0;
    return geometry::make_sine_field(model, amp, mode, phase);
  }
  if (form == "wedge") {
    if (args.empty() || parts.size() > 2)
      throw ConfigError("field spec 'wedge' takes depth[,center]");
    const double depth = parse_double_strict(arg(0), "wedge depth");
    const double center = parts.size() > 1
                              ? parse_double_strict(arg(1), "wedge center")
                              : 0.5 * model.L;
    return geometry::make_wedge_field(model, depth, center);
  }
  if (form == "csv") {
    if (args.empty() || parts.size() > 2)
      throw ConfigError("field spec 'csv' takes path[,column]");
    const std::string column =
        parts.size() > 1 ? std::string(detail::trim(arg(1))) : "u";
    return grid_field_from_csv(
        read_csv_file(std::string(detail::trim(arg(0)))), model.m, column);
  }
  throw ConfigError("unknown field spec '" + form +
                    "' (want zero|constant|sine|wedge|csv)");
}

// ---------------------------------------------------------------------------
// JSON conversion for module reports.  Non-finite values serialize as null.

inline json json_of(const CohomOneModel& model) {
  return json{{"n", model.n},
              {"kappa", model.kappa},
              {"L", model.L},
              {"m", model.m},
              {"vol_fiber", model.vol_fiber}};
}

inline json json_of(const cone_properties::PropertyResult& r) {
  return json{{"name", r.name},         {"checked", r.checked},
              {"failures", r.failures}, {"worst", r.worst},
              {"detail", r.detail},     {"passed", r.passed()}};
}

inline json json_of(const cone_properties::SuiteReport& rep) {
  json props = json::array();
  for (const auto& r : rep.results) props.push_back(json_of(r));
  return json{{"passed", rep.passed()},
              {"total_failures", rep.total_failures()},
              {"properties", std::move(props)}};
}

inline json json_of(const viscosity::InclusionReport& rep) {
  json rungs = json::array();
  for (const auto& r : rep.rungs)
    rungs.push_back(json{{"eps", r.eps},
                         {"extreme_margin", r.extreme_margin},
                         {"included_points", r.included_points}});
  return json{{"side", viscosity::to_string(rep.side)},
              {"tol", rep.tol},
              {"heuristic", rep.heuristic},
              {"rungs", std::move(rungs)},
              {"point_margins", rep.point_margins},
              {"margin", rep.margin},
              {"stabilized", rep.stabilized},
              {"verdict", rep.verdict}};
}

inline json json_of(const diagnostics::PinchingReport& rep) {
  return json{{"t", rep.t},
              {"slack", rep.slack},
              {"argmin", rep.argmin},
              {"min_cone_margin", rep.min_cone_margin}};
}

inline json json_of(const diagnostics::FunctionalReport& rep) {
  json comps = json::object();
  for (const auto& [k, v] : rep.components) comps[k] = v;
  return json{{"name", rep.name},
              {"value", rep.value},
              {"caveat", rep.caveat},
              {"components", std::move(comps)},
              {"quadrature",
               json{{"m", rep.quadrature.m},
                    {"dt", rep.quadrature.dt},
                    {"vol_fiber", rep.quadrature.vol_fiber}}}};
}

inline json json_of(const solver::SolverState& st) {
  return json{{"tau", st.tau},
              {"status", solver::to_string(st.status)},
              {"newton_iters", st.newton_iters},
              {"residual_norm", st.residual_norm},
              {"min_margin", st.min_margin},
              {"min_u", st.min_u},
              {"max_u", st.max_u}};
}

inline json json_of(const solver::ContinuationResult& cont) {
  json states = json::array();
  for (const auto& st : cont.states) states.push_back(json_of(st));
  return json{{"reached_target", cont.reached_target},
              {"tau_reached", cont.tau_reached},
              {"delta_start", cont.delta},
              {"stall_detail", cont.stall_detail},
              {"states", std::move(states)}};
}

inline json json_of(const solver::EigenpairResult& eig) {
  json ladder = json::array();
  for (const auto& [beta, mu] : eig.ladder)
    ladder.push_back(json{{"beta", beta}, {"mu", mu}});
  return json{{"tau", eig.tau},
              {"mu", eig.mu},
              {"stabilized", eig.stabilized},
              {"ladder", std::move(ladder)},
              {"final_state", json_of(eig.final_state)}};
}

inline json json_of(const solver::ProbeReport& rep) {
  json j{{"outcome", solver::to_string(rep.outcome)},
         {"tau_reached", rep.tau_reached},
         {"detail", rep.detail}};
  if (rep.final_state) j["final_state"] = json_of(*rep.final_state);
  return j;
}

inline json json_of(const deformation::DeformationParams& p) {
  std::vector<double> xhat(p.xhat.data(), p.xhat.data() + p.xhat.size());
  return json{{"n", p.n},   {"alpha", p.alpha}, {"mu", p.mu},
              {"nu", p.nu}, {"R", p.R},         {"R_A", p.R_A},
              {"tau", p.tau}, {"xhat", std::move(xhat)}};
}

inline json json_of(const deformation::ExpansionReport& rep) {
  return json{{"remainder_ratio", rep.remainder_ratio},
              {"ratio_max", rep.ratio_max},
              {"ratio_min", rep.ratio_min},
              {"delta_pointwise", rep.delta_pointwise},
              {"delta", rep.delta}};
}

// ---------------------------------------------------------------------------
// Run outputs and the manifest.  Every file written through OutputWriter is
// recorded (path, size, content hash); the manifest embeds the config text
// verbatim so a run is reproducible from its artifacts alone.

class OutputWriter {
 public:
  explicit OutputWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& relpath, std::string_view content) {
    write_text_file(dir_ / relpath, content);
    records_.push_back(json{{"path", relpath},
                            {"bytes", content.size()},
                            {"hash", content_hash(content)}});
  }

  json manifest(const std::string& command, const std::string& config_text,
                const json& parameters) const {
    return json{{"tool", "conelab"},
                {"schema", "conelab-run-manifest/1"},
                {"command", command},
                {"config", config_text},
                {"parameters", parameters},
                {"outputs", records_}};
  }

  // The manifest itself is written outside the recorded output list.
  void write_manifest(const std::string& command,
                      const std::string& config_text, const json& parameters) {
    write_text_file(dir_ / "manifest.json",
                    manifest(command, config_text, parameters).dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  json records_ = json::array();
};

}  // namespace conelab::io
