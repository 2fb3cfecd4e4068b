#pragma once

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scorebands/asymptotics.hpp"
#include "scorebands/bands.hpp"
#include "scorebands/errors.hpp"
#include "scorebands/panel.hpp"
#include "scorebands/scoring.hpp"
#include "scorebands/simulation.hpp"

namespace scorebands::io {

namespace detail {

inline std::string csv_escape(const std::string& field) {
  bool needs_quotes = false;
  for (const char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  if (quoted) {
    throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(current));
  return fields;
}

inline double parse_double(const std::string& token, std::size_t line_no) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse number '" + token + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": non-finite value '" + token + "'");
  }
  return value;
}

inline bool parse_long(const std::string& token, long& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && !token.empty();
}

/// Shortest decimal representation that round-trips.
inline std::string format_full(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

/// Display formatting for result CSVs: 6 significant digits.
inline std::string format_display(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (lines.empty()) throw ParseError("file '" + path.string() + "' is empty");
  return lines;
}

/// Maps the distinct time tokens to consecutive integers: numerically when all
/// tokens are integers, lexicographically otherwise (ISO-8601 strings sort
/// chronologically).
inline std::map<std::string, std::size_t> index_time_tokens(const std::set<std::string>& tokens) {
  std::vector<std::string> ordered(tokens.begin(), tokens.end());
  bool all_integers = true;
  for (const auto& token : ordered) {
    long parsed = 0;
    if (!parse_long(token, parsed)) {
      all_integers = false;
      break;
    }
  }
  if (all_integers) {
    std::sort(ordered.begin(), ordered.end(), [](const std::string& a, const std::string& b) {
      long la = 0;
      long lb = 0;
      parse_long(a, la);
      parse_long(b, lb);
      return la < lb;
    });
  } else {
    std::sort(ordered.begin(), ordered.end());
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ordered.size(); ++i) index[ordered[i]] = i;
  return index;
}

}  // namespace detail

/// Sidecar header declaring the dimension order and the method axis of a
/// panel or forecast file.
struct PanelHeader {
  std::vector<DimensionSpec> dims;
};

inline PanelHeader load_panel_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open header file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& err) {
    throw ParseError("header '" + path.string() + "': " + err.what());
  }
  if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty()) {
    throw ParseError("header '" + path.string() + "': expected a non-empty 'dims' array");
  }
  PanelHeader header;
  for (const auto& entry : doc["dims"]) {
    DimensionSpec dim;
    dim.name = entry.at("name").get<std::string>();
    dim.labels = entry.at("labels").get<std::vector<std::string>>();
    dim.is_method_axis = entry.value("method_axis", false);
    header.dims.push_back(std::move(dim));
  }
  return header;
}

inline void write_panel_header(const std::filesystem::path& path, const PanelHeader& header) {
  nlohmann::json doc;
  doc["dims"] = nlohmann::json::array();
  for (const auto& dim : header.dims) {
    doc["dims"].push_back({{"name", dim.name},
                           {"labels", dim.labels},
                           {"method_axis", dim.is_method_axis}});
  }
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write header file '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

namespace detail {

struct TableLayout {
  std::size_t time_col = 0;
  std::vector<std::size_t> dim_cols;  // one per header dim, in header order
};

inline TableLayout match_columns(const std::vector<std::string>& csv_header,
                                 const PanelHeader& header,
                                 const std::filesystem::path& path) {
  const auto find_col = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(csv_header.begin(), csv_header.end(), name);
    if (it == csv_header.end()) {
      throw ParseError("file '" + path.string() + "': missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - csv_header.begin());
  };
  TableLayout layout;
  layout.time_col = find_col("time");
  for (const auto& dim : header.dims) layout.dim_cols.push_back(find_col(dim.name));
  return layout;
}

inline std::vector<std::map<std::string, std::size_t>> label_indices(const PanelHeader& header) {
  std::vector<std::map<std::string, std::size_t>> maps(header.dims.size());
  for (std::size_t k = 0; k < header.dims.size(); ++k) {
    for (std::size_t i = 0; i < header.dims[k].labels.size(); ++i) {
      maps[k][header.dims[k].labels[i]] = i;
    }
  }
  return maps;
}

}  // namespace detail

/// Loads a long-format panel CSV (columns: time, one per dimension, value)
/// into a dense ScorePanel in the header's declared dimension order. Every
/// (time x label tuple) combination must appear exactly once.
inline ScorePanel load_panel(const std::filesystem::path& csv_path, const PanelHeader& header) {
  const auto lines = detail::read_lines(csv_path);
  const auto csv_header = detail::split_csv_line(lines[0], 1);
  const auto layout = detail::match_columns(csv_header, header, csv_path);
  const auto value_col = [&]() -> std::size_t {
    const auto it = std::find(csv_header.begin(), csv_header.end(), "value");
    if (it == csv_header.end()) {
      throw ParseError("file '" + csv_path.string() + "': missing column 'value'");
    }
    return static_cast<std::size_t>(it - csv_header.begin());
  }();
  const auto labels = detail::label_indices(header);

  struct Row {
    std::string time;
    std::size_t column;
    double value;
    std::size_t line_no;
  };
  std::vector<Row> rows;
  rows.reserve(lines.size() - 1);
  std::set<std::string> time_tokens;

  std::size_t n_cols = 1;
  for (const auto& dim : header.dims) n_cols *= dim.labels.size();
  std::vector<std::size_t> strides(header.dims.size(), 1);
  for (std::size_t k = header.dims.size() - 1; k-- > 0;) {
    strides[k] = strides[k + 1] * header.dims[k + 1].labels.size();
  }

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = detail::split_csv_line(lines[li], li + 1);
    if (fields.size() != csv_header.size()) {
      throw ParseError("line " + std::to_string(li + 1) + ": expected " +
                       std::to_string(csv_header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    Row row;
    row.time = fields[layout.time_col];
    row.line_no = li + 1;
    row.column = 0;
    for (std::size_t k = 0; k < header.dims.size(); ++k) {
      const auto& token = fields[layout.dim_cols[k]];
      const auto it = labels[k].find(token);
      if (it == labels[k].end()) {
        throw ParseError("line " + std::to_string(li + 1) + ": unknown label '" + token +
                         "' in dimension '" + header.dims[k].name + "'");
      }
      row.column += it->second * strides[k];
    }
    row.value = detail::parse_double(fields[value_col], li + 1);
    time_tokens.insert(row.time);
    rows.push_back(std::move(row));
  }
  if (time_tokens.size() < 2) {
    throw ParseError("file '" + csv_path.string() + "': needs at least two time points");
  }

  const auto time_index = detail::index_time_tokens(time_tokens);
  const std::size_t n_time = time_index.size();
  std::vector<double> values(n_time * n_cols, 0.0);
  std::vector<std::size_t> filled_at(n_time * n_cols, 0);  // line number, 0 = empty
  for (const auto& row : rows) {
    const std::size_t cell = time_index.at(row.time) * n_cols + row.column;
    if (filled_at[cell] != 0) {
      throw DuplicateKeyError("duplicate cell for time '" + row.time + "', column " +
                              std::to_string(row.column) + " (lines " +
                              std::to_string(filled_at[cell]) + " and " +
                              std::to_string(row.line_no) + ")");
    }
    filled_at[cell] = row.line_no;
    values[cell] = row.value;
  }

  ScorePanel panel(header.dims, n_time, std::move(values));
  for (std::size_t t = 0; t < n_time; ++t) {
    for (std::size_t p = 0; p < n_cols; ++p) {
      if (filled_at[t * n_cols + p] == 0) {
        const auto token = std::find_if(time_index.begin(), time_index.end(),
                                        [&](const auto& kv) { return kv.second == t; });
        throw CompletenessError("missing cell: time '" + token->first + "', labels '" +
                                panel.column_label(p) + "'");
      }
    }
  }
  return panel;
}

/// Writes a panel to CSV plus a JSON header sidecar; values use full
/// round-trip precision so write-then-load reproduces the panel bitwise.
/// Times are written as the integers 0..N-1.
inline void write_panel(const std::filesystem::path& csv_path,
                        const std::filesystem::path& header_path, const ScorePanel& panel) {
  write_panel_header(header_path, PanelHeader{panel.dims()});
  std::ofstream out(csv_path);
  if (!out) throw ParseError("cannot write file '" + csv_path.string() + "'");
  out << "time";
  for (const auto& dim : panel.dims()) out << ',' << detail::csv_escape(dim.name);
  out << ",value\n";
  for (std::size_t t = 0; t < panel.n_time(); ++t) {
    for (std::size_t p = 0; p < panel.n_cols(); ++p) {
      const auto tuple = panel.column_tuple(p);
      out << t;
      for (std::size_t k = 0; k < tuple.size(); ++k) {
        out << ',' << detail::csv_escape(panel.dims()[k].labels[tuple[k]]);
      }
      out << ',' << detail::format_full(panel.value(t, p)) << '\n';
    }
  }
}

/// Scoring rule selection for score_forecasts.
struct ScoringRule {
  enum class Kind { se, mv_se, qs, crps, energy };
  Kind kind = Kind::se;
  double tau = 0.5;  // qs only
};

inline ScoringRule parse_scoring_rule(const std::string& name, std::optional<double> tau) {
  ScoringRule rule;
  if (name == "se") rule.kind = ScoringRule::Kind::se;
  else if (name == "mv_se") rule.kind = ScoringRule::Kind::mv_se;
  else if (name == "qs") rule.kind = ScoringRule::Kind::qs;
  else if (name == "crps") rule.kind = ScoringRule::Kind::crps;
  else if (name == "energy") rule.kind = ScoringRule::Kind::energy;
  else throw InvalidInputError("unknown scoring rule '" + name + "'");
  if (rule.kind == ScoringRule::Kind::qs) {
    if (!tau) throw InvalidInputError("scoring rule qs requires --tau");
    rule.tau = *tau;
  }
  return rule;
}

/// Scores a long-format forecast file (columns: time, dimensions, member,
/// value columns) into a ScorePanel; one score per (time x cell). The member
/// column holds an integer ensemble index or the literal "obs". Optionally
/// sums scores over a subset of non-method dimensions.
inline ScorePanel score_forecasts(const std::filesystem::path& csv_path,
                                  const PanelHeader& header, const ScoringRule& rule,
                                  const std::vector<std::string>& aggregate_dims = {}) {
  const auto lines = detail::read_lines(csv_path);
  const auto csv_header = detail::split_csv_line(lines[0], 1);
  const auto layout = detail::match_columns(csv_header, header, csv_path);
  const auto member_col = [&]() -> std::size_t {
    const auto it = std::find(csv_header.begin(), csv_header.end(), "member");
    if (it == csv_header.end()) {
      throw ParseError("file '" + csv_path.string() + "': missing column 'member'");
    }
    return static_cast<std::size_t>(it - csv_header.begin());
  }();

  // Every column that is neither time, a dimension nor member is a value
  // component, in file order.
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < csv_header.size(); ++c) {
    if (c == layout.time_col || c == member_col) continue;
    if (std::find(layout.dim_cols.begin(), layout.dim_cols.end(), c) != layout.dim_cols.end()) {
      continue;
    }
    value_cols.push_back(c);
  }
  if (value_cols.empty()) {
    throw ParseError("file '" + csv_path.string() + "': no value columns found");
  }
  const std::size_t d = value_cols.size();

  const auto labels = detail::label_indices(header);
  std::size_t n_cols = 1;
  for (const auto& dim : header.dims) n_cols *= dim.labels.size();
  std::vector<std::size_t> strides(header.dims.size(), 1);
  for (std::size_t k = header.dims.size() - 1; k-- > 0;) {
    strides[k] = strides[k + 1] * header.dims[k + 1].labels.size();
  }

  struct Cell {
    std::vector<std::pair<long, std::vector<double>>> members;
    std::optional<std::vector<double>> observation;
    std::size_t obs_line = 0;
  };
  std::map<std::pair<std::string, std::size_t>, Cell> cells;
  std::set<std::string> time_tokens;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = detail::split_csv_line(lines[li], li + 1);
    if (fields.size() != csv_header.size()) {
      throw ParseError("line " + std::to_string(li + 1) + ": expected " +
                       std::to_string(csv_header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    std::size_t column = 0;
    for (std::size_t k = 0; k < header.dims.size(); ++k) {
      const auto& token = fields[layout.dim_cols[k]];
      const auto it = labels[k].find(token);
      if (it == labels[k].end()) {
        throw ParseError("line " + std::to_string(li + 1) + ": unknown label '" + token +
                         "' in dimension '" + header.dims[k].name + "'");
      }
      column += it->second * strides[k];
    }
    std::vector<double> values(d);
    for (std::size_t i = 0; i < d; ++i) values[i] = detail::parse_double(fields[value_cols[i]], li + 1);

    const std::string& time = fields[layout.time_col];
    time_tokens.insert(time);
    Cell& cell = cells[{time, column}];
    const std::string& member = fields[member_col];
    if (member == "obs") {
      if (cell.observation) {
        throw DuplicateKeyError("duplicate observation for time '" + time + "' (lines " +
                                std::to_string(cell.obs_line) + " and " +
                                std::to_string(li + 1) + ")");
      }
      cell.observation = std::move(values);
      cell.obs_line = li + 1;
    } else {
      long index = 0;
      if (!detail::parse_long(member, index)) {
        throw ParseError("line " + std::to_string(li + 1) + ": member must be an integer or 'obs'");
      }
      cell.members.emplace_back(index, std::move(values));
    }
  }
  if (time_tokens.size() < 2) {
    throw ParseError("file '" + csv_path.string() + "': needs at least two time points");
  }

  const auto time_index = detail::index_time_tokens(time_tokens);
  const std::size_t n_time = time_index.size();
  std::vector<double> scores(n_time * n_cols, 0.0);

  const auto score_cell = [&](Cell& cell, const std::string& where) -> double {
    if (!cell.observation) throw CompletenessError("missing observation for " + where);
    if (cell.members.empty()) throw CompletenessError("missing forecast members for " + where);
    std::stable_sort(cell.members.begin(), cell.members.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto& obs = *cell.observation;
    const std::size_t m = cell.members.size();
    const auto require_point = [&]() {
      if (m != 1) {
        throw InvalidInputError(where + ": rule expects a single (point) forecast member");
      }
    };
    const auto require_univariate = [&]() {
      if (d != 1) throw InvalidInputError(where + ": rule expects one value column");
    };
    switch (rule.kind) {
      case ScoringRule::Kind::se:
        require_point();
        require_univariate();
        return squared_error(cell.members[0].second[0], obs[0]);
      case ScoringRule::Kind::mv_se:
        require_point();
        return multivariate_squared_error(cell.members[0].second, obs);
      case ScoringRule::Kind::qs:
        require_point();
        require_univariate();
        return quantile_score(cell.members[0].second[0], obs[0], rule.tau);
      case ScoringRule::Kind::crps: {
        require_univariate();
        std::vector<double> members(m);
        for (std::size_t i = 0; i < m; ++i) members[i] = cell.members[i].second[0];
        return crps_ensemble(EnsembleForecast::univariate(std::move(members)), obs[0]);
      }
      case ScoringRule::Kind::energy: {
        std::vector<double> members(m * d);
        for (std::size_t i = 0; i < m; ++i) {
          std::copy(cell.members[i].second.begin(), cell.members[i].second.end(),
                    members.begin() + i * d);
        }
        return energy_score_ensemble(EnsembleForecast(m, d, std::move(members)), obs);
      }
    }
    throw InvalidInputError("unknown scoring rule");
  };

  const auto column_labels = [&](std::size_t column) {
    std::string text;
    for (std::size_t k = 0; k < header.dims.size(); ++k) {
      if (k > 0) text += '/';
      text += header.dims[k].labels[(column / strides[k]) % header.dims[k].labels.size()];
    }
    return text;
  };

  std::vector<bool> filled(n_time * n_cols, false);
  for (auto& [key, cell] : cells) {
    const std::size_t t = time_index.at(key.first);
    const std::string where =
        "time '" + key.first + "', labels '" + column_labels(key.second) + "'";
    scores[t * n_cols + key.second] = score_cell(cell, where);
    filled[t * n_cols + key.second] = true;
  }
  for (std::size_t i = 0; i < filled.size(); ++i) {
    if (!filled[i]) {
      throw CompletenessError("missing forecast cell: time index " + std::to_string(i / n_cols) +
                              ", labels '" + column_labels(i % n_cols) + "'");
    }
  }

  ScorePanel panel(header.dims, n_time, std::move(scores));
  if (aggregate_dims.empty()) return panel;

  // Equal-weight aggregation: sum scores over the dropped dimensions.
  std::vector<bool> drop(panel.dims().size(), false);
  for (const auto& name : aggregate_dims) {
    const auto it = std::find_if(panel.dims().begin(), panel.dims().end(),
                                 [&](const DimensionSpec& dim) { return dim.name == name; });
    if (it == panel.dims().end()) {
      throw InvalidInputError("aggregate: unknown dimension '" + name + "'");
    }
    if (it->is_method_axis) {
      throw InvalidInputError("aggregate: the method axis cannot be aggregated");
    }
    drop[static_cast<std::size_t>(it - panel.dims().begin())] = true;
  }
  std::vector<DimensionSpec> kept;
  for (std::size_t k = 0; k < panel.dims().size(); ++k) {
    if (!drop[k]) kept.push_back(panel.dims()[k]);
  }
  std::size_t kept_cols = 1;
  for (const auto& dim : kept) kept_cols *= dim.labels.size();
  std::vector<std::size_t> kept_strides(kept.size(), 1);
  for (std::size_t k = kept.size() - 1; k-- > 0;) {
    kept_strides[k] = kept_strides[k + 1] * kept[k + 1].labels.size();
  }
  std::vector<double> aggregated(panel.n_time() * kept_cols, 0.0);
  for (std::size_t p = 0; p < panel.n_cols(); ++p) {
    const auto tuple = panel.column_tuple(p);
    std::size_t target = 0;
    std::size_t kk = 0;
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      if (drop[k]) continue;
      target += tuple[k] * kept_strides[kk];
      ++kk;
    }
    for (std::size_t t = 0; t < panel.n_time(); ++t) {
      aggregated[t * kept_cols + target] += panel.value(t, p);
    }
  }
  return ScorePanel(std::move(kept), panel.n_time(), std::move(aggregated));
}

inline std::filesystem::path json_sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path path = csv_path;
  path.replace_extension(".json");
  return path;
}

inline nlohmann::json band_result_to_json(const BandResult& result) {
  nlohmann::json doc;
  doc["target"] = target_name(result.target);
  doc["alpha"] = result.alpha;
  doc["replicates"] = result.n_replicates;
  doc["block_length"] = result.block_length;
  doc["seed"] = result.seed;
  doc["n_time"] = result.n_time;
  doc["n_entries"] = result.n_entries;
  doc["method_reused"] = result.method_reused;
  nlohmann::json scalings = nlohmann::json::object();
  for (const auto& band : result.bands) scalings[band_type_name(band.type)] = band.scaling;
  doc["scalings"] = scalings;
  doc["entries"] = nlohmann::json::array();
  for (std::size_t j = 0; j < result.n_entries; ++j) {
    nlohmann::json entry;
    entry["label"] = result.entry_labels[j];
    entry["estimate"] = result.estimates[j];
    entry["sigma"] = result.sigma_hat[j];
    nlohmann::json bands = nlohmann::json::object();
    for (const auto& band : result.bands) {
      bands[band_type_name(band.type)] = {{"lower", band.lower[j]},
                                          {"upper", band.upper[j]},
                                          {"covers_zero",
                                           band.lower[j] <= 0.0 && 0.0 <= band.upper[j]}};
    }
    entry["bands"] = bands;
    doc["entries"].push_back(std::move(entry));
  }
  return doc;
}

/// Per-entry band table: CSV with display precision plus a JSON sidecar with
/// full metadata and round-trip numbers.
inline void write_band_result(const std::filesystem::path& csv_path, const BandResult& result) {
  std::ofstream out(csv_path);
  if (!out) throw ParseError("cannot write file '" + csv_path.string() + "'");
  out << "entry,label,estimate,sigma";
  for (const auto& band : result.bands) {
    const auto* name = band_type_name(band.type);
    out << ',' << name << "_lower," << name << "_upper," << name << "_covers_zero";
  }
  out << '\n';
  for (std::size_t j = 0; j < result.n_entries; ++j) {
    out << j << ',' << detail::csv_escape(result.entry_labels[j]) << ','
        << detail::format_display(result.estimates[j]) << ','
        << detail::format_display(result.sigma_hat[j]);
    for (const auto& band : result.bands) {
      const bool covers = band.lower[j] <= 0.0 && 0.0 <= band.upper[j];
      out << ',' << detail::format_display(band.lower[j]) << ','
          << detail::format_display(band.upper[j]) << ',' << (covers ? "true" : "false");
    }
    out << '\n';
  }
  std::ofstream json_out(json_sidecar_path(csv_path));
  json_out << band_result_to_json(result).dump(2) << '\n';
}

/// Coverage table in the tabulated-simulation shape; the q column (block
/// multiplier, 0 for iid) disambiguates grids with several block lengths.
inline void write_coverage_cells(const std::filesystem::path& csv_path,
                                 const std::vector<CoverageCell>& cells,
                                 const CoverageGrid& grid) {
  std::ofstream out(csv_path);
  if (!out) throw ParseError("cannot write file '" + csv_path.string() + "'");
  out << "a,v,boot,q,type,P,N,coverage,mc_se\n";
  for (const auto& cell : cells) {
    out << detail::format_display(cell.ar_coeff) << ','
        << detail::format_display(cell.error_correlation) << ','
        << (cell.block_multiplier == 0 ? "iid" : "block") << ',' << cell.block_multiplier << ','
        << band_type_name(cell.band_type) << ',' << cell.dimension << ',' << cell.sample_size
        << ',' << detail::format_display(cell.coverage) << ','
        << detail::format_display(cell.mc_se) << '\n';
  }

  nlohmann::json doc;
  doc["target"] = target_name(grid.target);
  doc["alpha"] = grid.alpha;
  doc["replications"] = grid.n_replications;
  doc["bootstrap_replicates"] = grid.n_bootstrap;
  doc["mean_value"] = grid.mean_value;
  doc["burn_in"] = grid.burn_in;
  doc["seed"] = grid.seed;
  doc["cells"] = nlohmann::json::array();
  for (const auto& cell : cells) {
    doc["cells"].push_back({{"a", cell.ar_coeff},
                            {"v", cell.error_correlation},
                            {"boot", cell.block_multiplier == 0 ? "iid" : "block"},
                            {"q", cell.block_multiplier},
                            {"block_length", cell.block_length},
                            {"type", band_type_name(cell.band_type)},
                            {"P", cell.dimension},
                            {"N", cell.sample_size},
                            {"replications", cell.n_replications},
                            {"hits", cell.hits},
                            {"failures", cell.failures},
                            {"coverage", cell.coverage},
                            {"mc_se", cell.mc_se}});
  }
  std::ofstream json_out(json_sidecar_path(csv_path));
  json_out << doc.dump(2) << '\n';
}

struct AsymptoticsRow {
  std::size_t dimension = 1;  // J
  double rho = 0.0;
  double alpha = 0.1;
  double supt_quantile = 0.0;       // equicoordinate quantile
  double pointwise_scaling = 0.0;   // z_{1-alpha/2}
  double bonferroni_scaling = 0.0;  // z_{1-alpha/(2J)}
  double width_supt_vs_pointwise = 0.0;
  double width_bonf_vs_supt = 0.0;
  double pointwise_coverage = 0.0;
  double bonferroni_coverage = 0.0;
};

/// Relative width and asymptotic coverage curves, plot-ready.
inline void write_asymptotics_table(const std::filesystem::path& csv_path,
                                    const std::vector<AsymptoticsRow>& rows,
                                    std::size_t mc_draws, std::uint64_t seed) {
  std::ofstream out(csv_path);
  if (!out) throw ParseError("cannot write file '" + csv_path.string() + "'");
  out << "J,rho,alpha,supt_quantile,pointwise_scaling,bonferroni_scaling,"
         "width_supt_vs_pointwise,width_bonf_vs_supt,pointwise_coverage,bonferroni_coverage\n";
  for (const auto& row : rows) {
    out << row.dimension << ',' << detail::format_display(row.rho) << ','
        << detail::format_display(row.alpha) << ',' << detail::format_display(row.supt_quantile)
        << ',' << detail::format_display(row.pointwise_scaling) << ','
        << detail::format_display(row.bonferroni_scaling) << ','
        << detail::format_display(row.width_supt_vs_pointwise) << ','
        << detail::format_display(row.width_bonf_vs_supt) << ','
        << detail::format_display(row.pointwise_coverage) << ','
        << detail::format_display(row.bonferroni_coverage) << '\n';
  }
  nlohmann::json doc;
  doc["mc_draws"] = mc_draws;
  doc["seed"] = seed;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    doc["rows"].push_back({{"J", row.dimension},
                           {"rho", row.rho},
                           {"alpha", row.alpha},
                           {"supt_quantile", row.supt_quantile},
                           {"pointwise_scaling", row.pointwise_scaling},
                           {"bonferroni_scaling", row.bonferroni_scaling},
                           {"width_supt_vs_pointwise", row.width_supt_vs_pointwise},
                           {"width_bonf_vs_supt", row.width_bonf_vs_supt},
                           {"pointwise_coverage", row.pointwise_coverage},
                           {"bonferroni_coverage", row.bonferroni_coverage}});
  }
  std::ofstream json_out(json_sidecar_path(csv_path));
  json_out << doc.dump(2) << '\n';
}

}  // namespace scorebands::io
