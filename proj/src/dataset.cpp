#include "safs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "safs/common.hpp"

namespace safs {

const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::Continuous ? "continuous" : "categorical";
}

Column Column::continuous(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = FeatureKind::Continuous;
  c.values = std::move(values);
  return c;
}

Column Column::categorical(std::string name, std::vector<std::string> labels) {
  Column c;
  c.name = std::move(name);
  c.kind = FeatureKind::Categorical;
  std::set<std::string> levels(labels.begin(), labels.end());
  c.levels.assign(levels.begin(), levels.end());
  c.labels = std::move(labels);
  return c;
}

Dataset::Dataset(std::vector<Column> columns, std::vector<double> target, std::string target_name)
    : columns_(std::move(columns)), target_(std::move(target)), target_name_(std::move(target_name)) {
  if (target_.empty()) throw DataError("dataset has no rows");
  for (double v : target_) {
    if (!std::isfinite(v)) throw DataError("target '" + target_name_ + "' has a non-finite value");
  }
  std::unordered_set<std::string> seen;
  for (const auto& col : columns_) {
    if (!seen.insert(col.name).second) throw DataError("duplicate column name '" + col.name + "'");
    if (col.name == target_name_) throw DataError("column '" + col.name + "' collides with the target name");
    if (col.size() != target_.size()) {
      throw DataError("column '" + col.name + "' has " + std::to_string(col.size()) + " values, expected " +
                      std::to_string(target_.size()));
    }
    if (col.kind == FeatureKind::Continuous) {
      for (double v : col.values) {
        if (!std::isfinite(v)) throw DataError("continuous column '" + col.name + "' has a non-finite value");
      }
    } else {
      if (!std::is_sorted(col.levels.begin(), col.levels.end()) ||
          std::adjacent_find(col.levels.begin(), col.levels.end()) != col.levels.end()) {
        throw DataError("categorical column '" + col.name + "' has an unsorted or duplicated level set");
      }
      for (const auto& label : col.labels) {
        if (!std::binary_search(col.levels.begin(), col.levels.end(), label)) {
          throw DataError("categorical column '" + col.name + "' value '" + label + "' is not in its level set");
        }
      }
    }
  }
}

std::size_t Dataset::continuous_count() const {
  return static_cast<std::size_t>(std::count_if(columns_.begin(), columns_.end(), [](const Column& c) {
    return c.kind == FeatureKind::Continuous;
  }));
}

std::size_t Dataset::categorical_count() const { return columns_.size() - continuous_count(); }

const Column* Dataset::find(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Dataset Dataset::with_target(std::vector<double> target) const {
  return Dataset(columns_, std::move(target), target_name_);
}

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, std::vector<FeatureKind> kinds, Matrix data)
    : names_(std::move(names)), kinds_(std::move(kinds)), data_(std::move(data)) {
  if (names_.size() != kinds_.size() || names_.size() != data_.cols()) {
    throw DataError("FeatureMatrix: " + std::to_string(names_.size()) + " names, " +
                    std::to_string(kinds_.size()) + " kinds, " + std::to_string(data_.cols()) + " columns");
  }
  for (double v : data_.values()) {
    if (!std::isfinite(v)) throw DataError("FeatureMatrix: non-finite entry");
  }
}

FeatureMatrix FeatureMatrix::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > cols()) throw DataError("FeatureMatrix::slice: bad column range");
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = begin + j;
  return FeatureMatrix({names_.begin() + static_cast<std::ptrdiff_t>(begin),
                        names_.begin() + static_cast<std::ptrdiff_t>(end)},
                       {kinds_.begin() + static_cast<std::ptrdiff_t>(begin),
                        kinds_.begin() + static_cast<std::ptrdiff_t>(end)},
                       data_.select_cols(idx));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  return FeatureMatrix(names_, kinds_, data_.select_rows(rows));
}

Partition partition(const Dataset& d) {
  Partition out;
  std::vector<std::string> names;
  std::vector<const Column*> cont;
  for (const auto& col : d.columns()) {
    if (col.kind == FeatureKind::Continuous) {
      cont.push_back(&col);
      names.push_back(col.name);
    } else {
      out.categorical.push_back(col);
    }
  }
  Matrix m(d.rows(), cont.size());
  for (std::size_t j = 0; j < cont.size(); ++j) {
    for (std::size_t r = 0; r < d.rows(); ++r) m(r, j) = cont[j]->values[r];
  }
  out.continuous =
      FeatureMatrix(std::move(names), std::vector<FeatureKind>(cont.size(), FeatureKind::Continuous), std::move(m));
  return out;
}

Normalized min_max_normalize(const FeatureMatrix& cont) {
  NormalizationParams params;
  const Matrix& x = cont.data();
  params.ranges.resize(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    ColumnRange r{0.0, 0.0};
    if (x.rows() > 0) r = {x(0, j), x(0, j)};
    for (std::size_t i = 1; i < x.rows(); ++i) {
      r.min = std::min(r.min, x(i, j));
      r.max = std::max(r.max, x(i, j));
    }
    params.ranges[j] = r;
  }
  return {apply_normalization(cont, params), std::move(params)};
}

FeatureMatrix apply_normalization(const FeatureMatrix& cont, const NormalizationParams& params) {
  if (params.ranges.size() != cont.cols()) throw DataError("normalization: column count mismatch");
  Matrix out(cont.rows(), cont.cols());
  for (std::size_t j = 0; j < cont.cols(); ++j) {
    const auto [lo, hi] = params.ranges[j];
    const double span = hi - lo;
    for (std::size_t i = 0; i < cont.rows(); ++i) {
      out(i, j) = span > 0.0 ? (cont.data()(i, j) - lo) / span : 0.5;
    }
  }
  return FeatureMatrix(cont.names(), cont.kinds(), std::move(out));
}

FeatureMatrix denormalize(const FeatureMatrix& normalized, const NormalizationParams& params) {
  if (params.ranges.size() != normalized.cols()) throw DataError("denormalize: column count mismatch");
  Matrix out(normalized.rows(), normalized.cols());
  for (std::size_t j = 0; j < normalized.cols(); ++j) {
    const auto [lo, hi] = params.ranges[j];
    for (std::size_t i = 0; i < normalized.rows(); ++i) {
      out(i, j) = hi > lo ? lo + normalized.data()(i, j) * (hi - lo) : lo;
    }
  }
  return FeatureMatrix(normalized.names(), normalized.kinds(), std::move(out));
}

FeatureMatrix one_hot_encode(const std::vector<Column>& categorical) {
  std::vector<std::vector<std::string>> level_sets;
  level_sets.reserve(categorical.size());
  for (const auto& c : categorical) level_sets.push_back(c.levels);
  return one_hot_encode(categorical, level_sets);
}

FeatureMatrix one_hot_encode(const std::vector<Column>& categorical,
                             const std::vector<std::vector<std::string>>& level_sets) {
  if (level_sets.size() != categorical.size()) throw DataError("one_hot_encode: one level set per column required");
  std::size_t rows = 0;
  std::size_t width = 0;
  for (std::size_t c = 0; c < categorical.size(); ++c) {
    if (categorical[c].kind != FeatureKind::Categorical) {
      throw DataError("one_hot_encode: column '" + categorical[c].name + "' is not categorical");
    }
    if (c == 0) rows = categorical[c].labels.size();
    if (categorical[c].labels.size() != rows) throw DataError("one_hot_encode: ragged categorical columns");
    width += level_sets[c].size();
  }
  std::vector<std::string> names;
  names.reserve(width);
  Matrix out(rows, width);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < categorical.size(); ++c) {
    const auto& col = categorical[c];
    const auto& levels = level_sets[c];
    for (const auto& level : levels) names.push_back(col.name + "=" + level);
    for (std::size_t r = 0; r < rows; ++r) {
      auto it = std::find(levels.begin(), levels.end(), col.labels[r]);
      if (it == levels.end()) {
        throw DataError("one_hot_encode: column '" + col.name + "' has unseen level '" + col.labels[r] + "'");
      }
      out(r, offset + static_cast<std::size_t>(it - levels.begin())) = 1.0;
    }
    offset += levels.size();
  }
  return FeatureMatrix(std::move(names), std::vector<FeatureKind>(width, FeatureKind::Categorical), std::move(out));
}

FeatureMatrix recombine(const FeatureMatrix& represented, const FeatureMatrix& encoded_cat) {
  if (encoded_cat.cols() == 0 && encoded_cat.rows() == 0) return represented;
  if (represented.rows() != encoded_cat.rows()) {
    throw DataError("recombine: row counts differ (" + std::to_string(represented.rows()) + " vs " +
                    std::to_string(encoded_cat.rows()) + ")");
  }
  auto names = represented.names();
  names.insert(names.end(), encoded_cat.names().begin(), encoded_cat.names().end());
  auto kinds = represented.kinds();
  kinds.insert(kinds.end(), encoded_cat.kinds().begin(), encoded_cat.kinds().end());
  return FeatureMatrix(std::move(names), std::move(kinds), hconcat(represented.data(), encoded_cat.data()));
}

// ---------------------------------------------------------------------------

std::optional<std::string> Schema::target() const {
  for (const auto& [name, role] : roles) {
    if (role == SchemaRole::Target) return name;
  }
  return std::nullopt;
}

Schema parse_schema(const std::string& text) {
  Schema schema;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_target = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto colon = s.rfind(':');
    if (colon == std::string_view::npos) {
      throw DataError("schema line " + std::to_string(lineno) + ": expected 'name: kind'");
    }
    const std::string name(trim(s.substr(0, colon)));
    const std::string kind(trim(s.substr(colon + 1)));
    SchemaRole role;
    if (kind == "continuous") {
      role = SchemaRole::Continuous;
    } else if (kind == "categorical") {
      role = SchemaRole::Categorical;
    } else if (kind == "target") {
      if (have_target) throw DataError("schema line " + std::to_string(lineno) + ": second target");
      have_target = true;
      role = SchemaRole::Target;
    } else {
      throw DataError("schema line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
    if (name.empty()) throw DataError("schema line " + std::to_string(lineno) + ": empty column name");
    if (!schema.roles.emplace(name, role).second) {
      throw DataError("schema line " + std::to_string(lineno) + ": column '" + name + "' listed twice");
    }
  }
  return schema;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// RFC-4180-style field split: double quotes enclose fields, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (quoted) throw DataError("line " + std::to_string(lineno) + ": unterminated quote");
  fields.emplace_back(trim(cur));
  return fields;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Dataset parse_csv(const std::string& text, const CsvOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> cells;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header.empty()) {
      if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (trim(line).empty()) throw DataError("line 1: header row required");
      header = split_csv_line(line, lineno);
      if (cells.empty()) cells.resize(header.size());
      continue;
    }
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, lineno);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(lineno) + ": ragged row (" + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()) + ")");
    }
    for (std::size_t j = 0; j < fields.size(); ++j) cells[j].push_back(std::move(fields[j]));
  }
  if (header.empty()) throw DataError("empty CSV: header row required");

  std::optional<std::string> target = options.target_name ? options.target_name : options.schema.target();
  if (!target) throw DataError("no target column designated (schema 'target' line or target_name)");

  std::set<std::string> header_set;
  for (const auto& h : header) {
    if (!header_set.insert(h).second) throw DataError("duplicate header column '" + h + "'");
  }
  for (const auto& [name, role] : options.schema.roles) {
    if (!header_set.count(name)) throw DataError("schema column '" + name + "' not found in CSV header");
  }
  if (!header_set.count(*target)) throw DataError("target column '" + *target + "' not found in CSV header");

  std::vector<double> y;
  std::vector<Column> columns;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string& name = header[j];
    const auto& raw = cells[j];
    if (name == *target) {
      y.reserve(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) {
        double v = 0.0;
        if (raw[i] == options.missing || !try_parse_double(raw[i], v) || !std::isfinite(v)) {
          throw DataError("non-numeric target value '" + raw[i] + "' in row " + std::to_string(i + 1));
        }
        y.push_back(v);
      }
      continue;
    }

    std::optional<FeatureKind> kind;
    if (auto it = options.schema.roles.find(name); it != options.schema.roles.end()) {
      if (it->second == SchemaRole::Target) continue;  // overridden by target_name
      kind = it->second == SchemaRole::Continuous ? FeatureKind::Continuous : FeatureKind::Categorical;
    }

    std::vector<double> parsed(raw.size(), 0.0);
    std::vector<bool> missing(raw.size(), false);
    bool all_numeric = true;
    std::set<double> distinct;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == options.missing) {
        missing[i] = true;
        continue;
      }
      if (try_parse_double(raw[i], parsed[i]) && std::isfinite(parsed[i])) {
        distinct.insert(parsed[i]);
      } else {
        all_numeric = false;
      }
    }
    const bool any_present = std::find(missing.begin(), missing.end(), false) != missing.end();
    if (!kind) {
      kind = (all_numeric && any_present && distinct.size() > options.max_levels) ? FeatureKind::Continuous
                                                                                  : FeatureKind::Categorical;
    }

    if (*kind == FeatureKind::Continuous) {
      if (!all_numeric) throw DataError("continuous column '" + name + "' has non-numeric values");
      if (!any_present) throw DataError("continuous column '" + name + "' has no values");
      std::vector<double> present;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!missing[i]) present.push_back(parsed[i]);
      }
      const double fill = median(std::move(present));
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (missing[i]) parsed[i] = fill;
      }
      columns.push_back(Column::continuous(name, std::move(parsed)));
    } else {
      std::vector<std::string> labels(raw.size());
      for (std::size_t i = 0; i < raw.size(); ++i) labels[i] = missing[i] ? std::string(kMissingLevel) : raw[i];
      columns.push_back(Column::categorical(name, std::move(labels)));
    }
  }
  return Dataset(std::move(columns), std::move(y), *target);
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  return parse_csv(read_file(path), options);
}

Schema load_schema(const std::filesystem::path& path) { return parse_schema(read_file(path)); }

}  // namespace safs
