#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "safs/matrix.hpp"

namespace safs {

enum class FeatureKind { Continuous, Categorical };

const char* to_string(FeatureKind kind);

/// One input column. Continuous columns use `values`; categorical columns use
/// `labels` (one per row) and the sorted level set `levels`.
struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  std::vector<double> values;
  std::vector<std::string> labels;
  std::vector<std::string> levels;

  std::size_t size() const { return kind == FeatureKind::Continuous ? values.size() : labels.size(); }

  static Column continuous(std::string name, std::vector<double> values);
  /// Level set is derived from the labels (sorted, unique).
  static Column categorical(std::string name, std::vector<std::string> labels);
};

/// Feature columns plus a numeric regression target. Immutable once built;
/// the constructor enforces equal lengths, unique names, finite continuous
/// values and consistent level sets.
class Dataset {
 public:
  Dataset(std::vector<Column> columns, std::vector<double> target, std::string target_name = "target");

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<double>& target() const { return target_; }
  const std::string& target_name() const { return target_name_; }
  std::size_t rows() const { return target_.size(); }
  std::size_t feature_count() const { return columns_.size(); }
  std::size_t continuous_count() const;
  std::size_t categorical_count() const;

  const Column* find(const std::string& name) const;

  /// Same features with a replacement target.
  Dataset with_target(std::vector<double> target) const;

 private:
  std::vector<Column> columns_;
  std::vector<double> target_;
  std::string target_name_;
};

/// Named numeric table: the carrier between pipeline stages.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> names, std::vector<FeatureKind> kinds, Matrix data);

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<FeatureKind>& kinds() const { return kinds_; }
  const Matrix& data() const { return data_; }
  std::size_t rows() const { return data_.rows(); }
  std::size_t cols() const { return data_.cols(); }

  /// Columns [begin, end).
  FeatureMatrix slice(std::size_t begin, std::size_t end) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<FeatureKind> kinds_;
  Matrix data_;
};

struct ColumnRange {
  double min = 0.0;
  double max = 0.0;
};

struct NormalizationParams {
  std::vector<ColumnRange> ranges;
};

struct Partition {
  FeatureMatrix continuous;
  std::vector<Column> categorical;
};

Partition partition(const Dataset& d);

struct Normalized {
  FeatureMatrix matrix;
  NormalizationParams params;
};

/// Maps each column to [0,1] via (x-min)/(max-min); constant columns map to 0.5.
Normalized min_max_normalize(const FeatureMatrix& cont);
/// Applies stored ranges (values outside the fitted range leave [0,1]).
FeatureMatrix apply_normalization(const FeatureMatrix& cont, const NormalizationParams& params);
FeatureMatrix denormalize(const FeatureMatrix& normalized, const NormalizationParams& params);

/// Full one-hot expansion, one `col=level` indicator per level.
FeatureMatrix one_hot_encode(const std::vector<Column>& categorical);
/// Re-applies stored level sets; a label outside its column's set is an error.
FeatureMatrix one_hot_encode(const std::vector<Column>& categorical,
                             const std::vector<std::vector<std::string>>& level_sets);

/// Horizontal concatenation, represented block first.
FeatureMatrix recombine(const FeatureMatrix& represented, const FeatureMatrix& encoded_cat);

// ---------------------------------------------------------------------------
// CSV ingestion

enum class SchemaRole { Continuous, Categorical, Target };

struct Schema {
  std::map<std::string, SchemaRole> roles;
  std::optional<std::string> target() const;
};

/// Parses `column_name: continuous|categorical|target` lines. Blank lines and
/// lines starting with '#' are ignored.
Schema parse_schema(const std::string& text);
Schema load_schema(const std::filesystem::path& path);

struct CsvOptions {
  Schema schema;
  /// Overrides a target named by the schema.
  std::optional<std::string> target_name;
  /// Numeric columns with at most this many distinct values are categorical.
  std::size_t max_levels = 10;
  /// Cell text treated as missing.
  std::string missing = "";
};

inline constexpr const char* kMissingLevel = "__missing__";

Dataset parse_csv(const std::string& text, const CsvOptions& options);
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);

}  // namespace safs
