#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace safs {

struct RankedFeature {
  std::string name;
  double weight = 0.0;
  bool operator==(const RankedFeature&) const = default;
};

/// Features ordered by descending weight (ties: name ascending). Weights are
/// percentages summing to 100 unless every raw weight was zero.
struct ImportanceRanking {
  std::vector<RankedFeature> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }

  /// Normalizes non-negative raw weights to percentages. With `omit_zero`,
  /// features whose raw weight is exactly zero are dropped.
  static ImportanceRanking from_raw(std::span<const std::string> names, std::span<const double> raw,
                                    bool omit_zero = false);

  bool operator==(const ImportanceRanking&) const = default;
};

/// First min(k, size) feature names.
std::vector<std::string> select_top_k(const ImportanceRanking& ranking, std::size_t k);

/// `rank,feature,weight` with a header row; rank is 1-based.
void write_ranking_csv(const ImportanceRanking& ranking, std::ostream& out);
ImportanceRanking read_ranking_csv(std::istream& in);

/// Mean squared error (1/m) sum (pred - actual)^2.
double mse(std::span<const double> pred, std::span<const double> actual);

double mean(std::span<const double> v);
/// Population variance.
double variance(std::span<const double> v);

}  // namespace safs
