#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "safs/lasso.hpp"
#include "safs/matrix.hpp"
#include "safs/ranking.hpp"

namespace safs {

/// Predicts the training-fold mean; the no-information reference model.
struct MeanSetting {
  bool operator==(const MeanSetting&) const = default;
};
struct ForestSetting {
  std::size_t n_trees = 100;
  bool operator==(const ForestSetting&) const = default;
};
struct LassoSetting {
  double lambda = 0.0;
  bool operator==(const LassoSetting&) const = default;
};

/// One point of the selector grid (tree count or lambda).
using SelectorSetting = std::variant<MeanSetting, ForestSetting, LassoSetting>;

enum class SelectorKind { RandomForest, Lasso };

const char* to_string(SelectorKind kind);

/// Tree count or lambda as a number; 0 for the mean predictor.
double setting_value(const SelectorSetting& setting);
std::string setting_label(const SelectorSetting& setting);

/// Knobs shared by every setting of a selector.
struct SelectorOptions {
  std::size_t mtry = 0;
  std::size_t min_leaf = 5;
  bool bootstrap = true;
  LassoOptions lasso;
  /// When nonzero, rank features on the training data, keep the top k and
  /// refit on those columns before predicting.
  std::size_t refit_top_k = 0;
  int threads = 1;
};

/// Non-negative per-column importance of a fit of `setting`.
std::vector<double> raw_importance(const SelectorSetting& setting, const SelectorOptions& options, const Matrix& x,
                                   std::span<const double> y, std::uint64_t seed);

ImportanceRanking fit_ranking(const SelectorSetting& setting, const SelectorOptions& options, const Matrix& x,
                              std::span<const double> y, std::span<const std::string> names, std::uint64_t seed);

/// Fits on (train_x, train_y) and predicts test_x.
std::vector<double> fit_predict(const SelectorSetting& setting, const SelectorOptions& options, const Matrix& train_x,
                                std::span<const double> train_y, const Matrix& test_x, std::uint64_t seed);

}  // namespace safs
