#include "safs/selector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "safs/common.hpp"
#include "safs/forest.hpp"

namespace safs {

const char* to_string(SelectorKind kind) { return kind == SelectorKind::RandomForest ? "random_forest" : "lasso"; }

double setting_value(const SelectorSetting& setting) {
  if (const auto* f = std::get_if<ForestSetting>(&setting)) return static_cast<double>(f->n_trees);
  if (const auto* l = std::get_if<LassoSetting>(&setting)) return l->lambda;
  return 0.0;
}

std::string setting_label(const SelectorSetting& setting) {
  if (const auto* f = std::get_if<ForestSetting>(&setting)) return "n_trees=" + std::to_string(f->n_trees);
  if (const auto* l = std::get_if<LassoSetting>(&setting)) return "lambda=" + format_double(l->lambda);
  return "mean";
}

namespace {

ForestParams forest_params(const ForestSetting& f, const SelectorOptions& o, std::size_t features, std::uint64_t seed) {
  ForestParams p;
  p.n_trees = f.n_trees;
  p.mtry = o.mtry == 0 ? 0 : std::min(o.mtry, features);
  p.min_leaf = o.min_leaf;
  p.bootstrap = o.bootstrap;
  p.seed = seed;
  return p;
}

std::vector<double> fit_predict_direct(const SelectorSetting& setting, const SelectorOptions& options,
                                       const Matrix& train_x, std::span<const double> train_y, const Matrix& test_x,
                                       std::uint64_t seed) {
  if (const auto* f = std::get_if<ForestSetting>(&setting)) {
    const auto forest =
        fit_random_forest(train_x, train_y, forest_params(*f, options, train_x.cols(), seed), options.threads);
    return rf_predict(forest, test_x, options.threads);
  }
  if (const auto* l = std::get_if<LassoSetting>(&setting)) {
    return fit_lasso(train_x, train_y, l->lambda, options.lasso).predict(test_x);
  }
  return std::vector<double>(test_x.rows(), mean(train_y));
}

}  // namespace

std::vector<double> raw_importance(const SelectorSetting& setting, const SelectorOptions& options, const Matrix& x,
                                   std::span<const double> y, std::uint64_t seed) {
  if (const auto* f = std::get_if<ForestSetting>(&setting)) {
    return rf_raw_importance(fit_random_forest(x, y, forest_params(*f, options, x.cols(), seed), options.threads));
  }
  if (const auto* l = std::get_if<LassoSetting>(&setting)) {
    auto coef = fit_lasso(x, y, l->lambda, options.lasso).standardized_coefficients;
    for (double& c : coef) c = std::abs(c);
    return coef;
  }
  return std::vector<double>(x.cols(), 0.0);
}

ImportanceRanking fit_ranking(const SelectorSetting& setting, const SelectorOptions& options, const Matrix& x,
                              std::span<const double> y, std::span<const std::string> names, std::uint64_t seed) {
  if (names.size() != x.cols()) throw DataError("fit_ranking: one name per column required");
  const auto raw = raw_importance(setting, options, x, y, seed);
  // Lasso rankings list selected (nonzero) features only.
  return ImportanceRanking::from_raw(names, raw, std::holds_alternative<LassoSetting>(setting));
}

std::vector<double> fit_predict(const SelectorSetting& setting, const SelectorOptions& options, const Matrix& train_x,
                                std::span<const double> train_y, const Matrix& test_x, std::uint64_t seed) {
  if (train_x.cols() != test_x.cols()) throw DataError("fit_predict: train and test widths differ");
  if (options.refit_top_k == 0 || std::holds_alternative<MeanSetting>(setting)) {
    return fit_predict_direct(setting, options, train_x, train_y, test_x, seed);
  }
  const auto raw = raw_importance(setting, options, train_x, train_y, seed);
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
  std::vector<std::size_t> keep;
  for (std::size_t j : order) {
    if (keep.size() == options.refit_top_k || raw[j] == 0.0) break;
    keep.push_back(j);
  }
  if (keep.empty()) return std::vector<double>(test_x.rows(), mean(train_y));
  std::sort(keep.begin(), keep.end());
  return fit_predict_direct(setting, options, train_x.select_cols(keep), train_y, test_x.select_cols(keep),
                            derive_seed(seed, SeedTag::kModel, 1));
}

}  // namespace safs
