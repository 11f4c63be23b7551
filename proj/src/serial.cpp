#include "safs/serial.hpp"

#include <numeric>
#include <random>

#include "safs/common.hpp"

namespace safs::serial {

Matrix represent(const StackedAutoencoder& sae, const Matrix& data) {
  Matrix out(data.rows(), sae.output_dim());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto middle = encode(sae.stages[1], encode(sae.stages[0], data.row(r)));
    std::copy(middle.begin(), middle.end(), out.row(r).begin());
  }
  return out;
}

RandomForest fit_random_forest(const Matrix& x, std::span<const double> y, const ForestParams& params) {
  RandomForest forest;
  forest.n_features = x.cols();
  forest.mtry = params.mtry == 0 ? default_mtry(x.cols()) : params.mtry;
  forest.min_leaf = params.min_leaf;
  forest.bootstrap = params.bootstrap;
  forest.seed = params.seed;
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    const std::uint64_t s = tree_seed(params.seed, t);
    std::vector<std::size_t> samples(x.rows());
    if (params.bootstrap) {
      std::mt19937_64 rng(mix64(s));
      std::uniform_int_distribution<std::size_t> draw(0, x.rows() - 1);
      for (auto& i : samples) i = draw(rng);
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    forest.trees.push_back(fit_tree(x, y, std::move(samples), forest.mtry, params.min_leaf, s));
  }
  return forest;
}

std::vector<double> rf_predict(const RandomForest& forest, const Matrix& x) {
  std::vector<double> out(x.rows(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (const auto& tree : forest.trees) out[r] += tree.predict(x.row(r));
    out[r] /= static_cast<double>(forest.trees.size());
  }
  return out;
}

std::vector<EvaluationResult> sweep(const Dataset& d, const PipelineConfig& cfg) {
  PipelineConfig inner = cfg;
  inner.selector_options.threads = 1;
  std::vector<EvaluationResult> out;
  for (std::size_t n : resolve_n_grid(cfg, d)) {
    for (auto& r : evaluate_architecture(d, n, inner)) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace safs::serial
