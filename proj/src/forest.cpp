#include "safs/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "safs/common.hpp"

namespace safs {

RegressionTree::RegressionTree(std::vector<TreeNode> nodes, std::vector<double> impurity_decrease)
    : nodes_(std::move(nodes)), impurity_decrease_(std::move(impurity_decrease)) {
  if (nodes_.empty()) throw DataError("RegressionTree: no nodes");
  for (const auto& n : nodes_) {
    if (n.is_leaf()) {
      if (!std::isfinite(n.value)) throw DataError("RegressionTree: non-finite leaf");
    } else if (n.left >= nodes_.size() || n.right >= nodes_.size()) {
      throw DataError("RegressionTree: dangling child index");
    }
  }
}

double RegressionTree::predict(std::span<const double> row) const {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes_[i].value;
}

std::size_t RegressionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t default_mtry(std::size_t features) { return std::max<std::size_t>(1, features / 3); }

std::uint64_t tree_seed(std::uint64_t seed, std::size_t index) {
  return derive_seed(seed, SeedTag::kForestTree, index);
}

namespace {

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

struct WorkItem {
  std::size_t node;
  std::size_t begin;
  std::size_t end;
};

// Best split of samples[begin,end) on one feature. Candidate thresholds are
// midpoints between consecutive distinct values, scanned in ascending order;
// only strict improvements replace `best`.
void scan_feature(const Matrix& x, std::span<const double> y, std::span<const std::size_t> samples,
                  std::size_t feature, std::size_t min_leaf, double parent_term, double total,
                  std::vector<std::pair<double, double>>& buf, Split& best, bool& found) {
  buf.clear();
  for (std::size_t s : samples) buf.emplace_back(x(s, feature), y[s]);
  std::sort(buf.begin(), buf.end());
  const std::size_t n = buf.size();
  if (buf.front().first == buf.back().first) return;
  double left_sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left_sum += buf[i].second;
    const std::size_t nl = i + 1;
    const std::size_t nr = n - nl;
    if (buf[i].first == buf[i + 1].first || nl < min_leaf || nr < min_leaf) continue;
    const double right_sum = total - left_sum;
    const double gain = left_sum * left_sum / static_cast<double>(nl) +
                        right_sum * right_sum / static_cast<double>(nr) - parent_term;
    if (gain > best.gain) {
      double thr = 0.5 * (buf[i].first + buf[i + 1].first);
      if (!(thr < buf[i + 1].first)) thr = buf[i].first;
      best = {feature, thr, gain};
      found = true;
    }
  }
}

}  // namespace

RegressionTree fit_tree(const Matrix& x, std::span<const double> y, std::vector<std::size_t> samples,
                        std::size_t mtry, std::size_t min_leaf, std::uint64_t seed) {
  const std::size_t p = x.cols();
  if (samples.empty()) throw DataError("fit_tree: no samples");
  if (mtry == 0 || mtry > p) throw DataError("fit_tree: mtry must lie in [1, features]");
  min_leaf = std::max<std::size_t>(1, min_leaf);

  std::mt19937_64 rng(seed);
  std::vector<TreeNode> nodes(1);
  std::vector<double> importance(p, 0.0);
  std::vector<std::size_t> features(p);
  std::vector<std::size_t> candidates;
  std::vector<std::pair<double, double>> buf;
  std::vector<WorkItem> stack{{0, 0, samples.size()}};

  while (!stack.empty()) {
    const WorkItem item = stack.back();
    stack.pop_back();
    const std::span<std::size_t> node_samples(samples.data() + item.begin, item.end - item.begin);
    const std::size_t n = node_samples.size();

    double total = 0.0;
    double lo = y[node_samples[0]], hi = lo;
    for (std::size_t s : node_samples) {
      total += y[s];
      lo = std::min(lo, y[s]);
      hi = std::max(hi, y[s]);
    }
    nodes[item.node].value = total / static_cast<double>(n);
    if (n < 2 * min_leaf || lo == hi) continue;

    // Partial Fisher-Yates draw of mtry distinct features, scanned in index order.
    std::iota(features.begin(), features.end(), std::size_t{0});
    for (std::size_t k = 0; k < mtry; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, p - 1);
      std::swap(features[k], features[pick(rng)]);
    }
    candidates.assign(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(mtry));
    std::sort(candidates.begin(), candidates.end());

    const double parent_term = total * total / static_cast<double>(n);
    Split best;
    bool found = false;
    for (std::size_t f : candidates) {
      scan_feature(x, y, node_samples, f, min_leaf, parent_term, total, buf, best, found);
    }
    if (!found) continue;

    const auto mid = std::stable_partition(node_samples.begin(), node_samples.end(), [&](std::size_t s) {
      return x(s, best.feature) <= best.threshold;
    });
    const std::size_t split_at = item.begin + static_cast<std::size_t>(mid - node_samples.begin());

    importance[best.feature] += best.gain;
    const auto left = static_cast<std::uint32_t>(nodes.size());
    const auto right = left + 1;
    nodes.resize(nodes.size() + 2);
    auto& node = nodes[item.node];
    node.feature = static_cast<std::int32_t>(best.feature);
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    stack.push_back({right, split_at, item.end});
    stack.push_back({left, item.begin, split_at});
  }
  return RegressionTree(std::move(nodes), std::move(importance));
}

namespace {

void check_training_input(const Matrix& x, std::span<const double> y, std::size_t mtry) {
  if (x.rows() != y.size()) throw DataError("random forest: X and y row counts differ");
  if (x.rows() < 2) throw DataError("random forest: at least 2 rows required");
  if (x.cols() == 0) throw DataError("random forest: no features");
  if (mtry == 0 || mtry > x.cols()) throw DataError("random forest: mtry must lie in [1, features]");
}

std::vector<std::size_t> draw_samples(std::size_t m, bool bootstrap, std::uint64_t seed) {
  std::vector<std::size_t> samples(m);
  if (!bootstrap) {
    std::iota(samples.begin(), samples.end(), std::size_t{0});
    return samples;
  }
  std::mt19937_64 rng(mix64(seed));
  std::uniform_int_distribution<std::size_t> draw(0, m - 1);
  for (auto& s : samples) s = draw(rng);
  return samples;
}

}  // namespace

RandomForest fit_random_forest(const Matrix& x, std::span<const double> y, const ForestParams& params, int threads) {
  if (params.n_trees == 0) throw DataError("random forest: n_trees must be at least 1");
  const std::size_t mtry = params.mtry == 0 ? default_mtry(x.cols()) : params.mtry;
  check_training_input(x, y, mtry);

  RandomForest forest;
  forest.trees.resize(params.n_trees);
  forest.n_features = x.cols();
  forest.mtry = mtry;
  forest.min_leaf = params.min_leaf;
  forest.bootstrap = params.bootstrap;
  forest.seed = params.seed;

  const auto n = static_cast<std::ptrdiff_t>(params.n_trees);
#pragma omp parallel for num_threads(std::max(1, threads)) schedule(dynamic) if (threads > 1)
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const std::uint64_t s = tree_seed(params.seed, ut);
    forest.trees[ut] = fit_tree(x, y, draw_samples(x.rows(), params.bootstrap, s), mtry, params.min_leaf, s);
  }
  return forest;
}

std::vector<double> rf_predict(const RandomForest& forest, const Matrix& x, int threads) {
  if (x.cols() != forest.n_features) {
    throw DataError("rf_predict: X has " + std::to_string(x.cols()) + " columns, forest was fit on " +
                    std::to_string(forest.n_features));
  }
  if (forest.trees.empty()) throw DataError("rf_predict: empty forest");
  std::vector<double> out(x.rows());
  const auto rows = static_cast<std::ptrdiff_t>(x.rows());
  const auto count = static_cast<double>(forest.trees.size());
#pragma omp parallel for num_threads(std::max(1, threads)) schedule(static) if (threads > 1)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto row = x.row(static_cast<std::size_t>(r));
    double acc = 0.0;
    for (const auto& tree : forest.trees) acc += tree.predict(row);
    out[static_cast<std::size_t>(r)] = acc / count;
  }
  return out;
}

std::vector<double> rf_raw_importance(const RandomForest& forest) {
  std::vector<double> total(forest.n_features, 0.0);
  for (const auto& tree : forest.trees) {
    const auto& imp = tree.impurity_decrease();
    for (std::size_t j = 0; j < total.size(); ++j) total[j] += imp[j];
  }
  return total;
}

ImportanceRanking rf_importance(const RandomForest& forest, std::span<const std::string> names) {
  if (names.size() != forest.n_features) throw DataError("rf_importance: one name per feature required");
  const auto raw = rf_raw_importance(forest);
  return ImportanceRanking::from_raw(names, raw);
}

}  // namespace safs
