#include "safs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <random>

#include "safs/common.hpp"

namespace safs {

std::vector<std::size_t> default_n_grid(std::size_t input_dim) {
  if (input_dim < 2) return {1};
  const std::size_t step = std::max<std::size_t>(1, input_dim / 50);
  std::vector<std::size_t> grid;
  for (std::size_t n = 2; n <= input_dim; n += step) grid.push_back(n);
  return grid;
}

void validate(const PipelineConfig& cfg, std::size_t rows) {
  for (std::size_t n : cfg.n_grid) {
    if (n == 0) throw ConfigError("n_grid entries must be at least 1");
  }
  if (cfg.cv_folds < 2) throw ConfigError("cv_folds must be at least 2");
  if (cfg.cv_folds > rows) {
    throw ConfigError("cv_folds (" + std::to_string(cfg.cv_folds) + ") exceeds the row count (" +
                      std::to_string(rows) + "): a fold would have < 1 row");
  }
  if (cfg.repeats == 0) throw ConfigError("repeats must be at least 1");
  if (cfg.top_k == 0) throw ConfigError("top_k must be at least 1");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.selector == SelectorKind::RandomForest) {
    if (cfg.n_trees.empty()) throw ConfigError("n_trees must list at least one tree count");
    for (std::size_t t : cfg.n_trees) {
      if (t == 0) throw ConfigError("n_trees entries must be at least 1");
    }
  } else {
    for (double l : cfg.lambdas) {
      if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambdas must be finite and non-negative");
    }
    if (cfg.lambdas.empty() && cfg.lambda_count == 0) throw ConfigError("lambda_count must be at least 1");
  }
  const auto& t = cfg.train;
  if (!(t.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(t.weight_init_scale > 0.0)) throw ConfigError("weight_init_scale must be positive");
  const std::size_t train_rows = cfg.sae_per_fold ? rows - (rows + cfg.cv_folds - 1) / cfg.cv_folds : rows;
  if (t.batch_size > train_rows) {
    throw ConfigError("batch_size (" + std::to_string(t.batch_size) + ") exceeds the " +
                      std::to_string(train_rows) + " rows available to auto-encoder training");
  }
}

std::vector<std::size_t> resolve_n_grid(const PipelineConfig& cfg, const Dataset& d) {
  return cfg.n_grid.empty() ? default_n_grid(d.continuous_count()) : cfg.n_grid;
}

std::vector<SelectorSetting> resolve_settings(const PipelineConfig& cfg, const Dataset& d) {
  std::vector<SelectorSetting> out;
  if (cfg.selector == SelectorKind::RandomForest) {
    for (std::size_t t : cfg.n_trees) out.emplace_back(ForestSetting{t});
    return out;
  }
  std::vector<double> lambdas = cfg.lambdas;
  if (lambdas.empty()) {
    const double lmax = lasso_lambda_max(baseline_matrix(d).data(), d.target());
    lambdas = lmax > 0.0 ? lambda_grid(lmax, cfg.lambda_count) : std::vector<double>{0.0};
  }
  for (double l : lambdas) out.emplace_back(LassoSetting{l});
  return out;
}

// ---------------------------------------------------------------------------

std::vector<FoldSplit> cv_splits(std::size_t rows, std::size_t folds, std::size_t repeats, std::uint64_t seed) {
  if (folds == 0 || folds > rows) throw DataError("cross-validation: a fold would have < 1 row");
  std::vector<FoldSplit> out;
  out.reserve(folds * repeats);
  std::vector<std::size_t> perm(rows);
  for (std::size_t r = 0; r < repeats; ++r) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(seed, SeedTag::kCvSplit, r));
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t base = rows / folds;
    const std::size_t extra = rows % folds;
    std::size_t start = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      const std::size_t len = base + (f < extra ? 1 : 0);
      FoldSplit split;
      split.repeat = r;
      split.fold = f;
      split.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(start),
                        perm.begin() + static_cast<std::ptrdiff_t>(start + len));
      split.train.reserve(rows - len);
      split.train.insert(split.train.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(start));
      split.train.insert(split.train.end(), perm.begin() + static_cast<std::ptrdiff_t>(start + len), perm.end());
      std::sort(split.test.begin(), split.test.end());
      std::sort(split.train.begin(), split.train.end());
      out.push_back(std::move(split));
      start += len;
    }
  }
  return out;
}

std::uint64_t fold_model_seed(std::uint64_t seed, std::size_t repeat, std::size_t fold) {
  return derive_seed(seed, SeedTag::kModel, repeat, fold);
}

namespace {

std::vector<double> gather(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

}  // namespace

CvResult cross_validate(const FoldFeatures& features, std::span<const double> y, const SelectorSetting& setting,
                        const CvOptions& options) {
  if (options.repeats == 0) throw DataError("cross-validation: repeats must be at least 1");
  const auto splits = cv_splits(y.size(), options.folds, options.repeats, options.seed);
  CvResult result;
  result.per_fold_mse.reserve(splits.size());
  for (const auto& split : splits) {
    const auto [train_x, test_x] = features(split);
    const auto train_y = gather(y, split.train);
    const auto test_y = gather(y, split.test);
    const auto pred = fit_predict(setting, options.selector, train_x, train_y, test_x,
                                  fold_model_seed(options.seed, split.repeat, split.fold));
    result.per_fold_mse.push_back(mse(pred, test_y));
  }
  result.mean_mse = mean(result.per_fold_mse);
  return result;
}

CvResult cross_validate(const Matrix& x, std::span<const double> y, const SelectorSetting& setting,
                        const CvOptions& options) {
  if (x.rows() != y.size()) throw DataError("cross_validate: X and y row counts differ");
  return cross_validate(
      [&x](const FoldSplit& s) { return std::make_pair(x.select_rows(s.train), x.select_rows(s.test)); }, y, setting,
      options);
}

// ---------------------------------------------------------------------------

std::uint64_t architecture_seed(std::uint64_t seed, std::size_t n) {
  return derive_seed(seed, SeedTag::kArchitecture, n);
}

namespace {

TrainConfig train_config_for(const PipelineConfig& cfg, std::size_t n) {
  TrainConfig t = cfg.train;
  t.seed = architecture_seed(cfg.seed, n);
  return t;
}

// Auto-encoder inputs are snapped to multiples of 2^-32. Rescaling a raw
// column moves (x - lo) / span by about an ulp; the grid absorbs that, so the
// representation does not depend on the unit a column was recorded in.
Matrix snap_inputs(Matrix m) {
  constexpr double kGrid = 4294967296.0;
  for (double& v : m.values()) v = std::nearbyint(v * kGrid) / kGrid;
  return m;
}

FeatureMatrix named_representation(const FeatureMatrix& cont, Matrix values) {
  return FeatureMatrix(cont.names(), cont.kinds(), std::move(values));
}

}  // namespace

Representation build_representation(const Dataset& d, std::size_t n, const PipelineConfig& cfg) {
  const auto parts = partition(d);
  if (parts.continuous.cols() == 0) throw DataError("dataset has no continuous features to represent");
  auto normalized = min_max_normalize(parts.continuous);
  const Matrix inputs = snap_inputs(normalized.matrix.data());
  Representation rep;
  rep.normalization = std::move(normalized.params);
  rep.sae = train_stacked(inputs, Architecture(parts.continuous.cols(), n), train_config_for(cfg, n));
  rep.represented = named_representation(parts.continuous, represent(rep.sae, inputs));
  rep.encoded_categorical = one_hot_encode(parts.categorical);
  rep.recombined = recombine(rep.represented, rep.encoded_categorical);
  return rep;
}

FeatureMatrix baseline_matrix(const Dataset& d) {
  const auto parts = partition(d);
  return recombine(min_max_normalize(parts.continuous).matrix, one_hot_encode(parts.categorical));
}

CvOptions cv_options(const PipelineConfig& cfg) {
  CvOptions o;
  o.folds = cfg.cv_folds;
  o.repeats = cfg.repeats;
  o.seed = cfg.seed;
  o.selector = cfg.selector_options;
  return o;
}

namespace {

// Per-fold features when normalization and the auto-encoder are refit on the
// training rows only.
std::vector<std::pair<Matrix, Matrix>> per_fold_features(const Dataset& d, std::size_t n, const PipelineConfig& cfg) {
  const auto parts = partition(d);
  if (parts.continuous.cols() == 0) throw DataError("dataset has no continuous features to represent");
  const Matrix categorical = one_hot_encode(parts.categorical).data();
  const auto splits = cv_splits(d.rows(), cfg.cv_folds, cfg.repeats, cfg.seed);
  std::vector<std::pair<Matrix, Matrix>> out;
  out.reserve(splits.size());
  for (const auto& split : splits) {
    const auto train_cont = parts.continuous.select_rows(split.train);
    const auto test_cont = parts.continuous.select_rows(split.test);
    const auto norm = min_max_normalize(train_cont);
    TrainConfig t = train_config_for(cfg, n);
    t.seed = derive_seed(t.seed, SeedTag::kArchitecture, split.repeat, split.fold);
    const Matrix train_in = snap_inputs(norm.matrix.data());
    const auto sae = train_stacked(train_in, Architecture(train_cont.cols(), n), t);
    // Test rows may fall slightly outside [0,1]; the encoders accept any finite input.
    const Matrix test_norm = snap_inputs(apply_normalization(test_cont, norm.params).data());
    Matrix train_x = hconcat(represent(sae, train_in), categorical.select_rows(split.train));
    Matrix test_x = hconcat(represent(sae, test_norm), categorical.select_rows(split.test));
    out.emplace_back(std::move(train_x), std::move(test_x));
  }
  return out;
}

EvaluationResult failed_result(std::size_t n, const SelectorSetting& s, std::size_t index, std::uint64_t seed,
                               const std::exception& e) {
  EvaluationResult r;
  r.n = n;
  r.setting = s;
  r.setting_index = index;
  r.mean_mse = std::numeric_limits<double>::quiet_NaN();
  r.seed = seed;
  r.failed = true;
  r.error = e.what();
  return r;
}

}  // namespace

std::vector<EvaluationResult> evaluate_architecture(const Dataset& d, std::size_t n, const PipelineConfig& cfg) {
  if (n == 0) throw ConfigError("hidden width n must be at least 1");
  const auto settings = resolve_settings(cfg, d);
  const std::uint64_t seed = architecture_seed(cfg.seed, n);
  const CvOptions options = cv_options(cfg);

  FoldFeatures features;
  Matrix whole;
  std::vector<std::pair<Matrix, Matrix>> cached;
  try {
    if (cfg.sae_per_fold) {
      cached = per_fold_features(d, n, cfg);
      features = [&cached, &cfg](const FoldSplit& s) { return cached[s.repeat * cfg.cv_folds + s.fold]; };
    } else {
      whole = build_representation(d, n, cfg).recombined.data();
      features = [&whole](const FoldSplit& s) {
        return std::make_pair(whole.select_rows(s.train), whole.select_rows(s.test));
      };
    }
  } catch (const TrainingDiverged& e) {
    if (cfg.strict) throw;
    std::vector<EvaluationResult> out;
    for (std::size_t i = 0; i < settings.size(); ++i) out.push_back(failed_result(n, settings[i], i, seed, e));
    return out;
  }

  std::vector<EvaluationResult> out;
  out.reserve(settings.size());
  for (std::size_t i = 0; i < settings.size(); ++i) {
    try {
      const auto cv = cross_validate(features, d.target(), settings[i], options);
      EvaluationResult r;
      r.n = n;
      r.setting = settings[i];
      r.setting_index = i;
      r.mean_mse = cv.mean_mse;
      r.per_fold_mse = cv.per_fold_mse;
      r.seed = seed;
      out.push_back(std::move(r));
    } catch (const LassoNotConverged& e) {
      if (cfg.strict) throw;
      out.push_back(failed_result(n, settings[i], i, seed, e));
    }
  }
  return out;
}

std::vector<EvaluationResult> run_baseline(const Dataset& d, const PipelineConfig& cfg) {
  validate(cfg, d.rows());
  const auto settings = resolve_settings(cfg, d);
  const Matrix x = baseline_matrix(d).data();
  CvOptions options = cv_options(cfg);
  options.selector.threads = cfg.threads;
  std::vector<EvaluationResult> out;
  for (std::size_t i = 0; i < settings.size(); ++i) {
    try {
      const auto cv = cross_validate(x, d.target(), settings[i], options);
      EvaluationResult r;
      r.n = 0;
      r.setting = settings[i];
      r.setting_index = i;
      r.mean_mse = cv.mean_mse;
      r.per_fold_mse = cv.per_fold_mse;
      r.seed = cfg.seed;
      out.push_back(std::move(r));
    } catch (const LassoNotConverged& e) {
      if (cfg.strict) throw;
      out.push_back(failed_result(0, settings[i], i, cfg.seed, e));
    }
  }
  return out;
}

const EvaluationResult& select_best(std::span<const EvaluationResult> results) {
  const EvaluationResult* best = nullptr;
  for (const auto& r : results) {
    if (r.failed) continue;
    if (best == nullptr || r.mean_mse < best->mean_mse ||
        (r.mean_mse == best->mean_mse &&
         (r.n < best->n || (r.n == best->n && r.setting_index < best->setting_index)))) {
      best = &r;
    }
  }
  if (best == nullptr) throw std::runtime_error("every evaluated configuration failed");
  return *best;
}

SafsReport run_safs(const Dataset& d, const PipelineConfig& cfg, bool with_baseline) {
  const auto started = std::chrono::steady_clock::now();
  validate(cfg, d.rows());
  SafsReport report;
  report.config = cfg;
  report.n_grid = resolve_n_grid(cfg, d);
  report.settings = resolve_settings(cfg, d);
  report.rows = d.rows();
  report.continuous_features = d.continuous_count();
  report.categorical_features = d.categorical_count();
  if (report.continuous_features == 0) throw DataError("dataset has no continuous features to represent");

  PipelineConfig inner = cfg;
  inner.selector_options.threads = 1;
  std::vector<std::vector<EvaluationResult>> per_n(report.n_grid.size());
  std::vector<std::exception_ptr> errors(report.n_grid.size());
  const auto count = static_cast<std::ptrdiff_t>(report.n_grid.size());
#pragma omp parallel for num_threads(cfg.threads) schedule(dynamic) if (cfg.threads > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    try {
      per_n[ui] = evaluate_architecture(d, report.n_grid[ui], inner);
    } catch (...) {
      errors[ui] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& block : per_n) {
    for (auto& r : block) report.all_results.push_back(std::move(r));
  }

  report.best = select_best(report.all_results);
  const auto rep = build_representation(d, report.best.n, cfg);
  report.recombined_width = rep.recombined.cols();
  SelectorOptions final_options = cfg.selector_options;
  final_options.threads = cfg.threads;
  report.ranking = fit_ranking(report.best.setting, final_options, rep.recombined.data(), d.target(),
                               rep.recombined.names(), derive_seed(cfg.seed, SeedTag::kFinalFit));

  if (with_baseline) report.baseline_results = run_baseline(d, cfg);
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace safs
