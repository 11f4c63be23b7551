#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "safs/autoencoder.hpp"
#include "safs/dataset.hpp"
#include "safs/matrix.hpp"
#include "safs/ranking.hpp"
#include "safs/selector.hpp"

namespace safs {

struct PipelineConfig {
  /// Hidden widths to sweep; empty selects default_n_grid(N).
  std::vector<std::size_t> n_grid;
  SelectorKind selector = SelectorKind::RandomForest;
  std::vector<std::size_t> n_trees{100};
  /// Empty selects `lambda_count` log-spaced values below lambda_max of the
  /// un-represented matrix.
  std::vector<double> lambdas;
  std::size_t lambda_count = 10;
  SelectorOptions selector_options;
  TrainConfig train;
  std::size_t cv_folds = 5;
  std::size_t repeats = 3;
  std::size_t top_k = 15;
  std::uint64_t seed = 0;
  /// Abort on the first failed architecture instead of recording it.
  bool strict = false;
  /// Refit normalization and the auto-encoder on each training fold.
  bool sae_per_fold = false;
  /// Architectures evaluated concurrently.
  int threads = 1;
};

/// 2..N with step max(1, N/50); {1} when N < 2.
std::vector<std::size_t> default_n_grid(std::size_t input_dim);

/// Throws ConfigError when the config cannot run on `rows` rows.
void validate(const PipelineConfig& cfg, std::size_t rows);

/// The resolved n grid and selector settings for a dataset.
std::vector<std::size_t> resolve_n_grid(const PipelineConfig& cfg, const Dataset& d);
std::vector<SelectorSetting> resolve_settings(const PipelineConfig& cfg, const Dataset& d);

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldSplit {
  std::size_t repeat = 0;
  std::size_t fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Repeat-major list of folds. Each repeat shuffles the rows with its own
/// derived seed and deals them into `folds` near-equal contiguous blocks.
std::vector<FoldSplit> cv_splits(std::size_t rows, std::size_t folds, std::size_t repeats, std::uint64_t seed);

/// Seed handed to the model fit on one fold; independent of the features.
std::uint64_t fold_model_seed(std::uint64_t seed, std::size_t repeat, std::size_t fold);

struct CvOptions {
  std::size_t folds = 5;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  SelectorOptions selector;
};

struct CvResult {
  double mean_mse = 0.0;
  /// repeats * folds values, repeat-major.
  std::vector<double> per_fold_mse;
};

CvResult cross_validate(const Matrix& x, std::span<const double> y, const SelectorSetting& setting,
                        const CvOptions& options);

/// Builds (train_x, test_x) for one fold.
using FoldFeatures = std::function<std::pair<Matrix, Matrix>(const FoldSplit&)>;

CvResult cross_validate(const FoldFeatures& features, std::span<const double> y, const SelectorSetting& setting,
                        const CvOptions& options);

// ---------------------------------------------------------------------------
// Architecture evaluation

struct EvaluationResult {
  /// Hidden width; 0 for the un-represented baseline.
  std::size_t n = 0;
  SelectorSetting setting;
  std::size_t setting_index = 0;
  double mean_mse = 0.0;
  std::vector<double> per_fold_mse;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
};

/// Everything derived from the features for one hidden width.
struct Representation {
  NormalizationParams normalization;
  StackedAutoencoder sae;
  /// Middle-layer output. Column i carries the name of continuous input i.
  FeatureMatrix represented;
  FeatureMatrix encoded_categorical;
  FeatureMatrix recombined;
};

/// Seed of the auto-encoder trained for width n.
std::uint64_t architecture_seed(std::uint64_t seed, std::size_t n);

/// Partition, normalize, train the stacked auto-encoder on all rows,
/// represent, and recombine with the one-hot categoricals. Uses no target.
Representation build_representation(const Dataset& d, std::size_t n, const PipelineConfig& cfg);

/// Normalized continuous block + one-hot categoricals, without representation.
FeatureMatrix baseline_matrix(const Dataset& d);

CvOptions cv_options(const PipelineConfig& cfg);

/// One result per selector setting for hidden width n.
std::vector<EvaluationResult> evaluate_architecture(const Dataset& d, std::size_t n, const PipelineConfig& cfg);

std::vector<EvaluationResult> run_baseline(const Dataset& d, const PipelineConfig& cfg);

struct SafsReport {
  PipelineConfig config;
  std::vector<std::size_t> n_grid;
  std::vector<SelectorSetting> settings;
  std::size_t rows = 0;
  std::size_t continuous_features = 0;
  std::size_t categorical_features = 0;
  std::size_t recombined_width = 0;
  /// Grid order: n-major, then setting order.
  std::vector<EvaluationResult> all_results;
  EvaluationResult best;
  ImportanceRanking ranking;
  std::vector<EvaluationResult> baseline_results;
  double wall_time_seconds = 0.0;
};

/// Lowest mean_mse among non-failed results; ties go to the smaller n, then
/// the earlier setting.
const EvaluationResult& select_best(std::span<const EvaluationResult> results);

/// Sweeps n_grid x settings, picks the best, refits it on all rows to rank
/// features, and runs the baseline when `with_baseline` is set.
SafsReport run_safs(const Dataset& d, const PipelineConfig& cfg, bool with_baseline = true);

}  // namespace safs
