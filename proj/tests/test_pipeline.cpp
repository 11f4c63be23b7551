#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "safs/common.hpp"
#include "safs/pipeline.hpp"
#include "safs/serial.hpp"

using namespace safs;

TEST_CASE("default n grid") {
  CHECK(default_n_grid(1) == std::vector<std::size_t>{1});
  CHECK(default_n_grid(5) == std::vector<std::size_t>{2, 3, 4, 5});
  const auto big = default_n_grid(106);
  CHECK(big.front() == 2);
  CHECK(big[1] == 4);
  CHECK(big.back() <= 106);
}

TEST_CASE("cv splits partition the rows in every repeat") {
  const auto splits = cv_splits(23, 5, 3, 42);
  REQUIRE(splits.size() == 15);
  for (std::size_t r = 0; r < 3; ++r) {
    std::vector<std::size_t> seen;
    for (std::size_t f = 0; f < 5; ++f) {
      const auto& s = splits[r * 5 + f];
      CHECK(s.repeat == r);
      CHECK(s.fold == f);
      CHECK(s.train.size() + s.test.size() == 23);
      CHECK((s.test.size() == 4 || s.test.size() == 5));
      std::vector<std::size_t> both;
      std::set_intersection(s.train.begin(), s.train.end(), s.test.begin(), s.test.end(), std::back_inserter(both));
      CHECK(both.empty());
      seen.insert(seen.end(), s.test.begin(), s.test.end());
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::size_t> all(23);
    std::iota(all.begin(), all.end(), std::size_t{0});
    CHECK(seen == all);
  }
  const auto again = cv_splits(23, 5, 3, 42);
  for (std::size_t i = 0; i < splits.size(); ++i) CHECK(again[i].test == splits[i].test);
  CHECK_FALSE(cv_splits(23, 5, 1, 43)[0].test == splits[0].test);
  CHECK_FALSE(splits[0].test == splits[5].test);
}

TEST_CASE("leave-one-out is the folds == rows case") {
  const auto loo = cv_splits(12, 12, 1, 0);
  REQUIRE(loo.size() == 12);
  for (const auto& s : loo) {
    CHECK(s.test.size() == 1);
    CHECK(s.train.size() == 11);
  }
  CHECK_THROWS_AS(cv_splits(12, 13, 1, 0), DataError);
}

TEST_CASE("mean-predictor cross-validation estimates the target variance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(10.0, 3.0);
  std::vector<double> y(200);
  for (double& v : y) v = n(rng);
  CvOptions o;
  o.folds = 5;
  o.repeats = 3;
  const auto cv = cross_validate(Matrix(200, 1), y, MeanSetting{}, o);
  CHECK(cv.per_fold_mse.size() == 15);
  CHECK(std::abs(cv.mean_mse - variance(y)) <= 0.15 * variance(y));
}

TEST_CASE("cross-validation reuses splits and model seeds across feature sets") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  const auto x = baseline_matrix(d).data();
  CvOptions o;
  o.folds = 4;
  o.repeats = 2;
  o.seed = 3;
  const auto a = cross_validate(x, d.target(), ForestSetting{10}, o);
  const auto b = cross_validate(x, d.target(), ForestSetting{10}, o);
  CHECK(a.per_fold_mse == b.per_fold_mse);
  CHECK(fold_model_seed(3, 0, 1) != fold_model_seed(3, 1, 0));
}

TEST_CASE("representation is invariant to the target") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  auto y = d.target();
  std::mt19937_64 rng(1);
  std::shuffle(y.begin(), y.end(), rng);
  const auto permuted = d.with_target(y);
  const auto cfg = testutil::quick_config();
  const auto a = build_representation(d, 3, cfg);
  const auto b = build_representation(permuted, 3, cfg);
  CHECK(a.sae.stages == b.sae.stages);
  CHECK(a.recombined == b.recombined);
}

TEST_CASE("representation is invariant to rescaling a continuous column") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  const auto rescaled = [&](double factor) {
    auto cols = d.columns();
    for (double& v : cols[0].values) v *= factor;
    return Dataset(cols, d.target(), d.target_name());
  };
  const auto cfg = testutil::quick_config();
  const auto base = build_representation(d, 3, cfg).represented.data();
  for (double factor : {10.0, 4.0, 0.1, 1000.0}) {
    CHECK(build_representation(rescaled(factor), 3, cfg).represented.data() == base);
  }
}

TEST_CASE("build_representation layout") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  const auto rep = build_representation(d, 2, testutil::quick_config());
  CHECK(rep.represented.cols() == 6);
  CHECK(rep.encoded_categorical.cols() == 6);
  CHECK(rep.recombined.cols() == 12);
  CHECK(rep.recombined.names().front() == "x1");
  CHECK(rep.recombined.names()[6] == "c1=L1");
  CHECK(rep.sae.architecture == Architecture(6, 2));
  CHECK(baseline_matrix(d).cols() == 12);
}

TEST_CASE("evaluate_architecture yields one finite result per setting") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  auto cfg = testutil::quick_config();
  cfg.n_trees = {5, 10};
  const auto results = evaluate_architecture(d, 3, cfg);
  REQUIRE(results.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(results[i].n == 3);
    CHECK(results[i].setting_index == i);
    CHECK(std::isfinite(results[i].mean_mse));
    CHECK(results[i].per_fold_mse.size() == 3);
    CHECK_FALSE(results[i].failed);
  }
  CHECK(std::get<ForestSetting>(results[1].setting).n_trees == 10);
}

TEST_CASE("per-fold auto-encoder mode") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  auto cfg = testutil::quick_config();
  cfg.sae_per_fold = true;
  const auto results = evaluate_architecture(d, 2, cfg);
  REQUIRE(results.size() == 1);
  CHECK(std::isfinite(results[0].mean_mse));
  cfg.sae_per_fold = false;
  CHECK(evaluate_architecture(d, 2, cfg)[0].mean_mse != results[0].mean_mse);
}

TEST_CASE("lasso settings resolve from lambda_max") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  auto cfg = testutil::quick_config();
  cfg.selector = SelectorKind::Lasso;
  cfg.lambda_count = 4;
  const auto settings = resolve_settings(cfg, d);
  REQUIRE(settings.size() == 4);
  const double lmax = lasso_lambda_max(baseline_matrix(d).data(), d.target());
  CHECK(std::get<LassoSetting>(settings[0]).lambda == lmax);
  cfg.lambdas = {0.5, 0.1};
  CHECK(resolve_settings(cfg, d).size() == 2);

  const auto flat = d.with_target(std::vector<double>(d.rows(), 3.0));
  cfg.lambdas.clear();
  const auto zero = resolve_settings(cfg, flat);
  REQUIRE(zero.size() == 1);
  CHECK(std::get<LassoSetting>(zero[0]).lambda == 0.0);
}

TEST_CASE("non-converged lasso fits are recorded as failures unless strict") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  auto cfg = testutil::quick_config();
  cfg.selector = SelectorKind::Lasso;
  cfg.lambdas = {0.0};
  cfg.selector_options.lasso.max_sweeps = 1;
  cfg.selector_options.lasso.tolerance = 0.0;
  const auto results = evaluate_architecture(d, 2, cfg);
  REQUIRE(results.size() == 1);
  CHECK(results[0].failed);
  CHECK(std::isnan(results[0].mean_mse));
  CHECK_THROWS_AS(select_best(results), std::runtime_error);
  cfg.strict = true;
  CHECK_THROWS_AS(evaluate_architecture(d, 2, cfg), LassoNotConverged);
}

TEST_CASE("select_best breaks ties by smaller n then setting order") {
  std::vector<EvaluationResult> r(4);
  r[0].n = 8, r[0].mean_mse = 2.0;
  r[1].n = 4, r[1].mean_mse = 2.0, r[1].setting_index = 1;
  r[2].n = 4, r[2].mean_mse = 2.0, r[2].setting_index = 0;
  r[3].n = 2, r[3].mean_mse = 1.0, r[3].failed = true;
  const auto& best = select_best(r);
  CHECK(best.n == 4);
  CHECK(best.setting_index == 0);
}

TEST_CASE("run_safs sweeps the grid and ranks the recombined features") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  const auto cfg = testutil::quick_config();
  const auto report = run_safs(d, cfg);
  CHECK(report.n_grid == cfg.n_grid);
  CHECK(report.all_results.size() == 2);
  CHECK(report.recombined_width == 12);
  CHECK(report.ranking.size() == 12);
  CHECK(report.baseline_results.size() == 1);
  double lowest = INFINITY;
  for (const auto& r : report.all_results) lowest = std::min(lowest, r.mean_mse);
  CHECK(report.best.mean_mse == lowest);
}

TEST_CASE("threaded sweep equals the serial reference") {
  const auto d = testutil::synth_dataset(testutil::small_spec(2));
  auto cfg = testutil::quick_config();
  cfg.n_grid = {2, 3, 4, 5};
  const auto ref = serial::sweep(d, cfg);
  cfg.threads = 4;
  const auto report = run_safs(d, cfg, false);
  REQUIRE(report.all_results.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(report.all_results[i].n == ref[i].n);
    CHECK(report.all_results[i].per_fold_mse == ref[i].per_fold_mse);
  }
}

TEST_CASE("config validation") {
  auto cfg = testutil::quick_config();
  CHECK_NOTHROW(validate(cfg, 60));
  cfg.cv_folds = 61;
  CHECK_THROWS_AS(validate(cfg, 60), ConfigError);
  cfg = testutil::quick_config();
  cfg.n_grid = {0};
  CHECK_THROWS_AS(validate(cfg, 60), ConfigError);
  cfg = testutil::quick_config();
  cfg.train.batch_size = 61;
  CHECK_THROWS_AS(validate(cfg, 60), ConfigError);
  cfg = testutil::quick_config();
  cfg.n_trees = {};
  CHECK_THROWS_AS(validate(cfg, 60), ConfigError);
}

TEST_CASE("all-continuous data recombines to width N and distinct n give distinct models") {
  auto spec = testutil::small_spec();
  spec.p_cat = 0;
  const auto d = testutil::synth_dataset(spec);
  const auto cfg = testutil::quick_config();
  const auto a = build_representation(d, 2, cfg);
  const auto b = build_representation(d, 3, cfg);
  CHECK(a.recombined.cols() == 6);
  std::ostringstream ma, mb;
  save_model(a.sae, ma);
  save_model(b.sae, mb);
  CHECK(ma.str() != mb.str());
}

TEST_CASE("a linear target is predicted better than its variance") {
  SynthSpec spec;
  spec.m = 300;
  spec.p_cont = 20;
  spec.k_relevant = 5;
  spec.noise_std = 0.1;
  const auto d = testutil::synth_dataset(spec);
  PipelineConfig cfg;
  cfg.n_trees = {50};
  cfg.repeats = 1;
  const auto r = evaluate_architecture(d, 10, cfg);
  REQUIRE(r.size() == 1);
  CHECK(std::isfinite(r[0].mean_mse));
  CHECK(r[0].mean_mse < variance(d.target()));
  CHECK(std::abs(r[0].mean_mse - mean(r[0].per_fold_mse)) <= 1e-12);
}

TEST_CASE("a single-width grid yields one result per selector setting") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  auto cfg = testutil::quick_config();
  cfg.n_grid = {3};
  cfg.n_trees = {5, 10, 20};
  const auto report = run_safs(d, cfg, false);
  CHECK(report.all_results.size() == 3);
  CHECK(report.ranking.size() >= std::min<std::size_t>(cfg.top_k, report.recombined_width));
}

TEST_CASE("pure-noise targets leave both runs near the target variance") {
  SynthSpec big = testutil::small_spec();
  big.m = 200;
  const auto d = testutil::synth_dataset(big);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 2);
  std::vector<double> y(d.rows());
  for (double& v : y) v = n(rng);
  const auto noise = d.with_target(y);
  auto cfg = testutil::quick_config();
  cfg.n_trees = {50};
  cfg.cv_folds = 5;
  cfg.repeats = 2;
  const auto report = run_safs(noise, cfg);
  const double v = variance(y);
  CHECK(std::abs(report.best.mean_mse - v) <= 0.2 * v);
  CHECK(std::abs(select_best(report.baseline_results).mean_mse - v) <= 0.2 * v);
}

TEST_CASE("baseline and representation runs see the same folds") {
  const auto d = testutil::synth_dataset(testutil::small_spec());
  const auto cfg = testutil::quick_config();
  const auto splits = cv_splits(d.rows(), cfg.cv_folds, cfg.repeats, cfg.seed);
  // Both paths derive their splits from cv_options(cfg); a feature matrix with
  // the row index as its only column exposes the fold assignment.
  Matrix ids(d.rows(), 1);
  for (std::size_t r = 0; r < d.rows(); ++r) ids(r, 0) = static_cast<double>(r);
  std::vector<std::vector<std::size_t>> seen;
  const FoldFeatures spy = [&](const FoldSplit& s) {
    seen.push_back(s.test);
    return std::make_pair(ids.select_rows(s.train), ids.select_rows(s.test));
  };
  cross_validate(spy, d.target(), MeanSetting{}, cv_options(cfg));
  REQUIRE(seen.size() == splits.size());
  for (std::size_t i = 0; i < splits.size(); ++i) CHECK(seen[i] == splits[i].test);
}
