#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "safs/matrix.hpp"
#include "safs/ranking.hpp"

namespace safs {

struct LassoOptions {
  /// Stop when the largest coefficient change in a sweep falls below this.
  double tolerance = 1e-8;
  std::size_t max_sweeps = 10000;
};

/// L1-penalized least squares fit on standardized columns.
struct LassoModel {
  double lambda = 0.0;
  double intercept = 0.0;
  /// Original-scale coefficients.
  std::vector<double> coefficients;
  /// Coefficients on the standardized (mean 0, population std 1) scale.
  std::vector<double> standardized_coefficients;
  std::vector<double> column_means;
  /// Population standard deviations; 0 marks a constant column.
  std::vector<double> column_scales;
  std::size_t sweeps = 0;

  double predict(std::span<const double> row) const;
  std::vector<double> predict(const Matrix& x) const;
  std::size_t nonzero_count() const;
};

class LassoNotConverged : public std::runtime_error {
 public:
  explicit LassoNotConverged(LassoModel last);
  const LassoModel& last_iterate() const { return last_; }

 private:
  LassoModel last_;
};

double soft_threshold(double z, double gamma);

/// max_j |(1/m) x_j^T (y - mean(y))| over standardized columns.
double lasso_lambda_max(const Matrix& x, std::span<const double> y);

/// Cyclic coordinate descent on (1/2m)||y - X b||^2 + lambda ||b||_1.
/// `warm_start` holds standardized coefficients to start from.
LassoModel fit_lasso(const Matrix& x, std::span<const double> y, double lambda, const LassoOptions& options = {},
                     std::span<const double> warm_start = {});

/// One model per lambda (strictly descending), each warm-started from the last.
std::vector<LassoModel> lasso_path(const Matrix& x, std::span<const double> y, std::span<const double> lambdas,
                                   const LassoOptions& options = {});

/// |standardized coefficient| as percentages; zero coefficients omitted.
ImportanceRanking lasso_importance(const LassoModel& model, std::span<const std::string> names);

/// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(double lambda_max, std::size_t count, double ratio = 1e-3);

}  // namespace safs
