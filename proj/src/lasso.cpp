#include "safs/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "safs/common.hpp"

namespace safs {

double LassoModel::predict(std::span<const double> row) const {
  double acc = intercept;
  for (std::size_t j = 0; j < coefficients.size(); ++j) acc += coefficients[j] * row[j];
  return acc;
}

std::vector<double> LassoModel::predict(const Matrix& x) const {
  if (x.cols() != coefficients.size()) throw DataError("lasso predict: column count mismatch");
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict(x.row(r));
  return out;
}

std::size_t LassoModel::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(coefficients.begin(), coefficients.end(), [](double b) { return b != 0.0; }));
}

LassoNotConverged::LassoNotConverged(LassoModel last)
    : std::runtime_error("lasso did not converge within " + std::to_string(last.sweeps) +
                         " sweeps (lambda=" + format_double(last.lambda) + ")"),
      last_(std::move(last)) {}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

namespace {

// Column-major standardized copy of X plus the centered target.
struct Standardized {
  std::size_t m = 0;
  std::size_t p = 0;
  std::vector<double> cols;
  std::vector<double> means;
  std::vector<double> scales;
  std::vector<double> y;
  double y_mean = 0.0;

  std::span<const double> col(std::size_t j) const { return {cols.data() + j * m, m}; }
};

Standardized standardize(const Matrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) throw DataError("lasso: X and y row counts differ");
  if (x.rows() < 2) throw DataError("lasso: at least 2 rows required");
  if (x.cols() == 0) throw DataError("lasso: no features");
  Standardized s;
  s.m = x.rows();
  s.p = x.cols();
  s.cols.resize(s.m * s.p);
  s.means.resize(s.p);
  s.scales.resize(s.p);
  const double inv_m = 1.0 / static_cast<double>(s.m);
  for (std::size_t j = 0; j < s.p; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < s.m; ++i) mu += x(i, j);
    mu *= inv_m;
    double ss = 0.0;
    for (std::size_t i = 0; i < s.m; ++i) ss += (x(i, j) - mu) * (x(i, j) - mu);
    const double sd = std::sqrt(ss * inv_m);
    // Relative cutoff: a column whose spread is rounding noise is constant.
    const bool constant = !(sd > 1e-12 * std::max(1.0, std::abs(mu)));
    s.means[j] = mu;
    s.scales[j] = constant ? 0.0 : sd;
    double* dst = s.cols.data() + j * s.m;
    for (std::size_t i = 0; i < s.m; ++i) dst[i] = constant ? 0.0 : (x(i, j) - mu) / sd;
  }
  double ym = 0.0;
  for (double v : y) ym += v;
  s.y_mean = ym * inv_m;
  s.y.resize(s.m);
  for (std::size_t i = 0; i < s.m; ++i) s.y[i] = y[i] - s.y_mean;
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

LassoModel solve(const Standardized& s, double lambda, const LassoOptions& options, std::span<const double> warm) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DataError("lasso: lambda must be a finite non-negative number");
  if (!warm.empty() && warm.size() != s.p) throw DataError("lasso: warm start has the wrong length");

  std::vector<double> beta(s.p, 0.0);
  if (!warm.empty()) std::copy(warm.begin(), warm.end(), beta.begin());
  for (std::size_t j = 0; j < s.p; ++j) {
    if (s.scales[j] == 0.0) beta[j] = 0.0;
  }
  std::vector<double> residual = s.y;
  for (std::size_t j = 0; j < s.p; ++j) {
    if (beta[j] == 0.0) continue;
    const auto xj = s.col(j);
    for (std::size_t i = 0; i < s.m; ++i) residual[i] -= beta[j] * xj[i];
  }

  const double inv_m = 1.0 / static_cast<double>(s.m);
  bool converged = false;
  std::size_t sweep = 0;
  while (sweep < options.max_sweeps) {
    ++sweep;
    double max_change = 0.0;
    for (std::size_t j = 0; j < s.p; ++j) {
      if (s.scales[j] == 0.0) continue;
      const auto xj = s.col(j);
      // Standardized columns have (1/m) x_j^T x_j = 1.
      const double rho = inv_m * dot(xj, residual) + beta[j];
      const double updated = soft_threshold(rho, lambda);
      const double delta = updated - beta[j];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < s.m; ++i) residual[i] -= delta * xj[i];
        beta[j] = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < options.tolerance) {
      converged = true;
      break;
    }
  }

  LassoModel model;
  model.lambda = lambda;
  model.sweeps = sweep;
  model.standardized_coefficients = beta;
  model.column_means = s.means;
  model.column_scales = s.scales;
  model.coefficients.resize(s.p);
  model.intercept = s.y_mean;
  for (std::size_t j = 0; j < s.p; ++j) {
    model.coefficients[j] = s.scales[j] == 0.0 ? 0.0 : beta[j] / s.scales[j];
    model.intercept -= model.coefficients[j] * s.means[j];
  }
  if (!converged) throw LassoNotConverged(std::move(model));
  return model;
}

}  // namespace

double lasso_lambda_max(const Matrix& x, std::span<const double> y) {
  const auto s = standardize(x, y);
  // Same expression as the coordinate update so that lambda_max zeroes every coefficient exactly.
  const double inv_m = 1.0 / static_cast<double>(s.m);
  double best = 0.0;
  for (std::size_t j = 0; j < s.p; ++j) best = std::max(best, std::abs(inv_m * dot(s.col(j), s.y)));
  return best;
}

LassoModel fit_lasso(const Matrix& x, std::span<const double> y, double lambda, const LassoOptions& options,
                     std::span<const double> warm_start) {
  return solve(standardize(x, y), lambda, options, warm_start);
}

std::vector<LassoModel> lasso_path(const Matrix& x, std::span<const double> y, std::span<const double> lambdas,
                                   const LassoOptions& options) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0)) throw DataError("lasso_path: lambdas must be non-negative");
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw DataError("lasso_path: lambdas must be strictly descending");
  }
  const auto s = standardize(x, y);
  std::vector<LassoModel> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const std::span<const double> warm =
        path.empty() ? std::span<const double>{} : std::span<const double>(path.back().standardized_coefficients);
    path.push_back(solve(s, lambda, options, warm));
  }
  return path;
}

ImportanceRanking lasso_importance(const LassoModel& model, std::span<const std::string> names) {
  if (names.size() != model.standardized_coefficients.size()) {
    throw DataError("lasso_importance: one name per coefficient required");
  }
  std::vector<double> raw(names.size());
  for (std::size_t j = 0; j < raw.size(); ++j) raw[j] = std::abs(model.standardized_coefficients[j]);
  return ImportanceRanking::from_raw(names, raw, /*omit_zero=*/true);
}

std::vector<double> lambda_grid(double lambda_max, std::size_t count, double ratio) {
  if (count == 0) return {};
  if (count == 1) return {lambda_max};
  std::vector<double> out(count);
  const double lo = std::log(ratio);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = lambda_max * std::exp(lo * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

}  // namespace safs
