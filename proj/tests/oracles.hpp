#pragma once

// Test-only reference computations. Nothing here calls into the code paths
// being checked: layers are evaluated with naive loops, gradients by central
// differences, least squares by Eigen's normal-equation solve.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "safs/autoencoder.hpp"
#include "safs/matrix.hpp"

namespace oracle {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline std::vector<double> layer(const safs::Matrix& w, const std::vector<double>& b, const std::vector<double>& x) {
  std::vector<double> out(w.rows());
  for (std::size_t o = 0; o < w.rows(); ++o) {
    double acc = 0.0;
    for (std::size_t i = 0; i < w.cols(); ++i) acc += w(o, i) * x[i];
    out[o] = logistic(acc + b[o]);
  }
  return out;
}

inline double row_loss(const safs::Autoencoder& ae, const std::vector<double>& x) {
  const auto z = layer(ae.encoder.weights, ae.encoder.bias, x);
  const auto xp = layer(ae.decoder.weights, ae.decoder.bias, z);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - xp[i]) * (x[i] - xp[i]);
  return acc / static_cast<double>(x.size());
}

inline double loss(const safs::Autoencoder& ae, const safs::Matrix& batch) {
  double acc = 0.0;
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    const auto row = batch.row(r);
    acc += row_loss(ae, std::vector<double>(row.begin(), row.end()));
  }
  return acc / static_cast<double>(batch.rows());
}

/// Central-difference gradient of `loss` for every parameter, flattened in the
/// order encoder W, encoder b, decoder W, decoder b.
inline std::vector<double> fd_gradient(safs::Autoencoder ae, const safs::Matrix& batch, double step) {
  std::vector<double> out;
  const auto perturb = [&](double& p) {
    const double saved = p;
    p = saved + step;
    const double up = loss(ae, batch);
    p = saved - step;
    const double down = loss(ae, batch);
    p = saved;
    out.push_back((up - down) / (2.0 * step));
  };
  for (double& p : ae.encoder.weights.values()) perturb(p);
  for (double& p : ae.encoder.bias) perturb(p);
  for (double& p : ae.decoder.weights.values()) perturb(p);
  for (double& p : ae.decoder.bias) perturb(p);
  return out;
}

inline std::vector<double> flatten(const safs::AutoencoderGradient& g) {
  std::vector<double> out;
  out.insert(out.end(), g.encoder_weights.values().begin(), g.encoder_weights.values().end());
  out.insert(out.end(), g.encoder_bias.begin(), g.encoder_bias.end());
  out.insert(out.end(), g.decoder_weights.values().begin(), g.decoder_weights.values().end());
  out.insert(out.end(), g.decoder_bias.begin(), g.decoder_bias.end());
  return out;
}

/// |a - f| / max(|a|, |f|, floor). The floor keeps coordinates whose true
/// value is ~0 from turning round-off into a large relative error.
inline double relative_error(double analytic, double numeric, double floor = 1e-7) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Ordinary least squares with intercept via the normal equations.
/// Returns {intercept, b_1..b_p}.
inline std::vector<double> ols(const safs::Matrix& x, const std::vector<double>& y) {
  const auto m = static_cast<Eigen::Index>(x.rows());
  const auto p = static_cast<Eigen::Index>(x.cols());
  Eigen::MatrixXd a(m, p + 1);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < p; ++j) a(i, j + 1) = x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd beta = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  return {beta.data(), beta.data() + beta.size()};
}

inline safs::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = 0.0,
                                  double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  safs::Matrix m(rows, cols);
  for (double& v : m.values()) v = d(rng);
  return m;
}

inline safs::Autoencoder random_autoencoder(std::size_t in, std::size_t hid, std::mt19937_64& rng,
                                            double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  safs::Autoencoder ae(in, hid);
  for (double& v : ae.encoder.weights.values()) v = d(rng);
  for (double& v : ae.encoder.bias) v = d(rng);
  for (double& v : ae.decoder.weights.values()) v = d(rng);
  for (double& v : ae.decoder.bias) v = d(rng);
  return ae;
}

}  // namespace oracle
