#include "safs/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "safs/common.hpp"

namespace safs {

double sigmoid(double x) {
  constexpr double kLow = std::numeric_limits<double>::min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  double s;
  if (x >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kLow, kHigh);
}

void DenseLayer::forward(std::span<const double> x, std::span<double> out) const {
  if (x.size() != in_dim()) {
    throw DataError("layer input has length " + std::to_string(x.size()) + ", expected " + std::to_string(in_dim()));
  }
  for (std::size_t o = 0; o < out_dim(); ++o) {
    const auto w = weights.row(o);
    double acc = bias[o];
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * x[i];
    out[o] = sigmoid(acc);
  }
}

std::vector<double> DenseLayer::forward(std::span<const double> x) const {
  std::vector<double> out(out_dim());
  forward(x, out);
  return out;
}

std::vector<double> encode(const Autoencoder& ae, std::span<const double> x) { return ae.encoder.forward(x); }

std::vector<double> decode(const Autoencoder& ae, std::span<const double> z) { return ae.decoder.forward(z); }

std::vector<double> reconstruct(const Autoencoder& ae, std::span<const double> x) {
  return decode(ae, encode(ae, x));
}

double reconstruction_loss(std::span<const double> x, std::span<const double> x_prime) {
  if (x.size() != x_prime.size()) throw DataError("reconstruction_loss: length mismatch");
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x_prime[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

double batch_loss(const Autoencoder& ae, const Matrix& batch) {
  if (batch.rows() == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t r = 0; r < batch.rows(); ++r) acc += reconstruction_loss(batch.row(r), reconstruct(ae, batch.row(r)));
  return acc / static_cast<double>(batch.rows());
}

AutoencoderGradient loss_gradient(const Autoencoder& ae, const Matrix& data, std::span<const std::size_t> rows) {
  if (rows.empty()) throw DataError("loss_gradient: empty batch");
  const std::size_t d = ae.in_dim();
  const std::size_t h = ae.hidden_dim();
  if (data.cols() != d) throw DataError("loss_gradient: batch width does not match the auto-encoder input");

  AutoencoderGradient g{Matrix(h, d), std::vector<double>(h, 0.0), Matrix(d, h), std::vector<double>(d, 0.0)};
  std::vector<double> z(h), x_prime(d), delta_out(d), delta_hidden(h);
  // d(loss)/d(x') for one row is 2(x'-x)/d; the batch mean adds 1/k.
  const double scale = 2.0 / (static_cast<double>(d) * static_cast<double>(rows.size()));

  for (std::size_t r : rows) {
    const auto x = data.row(r);
    ae.encoder.forward(x, z);
    ae.decoder.forward(z, x_prime);
    for (std::size_t i = 0; i < d; ++i) {
      delta_out[i] = scale * (x_prime[i] - x[i]) * x_prime[i] * (1.0 - x_prime[i]);
    }
    for (std::size_t i = 0; i < d; ++i) {
      auto gw = g.decoder_weights.row(i);
      for (std::size_t k = 0; k < h; ++k) gw[k] += delta_out[i] * z[k];
      g.decoder_bias[i] += delta_out[i];
    }
    for (std::size_t k = 0; k < h; ++k) {
      double back = 0.0;
      for (std::size_t i = 0; i < d; ++i) back += ae.decoder.weights(i, k) * delta_out[i];
      delta_hidden[k] = back * z[k] * (1.0 - z[k]);
    }
    for (std::size_t k = 0; k < h; ++k) {
      auto gw = g.encoder_weights.row(k);
      for (std::size_t j = 0; j < d; ++j) gw[j] += delta_hidden[k] * x[j];
      g.encoder_bias[k] += delta_hidden[k];
    }
  }
  return g;
}

AutoencoderGradient loss_gradient(const Autoencoder& ae, const Matrix& batch) {
  std::vector<std::size_t> rows(batch.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return loss_gradient(ae, batch, rows);
}

TrainingDiverged::TrainingDiverged(std::size_t epoch)
    : std::runtime_error("auto-encoder training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                         " (learning rate too large?)"),
      epoch_(epoch) {}

namespace {

void fill_uniform(std::span<double> values, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& v : values) v = dist(rng);
}

void descend(std::span<double> params, std::span<const double> grad, double lr) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

void validate(const TrainConfig& cfg, std::size_t rows) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw DataError("learning_rate must be positive");
  }
  if (!(cfg.weight_init_scale > 0.0) || !std::isfinite(cfg.weight_init_scale)) {
    throw DataError("weight_init_scale must be positive");
  }
  if (cfg.batch_size > rows) {
    throw DataError("batch_size " + std::to_string(cfg.batch_size) + " exceeds the row count " + std::to_string(rows));
  }
}

}  // namespace

Autoencoder initialize_autoencoder(std::size_t in_dim, std::size_t hidden_dim, double scale, std::uint64_t seed) {
  if (in_dim == 0 || hidden_dim == 0) throw DataError("auto-encoder dimensions must be at least 1");
  Autoencoder ae(in_dim, hidden_dim);
  std::mt19937_64 rng(seed);
  fill_uniform(ae.encoder.weights.values(), scale, rng);
  fill_uniform(ae.encoder.bias, scale, rng);
  fill_uniform(ae.decoder.weights.values(), scale, rng);
  fill_uniform(ae.decoder.bias, scale, rng);
  return ae;
}

TrainedAutoencoder train_autoencoder(const Matrix& data, std::size_t hidden_dim, const TrainConfig& cfg) {
  if (data.rows() == 0) throw DataError("train_autoencoder: no rows");
  validate(cfg, data.rows());
  for (double v : data.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw DataError("train_autoencoder: inputs must lie in [0,1]");
  }

  TrainedAutoencoder out{initialize_autoencoder(data.cols(), hidden_dim, cfg.weight_init_scale, cfg.seed), {}};
  Autoencoder& ae = out.model;
  const std::size_t batch = cfg.batch_size == 0 ? std::min<std::size_t>(32, data.rows()) : cfg.batch_size;

  std::mt19937_64 shuffle_rng(mix64(cfg.seed));
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  out.loss_log.reserve(cfg.epochs);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      const auto g = loss_gradient(ae, data, std::span<const std::size_t>(order).subspan(start, len));
      descend(ae.encoder.weights.values(), g.encoder_weights.values(), cfg.learning_rate);
      descend(ae.encoder.bias, g.encoder_bias, cfg.learning_rate);
      descend(ae.decoder.weights.values(), g.decoder_weights.values(), cfg.learning_rate);
      descend(ae.decoder.bias, g.decoder_bias, cfg.learning_rate);
    }
    const double loss = batch_loss(ae, data);
    if (!std::isfinite(loss)) throw TrainingDiverged(epoch + 1);
    out.loss_log.push_back(loss);
  }
  return out;
}

Architecture::Architecture(std::size_t input_dim_, std::size_t hidden_width_)
    : input_dim(input_dim_), hidden_width(hidden_width_) {
  if (input_dim == 0 || hidden_width == 0) throw DataError("architecture widths must be at least 1");
}

std::uint64_t stage_seed(std::uint64_t seed, std::size_t stage) {
  return derive_seed(seed, SeedTag::kAutoencoderStage, stage);
}

namespace {

Matrix encode_rows(const Autoencoder& ae, const Matrix& data) {
  Matrix out(data.rows(), ae.hidden_dim());
  for (std::size_t r = 0; r < data.rows(); ++r) ae.encoder.forward(data.row(r), out.row(r));
  return out;
}

}  // namespace

StackedAutoencoder train_stacked(const Matrix& data, const Architecture& arch, const TrainConfig& cfg) {
  if (data.cols() != arch.input_dim) {
    throw DataError("train_stacked: data has " + std::to_string(data.cols()) + " columns, architecture expects " +
                    std::to_string(arch.input_dim));
  }
  StackedAutoencoder sae;
  sae.architecture = arch;

  TrainConfig first = cfg;
  first.seed = stage_seed(cfg.seed, 0);
  auto stage1 = train_autoencoder(data, arch.hidden_width, first);
  const Matrix codes = encode_rows(stage1.model, data);

  TrainConfig second = cfg;
  second.seed = stage_seed(cfg.seed, 1);
  auto stage2 = train_autoencoder(codes, arch.input_dim, second);

  sae.stages = {std::move(stage1.model), std::move(stage2.model)};
  sae.training_log = {std::move(stage1.loss_log), std::move(stage2.loss_log)};
  return sae;
}

StackedAutoencoder retrain_second_stage(const StackedAutoencoder& sae, const Matrix& data, const TrainConfig& cfg) {
  StackedAutoencoder out = sae;
  const Matrix codes = encode_rows(sae.stages[0], data);
  TrainConfig second = cfg;
  second.seed = stage_seed(cfg.seed, 1);
  auto stage2 = train_autoencoder(codes, sae.architecture.input_dim, second);
  out.stages[1] = std::move(stage2.model);
  out.training_log[1] = std::move(stage2.loss_log);
  return out;
}

Matrix represent(const StackedAutoencoder& sae, const Matrix& data, int threads) {
  const auto& s1 = sae.stages.at(0);
  const auto& s2 = sae.stages.at(1);
  if (data.cols() != s1.in_dim()) {
    throw DataError("represent: data has " + std::to_string(data.cols()) + " columns, model expects " +
                    std::to_string(s1.in_dim()));
  }
  Matrix out(data.rows(), s2.hidden_dim());
  const auto rows = static_cast<std::ptrdiff_t>(data.rows());
#pragma omp parallel num_threads(std::max(1, threads)) if (threads > 1)
  {
    std::vector<double> z(s1.hidden_dim());
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
      const auto ur = static_cast<std::size_t>(r);
      s1.encoder.forward(data.row(ur), z);
      s2.encoder.forward(z, out.row(ur));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr const char* kMagic = "safs-stacked-autoencoder";
constexpr int kFormatVersion = 1;

void write_block(std::ostream& out, const char* key, std::span<const double> values) {
  out << key;
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

std::vector<double> read_block(std::istream& in, const std::string& key, std::size_t count) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("model file truncated before '" + key + "'");
  std::istringstream ls(line);
  std::string got;
  ls >> got;
  if (got != key) throw DataError("model file: expected '" + key + "', found '" + got + "'");
  std::vector<double> values;
  values.reserve(count);
  std::string tok;
  while (ls >> tok) values.push_back(parse_double(tok));
  if (values.size() != count) {
    throw DataError("model file: '" + key + "' has " + std::to_string(values.size()) + " values, expected " +
                    std::to_string(count));
  }
  return values;
}

}  // namespace

void save_model(const StackedAutoencoder& sae, std::ostream& out) {
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "architecture " << sae.architecture.input_dim << ' ' << sae.architecture.hidden_width << '\n';
  out << "stages " << sae.stages.size() << '\n';
  for (std::size_t s = 0; s < sae.stages.size(); ++s) {
    const auto& ae = sae.stages[s];
    out << "stage " << s << ' ' << ae.in_dim() << ' ' << ae.hidden_dim() << '\n';
    write_block(out, "encoder_weights", ae.encoder.weights.values());
    write_block(out, "encoder_bias", ae.encoder.bias);
    write_block(out, "decoder_weights", ae.decoder.weights.values());
    write_block(out, "decoder_bias", ae.decoder.bias);
  }
}

StackedAutoencoder load_model(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw DataError("not a stacked auto-encoder model file");
  if (version != kFormatVersion) throw DataError("unsupported model format version " + std::to_string(version));
  std::string key;
  std::size_t big = 0, small = 0, count = 0;
  if (!(in >> key >> big >> small) || key != "architecture") throw DataError("model file: bad architecture line");
  if (!(in >> key >> count) || key != "stages" || count != 2) throw DataError("model file: expected 2 stages");
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');

  StackedAutoencoder sae;
  sae.architecture = Architecture(big, small);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t index = 0, in_dim = 0, hid = 0;
    if (!(in >> key >> index >> in_dim >> hid) || key != "stage" || index != s) {
      throw DataError("model file: bad stage header");
    }
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    Autoencoder ae(in_dim, hid);
    ae.encoder.weights = Matrix(hid, in_dim, read_block(in, "encoder_weights", hid * in_dim));
    ae.encoder.bias = read_block(in, "encoder_bias", hid);
    ae.decoder.weights = Matrix(in_dim, hid, read_block(in, "decoder_weights", in_dim * hid));
    ae.decoder.bias = read_block(in, "decoder_bias", in_dim);
    sae.stages.push_back(std::move(ae));
  }
  const auto& st = sae.stages;
  if (st[0].in_dim() != big || st[0].hidden_dim() != small || st[1].in_dim() != small || st[1].hidden_dim() != big) {
    throw DataError("model file: stage dimensions disagree with the architecture");
  }
  sae.training_log.resize(2);
  return sae;
}

}  // namespace safs
