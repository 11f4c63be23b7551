#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "safs/matrix.hpp"

namespace safs {

/// Logistic function. Saturates at the representable values nearest to 0 and
/// 1 so the result always lies strictly inside (0,1).
double sigmoid(double x);

/// Fully connected sigmoid layer: out = sigmoid(weights * in + bias).
struct DenseLayer {
  Matrix weights;  // out_dim x in_dim
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim) : weights(out_dim, in_dim), bias(out_dim, 0.0) {}

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }

  std::vector<double> forward(std::span<const double> x) const;
  void forward(std::span<const double> x, std::span<double> out) const;

  bool operator==(const DenseLayer&) const = default;
};

/// Single auto-encoder with independent (untied) encoder and decoder.
struct Autoencoder {
  DenseLayer encoder;  // in_dim -> hidden_dim
  DenseLayer decoder;  // hidden_dim -> in_dim

  Autoencoder() = default;
  Autoencoder(std::size_t in_dim, std::size_t hidden_dim) : encoder(in_dim, hidden_dim), decoder(hidden_dim, in_dim) {}

  std::size_t in_dim() const { return encoder.in_dim(); }
  std::size_t hidden_dim() const { return encoder.out_dim(); }

  bool operator==(const Autoencoder&) const = default;
};

std::vector<double> encode(const Autoencoder& ae, std::span<const double> x);
std::vector<double> decode(const Autoencoder& ae, std::span<const double> z);
std::vector<double> reconstruct(const Autoencoder& ae, std::span<const double> x);

/// Mean squared reconstruction error ||x - x'||^2 / len.
double reconstruction_loss(std::span<const double> x, std::span<const double> x_prime);

/// Mean reconstruction_loss over the rows of `batch`.
double batch_loss(const Autoencoder& ae, const Matrix& batch);

/// Gradient of batch_loss with respect to every parameter block.
struct AutoencoderGradient {
  Matrix encoder_weights;
  std::vector<double> encoder_bias;
  Matrix decoder_weights;
  std::vector<double> decoder_bias;
};

AutoencoderGradient loss_gradient(const Autoencoder& ae, const Matrix& batch);
/// Gradient over a subset of rows of `data`.
AutoencoderGradient loss_gradient(const Autoencoder& ae, const Matrix& data, std::span<const std::size_t> rows);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  /// 0 selects min(32, rows).
  std::size_t batch_size = 0;
  double weight_init_scale = 0.1;
  std::uint64_t seed = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(std::size_t epoch);
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

struct TrainedAutoencoder {
  Autoencoder model;
  /// Full-data mean reconstruction loss after each epoch.
  std::vector<double> loss_log;
};

/// Uniform [-scale, scale] draw for every parameter, in the order encoder
/// weights, encoder bias, decoder weights, decoder bias.
Autoencoder initialize_autoencoder(std::size_t in_dim, std::size_t hidden_dim, double scale, std::uint64_t seed);

/// Shuffled mini-batch gradient descent on the reconstruction loss.
TrainedAutoencoder train_autoencoder(const Matrix& data, std::size_t hidden_dim, const TrainConfig& cfg);

/// Layer sizes N-n-N-n-N; the middle layer (width N) is the representation.
struct Architecture {
  std::size_t input_dim = 1;
  std::size_t hidden_width = 1;

  Architecture() = default;
  Architecture(std::size_t input_dim, std::size_t hidden_width);
  bool operator==(const Architecture&) const = default;
};

struct StackedAutoencoder {
  Architecture architecture;
  /// stages[0]: N -> n, stages[1]: n -> N.
  std::vector<Autoencoder> stages;
  std::vector<std::vector<double>> training_log;

  std::size_t output_dim() const { return stages.back().hidden_dim(); }
};

/// Seed used for stage `stage` (0 or 1) given the run seed.
std::uint64_t stage_seed(std::uint64_t seed, std::size_t stage);

/// Greedy layer-wise training: stage 1 on the data, then stage 2 on the
/// stage-1 encodings. No joint fine-tuning.
StackedAutoencoder train_stacked(const Matrix& data, const Architecture& arch, const TrainConfig& cfg);

/// Retrains only the second stage (with cfg's derived stage seed), keeping stage 1.
StackedAutoencoder retrain_second_stage(const StackedAutoencoder& sae, const Matrix& data, const TrainConfig& cfg);

/// Encodes every row through both stage encoders. Rows are processed in
/// parallel with up to `threads` OpenMP threads; the result does not depend on
/// the thread count.
Matrix represent(const StackedAutoencoder& sae, const Matrix& data, int threads = 1);

/// Plain text model format: a version line, the architecture, then each
/// stage's parameter blocks in row-major order. Values round-trip exactly.
void save_model(const StackedAutoencoder& sae, std::ostream& out);
StackedAutoencoder load_model(std::istream& in);

}  // namespace safs
