#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "safs/autoencoder.hpp"
#include "safs/common.hpp"
#include "safs/serial.hpp"

using namespace safs;

TEST_CASE("sigmoid stays inside the open unit interval") {
  CHECK(sigmoid(0.0) == 0.5);
  for (double x : {-1000.0, -40.0, -1.0, 0.3, 5.0, 40.0, 1000.0}) {
    const double s = sigmoid(x);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    CHECK(std::isfinite(s));
  }
  CHECK(sigmoid(2.0) == doctest::Approx(oracle::logistic(2.0)).epsilon(1e-15));
  CHECK(sigmoid(-2.0) == doctest::Approx(oracle::logistic(-2.0)).epsilon(1e-15));
}

TEST_CASE("encode and reconstruct match naive loops") {
  std::mt19937_64 rng(1);
  const auto ae = oracle::random_autoencoder(6, 3, rng);
  const auto x = oracle::random_matrix(1, 6, rng);
  const std::vector<double> xv(x.values().begin(), x.values().end());
  const auto z = encode(ae, xv);
  const auto zo = oracle::layer(ae.encoder.weights, ae.encoder.bias, xv);
  REQUIRE(z.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(zo[i]).epsilon(1e-14));
  const auto xp = reconstruct(ae, xv);
  const auto xpo = oracle::layer(ae.decoder.weights, ae.decoder.bias, zo);
  for (std::size_t i = 0; i < 6; ++i) CHECK(xp[i] == doctest::Approx(xpo[i]).epsilon(1e-14));
  CHECK(batch_loss(ae, x) == doctest::Approx(oracle::loss(ae, x)).epsilon(1e-13));
}

TEST_CASE("reconstruction_loss is the per-element mean square") {
  const std::vector<double> a{0.1, 0.5, 0.9}, b{0.2, 0.5, 0.6};
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  CHECK(reconstruction_loss(a, b) == doctest::Approx(acc / 3.0));
  CHECK(reconstruction_loss(a, a) == 0.0);
  CHECK_THROWS_AS(reconstruction_loss(a, std::vector<double>{1.0}), DataError);
}

TEST_CASE("analytic gradient agrees with central differences") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(2, 6);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t in = dim(rng);
    const std::size_t hid = std::min<std::size_t>(4, dim(rng) - 1);
    const auto ae = oracle::random_autoencoder(in, hid, rng);
    const auto batch = oracle::random_matrix(5, in, rng);
    const auto analytic = oracle::flatten(loss_gradient(ae, batch));
    const auto numeric = oracle::fd_gradient(ae, batch, 1e-5);
    REQUIRE(analytic.size() == numeric.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      worst = std::max(worst, oracle::relative_error(analytic[i], numeric[i]));
    }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("gradient over a row subset equals the gradient of the gathered batch") {
  std::mt19937_64 rng(9);
  const auto ae = oracle::random_autoencoder(4, 2, rng);
  const auto data = oracle::random_matrix(10, 4, rng);
  const std::vector<std::size_t> rows{7, 2, 5};
  const auto a = oracle::flatten(loss_gradient(ae, data, rows));
  const auto b = oracle::flatten(loss_gradient(ae, data.select_rows(rows)));
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("training reduces reconstruction loss and logs every epoch") {
  std::mt19937_64 rng(2);
  const auto data = oracle::random_matrix(60, 5, rng);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.5;
  cfg.seed = 17;
  const auto trained = train_autoencoder(data, 3, cfg);
  REQUIRE(trained.loss_log.size() == 200);
  const auto init = initialize_autoencoder(5, 3, cfg.weight_init_scale, cfg.seed);
  CHECK(trained.loss_log.back() < batch_loss(init, data));
  CHECK(trained.loss_log.back() < trained.loss_log.front());
  CHECK(trained.loss_log.back() == doctest::Approx(batch_loss(trained.model, data)).epsilon(1e-12));

  const auto again = train_autoencoder(data, 3, cfg);
  CHECK(again.model == trained.model);
  CHECK(again.loss_log == trained.loss_log);

  cfg.seed = 18;
  CHECK_FALSE(train_autoencoder(data, 3, cfg).model == trained.model);
}

TEST_CASE("training input validation") {
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(train_autoencoder(Matrix(3, 2, 1.5), 1, cfg), DataError);
  CHECK_THROWS_AS(train_autoencoder(Matrix(3, 2, -0.1), 1, cfg), DataError);
  CHECK_THROWS_AS(train_autoencoder(Matrix(0, 2), 1, cfg), DataError);
  cfg.batch_size = 4;
  CHECK_THROWS_AS(train_autoencoder(Matrix(3, 2, 0.5), 1, cfg), DataError);
  cfg.batch_size = 0;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train_autoencoder(Matrix(3, 2, 0.5), 1, cfg), DataError);
  CHECK_THROWS_AS(Architecture(0, 2), DataError);
  CHECK_THROWS_AS(Architecture(3, 0), DataError);
}

TEST_CASE("initialization draws inside the configured range") {
  const auto ae = initialize_autoencoder(7, 3, 0.1, 42);
  for (double v : ae.encoder.weights.values()) CHECK(std::abs(v) <= 0.1);
  for (double v : ae.decoder.weights.values()) CHECK(std::abs(v) <= 0.1);
  CHECK(ae == initialize_autoencoder(7, 3, 0.1, 42));
}

TEST_CASE("stacked auto-encoder shapes and representation") {
  std::mt19937_64 rng(4);
  const auto data = oracle::random_matrix(40, 8, rng);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.seed = 5;
  const auto sae = train_stacked(data, Architecture(8, 3), cfg);
  REQUIRE(sae.stages.size() == 2);
  CHECK(sae.stages[0].in_dim() == 8);
  CHECK(sae.stages[0].hidden_dim() == 3);
  CHECK(sae.stages[1].in_dim() == 3);
  CHECK(sae.stages[1].hidden_dim() == 8);
  CHECK(sae.output_dim() == 8);
  REQUIRE(sae.training_log.size() == 2);
  CHECK(sae.training_log[0].size() == 30);

  const auto rep = represent(sae, data);
  CHECK(rep.rows() == 40);
  CHECK(rep.cols() == 8);
  for (std::size_t r = 0; r < rep.rows(); ++r) {
    const auto row = data.row(r);
    const std::vector<double> x(row.begin(), row.end());
    const auto h = oracle::layer(sae.stages[0].encoder.weights, sae.stages[0].encoder.bias, x);
    const auto out = oracle::layer(sae.stages[1].encoder.weights, sae.stages[1].encoder.bias, h);
    for (std::size_t c = 0; c < 8; ++c) {
      CHECK(rep(r, c) == doctest::Approx(out[c]).epsilon(1e-13));
      CHECK(rep(r, c) > 0.0);
      CHECK(rep(r, c) < 1.0);
    }
  }
  CHECK(represent(sae, data, 4) == rep);
  CHECK(serial::represent(sae, data) == rep);
  CHECK_THROWS_AS(represent(sae, Matrix(2, 7, 0.5)), DataError);
}

TEST_CASE("stage seeds are distinct and retraining stage two leaves stage one alone") {
  CHECK(stage_seed(1, 0) != stage_seed(1, 1));
  std::mt19937_64 rng(8);
  const auto data = oracle::random_matrix(30, 6, rng);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 3;
  const auto sae = train_stacked(data, Architecture(6, 2), cfg);
  TrainConfig other = cfg;
  other.seed = 99;
  const auto re = retrain_second_stage(sae, data, other);
  CHECK(re.stages[0] == sae.stages[0]);
  CHECK_FALSE(re.stages[1] == sae.stages[1]);
}

TEST_CASE("model files round-trip exactly") {
  std::mt19937_64 rng(6);
  const auto data = oracle::random_matrix(25, 5, rng);
  TrainConfig cfg;
  cfg.epochs = 10;
  const auto sae = train_stacked(data, Architecture(5, 2), cfg);
  std::stringstream buf;
  save_model(sae, buf);
  const std::string text = buf.str();
  CHECK(text.rfind("safs-stacked-autoencoder 1", 0) == 0);
  const auto back = load_model(buf);
  CHECK(back.architecture == sae.architecture);
  CHECK(back.stages == sae.stages);
  std::stringstream again;
  save_model(back, again);
  CHECK(again.str() == text);

  std::istringstream bad("not a model");
  CHECK_THROWS_AS(load_model(bad), DataError);
  std::istringstream truncated(text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(load_model(truncated), DataError);
}

TEST_CASE("sigmoid closed forms") {
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(std::abs(sigmoid(4.2) + sigmoid(-4.2) - 1.0) <= 1e-15);
}

TEST_CASE("encode and decode closed forms") {
  Autoencoder zero(3, 2);
  const std::vector<double> x{0.3, 0.9, 0.1};
  CHECK(encode(zero, x) == std::vector<double>{0.5, 0.5});
  CHECK(decode(zero, std::vector<double>{0.2, 0.7}) == std::vector<double>{0.5, 0.5, 0.5});

  Autoencoder one(1, 1);
  one.encoder.weights(0, 0) = std::log(3.0);
  CHECK(encode(one, std::vector<double>{1.0})[0] == doctest::Approx(0.75).epsilon(1e-15));
  one.decoder.bias[0] = std::log(3.0);
  for (double z : {0.0, 0.4, 1.0}) CHECK(decode(one, std::vector<double>{z})[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS(encode(one, std::vector<double>{1.0, 2.0}), DataError);
}

TEST_CASE("reconstruction loss closed forms") {
  CHECK(reconstruction_loss(std::vector<double>{0.2, 0.4}, std::vector<double>{0.2, 0.4}) == 0.0);
  CHECK(reconstruction_loss(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 0.0}) == 0.5);
}

TEST_CASE("gradient vanishes where the reconstruction is exact") {
  // Zero decoder weights make x' = sigmoid(b'); choose x = sigmoid(b') exactly.
  std::mt19937_64 rng(3);
  auto ae = oracle::random_autoencoder(3, 2, rng);
  for (double& w : ae.decoder.weights.values()) w = 0.0;
  ae.decoder.bias = {-0.4, 0.0, 1.3};
  Matrix batch(2, 3);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) batch(r, c) = sigmoid(ae.decoder.bias[c]);
  }
  const auto g = oracle::flatten(loss_gradient(ae, batch));
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("batch gradient is the mean of per-row gradients") {
  std::mt19937_64 rng(13);
  const auto ae = oracle::random_autoencoder(4, 3, rng);
  const auto batch = oracle::random_matrix(5, 4, rng);
  const auto whole = oracle::flatten(loss_gradient(ae, batch));
  std::vector<double> acc(whole.size(), 0.0);
  for (std::size_t r = 0; r < 5; ++r) {
    const std::vector<std::size_t> one{r};
    const auto g = oracle::flatten(loss_gradient(ae, batch, one));
    for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i] / 5.0;
  }
  for (std::size_t i = 0; i < whole.size(); ++i) CHECK(std::abs(whole[i] - acc[i]) <= 1e-12);
}

TEST_CASE("zero epochs returns the seeded initialization") {
  std::mt19937_64 rng(1);
  const auto data = oracle::random_matrix(10, 4, rng);
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 77;
  const auto trained = train_autoencoder(data, 2, cfg);
  CHECK(trained.model == initialize_autoencoder(4, 2, cfg.weight_init_scale, 77));
  CHECK(trained.loss_log.empty());
}

TEST_CASE("a constant dataset is learned through the biases") {
  const std::vector<double> v{0.2, 0.7, 0.45};
  Matrix data(20, 3);
  for (std::size_t r = 0; r < 20; ++r) std::copy(v.begin(), v.end(), data.row(r).begin());
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.learning_rate = 0.5;
  const auto trained = train_autoencoder(data, 2, cfg);
  CHECK(reconstruction_loss(v, reconstruct(trained.model, v)) < 1e-3);

  cfg.epochs = 200;
  const auto sae = train_stacked(data, Architecture(3, 2), cfg);
  const auto rep = represent(sae, data);
  double dev = 0.0;
  for (std::size_t r = 1; r < 20; ++r) {
    for (std::size_t c = 0; c < 3; ++c) dev = std::max(dev, std::abs(rep(r, c) - rep(0, c)));
  }
  CHECK(dev < 1e-6);
}

TEST_CASE("small learning rates never end above the initial loss") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(seed);
    const auto data = oracle::random_matrix(40, 5, rng);
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.epochs = 50;
    cfg.seed = seed;
    const auto trained = train_autoencoder(data, 3, cfg);
    CHECK(trained.loss_log.back() <= batch_loss(initialize_autoencoder(5, 3, cfg.weight_init_scale, seed), data));
  }
}

TEST_CASE("stacked training is deterministic") {
  std::mt19937_64 rng(10);
  const auto data = oracle::random_matrix(30, 5, rng);
  TrainConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 4;
  std::ostringstream a, b;
  save_model(train_stacked(data, Architecture(5, 3), cfg), a);
  save_model(train_stacked(data, Architecture(5, 3), cfg), b);
  CHECK(a.str() == b.str());
}
