#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

#include "sba/bpnet/metrics.hpp"
#include "sba/bpnet/model_io.hpp"
#include "sba/bpnet/network.hpp"
#include "sba/bpnet/sweep.hpp"
#include "sba/bpnet/training.hpp"
#include "sba/csv.hpp"
#include "sba/datagen.hpp"
#include "sba/error.hpp"
#include "sba/random.hpp"

using namespace sba;
using namespace sba::bpnet;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

double scalar_sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

NetworkWeights random_weights(std::size_t m, Rng& rng, double half_width = 1.0) {
  auto w = NetworkWeights::zeros(3, m, 3);
  for (auto* span : {&w.input_hidden, &w.hidden_output}) {
    for (double& x : span->data()) x = rng.uniform(-half_width, half_width);
  }
  for (double& x : w.hidden_bias) x = rng.uniform(-half_width, half_width);
  for (double& x : w.output_bias) x = rng.uniform(-half_width, half_width);
  return w;
}

double batch_loss(const NetworkWeights& w, std::span<const Vec3> xs, std::span<const Vec3> ts,
                  OutputActivation act = OutputActivation::identity) {
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) total += loss(forward_pass(w, xs[i], act).output, ts[i]);
  return total;
}

// Visits every parameter of `w` in a fixed order, exposing a mutable ref.
template <class Fn>
void for_each_param(NetworkWeights& w, Fn&& fn) {
  for (double& x : w.input_hidden.data()) fn(x);
  for (double& x : w.hidden_bias) fn(x);
  for (double& x : w.hidden_output.data()) fn(x);
  for (double& x : w.output_bias) fn(x);
}

datagen::Dataset noiseless_dataset() {
  const ActuatorGeometry g;
  const auto grid = datagen::pressure_grid(datagen::kDefaultLevels, g.p_max);
  auto ds = datagen::simulate_platform(grid, g, {0.0, 5}, 1);
  return datagen::split_dataset(std::move(ds), datagen::kDefaultTrainLevels);
}

}  // namespace

TEST(CandidateHiddenSizes, Examples) {
  const auto a = candidate_hidden_sizes(3, 3);
  ASSERT_EQ(a.size(), 11u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], 3 + i);
  const auto b = candidate_hidden_sizes(1, 1);
  ASSERT_EQ(b.size(), 11u);
  EXPECT_EQ(b.front(), 2u);
  EXPECT_EQ(b.back(), 12u);
  EXPECT_EQ(code_of([] { candidate_hidden_sizes(0, 3); }), ErrorCode::InvalidArgument);
}

TEST(InitWeights, Deterministic) {
  NetworkConfig c;
  EXPECT_EQ(init_weights(c), init_weights(c));
  c.init_half_width = 0.0;
  const auto z = init_weights(c);
  EXPECT_EQ(z, NetworkWeights::zeros(3, 13, 3));
}

TEST(InitWeights, BoundedAndSeedSensitive) {
  NetworkConfig c;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    c.seed = s;
    auto a = init_weights(c);
    c.seed = s + 1000;
    const auto b = init_weights(c);
    ASSERT_NE(a, b);
    for_each_param(a, [](double& x) { ASSERT_LE(std::abs(x), 0.5); });
  }
}

TEST(NetworkConfig, Validation) {
  NetworkConfig c;
  c.hidden = 2;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c = {};
  c.learning_rate = 0.0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c = {};
  c.max_epochs = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
}

TEST(ForwardPass, ZeroWeights) {
  const auto w = NetworkWeights::zeros(3, 7, 3);
  const Vec3 x{0.3, -2.0, 5.0};
  const auto r = forward_pass(w, x);
  for (double h : r.hidden) EXPECT_EQ(h, 0.5);
  for (double o : r.output) EXPECT_EQ(o, 0.0);
  const auto logistic = forward_pass(w, x, OutputActivation::logistic);
  for (double o : logistic.output) EXPECT_EQ(o, 0.5);
}

TEST(ForwardPass, SaturatingBias) {
  auto w = NetworkWeights::zeros(3, 4, 3);
  for (double& b : w.hidden_bias) b = 10.0;
  const Vec3 x{1.0, 2.0, 3.0};
  for (double h : forward_pass(w, x).hidden) {
    EXPECT_NEAR(h, 1.0, 5e-5);
    EXPECT_NEAR(h, 0.9999546, 1e-7);
  }
}

TEST(ForwardPass, SingleHiddenUnitByHand) {
  auto w = NetworkWeights::zeros(3, 1, 3);
  w.input_hidden(0, 0) = 0.5;
  w.input_hidden(1, 0) = -1.0;
  w.input_hidden(2, 0) = 2.0;
  w.hidden_bias[0] = 0.1;
  w.hidden_output(0, 0) = 1.5;
  w.hidden_output(0, 1) = -0.7;
  w.hidden_output(0, 2) = 0.2;
  w.output_bias = {0.3, 0.0, -0.4};
  const Vec3 x{1.0, 0.5, -0.25};
  const double h = scalar_sigmoid(0.5 * 1.0 - 1.0 * 0.5 + 2.0 * -0.25 + 0.1);
  const auto r = forward_pass(w, x);
  EXPECT_NEAR(r.hidden[0], h, 1e-15);
  EXPECT_NEAR(r.output[0], 1.5 * h + 0.3, 1e-15);
  EXPECT_NEAR(r.output[1], -0.7 * h, 1e-15);
  EXPECT_NEAR(r.output[2], 0.2 * h - 0.4, 1e-15);
  const auto lg = forward_pass(w, x, OutputActivation::logistic);
  EXPECT_NEAR(lg.output[0], scalar_sigmoid(1.5 * h + 0.3), 1e-15);
}

TEST(Loss, Examples) {
  const Vec3 t{0.0, 0.0, 0.0};
  EXPECT_EQ(loss(t, t), 0.0);
  EXPECT_EQ(loss(Vec3{1.0, 0.0, 0.0}, t), 0.5);
  EXPECT_EQ(loss(Vec3{1.0, 1.0, 1.0}, t), 1.5);
}

TEST(Gradients, ZeroAtExactFit) {
  Rng rng(3);
  auto w = NetworkWeights::zeros(3, 5, 3);
  w.input_hidden = random_weights(5, rng).input_hidden;
  w.output_bias = {0.2, -0.1, 0.7};
  std::vector<Vec3> xs, ts;
  for (int i = 0; i < 10; ++i) {
    xs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    ts.push_back({0.2, -0.1, 0.7});
  }
  auto g = gradients(w, xs, ts);
  for_each_param(g, [](double& x) { EXPECT_EQ(x, 0.0); });
}

TEST(Gradients, SingleHiddenUnitByHand) {
  auto w = NetworkWeights::zeros(3, 1, 3);
  w.input_hidden(0, 0) = 0.4;
  w.input_hidden(1, 0) = -0.3;
  w.input_hidden(2, 0) = 0.8;
  w.hidden_bias[0] = -0.2;
  w.hidden_output(0, 0) = 0.9;
  w.hidden_output(0, 1) = -1.1;
  w.hidden_output(0, 2) = 0.5;
  w.output_bias = {0.05, 0.1, -0.3};
  const Vec3 x{0.7, -1.2, 0.3};
  const Vec3 t{1.0, -0.5, 0.2};

  const double h = scalar_sigmoid(0.4 * 0.7 + -0.3 * -1.2 + 0.8 * 0.3 - 0.2);
  const Vec3 y{0.9 * h + 0.05, -1.1 * h + 0.1, 0.5 * h - 0.3};
  const Vec3 e{y[0] - t[0], y[1] - t[1], y[2] - t[2]};
  const double back = (e[0] * 0.9 + e[1] * -1.1 + e[2] * 0.5) * h * (1.0 - h);

  const std::vector<Vec3> xs{x}, ts{t};
  const auto g = gradients(w, xs, ts);
  for (int q = 0; q < 3; ++q) {
    EXPECT_NEAR(g.hidden_output(0, q), e[q] * h, 1e-15);
    EXPECT_NEAR(g.output_bias[q], e[q], 1e-15);
    EXPECT_NEAR(g.input_hidden(q, 0), back * x[q], 1e-15);
  }
  EXPECT_NEAR(g.hidden_bias[0], back, 1e-15);
}

TEST(Gradients, MatchCentralDifferences) {
  Rng rng(2024);
  int instances = 0;
  for (std::size_t m : {3u, 8u, 13u}) {
    for (int trial = 0; trial < 8; ++trial) {
      for (auto act : {OutputActivation::identity, OutputActivation::logistic}) {
        auto w = random_weights(m, rng);
        std::vector<Vec3> xs, ts;
        for (int i = 0; i < 12; ++i) {
          xs.push_back({rng.normal(), rng.normal(), rng.normal()});
          ts.push_back({rng.normal(), rng.normal(), rng.normal()});
        }
        auto g = gradients(w, xs, ts, act);
        std::vector<double> analytic;
        for_each_param(g, [&](double& x) { analytic.push_back(x); });
        std::size_t idx = 0;
        const double h = 1e-6;
        for_each_param(w, [&](double& p) {
          const double saved = p;
          p = saved + h;
          const double up = batch_loss(w, xs, ts, act);
          p = saved - h;
          const double down = batch_loss(w, xs, ts, act);
          p = saved;
          const double fd = (up - down) / (2.0 * h);
          const double a = analytic[idx++];
          // relative to the larger magnitude; an absolute floor covers
          // entries that are zero up to rounding
          ASSERT_LE(std::abs(a - fd), 1e-5 * std::max(std::abs(a), std::abs(fd)) + 1e-8)
              << "m=" << m << " entry " << idx - 1 << " analytic " << a << " fd " << fd;
        });
        ++instances;
      }
    }
  }
  EXPECT_GE(instances, 20);
}

TEST(Gradients, SmallStepDoesNotIncreaseLoss) {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 3 + trial % 11;
    auto w = random_weights(m, rng);
    std::vector<Vec3> xs, ts;
    for (int i = 0; i < 16; ++i) {
      xs.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
      ts.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)});
    }
    const double before = batch_loss(w, xs, ts);
    apply_update(w, gradients(w, xs, ts), 1e-4);
    ASSERT_LE(batch_loss(w, xs, ts), before);
  }
}

TEST(Standardizer, RoundTripAndMoments) {
  Rng rng(8);
  std::vector<Vec3> rows;
  for (int i = 0; i < 200; ++i) rows.push_back({rng.uniform(-30, 30), rng.normal(5, 2), 100 + rng.uniform()});
  const auto s = Standardizer::fit(rows);
  Vec3 mean{}, sq{};
  for (const auto& r : rows) {
    const auto z = s.transform(r);
    const auto back = s.inverse(z);
    for (int c = 0; c < 3; ++c) {
      ASSERT_NEAR(back[c], r[c], 1e-12 * std::abs(r[c]) + 1e-14);
      mean[c] += z[c];
      sq[c] += z[c] * z[c];
    }
  }
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(mean[c] / 200.0, 0.0, 1e-10);
    EXPECT_NEAR(std::sqrt(sq[c] / 200.0), 1.0, 1e-10);
  }
  const std::vector<Vec3> flat(5, Vec3{1.0, 2.0, 3.0});
  EXPECT_EQ(code_of([&] { Standardizer::fit(flat); }), ErrorCode::DegenerateFeature);
}

TEST(Train, LinearTargetsDescend) {
  Rng rng(4);
  std::vector<Vec3> xs, ts;
  for (int i = 0; i < 60; ++i) {
    const Vec3 x{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    xs.push_back(x);
    ts.push_back({2 * x[0] - x[1], x[1] + 0.5 * x[2], -x[0] + 3 * x[2]});
  }
  for (auto mode : {UpdateMode::per_sample, UpdateMode::full_batch}) {
    NetworkConfig c;
    c.max_epochs = 50;
    c.target_mse = 1e-12;
    c.update_mode = mode;
    const auto model = train(c, xs, ts);
    EXPECT_EQ(model.history.epochs(), 50u);
    EXPECT_LT(model.history.final_mse(), model.history.initial_mse);
    EXPECT_EQ(model.history.stop_reason, StopReason::max_epochs);
    EXPECT_EQ(model.history.mac_count, mac_count(c, 60) / c.max_epochs * 50);
  }
}

TEST(Train, SyntheticSplitCompletes) {
  const auto data = noiseless_dataset().to_split_data();
  ASSERT_EQ(data.train_inputs.size(), 108u);
  NetworkConfig c;  // 3-13-3, eta 0.01, 500 epochs, threshold 0.01
  const auto start = std::chrono::steady_clock::now();
  const auto model = train(c, data.train_inputs, data.train_targets);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 10.0);
  EXPECT_GE(model.history.epochs(), 1u);
  EXPECT_LE(model.history.epochs(), 500u);
  if (model.history.stop_reason == StopReason::threshold) {
    EXPECT_LE(model.history.final_mse(), c.target_mse);
  } else {
    EXPECT_EQ(model.history.epochs(), 500u);
  }
  EXPECT_EQ(model.history.final_mse(), batch_mse(model.weights, [&] {
              std::vector<Vec3> z;
              for (const auto& x : data.train_inputs) z.push_back(model.input_scaler.transform(x));
              return z;
            }(),
                                                [&] {
                                                  std::vector<Vec3> z;
                                                  for (const auto& t : data.train_targets)
                                                    z.push_back(model.output_scaler.transform(t));
                                                  return z;
                                                }(),
                                                c.output_activation));

  // a training tip is predicted within the residual the final MSE implies
  double worst = 0.0;
  for (std::size_t i = 0; i < data.train_inputs.size(); ++i) {
    const auto p = predict(model, data.train_inputs[i]);
    for (int q = 0; q < 3; ++q) {
      worst = std::max(worst, std::abs(p[q] - data.train_targets[i][q]) / model.output_scaler.stddev[q]);
    }
  }
  EXPECT_LE(worst, std::sqrt(model.history.final_mse() * 3.0 * 108.0));
}

TEST(Train, Deterministic) {
  const auto data = noiseless_dataset().to_split_data();
  NetworkConfig c;
  c.max_epochs = 100;
  const auto a = train(c, data.train_inputs, data.train_targets);
  const auto b = train(c, data.train_inputs, data.train_targets);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.history.mse, b.history.mse);
}

TEST(Train, HugeLearningRateDiverges) {
  Rng rng(1);
  std::vector<Vec3> xs, ts;
  for (int i = 0; i < 40; ++i) {
    xs.push_back({rng.normal(), rng.normal(), rng.normal()});
    ts.push_back({rng.normal(), rng.normal(), rng.normal()});
  }
  for (auto mode : {UpdateMode::per_sample, UpdateMode::full_batch}) {
    NetworkConfig c;
    c.learning_rate = 1e3;
    c.update_mode = mode;
    EXPECT_EQ(code_of([&] { train(c, xs, ts); }), ErrorCode::DivergedLoss);
  }
}

TEST(Train, Preconditions) {
  NetworkConfig c;
  const std::vector<Vec3> few(5, Vec3{1, 2, 3});
  EXPECT_EQ(code_of([&] { train(c, few, few); }), ErrorCode::InsufficientData);
  std::vector<Vec3> xs(20), ts(19);
  EXPECT_EQ(code_of([&] { train(c, xs, ts); }), ErrorCode::InvalidArgument);
}

TEST(Predict, ZeroWeightsGiveTargetMean) {
  TrainedModel m;
  m.weights = NetworkWeights::zeros(3, 13, 3);
  m.output_scaler.mean = {10.0, 20.0, 30.0};
  m.output_scaler.stddev = {2.0, 3.0, 4.0};
  const auto p = predict_pressures(m, {1.0, -2.0, 120.0});
  EXPECT_EQ(p, (ChamberPressures{{10.0, 20.0, 30.0}}));
  EXPECT_EQ(predict_pressures(m, {3.0, 4.0, 118.0}), predict_pressures(m, {3.0, 4.0, 118.0}));
}

TEST(Mape, Examples) {
  const std::vector<Vec3> t{{100.0, 100.0, 100.0}};
  EXPECT_EQ(mape(t, t).percent, 0.0);
  const std::vector<Vec3> f{{110.0, 90.0, 100.0}};
  const auto r = mape(f, t);
  EXPECT_NEAR(r.percent, 20.0 / 3.0, 1e-12);
  EXPECT_EQ(r.eligible, 3u);
  const std::vector<Vec3> zero{{0.0, 0.0, 0.0}};
  EXPECT_EQ(code_of([&] { mape(f, zero); }), ErrorCode::NoEligibleComponents);
  const std::vector<Vec3> mixed{{0.0, 100.0, 0.5}};
  const auto only = mape(f, mixed);
  EXPECT_EQ(only.eligible, 1u);
  EXPECT_NEAR(only.percent, 10.0, 1e-12);
}

TEST(RSquared, Examples) {
  const std::vector<Vec3> t{{1.0, 2.0, 3.0}, {2.0, 4.0, 1.0}, {3.0, 9.0, 2.0}};
  EXPECT_EQ(r_squared(t, t), 1.0);
  const std::vector<Vec3> mean(3, Vec3{2.0, 5.0, 2.0});
  EXPECT_NEAR(r_squared(mean, t), 0.0, 1e-15);
  // hand arithmetic: SS_tot = (1+0+1) + (9+1+16) + (1+1+0) = 30,
  // SS_res = 0.25 * 9 = 2.25
  std::vector<Vec3> off = t;
  for (auto& row : off) {
    for (double& v : row) v += 0.5;
  }
  EXPECT_NEAR(r_squared(off, t), 1.0 - 2.25 / 30.0, 1e-15);
  const std::vector<Vec3> flat(3, Vec3{1.0, 1.0, 1.0});
  EXPECT_EQ(code_of([&] { r_squared(t, flat); }), ErrorCode::ConstantTargets);
}

TEST(MacCount, Examples) {
  NetworkConfig c;
  c.max_epochs = 500;
  EXPECT_EQ(mac_count(c, 108), 4'212'000u);
  EXPECT_EQ(mac_count(c, 108), 78u * 108u * 500u);
  EXPECT_NE(mac_count(c, 108), 88u * 108u * 500u);
  EXPECT_EQ(mac_count(c, 0), 0u);
  c.max_epochs = std::size_t{1} << 20;
  EXPECT_EQ(mac_count(c, std::uint64_t{1} << 20), 78ull << 40);
}

TEST(Sweep, SingleCellSelectsItself) {
  const auto data = noiseless_dataset().to_split_data();
  NetworkConfig c;
  c.max_epochs = 30;
  const std::vector<std::uint64_t> seeds{7};
  const std::vector<std::size_t> sizes{6};
  const auto r = hidden_sweep(c, seeds, data, sizes, 1);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0].hidden, 6u);
  EXPECT_EQ(r.rows[0].seed, 7u);
  EXPECT_EQ(r.selected_hidden, 6u);
}

TEST(Sweep, FullGridIsReproducible) {
  const auto data = noiseless_dataset().to_split_data();
  NetworkConfig c;
  c.max_epochs = 40;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const auto a = hidden_sweep(c, seeds, data, {}, 4);
  const auto b = hidden_sweep(c, seeds, data, {}, 1);
  ASSERT_EQ(a.rows.size(), 55u);
  ASSERT_EQ(b.rows.size(), 55u);
  for (std::size_t i = 0; i < 55; ++i) {
    EXPECT_EQ(a.rows[i].hidden, 3 + i / 5);
    EXPECT_EQ(a.rows[i].seed, seeds[i % 5]);
    EXPECT_EQ(a.rows[i].final_mse, b.rows[i].final_mse);
    EXPECT_EQ(a.rows[i].test_r2, b.rows[i].test_r2);
  }
  EXPECT_EQ(a.selected_hidden, b.selected_hidden);

  // independent argmax of the per-size mean R^2, earliest size on ties
  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 3; m <= 13; ++m) {
    double sum = 0.0;
    for (const auto& row : a.rows) {
      if (row.hidden == m) sum += row.test_r2;
    }
    if (sum / 5.0 > best_mean) {
      best_mean = sum / 5.0;
      best = m;
    }
  }
  EXPECT_EQ(a.selected_hidden, best);
}

TEST(ModelIo, RoundTripIsLossless) {
  const auto data = noiseless_dataset().to_split_data();
  NetworkConfig c;
  c.max_epochs = 20;
  c.hidden = 9;
  const auto model = train(c, data.train_inputs, data.train_targets);
  const auto dir = std::filesystem::temp_directory_path();
  save_model(dir / "sba_model_a.json", model);
  const auto back = load_model(dir / "sba_model_a.json");
  EXPECT_EQ(back.weights, model.weights);
  EXPECT_EQ(back.input_scaler, model.input_scaler);
  EXPECT_EQ(back.output_scaler, model.output_scaler);
  EXPECT_EQ(back.history.mse, model.history.mse);
  EXPECT_EQ(back.history.mac_count, model.history.mac_count);
  EXPECT_EQ(back.config.hidden, 9u);
  save_model(dir / "sba_model_b.json", back);
  EXPECT_EQ(csv::read_text(dir / "sba_model_a.json"), csv::read_text(dir / "sba_model_b.json"));
  std::filesystem::remove(dir / "sba_model_a.json");
  std::filesystem::remove(dir / "sba_model_b.json");
}

TEST(ModelIo, RejectsMalformed) {
  EXPECT_EQ(code_of([] { model_from_json(nlohmann::json::parse(R"({"format_version": 99})")); }),
            ErrorCode::Format);
  EXPECT_EQ(code_of([] { model_from_json(nlohmann::json::parse("[1,2]")); }), ErrorCode::Format);
}
