// Copyright 2026 The incodec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <fstream>

#include "../oracles/finite_diff.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "incodec/training.hpp"

using namespace incodec;
using testing::Rng;

namespace {

std::vector<Plane> small_images() {
  return {read_pgm(testing::fixture("small_camera.pgm")),
          read_pgm(testing::fixture("small_coins.pgm"))};
}

TrainConfig tiny_config() {
  TrainConfig c;
  c.num_blocks = 1;
  c.pre_channels = 8;
  c.branch_channels = 4;
  c.batch_size = 4;
  c.steps = 6;
  c.learning_rate = 1e-3;
  return c;
}

WeightStore scalar_store(float x) {
  WeightStore s;
  s.layers["x"] = LayerParams{{1}, {x}, {}};
  return s;
}

// Independent scalar Adam with bias correction.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  int t = 0;
  double step(double x, double g, double lr) {
    ++t;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1.0 - std::pow(0.9, t));
    const double vh = v / (1.0 - std::pow(0.999, t));
    return x - lr * mh / (std::sqrt(vh) + 1e-8);
  }
};

}  // namespace

TEST_CASE("filter dataset pairs reconstructions with originals on the block grid") {
  const Plane img = read_pgm(testing::fixture("small_camera.pgm"));
  Plane crop64(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) crop64.at(x, y) = img.at(x, y);
  const auto pairs = make_filter_dataset({crop64}, 37);
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[1].target.at(0, 0, 0) == crop64.at(32, 0) / 255.0f);
  CHECK(pairs[2].target.at(0, 31, 31) == crop64.at(31, 63) / 255.0f);
  CHECK(pairs[0].qp == 37);
  CHECK(pairs[0].degraded.shape() == Shape3{1, 32, 32});
  CHECK(degraded_mse(pairs) > 1e-4);

  const auto same = make_filter_dataset({crop64}, 37);
  for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(same[i].degraded == pairs[i].degraded);

  // Partial blocks at the right and bottom edges are not used.
  Plane odd(70, 40);
  CHECK(make_filter_dataset({odd}, 37).size() == 2);
  CHECK_THROWS_AS(make_filter_dataset({Plane(16, 64)}, 37), ContractViolation);
}

TEST_CASE("low QP gives near-lossless training pairs") {
  CHECK(degraded_mse(make_filter_dataset(small_images(), 4)) <= 1e-4);
}

TEST_CASE("MSE loss and its gradient") {
  Rng rng(71);
  Tensor out = testing::random_tensor<float>(rng, 1, 5, 7);
  const Tensor target = testing::random_tensor<float>(rng, 1, 5, 7);
  const LossResult<float> r = mse_loss(out, target);
  double want = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = static_cast<double>(out.data()[i]) - target.data()[i];
    want += d * d;
  }
  CHECK(r.loss == doctest::Approx(want / 35.0).epsilon(1e-12));

  TensorD od = testing::random_tensor<double>(rng, 1, 5, 7);
  const TensorD td = testing::random_tensor<double>(rng, 1, 5, 7);
  const auto rd = mse_loss(od, td);
  for (std::size_t i = 0; i < od.size(); i += 3) {
    const double fd = oracle::central_difference(od.data()[i], 1e-6,
                                                 [&] { return mse_loss(od, td).loss; });
    CHECK(oracle::relative_error(fd, rd.grad.data()[i]) <= 1e-7);
  }
  CHECK_THROWS_AS(mse_loss(out, Tensor(1, 5, 6)), ContractViolation);
}

TEST_CASE("MSE loss of a single element") {
  const LossResult<double> r = mse_loss(TensorD(Shape3{1, 1, 1}, {3.5}), TensorD(Shape3{1, 1, 1}, {1.0}));
  CHECK(r.loss == 6.25);
  CHECK(r.grad.data()[0] == 5.0);
}

TEST_CASE("Adam under a constant gradient steps by the learning rate") {
  for (float g : {0.02f, 3.0f, -40.0f}) {
    WeightStore p = scalar_store(1.0f);
    AdamState state;
    float prev = 1.0f;
    for (int t = 0; t < 20; ++t) {
      adam_step(p, scalar_store(g), state, 0.01);
      const float x = p.layers["x"].weights[0];
      CHECK((prev - x) == doctest::Approx(g > 0 ? 0.01 : -0.01).epsilon(1e-3));
      prev = x;
    }
  }
}

TEST_CASE("Adam on a quadratic decreases |x| monotonically after warmup") {
  WeightStore p = scalar_store(5.0f);
  AdamState state;
  double prev = 5.0;
  for (int t = 0; t < 40; ++t) {
    const float x = p.layers["x"].weights[0];
    adam_step(p, scalar_store(2.0f * x), state, 0.1);
    const double now = std::abs(p.layers["x"].weights[0]);
    if (t >= 3) CHECK(now < prev);
    prev = now;
  }
}

TEST_CASE("Adam matches a scalar reference") {
  // f(x) = x^2 from x = 5.
  WeightStore p = scalar_store(5.0f);
  AdamState state;
  ScalarAdam ref;
  double x = 5.0;
  for (int t = 0; t < 200; ++t) {
    const float xf = p.layers["x"].weights[0];
    adam_step(p, scalar_store(2.0f * xf), state, 0.1);
    x = ref.step(x, 2.0 * xf, 0.1);
    if (t == 0) CHECK(p.layers["x"].weights[0] == doctest::Approx(4.9).epsilon(1e-6));
    CHECK(p.layers["x"].weights[0] == doctest::Approx(x).epsilon(1e-5));
    x = p.layers["x"].weights[0];
  }
  CHECK(std::abs(p.layers["x"].weights[0]) < 0.5);
  CHECK(state.t == 200);
}

TEST_CASE("Adam leaves parameters with zero gradient in place") {
  WeightStore p = scalar_store(3.0f);
  AdamState state;
  for (int t = 0; t < 5; ++t) adam_step(p, scalar_store(0.0f), state, 0.1);
  CHECK(p.layers["x"].weights[0] == 3.0f);
  CHECK_THROWS_AS(adam_step(p, WeightStore{"", {{"x", LayerParams{{2}, {1, 1}, {}}}}}, state, 0.1),
                  ContractViolation);
}

TEST_CASE("Glorot initialization bounds and determinism") {
  const NetworkGraph g = build_inception_filter(1, 8, 4);
  const WeightStore a = init_weights(g, 3);
  CHECK(a == init_weights(g, 3));
  CHECK_FALSE(a == init_weights(g, 4));
  validate_weights(g, a);
  for (const auto& [id, p] : a.layers) {
    const double rf = p.dims.size() > 2 ? static_cast<double>(p.dims[2]) * p.dims[3] : 1.0;
    const double bound = std::sqrt(6.0 / ((p.dims[0] + p.dims[1]) * rf));
    double mx = 0.0;
    for (float w : p.weights) mx = std::max(mx, std::abs(static_cast<double>(w)));
    CAPTURE(id);
    CHECK(mx <= bound);
    CHECK(mx > 0.5 * bound);
    for (float b : p.bias) CHECK(b == 0.0f);
  }
}

TEST_CASE("training on an identity task stays stable") {
  Rng rng(72);
  std::vector<PatchPair> data;
  for (int i = 0; i < 8; ++i) {
    Tensor t = testing::random_tensor<float>(rng, 1, 32, 32, 0.0, 1.0);
    data.push_back({t, t, 37});
  }
  TrainConfig cfg = tiny_config();
  cfg.steps = 20;
  const NetworkGraph g = cfg.filter_graph();
  const double before = evaluate_filter_mse(data, g, init_weights(g, cfg.seed));
  const TrainResult r = train_filter(data, g, cfg);
  REQUIRE(r.loss_curve.size() == 20);
  for (double l : r.loss_curve) CHECK(l <= 1.1 * before);
  CHECK(evaluate_filter_mse(data, g, r.weights) < before);
}

TEST_CASE("training is reproducible for a fixed seed") {
  const auto data = make_filter_dataset({read_pgm(testing::fixture("small_page.pgm"))}, 37);
  TrainConfig cfg = tiny_config();
  const NetworkGraph g = cfg.filter_graph();
  std::vector<double> seen;
  const TrainResult a = train_filter(data, g, cfg, [&](long, double l) { seen.push_back(l); });
  const TrainResult b = train_filter(data, g, cfg);
  CHECK(a.weights == b.weights);
  CHECK(a.loss_curve == b.loss_curve);
  CHECK(seen == a.loss_curve);
  cfg.seed = 2;
  CHECK_FALSE(train_filter(data, g, cfg).weights == a.weights);
}

TEST_CASE("training reports divergence") {
  const auto data = make_filter_dataset({read_pgm(testing::fixture("small_page.pgm"))}, 37);
  TrainConfig cfg = tiny_config();
  cfg.learning_rate = 1e30;
  cfg.steps = 50;
  CHECK_THROWS_AS(train_filter(data, cfg.filter_graph(), cfg), DivergenceError);
}

TEST_CASE("training configuration is validated") {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg = TrainConfig{};
  cfg.steps = 0;
  CHECK_NOTHROW(cfg.validate());
  FcTrainConfig fc;
  fc.hidden.clear();
  CHECK_NOTHROW(fc.validate());
  fc.hidden = {0};
  CHECK_THROWS_AS(fc.validate(), ContractViolation);
  CHECK_THROWS_AS(train_filter({}, cfg.filter_graph(), TrainConfig{}), ContractViolation);
}

TEST_CASE("context samples lie inside the image") {
  Plane p(80, 70);
  for (int y = 0; y < 70; ++y)
    for (int x = 0; x < 80; ++x) p.at(x, y) = static_cast<std::uint8_t>(x + 2 * y);
  const auto s = sample_contexts({p}, 8, 4, 50, 5);
  REQUIRE(s.size() == 50);
  for (const ContextSample& c : s) {
    REQUIRE(c.context.size() == 12 * 12 - 64);
    REQUIRE(c.block.size() == 64);
    // Decode the block origin from the first block sample and check the layout.
    const int v = static_cast<int>(std::lround(c.block.data()[0] * 255.0f));
    const int top_left = static_cast<int>(std::lround(c.context.data()[0] * 255.0f));
    CHECK(v - top_left == 4 + 2 * 4);
  }
  CHECK_THROWS_AS(sample_contexts({Plane(10, 10)}, 8, 4, 5, 1), ContractViolation);
}

TEST_CASE("FC predictor learns a constant image") {
  const Plane flat(64, 64, 200);
  FcTrainConfig cfg;
  cfg.hidden = {16};
  cfg.steps = 300;
  cfg.samples = 64;
  const TrainResult r = train_fc_predictor({flat}, 8, 4, cfg);
  const NetworkGraph g = build_fc_predictor(8, 4, {16});
  const auto samples = sample_contexts({flat}, 8, 4, 16, 9);
  const double before = evaluate_fc_mse(samples, g, init_weights(g, cfg.seed));
  const double after = evaluate_fc_mse(samples, g, r.weights);
  CHECK(after < 1e-3);
  CHECK(after < before);
}

TEST_CASE("trained FC predictor beats the untrained one on held-out positions") {
  FcTrainConfig cfg;
  cfg.hidden = {64};
  cfg.steps = 300;
  cfg.samples = 512;
  const std::vector<Plane> train = {read_pgm(testing::fixture("small_camera.pgm"))};
  const TrainResult r = train_fc_predictor(train, 8, 4, cfg);
  const NetworkGraph g = build_fc_predictor(8, 4, cfg.hidden);
  const auto held = sample_contexts({read_pgm(testing::fixture("small_coins.pgm"))}, 8, 4, 256, 77);
  CHECK(evaluate_fc_mse(held, g, r.weights) < evaluate_fc_mse(held, g, init_weights(g, cfg.seed)));
}

TEST_CASE("zero-step model bank") {
  TrainConfig cfg = tiny_config();
  cfg.steps = 0;
  const ModelBank bank = build_model_bank(small_images(), {22, 27, 32, 37}, cfg);
  CHECK(bank.bands == default_qp_bands());
  CHECK(bank.arch_tag == cfg.filter_graph().arch_tag());
  REQUIRE(bank.weights.size() == 4);
  const NetworkGraph g = cfg.filter_graph();
  for (std::size_t i = 0; i < 4; ++i) CHECK(bank.weights[i] == init_weights(g, cfg.seed + i));
}

TEST_CASE("loss CSV and manifests") {
  const auto dir = testing::scratch_dir("train_io");
  write_loss_csv(dir / "loss.csv", {0.5, 0.25});
  std::ifstream is(dir / "loss.csv");
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  CHECK(text == "step,loss\n0,0.5\n1,0.25\n");

  std::filesystem::create_directories(dir / "sub");
  std::ofstream(dir / "sub" / "list.txt") << "# training set\n\na.pgm\n/abs/b.pgm\n";
  const auto paths = read_manifest(dir / "sub" / "list.txt");
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == dir / "sub" / "a.pgm");
  CHECK(paths[1] == "/abs/b.pgm");
  CHECK_THROWS_AS(read_manifest(dir / "none.txt"), IoError);
}
