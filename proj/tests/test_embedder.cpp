// Copyright 2026 The radarpr Authors
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

#include <doctest.h>

#include <limits>

#include <cmath>

#include "archive.hpp"
#include "embedder.hpp"
#include "test_util.hpp"

using namespace radarpr;
using radarpr::testing::TempDir;

namespace {

EmbedderConfig small(int side = 32, int dim = 16) {
  EmbedderConfig c;
  c.input_side = side;
  c.embedding_dim = dim;
  return c;
}

std::vector<CartesianFrame> random_frames(Rng& rng, int n, int side) {
  std::vector<CartesianFrame> frames(n);
  for (auto& f : frames) {
    f.side = side;
    f.pixels.resize(static_cast<std::size_t>(side) * side);
    for (float& v : f.pixels) v = static_cast<float>(rng.uniform01());
  }
  return frames;
}

}  // namespace

TEST_CASE("embedder: outputs are unit norm, including blank frames") {
  const Embedder model = Embedder::create(small(), 1);
  Rng rng(2);
  auto frames = random_frames(rng, 5, 32);
  frames.push_back(CartesianFrame{32, 0, std::vector<float>(32 * 32, 0.0f)});
  const Eigen::MatrixXf e = model.embed_matrix(frames);
  REQUIRE(e.rows() == 6);
  REQUIRE(e.cols() == 16);
  for (int i = 0; i < e.rows(); ++i) CHECK(std::abs(e.row(i).norm() - 1.0f) <= 1e-5f);
}

TEST_CASE("embedder: default configuration takes 256x256 input") {
  const EmbedderConfig cfg;
  CHECK(cfg.input_side == 256);
  CHECK(cfg.embedding_dim == 128);
  CHECK(cfg.backbone == Backbone::kSmallCnn);
  CHECK_FALSE(cfg.pretrained);
  const Embedder model = Embedder::create(cfg, 3);
  Rng rng(4);
  const auto frames = random_frames(rng, 1, 256);
  const auto out = model.embed(frames);
  REQUIRE(out.size() == 1);
  CHECK(out[0].vector.size() == 128);
}

TEST_CASE("embedder: inference is bitwise repeatable") {
  const Embedder model = Embedder::create(small(), 5);
  Rng rng(6);
  const auto frames = random_frames(rng, 3, 32);
  const Eigen::MatrixXf a = model.embed_matrix(frames);
  const Eigen::MatrixXf b = model.embed_matrix(frames);
  CHECK(a == b);
  // Batch composition does not change a frame's embedding.
  const Eigen::MatrixXf c = model.embed_matrix(std::span(frames).subspan(1, 1));
  CHECK(c.row(0) == a.row(1));
}

TEST_CASE("embedder: initialization is seeded") {
  const Embedder a = Embedder::create(small(), 7);
  const Embedder b = Embedder::create(small(), 7);
  const Embedder c = Embedder::create(small(), 8);
  const auto pa = a.parameters(), pb = b.parameters(), pc = c.parameters();
  REQUIRE(pa.size() == pb.size());
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->value == pb[i]->value);
    differs |= pa[i]->value != pc[i]->value;
  }
  CHECK(differs);
}

TEST_CASE("embedder: small_cnn parameter count") {
  const Embedder model = Embedder::create(EmbedderConfig{}, 0);
  // 3x3 convs 1->16->32->64->128->128 with biases, then a 128->128 head.
  const std::size_t convs = (1 * 16 * 9 + 16) + (16 * 32 * 9 + 32) + (32 * 64 * 9 + 64) + (64 * 128 * 9 + 128) +
                            (128 * 128 * 9 + 128);
  CHECK(model.parameter_count() == convs + 128 * 128 + 128);
  CHECK(model.parameter_count() < 2'000'000);
  CHECK(model.describe().size() == 8);
}

TEST_CASE("embedder: configuration validation") {
  EmbedderConfig c;
  c.embedding_dim = 7;
  CHECK(testing::error_of([&] { c.validate(); }) == ErrorCode::kConfig);
  CHECK(testing::error_of([&] { Embedder::create(c, 0); }) == ErrorCode::kConfig);
  c = EmbedderConfig{};
  c.input_side = 15;
  CHECK(testing::error_of([&] { c.validate(); }) == ErrorCode::kConfig);
  c = EmbedderConfig{};
  c.backbone = Backbone::kVgg19;
  c.input_side = 48;
  CHECK(testing::error_of([&] { c.validate(); }) == ErrorCode::kConfig);
  c = EmbedderConfig{};
  c.pretrained = true;
  CHECK(testing::error_of([&] { c.validate(); }) == ErrorCode::kConfig);
  CHECK(parse_backbone("vgg19") == Backbone::kVgg19);
  CHECK(parse_backbone("small_cnn") == Backbone::kSmallCnn);
  CHECK(testing::error_of([] { parse_backbone("resnet"); }) == ErrorCode::kConfig);
}

TEST_CASE("embedder: frames of the wrong size are rejected") {
  const Embedder model = Embedder::create(small(), 1);
  Rng rng(1);
  const auto frames = random_frames(rng, 1, 64);
  CHECK(testing::error_of([&] { model.embed_matrix(frames); }) == ErrorCode::kArgument);
}

TEST_CASE("embedder: every parameter receives gradient") {
  Rng rng(9);
  const Embedder probe = Embedder::create(small(), 0);
  std::vector<bool> reached(probe.parameters().size(), false);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Embedder model = Embedder::create(small(), seed);
    const auto frames = random_frames(rng, 4, 32);
    const auto trace = model.forward(frames);
    Eigen::MatrixXf g(4, 16);
    for (int i = 0; i < g.size(); ++i) g.data()[i] = static_cast<float>(rng.normal());
    Gradients grads = model.zero_gradients();
    model.backward(trace, g, grads);
    for (std::size_t p = 0; p < grads.size(); ++p)
      for (float v : grads[p]) reached[p] = reached[p] || v != 0.0f;
  }
  for (std::size_t p = 0; p < reached.size(); ++p) {
    CAPTURE(probe.parameters()[p]->name);
    CHECK(reached[p]);
  }
}

TEST_CASE("embedder: backward agrees with finite differences") {
  Embedder model = Embedder::create(small(16, 8), 11);
  Rng rng(12);
  const auto frames = random_frames(rng, 2, 16);
  Eigen::MatrixXf w(2, 8);
  for (int i = 0; i < w.size(); ++i) w.data()[i] = static_cast<float>(rng.normal());
  const auto objective = [&](const Embedder& m) {
    return static_cast<double>((m.forward(frames).output.array() * w.array()).sum());
  };
  const auto trace = model.forward(frames);
  Gradients grads = model.zero_gradients();
  model.backward(trace, w, grads);

  const auto params = model.parameters();
  int checked = 0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (int rep = 0; rep < 3; ++rep) {
      const std::size_t k = rng.uniform_index(params[p]->value.size());
      const float original = params[p]->value[k];
      const double analytic = grads[p][k];
      // A ReLU kink can sit inside any one step; keep the closest of several.
      double best = std::numeric_limits<double>::infinity(), numeric = 0.0;
      for (const float h : {3e-3f, 1e-3f, 3e-4f}) {
        params[p]->value[k] = original + h;
        const double plus = objective(model);
        params[p]->value[k] = original - h;
        const double minus = objective(model);
        params[p]->value[k] = original;
        const double estimate = (plus - minus) / (2.0 * h);
        if (std::abs(estimate - analytic) < best) {
          best = std::abs(estimate - analytic);
          numeric = estimate;
        }
      }
      CAPTURE(params[p]->name);
      CHECK(best <= 5e-3 * std::max(1.0, std::abs(numeric)));
      ++checked;
    }
  }
  CHECK(checked == static_cast<int>(params.size()) * 3);
}

TEST_CASE("embedder: vgg19 layout") {
  EmbedderConfig c;
  c.backbone = Backbone::kVgg19;
  c.input_side = 32;
  c.embedding_dim = 8;
  const Embedder model = Embedder::create(c, 1);
  int convs = 0, pools = 0;
  for (const auto& d : model.describe()) {
    convs += d.rfind("conv", 0) == 0;
    pools += d.rfind("maxpool", 0) == 0;
  }
  CHECK(convs == 16);
  CHECK(pools == 5);
  Rng rng(2);
  const Eigen::MatrixXf e = model.embed_matrix(random_frames(rng, 1, 32));
  CHECK(std::abs(e.row(0).norm() - 1.0f) <= 1e-5f);
}

TEST_CASE("embedder: pretrained backbone import averages a 3-channel first layer") {
  TempDir dir;
  const Embedder donor = Embedder::create(small(), 21);
  Archive weights;
  for (const Parameter* p : donor.parameters()) {
    if (p->name.rfind("head.", 0) == 0) continue;
    if (p->name == "conv0.weight") {
      // Three channels holding c, 2c and 3c average back to 2c.
      std::vector<int> shape = p->shape;
      shape[1] = 3;
      std::vector<float> v(p->value.size() * 3);
      const std::size_t per_out = 9;
      for (int o = 0; o < shape[0]; ++o)
        for (int ch = 0; ch < 3; ++ch)
          for (std::size_t k = 0; k < per_out; ++k)
            v[(o * 3 + ch) * per_out + k] = static_cast<float>(ch + 1) * p->value[o * per_out + k];
      weights.put_tensor(p->name, shape, v);
    } else {
      weights.put_tensor(p->name, p->shape, p->value);
    }
  }
  weights.save(dir / "backbone.rpw");

  EmbedderConfig cfg = small();
  cfg.pretrained = true;
  cfg.pretrained_weights = dir / "backbone.rpw";
  const Embedder model = Embedder::create(cfg, 99);
  const auto mine = model.parameters();
  const auto theirs = donor.parameters();
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i]->name.rfind("head.", 0) == 0) continue;
    CAPTURE(mine[i]->name);
    if (mine[i]->name == "conv0.weight") {
      for (std::size_t k = 0; k < mine[i]->value.size(); ++k)
        CHECK(mine[i]->value[k] == doctest::Approx(2.0f * theirs[i]->value[k]).epsilon(1e-6));
    } else {
      CHECK(mine[i]->value == theirs[i]->value);
    }
  }

  Archive partial;
  partial.put_tensor("conv0.bias", {16}, std::vector<float>(16, 0.0f));
  partial.save(dir / "partial.rpw");
  cfg.pretrained_weights = dir / "partial.rpw";
  CHECK(testing::error_of([&] { Embedder::create(cfg, 1); }) == ErrorCode::kFormat);
}
