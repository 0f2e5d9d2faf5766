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

#include "embedder.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "archive.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace radarpr {

std::string_view backbone_name(Backbone b) { return b == Backbone::kVgg19 ? "vgg19" : "small_cnn"; }

Backbone parse_backbone(std::string_view name) {
  if (name == "vgg19") return Backbone::kVgg19;
  if (name == "small_cnn") return Backbone::kSmallCnn;
  fail(ErrorCode::kConfig, fmt::format("unknown backbone '{}' (expected vgg19 or small_cnn)", name));
}

void EmbedderConfig::validate() const {
  if (embedding_dim < 8) fail(ErrorCode::kConfig, fmt::format("embedding_dim must be >= 8 (got {})", embedding_dim));
  if (input_side < 16 || input_side % 2 != 0)
    fail(ErrorCode::kConfig, fmt::format("input_side must be even and >= 16 (got {})", input_side));
  if (backbone == Backbone::kVgg19 && input_side % 32 != 0)
    fail(ErrorCode::kConfig, "vgg19 needs input_side divisible by 32");
  if (pretrained && pretrained_weights.empty())
    fail(ErrorCode::kConfig, "pretrained=true requires embedder.pretrained_weights");
}

namespace {

constexpr int kPool = -1;
constexpr int kVggLayout[] = {64,  64,  kPool, 128, 128, kPool, 256, 256, 256, 256, kPool,
                              512, 512, 512,   512, kPool, 512, 512, 512, 512, kPool};
constexpr int kSmallChannels[] = {16, 32, 64, 128, 128};

}  // namespace

Embedder Embedder::create(const EmbedderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Embedder e;
  e.config_ = cfg;
  e.seed_ = seed;
  Rng rng(seed);
  int channels = 1;
  int conv_index = 0;
  auto add_conv = [&](int out, int stride) {
    auto conv = std::make_unique<Conv3x3>(fmt::format("conv{}", conv_index++), channels, out, stride, true);
    conv->initialize(rng);
    e.layers_.push_back(std::move(conv));
    channels = out;
  };
  if (cfg.backbone == Backbone::kSmallCnn) {
    for (int out : kSmallChannels) add_conv(out, 2);
  } else {
    for (int v : kVggLayout) {
      if (v == kPool)
        e.layers_.push_back(std::make_unique<MaxPool2>());
      else
        add_conv(v, 1);
    }
  }
  e.layers_.push_back(std::make_unique<GlobalAvgPool>());
  auto head = std::make_unique<Linear>("head", channels, cfg.embedding_dim);
  head->initialize(rng);
  e.layers_.push_back(std::move(head));

  if (cfg.pretrained) e.import_backbone(cfg.pretrained_weights);
  return e;
}

Embedder::Embedder(const Embedder& other) : config_(other.config_), seed_(other.seed_) {
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Embedder& Embedder::operator=(const Embedder& other) {
  if (this != &other) {
    Embedder copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Embedder::~Embedder() = default;

std::vector<Parameter*> Embedder::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_)
    for (Parameter* p : l->parameters()) out.push_back(p);
  return out;
}

std::vector<const Parameter*> Embedder::parameters() const {
  std::vector<const Parameter*> out;
  for (auto& l : layers_)
    for (Parameter* p : l->parameters()) out.push_back(p);
  return out;
}

std::size_t Embedder::parameter_count() const {
  std::size_t n = 0;
  for (const Parameter* p : parameters()) n += p->value.size();
  return n;
}

std::vector<std::string> Embedder::describe() const {
  std::vector<std::string> out;
  for (const auto& l : layers_) out.push_back(l->describe());
  out.push_back("l2_normalize");
  return out;
}

Tensor Embedder::to_tensor(std::span<const CartesianFrame> frames) const {
  const int side = config_.input_side;
  Tensor t(static_cast<int>(frames.size()), 1, side, side);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.side != side || f.pixels.size() != static_cast<std::size_t>(side) * side)
      fail(ErrorCode::kArgument, fmt::format("frame {} is {}x{}, model expects {}x{}", i, f.side, f.side, side, side));
    std::copy(f.pixels.begin(), f.pixels.end(), t.image(static_cast<int>(i)));
  }
  return t;
}

Embedder::Trace Embedder::forward(std::span<const CartesianFrame> frames) const {
  Trace trace;
  trace.activations.reserve(layers_.size() + 1);
  trace.activations.push_back(to_tensor(frames));
  for (const auto& layer : layers_) {
    Tensor out;
    layer->forward(trace.activations.back(), out);
    trace.activations.push_back(std::move(out));
  }
  const Tensor& last = trace.activations.back();
  const int n = last.n, d = static_cast<int>(last.sample());
  trace.pre_norm = Eigen::Map<const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      last.data.data(), n, d);
  trace.output.resize(n, d);
  for (int i = 0; i < n; ++i) trace.output.row(i) = trace.pre_norm.row(i) / (trace.pre_norm.row(i).norm() + kNormGuard);
  return trace;
}

Eigen::MatrixXf Embedder::embed_matrix(std::span<const CartesianFrame> frames) const {
  constexpr std::size_t kChunk = 16;
  Eigen::MatrixXf out(static_cast<Eigen::Index>(frames.size()), config_.embedding_dim);
  for (std::size_t start = 0; start < frames.size(); start += kChunk) {
    const auto chunk = frames.subspan(start, std::min(kChunk, frames.size() - start));
    Tensor cur = to_tensor(chunk);
    for (const auto& layer : layers_) {
      Tensor next;
      layer->forward(cur, next);
      cur = std::move(next);
    }
    for (int i = 0; i < cur.n; ++i) {
      Eigen::Map<const Eigen::RowVectorXf> row(cur.image(i), config_.embedding_dim);
      out.row(static_cast<Eigen::Index>(start) + i) = row / (row.norm() + kNormGuard);
    }
  }
  return out;
}

std::vector<Embedding> Embedder::embed(std::span<const CartesianFrame> frames) const {
  const Eigen::MatrixXf m = embed_matrix(frames);
  std::vector<Embedding> out(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out[i].source_timestamp = frames[i].source_timestamp;
    out[i].vector.resize(static_cast<std::size_t>(m.cols()));
    Eigen::Map<Eigen::RowVectorXf>(out[i].vector.data(), m.cols()) = m.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

Gradients Embedder::zero_gradients() const {
  Gradients g;
  for (const Parameter* p : parameters()) g.emplace_back(p->value.size(), 0.0f);
  return g;
}

void Embedder::backward(const Trace& trace, const Eigen::MatrixXf& grad_output, Gradients& grads) const {
  const Eigen::Index n = trace.output.rows(), d = trace.output.cols();
  if (grad_output.rows() != n || grad_output.cols() != d)
    fail(ErrorCode::kArgument, "backward: gradient shape does not match forward output");

  Tensor grad(static_cast<int>(n), static_cast<int>(d), 1, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = trace.pre_norm.row(i);
    const auto g = grad_output.row(i);
    const float norm = x.norm();
    const float denom = norm + kNormGuard;
    Eigen::RowVectorXf dx = g / denom;
    if (norm > 0.0f) dx -= x * (x.dot(g) / (denom * denom * norm));
    Eigen::Map<Eigen::RowVectorXf>(grad.image(static_cast<int>(i)), d) = dx;
  }

  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& l : layers_) {
    offsets.push_back(offset);
    offset += l->parameters().size();
  }
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const bool need_input_grad = li > 0;
    Tensor grad_in;
    layers_[li]->backward(trace.activations[li], trace.activations[li + 1], grad,
                          need_input_grad ? &grad_in : nullptr, grads.data() + offsets[li]);
    if (need_input_grad) grad = std::move(grad_in);
  }
}

void Embedder::import_backbone(const std::filesystem::path& weights) {
  const Archive archive = Archive::load(weights);
  for (Parameter* p : parameters()) {
    if (p->name.rfind("head.", 0) == 0 || !archive.contains(p->name)) {
      if (p->name.rfind("head.", 0) != 0)
        fail(ErrorCode::kFormat, fmt::format("'{}' lacks backbone tensor '{}'", weights.string(), p->name));
      continue;
    }
    std::vector<int> shape;
    std::vector<float> values = archive.get_tensor(p->name, &shape);
    if (shape == p->shape) {
      p->value.assign(values.begin(), values.end());
      continue;
    }
    // First convolution stored with 3 input channels: average them.
    if (shape.size() == 4 && p->shape.size() == 4 && shape[0] == p->shape[0] && p->shape[1] == 1 &&
        shape[2] == 3 && shape[3] == 3) {
      const int in = shape[1];
      for (int o = 0; o < shape[0]; ++o)
        for (int k = 0; k < 9; ++k) {
          float sum = 0.0f;
          for (int c = 0; c < in; ++c) sum += values[(static_cast<std::size_t>(o) * in + c) * 9 + k];
          p->value[static_cast<std::size_t>(o) * 9 + k] = sum / static_cast<float>(in);
        }
      continue;
    }
    fail(ErrorCode::kFormat, fmt::format("'{}': tensor '{}' has incompatible shape", weights.string(), p->name));
  }
}

}  // namespace radarpr
