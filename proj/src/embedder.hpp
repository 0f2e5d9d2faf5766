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

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "geometry.hpp"
#include "network.hpp"

namespace radarpr {

enum class Backbone { kVgg19, kSmallCnn };

std::string_view backbone_name(Backbone b);
Backbone parse_backbone(std::string_view name);

struct EmbedderConfig {
  Backbone backbone = Backbone::kSmallCnn;
  int embedding_dim = 128;
  int input_side = 256;
  bool pretrained = false;
  std::filesystem::path pretrained_weights;  // archive of 3-channel backbone weights

  void validate() const;
};

struct Embedding {
  std::vector<float> vector;
  Timestamp source_timestamp = 0;
};

/// One gradient buffer per parameter, in parameters() order.
using Gradients = std::vector<FloatBuffer>;

/// Convolutional backbone + global average pool + linear head, followed by
/// L2 normalization (norm + 1e-12 in the denominator).
///
/// small_cnn: five stride-2 3x3 conv blocks with ReLU, channels
/// 16, 32, 64, 128, 128.
/// vgg19: the sixteen 3x3 conv layers of VGG-19 with its five max pools,
/// taking a single input channel.
class Embedder {
 public:
  /// Reproducible initialization from seed. With cfg.pretrained the backbone
  /// is then overwritten from cfg.pretrained_weights.
  static Embedder create(const EmbedderConfig& cfg, std::uint64_t seed);

  Embedder(const Embedder& other);
  Embedder& operator=(const Embedder& other);
  Embedder(Embedder&&) noexcept = default;
  Embedder& operator=(Embedder&&) noexcept = default;
  ~Embedder();

  const EmbedderConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;
  std::vector<std::string> describe() const;

  /// Inference; rows of the result are unit norm.
  Eigen::MatrixXf embed_matrix(std::span<const CartesianFrame> frames) const;
  std::vector<Embedding> embed(std::span<const CartesianFrame> frames) const;

  struct Trace {
    std::vector<Tensor> activations;  // input followed by each layer output
    Eigen::MatrixXf pre_norm;         // N x D
    Eigen::MatrixXf output;           // N x D, unit rows
  };

  Trace forward(std::span<const CartesianFrame> frames) const;
  Gradients zero_gradients() const;
  /// Accumulates dL/dparams given dL/doutput (N x D).
  void backward(const Trace& trace, const Eigen::MatrixXf& grad_output, Gradients& grads) const;

  /// Replace backbone weights from an archive whose first convolution may
  /// have three input channels (averaged down to one).
  void import_backbone(const std::filesystem::path& weights);

 private:
  Embedder() = default;
  Tensor to_tensor(std::span<const CartesianFrame> frames) const;

  EmbedderConfig config_;
  std::uint64_t seed_ = 0;
  std::vector<std::unique_ptr<Layer>> layers_;
};

constexpr float kNormGuard = 1e-12f;

}  // namespace radarpr
