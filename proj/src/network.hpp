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

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace radarpr {

class Rng;

/// Float storage aligned for Eigen. Vectorised reductions peel elements up to
/// the first aligned address, so unaligned buffers would make results depend
/// on where the allocator placed them.
using FloatBuffer = std::vector<float, Eigen::aligned_allocator<float>>;

/// Dense NCHW float tensor. Fully-connected activations use h = w = 1.
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  FloatBuffer data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_), data(size()) {}

  std::size_t size() const { return static_cast<std::size_t>(n) * c * h * w; }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  std::size_t sample() const { return static_cast<std::size_t>(c) * h * w; }
  float* image(int i) { return data.data() + i * sample(); }
  const float* image(int i) const { return data.data() + i * sample(); }
  void resize(int n_, int c_, int h_, int w_);
};

struct Parameter {
  std::string name;
  std::vector<int> shape;
  FloatBuffer value;
};

/// A differentiable layer. Layers hold parameters only; activations live in
/// caller-owned tensors, so forward and backward are const and a frozen
/// model can serve concurrent readers.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual std::string describe() const = 0;
  virtual void forward(const Tensor& in, Tensor& out) const = 0;
  /// Accumulates into param_grads (one vector per parameter, same order as
  /// parameters()). grad_in is skipped when null.
  virtual void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                        FloatBuffer* param_grads) const = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;
};

/// 3x3 convolution, padding 1, optional fused ReLU.
class Conv3x3 final : public Layer {
 public:
  Conv3x3(std::string name, int in_channels, int out_channels, int stride, bool relu);

  std::string describe() const override;
  void forward(const Tensor& in, Tensor& out) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                FloatBuffer* param_grads) const override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv3x3>(*this); }

  void initialize(Rng& rng);
  int in_channels() const { return in_; }

 private:
  int out_size(int n) const { return (n + 2 - 3) / stride_ + 1; }

  int in_, out_, stride_;
  bool relu_;
  Parameter weight_;  // out x (in * 9)
  Parameter bias_;    // out
};

class MaxPool2 final : public Layer {
 public:
  std::string describe() const override { return "maxpool2"; }
  void forward(const Tensor& in, Tensor& out) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                FloatBuffer* param_grads) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool2>(*this); }
};

class GlobalAvgPool final : public Layer {
 public:
  std::string describe() const override { return "global_avg_pool"; }
  void forward(const Tensor& in, Tensor& out) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                FloatBuffer* param_grads) const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<GlobalAvgPool>(*this); }
};

class Linear final : public Layer {
 public:
  Linear(std::string name, int in_features, int out_features);

  std::string describe() const override;
  void forward(const Tensor& in, Tensor& out) const override;
  void backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                FloatBuffer* param_grads) const override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Linear>(*this); }

  void initialize(Rng& rng);

 private:
  int in_, out_;
  Parameter weight_;  // out x in
  Parameter bias_;
};

}  // namespace radarpr
