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

#include "network.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>
#include <fmt/format.h>

#include "error.hpp"
#include "rng.hpp"

namespace radarpr {

using RowMat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXf>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXf>;

void Tensor::resize(int n_, int c_, int h_, int w_) {
  n = n_;
  c = c_;
  h = h_;
  w = w_;
  data.assign(size(), 0.0f);
}

namespace {

void fill_uniform(FloatBuffer& v, Rng& rng, double bound) {
  for (float& x : v) x = static_cast<float>(rng.uniform(-bound, bound));
}

// col is (channels * 9) x (oh * ow), row-major.
void im2col(const float* img, int channels, int h, int w, int stride, int oh, int ow, float* col) {
  for (int c = 0; c < channels; ++c) {
    const float* plane = img + static_cast<std::size_t>(c) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        float* dst = col + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * oh * ow;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - 1;
          float* row = dst + static_cast<std::size_t>(oy) * ow;
          if (iy < 0 || iy >= h) {
            std::fill_n(row, ow, 0.0f);
            continue;
          }
          const float* src = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx - 1;
            row[ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0f;
          }
        }
      }
    }
  }
}

void col2im_add(const float* col, int channels, int h, int w, int stride, int oh, int ow, float* img) {
  for (int c = 0; c < channels; ++c) {
    float* plane = img + static_cast<std::size_t>(c) * h * w;
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const float* src = col + (static_cast<std::size_t>(c) * 9 + ky * 3 + kx) * oh * ow;
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= h) continue;
          float* row = plane + static_cast<std::size_t>(iy) * w;
          const float* s = src + static_cast<std::size_t>(oy) * ow;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix >= 0 && ix < w) row[ix] += s[ox];
          }
        }
      }
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Conv3x3::Conv3x3(std::string name, int in_channels, int out_channels, int stride, bool relu)
    : in_(in_channels), out_(out_channels), stride_(stride), relu_(relu) {
  weight_ = {name + ".weight", {out_, in_, 3, 3}, FloatBuffer(static_cast<std::size_t>(out_) * in_ * 9)};
  bias_ = {name + ".bias", {out_}, FloatBuffer(out_)};
}

std::string Conv3x3::describe() const {
  return fmt::format("conv3x3({}->{}, stride {}{})", in_, out_, stride_, relu_ ? ", relu" : "");
}

void Conv3x3::initialize(Rng& rng) {
  const double fan_in = in_ * 9.0;
  // He-uniform weights and zero biases: radar frames are mostly dark, and a
  // random bias would swamp the weak input and collapse the embeddings.
  fill_uniform(weight_.value, rng, std::sqrt(6.0 / fan_in));
  std::fill(bias_.value.begin(), bias_.value.end(), 0.0f);
}

void Conv3x3::forward(const Tensor& in, Tensor& out) const {
  if (in.c != in_) fail(ErrorCode::kArgument, fmt::format("{}: expected {} channels, got {}", weight_.name, in_, in.c));
  const int oh = out_size(in.h), ow = out_size(in.w);
  out.resize(in.n, out_, oh, ow);
  const int k = in_ * 9, p = oh * ow;
  FloatBuffer col(static_cast<std::size_t>(k) * p);
  ConstRowMap weight(weight_.value.data(), out_, k);
  ConstVecMap bias(bias_.value.data(), out_);
  for (int i = 0; i < in.n; ++i) {
    im2col(in.image(i), in_, in.h, in.w, stride_, oh, ow, col.data());
    RowMap y(out.image(i), out_, p);
    y.noalias() = weight * ConstRowMap(col.data(), k, p);
    y.colwise() += bias;
    if (relu_) y = y.cwiseMax(0.0f);
  }
}

void Conv3x3::backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                       FloatBuffer* param_grads) const {
  const int oh = out.h, ow = out.w;
  const int k = in_ * 9, p = oh * ow;
  FloatBuffer col(static_cast<std::size_t>(k) * p);
  FloatBuffer dcol(grad_in ? col.size() : 0);
  RowMat dy(out_, p);
  ConstRowMap weight(weight_.value.data(), out_, k);
  RowMap dweight(param_grads[0].data(), out_, k);
  VecMap dbias(param_grads[1].data(), out_);
  if (grad_in) grad_in->resize(in.n, in.c, in.h, in.w);

  for (int i = 0; i < in.n; ++i) {
    dy = ConstRowMap(grad_out.image(i), out_, p);
    if (relu_) dy = (ConstRowMap(out.image(i), out_, p).array() > 0.0f).select(dy, 0.0f);
    im2col(in.image(i), in_, in.h, in.w, stride_, oh, ow, col.data());
    dweight.noalias() += dy * ConstRowMap(col.data(), k, p).transpose();
    dbias += dy.rowwise().sum();
    if (grad_in) {
      RowMap(dcol.data(), k, p).noalias() = weight.transpose() * dy;
      col2im_add(dcol.data(), in_, in.h, in.w, stride_, oh, ow, grad_in->image(i));
    }
  }
}

// ---------------------------------------------------------------------------

void MaxPool2::forward(const Tensor& in, Tensor& out) const {
  const int oh = in.h / 2, ow = in.w / 2;
  out.resize(in.n, in.c, oh, ow);
  for (int i = 0; i < in.n; ++i) {
    for (int c = 0; c < in.c; ++c) {
      const float* src = in.image(i) + c * in.plane();
      float* dst = out.image(i) + c * out.plane();
      for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
          const float* s = src + (2 * y) * in.w + 2 * x;
          dst[y * ow + x] = std::max(std::max(s[0], s[1]), std::max(s[in.w], s[in.w + 1]));
        }
    }
  }
}

void MaxPool2::backward(const Tensor& in, const Tensor& out, const Tensor& grad_out, Tensor* grad_in,
                        FloatBuffer*) const {
  if (!grad_in) return;
  grad_in->resize(in.n, in.c, in.h, in.w);
  for (int i = 0; i < in.n; ++i) {
    for (int c = 0; c < in.c; ++c) {
      const float* src = in.image(i) + c * in.plane();
      const float* o = out.image(i) + c * out.plane();
      const float* g = grad_out.image(i) + c * out.plane();
      float* d = grad_in->image(i) + c * in.plane();
      for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
          const int base = (2 * y) * in.w + 2 * x;
          const int offsets[4] = {0, 1, in.w, in.w + 1};
          for (int off : offsets)
            if (src[base + off] == o[y * out.w + x]) {
              d[base + off] += g[y * out.w + x];
              break;
            }
        }
    }
  }
}

// ---------------------------------------------------------------------------

void GlobalAvgPool::forward(const Tensor& in, Tensor& out) const {
  out.resize(in.n, in.c, 1, 1);
  const auto plane = static_cast<Eigen::Index>(in.plane());
  for (int i = 0; i < in.n; ++i) {
    ConstRowMap x(in.image(i), in.c, plane);
    VecMap(out.image(i), in.c) = x.rowwise().mean();
  }
}

void GlobalAvgPool::backward(const Tensor& in, const Tensor&, const Tensor& grad_out, Tensor* grad_in,
                             FloatBuffer*) const {
  if (!grad_in) return;
  grad_in->resize(in.n, in.c, in.h, in.w);
  const float scale = 1.0f / static_cast<float>(in.plane());
  for (int i = 0; i < in.n; ++i)
    for (int c = 0; c < in.c; ++c) {
      const float g = grad_out.image(i)[c] * scale;
      std::fill_n(grad_in->image(i) + c * in.plane(), in.plane(), g);
    }
}

// ---------------------------------------------------------------------------

Linear::Linear(std::string name, int in_features, int out_features) : in_(in_features), out_(out_features) {
  weight_ = {name + ".weight", {out_, in_}, FloatBuffer(static_cast<std::size_t>(out_) * in_)};
  bias_ = {name + ".bias", {out_}, FloatBuffer(out_)};
}

std::string Linear::describe() const { return fmt::format("linear({}->{})", in_, out_); }

void Linear::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
  fill_uniform(weight_.value, rng, bound);
  fill_uniform(bias_.value, rng, bound);
}

void Linear::forward(const Tensor& in, Tensor& out) const {
  if (static_cast<int>(in.sample()) != in_)
    fail(ErrorCode::kArgument, fmt::format("{}: expected {} features, got {}", weight_.name, in_, in.sample()));
  out.resize(in.n, out_, 1, 1);
  // One matrix-vector product per sample keeps results independent of batch size.
  ConstRowMap weight(weight_.value.data(), out_, in_);
  ConstVecMap bias(bias_.value.data(), out_);
  for (int i = 0; i < in.n; ++i) {
    VecMap y(out.image(i), out_);
    y.noalias() = weight * ConstVecMap(in.image(i), in_);
    y += bias;
  }
}

void Linear::backward(const Tensor& in, const Tensor&, const Tensor& grad_out, Tensor* grad_in,
                      FloatBuffer* param_grads) const {
  ConstRowMap x(in.data.data(), in.n, in_);
  ConstRowMap dy(grad_out.data.data(), in.n, out_);
  RowMap(param_grads[0].data(), out_, in_).noalias() += dy.transpose() * x;
  VecMap(param_grads[1].data(), out_) += dy.colwise().sum().transpose();
  if (grad_in) {
    grad_in->resize(in.n, in.c, in.h, in.w);
    RowMap(grad_in->data.data(), in.n, in_).noalias() = dy * ConstRowMap(weight_.value.data(), out_, in_);
  }
}

}  // namespace radarpr
