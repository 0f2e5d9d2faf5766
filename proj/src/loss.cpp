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

#include "loss.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "error.hpp"

namespace radarpr {

void LossConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    fail(ErrorCode::kConfig, "loss temperature must be positive");
}

namespace {

void check_inputs(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g) {
  if (f.rows() == 0) fail(ErrorCode::kArgument, "instance_loss needs at least one pair");
  if (f.rows() != g.rows() || f.cols() != g.cols())
    fail(ErrorCode::kArgument, fmt::format("instance_loss shape mismatch: {}x{} vs {}x{}", f.rows(), f.cols(),
                                           g.rows(), g.cols()));
  for (const auto* m : {&f, &g}) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      const double n = m->row(i).norm();
      if (!(std::abs(n - 1.0) <= 1e-3))
        fail(ErrorCode::kArgument, fmt::format("instance_loss row {} has norm {} (expected unit)", i, n));
    }
  }
}

// log sum_{k != skip} exp(column[k]); -inf when nothing remains.
double logsumexp_excluding(const Eigen::Ref<const Eigen::VectorXd>& column, Eigen::Index skip) {
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < column.size(); ++k)
    if (k != skip) m = std::max(m, column[k]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Eigen::Index k = 0; k < column.size(); ++k)
    if (k != skip) s += std::exp(column[k] - m);
  return m + std::log(s);
}

struct Terms {
  double value = 0.0;
  Eigen::MatrixXd dscores;  // dL/dS
};

Terms evaluate(const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, double tau, bool with_grad) {
  const Eigen::Index b = f.rows();
  const Eigen::MatrixXd scores = (f * g.transpose()) / tau;  // S(i, j) = f_i . g_j / tau
  Terms out;
  if (with_grad) out.dscores.setZero(b, b);

  Eigen::VectorXd rest(b);  // log sum_{k != i} exp S(k, j)
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto col = scores.col(j);
    const double lse = logsumexp_excluding(col, -1);
    for (Eigen::Index i = 0; i < b; ++i) rest[i] = logsumexp_excluding(col, i);

    out.value -= col[j] - lse;
    for (Eigen::Index i = 0; i < b; ++i)
      if (i != j) out.value -= rest[i] - lse;

    if (!with_grad) continue;
    // odds(i) = P / (1 - P) for column j
    double odds_sum = 0.0;
    for (Eigen::Index i = 0; i < b; ++i)
      if (i != j) odds_sum += std::exp(col[i] - rest[i]);
    for (Eigen::Index m = 0; m < b; ++m) {
      const double p = std::exp(col[m] - lse);
      double d = p - (m == j ? 1.0 : 0.0) - p * odds_sum;
      if (m != j) d += std::exp(col[m] - rest[m]);
      out.dscores(m, j) = d;
    }
  }
  out.value /= static_cast<double>(b);
  if (with_grad) out.dscores /= static_cast<double>(b);
  return out;
}

}  // namespace

LossResult instance_loss(const Eigen::MatrixXd& instances, const Eigen::MatrixXd& augmentations,
                         const LossConfig& cfg) {
  cfg.validate();
  check_inputs(instances, augmentations);
  const double tau = cfg.temperature;
  Terms t = evaluate(instances, augmentations, tau, true);
  LossResult r;
  r.value = t.value;
  r.grad_instances = t.dscores * augmentations / tau;
  r.grad_augmentations = t.dscores.transpose() * instances / tau;
  return r;
}

double instance_loss_value(const Eigen::MatrixXd& instances, const Eigen::MatrixXd& augmentations,
                           const LossConfig& cfg) {
  cfg.validate();
  check_inputs(instances, augmentations);
  return evaluate(instances, augmentations, cfg.temperature, false).value;
}

}  // namespace radarpr
