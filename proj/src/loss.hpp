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

#include <Eigen/Core>

namespace radarpr {

struct LossConfig {
  double temperature = 0.1;

  void validate() const;
};

struct LossResult {
  double value = 0.0;
  Eigen::MatrixXd grad_instances;      // dL/df, B x D
  Eigen::MatrixXd grad_augmentations;  // dL/df_hat, B x D
};

/// Invariant-and-spreading instance loss over B (instance, augmentation)
/// pairs of unit vectors. With P(i|j) = softmax_i(f_i . g_j / tau):
///
///   L = -(1/B) [ sum_i log P(i|i) + sum_i sum_{j != i} log(1 - P(i|j)) ]
///
/// Evaluated in the log domain. Rows must be unit norm to within 1e-3.
LossResult instance_loss(const Eigen::MatrixXd& instances, const Eigen::MatrixXd& augmentations,
                         const LossConfig& cfg);

/// Value only; same contract as instance_loss.
double instance_loss_value(const Eigen::MatrixXd& instances, const Eigen::MatrixXd& augmentations,
                           const LossConfig& cfg);

}  // namespace radarpr
