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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "embedder.hpp"
#include "ingest.hpp"
#include "rng.hpp"

namespace radarpr {

struct TrainConfig {
  double learning_rate = 3e-4;
  int epochs = 10;
  VariantConfig variant;
  EmbedderConfig embedder;
  LossConfig loss;
  GridSpec grid;
  std::uint64_t seed = 0;
  int steps_per_epoch = 0;   // 0: total frames / pairs_per_batch
  int checkpoint_every = 0;  // 0: only at completion

  static TrainConfig from(const Config& cfg);
  void validate() const;
};

/// Adam with bias correction; no weight decay, no schedule.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t t = 0;
  Gradients m;
  Gradients v;

  void update(Embedder& model, const Gradients& grads, double learning_rate);
};

struct StepRecord {
  std::uint64_t step = 0;  // 1-based
  int epoch = 0;           // 1-based
  double loss = 0.0;

  bool operator==(const StepRecord&) const = default;
};

/// Owns the model, optimiser and sampling rng of one training run.
class Trainer {
 public:
  Trainer(const Config& cfg, const std::vector<RadarSequence>& pool);

  /// Restores model, optimiser, rng and step from a checkpoint. Refuses with
  /// kMismatch when a training-relevant key differs from `cfg`.
  static Trainer from_checkpoint(const std::filesystem::path& checkpoint, const Config& cfg,
                                 const std::vector<RadarSequence>& pool);

  /// One optimisation step; throws kNumeric on a non-finite loss.
  StepRecord step();

  std::uint64_t steps_done() const { return step_; }
  std::uint64_t total_steps() const;
  int steps_per_epoch() const;
  const Embedder& model() const { return model_; }
  const TrainConfig& train_config() const { return tc_; }
  const Config& config() const { return cfg_; }

  void save_checkpoint(const std::filesystem::path& path) const;

 private:
  Config cfg_;
  TrainConfig tc_;
  const std::vector<RadarSequence>* pool_;
  Embedder model_;
  AdamState adam_;
  Rng rng_;
  std::uint64_t step_ = 0;
  std::size_t frames_ = 0;
};

struct TrainOptions {
  std::filesystem::path out_dir;
  /// Stop after this step and checkpoint there (simulated interruption).
  std::optional<std::uint64_t> stop_after_step;
  std::function<void(const StepRecord&)> on_step;
};

struct TrainResult {
  std::vector<StepRecord> log;  // steps run in this call
  std::filesystem::path last_checkpoint;
  std::uint64_t steps_done = 0;
};

/// Writes effective_config.txt, loss.csv (`step,epoch,loss`), periodic
/// checkpoint_<step>.rpck files and final.rpck into out_dir.
TrainResult train(const Config& cfg, const std::vector<RadarSequence>& pool, const TrainOptions& opts);

/// Continue from a checkpoint; loss.csv rows after the checkpoint step are
/// replaced by the continued run.
TrainResult resume(const std::filesystem::path& checkpoint, const Config& cfg, const std::vector<RadarSequence>& pool,
                   const TrainOptions& opts);

/// Model stored in a checkpoint, plus the configuration it was trained with.
struct StoredModel {
  Config config;
  std::uint64_t step = 0;
  Embedder model;
};
StoredModel load_model(const std::filesystem::path& checkpoint);

/// Keys that must match for a checkpoint to be resumed.
std::vector<std::string> training_config_diff(const Config& stored, const Config& current);

std::vector<StepRecord> read_loss_log(const std::filesystem::path& path);

/// Load every dataset directory listed in train.data.
std::vector<RadarSequence> load_pool(const Config& cfg);

}  // namespace radarpr
