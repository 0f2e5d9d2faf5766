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

#include "trainer.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "archive.hpp"
#include "error.hpp"
#include "loss.hpp"
#include "sampling.hpp"

namespace radarpr {
namespace fs = std::filesystem;

namespace {

constexpr const char* kCheckpointFormat = "radarpr-checkpoint-1";

bool training_relevant(const std::string& key) {
  for (const char* prefix : {"variant.", "grid.", "embedder.", "loss."})
    if (key.rfind(prefix, 0) == 0) return true;
  return key == "train.learning_rate" || key == "train.seed" || key == "train.steps_per_epoch";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t training_hash(const Config& cfg) {
  std::string text;
  for (const auto& k : Config::keys())
    if (training_relevant(k.key)) text += fmt::format("{}={}\n", k.key, cfg.get(k.key));
  return fnv1a(text);
}

}  // namespace

TrainConfig TrainConfig::from(const Config& cfg) {
  TrainConfig t;
  t.learning_rate = cfg.get_double("train.learning_rate");
  t.epochs = static_cast<int>(cfg.get_int("train.epochs"));
  t.variant = cfg.variant();
  t.embedder = cfg.embedder();
  t.loss = cfg.loss();
  t.grid = cfg.grid();
  t.seed = static_cast<std::uint64_t>(cfg.get_int("train.seed"));
  t.steps_per_epoch = static_cast<int>(cfg.get_int("train.steps_per_epoch"));
  t.checkpoint_every = static_cast<int>(cfg.get_int("train.checkpoint_every"));
  t.validate();
  return t;
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    fail(ErrorCode::kConfig, "train.learning_rate must be finite and non-negative");
  if (epochs < 1) fail(ErrorCode::kConfig, "train.epochs must be >= 1");
  if (steps_per_epoch < 0) fail(ErrorCode::kConfig, "train.steps_per_epoch must be >= 0");
  if (checkpoint_every < 0) fail(ErrorCode::kConfig, "train.checkpoint_every must be >= 0");
  if (embedder.input_side != grid.side_pixels) fail(ErrorCode::kConfig, "embedder input side must equal grid side");
  variant.validate();
  embedder.validate();
  loss.validate();
  grid.validate();
}

void AdamState::update(Embedder& model, const Gradients& grads, double learning_rate) {
  auto params = model.parameters();
  if (m.empty()) {
    for (const Parameter* p : params) {
      m.emplace_back(p->value.size(), 0.0f);
      v.emplace_back(p->value.size(), 0.0f);
    }
  }
  ++t;
  const auto b1 = static_cast<float>(beta1), b2 = static_cast<float>(beta2);
  const auto bc1 = static_cast<float>(1.0 - std::pow(beta1, static_cast<double>(t)));
  const auto bc2 = static_cast<float>(1.0 - std::pow(beta2, static_cast<double>(t)));
  const auto lr = static_cast<float>(learning_rate), eps = static_cast<float>(epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i]->value;
    for (std::size_t j = 0; j < value.size(); ++j) {
      const float g = grads[i][j];
      m[i][j] = b1 * m[i][j] + (1.0f - b1) * g;
      v[i][j] = b2 * v[i][j] + (1.0f - b2) * g * g;
      value[j] -= lr * (m[i][j] / bc1) / (std::sqrt(v[i][j] / bc2) + eps);
    }
  }
}

// ---------------------------------------------------------------------------

Trainer::Trainer(const Config& cfg, const std::vector<RadarSequence>& pool)
    : cfg_(cfg),
      tc_(TrainConfig::from(cfg)),
      pool_(&pool),
      model_(Embedder::create(tc_.embedder, tc_.seed)),
      rng_(derive_seed(tc_.seed, 1)) {
  if (pool.empty()) fail(ErrorCode::kBatch, "training pool is empty");
  for (const auto& seq : pool) frames_ += seq.scans.size();
  if (frames_ == 0) fail(ErrorCode::kBatch, "training pool has no frames");
}

int Trainer::steps_per_epoch() const {
  if (tc_.steps_per_epoch > 0) return tc_.steps_per_epoch;
  return std::max(1, static_cast<int>(frames_ / static_cast<std::size_t>(tc_.variant.pairs_per_batch)));
}

std::uint64_t Trainer::total_steps() const {
  return static_cast<std::uint64_t>(tc_.epochs) * static_cast<std::uint64_t>(steps_per_epoch());
}

StepRecord Trainer::step() {
  const std::uint64_t next = step_ + 1;
  Batch batch;
  try {
    batch = build_batch(*pool_, tc_.variant, tc_.grid, rng_);
  } catch (const Error& e) {
    fail(e.code(), fmt::format("step {}: {}", next, e.what()));
  }
  const auto b = static_cast<Eigen::Index>(batch.pairs());
  std::vector<CartesianFrame> frames;
  frames.reserve(2 * batch.pairs());
  for (auto& f : batch.instances) frames.push_back(std::move(f));
  for (auto& f : batch.augmentations) frames.push_back(std::move(f));

  const Embedder::Trace trace = model_.forward(frames);
  const Eigen::MatrixXd out = trace.output.cast<double>();
  const LossResult loss = instance_loss(out.topRows(b), out.bottomRows(b), tc_.loss);
  if (!std::isfinite(loss.value)) fail(ErrorCode::kNumeric, fmt::format("non-finite loss at step {}", next));

  Eigen::MatrixXf grad_out(2 * b, out.cols());
  grad_out.topRows(b) = loss.grad_instances.cast<float>();
  grad_out.bottomRows(b) = loss.grad_augmentations.cast<float>();
  Gradients grads = model_.zero_gradients();
  model_.backward(trace, grad_out, grads);
  adam_.update(model_, grads, tc_.learning_rate);

  step_ = next;
  return {step_, static_cast<int>((step_ - 1) / static_cast<std::uint64_t>(steps_per_epoch())) + 1, loss.value};
}

void Trainer::save_checkpoint(const fs::path& path) const {
  Archive a;
  a.put("format", kCheckpointFormat);
  a.put("config", cfg_.to_text());
  a.put_u64("config_hash", training_hash(cfg_));
  a.put_u64("step", step_);
  a.put_u64("seed", tc_.seed);
  a.put("rng", rng_.serialize());
  a.put_u64("adam.t", adam_.t);
  const auto params = model_.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = *params[i];
    a.put_tensor("param/" + p.name, p.shape, p.value);
    if (!adam_.m.empty()) {
      a.put_tensor("adam.m/" + p.name, p.shape, adam_.m[i]);
      a.put_tensor("adam.v/" + p.name, p.shape, adam_.v[i]);
    }
  }
  a.save(path);
}

namespace {

Archive open_checkpoint(const fs::path& path) {
  Archive a = Archive::load(path);
  if (!a.contains("format") || a.get("format") != kCheckpointFormat)
    fail(ErrorCode::kIntegrity, fmt::format("'{}' is not a radarpr checkpoint", path.string()));
  return a;
}

void restore_parameters(const Archive& a, Embedder& model, const fs::path& path) {
  for (Parameter* p : model.parameters()) {
    std::vector<int> shape;
    auto values = a.get_tensor("param/" + p->name, &shape);
    if (shape != p->shape)
      fail(ErrorCode::kIntegrity, fmt::format("'{}': tensor '{}' has the wrong shape", path.string(), p->name));
    p->value.assign(values.begin(), values.end());
  }
}

}  // namespace

Trainer Trainer::from_checkpoint(const fs::path& checkpoint, const Config& cfg, const std::vector<RadarSequence>& pool) {
  const Archive a = open_checkpoint(checkpoint);
  const Config stored = Config::parse(a.get("config"), checkpoint.string());
  if (a.get_u64("config_hash") != training_hash(cfg)) {
    const auto d = training_config_diff(stored, cfg);
    std::string summary;
    for (const auto& line : d) summary += "\n  " + line;
    fail(ErrorCode::kMismatch, fmt::format("checkpoint '{}' was trained with a different configuration:{}",
                                           checkpoint.string(), summary.empty() ? " (hash differs)" : summary));
  }
  Trainer t(cfg, pool);
  restore_parameters(a, t.model_, checkpoint);
  t.step_ = a.get_u64("step");
  t.rng_.deserialize(a.get("rng"));
  t.adam_.t = a.get_u64("adam.t");
  if (t.adam_.t > 0) {
    for (const Parameter* p : t.model_.parameters()) {
      const auto m = a.get_tensor("adam.m/" + p->name);
      const auto v = a.get_tensor("adam.v/" + p->name);
      t.adam_.m.emplace_back(m.begin(), m.end());
      t.adam_.v.emplace_back(v.begin(), v.end());
      if (t.adam_.m.back().size() != p->value.size() || t.adam_.v.back().size() != p->value.size())
        fail(ErrorCode::kIntegrity, fmt::format("'{}': optimiser state for '{}' is malformed", checkpoint.string(), p->name));
    }
  }
  return t;
}

std::vector<std::string> training_config_diff(const Config& stored, const Config& current) {
  std::vector<std::string> ignored;
  for (const auto& k : Config::keys())
    if (!training_relevant(k.key)) ignored.emplace_back(k.key);
  return stored.diff(current, ignored);
}

StoredModel load_model(const fs::path& checkpoint) {
  const Archive a = open_checkpoint(checkpoint);
  Config cfg = Config::parse(a.get("config"), checkpoint.string());
  EmbedderConfig ec = cfg.embedder();
  ec.pretrained = false;  // weights come from the checkpoint
  Embedder model = Embedder::create(ec, a.get_u64("seed"));
  restore_parameters(a, model, checkpoint);
  return {std::move(cfg), a.get_u64("step"), std::move(model)};
}

// ---------------------------------------------------------------------------

std::vector<StepRecord> read_loss_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || line != "step,epoch,loss")
    fail(ErrorCode::kFormat, fmt::format("'{}': expected header 'step,epoch,loss'", path.string()));
  std::vector<StepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    StepRecord r;
    unsigned long long step = 0;
    if (std::sscanf(line.c_str(), "%llu,%d,%lf", &step, &r.epoch, &r.loss) != 3)
      fail(ErrorCode::kFormat, fmt::format("'{}': bad row '{}'", path.string(), line));
    r.step = step;
    out.push_back(r);
  }
  return out;
}

namespace {

std::string format_row(const StepRecord& r) { return fmt::format("{},{},{:.17g}\n", r.step, r.epoch, r.loss); }

TrainResult run(Trainer& trainer, const TrainOptions& opts, bool resuming) {
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) fail(ErrorCode::kIo, fmt::format("cannot create '{}': {}", opts.out_dir.string(), ec.message()));
  trainer.config().save(opts.out_dir / "effective_config.txt");

  const fs::path log_path = opts.out_dir / "loss.csv";
  std::vector<StepRecord> kept;
  if (resuming && fs::exists(log_path))
    for (const auto& r : read_loss_log(log_path))
      if (r.step <= trainer.steps_done()) kept.push_back(r);
  std::ofstream log(log_path, std::ios::trunc);
  if (!log) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", log_path.string()));
  log << "step,epoch,loss\n";
  for (const auto& r : kept) log << format_row(r);
  log.flush();

  TrainResult result;
  const int every = trainer.train_config().checkpoint_every;
  const std::uint64_t last = trainer.total_steps();
  while (trainer.steps_done() < last) {
    const StepRecord r = trainer.step();
    result.log.push_back(r);
    log << format_row(r);
    log.flush();
    if (opts.on_step) opts.on_step(r);
    const bool stop = opts.stop_after_step && r.step >= *opts.stop_after_step;
    if ((every > 0 && r.step % static_cast<std::uint64_t>(every) == 0) || (stop && r.step < last)) {
      result.last_checkpoint = opts.out_dir / fmt::format("checkpoint_{:06d}.rpck", r.step);
      trainer.save_checkpoint(result.last_checkpoint);
    }
    if (stop) break;
  }
  if (trainer.steps_done() >= last) {
    result.last_checkpoint = opts.out_dir / "final.rpck";
    trainer.save_checkpoint(result.last_checkpoint);
  }
  result.steps_done = trainer.steps_done();
  return result;
}

}  // namespace

TrainResult train(const Config& cfg, const std::vector<RadarSequence>& pool, const TrainOptions& opts) {
  Trainer trainer(cfg, pool);
  return run(trainer, opts, false);
}

TrainResult resume(const fs::path& checkpoint, const Config& cfg, const std::vector<RadarSequence>& pool,
                   const TrainOptions& opts) {
  Trainer trainer = Trainer::from_checkpoint(checkpoint, cfg, pool);
  return run(trainer, opts, true);
}

std::vector<RadarSequence> load_pool(const Config& cfg) {
  std::vector<RadarSequence> pool;
  for (const auto& dir : cfg.get_list("train.data")) pool.push_back(load_sequence(dir));
  if (pool.empty()) fail(ErrorCode::kConfig, "train.data lists no dataset directories");
  return pool;
}

}  // namespace radarpr
