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

#include "radarpr.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "geometry.hpp"
#include "ingest.hpp"
#include "pipeline.hpp"
#include "trainer.hpp"

struct rpr_config {
  radarpr::Config config;
};

struct rpr_sequence {
  radarpr::RadarSequence sequence;
};

struct rpr_model {
  radarpr::StoredModel stored;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
rpr_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return RPR_OK;
  } catch (const radarpr::Error& e) {
    g_last_error = e.what();
    return static_cast<rpr_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return RPR_ERR_INTERNAL;
}

void require(bool condition, const char* what) {
  if (!condition) radarpr::fail(radarpr::ErrorCode::kArgument, what);
}

radarpr::DistMatrix dist_view(const float* dist, size_t q, size_t d) {
  require(dist != nullptr && q > 0 && d > 0, "distance matrix must be non-empty");
  return Eigen::Map<const radarpr::DistMatrix>(dist, static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(d));
}

radarpr::MaskMatrix mask_view(const uint8_t* gt, size_t q, size_t d) {
  require(gt != nullptr, "ground-truth matrix must be non-null");
  return Eigen::Map<const radarpr::MaskMatrix>(gt, static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(d));
}

}  // namespace

extern "C" {

const char* rpr_version(void) { return "1.0.0"; }

const char* rpr_last_error(void) { return g_last_error.c_str(); }

const char* rpr_status_name(rpr_status status) {
  if (status == RPR_OK) return "ok";
  if (status == RPR_ERR_INTERNAL) return "internal error";
  return radarpr::error_code_name(static_cast<radarpr::ErrorCode>(status));
}

rpr_status rpr_config_new(rpr_config** out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    *out = new rpr_config{};
  });
}

rpr_status rpr_config_load(const char* path, rpr_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and out must be non-null");
    *out = new rpr_config{radarpr::Config::load(path)};
  });
}

void rpr_config_free(rpr_config* cfg) { delete cfg; }

rpr_status rpr_config_set(rpr_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg && key && value, "cfg, key and value must be non-null");
    cfg->config.set(key, value);
  });
}

rpr_status rpr_config_override(rpr_config* cfg, const char* assignment) {
  return guarded([&] {
    require(cfg && assignment, "cfg and assignment must be non-null");
    cfg->config.apply_override(assignment);
  });
}

rpr_status rpr_config_get(const rpr_config* cfg, const char* key, char* buf, size_t buf_len, size_t* needed) {
  return guarded([&] {
    require(cfg && key, "cfg and key must be non-null");
    const std::string& v = cfg->config.get(key);
    if (needed) *needed = v.size() + 1;
    if (buf == nullptr) return;
    require(buf_len >= v.size() + 1, "buffer too small");
    std::memcpy(buf, v.c_str(), v.size() + 1);
  });
}

rpr_status rpr_config_save(const rpr_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg && path, "cfg and path must be non-null");
    cfg->config.save(path);
  });
}

size_t rpr_config_key_count(void) { return radarpr::Config::keys().size(); }

const char* rpr_config_key_name(size_t index) {
  const auto& k = radarpr::Config::keys();
  return index < k.size() ? k[index].key : nullptr;
}

const char* rpr_config_key_default(size_t index) {
  const auto& k = radarpr::Config::keys();
  return index < k.size() ? k[index].default_value : nullptr;
}

const char* rpr_config_key_help(size_t index) {
  const auto& k = radarpr::Config::keys();
  return index < k.size() ? k[index].help : nullptr;
}

rpr_status rpr_simgen(const rpr_config* cfg, const char* out_dir, size_t* scans_written) {
  return guarded([&] {
    require(cfg && out_dir, "cfg and out_dir must be non-null");
    const std::size_t n = radarpr::run_simgen(cfg->config, out_dir);
    if (scans_written) *scans_written = n;
  });
}

rpr_status rpr_train(const rpr_config* cfg, const char* out_dir, const char* resume_checkpoint,
                     rpr_step_callback on_step, void* user, uint64_t* steps_done) {
  return guarded([&] {
    require(cfg && out_dir, "cfg and out_dir must be non-null");
    std::optional<std::filesystem::path> resume;
    if (resume_checkpoint) resume = resume_checkpoint;
    std::function<void(const radarpr::StepRecord&)> cb;
    if (on_step) cb = [&](const radarpr::StepRecord& r) { on_step(r.step, r.epoch, r.loss, user); };
    const auto result = radarpr::run_train(cfg->config, out_dir, resume, cb);
    if (steps_done) *steps_done = result.steps_done;
  });
}

rpr_status rpr_embed(const rpr_config* cfg, const char* checkpoint, const char* dataset_dir, const char* out_dir,
                     size_t* embedded) {
  return guarded([&] {
    require(cfg && checkpoint && dataset_dir && out_dir, "arguments must be non-null");
    const auto set = radarpr::run_embed(cfg->config, checkpoint, dataset_dir, out_dir);
    if (embedded) *embedded = set.size();
  });
}

rpr_status rpr_eval(const rpr_config* cfg, const char* query_dir, const char* database_dir, const char* out_dir,
                    double* recall_at_1) {
  return guarded([&] {
    require(cfg && query_dir && database_dir && out_dir, "arguments must be non-null");
    const auto report = radarpr::run_eval(cfg->config, query_dir, database_dir, out_dir);
    if (recall_at_1) {
      const auto it = report.recall_at_n.find(1);
      *recall_at_1 = it != report.recall_at_n.end() ? it->second : -1.0;
    }
  });
}

rpr_status rpr_plot(const char* report_path, const char* out_dir) {
  return guarded([&] {
    require(report_path && out_dir, "arguments must be non-null");
    radarpr::run_plot(report_path, out_dir);
  });
}

rpr_status rpr_sequence_load(const char* dataset_dir, rpr_sequence** out) {
  return guarded([&] {
    require(dataset_dir && out, "arguments must be non-null");
    *out = new rpr_sequence{radarpr::load_sequence(dataset_dir)};
  });
}

void rpr_sequence_free(rpr_sequence* seq) { delete seq; }

size_t rpr_sequence_size(const rpr_sequence* seq) { return seq ? seq->sequence.scans.size() : 0; }

rpr_status rpr_sequence_scan_info(const rpr_sequence* seq, size_t index, int64_t* timestamp, int* azimuths,
                                  int* range_bins, double* range_resolution) {
  return guarded([&] {
    require(seq != nullptr, "seq must be non-null");
    if (index >= seq->sequence.scans.size()) radarpr::fail(radarpr::ErrorCode::kOutOfRange, "scan index out of range");
    const auto& s = seq->sequence.scans[index];
    if (timestamp) *timestamp = s.timestamp;
    if (azimuths) *azimuths = s.azimuths;
    if (range_bins) *range_bins = s.range_bins;
    if (range_resolution) *range_resolution = s.range_resolution;
  });
}

rpr_status rpr_sequence_scan_power(const rpr_sequence* seq, size_t index, float* power, size_t len) {
  return guarded([&] {
    require(seq && power, "arguments must be non-null");
    if (index >= seq->sequence.scans.size()) radarpr::fail(radarpr::ErrorCode::kOutOfRange, "scan index out of range");
    const auto& s = seq->sequence.scans[index];
    require(len >= s.power.size(), "power buffer too small");
    std::memcpy(power, s.power.data(), s.power.size() * sizeof(float));
  });
}

rpr_status rpr_sequence_pose_at(const rpr_sequence* seq, int64_t timestamp, double* x, double* y, double* yaw) {
  return guarded([&] {
    require(seq != nullptr, "seq must be non-null");
    const auto p = radarpr::pose_at(seq->sequence, timestamp);
    if (x) *x = p.x;
    if (y) *y = p.y;
    if (yaw) *yaw = p.yaw;
  });
}

rpr_status rpr_model_load(const char* checkpoint, rpr_model** out) {
  return guarded([&] {
    require(checkpoint && out, "arguments must be non-null");
    *out = new rpr_model{radarpr::load_model(checkpoint)};
  });
}

void rpr_model_free(rpr_model* model) { delete model; }

int rpr_model_embedding_dim(const rpr_model* model) {
  return model ? model->stored.model.config().embedding_dim : 0;
}

rpr_status rpr_model_embed_scan(const rpr_model* model, const rpr_sequence* seq, size_t index, int spin, float* out,
                                size_t out_len) {
  return guarded([&] {
    require(model && seq && out, "arguments must be non-null");
    if (index >= seq->sequence.scans.size()) radarpr::fail(radarpr::ErrorCode::kOutOfRange, "scan index out of range");
    const auto dim = static_cast<size_t>(model->stored.model.config().embedding_dim);
    require(out_len >= dim, "output buffer smaller than the embedding dimension");
    const auto& scan = seq->sequence.scans[index];
    const radarpr::CartesianFrame frame =
        radarpr::polar_to_cartesian(spin == 0 ? scan : radarpr::spin_polar(scan, spin), model->stored.config.grid());
    const Eigen::MatrixXf e = model->stored.model.embed_matrix(std::span(&frame, 1));
    for (size_t i = 0; i < dim; ++i) out[i] = e(0, static_cast<Eigen::Index>(i));
  });
}

rpr_status rpr_recall_at_n(const float* dist, const uint8_t* gt, size_t queries, size_t database, int n, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    *out = radarpr::recall_at_n(dist_view(dist, queries, database), mask_view(gt, queries, database), n);
  });
}

rpr_status rpr_recall_at_precision(const float* dist, const uint8_t* gt, size_t queries, size_t database,
                                   double target_percent, double* out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    const auto curve = radarpr::pr_curve(dist_view(dist, queries, database), mask_view(gt, queries, database));
    *out = radarpr::recall_at_precision(curve, target_percent);
  });
}

rpr_status rpr_f_scores(const float* dist, const uint8_t* gt, size_t queries, size_t database, double out[3]) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    const auto curve = radarpr::pr_curve(dist_view(dist, queries, database), mask_view(gt, queries, database));
    const auto f = radarpr::f_scores(curve);
    out[0] = f.f1;
    out[1] = f.f2;
    out[2] = f.f05;
  });
}

}  // extern "C"
