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

/*
 * radarpr C API.
 *
 * Every function returns an rpr_status. On failure a one-line diagnostic is
 * available from rpr_last_error() on the calling thread until the next API
 * call on that thread. Handles are opaque; free them with the matching
 * *_free function (passing NULL is allowed).
 */
#ifndef RADARPR_H_
#define RADARPR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RADARPR_API __declspec(dllexport)
#else
#define RADARPR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rpr_status {
  RPR_OK = 0,
  RPR_ERR_ARGUMENT = 1,
  RPR_ERR_CONFIG = 2,
  RPR_ERR_IO = 3,
  RPR_ERR_FORMAT = 4,
  RPR_ERR_OUT_OF_RANGE = 5,
  RPR_ERR_GAP = 6,
  RPR_ERR_BATCH = 7,
  RPR_ERR_NUMERIC = 8,
  RPR_ERR_INTEGRITY = 9,
  RPR_ERR_MISMATCH = 10,
  RPR_ERR_EMPTY = 11,
  RPR_ERR_INTERNAL = 99
} rpr_status;

RADARPR_API const char* rpr_version(void);
RADARPR_API const char* rpr_last_error(void);
RADARPR_API const char* rpr_status_name(rpr_status status);

/* ---- configuration ----------------------------------------------------- */

typedef struct rpr_config rpr_config;

RADARPR_API rpr_status rpr_config_new(rpr_config** out);
RADARPR_API rpr_status rpr_config_load(const char* path, rpr_config** out);
RADARPR_API void rpr_config_free(rpr_config* cfg);
RADARPR_API rpr_status rpr_config_set(rpr_config* cfg, const char* key, const char* value);
/* assignment is "key=value" */
RADARPR_API rpr_status rpr_config_override(rpr_config* cfg, const char* assignment);
/* Copies the value (NUL-terminated) into buf; *needed receives the buffer
 * size required including the terminator. buf may be NULL to query size. */
RADARPR_API rpr_status rpr_config_get(const rpr_config* cfg, const char* key, char* buf, size_t buf_len,
                                      size_t* needed);
RADARPR_API rpr_status rpr_config_save(const rpr_config* cfg, const char* path);

RADARPR_API size_t rpr_config_key_count(void);
RADARPR_API const char* rpr_config_key_name(size_t index);
RADARPR_API const char* rpr_config_key_default(size_t index);
RADARPR_API const char* rpr_config_key_help(size_t index);

/* ---- commands ----------------------------------------------------------- */

typedef void (*rpr_step_callback)(uint64_t step, int epoch, double loss, void* user);

RADARPR_API rpr_status rpr_simgen(const rpr_config* cfg, const char* out_dir, size_t* scans_written);
/* resume_checkpoint may be NULL. */
RADARPR_API rpr_status rpr_train(const rpr_config* cfg, const char* out_dir, const char* resume_checkpoint,
                                 rpr_step_callback on_step, void* user, uint64_t* steps_done);
RADARPR_API rpr_status rpr_embed(const rpr_config* cfg, const char* checkpoint, const char* dataset_dir,
                                 const char* out_dir, size_t* embedded);
/* recall_at_1 may be NULL. */
RADARPR_API rpr_status rpr_eval(const rpr_config* cfg, const char* query_dir, const char* database_dir,
                                const char* out_dir, double* recall_at_1);
RADARPR_API rpr_status rpr_plot(const char* report_path, const char* out_dir);

/* ---- datasets ----------------------------------------------------------- */

typedef struct rpr_sequence rpr_sequence;

RADARPR_API rpr_status rpr_sequence_load(const char* dataset_dir, rpr_sequence** out);
RADARPR_API void rpr_sequence_free(rpr_sequence* seq);
RADARPR_API size_t rpr_sequence_size(const rpr_sequence* seq);
RADARPR_API rpr_status rpr_sequence_scan_info(const rpr_sequence* seq, size_t index, int64_t* timestamp,
                                              int* azimuths, int* range_bins, double* range_resolution);
/* power receives azimuths * range_bins values in [0, 1]. */
RADARPR_API rpr_status rpr_sequence_scan_power(const rpr_sequence* seq, size_t index, float* power, size_t len);
RADARPR_API rpr_status rpr_sequence_pose_at(const rpr_sequence* seq, int64_t timestamp, double* x, double* y,
                                            double* yaw);

/* ---- models ------------------------------------------------------------- */

typedef struct rpr_model rpr_model;

RADARPR_API rpr_status rpr_model_load(const char* checkpoint, rpr_model** out);
RADARPR_API void rpr_model_free(rpr_model* model);
RADARPR_API int rpr_model_embedding_dim(const rpr_model* model);
/* Embeds scan `index` after an azimuth spin of `spin` bins (0 = none). */
RADARPR_API rpr_status rpr_model_embed_scan(const rpr_model* model, const rpr_sequence* seq, size_t index, int spin,
                                            float* out, size_t out_len);

/* ---- metrics over caller-owned row-major arrays ------------------------- */

/* dist: queries x database floats; gt: queries x database 0/1 bytes. */
RADARPR_API rpr_status rpr_recall_at_n(const float* dist, const uint8_t* gt, size_t queries, size_t database, int n,
                                       double* out);
RADARPR_API rpr_status rpr_recall_at_precision(const float* dist, const uint8_t* gt, size_t queries,
                                               size_t database, double target_percent, double* out);
/* out receives F1, F2 and F0.5. */
RADARPR_API rpr_status rpr_f_scores(const float* dist, const uint8_t* gt, size_t queries, size_t database,
                                    double out[3]);

#ifdef __cplusplus
}
#endif

#endif /* RADARPR_H_ */
