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
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "config.hpp"
#include "evaluation.hpp"
#include "trainer.hpp"

namespace radarpr {

// End-to-end commands. Each writes effective_config.txt next to its outputs.

/// Synthetic world + traversal in the ingest layout. Returns scans written.
std::size_t run_simgen(const Config& cfg, const std::filesystem::path& out_dir);

/// Train from scratch, or continue from `resume_from`.
TrainResult run_train(const Config& cfg, const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& resume_from = std::nullopt,
                      const std::function<void(const StepRecord&)>& on_step = {});

/// Embed every scan of a dataset with a trained checkpoint.
EmbeddingSet run_embed(const Config& cfg, const std::filesystem::path& checkpoint,
                       const std::filesystem::path& dataset, const std::filesystem::path& out_dir);

EvalReport run_eval(const Config& cfg, const std::filesystem::path& queries, const std::filesystem::path& database,
                    const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> run_plot(const std::filesystem::path& report, const std::filesystem::path& out_dir);

}  // namespace radarpr
