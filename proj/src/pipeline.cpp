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

#include "pipeline.hpp"

#include <fmt/format.h>

#include "error.hpp"
#include "simworld.hpp"

namespace radarpr {
namespace fs = std::filesystem;

namespace {

void prepare(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

}  // namespace

std::size_t run_simgen(const Config& cfg, const fs::path& out_dir) {
  const SimConfig sim = cfg.sim();
  const PathSpec path = cfg.sim_path();
  const long long n = cfg.get_int("sim.n_scatterers");
  if (n < 0) fail(ErrorCode::kConfig, "sim.n_scatterers must be >= 0");
  const World world = generate_world(static_cast<std::uint64_t>(cfg.get_int("sim.world_seed")),
                                     static_cast<std::size_t>(n), cfg.get_double("sim.extent"));
  prepare(out_dir);
  const RadarSequence seq =
      generate_traversal(world, path, cfg.get_double("sim.speed"), sim, cfg.get_int("sim.start_time"), out_dir);
  cfg.save(out_dir / "effective_config.txt");
  return seq.scans.size();
}

TrainResult run_train(const Config& cfg, const fs::path& out_dir, const std::optional<fs::path>& resume_from,
                      const std::function<void(const StepRecord&)>& on_step) {
  const auto pool = load_pool(cfg);
  TrainOptions opts;
  opts.out_dir = out_dir;
  opts.on_step = on_step;
  return resume_from ? resume(*resume_from, cfg, pool, opts) : train(cfg, pool, opts);
}

EmbeddingSet run_embed(const Config& cfg, const fs::path& checkpoint, const fs::path& dataset, const fs::path& out_dir) {
  const StoredModel stored = load_model(checkpoint);
  const RadarSequence seq = load_sequence(dataset);
  std::optional<QuerySpin> spin;
  if (cfg.get_bool("embed.spin_queries")) spin = QuerySpin{static_cast<std::uint64_t>(cfg.get_int("embed.spin_seed"))};
  EmbeddingSet set = build_embedding_set(stored.model, seq, stored.config.grid(), spin);
  prepare(out_dir);
  save_embedding_set(set, out_dir);
  cfg.save(out_dir / "effective_config.txt");
  return set;
}

EvalReport run_eval(const Config& cfg, const fs::path& queries, const fs::path& database, const fs::path& out_dir) {
  const EvalConfig ec = cfg.eval();
  const EmbeddingSet q = load_embedding_set(queries);
  const EmbeddingSet d = load_embedding_set(database);
  prepare(out_dir);
  EvalReport r = evaluate(q, d, ec, out_dir);
  cfg.save(out_dir / "effective_config.txt");
  return r;
}

std::vector<fs::path> run_plot(const fs::path& report, const fs::path& out_dir) {
  return render_matrices(report, out_dir);
}

}  // namespace radarpr
