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

// radarpr command-line interface. Links only the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "radarpr.h"

namespace {

constexpr int kUsageExit = 64;

const char* kExitCodes =
    "Exit codes:\n"
    "   0  success\n"
    "   1  invalid argument\n"
    "   2  configuration error (unknown key, malformed value)\n"
    "   3  I/O error (missing file or directory)\n"
    "   4  malformed input file\n"
    "   5  timestamp outside pose coverage\n"
    "   6  no frame within the sampling tolerance\n"
    "   7  batch could not be filled\n"
    "   8  non-finite loss during training\n"
    "   9  corrupted checkpoint or archive\n"
    "  10  checkpoint incompatible with configuration\n"
    "  11  empty dataset\n"
    "  64  command-line usage error\n"
    "  99  internal error\n";

struct ConfigDeleter {
  void operator()(rpr_config* c) const { rpr_config_free(c); }
};
using ConfigPtr = std::unique_ptr<rpr_config, ConfigDeleter>;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

int report(rpr_status s) {
  if (s == RPR_OK) return 0;
  std::fprintf(stderr, "radarpr: %s: %s\n", rpr_status_name(s), rpr_last_error());
  return static_cast<int>(s);
}

rpr_status make_config(const Common& c, ConfigPtr& out) {
  rpr_config* raw = nullptr;
  rpr_status s = c.config_path.empty() ? rpr_config_new(&raw) : rpr_config_load(c.config_path.c_str(), &raw);
  if (s != RPR_OK) return s;
  out.reset(raw);
  for (const auto& o : c.overrides) {
    s = rpr_config_override(out.get(), o.c_str());
    if (s != RPR_OK) return s;
  }
  return RPR_OK;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "Configuration file (key = value lines)");
  cmd->add_option("-s,--set", c.overrides, "Override a configuration key, as key=value (repeatable)");
  cmd->add_option("-o,--out", c.out_dir, "Output directory")->required();
}

void on_step(uint64_t step, int epoch, double loss, void*) {
  if (step % 50 == 0) std::fprintf(stderr, "step %llu epoch %d loss %.6f\n", static_cast<unsigned long long>(step), epoch, loss);
}

std::string config_listing() {
  std::string s = "Configuration keys (default):\n";
  for (size_t i = 0; i < rpr_config_key_count(); ++i) {
    s += "  ";
    s += rpr_config_key_name(i);
    s += " = ";
    s += rpr_config_key_default(i);
    s += "\n      ";
    s += rpr_config_key_help(i);
    s += "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar place recognition: simulate, train, embed, evaluate, plot"};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.set_version_flag("--version", rpr_version());
  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "Print every configuration key with its default and exit");

  Common sim_args;
  auto* simgen = app.add_subcommand("simgen", "Generate a synthetic world and traversal dataset");
  add_common(simgen, sim_args);

  Common train_args;
  std::string resume;
  auto* train = app.add_subcommand("train", "Train an embedder; writes checkpoints and loss.csv");
  add_common(train, train_args);
  train->add_option("--data", [&](const CLI::results_t& r) {
    train_args.overrides.push_back("train.data=" + r.front());
    return true;
  }, "Training dataset directories, comma separated (sets train.data)");
  train->add_option("--resume", resume, "Continue from this checkpoint");

  Common embed_args;
  std::string checkpoint, dataset;
  auto* embed = app.add_subcommand("embed", "Embed every scan of a dataset with a checkpoint");
  add_common(embed, embed_args);
  embed->add_option("--checkpoint", checkpoint, "Trained checkpoint")->required();
  embed->add_option("--data", dataset, "Dataset directory")->required();

  Common eval_args;
  std::string queries, database;
  auto* eval = app.add_subcommand("eval", "Evaluate query embeddings against a database");
  add_common(eval, eval_args);
  eval->add_option("--queries", queries, "Query embedding directory")->required();
  eval->add_option("--database", database, "Database embedding directory")->required();

  std::string report_path, plot_out;
  auto* plot = app.add_subcommand("plot", "Render PNG matrices and the PR curve from a report");
  plot->add_option("--report", report_path, "report.json written by eval")->required();
  plot->add_option("-o,--out", plot_out, "Output directory")->required();

  // --list-keys works without a subcommand.
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--list-keys") {
      std::fputs(config_listing().c_str(), stdout);
      return 0;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageExit;
  }

  ConfigPtr cfg;
  if (simgen->parsed()) {
    if (auto s = make_config(sim_args, cfg); s != RPR_OK) return report(s);
    size_t n = 0;
    const rpr_status s = rpr_simgen(cfg.get(), sim_args.out_dir.c_str(), &n);
    if (s == RPR_OK) std::printf("wrote %zu scans to %s\n", n, sim_args.out_dir.c_str());
    return report(s);
  }
  if (train->parsed()) {
    if (auto s = make_config(train_args, cfg); s != RPR_OK) return report(s);
    uint64_t steps = 0;
    const rpr_status s = rpr_train(cfg.get(), train_args.out_dir.c_str(), resume.empty() ? nullptr : resume.c_str(),
                                   on_step, nullptr, &steps);
    if (s == RPR_OK) std::printf("trained %llu steps into %s\n", static_cast<unsigned long long>(steps), train_args.out_dir.c_str());
    return report(s);
  }
  if (embed->parsed()) {
    if (auto s = make_config(embed_args, cfg); s != RPR_OK) return report(s);
    size_t n = 0;
    const rpr_status s =
        rpr_embed(cfg.get(), checkpoint.c_str(), dataset.c_str(), embed_args.out_dir.c_str(), &n);
    if (s == RPR_OK) std::printf("embedded %zu scans into %s\n", n, embed_args.out_dir.c_str());
    return report(s);
  }
  if (eval->parsed()) {
    if (auto s = make_config(eval_args, cfg); s != RPR_OK) return report(s);
    double r1 = 0.0;
    const rpr_status s = rpr_eval(cfg.get(), queries.c_str(), database.c_str(), eval_args.out_dir.c_str(), &r1);
    if (s == RPR_OK) std::printf("Recall@1 %.4f; report in %s\n", r1, eval_args.out_dir.c_str());
    return report(s);
  }
  if (plot->parsed()) return report(rpr_plot(report_path.c_str(), plot_out.c_str()));
  return kUsageExit;
}
