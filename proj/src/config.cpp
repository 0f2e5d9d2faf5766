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

#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "error.hpp"

namespace radarpr {

const std::vector<Config::KeyInfo>& Config::keys() {
  static const std::vector<KeyInfo> k = {
      {"variant.name", "vTR2", "batch strategy: vR, vT, vTR or vTR2"},
      {"variant.positive_offset", "2.0", "seconds between an instance and its temporal positive"},
      {"variant.negative_offset", "6.0", "seconds between an instance and its paired negative (vTR2)"},
      {"variant.negative_aug_offset", "4.0", "seconds to the frame spun as the negative's augmentation (vTR2)"},
      {"variant.time_tolerance", "0.3", "seconds a frame may deviate from a requested offset"},
      {"variant.pairs_per_batch", "12", "instance/augmentation pairs per optimisation step"},
      {"grid.side_pixels", "256", "Cartesian frame side length in pixels"},
      {"grid.metres_per_pixel", "0.5", "Cartesian pixel size in metres"},
      {"embedder.backbone", "small_cnn", "small_cnn or vgg19"},
      {"embedder.embedding_dim", "128", "embedding dimension"},
      {"embedder.pretrained", "false", "initialise the backbone from embedder.pretrained_weights"},
      {"embedder.pretrained_weights", "", "weight archive for the backbone"},
      {"loss.temperature", "0.1", "softmax temperature"},
      {"train.learning_rate", "3e-4", "Adam learning rate"},
      {"train.epochs", "10", "training epochs"},
      {"train.seed", "0", "seed for initialisation and batch sampling"},
      {"train.steps_per_epoch", "0", "0 = total frames / pairs_per_batch"},
      {"train.checkpoint_every", "0", "checkpoint cadence in steps (0 = only at completion)"},
      {"train.data", "", "comma-separated dataset directories"},
      {"embed.spin_queries", "false", "spin every frame by a random azimuth shift before embedding"},
      {"embed.spin_seed", "0", "seed for embed.spin_queries"},
      {"eval.boundary", "25", "metres within which a database entry is a true match"},
      {"eval.n_candidates", "1,2,3", "N values for Recall@N"},
      {"eval.precision_targets", "95,98,99", "precision percentages for Recall@P"},
      {"eval.match_precision", "80", "precision percentage of the thresholded match matrix"},
      {"eval.match_n", "1", "candidates drawn in the top-N match matrix"},
      {"sim.world_seed", "0", "seed for scatterer placement"},
      {"sim.n_scatterers", "5000", "scatterer count"},
      {"sim.extent", "500", "world half-width in metres"},
      {"sim.seed", "0", "seed for speckle noise"},
      {"sim.azimuths", "400", "azimuth bins per scan"},
      {"sim.range_bins", "200", "range bins per azimuth"},
      {"sim.range_resolution", "0.5", "metres per range bin"},
      {"sim.scan_rate", "4", "scans per second"},
      {"sim.speckle_noise_sigma", "0.02", "speckle standard deviation"},
      {"sim.beam_width", "0", "azimuth beam width in radians (0 = one azimuth bin)"},
      {"sim.speed", "5", "vehicle speed in m/s"},
      {"sim.waypoints", "-375 -250; 375 -250; 375 250; -375 250", "path as 'x y; x y; ...' in metres"},
      {"sim.closed", "true", "return to the first waypoint"},
      {"sim.reversed", "false", "drive the path backwards"},
      {"sim.lateral_offset", "0", "metres to the right of the path"},
      {"sim.start_time", "1500000000000000", "timestamp of the first scan (microseconds)"},
  };
  return k;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_known(const std::string& key) {
  const auto& k = Config::keys();
  return std::any_of(k.begin(), k.end(), [&](const Config::KeyInfo& i) { return key == i.key; });
}

}  // namespace

Config::Config() {
  for (const auto& k : keys()) values_[k.key] = k.default_value;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::kConfig, fmt::format("{}:{}: expected 'key = value'", origin, lineno));
    c.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, fmt::format("cannot open config '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) {
  if (!is_known(key)) fail(ErrorCode::kConfig, fmt::format("unknown config key '{}'", key));
  values_[key] = value;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) fail(ErrorCode::kConfig, fmt::format("override '{}' is not key=value", assignment));
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCode::kConfig, fmt::format("unknown config key '{}'", key));
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::kConfig, fmt::format("{} = '{}' is not a number", key, v));
}

long long Config::get_int(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used == v.size()) return i;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::kConfig, fmt::format("{} = '{}' is not an integer", key, v));
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::kConfig, fmt::format("{} = '{}' is not a boolean", key, v));
}

std::vector<std::string> Config::get_list(const std::string& key, char sep) const {
  std::vector<std::string> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& k : keys()) out += fmt::format("{} = {}\n", k.key, values_.at(k.key));
  return out;
}

void Config::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << to_text();
}

std::vector<std::string> Config::diff(const Config& other, const std::vector<std::string>& ignored) const {
  std::vector<std::string> out;
  for (const auto& k : keys()) {
    if (std::find(ignored.begin(), ignored.end(), k.key) != ignored.end()) continue;
    const auto& a = values_.at(k.key);
    const auto& b = other.values_.at(k.key);
    if (a != b) out.push_back(fmt::format("{}: '{}' -> '{}'", k.key, a, b));
  }
  return out;
}

GridSpec Config::grid() const {
  GridSpec g;
  g.side_pixels = static_cast<int>(get_int("grid.side_pixels"));
  g.metres_per_pixel = get_double("grid.metres_per_pixel");
  g.validate();
  return g;
}

VariantConfig Config::variant() const {
  VariantConfig v;
  v.variant = parse_variant(get("variant.name"));
  v.positive_offset = get_double("variant.positive_offset");
  v.negative_offset = get_double("variant.negative_offset");
  v.negative_aug_offset = get_double("variant.negative_aug_offset");
  v.time_tolerance = get_double("variant.time_tolerance");
  v.pairs_per_batch = static_cast<int>(get_int("variant.pairs_per_batch"));
  v.validate();
  return v;
}

EmbedderConfig Config::embedder() const {
  EmbedderConfig e;
  e.backbone = parse_backbone(get("embedder.backbone"));
  e.embedding_dim = static_cast<int>(get_int("embedder.embedding_dim"));
  e.input_side = grid().side_pixels;
  e.pretrained = get_bool("embedder.pretrained");
  e.pretrained_weights = get("embedder.pretrained_weights");
  e.validate();
  return e;
}

LossConfig Config::loss() const {
  LossConfig l;
  l.temperature = get_double("loss.temperature");
  l.validate();
  return l;
}

EvalConfig Config::eval() const {
  EvalConfig e;
  e.boundary = get_double("eval.boundary");
  e.n_candidates.clear();
  e.precision_targets.clear();
  try {
    for (const auto& s : get_list("eval.n_candidates")) e.n_candidates.push_back(std::stoi(s));
    for (const auto& s : get_list("eval.precision_targets")) e.precision_targets.push_back(std::stod(s));
  } catch (const std::logic_error&) {
    fail(ErrorCode::kConfig, "eval.n_candidates / eval.precision_targets must be comma-separated numbers");
  }
  e.match_precision = get_double("eval.match_precision");
  e.match_n = static_cast<int>(get_int("eval.match_n"));
  e.validate();
  return e;
}

SimConfig Config::sim() const {
  SimConfig s;
  s.azimuths = static_cast<int>(get_int("sim.azimuths"));
  s.range_bins = static_cast<int>(get_int("sim.range_bins"));
  s.range_resolution = get_double("sim.range_resolution");
  s.scan_rate = get_double("sim.scan_rate");
  s.speckle_noise_sigma = get_double("sim.speckle_noise_sigma");
  s.beam_width = get_double("sim.beam_width");
  s.seed = static_cast<std::uint64_t>(get_int("sim.seed"));
  s.validate();
  return s;
}

PathSpec Config::sim_path() const {
  PathSpec p;
  for (const auto& item : get_list("sim.waypoints", ';')) {
    std::istringstream in(item);
    Waypoint w;
    std::string extra;
    if (!(in >> w.x >> w.y) || (in >> extra))
      fail(ErrorCode::kConfig, fmt::format("sim.waypoints: bad waypoint '{}'", item));
    p.waypoints.push_back(w);
  }
  if (p.waypoints.size() < 2) fail(ErrorCode::kConfig, "sim.waypoints needs at least two points");
  p.closed = get_bool("sim.closed");
  p.reversed = get_bool("sim.reversed");
  p.lateral_offset = get_double("sim.lateral_offset");
  return p;
}

}  // namespace radarpr
