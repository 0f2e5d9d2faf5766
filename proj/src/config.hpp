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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "embedder.hpp"
#include "evaluation.hpp"
#include "geometry.hpp"
#include "loss.hpp"
#include "sampling.hpp"
#include "simworld.hpp"

namespace radarpr {

/// Flat `key = value` configuration with dotted keys. Every key is known up
/// front (see Config::keys()); unknown keys are kConfig errors.
class Config {
 public:
  struct KeyInfo {
    const char* key;
    const char* default_value;
    const char* help;
  };
  static const std::vector<KeyInfo>& keys();

  /// All keys at their defaults.
  Config();

  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text, const std::string& origin = "<string>");

  void set(const std::string& key, const std::string& value);
  /// Apply `key=value`.
  void apply_override(const std::string& assignment);
  const std::string& get(const std::string& key) const;

  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key, char sep = ',') const;

  /// Canonical text in schema order; parse(to_text()) == *this.
  std::string to_text() const;
  void save(const std::filesystem::path& path) const;

  /// "key: a -> b" lines for keys that differ, skipping `ignored`.
  std::vector<std::string> diff(const Config& other, const std::vector<std::string>& ignored = {}) const;

  bool operator==(const Config&) const = default;

  // Typed views; each validates its section.
  GridSpec grid() const;
  VariantConfig variant() const;
  EmbedderConfig embedder() const;
  LossConfig loss() const;
  EvalConfig eval() const;
  SimConfig sim() const;
  PathSpec sim_path() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace radarpr
