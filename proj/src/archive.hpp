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
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace radarpr {

/// Named-entry container used for checkpoints and weight files.
///
/// Layout (little-endian):
///   "RPRARCH1"                       8-byte magic
///   u32 entry count
///   per entry: u32 name length, name bytes, u64 payload length, payload
///   u32 CRC-32 of every preceding byte
///
/// Tensor payloads are u32 rank, u32 dims[rank], then f32 values.
class Archive {
 public:
  void put(const std::string& name, std::string payload);
  void put_tensor(const std::string& name, const std::vector<int>& shape, std::span<const float> values);
  void put_u64(const std::string& name, std::uint64_t value);

  bool contains(const std::string& name) const;
  const std::string& get(const std::string& name) const;
  std::vector<float> get_tensor(const std::string& name, std::vector<int>* shape = nullptr) const;
  std::uint64_t get_u64(const std::string& name) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string serialize() const;
  static Archive deserialize(const std::string& bytes);

  void save(const std::filesystem::path& path) const;
  static Archive load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace radarpr
