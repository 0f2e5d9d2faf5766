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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace radarpr {

using Timestamp = std::int64_t;  // microseconds since epoch

constexpr double kMicrosPerSecond = 1e6;

/// One radar sweep: azimuth-major power grid with values in [0, 1].
/// Azimuth index a sits at bearing 2*pi*a/A, clockwise from vehicle-forward.
struct PolarScan {
  int azimuths = 0;
  int range_bins = 0;
  double range_resolution = 0.0;  // metres per bin
  Timestamp timestamp = 0;
  std::vector<float> power;       // azimuths * range_bins

  float at(int azimuth, int bin) const {
    return power[static_cast<std::size_t>(azimuth) * range_bins + bin];
  }
  float& at(int azimuth, int bin) {
    return power[static_cast<std::size_t>(azimuth) * range_bins + bin];
  }
  double max_range() const { return range_bins * range_resolution; }

  /// Throws kArgument when dimensions or values break the scan invariants.
  void validate() const;
};

/// Planar pose in a fixed world frame; yaw is counter-clockwise from +x.
struct PoseRecord {
  Timestamp timestamp = 0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
};

struct RadarSequence {
  std::string name;
  std::vector<PolarScan> scans;
  std::vector<PoseRecord> poses;
};

struct LoadStats {
  std::size_t scans_found = 0;
  std::size_t scans_dropped = 0;  // outside pose coverage
};

/// Load a dataset directory (`meta.txt`, `timestamps.txt`, `poses.csv`,
/// `scans/<timestamp>.bin`). Scans outside pose coverage are dropped and
/// counted; more than 10% dropped is an error.
RadarSequence load_sequence(const std::filesystem::path& root, LoadStats* stats = nullptr);

/// Write a sequence in the layout read by load_sequence. Power is quantized
/// to 8 bits (round to nearest).
void write_sequence(const RadarSequence& seq, const std::filesystem::path& root);

/// Interpolated pose: linear in x/y, shortest arc in yaw.
PoseRecord pose_at(const RadarSequence& seq, Timestamp t);
PoseRecord pose_at(const std::vector<PoseRecord>& poses, Timestamp t);

/// Wrap an angle to [-pi, pi).
double wrap_angle(double radians);

}  // namespace radarpr
