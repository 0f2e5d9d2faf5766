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
#include <vector>

#include "ingest.hpp"

namespace radarpr {

class Rng;

struct Scatterer {
  double x = 0.0;
  double y = 0.0;
  double reflectivity = 1.0;
};

struct World {
  std::vector<Scatterer> scatterers;
  double extent = 0.0;  // half-width of the square world, metres
};

struct SimConfig {
  int azimuths = 400;
  int range_bins = 200;
  double range_resolution = 0.5;
  double scan_rate = 4.0;               // Hz
  double speckle_noise_sigma = 0.02;
  double beam_width = 0.0;              // radians; <= 0 means one azimuth bin
  std::uint64_t seed = 0;

  double effective_beam_width() const;
  void validate() const;
};

/// Scatterers uniform over [-extent, extent]^2, reflectivity uniform on [0.3, 1].
World generate_world(std::uint64_t seed, std::size_t n_scatterers, double extent);

/// Gaussian returns (one range bin, beam_width in azimuth) with amplitude
/// reflectivity / (1 + range / 50 m), plus clipped Gaussian speckle.
PolarScan render_scan(const World& world, const PoseRecord& pose, const SimConfig& cfg, Rng& rng);

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
};

struct PathSpec {
  std::vector<Waypoint> waypoints;
  bool closed = false;          // add a segment from the last waypoint back to the first
  bool reversed = false;        // traverse the waypoints in reverse order
  double lateral_offset = 0.0;  // metres to the right of the direction of travel
};

double path_length(const PathSpec& path);

/// Poses every speed/scan_rate metres along the path (end point excluded),
/// yaw along the path tangent.
std::vector<PoseRecord> sample_poses(const PathSpec& path, double speed, double scan_rate, Timestamp start);

/// Render a traversal in memory. Scan i uses a noise stream derived from
/// (cfg.seed, i).
RadarSequence simulate_traversal(const World& world, const PathSpec& path, double speed, const SimConfig& cfg,
                                 Timestamp start);

/// simulate_traversal followed by write_sequence.
RadarSequence generate_traversal(const World& world, const PathSpec& path, double speed, const SimConfig& cfg,
                                 Timestamp start, const std::filesystem::path& out_dir);

constexpr Timestamp kDefaultStartTime = 1'500'000'000'000'000;

}  // namespace radarpr
