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

#include "simworld.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "error.hpp"
#include "rng.hpp"

namespace radarpr {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFalloffRange = 50.0;  // metres
}  // namespace

double SimConfig::effective_beam_width() const { return beam_width > 0.0 ? beam_width : kTwoPi / azimuths; }

void SimConfig::validate() const {
  if (azimuths < 4 || range_bins < 1) fail(ErrorCode::kConfig, "sim needs azimuths >= 4 and range_bins >= 1");
  if (!(range_resolution > 0.0) || !(scan_rate > 0.0)) fail(ErrorCode::kConfig, "sim resolution and rate must be positive");
  if (!(speckle_noise_sigma >= 0.0)) fail(ErrorCode::kConfig, "sim speckle sigma must be non-negative");
  if (effective_beam_width() < kTwoPi / azimuths * (1 - 1e-12))
    fail(ErrorCode::kConfig, "sim beam_width must be at least one azimuth bin");
}

World generate_world(std::uint64_t seed, std::size_t n_scatterers, double extent) {
  if (!(extent > 0.0)) fail(ErrorCode::kArgument, "world extent must be positive");
  Rng rng(seed);
  World w;
  w.extent = extent;
  w.scatterers.reserve(n_scatterers);
  for (std::size_t i = 0; i < n_scatterers; ++i) {
    Scatterer s;
    s.x = rng.uniform(-extent, extent);
    s.y = rng.uniform(-extent, extent);
    s.reflectivity = rng.uniform(0.3, 1.0);
    w.scatterers.push_back(s);
  }
  return w;
}

PolarScan render_scan(const World& world, const PoseRecord& pose, const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  const int A = cfg.azimuths, R = cfg.range_bins;
  PolarScan scan;
  scan.azimuths = A;
  scan.range_bins = R;
  scan.range_resolution = cfg.range_resolution;
  scan.timestamp = pose.timestamp;
  std::vector<double> acc(static_cast<std::size_t>(A) * R, 0.0);

  const double max_range = R * cfg.range_resolution;
  const double sigma_a = cfg.effective_beam_width() / (kTwoPi / A);  // in azimuth bins
  const int reach_a = static_cast<int>(std::ceil(3.0 * sigma_a));
  constexpr int kReachR = 3;
  const double yaw_bins = pose.yaw / kTwoPi * A;

  for (const Scatterer& s : world.scatterers) {
    const double dx = s.x - pose.x, dy = s.y - pose.y;
    const double range = std::hypot(dx, dy);
    if (range >= max_range) continue;
    // Bearing clockwise from forward = yaw - world angle.
    double a_pos = std::fmod(yaw_bins - std::atan2(dy, dx) / kTwoPi * A, static_cast<double>(A));
    if (a_pos < 0) a_pos += A;
    const double r_pos = range / cfg.range_resolution;
    const double amplitude = s.reflectivity / (1.0 + range / kFalloffRange);

    const int a_c = static_cast<int>(std::lround(a_pos));
    const int r_c = static_cast<int>(std::lround(r_pos));
    for (int da = -reach_a; da <= reach_a; ++da) {
      const int a = a_c + da;
      const double ga = std::exp(-0.5 * std::pow((a - a_pos) / sigma_a, 2));
      const int a_wrapped = ((a % A) + A) % A;
      for (int r = std::max(0, r_c - kReachR); r <= std::min(R - 1, r_c + kReachR); ++r) {
        const double gr = std::exp(-0.5 * std::pow(r - r_pos, 2));
        acc[static_cast<std::size_t>(a_wrapped) * R + r] += amplitude * ga * gr;
      }
    }
  }

  scan.power.resize(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    double v = acc[i];
    if (cfg.speckle_noise_sigma > 0.0) v += cfg.speckle_noise_sigma * rng.normal();
    scan.power[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return scan;
}

namespace {

std::vector<Waypoint> ordered_points(const PathSpec& path) {
  std::vector<Waypoint> pts = path.waypoints;
  if (path.closed && !pts.empty()) pts.push_back(pts.front());
  return pts;
}

}  // namespace

double path_length(const PathSpec& path) {
  const auto pts = ordered_points(path);
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
  return len;
}

std::vector<PoseRecord> sample_poses(const PathSpec& path, double speed, double scan_rate, Timestamp start) {
  if (!(speed > 0.0) || !(scan_rate > 0.0)) fail(ErrorCode::kArgument, "speed and scan rate must be positive");
  const auto pts = ordered_points(path);
  const double length = path_length(path);
  if (pts.size() < 2 || !(length > 0.0)) fail(ErrorCode::kArgument, "path must have positive length");

  const double step = speed / scan_rate;
  const auto count = static_cast<std::size_t>(std::floor(length / step + 1e-9));
  // Centreline samples in forward order; a reversed traversal visits the same
  // samples backwards, facing the other way.
  std::vector<PoseRecord> poses;
  poses.reserve(count);
  std::size_t seg = 1;
  double seg_start = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = static_cast<double>(i) * step;
    double seg_len = std::hypot(pts[seg].x - pts[seg - 1].x, pts[seg].y - pts[seg - 1].y);
    while ((s >= seg_start + seg_len || seg_len == 0.0) && seg + 1 < pts.size()) {
      seg_start += seg_len;
      ++seg;
      seg_len = std::hypot(pts[seg].x - pts[seg - 1].x, pts[seg].y - pts[seg - 1].y);
    }
    const double t = seg_len > 0.0 ? (s - seg_start) / seg_len : 0.0;
    const Waypoint& a = pts[seg - 1];
    const Waypoint& b = pts[seg];
    PoseRecord p;
    p.yaw = std::atan2(b.y - a.y, b.x - a.x);
    p.x = a.x + t * (b.x - a.x);
    p.y = a.y + t * (b.y - a.y);
    poses.push_back(p);
  }
  if (path.reversed) {
    std::reverse(poses.begin(), poses.end());
    for (auto& p : poses) p.yaw = wrap_angle(p.yaw + std::numbers::pi);
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    PoseRecord& p = poses[i];
    p.timestamp = start + static_cast<Timestamp>(std::llround(static_cast<double>(i) * kMicrosPerSecond / scan_rate));
    p.x += path.lateral_offset * std::sin(p.yaw);
    p.y -= path.lateral_offset * std::cos(p.yaw);
  }
  return poses;
}

RadarSequence simulate_traversal(const World& world, const PathSpec& path, double speed, const SimConfig& cfg,
                                 Timestamp start) {
  cfg.validate();
  RadarSequence seq;
  seq.poses = sample_poses(path, speed, cfg.scan_rate, start);
  seq.scans.reserve(seq.poses.size());
  for (std::size_t i = 0; i < seq.poses.size(); ++i) {
    Rng rng(derive_seed(cfg.seed, i));
    seq.scans.push_back(render_scan(world, seq.poses[i], cfg, rng));
  }
  return seq;
}

RadarSequence generate_traversal(const World& world, const PathSpec& path, double speed, const SimConfig& cfg,
                                 Timestamp start, const std::filesystem::path& out_dir) {
  RadarSequence seq = simulate_traversal(world, path, speed, cfg, start);
  if (seq.scans.empty()) fail(ErrorCode::kArgument, "traversal produced no scans");
  write_sequence(seq, out_dir);
  seq.name = out_dir.filename().string();
  return seq;
}

}  // namespace radarpr
