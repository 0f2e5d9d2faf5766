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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ingest.hpp"
#include "simworld.hpp"
#include "test_util.hpp"

using namespace radarpr;
using radarpr::testing::TempDir;

namespace {

RadarSequence small_sim_sequence(std::size_t scans, std::uint64_t seed = 3) {
  const World world = generate_world(seed, 300, 60.0);
  SimConfig cfg;
  cfg.azimuths = 32;
  cfg.range_bins = 24;
  cfg.seed = seed;
  PathSpec path;
  // 1.25 m per scan at 5 m/s and 4 Hz.
  path.waypoints = {{0.0, 0.0}, {1.25 * static_cast<double>(scans), 0.0}};
  return simulate_traversal(world, path, 5.0, cfg, kDefaultStartTime);
}

}  // namespace

TEST_CASE("ingest: directory without scans is an empty-sequence error") {
  TempDir dir;
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kEmpty);

  testing::write_file(dir / "meta.txt", "azimuths=16\nrange_bins=8\nrange_resolution_m=0.5\n");
  testing::write_file(dir / "timestamps.txt", "");
  testing::write_file(dir / "poses.csv", "timestamp,x,y,yaw\n0,0,0,0\n");
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kEmpty);
}

TEST_CASE("ingest: missing directory or files are I/O errors") {
  TempDir dir;
  CHECK(testing::error_of([&] { load_sequence(dir / "nope"); }) == ErrorCode::kIo);
  write_sequence(testing::uniform_sequence(5), dir.path());
  std::filesystem::remove(dir / "poses.csv");
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kIo);
}

TEST_CASE("ingest: simworld directory of 100 scans loads with monotone timestamps") {
  TempDir dir;
  const RadarSequence written = small_sim_sequence(100);
  REQUIRE(written.scans.size() == 100);
  write_sequence(written, dir.path());
  LoadStats stats;
  const RadarSequence seq = load_sequence(dir.path(), &stats);
  CHECK(seq.scans.size() == 100);
  CHECK(stats.scans_found == 100);
  CHECK(stats.scans_dropped == 0);
  for (std::size_t i = 1; i < seq.scans.size(); ++i) CHECK(seq.scans[i].timestamp > seq.scans[i - 1].timestamp);
}

TEST_CASE("ingest: round trip is exact on timestamps and poses, within 1/255 on power") {
  TempDir dir;
  const RadarSequence written = small_sim_sequence(40);
  write_sequence(written, dir.path());
  const RadarSequence seq = load_sequence(dir.path());
  REQUIRE(seq.scans.size() == written.scans.size());
  REQUIRE(seq.poses.size() == written.poses.size());
  float worst = 0.0f;
  for (std::size_t i = 0; i < seq.scans.size(); ++i) {
    CHECK(seq.scans[i].timestamp == written.scans[i].timestamp);
    for (std::size_t k = 0; k < seq.scans[i].power.size(); ++k)
      worst = std::max(worst, std::abs(seq.scans[i].power[k] - written.scans[i].power[k]));
  }
  CHECK(worst <= 1.0f / 255.0f);
  for (std::size_t i = 0; i < seq.poses.size(); ++i) {
    CHECK(seq.poses[i].timestamp == written.poses[i].timestamp);
    CHECK(seq.poses[i].x == written.poses[i].x);
    CHECK(seq.poses[i].y == written.poses[i].y);
    CHECK(seq.poses[i].yaw == written.poses[i].yaw);
  }
}

TEST_CASE("ingest: scan file of the wrong length names the file") {
  TempDir dir;
  const RadarSequence written = testing::uniform_sequence(6);
  write_sequence(written, dir.path());
  const auto bad = dir / "scans" / (std::to_string(written.scans[3].timestamp) + ".bin");
  testing::write_file(bad, "short");
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kFormat);
  CHECK(testing::message_of([&] { load_sequence(dir.path()); }).find(bad.filename().string()) != std::string::npos);
}

TEST_CASE("ingest: non-monotone timestamps are a format error with the index") {
  TempDir dir;
  write_sequence(testing::uniform_sequence(4), dir.path());
  std::string ts = testing::read_file(dir / "timestamps.txt");
  const auto first_nl = ts.find('\n');
  const auto second_nl = ts.find('\n', first_nl + 1);
  const std::string a = ts.substr(0, first_nl);
  const std::string b = ts.substr(first_nl + 1, second_nl - first_nl - 1);
  testing::write_file(dir / "timestamps.txt", b + "\n" + a + ts.substr(second_nl));
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kFormat);
  CHECK(testing::message_of([&] { load_sequence(dir.path()); }).find("index 1") != std::string::npos);
}

TEST_CASE("ingest: malformed meta and pose header are format errors") {
  TempDir dir;
  write_sequence(testing::uniform_sequence(4), dir.path());
  const std::string poses = testing::read_file(dir / "poses.csv");
  testing::write_file(dir / "poses.csv", "t,x,y,theta" + poses.substr(poses.find('\n')));
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kFormat);
  testing::write_file(dir / "poses.csv", poses);
  testing::write_file(dir / "meta.txt", "azimuths=16\n");
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kFormat);
}

TEST_CASE("ingest: scans outside pose coverage are dropped up to 10%") {
  TempDir dir;
  RadarSequence seq = testing::uniform_sequence(20);
  // Poses stop one scan early: 1 of 20 dropped.
  seq.poses.pop_back();
  write_sequence(seq, dir.path());
  LoadStats stats;
  const RadarSequence loaded = load_sequence(dir.path(), &stats);
  CHECK(loaded.scans.size() == 19);
  CHECK(stats.scans_dropped == 1);

  seq.poses.resize(15);
  write_sequence(seq, dir.path());
  CHECK(testing::error_of([&] { load_sequence(dir.path()); }) == ErrorCode::kOutOfRange);
}

TEST_CASE("ingest: pose interpolation") {
  std::vector<PoseRecord> poses{{0, 0.0, 0.0, 0.0}, {1000, 2.0, 0.0, 0.5}, {2000, 2.0, 4.0, 3.1},
                                {3000, 2.0, 4.0, -3.1}};
  SUBCASE("exact at sample points") {
    for (const auto& p : poses) {
      const PoseRecord q = pose_at(poses, p.timestamp);
      CHECK(q.x == p.x);
      CHECK(q.y == p.y);
      CHECK(q.yaw == doctest::Approx(p.yaw).epsilon(1e-15));
    }
  }
  SUBCASE("linear midpoint") {
    const PoseRecord q = pose_at(poses, 500);
    CHECK(q.x == doctest::Approx(1.0));
    CHECK(q.y == doctest::Approx(0.0));
  }
  SUBCASE("yaw takes the short way through +-pi") {
    const PoseRecord q = pose_at(poses, 2500);
    CHECK(std::abs(q.yaw) == doctest::Approx(std::numbers::pi).epsilon(1e-12));
    const PoseRecord near = pose_at(poses, 2250);
    CHECK(std::abs(near.yaw) > 3.1);
  }
  SUBCASE("outside coverage") {
    CHECK(testing::error_of([&] { pose_at(poses, -1); }) == ErrorCode::kOutOfRange);
    CHECK(testing::error_of([&] { pose_at(poses, 3001); }) == ErrorCode::kOutOfRange);
  }
  SUBCASE("continuity") {
    for (Timestamp t = 0; t < 3000; t += 37) {
      const PoseRecord a = pose_at(poses, t);
      const PoseRecord b = pose_at(poses, t + 1);
      CHECK(std::hypot(a.x - b.x, a.y - b.y) < 0.01);
      CHECK(std::abs(wrap_angle(a.yaw - b.yaw)) < 0.01);
    }
  }
}

TEST_CASE("ingest: wrap_angle maps into [-pi, pi)") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(-std::numbers::pi));
  CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
  for (double a = -20.0; a < 20.0; a += 0.37) {
    const double w = wrap_angle(a);
    CHECK(w >= -std::numbers::pi);
    CHECK(w < std::numbers::pi);
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)));
  }
}

TEST_CASE("ingest: scan invariants") {
  Rng rng(1);
  PolarScan s = testing::random_scan(rng, 4, 1);
  CHECK_NOTHROW(s.validate());
  s.power[0] = 1.5f;
  CHECK(testing::error_of([&] { s.validate(); }) == ErrorCode::kArgument);
  PolarScan small = testing::random_scan(rng, 3, 2);
  CHECK(testing::error_of([&] { small.validate(); }) == ErrorCode::kArgument);
}
