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

#include "geometry.hpp"
#include "simworld.hpp"
#include "test_util.hpp"

using namespace radarpr;
using radarpr::testing::TempDir;

namespace {

SimConfig quiet() {
  SimConfig c;
  c.speckle_noise_sigma = 0.0;
  return c;
}

}  // namespace

TEST_CASE("simworld: world generation") {
  CHECK(generate_world(1, 0, 100.0).scatterers.empty());
  const World a = generate_world(4, 1000, 100.0);
  const World b = generate_world(4, 1000, 100.0);
  REQUIRE(a.scatterers.size() == 1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    CHECK(a.scatterers[i].x == b.scatterers[i].x);
    CHECK(a.scatterers[i].y == b.scatterers[i].y);
    CHECK(a.scatterers[i].reflectivity == b.scatterers[i].reflectivity);
    CHECK(std::abs(a.scatterers[i].x) <= 100.0);
    CHECK(std::abs(a.scatterers[i].y) <= 100.0);
    CHECK(a.scatterers[i].reflectivity >= 0.3);
    CHECK(a.scatterers[i].reflectivity <= 1.0);
  }
  CHECK(generate_world(5, 10, 100.0).scatterers[0].x != a.scatterers[0].x);
}

TEST_CASE("simworld: empty world without noise renders zeros") {
  Rng rng(1);
  const PolarScan s = render_scan(World{}, PoseRecord{}, quiet(), rng);
  CHECK(s.azimuths == 400);
  CHECK(s.range_bins == 200);
  for (float v : s.power) REQUIRE(v == 0.0f);
}

TEST_CASE("simworld: scatterer straight ahead peaks at azimuth 0") {
  World w;
  w.scatterers.push_back({20.0, 0.0, 1.0});
  Rng rng(1);
  const PolarScan s = render_scan(w, PoseRecord{0, 0.0, 0.0, 0.0}, quiet(), rng);
  int best = 0;
  for (int i = 1; i < static_cast<int>(s.power.size()); ++i)
    if (s.power[i] > s.power[best]) best = i;
  CHECK(best / s.range_bins == 0);
  CHECK(best % s.range_bins == 40);
  CHECK(s.power[best] == doctest::Approx(1.0 / (1.0 + 20.0 / 50.0)).epsilon(1e-6));
}

TEST_CASE("simworld: bearings are clockwise from the heading") {
  World w;
  // Heading +y; a scatterer on +x is to the right, a quarter turn clockwise.
  w.scatterers.push_back({30.0, 0.0, 1.0});
  Rng rng(1);
  const PolarScan s = render_scan(w, PoseRecord{0, 0.0, 0.0, std::numbers::pi / 2}, quiet(), rng);
  int best = 0;
  for (int i = 1; i < static_cast<int>(s.power.size()); ++i)
    if (s.power[i] > s.power[best]) best = i;
  CHECK(best / s.range_bins == 100);
  CHECK(best % s.range_bins == 60);
}

TEST_CASE("simworld: turning by one azimuth step rolls the scan by one") {
  const World w = generate_world(8, 2000, 150.0);
  const SimConfig cfg = quiet();
  Rng pose_rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const PoseRecord p{0, pose_rng.uniform(-40, 40), pose_rng.uniform(-40, 40), pose_rng.uniform(-3, 3)};
    PoseRecord turned = p;
    turned.yaw += 2.0 * std::numbers::pi / cfg.azimuths;
    Rng r1(1), r2(1);
    const PolarScan a = render_scan(w, p, cfg, r1);
    const PolarScan b = render_scan(w, turned, cfg, r2);
    const PolarScan rolled = spin_polar(a, 1);
    float worst = 0.0f;
    for (std::size_t i = 0; i < a.power.size(); ++i) worst = std::max(worst, std::abs(b.power[i] - rolled.power[i]));
    CHECK(worst <= 1e-6f);
  }
}

TEST_CASE("simworld: speckle stays within [0, 1] and follows the seed") {
  const World w = generate_world(2, 500, 100.0);
  SimConfig cfg;
  cfg.speckle_noise_sigma = 0.3;
  Rng a(5), b(5), c(6);
  const PolarScan x = render_scan(w, PoseRecord{}, cfg, a);
  const PolarScan y = render_scan(w, PoseRecord{}, cfg, b);
  const PolarScan z = render_scan(w, PoseRecord{}, cfg, c);
  CHECK(x.power == y.power);
  CHECK(x.power != z.power);
  CHECK_NOTHROW(x.validate());
}

TEST_CASE("simworld: pose sampling") {
  PathSpec path;
  path.waypoints = {{0, 0}, {100, 0}};
  const auto poses = sample_poses(path, 5.0, 4.0, 0);
  CHECK(poses.size() == 80);
  CHECK(path_length(path) == 100.0);
  CHECK(poses[1].timestamp - poses[0].timestamp == 250000);
  CHECK(poses[79].x == doctest::Approx(98.75));

  PathSpec reversed = path;
  reversed.reversed = true;
  const auto back = sample_poses(reversed, 5.0, 4.0, 0);
  REQUIRE(back.size() == poses.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    const auto& f = poses[poses.size() - 1 - i];
    CHECK(back[i].x == doctest::Approx(f.x));
    CHECK(back[i].y == doctest::Approx(f.y));
    CHECK(std::abs(wrap_angle(back[i].yaw - f.yaw - std::numbers::pi)) < 1e-12);
    CHECK(back[i].timestamp == poses[i].timestamp);
  }

  PathSpec shifted = path;
  shifted.lateral_offset = 3.0;
  // Travelling along +x, the right-hand side is -y.
  for (const auto& p : sample_poses(shifted, 5.0, 4.0, 0)) CHECK(p.y == doctest::Approx(-3.0));

  PathSpec loop;
  loop.waypoints = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  loop.closed = true;
  CHECK(path_length(loop) == 40.0);
  const auto lp = sample_poses(loop, 5.0, 4.0, 0);
  CHECK(lp.size() == 32);
  CHECK(lp[8].x == doctest::Approx(10.0));
  CHECK(lp[8].yaw == doctest::Approx(std::numbers::pi / 2));

  CHECK(testing::error_of([&] { sample_poses(path, 0.0, 4.0, 0); }) == ErrorCode::kArgument);
}

TEST_CASE("simworld: traversal written to disk round trips through ingest") {
  TempDir dir;
  const World w = generate_world(9, 800, 120.0);
  SimConfig cfg;
  cfg.azimuths = 64;
  cfg.range_bins = 50;
  cfg.seed = 4;
  PathSpec path;
  path.waypoints = {{0, 0}, {100, 0}};
  const RadarSequence written = generate_traversal(w, path, 5.0, cfg, kDefaultStartTime, dir.path());
  CHECK(written.scans.size() == 80);
  const RadarSequence read = load_sequence(dir.path());
  REQUIRE(read.scans.size() == 80);
  float worst = 0.0f;
  for (std::size_t i = 0; i < 80; ++i) {
    CHECK(read.scans[i].timestamp == written.scans[i].timestamp);
    for (std::size_t k = 0; k < read.scans[i].power.size(); ++k)
      worst = std::max(worst, std::abs(read.scans[i].power[k] - written.scans[i].power[k]));
  }
  CHECK(worst <= 1.0f / 255.0f);

  const RadarSequence again = simulate_traversal(w, path, 5.0, cfg, kDefaultStartTime);
  for (std::size_t i = 0; i < 80; ++i) CHECK(again.scans[i].power == written.scans[i].power);
}

TEST_CASE("simworld: configuration checks") {
  SimConfig c;
  CHECK(c.effective_beam_width() == doctest::Approx(2.0 * std::numbers::pi / 400));
  c.azimuths = 2;
  CHECK(testing::error_of([&] { c.validate(); }) != static_cast<ErrorCode>(0));
  c = SimConfig{};
  c.speckle_noise_sigma = -1;
  CHECK(testing::error_of([&] { c.validate(); }) != static_cast<ErrorCode>(0));
}
