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
#include <vector>

#include "geometry.hpp"
#include "simworld.hpp"
#include "test_util.hpp"

using namespace radarpr;

namespace {

// Rotate an image 90 degrees clockwise `quarter` times.
std::vector<float> rotate_cw(const CartesianFrame& f, int quarter) {
  std::vector<float> cur = f.pixels;
  const int n = f.side;
  for (int q = 0; q < quarter; ++q) {
    std::vector<float> next(cur.size());
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) next[r * n + c] = cur[(n - 1 - c) * n + r];
    cur.swap(next);
  }
  return cur;
}

double mean_abs_diff(const std::vector<float>& a, const std::vector<float>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

PolarScan blank(int a, int r, double res = 0.5) {
  PolarScan s;
  s.azimuths = a;
  s.range_bins = r;
  s.range_resolution = res;
  s.power.assign(static_cast<std::size_t>(a) * r, 0.0f);
  return s;
}

}  // namespace

TEST_CASE("geometry: all-zero scan projects to an all-zero frame") {
  const CartesianFrame f = polar_to_cartesian(blank(400, 200), GridSpec{});
  CHECK(f.side == 256);
  for (float v : f.pixels) REQUIRE(v == 0.0f);
}

TEST_CASE("geometry: constant scan fills the max-range disc") {
  PolarScan s = blank(400, 200);
  std::fill(s.power.begin(), s.power.end(), 1.0f);
  const GridSpec grid{256, 0.5};
  const CartesianFrame f = polar_to_cartesian(s, grid);
  for (int r = 0; r < f.side; ++r) {
    for (int c = 0; c < f.side; ++c) {
      const double x = (c + 0.5 - f.side / 2.0) * grid.metres_per_pixel;
      const double y = (f.side / 2.0 - r - 0.5) * grid.metres_per_pixel;
      const double rho = std::hypot(x, y);
      if (rho < s.max_range() - 1.0) REQUIRE(f.at(r, c) == doctest::Approx(1.0f));
      if (rho > s.max_range()) REQUIRE(f.at(r, c) == 0.0f);
    }
  }
}

TEST_CASE("geometry: single bright cell lands at its geometric position") {
  const GridSpec grid{256, 0.5};
  const int A = 400, R = 200;
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const int a0 = static_cast<int>(rng.uniform_index(A));
    // Bilinear sampling only resolves a cell whose azimuth arc spans at least
    // one pixel: 2 pi rho / A >= 0.5 m needs rho >= 32 m, i.e. r0 >= 64.
    const int r0 = 64 + static_cast<int>(rng.uniform_index(60));
    PolarScan s = blank(A, R);
    s.at(a0, r0) = 1.0f;
    const CartesianFrame f = polar_to_cartesian(s, grid);
    int best = 0;
    for (int i = 1; i < static_cast<int>(f.pixels.size()); ++i)
      if (f.pixels[i] > f.pixels[best]) best = i;
    const double theta = 2.0 * std::numbers::pi * a0 / A;
    const double rho = (r0 + 0.5) * s.range_resolution;
    const double col = f.side / 2.0 + rho * std::sin(theta) / grid.metres_per_pixel;
    const double row = f.side / 2.0 - rho * std::cos(theta) / grid.metres_per_pixel;
    const double best_col = best % f.side + 0.5;
    const double best_row = best / f.side + 0.5;
    CAPTURE(a0);
    CAPTURE(r0);
    CHECK(std::hypot(best_col - col, best_row - row) <= 1.0);
  }
}

TEST_CASE("geometry: projection output stays within [0, 1]") {
  Rng rng(4);
  const GridSpec grid{64, 1.7};
  for (int i = 0; i < 10; ++i) {
    const PolarScan s = testing::random_scan(rng, 37, 51, 0.9);
    for (float v : polar_to_cartesian(s, grid).pixels) REQUIRE((v >= 0.0f && v <= 1.0f));
  }
}

TEST_CASE("geometry: spin identities") {
  Rng rng(8);
  const PolarScan s = testing::random_scan(rng, 40, 9);
  CHECK(spin_polar(s, 0).power == s.power);
  CHECK(testing::error_of([&] { spin_polar(s, 40); }) == ErrorCode::kArgument);
  CHECK(testing::error_of([&] { spin_polar(s, -1); }) == ErrorCode::kArgument);
  for (int k = 1; k < 40; ++k) CHECK(spin_polar(spin_polar(s, k), 40 - k).power == s.power);
  const PolarScan one = spin_polar(s, 1);
  for (int r = 0; r < 9; ++r) {
    CHECK(one.at(1, r) == s.at(0, r));
    CHECK(one.at(0, r) == s.at(39, r));
  }
}

TEST_CASE("geometry: spinning by quarter turns matches rotating the image") {
  const World world = generate_world(17, 3000, 150.0);
  SimConfig cfg;
  cfg.seed = 5;
  Rng pose_rng(2);
  const GridSpec grid{256, 0.5};
  for (int trial = 0; trial < 4; ++trial) {
    const PoseRecord pose{0, pose_rng.uniform(-50, 50), pose_rng.uniform(-50, 50), pose_rng.uniform(-3, 3)};
    Rng noise(derive_seed(9, trial));
    const PolarScan scan = render_scan(world, pose, cfg, noise);
    const CartesianFrame base = polar_to_cartesian(scan, grid);
    for (int q = 1; q < 4; ++q) {
      const CartesianFrame spun = polar_to_cartesian(spin_polar(scan, q * scan.azimuths / 4), grid);
      const double d = mean_abs_diff(spun.pixels, rotate_cw(base, q));
      CAPTURE(q);
      CHECK(d <= 0.02);
    }
  }
}

TEST_CASE("geometry: random_spin") {
  SUBCASE("deterministic for a fixed seed") {
    Rng a(3), b(3);
    for (int i = 0; i < 50; ++i) CHECK(random_spin(a, 400) == random_spin(b, 400));
  }
  SUBCASE("A = 4 gives values in {0,1,2,3}") {
    Rng rng(1);
    std::vector<int> seen(4, 0);
    for (int i = 0; i < 1000; ++i) {
      const int k = random_spin(rng, 4);
      REQUIRE((k >= 0 && k < 4));
      ++seen[k];
    }
    for (int c : seen) CHECK(c > 0);
  }
  SUBCASE("uniform over 400 bins within 5 sigma") {
    Rng rng(99);
    const int A = 400, n = 100000;
    std::vector<int> counts(A, 0);
    for (int i = 0; i < n; ++i) ++counts[random_spin(rng, A)];
    const double p = 1.0 / A;
    const double sigma = std::sqrt(n * p * (1 - p));
    for (int c : counts) REQUIRE(std::abs(c - n * p) <= 5.0 * sigma);
  }
  SUBCASE("fewer than 4 azimuths rejected") {
    Rng rng(1);
    CHECK(testing::error_of([&] { random_spin(rng, 3); }) == ErrorCode::kArgument);
  }
}

TEST_CASE("geometry: grid validation and projector reuse") {
  CHECK(testing::error_of([] { GridSpec{255, 0.5}.validate(); }) != static_cast<ErrorCode>(0));
  CHECK(testing::error_of([] { GridSpec{8, 0.5}.validate(); }) != static_cast<ErrorCode>(0));
  CHECK(testing::error_of([] { GridSpec{64, 0.0}.validate(); }) != static_cast<ErrorCode>(0));
  const GridSpec grid{32, 1.0};
  const CartesianProjector proj(16, 8, 0.5, grid);
  Rng rng(2);
  const PolarScan s = testing::random_scan(rng, 16, 8, 0.5, 77);
  CHECK(proj.matches(s, grid));
  CHECK_FALSE(proj.matches(testing::random_scan(rng, 16, 9), grid));
  const CartesianFrame a = proj.project(s);
  CHECK(a.pixels == polar_to_cartesian(s, grid).pixels);
  CHECK(a.source_timestamp == 77);
}
