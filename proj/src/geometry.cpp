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

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <fmt/format.h>

#include "error.hpp"
#include "rng.hpp"

namespace radarpr {

void GridSpec::validate() const {
  if (side_pixels < 16 || side_pixels % 2 != 0)
    fail(ErrorCode::kConfig, fmt::format("grid side must be even and >= 16 (got {})", side_pixels));
  if (!(metres_per_pixel > 0.0)) fail(ErrorCode::kConfig, "grid metres_per_pixel must be positive");
}

CartesianProjector::CartesianProjector(int azimuths, int range_bins, double range_resolution,
                                       const GridSpec& grid)
    : azimuths_(azimuths), range_bins_(range_bins), range_resolution_(range_resolution), grid_(grid) {
  grid.validate();
  if (azimuths < 4 || range_bins < 1 || !(range_resolution > 0.0))
    fail(ErrorCode::kArgument, "invalid polar geometry for projection");

  const int side = grid.side_pixels;
  const double half = side / 2.0;
  const double max_range = range_bins * range_resolution;
  const double two_pi = 2.0 * std::numbers::pi;
  taps_.resize(static_cast<std::size_t>(side) * side);

  for (int row = 0; row < side; ++row) {
    for (int col = 0; col < side; ++col) {
      Tap& tap = taps_[static_cast<std::size_t>(row) * side + col];
      std::fill(std::begin(tap.index), std::end(tap.index), 0);
      std::fill(std::begin(tap.weight), std::end(tap.weight), 0.0f);

      const double right = (col + 0.5 - half) * grid.metres_per_pixel;
      const double forward = (half - row - 0.5) * grid.metres_per_pixel;
      const double rho = std::hypot(right, forward);
      if (rho > max_range) continue;

      double bearing = std::atan2(right, forward);  // clockwise from forward
      if (bearing < 0) bearing += two_pi;
      const double a_pos = bearing / two_pi * azimuths;
      const double a_floor = std::floor(a_pos);
      const double wa = a_pos - a_floor;
      const int a0 = static_cast<int>(a_floor) % azimuths;
      const int a1 = (a0 + 1) % azimuths;

      const double r_pos = std::clamp(rho / range_resolution - 0.5, 0.0, static_cast<double>(range_bins - 1));
      const int r0 = static_cast<int>(std::floor(r_pos));
      const int r1 = std::min(r0 + 1, range_bins - 1);
      const double wr = r_pos - r0;

      tap.index[0] = a0 * range_bins + r0;
      tap.index[1] = a0 * range_bins + r1;
      tap.index[2] = a1 * range_bins + r0;
      tap.index[3] = a1 * range_bins + r1;
      tap.weight[0] = static_cast<float>((1 - wa) * (1 - wr));
      tap.weight[1] = static_cast<float>((1 - wa) * wr);
      tap.weight[2] = static_cast<float>(wa * (1 - wr));
      tap.weight[3] = static_cast<float>(wa * wr);
    }
  }
}

bool CartesianProjector::matches(const PolarScan& scan, const GridSpec& grid) const {
  return scan.azimuths == azimuths_ && scan.range_bins == range_bins_ &&
         scan.range_resolution == range_resolution_ && grid == grid_;
}

CartesianFrame CartesianProjector::project(const PolarScan& scan) const {
  if (scan.azimuths != azimuths_ || scan.range_bins != range_bins_ ||
      scan.power.size() != static_cast<std::size_t>(azimuths_) * range_bins_)
    fail(ErrorCode::kArgument, "scan shape does not match projector");
  CartesianFrame frame;
  frame.side = grid_.side_pixels;
  frame.source_timestamp = scan.timestamp;
  frame.pixels.resize(taps_.size());
  const float* power = scan.power.data();
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    const Tap& t = taps_[i];
    const float v = t.weight[0] * power[t.index[0]] + t.weight[1] * power[t.index[1]] +
                    t.weight[2] * power[t.index[2]] + t.weight[3] * power[t.index[3]];
    frame.pixels[i] = std::clamp(v, 0.0f, 1.0f);
  }
  return frame;
}

CartesianFrame polar_to_cartesian(const PolarScan& scan, const GridSpec& grid) {
  thread_local std::unique_ptr<CartesianProjector> cached;
  if (!cached || !cached->matches(scan, grid))
    cached = std::make_unique<CartesianProjector>(scan.azimuths, scan.range_bins, scan.range_resolution, grid);
  return cached->project(scan);
}

PolarScan spin_polar(const PolarScan& scan, int shift) {
  if (shift < 0 || shift >= scan.azimuths)
    fail(ErrorCode::kArgument, fmt::format("spin shift {} outside [0, {})", shift, scan.azimuths));
  PolarScan out = scan;
  const auto row = static_cast<std::size_t>(scan.range_bins);
  for (int a = 0; a < scan.azimuths; ++a) {
    const int dst = (a + shift) % scan.azimuths;
    std::copy_n(scan.power.begin() + static_cast<std::ptrdiff_t>(a * row), row,
                out.power.begin() + static_cast<std::ptrdiff_t>(dst * row));
  }
  return out;
}

int random_spin(Rng& rng, int azimuths) {
  if (azimuths < 4) fail(ErrorCode::kArgument, "random_spin needs at least 4 azimuths");
  return static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(azimuths)));
}

}  // namespace radarpr
