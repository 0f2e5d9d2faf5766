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
#include <vector>

#include "ingest.hpp"

namespace radarpr {

class Rng;

struct GridSpec {
  int side_pixels = 256;
  double metres_per_pixel = 0.5;

  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

/// Top-down image with the vehicle between the four central pixels,
/// forward = decreasing row, right = increasing column.
struct CartesianFrame {
  int side = 0;
  Timestamp source_timestamp = 0;
  std::vector<float> pixels;  // row-major side * side

  float at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * side + col]; }
};

/// Precomputed bilinear lookup from Cartesian pixels into a polar grid of a
/// fixed shape. Reusable across scans with matching geometry.
class CartesianProjector {
 public:
  CartesianProjector(int azimuths, int range_bins, double range_resolution, const GridSpec& grid);

  bool matches(const PolarScan& scan, const GridSpec& grid) const;
  CartesianFrame project(const PolarScan& scan) const;

 private:
  struct Tap {
    std::int32_t index[4];
    float weight[4];
  };

  int azimuths_;
  int range_bins_;
  double range_resolution_;
  GridSpec grid_;
  std::vector<Tap> taps_;  // one per pixel; all-zero weights outside max range
};

/// Bilinear polar->Cartesian projection (linear in azimuth with wraparound,
/// linear in range, zero beyond max range).
CartesianFrame polar_to_cartesian(const PolarScan& scan, const GridSpec& grid);

/// Circular azimuth roll: output row (a + shift) mod A is input row a.
/// Requires 0 <= shift < A.
PolarScan spin_polar(const PolarScan& scan, int shift);

/// Spin drawn uniformly over {0, ..., azimuths-1}.
int random_spin(Rng& rng, int azimuths);

}  // namespace radarpr
