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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geometry.hpp"
#include "ingest.hpp"

namespace radarpr {

class Rng;

/// Batch construction strategies:
///   vR   - instance paired with a spun copy of itself
///   vT   - instance paired with the real frame positive_offset later
///   vTR  - as vT, with one member of the pair spun
///   vTR2 - as vTR, plus a far frame paired with a spun frame shortly before it
enum class Variant { kR, kT, kTR, kTR2 };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct VariantConfig {
  Variant variant = Variant::kTR2;
  double positive_offset = 2.0;      // seconds
  double negative_offset = 6.0;      // seconds
  double negative_aug_offset = 4.0;  // seconds
  double time_tolerance = 0.3;       // seconds
  int pairs_per_batch = 12;

  void validate() const;
};

/// Which scans and spins produced a sample. Index fields are scan indices
/// within the sequence; shift fields are 0 when no spin was applied.
struct SampleTrace {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::optional<std::size_t> negative;
  std::optional<std::size_t> negative_aug;
  int anchor_shift = 0;
  int positive_shift = 0;
  int negative_aug_shift = 0;
  bool anchor_spun = false;
  bool positive_spun = false;

  bool operator==(const SampleTrace&) const = default;
};

struct TrainingSample {
  CartesianFrame anchor;
  CartesianFrame positive;
  std::optional<CartesianFrame> negative;
  std::optional<CartesianFrame> negative_aug;
  Timestamp anchor_timestamp = 0;
  SampleTrace trace;
};

/// Index of the scan closest to t (ties to the earlier scan). Throws kGap when
/// the closest scan is more than tolerance_s away.
std::size_t nearest_frame(const RadarSequence& seq, Timestamp t, double tolerance_s);

TrainingSample build_sample(const RadarSequence& seq, std::size_t anchor_idx, const VariantConfig& cfg,
                            const GridSpec& grid, Rng& rng);

struct BatchEntry {
  std::size_t sequence = 0;
  SampleTrace trace;

  bool operator==(const BatchEntry&) const = default;
};

/// Instance/augmentation pairs ready for the loss; row i of `instances`
/// pairs with row i of `augmentations`.
struct Batch {
  std::vector<CartesianFrame> instances;
  std::vector<CartesianFrame> augmentations;
  std::vector<BatchEntry> samples;

  std::size_t pairs() const { return instances.size(); }
};

constexpr int kBatchRetryBudget = 100;

/// Draws anchors uniformly over all frames of the pool. For vTR2 each sample
/// contributes two pairs, so pairs_per_batch / 2 samples are drawn.
Batch build_batch(const std::vector<RadarSequence>& pool, const VariantConfig& cfg, const GridSpec& grid,
                  Rng& rng);

}  // namespace radarpr
