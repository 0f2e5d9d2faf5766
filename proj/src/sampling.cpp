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

#include "sampling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "error.hpp"
#include "rng.hpp"

namespace radarpr {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kR: return "vR";
    case Variant::kT: return "vT";
    case Variant::kTR: return "vTR";
    case Variant::kTR2: return "vTR2";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kR, Variant::kT, Variant::kTR, Variant::kTR2})
    if (variant_name(v) == name) return v;
  fail(ErrorCode::kConfig, fmt::format("unknown variant '{}' (expected vR, vT, vTR or vTR2)", name));
}

void VariantConfig::validate() const {
  if (!(positive_offset > 0.0 && positive_offset < negative_aug_offset && negative_aug_offset < negative_offset))
    fail(ErrorCode::kConfig, "offsets must satisfy 0 < positive < negative_aug < negative");
  if (!(time_tolerance >= 0.0)) fail(ErrorCode::kConfig, "time_tolerance must be non-negative");
  if (pairs_per_batch < 2) fail(ErrorCode::kConfig, "pairs_per_batch must be >= 2");
  if (variant == Variant::kTR2 && pairs_per_batch % 2 != 0)
    fail(ErrorCode::kConfig, "vTR2 needs an even pairs_per_batch");
}

std::size_t nearest_frame(const RadarSequence& seq, Timestamp t, double tolerance_s) {
  if (seq.scans.empty()) fail(ErrorCode::kEmpty, "nearest_frame on an empty sequence");
  auto it = std::lower_bound(seq.scans.begin(), seq.scans.end(), t,
                             [](const PolarScan& s, Timestamp v) { return s.timestamp < v; });
  std::size_t best;
  if (it == seq.scans.end()) {
    best = seq.scans.size() - 1;
  } else {
    best = static_cast<std::size_t>(it - seq.scans.begin());
    if (best > 0 && t - seq.scans[best - 1].timestamp <= it->timestamp - t) --best;
  }
  const double gap = std::abs(static_cast<double>(seq.scans[best].timestamp - t)) / kMicrosPerSecond;
  if (gap > tolerance_s)
    fail(ErrorCode::kGap, fmt::format("no frame within {} s of t={} (closest {} s away)", tolerance_s, t, gap));
  return best;
}

namespace {

Timestamp offset_us(double seconds) { return static_cast<Timestamp>(std::llround(seconds * kMicrosPerSecond)); }

CartesianFrame project(const PolarScan& scan, const GridSpec& grid, int shift) {
  return shift == 0 ? polar_to_cartesian(scan, grid) : polar_to_cartesian(spin_polar(scan, shift), grid);
}

}  // namespace

TrainingSample build_sample(const RadarSequence& seq, std::size_t anchor_idx, const VariantConfig& cfg,
                            const GridSpec& grid, Rng& rng) {
  if (anchor_idx >= seq.scans.size())
    fail(ErrorCode::kArgument, fmt::format("anchor index {} out of range ({} scans)", anchor_idx, seq.scans.size()));
  const Timestamp t0 = seq.scans[anchor_idx].timestamp;

  // Resolve every frame before drawing any randomness so a gap leaves the
  // rng untouched.
  SampleTrace trace;
  trace.anchor = anchor_idx;
  trace.positive = anchor_idx;
  if (cfg.variant != Variant::kR)
    trace.positive = nearest_frame(seq, t0 + offset_us(cfg.positive_offset), cfg.time_tolerance);
  if (cfg.variant == Variant::kTR2) {
    trace.negative = nearest_frame(seq, t0 + offset_us(cfg.negative_offset), cfg.time_tolerance);
    trace.negative_aug = nearest_frame(seq, t0 + offset_us(cfg.negative_aug_offset), cfg.time_tolerance);
  }

  const int azimuths = seq.scans[anchor_idx].azimuths;
  switch (cfg.variant) {
    case Variant::kR:
      trace.positive_spun = true;
      trace.positive_shift = random_spin(rng, azimuths);
      break;
    case Variant::kT:
      break;
    case Variant::kTR:
    case Variant::kTR2: {
      const bool spin_anchor = rng.coin();
      const int shift = random_spin(rng, azimuths);
      (spin_anchor ? trace.anchor_spun : trace.positive_spun) = true;
      (spin_anchor ? trace.anchor_shift : trace.positive_shift) = shift;
      if (cfg.variant == Variant::kTR2) trace.negative_aug_shift = random_spin(rng, azimuths);
      break;
    }
  }

  TrainingSample sample;
  sample.anchor_timestamp = t0;
  sample.anchor = project(seq.scans[trace.anchor], grid, trace.anchor_shift);
  sample.positive = project(seq.scans[trace.positive], grid, trace.positive_shift);
  if (trace.negative) {
    sample.negative = project(seq.scans[*trace.negative], grid, 0);
    sample.negative_aug = project(seq.scans[*trace.negative_aug], grid, trace.negative_aug_shift);
  }
  sample.trace = trace;
  return sample;
}

Batch build_batch(const std::vector<RadarSequence>& pool, const VariantConfig& cfg, const GridSpec& grid,
                  Rng& rng) {
  cfg.validate();
  std::size_t total = 0;
  for (const auto& seq : pool) total += seq.scans.size();
  if (pool.empty() || total == 0) fail(ErrorCode::kBatch, "empty sequence pool");

  const bool quad = cfg.variant == Variant::kTR2;
  const int samples_needed = quad ? cfg.pairs_per_batch / 2 : cfg.pairs_per_batch;
  Batch batch;
  batch.instances.reserve(cfg.pairs_per_batch);
  batch.augmentations.reserve(cfg.pairs_per_batch);

  int failures = 0;
  while (static_cast<int>(batch.samples.size()) < samples_needed) {
    std::size_t flat = rng.uniform_index(total);
    std::size_t s = 0;
    while (flat >= pool[s].scans.size()) flat -= pool[s++].scans.size();
    try {
      TrainingSample sample = build_sample(pool[s], flat, cfg, grid, rng);
      batch.samples.push_back({s, sample.trace});
      batch.instances.push_back(std::move(sample.anchor));
      batch.augmentations.push_back(std::move(sample.positive));
      if (quad) {
        batch.instances.push_back(std::move(*sample.negative));
        batch.augmentations.push_back(std::move(*sample.negative_aug));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kGap) throw;
      if (++failures >= kBatchRetryBudget)
        fail(ErrorCode::kBatch, fmt::format("could not fill a {} batch after {} failed anchors (last: {})",
                                            variant_name(cfg.variant), failures, e.what()));
    }
  }
  return batch;
}

}  // namespace radarpr
