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

#include "geometry.hpp"
#include "sampling.hpp"
#include "test_util.hpp"

using namespace radarpr;

namespace {

const GridSpec kGrid{16, 0.5};

VariantConfig config(Variant v) {
  VariantConfig c;
  c.variant = v;
  return c;
}

std::vector<float> project(const RadarSequence& seq, std::size_t idx, int shift) {
  const PolarScan& s = seq.scans[idx];
  return polar_to_cartesian(shift == 0 ? s : spin_polar(s, shift), kGrid).pixels;
}

}  // namespace

TEST_CASE("sampling: variant names") {
  for (Variant v : {Variant::kR, Variant::kT, Variant::kTR, Variant::kTR2})
    CHECK(parse_variant(variant_name(v)) == v);
  CHECK(variant_name(Variant::kTR2) == "vTR2");
  CHECK(testing::error_of([] { parse_variant("vX"); }) == ErrorCode::kConfig);
}

TEST_CASE("sampling: defaults and validation") {
  const VariantConfig d;
  CHECK(d.positive_offset == 2.0);
  CHECK(d.negative_offset == 6.0);
  CHECK(d.negative_aug_offset == 4.0);
  CHECK(d.time_tolerance == 0.3);
  CHECK(d.pairs_per_batch == 12);
  VariantConfig odd = config(Variant::kTR2);
  odd.pairs_per_batch = 7;
  CHECK(testing::error_of([&] { odd.validate(); }) == ErrorCode::kConfig);
  VariantConfig bad;
  bad.negative_offset = 1.0;
  CHECK(testing::error_of([&] { bad.validate(); }) == ErrorCode::kConfig);
}

TEST_CASE("sampling: nearest_frame") {
  const RadarSequence seq = testing::uniform_sequence(200);
  const Timestamp t100 = seq.scans[100].timestamp;
  CHECK(nearest_frame(seq, t100, 0.3) == 100);
  CHECK(nearest_frame(seq, t100 + 2'000'000, 0.3) == 108);
  CHECK(nearest_frame(seq, t100 + 125'000, 0.3) == 100);  // tie goes to the earlier frame
  CHECK(nearest_frame(seq, t100 + 125'001, 0.3) == 101);
  CHECK(nearest_frame(seq, seq.scans.front().timestamp - 200'000, 0.3) == 0);
  CHECK(testing::error_of([&] { nearest_frame(seq, seq.scans.back().timestamp + 300'001, 0.3); }) ==
        ErrorCode::kGap);
  RadarSequence holes = seq;
  holes.scans.erase(holes.scans.begin() + 105, holes.scans.begin() + 112);
  CHECK(testing::error_of([&] { nearest_frame(holes, t100 + 2'000'000, 0.3); }) == ErrorCode::kGap);
}

TEST_CASE("sampling: vR pairs an anchor with a spun copy of itself") {
  const RadarSequence seq = testing::uniform_sequence(200);
  bool saw_zero = false;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const TrainingSample s = build_sample(seq, 100, config(Variant::kR), kGrid, rng);
    CHECK(s.trace.anchor == 100);
    CHECK(s.trace.positive == 100);
    CHECK_FALSE(s.negative.has_value());
    CHECK(s.anchor.pixels == project(seq, 100, 0));
    CHECK(s.positive.pixels == project(seq, 100, s.trace.positive_shift));
    if (s.trace.positive_shift == 0) {
      saw_zero = true;
      CHECK(s.positive.pixels == s.anchor.pixels);
    }
  }
  CHECK(saw_zero);
}

TEST_CASE("sampling: vT uses the frame 2 s later without spin") {
  const RadarSequence seq = testing::uniform_sequence(200);
  Rng rng(1);
  const TrainingSample s = build_sample(seq, 100, config(Variant::kT), kGrid, rng);
  CHECK(s.trace.positive == 108);
  CHECK(s.trace.anchor_shift == 0);
  CHECK(s.trace.positive_shift == 0);
  CHECK_FALSE(s.trace.anchor_spun);
  CHECK_FALSE(s.trace.positive_spun);
  CHECK(s.anchor.pixels == project(seq, 100, 0));
  CHECK(s.positive.pixels == project(seq, 108, 0));
  CHECK(s.anchor_timestamp == seq.scans[100].timestamp);
}

TEST_CASE("sampling: vTR spins exactly one member, chosen evenly") {
  const RadarSequence seq = testing::uniform_sequence(200);
  Rng rng(5);
  int anchor_spun = 0;
  const int n = 400;
  for (int i = 0; i < n; ++i) {
    const TrainingSample s = build_sample(seq, 100, config(Variant::kTR), kGrid, rng);
    REQUIRE(s.trace.anchor_spun != s.trace.positive_spun);
    CHECK(s.trace.positive == 108);
    if (s.trace.anchor_spun) {
      ++anchor_spun;
      CHECK(s.trace.positive_shift == 0);
    } else {
      CHECK(s.trace.anchor_shift == 0);
    }
    CHECK(s.anchor.pixels == project(seq, 100, s.trace.anchor_shift));
    CHECK(s.positive.pixels == project(seq, 108, s.trace.positive_shift));
  }
  // Binomial(400, 0.5): 5 sigma = 50.
  CHECK(std::abs(anchor_spun - n / 2) <= 50);
}

TEST_CASE("sampling: vTR2 quadruple offsets") {
  const RadarSequence seq = testing::uniform_sequence(200);
  Rng rng(2);
  const TrainingSample s = build_sample(seq, 100, config(Variant::kTR2), kGrid, rng);
  CHECK(s.trace.positive == 108);
  REQUIRE(s.trace.negative.has_value());
  REQUIRE(s.trace.negative_aug.has_value());
  CHECK(*s.trace.negative == 124);
  CHECK(*s.trace.negative_aug == 116);
  REQUIRE(s.negative.has_value());
  REQUIRE(s.negative_aug.has_value());
  CHECK(s.negative->pixels == project(seq, 124, 0));
  CHECK(s.negative_aug->pixels == project(seq, 116, s.trace.negative_aug_shift));
}

TEST_CASE("sampling: anchors too close to the end raise a gap and leave the rng untouched") {
  const RadarSequence seq = testing::uniform_sequence(200);
  Rng rng(3);
  const Rng before = rng;
  CHECK(testing::error_of([&] { build_sample(seq, 190, config(Variant::kTR2), kGrid, rng); }) == ErrorCode::kGap);
  CHECK(rng == before);
  CHECK(testing::error_of([&] { build_sample(seq, 200, config(Variant::kT), kGrid, rng); }) ==
        ErrorCode::kArgument);
}

TEST_CASE("sampling: batch sizes") {
  const std::vector<RadarSequence> pool{testing::uniform_sequence(120)};
  Rng rng(4);
  for (Variant v : {Variant::kR, Variant::kT, Variant::kTR}) {
    const Batch b = build_batch(pool, config(v), kGrid, rng);
    CHECK(b.pairs() == 12);
    CHECK(b.augmentations.size() == 12);
    CHECK(b.samples.size() == 12);
  }
  const Batch b = build_batch(pool, config(Variant::kTR2), kGrid, rng);
  CHECK(b.pairs() == 12);
  CHECK(b.samples.size() == 6);
}

TEST_CASE("sampling: batch properties") {
  const std::vector<RadarSequence> pool{testing::uniform_sequence(150, 4.0, 16, 8, 1),
                                        testing::uniform_sequence(90, 4.0, 16, 8, 2)};
  SUBCASE("temporal offsets within tolerance") {
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
      for (Variant v : {Variant::kT, Variant::kTR}) {
        const Batch b = build_batch(pool, config(v), kGrid, rng);
        for (const auto& e : b.samples) {
          const auto& seq = pool[e.sequence];
          const double dt =
              static_cast<double>(seq.scans[e.trace.positive].timestamp - seq.scans[e.trace.anchor].timestamp) / 1e6;
          CHECK(std::abs(dt - 2.0) <= 0.3);
        }
      }
    }
  }
  SUBCASE("vTR2 negatives are at least 5.7 s from the anchor") {
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
      const Batch b = build_batch(pool, config(Variant::kTR2), kGrid, rng);
      for (const auto& e : b.samples) {
        const auto& seq = pool[e.sequence];
        const double dt =
            static_cast<double>(seq.scans[*e.trace.negative].timestamp - seq.scans[e.trace.anchor].timestamp) / 1e6;
        CHECK(dt >= 6.0 - 0.3);
      }
    }
  }
  SUBCASE("vTR2 pair order") {
    Rng rng(8);
    const Batch b = build_batch(pool, config(Variant::kTR2), kGrid, rng);
    for (std::size_t k = 0; k < b.samples.size(); ++k) {
      const auto& e = b.samples[k];
      const auto& seq = pool[e.sequence];
      CHECK(b.instances[2 * k].pixels == project(seq, e.trace.anchor, e.trace.anchor_shift));
      CHECK(b.augmentations[2 * k].pixels == project(seq, e.trace.positive, e.trace.positive_shift));
      CHECK(b.instances[2 * k + 1].pixels == project(seq, *e.trace.negative, 0));
      CHECK(b.augmentations[2 * k + 1].pixels == project(seq, *e.trace.negative_aug, e.trace.negative_aug_shift));
    }
  }
  SUBCASE("fixed seed gives identical batches") {
    Rng a(11), b(11);
    for (int i = 0; i < 5; ++i) {
      const Batch x = build_batch(pool, config(Variant::kTR2), kGrid, a);
      const Batch y = build_batch(pool, config(Variant::kTR2), kGrid, b);
      CHECK(x.samples == y.samples);
      for (std::size_t k = 0; k < x.pairs(); ++k) {
        CHECK(x.instances[k].pixels == y.instances[k].pixels);
        CHECK(x.augmentations[k].pixels == y.augmentations[k].pixels);
      }
    }
  }
  SUBCASE("anchors come from every sequence") {
    Rng rng(12);
    std::vector<int> per_seq(2, 0);
    for (int i = 0; i < 30; ++i)
      for (const auto& e : build_batch(pool, config(Variant::kR), kGrid, rng).samples) ++per_seq[e.sequence];
    CHECK(per_seq[0] > 0);
    CHECK(per_seq[1] > 0);
  }
}

TEST_CASE("sampling: a pool too short to fill a batch fails") {
  const std::vector<RadarSequence> pool{testing::uniform_sequence(6)};
  Rng rng(1);
  CHECK(testing::error_of([&] { build_batch(pool, config(Variant::kT), kGrid, rng); }) == ErrorCode::kBatch);
  CHECK(testing::error_of([&] { build_batch({}, config(Variant::kT), kGrid, rng); }) == ErrorCode::kBatch);
  // vR needs no temporal partner.
  CHECK(build_batch(pool, config(Variant::kR), kGrid, rng).pairs() == 12);
}
