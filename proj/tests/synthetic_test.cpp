// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "cloudcast/io.hpp"
#include "cloudcast/synthetic.hpp"

namespace cloudcast {
namespace {

using namespace cloudcast::synthetic;

TEST(Synthetic, IntegerTranslationIsExactShift) {
  SyntheticSpec spec;
  spec.motion = Translation{2.0, 0.0};
  spec.frames = 5;
  const SyntheticData d = generate_synthetic(spec);
  for (std::size_t k = 1; k < spec.frames; ++k) {
    for (std::size_t y = 0; y < spec.height; ++y) {
      for (std::size_t x = 2 * k; x < spec.width; ++x) {
        ASSERT_EQ(d.sequence[k](y, x), d.sequence[0](y, x - 2 * k)) << k << " " << y << " " << x;
      }
    }
  }
  EXPECT_EQ(d.truth, flow::FlowField(spec.height, spec.width, 2.0, 0.0));
}

TEST(Synthetic, StaticMotionGivesIdenticalFrames) {
  for (FieldType field : {FieldType::BandlimitedNoise, FieldType::GaussianBlobs}) {
    SyntheticSpec spec;
    spec.field = field;
    spec.frames = 4;
    const SyntheticData d = generate_synthetic(spec);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(d.sequence[k].labels(), d.sequence[0].labels());
    EXPECT_TRUE(d.sequence.is_contiguous());
  }
}

TEST(Synthetic, FrequenciesFollowBreakpoints) {
  const SyntheticData d = generate_synthetic(SyntheticSpec{});
  std::array<std::size_t, 4> counts{};
  for (std::uint8_t v : d.sequence[0].labels().values()) ++counts[v];
  const double n = 128.0 * 128.0;
  EXPECT_NEAR(counts[0] / n, 0.279, 1e-3);
  EXPECT_NEAR(counts[1] / n, 0.608 - 0.279, 1e-3);
  EXPECT_NEAR(counts[2] / n, 0.721 - 0.608, 1e-3);
}

TEST(Synthetic, SeedDeterminism) {
  SyntheticSpec spec;
  spec.frames = 3;
  spec.motion = Rotation{64.0, 64.0, 0.01};
  const auto a = encode_sequence(generate_synthetic(spec).sequence);
  const auto b = encode_sequence(generate_synthetic(spec).sequence);
  EXPECT_EQ(a.array, b.array);
  spec.seed = 1;
  EXPECT_NE(encode_sequence(generate_synthetic(spec).sequence).array, a.array);
}

TEST(Synthetic, RotationFieldIsRigid) {
  const flow::FlowField f = motion_field(Rotation{10.0, 10.0, 0.05}, 21, 21);
  EXPECT_DOUBLE_EQ(f.u(10, 10), 0.0);
  EXPECT_DOUBLE_EQ(f.v(10, 10), 0.0);
  EXPECT_NEAR(f.v(10, 20), 10.0 * std::sin(0.05), 1e-12);
}

TEST(Synthetic, DisplacementBound) {
  SyntheticSpec spec;
  spec.motion = Translation{16.0, 0.0};
  EXPECT_THROW(spec.validate(), ValidationError);
  spec.motion = Translation{15.9, 0.0};
  EXPECT_NO_THROW(spec.validate());
}

TEST(Synthetic, ParseMotionAndJson) {
  const Motion m = parse_motion("translation:2,-0.5");
  ASSERT_TRUE(std::holds_alternative<Translation>(m));
  EXPECT_EQ(std::get<Translation>(m).vy, -0.5);
  EXPECT_TRUE(std::holds_alternative<Rotation>(parse_motion("rotation:64,64,0.01")));
  EXPECT_THROW(parse_motion("translation:2"), ValidationError);
  EXPECT_THROW(parse_motion("shear:1,2"), ValidationError);
  EXPECT_THROW(parse_motion("translation:a,b"), ValidationError);

  SyntheticSpec spec;
  spec.seed = 42;
  spec.motion = Rotation{1.0, 2.0, 0.003};
  const nlohmann::json j = spec;
  const SyntheticSpec back = j.get<SyntheticSpec>();
  EXPECT_EQ(nlohmann::json(back), j);
}

}  // namespace
}  // namespace cloudcast
