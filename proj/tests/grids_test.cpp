// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "cloudcast/io.hpp"
#include "test_util.hpp"

namespace cloudcast {
namespace {

using testing::grid;
using testing::ts;

TEST(Timestamp, ParseFormatRoundTrip) {
  const Timestamp t = ts("2017-10-17T11:30:00Z");
  EXPECT_EQ(format_timestamp(t), "2017-10-17T11:30:00Z");
  EXPECT_EQ(compact_timestamp(t), "20171017T1130Z");
  EXPECT_TRUE(is_cadence_aligned(t));
  EXPECT_FALSE(is_cadence_aligned(t + std::chrono::minutes{5}));
}

TEST(Timestamp, RejectsMalformed) {
  EXPECT_THROW(parse_timestamp("2017-04-01 13:00:00"), ValidationError);
  EXPECT_THROW(parse_timestamp("2017-04-01T13:00:00"), ValidationError);
  EXPECT_THROW(parse_timestamp("2017-02-30T13:00:00Z"), ValidationError);
  EXPECT_THROW(parse_timestamp("2017-04-01T25:00:00Z"), ValidationError);
}

TEST(LabelGrid, EnforcesInvariants) {
  EXPECT_NO_THROW(grid(1, 1, {10}, Taxonomy::Full11));
  EXPECT_THROW(grid(1, 1, {11}, Taxonomy::Full11), ValidationError);
  EXPECT_THROW(grid(1, 1, {4}, Taxonomy::Reduced4), ValidationError);
  EXPECT_THROW(LabelGrid(LabelPlane(0, 3), Taxonomy::Reduced4, ts("2017-04-01T13:00:00Z")),
               ValidationError);
  EXPECT_THROW(grid(1, 1, {0}, Taxonomy::Reduced4, ts("2017-04-01T13:07:00Z")), ValidationError);
}

TEST(LabelSequence, RequiresSharedShapeTaxonomyAndIncreasingTime) {
  const LabelGrid a = grid(1, 2, {0, 1}, Taxonomy::Reduced4, ts("2017-04-01T13:00:00Z"));
  const LabelGrid b = grid(1, 2, {1, 1}, Taxonomy::Reduced4, ts("2017-04-01T13:15:00Z"));
  EXPECT_NO_THROW(LabelSequence({a, b}));
  EXPECT_THROW(LabelSequence({b, a}), ValidationError);
  EXPECT_THROW(LabelSequence({a, a}), ValidationError);
  EXPECT_THROW(LabelSequence({a, grid(2, 1, {0, 1}, Taxonomy::Reduced4, ts("2017-04-01T13:15:00Z"))}),
               ValidationError);
  EXPECT_THROW(LabelSequence({a, grid(1, 2, {0, 1}, Taxonomy::Full11, ts("2017-04-01T13:15:00Z"))}),
               ValidationError);

  const LabelSequence gap({a, grid(1, 2, {0, 0}, Taxonomy::Reduced4, ts("2017-04-01T14:00:00Z"))});
  EXPECT_FALSE(gap.is_contiguous());
  EXPECT_EQ(gap.find(ts("2017-04-01T14:00:00Z")), 1u);
  EXPECT_FALSE(gap.find(ts("2017-04-01T13:30:00Z")).has_value());
}

TEST(GeoContext, DerivesIlluminationFromSolarZenith) {
  RealPlane sza(1, 4, std::vector<double>{10.0, 79.9, 85.0, 120.0});
  const GeoContext geo(sza, RealPlane(1, 4, 30.0));
  EXPECT_EQ(geo.regime()[0], Illumination::Day);
  EXPECT_EQ(geo.regime()[1], Illumination::Day);
  EXPECT_EQ(geo.regime()[2], Illumination::Twilight);
  EXPECT_EQ(geo.regime()[3], Illumination::Night);
  EXPECT_THROW(GeoContext(RealPlane(1, 1, 190.0), RealPlane(1, 1, 0.0)), ValidationError);
}

TEST(ChannelStack, ValidatesRanges) {
  ChannelStack s;
  s.bt108 = RealPlane(2, 2, 260.0);
  EXPECT_NO_THROW(s.validate());
  s.refl06 = RealPlane(2, 2, 1.2);
  EXPECT_THROW(s.validate(), ValidationError);
  s.refl06 = RealPlane(2, 2, 0.5);
  s.bt120 = RealPlane(2, 2, 400.0);
  EXPECT_THROW(s.validate(), ValidationError);
  s.bt120 = RealPlane(3, 2, 250.0);
  EXPECT_THROW(s.validate(), ValidationError);
}

// ---------------------------------------------------------------------------
// sequence interchange

TEST(SequenceIo, SaveCreatesFilesInEmptyDirectory) {
  testing::TempDir dir("io_create");
  const LabelSequence seq({grid(2, 2, {0, 1, 2, 3})});
  save_sequence(seq, dir / "a.npy", dir / "a.json");
  EXPECT_TRUE(std::filesystem::exists(dir / "a.npy"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a.json"));
}

TEST(SequenceIo, PayloadIsRowMajorBytes) {
  // Hand-encoded: a 1x2x2 u1 array holds exactly the four label bytes after
  // the header, in row-major order.
  const LabelSequence seq({grid(2, 2, {0, 1, 2, 3})});
  const EncodedSequence enc = encode_sequence(seq);
  ASSERT_GE(enc.array.size(), 4u);
  const std::vector<unsigned char> tail(enc.array.end() - 4, enc.array.end());
  EXPECT_EQ(tail, (std::vector<unsigned char>{0x00, 0x01, 0x02, 0x03}));
  EXPECT_EQ((enc.array.size() - 4) % 64, 0u);
}

TEST(SequenceIo, SmallestInstance) {
  testing::TempDir dir("io_small");
  const std::array<std::size_t, 3> shape{1, 1, 1};
  const std::vector<std::uint8_t> value{10};
  npy::write<std::uint8_t>(dir / "x.npy", shape, value);
  write_text(dir / "x.json", R"({"timestamps": ["2017-04-01T13:00:00Z"]})");
  const LabelSequence seq = load_sequence(dir / "x.npy", dir / "x.json");
  ASSERT_EQ(seq.size(), 1u);
  EXPECT_EQ(seq[0](0, 0), 10);
  EXPECT_EQ(seq.taxonomy(), Taxonomy::Full11);
}

TEST(SequenceIo, TaxonomyInferredOrDeclared) {
  testing::TempDir dir("io_tax");
  const std::array<std::size_t, 3> shape{1, 1, 2};
  const std::vector<std::uint8_t> low{0, 3};
  npy::write<std::uint8_t>(dir / "x.npy", shape, low);
  write_text(dir / "x.json", R"({"timestamps": ["2017-04-01T13:00:00Z"]})");
  EXPECT_EQ(load_sequence(dir / "x.npy", dir / "x.json").taxonomy(), Taxonomy::Reduced4);
  EXPECT_EQ(load_sequence(dir / "x.npy", dir / "x.json", Taxonomy::Full11).taxonomy(),
            Taxonomy::Full11);
  write_text(dir / "y.json",
             R"({"timestamps": ["2017-04-01T13:00:00Z"], "taxonomy": "full11"})");
  EXPECT_EQ(load_sequence(dir / "x.npy", dir / "y.json").taxonomy(), Taxonomy::Full11);
}

TEST(SequenceIo, Errors) {
  testing::TempDir dir("io_err");
  const std::array<std::size_t, 3> shape{2, 1, 1};
  const std::vector<std::uint8_t> ok{0, 1};
  npy::write<std::uint8_t>(dir / "x.npy", shape, ok);
  write_text(dir / "one.json", R"({"timestamps": ["2017-04-01T13:00:00Z"]})");
  EXPECT_THROW(load_sequence(dir / "x.npy", dir / "one.json"), ValidationError);

  const std::vector<std::uint8_t> bad{0, 11};
  npy::write<std::uint8_t>(dir / "bad.npy", shape, bad);
  write_text(dir / "two.json",
             R"({"timestamps": ["2017-04-01T13:00:00Z", "2017-04-01T13:15:00Z"]})");
  EXPECT_THROW(load_sequence(dir / "bad.npy", dir / "two.json"), ValidationError);

  write_text(dir / "junk.npy", "not numpy at all");
  EXPECT_THROW(load_sequence(dir / "junk.npy", dir / "two.json"), IoError);
  EXPECT_THROW(load_sequence(dir / "missing.npy", dir / "two.json"), IoError);

  const std::array<std::size_t, 2> flat{2, 1};
  npy::write<std::uint8_t>(dir / "flat.npy", flat, ok);
  EXPECT_THROW(load_sequence(dir / "flat.npy", dir / "two.json"), IoError);
}

TEST(SequenceIo, RoundTripProperty) {
  std::mt19937_64 rng(20170401);
  testing::TempDir dir("io_prop");
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t frames = 1 + rng() % 6, h = 1 + rng() % 9, w = 1 + rng() % 9;
    const Taxonomy tax = rng() % 2 ? Taxonomy::Full11 : Taxonomy::Reduced4;
    std::vector<LabelGrid> out;
    Timestamp t = ts("2017-04-01T00:00:00Z");
    for (std::size_t k = 0; k < frames; ++k) {
      t += kCadence * static_cast<long>(1 + rng() % 3);  // holes allowed
      out.push_back(testing::random_grid(rng, h, w, tax, t));
    }
    const LabelSequence seq(std::move(out));
    save_sequence(seq, dir / "s.npy", dir / "s.json");
    const LabelSequence back = load_sequence(dir / "s.npy", dir / "s.json");
    ASSERT_EQ(back, seq) << "trial " << trial;
  }
}

TEST(SequenceIo, SaveOfLoadIsCanonical) {
  std::mt19937_64 rng(7);
  testing::TempDir dir("io_canon");
  const LabelSequence seq = testing::random_sequence(rng, 3, 5, 4, Taxonomy::Full11);
  save_sequence(seq, dir / "a.npy", dir / "a.json");
  const LabelSequence loaded = load_sequence(dir / "a.npy", dir / "a.json");
  save_sequence(loaded, dir / "b.npy", dir / "b.json");
  EXPECT_EQ(read_text(dir / "a.npy"), read_text(dir / "b.npy"));
  EXPECT_EQ(read_text(dir / "a.json"), read_text(dir / "b.json"));
  const EncodedSequence enc = encode_sequence(seq);
  EXPECT_EQ(read_text(dir / "b.json"), enc.sidecar);
}

}  // namespace
}  // namespace cloudcast
