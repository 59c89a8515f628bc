// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <zlib.h>

#include <set>
#include <tuple>

#include "cloudcast/io.hpp"
#include "cloudcast/render.hpp"
#include "test_util.hpp"

namespace cloudcast {
namespace {

struct Decoded {
  std::uint32_t width = 0, height = 0;
  std::vector<Rgb> palette;
  std::vector<unsigned char> indices;
};

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

// Minimal reader for the subset of PNG the renderer writes.
Decoded decode(const std::vector<unsigned char>& png) {
  Decoded out;
  std::vector<unsigned char> idat;
  std::size_t pos = 8;
  while (pos + 12 <= png.size()) {
    const std::uint32_t len = be32(&png[pos]);
    const std::string type(png.begin() + static_cast<long>(pos + 4), png.begin() + static_cast<long>(pos + 8));
    const unsigned char* data = &png[pos + 8];
    const uLong crc = crc32(0L, &png[pos + 4], 4 + len);
    EXPECT_EQ(crc, be32(data + len)) << type;
    if (type == "IHDR") {
      out.width = be32(data);
      out.height = be32(data + 4);
    } else if (type == "PLTE") {
      for (std::uint32_t i = 0; i < len; i += 3) out.palette.push_back({data[i], data[i + 1], data[i + 2]});
    } else if (type == "IDAT") {
      idat.insert(idat.end(), data, data + len);
    }
    pos += 12 + len;
  }
  uLongf raw_len = out.height * (out.width + 1);
  std::vector<unsigned char> raw(raw_len);
  EXPECT_EQ(uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())), Z_OK);
  for (std::uint32_t y = 0; y < out.height; ++y) {
    EXPECT_EQ(raw[y * (out.width + 1)], 0);
    for (std::uint32_t x = 0; x < out.width; ++x) out.indices.push_back(raw[y * (out.width + 1) + 1 + x]);
  }
  return out;
}

std::set<std::tuple<int, int, int>> colours(const Decoded& d) {
  std::set<std::tuple<int, int, int>> out;
  for (unsigned char i : d.indices) out.insert({d.palette[i].r, d.palette[i].g, d.palette[i].b});
  return out;
}

TEST(Render, PalettesAreDistinct) {
  std::set<std::tuple<int, int, int>> full, reduced;
  for (const Rgb& c : kFullPalette) full.insert({c.r, c.g, c.b});
  for (const Rgb& c : kReducedPalette) reduced.insert({c.r, c.g, c.b});
  EXPECT_EQ(full.size(), 11u);
  EXPECT_EQ(reduced.size(), 4u);
}

TEST(Render, AllZeroGridIsOneColour) {
  const Decoded d = decode(encode_png(testing::uniform_grid(5, 7, 0)));
  EXPECT_EQ(d.width, 7u);
  EXPECT_EQ(d.height, 5u);
  EXPECT_EQ(colours(d).size(), 1u);
}

TEST(Render, FourClassesFourColours) {
  const LabelGrid g = testing::grid(2, 2, {0, 1, 2, 3});
  const Decoded d = decode(encode_png(g));
  EXPECT_EQ(colours(d).size(), 4u);
  EXPECT_EQ(d.indices, (std::vector<unsigned char>{0, 1, 2, 3}));
}

TEST(Render, FullTaxonomyUsesElevenEntryPalette) {
  std::vector<std::uint8_t> labels(11);
  for (std::uint8_t i = 0; i < 11; ++i) labels[i] = i;
  const Decoded d = decode(encode_png(testing::grid(1, 11, labels, Taxonomy::Full11)));
  EXPECT_EQ(d.palette.size(), 11u);
  EXPECT_EQ(colours(d).size(), 11u);
}

TEST(Render, Deterministic) {
  std::mt19937_64 rng(3);
  const LabelGrid g = testing::random_grid(rng, 31, 17, Taxonomy::Full11, testing::ts("2017-04-01T00:00:00Z"));
  EXPECT_EQ(encode_png(g), encode_png(g));
  testing::TempDir dir("render");
  render_frame(g, dir / "a.png");
  render_frame(g, dir / "b.png");
  EXPECT_EQ(read_text(dir / "a.png"), read_text(dir / "b.png"));
}

}  // namespace
}  // namespace cloudcast
