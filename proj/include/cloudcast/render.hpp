// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_RENDER_HPP
#define CLOUDCAST_RENDER_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <zlib.h>

#include "cloudcast/grids.hpp"
#include "cloudcast/npy.hpp"

namespace cloudcast {

struct Rgb {
  std::uint8_t r, g, b;
};

/// Palette version 1. Changing a colour means bumping the version.
inline constexpr int kPaletteVersion = 1;

inline constexpr std::array<Rgb, 11> kFullPalette{{
    {0, 0, 0},        // 0 no cloud / missing
    {255, 150, 0},    // 1 very low
    {255, 210, 60},   // 2 low
    {240, 240, 120},  // 3 medium
    {200, 200, 200},  // 4 high opaque
    {255, 255, 255},  // 5 very high opaque
    {150, 90, 40},    // 6 fractional
    {0, 80, 215},     // 7 semitransparent thin
    {0, 150, 255},    // 8 semitransparent moderately thick
    {0, 220, 255},    // 9 semitransparent thick
    {170, 90, 220},   // 10 semitransparent above low/medium
}};

inline constexpr std::array<Rgb, 4> kReducedPalette{{
    {0, 0, 0},        // no cloud
    {255, 180, 30},   // low
    {240, 240, 120},  // medium
    {235, 235, 235},  // high
}};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

inline void put_chunk(std::vector<unsigned char>& out, const char (&type)[5],
                      const std::vector<unsigned char>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(4 + data.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

/// Encodes a class map as an 8-bit indexed-colour PNG.
inline std::vector<unsigned char> encode_png(const LabelGrid& grid) {
  std::vector<unsigned char> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

  std::vector<unsigned char> ihdr;
  detail::put_u32(ihdr, static_cast<std::uint32_t>(grid.width()));
  detail::put_u32(ihdr, static_cast<std::uint32_t>(grid.height()));
  ihdr.insert(ihdr.end(), {8, 3, 0, 0, 0});  // depth 8, indexed, deflate, adaptive, no interlace
  detail::put_chunk(out, "IHDR", ihdr);

  std::vector<unsigned char> plte;
  auto add = [&](const auto& palette) {
    for (const Rgb& c : palette) plte.insert(plte.end(), {c.r, c.g, c.b});
  };
  if (grid.taxonomy() == Taxonomy::Full11) {
    add(kFullPalette);
  } else {
    add(kReducedPalette);
  }
  detail::put_chunk(out, "PLTE", plte);

  std::vector<unsigned char> raw;
  raw.reserve(grid.height() * (grid.width() + 1));
  for (std::size_t y = 0; y < grid.height(); ++y) {
    raw.push_back(0);  // filter: none
    for (std::size_t x = 0; x < grid.width(); ++x) raw.push_back(grid(y, x));
  }
  uLongf packed_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> idat(packed_len);
  if (compress2(idat.data(), &packed_len, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK) {
    throw IoError("zlib compression failed");
  }
  idat.resize(packed_len);
  detail::put_chunk(out, "IDAT", idat);
  detail::put_chunk(out, "IEND", {});
  return out;
}

inline void render_frame(const LabelGrid& grid, const std::filesystem::path& path) {
  npy::write_bytes(path, encode_png(grid));
}

}  // namespace cloudcast

#endif  // CLOUDCAST_RENDER_HPP
