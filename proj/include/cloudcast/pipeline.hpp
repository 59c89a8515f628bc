// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_PIPELINE_HPP
#define CLOUDCAST_PIPELINE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "cloudcast/grids.hpp"

namespace cloudcast::pipeline {

/// Holes of this many frames or more (6 hours) are left unrepaired.
inline constexpr std::size_t kMaxRepairableGap = 24;

struct GapRun {
  Timestamp start;  // first missing slot
  Timestamp end;    // last missing slot
  std::size_t frames = 0;
  bool repaired = false;

  friend bool operator==(const GapRun&, const GapRun&) = default;
};

struct GapReport {
  std::vector<GapRun> runs;
};

/// Fills short holes by nearest-in-time copy: the k-th of n missing frames sits
/// at alpha = k/(n+1) between its neighbours and takes the earlier frame when
/// alpha <= 0.5, otherwise the later one.
inline std::pair<LabelSequence, GapReport> repair_gaps(const LabelSequence& seq) {
  detail::require(seq.size() >= 2, "gap repair needs at least two frames");
  GapReport report;
  std::vector<LabelGrid> out;
  out.reserve(seq.size());
  out.push_back(seq[0]);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const LabelGrid& before = seq[i - 1];
    const LabelGrid& after = seq[i];
    const auto step = after.timestamp() - before.timestamp();
    detail::require(step % kCadence == std::chrono::seconds{0},
                    "frames " + std::to_string(i - 1) + " and " + std::to_string(i) +
                        " are not a whole number of 15-minute steps apart");
    const auto missing = static_cast<std::size_t>(step / kCadence) - 1;
    if (missing > 0) {
      GapRun run{before.timestamp() + kCadence,
                 after.timestamp() - kCadence, missing, missing < kMaxRepairableGap};
      if (run.repaired) {
        for (std::size_t k = 1; k <= missing; ++k) {
          // alpha <= 0.5  <=>  2k <= n + 1
          const LabelGrid& source = 2 * k <= missing + 1 ? before : after;
          out.push_back(source.with_timestamp(before.timestamp() +
                                              kCadence * static_cast<long>(k)));
        }
      }
      report.runs.push_back(run);
    }
    out.push_back(after);
  }
  return {LabelSequence(std::move(out)), std::move(report)};
}

struct SplitSpec {
  double train_fraction = 0.75;
};

struct SplitResult {
  LabelSequence train;
  LabelSequence test;
  Timestamp boundary;  // timestamp of the first test frame
};

/// Single temporal cut: the first floor(fraction * T) frames train, the rest test.
inline SplitResult split(const LabelSequence& seq, const SplitSpec& spec) {
  detail::require(spec.train_fraction > 0.0 && spec.train_fraction < 1.0,
                  "train fraction must lie strictly between 0 and 1");
  const auto n_train = static_cast<std::size_t>(
      std::floor(spec.train_fraction * static_cast<double>(seq.size()) + 1e-9));
  detail::require(n_train > 0 && n_train < seq.size(),
                  "split of " + std::to_string(seq.size()) + " frames at fraction " +
                      std::to_string(spec.train_fraction) + " leaves one side empty");
  const auto cut = seq.frames().begin() + static_cast<std::ptrdiff_t>(n_train);
  return {LabelSequence({seq.frames().begin(), cut}), LabelSequence({cut, seq.frames().end()}),
          seq[n_train].timestamp()};
}

/// Modal class of each factor×factor block; ties go to the smaller class code.
inline LabelGrid downsample_majority(const LabelGrid& grid, std::size_t factor) {
  detail::require(factor >= 1, "downsampling factor must be at least 1");
  detail::require(grid.height() % factor == 0 && grid.width() % factor == 0,
                  "grid " + std::to_string(grid.height()) + "x" + std::to_string(grid.width()) +
                      " is not divisible by factor " + std::to_string(factor));
  if (factor == 1) return grid;
  const std::size_t oh = grid.height() / factor, ow = grid.width() / factor;
  LabelPlane out(oh, ow);
  std::array<std::size_t, 256> counts{};
  for (std::size_t by = 0; by < oh; ++by) {
    for (std::size_t bx = 0; bx < ow; ++bx) {
      counts.fill(0);
      for (std::size_t y = by * factor; y < (by + 1) * factor; ++y) {
        for (std::size_t x = bx * factor; x < (bx + 1) * factor; ++x) ++counts[grid(y, x)];
      }
      std::uint8_t best = 0;
      for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = static_cast<std::uint8_t>(c);
      }
      out(by, bx) = best;
    }
  }
  return LabelGrid(std::move(out), grid.taxonomy(), grid.timestamp());
}

inline LabelSequence downsample_majority(const LabelSequence& seq, std::size_t factor) {
  std::vector<LabelGrid> frames;
  frames.reserve(seq.size());
  for (const LabelGrid& g : seq) frames.push_back(downsample_majority(g, factor));
  return LabelSequence(std::move(frames));
}

/// Centred window with offsets floor((in - out) / 2).
inline LabelGrid crop_center(const LabelGrid& grid, std::size_t out_h, std::size_t out_w) {
  detail::require(out_h >= 1 && out_w >= 1, "crop size must be positive");
  detail::require(out_h <= grid.height() && out_w <= grid.width(),
                  "crop " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                      " exceeds grid " + std::to_string(grid.height()) + "x" +
                      std::to_string(grid.width()));
  const std::size_t oy = (grid.height() - out_h) / 2;
  const std::size_t ox = (grid.width() - out_w) / 2;
  LabelPlane out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) out(y, x) = grid(oy + y, ox + x);
  }
  return LabelGrid(std::move(out), grid.taxonomy(), grid.timestamp());
}

inline LabelSequence crop_center(const LabelSequence& seq, std::size_t out_h, std::size_t out_w) {
  std::vector<LabelGrid> frames;
  frames.reserve(seq.size());
  for (const LabelGrid& g : seq) frames.push_back(crop_center(g, out_h, out_w));
  return LabelSequence(std::move(frames));
}

}  // namespace cloudcast::pipeline

#endif  // CLOUDCAST_PIPELINE_HPP
