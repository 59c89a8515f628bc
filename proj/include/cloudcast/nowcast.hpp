// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_NOWCAST_HPP
#define CLOUDCAST_NOWCAST_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "cloudcast/flow.hpp"
#include "cloudcast/grids.hpp"

namespace cloudcast::nowcast {

/// Forecast horizon: four hours in 15-minute steps.
inline constexpr std::size_t kHorizon = 16;
inline constexpr std::size_t kReducedClasses = 4;

/// Reduced class code -> intensity code/3, optionally Gaussian-smoothed.
inline RealPlane to_intensity(const LabelGrid& grid, double sigma = 0.0) {
  detail::require(grid.taxonomy() == Taxonomy::Reduced4,
                  "intensity mapping needs a reduced (4-class) grid");
  RealPlane out = map_plane(grid.labels(), [](std::uint8_t v) { return v / 3.0; });
  return gaussian_blur(out, sigma);
}

/// Nearest class code for each intensity, clamped to 0..3.
inline LabelPlane round_to_class(const RealPlane& intensity) {
  return map_plane(intensity, [](double v) {
    const double code = std::clamp(std::nearbyint(v * 3.0), 0.0, 3.0);
    return static_cast<std::uint8_t>(code);
  });
}

/// Predicted frames for one origin time, optionally with class probabilities
/// laid out step-major as [step][class][row][col].
struct ForecastSet {
  Timestamp origin;
  std::vector<LabelGrid> frames;
  std::optional<std::vector<double>> probabilities;

  [[nodiscard]] std::size_t steps() const noexcept { return frames.size(); }
};

/// Degenerate probabilities: 1 for the predicted class, 0 elsewhere.
inline std::vector<double> one_hot(const std::vector<LabelGrid>& frames, std::size_t classes) {
  if (frames.empty()) return {};
  const std::size_t n = frames[0].height() * frames[0].width();
  std::vector<double> out(frames.size() * classes * n, 0.0);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto labels = frames[t].labels().values();
    for (std::size_t i = 0; i < n; ++i) out[(t * classes + labels[i]) * n + i] = 1.0;
  }
  return out;
}

/// Last observation replicated over the horizon.
inline ForecastSet persistence_forecast(const LabelGrid& last, std::size_t steps = kHorizon) {
  detail::require(steps >= 1, "forecast needs at least one step");
  ForecastSet out{last.timestamp(), {}, std::nullopt};
  out.frames.reserve(steps);
  for (std::size_t k = 1; k <= steps; ++k) {
    out.frames.push_back(last.with_timestamp(last.timestamp() + kCadence * static_cast<long>(k)));
  }
  out.probabilities = one_hot(out.frames, cardinality(last.taxonomy()));
  return out;
}

/// Repeatedly advects `last` with a flow field, re-quantising after each step.
inline ForecastSet extrapolate(const LabelGrid& last, const flow::FlowField& motion,
                               std::size_t steps = kHorizon) {
  detail::require(steps >= 1, "forecast needs at least one step");
  ForecastSet out{last.timestamp(), {}, std::nullopt};
  out.frames.reserve(steps);
  RealPlane current = to_intensity(last);
  for (std::size_t k = 1; k <= steps; ++k) {
    LabelPlane labels = round_to_class(flow::warp(current, motion));
    current = map_plane(labels, [](std::uint8_t v) { return v / 3.0; });
    out.frames.emplace_back(std::move(labels), Taxonomy::Reduced4,
                            last.timestamp() + kCadence * static_cast<long>(k));
  }
  out.probabilities = one_hot(out.frames, kReducedClasses);
  return out;
}

/// Optical-flow nowcast. The flow is estimated in reversed time order (last
/// frame onto the previous one), which makes it directly usable as a
/// backward-warp displacement, and held fixed over the horizon.
inline ForecastSet invert_and_extrapolate(const LabelGrid& last, const LabelGrid& previous,
                                          const flow::TvL1Params& params,
                                          std::size_t steps = kHorizon, double sigma = 0.0) {
  detail::require(last.taxonomy() == Taxonomy::Reduced4 &&
                      previous.taxonomy() == Taxonomy::Reduced4,
                  "optical-flow forecasting works on reduced (4-class) grids");
  detail::require(last.labels().same_shape(previous.labels()),
                  "input frames differ in size");
  detail::require(previous.timestamp() + kCadence == last.timestamp(),
                  "input frames must be consecutive (15 minutes apart)");
  const flow::FlowField motion =
      flow::estimate_flow(to_intensity(last, sigma), to_intensity(previous, sigma), params);
  return extrapolate(last, motion, steps);
}

}  // namespace cloudcast::nowcast

#endif  // CLOUDCAST_NOWCAST_HPP
