// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_SEGMENTATION_HPP
#define CLOUDCAST_SEGMENTATION_HPP

// Per-pixel cloud typing from brightness temperatures and NWP air temperatures.
//
// Cloudy pixels are first tested for semitransparency (split-window and
// 8.7-10.8 brightness temperature differences, plus a daytime reflectance
// test). What remains opaque is binned by the 10.8 um brightness temperature
// against four height thresholds derived from the NWP profile.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloudcast/grids.hpp"

namespace cloudcast::segmentation {

/// NWP air temperatures (K) on the satellite grid.
struct NwpFields {
  RealPlane t_surface;
  RealPlane t950;
  RealPlane t850;
  RealPlane t700;
  RealPlane t500;
  RealPlane t_tropopause;
  std::optional<RealPlane> total_column_water_vapour;  // kg/m^2, carried only

  [[nodiscard]] std::size_t height() const noexcept { return t500.height(); }
  [[nodiscard]] std::size_t width() const noexcept { return t500.width(); }

  void validate() const {
    const RealPlane* planes[] = {&t_surface, &t950, &t850, &t700, &t500, &t_tropopause};
    for (const RealPlane* p : planes) {
      detail::require(p->same_shape(t500), "NWP planes have mismatched dimensions");
      for (double v : p->values()) {
        detail::require(v >= 150.0 && v <= 350.0,
                        "NWP temperature " + std::to_string(v) + " K outside [150, 350]");
      }
    }
    if (total_column_water_vapour) {
      detail::require(total_column_water_vapour->same_shape(t500),
                      "water vapour plane has mismatched dimensions");
    }
  }

  static NwpFields uniform(std::size_t h, std::size_t w, double t_sfc, double t950, double t850,
                           double t700, double t500, double t_tropo) {
    return {RealPlane(h, w, t_sfc), RealPlane(h, w, t950), RealPlane(h, w, t850),
            RealPlane(h, w, t700),  RealPlane(h, w, t500), RealPlane(h, w, t_tropo),
            std::nullopt};
  }
};

/// Height thresholds at one pixel, in kelvin. After canonicalisation
/// vh <= hi <= me <= lo holds and `inverted` records whether sorting was needed.
struct HeightThresholds {
  double vh = 0.0;
  double hi = 0.0;
  double me = 0.0;
  double lo = 0.0;
  bool inverted = false;

  friend bool operator==(const HeightThresholds&, const HeightThresholds&) = default;
};

/// The four thresholds exactly as the regression formulas give them.
constexpr HeightThresholds raw_height_thresholds(double t500, double t700, double t850,
                                                 double t_tropo) noexcept {
  return {0.4 * t500 + 0.6 * t_tropo - 5.0,
          0.5 * t500 - 0.2 * t700 + 178.0,
          0.8 * t850 + 0.2 * t700 - 8.0,
          1.2 * t850 - 0.2 * t700 - 5.0,
          false};
}

/// Sorts a threshold tuple ascending; flags the pixel when the order changed
/// (typically under a low-level temperature inversion).
inline HeightThresholds canonicalize(const HeightThresholds& t) noexcept {
  std::array<double, 4> v{t.vh, t.hi, t.me, t.lo};
  const bool ordered = std::is_sorted(v.begin(), v.end());
  if (!ordered) std::sort(v.begin(), v.end());
  return {v[0], v[1], v[2], v[3], t.inverted || !ordered};
}

inline HeightThresholds height_thresholds(double t500, double t700, double t850,
                                          double t_tropo) noexcept {
  return canonicalize(raw_height_thresholds(t500, t700, t850, t_tropo));
}

/// Per-pixel thresholds over a whole scene.
struct HeightThresholdField {
  RealPlane vh, hi, me, lo;
  Plane<std::uint8_t> inverted;

  [[nodiscard]] HeightThresholds at(std::size_t i) const noexcept {
    return {vh[i], hi[i], me[i], lo[i], inverted[i] != 0};
  }
};

inline HeightThresholdField compute_height_thresholds(const NwpFields& nwp) {
  nwp.validate();
  const std::size_t h = nwp.height(), w = nwp.width();
  HeightThresholdField out{RealPlane(h, w), RealPlane(h, w), RealPlane(h, w), RealPlane(h, w),
                           Plane<std::uint8_t>(h, w)};
  for (std::size_t i = 0; i < h * w; ++i) {
    const HeightThresholds t =
        height_thresholds(nwp.t500[i], nwp.t700[i], nwp.t850[i], nwp.t_tropopause[i]);
    out.vh[i] = t.vh;
    out.hi[i] = t.hi;
    out.me[i] = t.me;
    out.lo[i] = t.lo;
    out.inverted[i] = t.inverted ? 1 : 0;
  }
  return out;
}

enum class HeightClass : std::uint8_t { VeryLow, Low, Medium, High, VeryHigh };

/// Bins a 10.8 um brightness temperature. Intervals are half-open and closed on
/// the lower temperature bound: exactly one class for any finite input.
constexpr HeightClass classify_height(double t108, const HeightThresholds& thr) noexcept {
  if (t108 < thr.vh) return HeightClass::VeryHigh;
  if (t108 < thr.hi) return HeightClass::High;
  if (t108 < thr.me) return HeightClass::Medium;
  if (t108 < thr.lo) return HeightClass::Low;
  return HeightClass::VeryLow;
}

enum class Opacity : std::uint8_t {
  Opaque,
  Fractional,
  SemiThin,
  SemiModerate,
  SemiThick,
  SemiAboveLow,
};

/// Semitransparency thresholds. None of these are published constants; the
/// defaults are tuning starting points and every field can be overridden.
struct OpacityConfig {
  double btd_87_108_min = 1.0;
  double btd_108_120_min = 1.5;
  double day_reflectance_max = 0.4;
  double fractional_btd_margin = 0.5;
  // Upper BTD(10.8-12.0) edge of the thin and moderate bins; values at or
  // above the moderate edge are thick, and the thick edge caps the scale.
  std::array<double, 3> subtype_breakpoints{1.5, 3.5, 6.0};
  double secant_coefficient = 2.0;
  // Minimum 10.8 - corrected 7.3 um difference revealing a warm layer below.
  double wv_btd_min = 10.0;

  void validate() const {
    detail::require(subtype_breakpoints[0] < subtype_breakpoints[1] &&
                        subtype_breakpoints[1] < subtype_breakpoints[2],
                    "subtype_breakpoints must be strictly increasing");
    detail::require(btd_87_108_min >= 0.0 && btd_108_120_min >= 0.0 &&
                        day_reflectance_max >= 0.0 && fractional_btd_margin >= 0.0 &&
                        secant_coefficient >= 0.0 && wv_btd_min >= 0.0,
                    "opacity thresholds and margins must be non-negative");
  }

  friend bool operator==(const OpacityConfig&, const OpacityConfig&) = default;
};

inline void to_json(nlohmann::json& j, const OpacityConfig& c) {
  j = nlohmann::json{{"btd_87_108_min", c.btd_87_108_min},
                     {"btd_108_120_min", c.btd_108_120_min},
                     {"day_reflectance_max", c.day_reflectance_max},
                     {"fractional_btd_margin", c.fractional_btd_margin},
                     {"subtype_breakpoints", c.subtype_breakpoints},
                     {"secant_coefficient", c.secant_coefficient},
                     {"wv_btd_min", c.wv_btd_min}};
}

/// Missing keys keep their current value; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, OpacityConfig& c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "btd_87_108_min") c.btd_87_108_min = value.get<double>();
    else if (key == "btd_108_120_min") c.btd_108_120_min = value.get<double>();
    else if (key == "day_reflectance_max") c.day_reflectance_max = value.get<double>();
    else if (key == "fractional_btd_margin") c.fractional_btd_margin = value.get<double>();
    else if (key == "subtype_breakpoints") c.subtype_breakpoints = value.get<std::array<double, 3>>();
    else if (key == "secant_coefficient") c.secant_coefficient = value.get<double>();
    else if (key == "wv_btd_min") c.wv_btd_min = value.get<double>();
    else throw ValidationError("unknown opacity config field '" + key + "'");
  }
  c.validate();
}

/// Everything the opacity test looks at for one pixel. A channel is nullopt
/// when unavailable at that pixel.
struct PixelObservation {
  std::optional<double> bt073, bt087, bt108, bt120, refl06;
  double satellite_zenith = 0.0;
  Illumination regime = Illumination::Night;
};

inline PixelObservation observe(const ChannelStack& stack, const GeoContext& geo, std::size_t i) {
  auto pick = [i](const std::optional<RealPlane>& p) -> std::optional<double> {
    if (!p || std::isnan((*p)[i])) return std::nullopt;
    return (*p)[i];
  };
  return {pick(stack.bt073), pick(stack.bt087), pick(stack.bt108), pick(stack.bt120),
          pick(stack.refl06), geo.satellite_zenith()[i], geo.regime()[i]};
}

/// Opacity of a cloudy pixel, or nullopt when a channel the illumination
/// regime needs is missing. Twilight follows the night rules.
inline std::optional<Opacity> classify_opacity(const PixelObservation& px,
                                               const HeightThresholds& thr,
                                               const OpacityConfig& cfg) {
  if (!px.bt087 || !px.bt108 || !px.bt120) return std::nullopt;
  const bool day = px.regime == Illumination::Day;
  if (day && !px.refl06) return std::nullopt;

  const double btd_87_108 = *px.bt087 - *px.bt108;
  const double btd_108_120 = *px.bt108 - *px.bt120;

  bool semi = btd_87_108 >= cfg.btd_87_108_min || btd_108_120 >= cfg.btd_108_120_min;
  if (day && !semi) {
    const bool cold = *px.bt108 < thr.hi;
    semi = cold && *px.refl06 < cfg.day_reflectance_max;
  }

  if (semi) {
    if (px.bt073) {
      const double cos_vza = std::max(std::cos(px.satellite_zenith * std::numbers::pi / 180.0), 0.1);
      const double secant = 1.0 / cos_vza;
      const double wv = *px.bt073 + cfg.secant_coefficient * (secant - 1.0);
      if (*px.bt108 - wv >= cfg.wv_btd_min) return Opacity::SemiAboveLow;
    }
    if (btd_108_120 < cfg.subtype_breakpoints[0]) return Opacity::SemiThin;
    if (btd_108_120 < cfg.subtype_breakpoints[1]) return Opacity::SemiModerate;
    return Opacity::SemiThick;
  }

  const double margin = cfg.fractional_btd_margin;
  if (margin > 0.0 && (btd_87_108 >= cfg.btd_87_108_min - margin ||
                       btd_108_120 >= cfg.btd_108_120_min - margin)) {
    return Opacity::Fractional;
  }
  return Opacity::Opaque;
}

inline std::optional<Opacity> classify_opacity(const ChannelStack& stack, const GeoContext& geo,
                                               const OpacityConfig& cfg,
                                               const HeightThresholds& thr, std::size_t y,
                                               std::size_t x) {
  return classify_opacity(observe(stack, geo, y * geo.regime().width() + x), thr, cfg);
}

/// Full-taxonomy class code of an opaque cloud at the given height.
constexpr std::uint8_t opaque_class(HeightClass h) noexcept {
  switch (h) {
    case HeightClass::VeryLow:
      return 1;
    case HeightClass::Low:
      return 2;
    case HeightClass::Medium:
      return 3;
    case HeightClass::High:
      return 4;
    case HeightClass::VeryHigh:
      return 5;
  }
  return 0;
}

/// Class code for one cloudy pixel; 0 when it cannot be classified.
inline std::uint8_t classify_pixel(const PixelObservation& px, const HeightThresholds& thr,
                                   const OpacityConfig& cfg) {
  const std::optional<Opacity> op = classify_opacity(px, thr, cfg);
  if (!op) return 0;
  switch (*op) {
    case Opacity::Opaque:
      return opaque_class(classify_height(*px.bt108, thr));
    case Opacity::Fractional:
      return 6;
    case Opacity::SemiThin:
      return 7;
    case Opacity::SemiModerate:
      return 8;
    case Opacity::SemiThick:
      return 9;
    case Opacity::SemiAboveLow:
      return 10;
  }
  return 0;
}

/// Labels one scene. `cloud_mask` is non-zero where a cloud was detected.
inline LabelGrid segment_frame(const ChannelStack& stack, const NwpFields& nwp,
                               const GeoContext& geo, const OpacityConfig& cfg,
                               const LabelPlane& cloud_mask, Timestamp timestamp) {
  stack.validate();
  cfg.validate();
  const auto dims = *stack.shape();
  const std::size_t h = dims.first, w = dims.second;
  detail::require(nwp.t500.same_shape(h, w), "NWP fields do not match the channel grid");
  detail::require(geo.regime().same_shape(h, w), "geometry does not match the channel grid");
  detail::require(cloud_mask.same_shape(h, w), "cloud mask does not match the channel grid");

  const HeightThresholdField thresholds = compute_height_thresholds(nwp);
  LabelPlane labels(h, w, 0);
  for (std::size_t i = 0; i < h * w; ++i) {
    if (cloud_mask[i] == 0) continue;
    labels[i] = classify_pixel(observe(stack, geo, i), thresholds.at(i), cfg);
  }
  return LabelGrid(std::move(labels), Taxonomy::Full11, timestamp);
}

/// Height grouping of the full taxonomy: low {1,2,6}, medium {3},
/// high {4,5,7,8,9,10}.
inline constexpr std::array<std::uint8_t, 11> kReductionTable{0, 1, 1, 2, 3, 3, 1, 3, 3, 3, 3};

inline LabelGrid reduce_to_four(const LabelGrid& grid) {
  if (grid.taxonomy() == Taxonomy::Reduced4) return grid;
  LabelPlane out = map_plane(grid.labels(), [](std::uint8_t v) { return kReductionTable[v]; });
  return LabelGrid(std::move(out), Taxonomy::Reduced4, grid.timestamp());
}

inline LabelSequence reduce_to_four(const LabelSequence& seq) {
  std::vector<LabelGrid> frames;
  frames.reserve(seq.size());
  for (const LabelGrid& g : seq) frames.push_back(reduce_to_four(g));
  return LabelSequence(std::move(frames));
}

}  // namespace cloudcast::segmentation

#endif  // CLOUDCAST_SEGMENTATION_HPP
