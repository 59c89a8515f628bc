// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_GRIDS_HPP
#define CLOUDCAST_GRIDS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

#include "cloudcast/error.hpp"
#include "cloudcast/raster.hpp"
#include "cloudcast/timestamp.hpp"

namespace cloudcast {

/// Class-code alphabet of a label raster.
///
/// Full11 codes: 0 no cloud / missing, 1 very low, 2 low, 3 medium, 4 high opaque,
/// 5 very high opaque, 6 fractional, 7 high semitransparent thin, 8 moderately
/// thick, 9 thick, 10 semitransparent above low or medium cloud.
/// Reduced4 codes: 0 no cloud, 1 low, 2 medium, 3 high.
enum class Taxonomy : std::uint8_t { Full11, Reduced4 };

constexpr std::uint8_t cardinality(Taxonomy t) noexcept {
  return t == Taxonomy::Full11 ? 11 : 4;
}

inline std::string_view to_string(Taxonomy t) noexcept {
  return t == Taxonomy::Full11 ? "full11" : "reduced4";
}

inline Taxonomy taxonomy_from_string(std::string_view s) {
  if (s == "full11") return Taxonomy::Full11;
  if (s == "reduced4") return Taxonomy::Reduced4;
  throw ValidationError("unknown taxonomy '" + std::string(s) + "'");
}

using LabelPlane = Plane<std::uint8_t>;

/// One time-stamped cloud-class raster.
class LabelGrid {
 public:
  LabelGrid(LabelPlane labels, Taxonomy taxonomy, Timestamp timestamp)
      : labels_(std::move(labels)), taxonomy_(taxonomy), timestamp_(timestamp) {
    detail::require(labels_.height() > 0 && labels_.width() > 0,
                    "label grid must have positive dimensions");
    detail::require(is_cadence_aligned(timestamp_),
                    "label grid timestamp " + format_timestamp(timestamp_) +
                        " is not on a 15-minute boundary");
    const std::uint8_t limit = cardinality(taxonomy_);
    for (std::uint8_t v : labels_.values()) {
      if (v >= limit) {
        throw ValidationError("label " + std::to_string(v) + " outside the " +
                              std::string(to_string(taxonomy_)) + " taxonomy");
      }
    }
  }

  [[nodiscard]] std::size_t height() const noexcept { return labels_.height(); }
  [[nodiscard]] std::size_t width() const noexcept { return labels_.width(); }
  [[nodiscard]] const LabelPlane& labels() const noexcept { return labels_; }
  [[nodiscard]] Taxonomy taxonomy() const noexcept { return taxonomy_; }
  [[nodiscard]] Timestamp timestamp() const noexcept { return timestamp_; }
  [[nodiscard]] std::uint8_t operator()(std::size_t y, std::size_t x) const noexcept {
    return labels_(y, x);
  }

  [[nodiscard]] LabelGrid with_timestamp(Timestamp t) const {
    return LabelGrid(labels_, taxonomy_, t);
  }

  friend bool operator==(const LabelGrid&, const LabelGrid&) = default;

 private:
  LabelPlane labels_;
  Taxonomy taxonomy_;
  Timestamp timestamp_;
};

/// Ordered frames at a fixed 15-minute cadence. Holes (missing quarter hours)
/// are allowed until gap repair; timestamps are always strictly increasing.
class LabelSequence {
 public:
  LabelSequence() = default;
  explicit LabelSequence(std::vector<LabelGrid> frames) : frames_(std::move(frames)) {
    for (std::size_t i = 1; i < frames_.size(); ++i) {
      const LabelGrid& a = frames_[i - 1];
      const LabelGrid& b = frames_[i];
      detail::require(a.labels().same_shape(b.labels()),
                      "all frames of a sequence must share dimensions");
      detail::require(a.taxonomy() == b.taxonomy(),
                      "all frames of a sequence must share a taxonomy");
      detail::require(a.timestamp() < b.timestamp(),
                      "sequence timestamps must be strictly increasing (frame " +
                          std::to_string(i) + ")");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return frames_.size(); }
  [[nodiscard]] bool empty() const noexcept { return frames_.empty(); }
  [[nodiscard]] const LabelGrid& operator[](std::size_t i) const noexcept { return frames_[i]; }
  [[nodiscard]] const LabelGrid& front() const { return frames_.front(); }
  [[nodiscard]] const LabelGrid& back() const { return frames_.back(); }
  [[nodiscard]] const std::vector<LabelGrid>& frames() const noexcept { return frames_; }
  [[nodiscard]] auto begin() const noexcept { return frames_.begin(); }
  [[nodiscard]] auto end() const noexcept { return frames_.end(); }

  [[nodiscard]] std::size_t height() const { return frames_.empty() ? 0 : frames_[0].height(); }
  [[nodiscard]] std::size_t width() const { return frames_.empty() ? 0 : frames_[0].width(); }
  [[nodiscard]] Taxonomy taxonomy() const {
    return frames_.empty() ? Taxonomy::Full11 : frames_[0].taxonomy();
  }

  /// True when every consecutive pair is exactly one cadence apart.
  [[nodiscard]] bool is_contiguous() const {
    for (std::size_t i = 1; i < frames_.size(); ++i) {
      if (frames_[i].timestamp() - frames_[i - 1].timestamp() != kCadence) return false;
    }
    return true;
  }

  /// Index of the frame stamped t, if any.
  [[nodiscard]] std::optional<std::size_t> find(Timestamp t) const {
    std::size_t lo = 0, hi = frames_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (frames_[mid].timestamp() < t) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (lo < frames_.size() && frames_[lo].timestamp() == t) return lo;
    return std::nullopt;
  }

  friend bool operator==(const LabelSequence&, const LabelSequence&) = default;

 private:
  std::vector<LabelGrid> frames_;
};

/// Brightness temperatures (K) and visible reflectance of one scene. A channel
/// that was not acquired is std::nullopt; NaN marks a missing pixel.
struct ChannelStack {
  std::optional<RealPlane> bt073;
  std::optional<RealPlane> bt087;
  std::optional<RealPlane> bt108;
  std::optional<RealPlane> bt120;
  std::optional<RealPlane> refl06;

  [[nodiscard]] std::optional<std::pair<std::size_t, std::size_t>> shape() const {
    for (const auto* p : {&bt073, &bt087, &bt108, &bt120, &refl06}) {
      if (*p) return std::pair{(*p)->height(), (*p)->width()};
    }
    return std::nullopt;
  }

  void validate() const {
    const auto dims = shape();
    detail::require(dims.has_value(), "channel stack holds no channels");
    auto check = [&](const std::optional<RealPlane>& p, const char* name, double lo, double hi) {
      if (!p) return;
      detail::require(p->same_shape(dims->first, dims->second),
                      std::string("channel ") + name + " has mismatched dimensions");
      for (double v : p->values()) {
        if (std::isnan(v)) continue;
        detail::require(v >= lo && v <= hi, std::string("channel ") + name + " value " +
                                                 std::to_string(v) + " out of range");
      }
    };
    check(bt073, "7.3um", 150.0, 350.0);
    check(bt087, "8.7um", 150.0, 350.0);
    check(bt108, "10.8um", 150.0, 350.0);
    check(bt120, "12.0um", 150.0, 350.0);
    check(refl06, "0.6um", 0.0, 1.0);
  }
};

enum class Illumination : std::uint8_t { Day, Night, Twilight };

inline constexpr double kDayMaxSolarZenith = 80.0;
inline constexpr double kNightMinSolarZenith = 95.0;

constexpr Illumination illumination_for(double solar_zenith_deg) noexcept {
  if (solar_zenith_deg < kDayMaxSolarZenith) return Illumination::Day;
  if (solar_zenith_deg >= kNightMinSolarZenith) return Illumination::Night;
  return Illumination::Twilight;
}

/// Viewing and illumination geometry per pixel.
class GeoContext {
 public:
  GeoContext(RealPlane solar_zenith, RealPlane satellite_zenith,
             std::optional<LabelPlane> land_sea = std::nullopt)
      : solar_zenith_(std::move(solar_zenith)),
        satellite_zenith_(std::move(satellite_zenith)),
        land_sea_(std::move(land_sea)),
        regime_(solar_zenith_.height(), solar_zenith_.width()) {
    detail::require(solar_zenith_.same_shape(satellite_zenith_),
                    "zenith angle planes have mismatched dimensions");
    if (land_sea_) {
      detail::require(land_sea_->same_shape(solar_zenith_),
                      "land-sea mask has mismatched dimensions");
    }
    for (std::size_t i = 0; i < solar_zenith_.size(); ++i) {
      const double sza = solar_zenith_[i];
      const double vza = satellite_zenith_[i];
      detail::require(sza >= 0.0 && sza <= 180.0, "solar zenith outside [0, 180]");
      detail::require(vza >= 0.0 && vza <= 180.0, "satellite zenith outside [0, 180]");
      regime_[i] = illumination_for(sza);
    }
  }

  /// Uniform geometry, handy for tests and single-regime scenes.
  static GeoContext uniform(std::size_t height, std::size_t width, double solar_zenith,
                            double satellite_zenith) {
    return GeoContext(RealPlane(height, width, solar_zenith),
                      RealPlane(height, width, satellite_zenith));
  }

  [[nodiscard]] const RealPlane& solar_zenith() const noexcept { return solar_zenith_; }
  [[nodiscard]] const RealPlane& satellite_zenith() const noexcept { return satellite_zenith_; }
  [[nodiscard]] const std::optional<LabelPlane>& land_sea() const noexcept { return land_sea_; }
  [[nodiscard]] const Plane<Illumination>& regime() const noexcept { return regime_; }

 private:
  RealPlane solar_zenith_;
  RealPlane satellite_zenith_;
  std::optional<LabelPlane> land_sea_;
  Plane<Illumination> regime_;
};

}  // namespace cloudcast

#endif  // CLOUDCAST_GRIDS_HPP
