// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_SYNTHETIC_HPP
#define CLOUDCAST_SYNTHETIC_HPP

// Seeded synthetic cloud sequences with known motion. A smooth analytic field
// is advected exactly (evaluated at the back-traced position) and quantised to
// the four reduced classes, so every frame and its true flow are known.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cloudcast/flow.hpp"
#include "cloudcast/grids.hpp"

namespace cloudcast::synthetic {

enum class FieldType : std::uint8_t { BandlimitedNoise, GaussianBlobs };

struct Translation {
  double vx = 0.0;  // px/frame along columns
  double vy = 0.0;  // px/frame along rows
};

struct Rotation {
  double cx = 0.0;
  double cy = 0.0;
  double omega = 0.0;  // rad/frame, counter-clockwise in (x, y)
};

using Motion = std::variant<Translation, Rotation>;

struct SyntheticSpec {
  FieldType field = FieldType::BandlimitedNoise;
  Motion motion = Translation{};
  std::size_t height = 128;
  std::size_t width = 128;
  std::size_t frames = 32;
  // Class quantiles of frame 0; the defaults give roughly the reduced class
  // frequencies of the real archive (28% / 33% / 11% / 28%).
  std::array<double, 3> breakpoints{0.279, 0.608, 0.721};
  std::uint64_t seed = 0;
  Timestamp start = std::chrono::sys_days{std::chrono::year{2017} / 4 / 1};

  void validate() const;
};

struct SyntheticData {
  LabelSequence sequence;
  flow::FlowField truth;  // displacement from frame k to frame k+1 (any k)
};

/// Per-frame forward displacement of each pixel under the motion.
inline flow::FlowField motion_field(const Motion& motion, std::size_t height, std::size_t width) {
  flow::FlowField out(height, width);
  if (const auto* t = std::get_if<Translation>(&motion)) {
    return flow::FlowField(height, width, t->vx, t->vy);
  }
  const auto& r = std::get<Rotation>(motion);
  const double c = std::cos(r.omega), s = std::sin(r.omega);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double dx = static_cast<double>(x) - r.cx;
      const double dy = static_cast<double>(y) - r.cy;
      out.u(y, x) = c * dx - s * dy - dx;
      out.v(y, x) = s * dx + c * dy - dy;
    }
  }
  return out;
}

inline void SyntheticSpec::validate() const {
  detail::require(height >= 2 && width >= 2, "synthetic grid must be at least 2x2");
  detail::require(frames >= 1, "synthetic sequence needs at least one frame");
  detail::require(breakpoints[0] > 0.0 && breakpoints[0] < breakpoints[1] &&
                      breakpoints[1] < breakpoints[2] && breakpoints[2] < 1.0,
                  "breakpoints must be increasing inside (0, 1)");
  const flow::FlowField f = motion_field(motion, height, width);
  double max_disp = 0.0;
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    max_disp = std::max(max_disp, std::hypot(f.u[i], f.v[i]));
  }
  const double bound = static_cast<double>(std::min(height, width)) / 8.0;
  detail::require(max_disp < bound, "per-frame displacement " + std::to_string(max_disp) +
                                        " px is not below grid/8 = " + std::to_string(bound));
}

namespace gen {

struct Wave {
  double kx, ky, phase, amplitude;
};

struct Blob {
  double x, y, sigma, amplitude;
};

// Analytic scalar field evaluated at continuous (x, y).
class Field {
 public:
  Field(FieldType type, std::size_t h, std::size_t w, std::uint64_t seed) : type_(type) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
      // 53 random bits -> [0, 1); independent of the standard library's
      // distribution implementation.
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      return lo + (hi - lo) * u;
    };
    const double size = static_cast<double>(std::max(h, w));
    if (type_ == FieldType::BandlimitedNoise) {
      constexpr int kWaves = 24;
      for (int i = 0; i < kWaves; ++i) {
        const double angle = uniform(0.0, 2.0 * std::numbers::pi);
        const double wavelength = uniform(16.0, 64.0);
        const double k = 2.0 * std::numbers::pi / wavelength;
        waves_.push_back({k * std::cos(angle), k * std::sin(angle),
                          uniform(0.0, 2.0 * std::numbers::pi), uniform(0.5, 1.0)});
      }
    } else {
      constexpr int kBlobs = 40;
      for (int i = 0; i < kBlobs; ++i) {
        blobs_.push_back({uniform(-0.5 * size, 1.5 * size), uniform(-0.5 * size, 1.5 * size),
                          uniform(5.0, 14.0), uniform(0.5, 1.0)});
      }
    }
  }

  [[nodiscard]] double operator()(double x, double y) const noexcept {
    double v = 0.0;
    for (const Wave& wv : waves_) v += wv.amplitude * std::cos(wv.kx * x + wv.ky * y + wv.phase);
    for (const Blob& b : blobs_) {
      const double dx = x - b.x, dy = y - b.y;
      v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
    }
    return v;
  }

 private:
  FieldType type_;
  std::vector<Wave> waves_;
  std::vector<Blob> blobs_;
};

}  // namespace gen

/// Generates the sequence and its exact per-frame flow.
inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const gen::Field field(spec.field, spec.height, spec.width, spec.seed);
  const std::size_t h = spec.height, w = spec.width;

  // Position at time 0 of the parcel found at (x, y) after k frames.
  auto origin_of = [&](double x, double y, double k) -> std::pair<double, double> {
    if (const auto* t = std::get_if<Translation>(&spec.motion)) {
      return {x - t->vx * k, y - t->vy * k};
    }
    const auto& r = std::get<Rotation>(spec.motion);
    const double a = -r.omega * k;
    const double c = std::cos(a), s = std::sin(a);
    const double dx = x - r.cx, dy = y - r.cy;
    return {r.cx + c * dx - s * dy, r.cy + s * dx + c * dy};
  };

  std::vector<RealPlane> values;
  values.reserve(spec.frames);
  for (std::size_t k = 0; k < spec.frames; ++k) {
    RealPlane plane(h, w);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const auto [ox, oy] =
            origin_of(static_cast<double>(x), static_cast<double>(y), static_cast<double>(k));
        plane(y, x) = field(ox, oy);
      }
    }
    values.push_back(std::move(plane));
  }

  std::vector<double> sorted(values[0].values().begin(), values[0].values().end());
  std::sort(sorted.begin(), sorted.end());
  std::array<double, 3> cut{};
  for (std::size_t j = 0; j < 3; ++j) {
    const auto idx = static_cast<std::size_t>(spec.breakpoints[j] * static_cast<double>(sorted.size()));
    cut[j] = sorted[std::min(idx, sorted.size() - 1)];
  }

  std::vector<LabelGrid> frames;
  frames.reserve(spec.frames);
  for (std::size_t k = 0; k < spec.frames; ++k) {
    LabelPlane labels = map_plane(values[k], [&cut](double v) {
      return static_cast<std::uint8_t>((v >= cut[0]) + (v >= cut[1]) + (v >= cut[2]));
    });
    frames.emplace_back(std::move(labels), Taxonomy::Reduced4,
                        spec.start + kCadence * static_cast<long>(k));
  }
  return {LabelSequence(std::move(frames)), motion_field(spec.motion, h, w)};
}

/// Parses "translation:vx,vy" or "rotation:cx,cy,omega".
inline Motion parse_motion(const std::string& text) {
  const auto colon = text.find(':');
  detail::require(colon != std::string::npos,
                  "flow must look like translation:vx,vy or rotation:cx,cy,omega");
  const std::string kind = text.substr(0, colon);
  std::vector<double> nums;
  std::string rest = text.substr(colon + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const std::size_t comma = rest.find(',', pos);
    const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      nums.push_back(std::stod(item, &used));
      detail::require(used == item.size(), "bad number '" + item + "' in flow spec");
    } catch (const std::logic_error&) {
      throw ValidationError("bad number '" + item + "' in flow spec");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (kind == "translation" && nums.size() == 2) return Translation{nums[0], nums[1]};
  if (kind == "rotation" && nums.size() == 3) return Rotation{nums[0], nums[1], nums[2]};
  throw ValidationError("unrecognised flow spec '" + text + "'");
}

inline void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  j = nlohmann::json::object();
  j["field"] = s.field == FieldType::BandlimitedNoise ? "bandlimited_noise" : "gaussian_blobs";
  if (const auto* t = std::get_if<Translation>(&s.motion)) {
    j["flow"] = {{"type", "translation"}, {"vx", t->vx}, {"vy", t->vy}};
  } else {
    const auto& r = std::get<Rotation>(s.motion);
    j["flow"] = {{"type", "rotation"}, {"cx", r.cx}, {"cy", r.cy}, {"omega", r.omega}};
  }
  j["height"] = s.height;
  j["width"] = s.width;
  j["frames"] = s.frames;
  j["breakpoints"] = s.breakpoints;
  j["seed"] = s.seed;
  j["start"] = format_timestamp(s.start);
}

inline void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  for (const auto& [key, value] : j.items()) {
    if (key == "field") {
      const auto name = value.get<std::string>();
      if (name == "bandlimited_noise") s.field = FieldType::BandlimitedNoise;
      else if (name == "gaussian_blobs") s.field = FieldType::GaussianBlobs;
      else throw ValidationError("unknown synthetic field type '" + name + "'");
    } else if (key == "flow") {
      if (value.is_string()) {
        s.motion = parse_motion(value.get<std::string>());
      } else if (value.at("type") == "translation") {
        s.motion = Translation{value.value("vx", 0.0), value.value("vy", 0.0)};
      } else if (value.at("type") == "rotation") {
        s.motion = Rotation{value.value("cx", 0.0), value.value("cy", 0.0), value.value("omega", 0.0)};
      } else {
        throw ValidationError("unknown synthetic flow type");
      }
    } else if (key == "height") s.height = value.get<std::size_t>();
    else if (key == "width") s.width = value.get<std::size_t>();
    else if (key == "frames") s.frames = value.get<std::size_t>();
    else if (key == "breakpoints") s.breakpoints = value.get<std::array<double, 3>>();
    else if (key == "seed") s.seed = value.get<std::uint64_t>();
    else if (key == "start") s.start = parse_timestamp(value.get<std::string>());
    else throw ValidationError("unknown synthetic spec field '" + key + "'");
  }
}

}  // namespace cloudcast::synthetic

#endif  // CLOUDCAST_SYNTHETIC_HPP
