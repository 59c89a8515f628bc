// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_RASTER_HPP
#define CLOUDCAST_RASTER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "cloudcast/error.hpp"

namespace cloudcast {

/// Dense row-major 2-D array. Row index first, as in (y, x).
template <typename T>
class Plane {
 public:
  Plane() = default;
  Plane(std::size_t height, std::size_t width, T fill = T{})
      : height_(height), width_(width), data_(height * width, fill) {}
  Plane(std::size_t height, std::size_t width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    detail::require(data_.size() == height_ * width_,
                    "plane data size does not match its dimensions");
  }

  [[nodiscard]] std::size_t height() const noexcept { return height_; }
  [[nodiscard]] std::size_t width() const noexcept { return width_; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t y, std::size_t x) noexcept { return data_[y * width_ + x]; }
  const T& operator()(std::size_t y, std::size_t x) const noexcept {
    return data_[y * width_ + x];
  }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  [[nodiscard]] std::span<T> values() noexcept { return data_; }
  [[nodiscard]] std::span<const T> values() const noexcept { return data_; }

  [[nodiscard]] bool same_shape(std::size_t height, std::size_t width) const noexcept {
    return height_ == height && width_ == width;
  }
  template <typename U>
  [[nodiscard]] bool same_shape(const Plane<U>& other) const noexcept {
    return same_shape(other.height(), other.width());
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

using RealPlane = Plane<double>;

/// Element-wise transform into a new plane.
template <typename T, typename F>
auto map_plane(const Plane<T>& in, F&& f) {
  using U = std::decay_t<decltype(f(in[0]))>;
  Plane<U> out(in.height(), in.width());
  std::transform(in.values().begin(), in.values().end(), out.values().begin(), f);
  return out;
}

/// Bilinear sample with coordinates clamped to the plane border.
inline double sample_bilinear(const RealPlane& p, double y, double x) noexcept {
  const double ymax = static_cast<double>(p.height() - 1);
  const double xmax = static_cast<double>(p.width() - 1);
  y = std::clamp(y, 0.0, ymax);
  x = std::clamp(x, 0.0, xmax);
  const auto y0 = static_cast<std::size_t>(y);
  const auto x0 = static_cast<std::size_t>(x);
  const std::size_t y1 = std::min(y0 + 1, p.height() - 1);
  const std::size_t x1 = std::min(x0 + 1, p.width() - 1);
  const double fy = y - static_cast<double>(y0);
  const double fx = x - static_cast<double>(x0);
  const double top = (1.0 - fx) * p(y0, x0) + fx * p(y0, x1);
  const double bottom = (1.0 - fx) * p(y1, x0) + fx * p(y1, x1);
  return (1.0 - fy) * top + fy * bottom;
}

/// Separable Gaussian blur, kernel truncated at 3 sigma, replicated borders.
inline RealPlane gaussian_blur(const RealPlane& in, double sigma) {
  if (sigma <= 0.0 || in.empty()) return in;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    total += kernel[i + radius];
  }
  for (double& k : kernel) k /= total;

  const auto h = static_cast<long>(in.height());
  const auto w = static_cast<long>(in.width());
  RealPlane tmp(in.height(), in.width());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const long xx = std::clamp(x + i, 0L, w - 1);
        acc += kernel[i + radius] * in(y, xx);
      }
      tmp(y, x) = acc;
    }
  }
  RealPlane out(in.height(), in.width());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const long yy = std::clamp(y + i, 0L, h - 1);
        acc += kernel[i + radius] * tmp(yy, x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

}  // namespace cloudcast

#endif  // CLOUDCAST_RASTER_HPP
