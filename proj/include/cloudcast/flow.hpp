// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_FLOW_HPP
#define CLOUDCAST_FLOW_HPP

// Dense TV-L1 optical flow (duality-based, coarse-to-fine with warping).
//
// The energy is  sum |grad u| + |grad v| + lambda * |rho(u, v)|  where rho is
// the brightness-constancy residual linearised around the current warp. The
// solver alternates a point-wise thresholding step on the auxiliary flow with
// a projected-gradient update of the dual variables, as in the classic
// Zach-Pock-Bischof scheme. An optional illumination variable (weight gamma)
// absorbs additive brightness change.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <json.hpp>

#include "cloudcast/error.hpp"
#include "cloudcast/raster.hpp"

namespace cloudcast::flow {

/// Displacement in pixels per frame: u along x (columns), v along y (rows).
struct FlowField {
  RealPlane u;
  RealPlane v;

  FlowField() = default;
  FlowField(std::size_t height, std::size_t width, double u0 = 0.0, double v0 = 0.0)
      : u(height, width, u0), v(height, width, v0) {}
  FlowField(RealPlane u_, RealPlane v_) : u(std::move(u_)), v(std::move(v_)) {
    detail::require(u.same_shape(v), "flow components have mismatched dimensions");
  }

  [[nodiscard]] std::size_t height() const noexcept { return u.height(); }
  [[nodiscard]] std::size_t width() const noexcept { return u.width(); }

  friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// The eleven solver parameters.
struct TvL1Params {
  double tau = 0.25;
  double lambda = 0.15;
  double theta = 0.3;
  int nscales = 5;
  double scale_step = 0.5;
  int warps = 5;
  double epsilon = 0.01;
  int inner_iterations = 30;
  int outer_iterations = 10;
  double gamma = 0.0;
  int median_filter_radius = 2;  // 0 disables the filter

  void validate() const {
    detail::require(tau > 0.0 && lambda > 0.0 && theta > 0.0 && epsilon > 0.0,
                    "tau, lambda, theta and epsilon must be positive");
    detail::require(scale_step > 0.0 && scale_step < 1.0, "scale_step must lie in (0, 1)");
    detail::require(nscales >= 1 && warps >= 1 && inner_iterations >= 1 && outer_iterations >= 1,
                    "nscales, warps and iteration counts must be at least 1");
    detail::require(gamma >= 0.0, "gamma must be non-negative");
    detail::require(median_filter_radius >= 0, "median_filter_radius must be non-negative");
  }

  friend bool operator==(const TvL1Params&, const TvL1Params&) = default;
};

inline void to_json(nlohmann::json& j, const TvL1Params& p) {
  j = nlohmann::json{{"tau", p.tau},
                     {"lambda", p.lambda},
                     {"theta", p.theta},
                     {"nscales", p.nscales},
                     {"scale_step", p.scale_step},
                     {"warps", p.warps},
                     {"epsilon", p.epsilon},
                     {"inner_iterations", p.inner_iterations},
                     {"outer_iterations", p.outer_iterations},
                     {"gamma", p.gamma},
                     {"median_filter_radius", p.median_filter_radius}};
}

/// Missing keys keep their current value; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, TvL1Params& p) {
  for (const auto& [key, value] : j.items()) {
    if (key == "tau") p.tau = value.get<double>();
    else if (key == "lambda") p.lambda = value.get<double>();
    else if (key == "theta") p.theta = value.get<double>();
    else if (key == "nscales") p.nscales = value.get<int>();
    else if (key == "scale_step") p.scale_step = value.get<double>();
    else if (key == "warps") p.warps = value.get<int>();
    else if (key == "epsilon") p.epsilon = value.get<double>();
    else if (key == "inner_iterations") p.inner_iterations = value.get<int>();
    else if (key == "outer_iterations") p.outer_iterations = value.get<int>();
    else if (key == "gamma") p.gamma = value.get<double>();
    else if (key == "median_filter_radius") p.median_filter_radius = value.get<int>();
    else throw ValidationError("unknown TV-L1 parameter '" + key + "'");
  }
  p.validate();
}

/// Pyramid levels smaller than this (in either dimension) are skipped.
inline constexpr std::size_t kMinLevelSize = 16;

namespace detail {

// Intensities are rescaled to [0, 255] before solving so lambda keeps its
// customary meaning for 8-bit imagery.
inline constexpr double kIntensityScale = 255.0;

inline RealPlane resample(const RealPlane& in, std::size_t out_h, std::size_t out_w) {
  RealPlane out(out_h, out_w);
  const double ry = static_cast<double>(in.height()) / static_cast<double>(out_h);
  const double rx = static_cast<double>(in.width()) / static_cast<double>(out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      out(y, x) = sample_bilinear(in, (static_cast<double>(y) + 0.5) * ry - 0.5,
                                  (static_cast<double>(x) + 0.5) * rx - 0.5);
    }
  }
  return out;
}

inline RealPlane zoom_out(const RealPlane& in, std::size_t out_h, std::size_t out_w,
                          double factor) {
  const double sigma = 0.6 * std::sqrt(1.0 / (factor * factor) - 1.0);
  return resample(gaussian_blur(in, sigma), out_h, out_w);
}

inline void centered_gradient(const RealPlane& in, RealPlane& gx, RealPlane& gy) {
  const std::size_t h = in.height(), w = in.width();
  gx = RealPlane(h, w);
  gy = RealPlane(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t ym = y > 0 ? y - 1 : 0;
    const std::size_t yp = y + 1 < h ? y + 1 : y;
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t xm = x > 0 ? x - 1 : 0;
      const std::size_t xp = x + 1 < w ? x + 1 : x;
      gx(y, x) = 0.5 * (in(y, xp) - in(y, xm));
      gy(y, x) = 0.5 * (in(yp, x) - in(ym, x));
    }
  }
}

// Forward differences, zero on the last column / row.
inline void forward_gradient(const RealPlane& in, RealPlane& gx, RealPlane& gy) {
  const std::size_t h = in.height(), w = in.width();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      gx(y, x) = x + 1 < w ? in(y, x + 1) - in(y, x) : 0.0;
      gy(y, x) = y + 1 < h ? in(y + 1, x) - in(y, x) : 0.0;
    }
  }
}

// Negative adjoint of forward_gradient.
inline void divergence(const RealPlane& px, const RealPlane& py, RealPlane& div) {
  const std::size_t h = px.height(), w = px.width();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double d = 0.0;
      if (x + 1 < w) d += px(y, x);
      if (x > 0) d -= px(y, x - 1);
      if (y + 1 < h) d += py(y, x);
      if (y > 0) d -= py(y - 1, x);
      div(y, x) = d;
    }
  }
}

inline void median_filter(RealPlane& p, int radius) {
  if (radius <= 0) return;
  const auto h = static_cast<long>(p.height());
  const auto w = static_cast<long>(p.width());
  const RealPlane src = p;
  std::vector<double> window;
  window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      window.clear();
      for (long dy = -radius; dy <= radius; ++dy) {
        const long yy = std::clamp(y + dy, 0L, h - 1);
        for (long dx = -radius; dx <= radius; ++dx) {
          window.push_back(src(yy, std::clamp(x + dx, 0L, w - 1)));
        }
      }
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      p(y, x) = *mid;
    }
  }
}

// Solves one pyramid level in place, starting from the given flow.
inline void solve_level(const RealPlane& i0, const RealPlane& i1, FlowField& flow,
                        const TvL1Params& p) {
  const std::size_t h = i0.height(), w = i0.width(), n = h * w;
  RealPlane& u1 = flow.u;
  RealPlane& u2 = flow.v;
  RealPlane u3(h, w);  // illumination
  RealPlane p11(h, w), p12(h, w), p21(h, w), p22(h, w), p31(h, w), p32(h, w);
  RealPlane v1(h, w), v2(h, w), v3(h, w);
  RealPlane div1(h, w), div2(h, w), div3(h, w);
  RealPlane gx(h, w), gy(h, w);
  RealPlane i1x, i1y;
  centered_gradient(i1, i1x, i1y);
  RealPlane i1w(h, w), i1wx(h, w), i1wy(h, w), grad(h, w), rho_c(h, w);

  const double lt = p.lambda * p.theta;
  const double taut = p.tau / p.theta;
  const double stop = p.epsilon * p.epsilon;
  const bool illumination = p.gamma > 0.0;

  for (int warp = 0; warp < p.warps; ++warp) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t i = y * w + x;
        const double sy = static_cast<double>(y) + u2[i];
        const double sx = static_cast<double>(x) + u1[i];
        i1w[i] = sample_bilinear(i1, sy, sx);
        i1wx[i] = sample_bilinear(i1x, sy, sx);
        i1wy[i] = sample_bilinear(i1y, sy, sx);
        grad[i] = i1wx[i] * i1wx[i] + i1wy[i] * i1wy[i] + p.gamma * p.gamma;
        rho_c[i] = i1w[i] - i1wx[i] * u1[i] - i1wy[i] * u2[i] - i0[i];
      }
    }

    double error = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < p.outer_iterations && error > stop; ++outer) {
      for (int inner = 0; inner < p.inner_iterations && error > stop; ++inner) {
        for (std::size_t i = 0; i < n; ++i) {
          const double rho = rho_c[i] + i1wx[i] * u1[i] + i1wy[i] * u2[i] + p.gamma * u3[i];
          double d1 = 0.0, d2 = 0.0, d3 = 0.0;
          if (rho < -lt * grad[i]) {
            d1 = lt * i1wx[i];
            d2 = lt * i1wy[i];
            d3 = lt * p.gamma;
          } else if (rho > lt * grad[i]) {
            d1 = -lt * i1wx[i];
            d2 = -lt * i1wy[i];
            d3 = -lt * p.gamma;
          } else if (grad[i] > 1e-10) {
            const double fi = -rho / grad[i];
            d1 = fi * i1wx[i];
            d2 = fi * i1wy[i];
            d3 = fi * p.gamma;
          }
          v1[i] = u1[i] + d1;
          v2[i] = u2[i] + d2;
          v3[i] = u3[i] + d3;
        }

        divergence(p11, p12, div1);
        divergence(p21, p22, div2);
        if (illumination) divergence(p31, p32, div3);

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double a = v1[i] + p.theta * div1[i];
          const double b = v2[i] + p.theta * div2[i];
          sum += (a - u1[i]) * (a - u1[i]) + (b - u2[i]) * (b - u2[i]);
          u1[i] = a;
          u2[i] = b;
          if (illumination) u3[i] = v3[i] + p.theta * div3[i];
        }
        error = sum / static_cast<double>(n);

        forward_gradient(u1, gx, gy);
        for (std::size_t i = 0; i < n; ++i) {
          const double ng = 1.0 + taut * std::hypot(gx[i], gy[i]);
          p11[i] = (p11[i] + taut * gx[i]) / ng;
          p12[i] = (p12[i] + taut * gy[i]) / ng;
        }
        forward_gradient(u2, gx, gy);
        for (std::size_t i = 0; i < n; ++i) {
          const double ng = 1.0 + taut * std::hypot(gx[i], gy[i]);
          p21[i] = (p21[i] + taut * gx[i]) / ng;
          p22[i] = (p22[i] + taut * gy[i]) / ng;
        }
        if (illumination) {
          forward_gradient(u3, gx, gy);
          for (std::size_t i = 0; i < n; ++i) {
            const double ng = 1.0 + taut * std::hypot(gx[i], gy[i]);
            p31[i] = (p31[i] + taut * gx[i]) / ng;
            p32[i] = (p32[i] + taut * gy[i]) / ng;
          }
        }
      }
      median_filter(u1, p.median_filter_radius);
      median_filter(u2, p.median_filter_radius);
    }
  }
}

inline bool is_constant(const RealPlane& p) {
  const auto [lo, hi] = std::minmax_element(p.values().begin(), p.values().end());
  return *lo == *hi;
}

}  // namespace detail

/// Flow taking `from` onto `to`: from(x) ~ to(x + flow(x)).
inline FlowField estimate_flow(const RealPlane& from, const RealPlane& to, const TvL1Params& p) {
  p.validate();
  cloudcast::detail::require(from.same_shape(to), "flow inputs have mismatched dimensions");
  cloudcast::detail::require(!from.empty(), "flow inputs are empty");
  const std::size_t h = from.height(), w = from.width();
  if (detail::is_constant(to)) return FlowField(h, w);

  // Pyramid: level 0 is the input; coarser levels shrink by scale_step until
  // nscales levels exist or the next level would fall below kMinLevelSize.
  std::vector<RealPlane> pyr0{map_plane(from, [](double v) { return v * detail::kIntensityScale; })};
  std::vector<RealPlane> pyr1{map_plane(to, [](double v) { return v * detail::kIntensityScale; })};
  for (int s = 1; s < p.nscales; ++s) {
    const double factor = std::pow(p.scale_step, s);
    const auto nh = static_cast<std::size_t>(std::lround(static_cast<double>(h) * factor));
    const auto nw = static_cast<std::size_t>(std::lround(static_cast<double>(w) * factor));
    if (nh < kMinLevelSize || nw < kMinLevelSize) break;
    pyr0.push_back(detail::zoom_out(pyr0.back(), nh, nw, p.scale_step));
    pyr1.push_back(detail::zoom_out(pyr1.back(), nh, nw, p.scale_step));
  }

  FlowField flow(pyr0.back().height(), pyr0.back().width());
  for (std::size_t level = pyr0.size(); level-- > 0;) {
    const RealPlane& i0 = pyr0[level];
    if (!flow.u.same_shape(i0)) {
      const double sx = static_cast<double>(i0.width()) / static_cast<double>(flow.width());
      const double sy = static_cast<double>(i0.height()) / static_cast<double>(flow.height());
      RealPlane u = detail::resample(flow.u, i0.height(), i0.width());
      RealPlane v = detail::resample(flow.v, i0.height(), i0.width());
      for (double& x : u.values()) x *= sx;
      for (double& y : v.values()) y *= sy;
      flow = FlowField(std::move(u), std::move(v));
    }
    detail::solve_level(i0, pyr1[level], flow, p);
  }
  return flow;
}

/// Backward-warps `source` by `flow` with bilinear sampling and edge clamping:
/// out(x) = source(x + flow(x)).
inline RealPlane warp(const RealPlane& source, const FlowField& flow) {
  cloudcast::detail::require(source.same_shape(flow.u), "warp source and flow differ in size");
  RealPlane out(source.height(), source.width());
  for (std::size_t y = 0; y < source.height(); ++y) {
    for (std::size_t x = 0; x < source.width(); ++x) {
      out(y, x) = sample_bilinear(source, static_cast<double>(y) + flow.v(y, x),
                                  static_cast<double>(x) + flow.u(y, x));
    }
  }
  return out;
}

/// Mean Euclidean distance between two flow fields, in pixels.
inline double endpoint_error(const FlowField& estimated, const FlowField& truth) {
  cloudcast::detail::require(estimated.u.same_shape(truth.u),
                             "endpoint error needs flows of equal size");
  cloudcast::detail::require(estimated.u.size() > 0, "endpoint error of an empty flow");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.u.size(); ++i) {
    sum += std::hypot(estimated.u[i] - truth.u[i], estimated.v[i] - truth.v[i]);
  }
  return sum / static_cast<double>(truth.u.size());
}

}  // namespace cloudcast::flow

#endif  // CLOUDCAST_FLOW_HPP
