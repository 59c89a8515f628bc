// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_METRICS_HPP
#define CLOUDCAST_METRICS_HPP

// Categorical forecast verification: accuracy breakdowns, frequency bias,
// multi-class Brier score and skill score, SSIM and PSNR on class intensities.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloudcast/flow.hpp"
#include "cloudcast/grids.hpp"
#include "cloudcast/nowcast.hpp"

namespace cloudcast::verify {

inline constexpr std::size_t kClasses = 4;
using ClassValues = std::array<std::optional<double>, kClasses>;

using flow::endpoint_error;

namespace detail {

inline void require_matching(std::span<const LabelGrid> pred, std::span<const LabelGrid> truth) {
  cloudcast::detail::require(!truth.empty(), "verification needs at least one frame");
  cloudcast::detail::require(pred.size() == truth.size(),
                             "prediction has " + std::to_string(pred.size()) +
                                 " frames, truth has " + std::to_string(truth.size()));
  for (std::size_t t = 0; t < truth.size(); ++t) {
    cloudcast::detail::require(pred[t].labels().same_shape(truth[t].labels()),
                               "prediction and truth frames differ in size");
    cloudcast::detail::require(
        pred[t].taxonomy() == Taxonomy::Reduced4 && truth[t].taxonomy() == Taxonomy::Reduced4,
        "verification works on reduced (4-class) grids");
  }
}

}  // namespace detail

struct AccuracyReport {
  double mean = 0.0;
  ClassValues per_class;  // nullopt where the class never occurs in truth
  std::vector<double> per_step;
};

inline AccuracyReport accuracy_report(std::span<const LabelGrid> pred,
                                      std::span<const LabelGrid> truth) {
  detail::require_matching(pred, truth);
  AccuracyReport out;
  std::array<std::size_t, kClasses> hits{}, seen{};
  std::size_t total_hits = 0, total = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const auto p = pred[t].labels().values();
    const auto y = truth[t].labels().values();
    std::size_t step_hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const bool hit = p[i] == y[i];
      step_hits += hit;
      ++seen[y[i]];
      hits[y[i]] += hit;
    }
    out.per_step.push_back(static_cast<double>(step_hits) / static_cast<double>(y.size()));
    total_hits += step_hits;
    total += y.size();
  }
  out.mean = static_cast<double>(total_hits) / static_cast<double>(total);
  for (std::size_t k = 0; k < kClasses; ++k) {
    if (seen[k] > 0) out.per_class[k] = static_cast<double>(hits[k]) / static_cast<double>(seen[k]);
  }
  return out;
}

inline AccuracyReport accuracy_report(const nowcast::ForecastSet& pred,
                                      std::span<const LabelGrid> truth) {
  return accuracy_report(std::span<const LabelGrid>(pred.frames), truth);
}

/// Predicted over observed count for each class; nullopt for classes absent
/// from truth.
inline ClassValues per_class_frequency_bias(std::span<const LabelGrid> pred,
                                            std::span<const LabelGrid> truth) {
  detail::require_matching(pred, truth);
  std::array<std::size_t, kClasses> predicted{}, observed{};
  for (std::size_t t = 0; t < truth.size(); ++t) {
    for (std::uint8_t v : pred[t].labels().values()) ++predicted[v];
    for (std::uint8_t v : truth[t].labels().values()) ++observed[v];
  }
  ClassValues out;
  for (std::size_t k = 0; k < kClasses; ++k) {
    if (observed[k] > 0) {
      out[k] = static_cast<double>(predicted[k]) / static_cast<double>(observed[k]);
    }
  }
  return out;
}

/// Macro average of the per-class biases over classes present in truth.
inline double frequency_bias(const ClassValues& per_class) {
  double sum = 0.0;
  int present = 0;
  for (const auto& b : per_class) {
    if (b) {
      sum += *b;
      ++present;
    }
  }
  cloudcast::detail::require(present > 0, "frequency bias undefined: no class present in truth");
  return sum / present;
}

inline double frequency_bias(std::span<const LabelGrid> pred, std::span<const LabelGrid> truth) {
  return frequency_bias(per_class_frequency_bias(pred, truth));
}

/// Class probabilities f and one-hot outcomes y, both [step][class][pixel].
struct ProbForecast {
  std::size_t steps = 0;
  std::size_t classes = kClasses;
  std::size_t pixels = 0;
  std::vector<double> f;
  std::vector<double> y;

  [[nodiscard]] std::size_t index(std::size_t t, std::size_t k, std::size_t i) const noexcept {
    return (t * classes + k) * pixels + i;
  }

  void validate() const {
    const std::size_t n = steps * classes * pixels;
    cloudcast::detail::require(n > 0, "probability forecast is empty");
    cloudcast::detail::require(f.size() == n && y.size() == n,
                               "probability tensors do not match the declared shape");
    for (std::size_t t = 0; t < steps; ++t) {
      for (std::size_t i = 0; i < pixels; ++i) {
        double fs = 0.0;
        int ones = 0;
        for (std::size_t k = 0; k < classes; ++k) {
          const double fv = f[index(t, k, i)];
          const double yv = y[index(t, k, i)];
          cloudcast::detail::require(fv >= -1e-12 && fv <= 1.0 + 1e-12,
                                     "forecast probability outside [0, 1]");
          cloudcast::detail::require(yv == 0.0 || yv == 1.0, "outcome tensor is not binary");
          fs += fv;
          ones += yv == 1.0;
        }
        cloudcast::detail::require(std::abs(fs - 1.0) <= 1e-9,
                                   "forecast probabilities do not sum to 1");
        cloudcast::detail::require(ones == 1, "outcome tensor is not one-hot");
      }
    }
  }
};

/// Builds a ProbForecast from a forecast (its probabilities, or one-hot labels
/// when it has none) and the observed frames.
inline ProbForecast make_prob_forecast(const nowcast::ForecastSet& pred,
                                       std::span<const LabelGrid> truth) {
  detail::require_matching(pred.frames, truth);
  ProbForecast pf;
  pf.steps = truth.size();
  pf.classes = kClasses;
  pf.pixels = truth[0].height() * truth[0].width();
  pf.f = pred.probabilities ? *pred.probabilities : nowcast::one_hot(pred.frames, kClasses);
  pf.y = nowcast::one_hot(std::vector<LabelGrid>(truth.begin(), truth.end()), kClasses);
  return pf;
}

/// (1/M)(1/N) sum_k sum_t (f - y)^2, averaged over pixels.
inline double brier_score(const ProbForecast& pf) {
  pf.validate();
  double sum = 0.0;
  for (std::size_t j = 0; j < pf.f.size(); ++j) {
    const double d = pf.f[j] - pf.y[j];
    sum += d * d;
  }
  return sum / static_cast<double>(pf.classes * pf.steps * pf.pixels);
}

/// 1 - model/reference; nullopt when the reference score is zero.
inline std::optional<double> brier_skill_score(double bs_model, double bs_reference) {
  if (!(bs_reference > 0.0)) return std::nullopt;
  return 1.0 - bs_model / bs_reference;
}

inline constexpr double kPsnrCap = 100.0;

/// PSNR in dB for intensities in [0, 1], capped when the frames agree.
inline double psnr(const RealPlane& a, const RealPlane& b) {
  cloudcast::detail::require(a.same_shape(b) && !a.empty(), "PSNR needs frames of equal size");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mse += (a[i] - b[i]) * (a[i] - b[i]);
  mse /= static_cast<double>(a.size());
  if (mse < 1e-10) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

/// Mean SSIM over all window positions fully inside the frame. Gaussian window
/// 11x11, sigma 1.5, dynamic range 1; frames smaller than the window use the
/// largest odd window that fits.
inline double ssim(const RealPlane& a, const RealPlane& b) {
  cloudcast::detail::require(a.same_shape(b) && !a.empty(), "SSIM needs frames of equal size");
  constexpr double kSigma = 1.5;
  constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0);
  constexpr double c2 = (0.03 * 1.0) * (0.03 * 1.0);
  const std::size_t h = a.height(), w = a.width();
  const long radius = std::min<long>(5, static_cast<long>((std::min(h, w) - 1) / 2));
  const long size = 2 * radius + 1;

  std::vector<double> window(static_cast<std::size_t>(size * size));
  double total = 0.0;
  for (long dy = -radius; dy <= radius; ++dy) {
    for (long dx = -radius; dx <= radius; ++dx) {
      const double g = std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      window[static_cast<std::size_t>((dy + radius) * size + dx + radius)] = g;
      total += g;
    }
  }
  for (double& g : window) g /= total;

  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t y = static_cast<std::size_t>(radius); y + radius < h; ++y) {
    for (std::size_t x = static_cast<std::size_t>(radius); x + radius < w; ++x) {
      double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (long dy = -radius; dy <= radius; ++dy) {
        for (long dx = -radius; dx <= radius; ++dx) {
          const double g = window[static_cast<std::size_t>((dy + radius) * size + dx + radius)];
          const double va = a(y + dy, x + dx), vb = b(y + dy, x + dx);
          ma += g * va;
          mb += g * vb;
          saa += g * va * va;
          sbb += g * vb * vb;
          sab += g * va * vb;
        }
      }
      const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - ma * mb;
      acc += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

inline double ssim(const LabelGrid& pred, const LabelGrid& truth) {
  return ssim(nowcast::to_intensity(pred), nowcast::to_intensity(truth));
}

inline double psnr(const LabelGrid& pred, const LabelGrid& truth) {
  return psnr(nowcast::to_intensity(pred), nowcast::to_intensity(truth));
}

/// Everything the evaluation reports.
struct MetricsReport {
  double mean_accuracy = 0.0;
  ClassValues per_class_accuracy;
  std::vector<double> per_step_accuracy;
  double frequency_bias = 0.0;
  double brier_score = 0.0;
  std::optional<double> brier_skill_score;
  double ssim = 0.0;
  double psnr = 0.0;
  std::size_t forecasts = 0;

  /// Accuracy at the 1, 2, 3 and 4 hour lead times (steps 4, 8, 12, 16).
  [[nodiscard]] std::vector<std::optional<double>> hourly_accuracy() const {
    std::vector<std::optional<double>> out;
    for (std::size_t step = 4; step <= 16; step += 4) {
      if (step <= per_step_accuracy.size()) {
        out.emplace_back(per_step_accuracy[step - 1]);
      } else {
        out.emplace_back(std::nullopt);
      }
    }
    return out;
  }
};

/// Pools any number of (forecast, truth[, reference]) cases into one report.
/// Counts are pooled, so the mean equals the pixel-weighted mean of per-step
/// values; SSIM and PSNR are averaged over frames.
class Accumulator {
 public:
  void add(const nowcast::ForecastSet& pred, std::span<const LabelGrid> truth,
           const nowcast::ForecastSet* reference = nullptr) {
    detail::require_matching(pred.frames, truth);
    if (step_hits_.empty()) {
      step_hits_.assign(truth.size(), 0);
      step_total_.assign(truth.size(), 0);
    }
    cloudcast::detail::require(truth.size() == step_hits_.size(),
                               "all pooled forecasts must share a horizon");
    for (std::size_t t = 0; t < truth.size(); ++t) {
      const auto p = pred.frames[t].labels().values();
      const auto y = truth[t].labels().values();
      for (std::size_t i = 0; i < y.size(); ++i) {
        const bool hit = p[i] == y[i];
        step_hits_[t] += hit;
        class_hits_[y[i]] += hit;
        ++observed_[y[i]];
        ++predicted_[p[i]];
      }
      step_total_[t] += y.size();
      ssim_sum_ += ssim(pred.frames[t], truth[t]);
      psnr_sum_ += psnr(pred.frames[t], truth[t]);
      ++frames_;
    }
    const ProbForecast pf = make_prob_forecast(pred, truth);
    const double weight = static_cast<double>(pf.steps * pf.pixels);
    brier_sum_ += brier_score(pf) * weight;
    if (reference) {
      reference_sum_ += brier_score(make_prob_forecast(*reference, truth)) * weight;
    } else {
      all_referenced_ = false;
    }
    brier_weight_ += weight;
    ++forecasts_;
  }

  [[nodiscard]] std::size_t forecasts() const noexcept { return forecasts_; }

  [[nodiscard]] MetricsReport report() const {
    cloudcast::detail::require(forecasts_ > 0, "no forecasts were scored");
    MetricsReport r;
    std::size_t hits = 0, total = 0;
    for (std::size_t t = 0; t < step_hits_.size(); ++t) {
      r.per_step_accuracy.push_back(static_cast<double>(step_hits_[t]) /
                                    static_cast<double>(step_total_[t]));
      hits += step_hits_[t];
      total += step_total_[t];
    }
    r.mean_accuracy = static_cast<double>(hits) / static_cast<double>(total);
    ClassValues bias;
    for (std::size_t k = 0; k < kClasses; ++k) {
      if (observed_[k] > 0) {
        r.per_class_accuracy[k] =
            static_cast<double>(class_hits_[k]) / static_cast<double>(observed_[k]);
        bias[k] = static_cast<double>(predicted_[k]) / static_cast<double>(observed_[k]);
      }
    }
    r.frequency_bias = frequency_bias(bias);
    r.brier_score = brier_sum_ / brier_weight_;
    if (all_referenced_) {
      r.brier_skill_score = brier_skill_score(r.brier_score, reference_sum_ / brier_weight_);
    }
    r.ssim = ssim_sum_ / static_cast<double>(frames_);
    r.psnr = psnr_sum_ / static_cast<double>(frames_);
    r.forecasts = forecasts_;
    return r;
  }

 private:
  std::vector<std::size_t> step_hits_, step_total_;
  std::array<std::size_t, kClasses> class_hits_{}, observed_{}, predicted_{};
  double ssim_sum_ = 0.0, psnr_sum_ = 0.0;
  std::size_t frames_ = 0;
  double brier_sum_ = 0.0, reference_sum_ = 0.0, brier_weight_ = 0.0;
  bool all_referenced_ = true;
  std::size_t forecasts_ = 0;
};

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline void to_json(nlohmann::json& j, const MetricsReport& r) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& v : r.per_class_accuracy) per_class.push_back(optional_json(v));
  nlohmann::json hourly = nlohmann::json::array();
  for (const auto& v : r.hourly_accuracy()) hourly.push_back(optional_json(v));
  j = nlohmann::json{{"mean_accuracy", r.mean_accuracy},
                     {"per_class_accuracy", per_class},
                     {"per_step_accuracy", r.per_step_accuracy},
                     {"hourly_accuracy", hourly},
                     {"frequency_bias", r.frequency_bias},
                     {"brier_score", r.brier_score},
                     {"brier_skill_score", optional_json(r.brier_skill_score)},
                     {"ssim", r.ssim},
                     {"psnr", r.psnr},
                     {"forecasts", r.forecasts}};
}

/// RFC 4180 CSV of the per-step accuracy.
inline std::string per_step_csv(const MetricsReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "step,accuracy\r\n";
  for (std::size_t t = 0; t < r.per_step_accuracy.size(); ++t) {
    out << (t + 1) << ',' << r.per_step_accuracy[t] << "\r\n";
  }
  return out.str();
}

}  // namespace cloudcast::verify

#endif  // CLOUDCAST_METRICS_HPP
