// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_TUNING_HPP
#define CLOUDCAST_TUNING_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloudcast/flow.hpp"
#include "cloudcast/metrics.hpp"
#include "cloudcast/nowcast.hpp"
#include "cloudcast/parallel.hpp"

namespace cloudcast::tuning {

inline constexpr std::size_t kExpectedLatticeSize = 360;

/// Cartesian grid over five TV-L1 parameters; everything else comes from
/// `base`. The default is 5 x 4 x 3 x 3 x 2 = 360 points around the defaults.
struct ParameterLattice {
  flow::TvL1Params base;
  std::vector<double> lambda{0.05, 0.1, 0.15, 0.3, 0.6};
  std::vector<double> theta{0.15, 0.3, 0.5, 0.8};
  std::vector<int> warps{1, 3, 5};
  std::vector<int> nscales{1, 3, 5};
  std::vector<int> median_filter_radius{0, 2};

  [[nodiscard]] std::size_t size() const noexcept {
    return lambda.size() * theta.size() * warps.size() * nscales.size() *
           median_filter_radius.size();
  }

  /// Combination `index`, lambda varying slowest and the median radius fastest.
  [[nodiscard]] flow::TvL1Params at(std::size_t index) const {
    flow::TvL1Params p = base;
    p.median_filter_radius = median_filter_radius[index % median_filter_radius.size()];
    index /= median_filter_radius.size();
    p.nscales = nscales[index % nscales.size()];
    index /= nscales.size();
    p.warps = warps[index % warps.size()];
    index /= warps.size();
    p.theta = theta[index % theta.size()];
    index /= theta.size();
    p.lambda = lambda[index];
    return p;
  }
};

inline void to_json(nlohmann::json& j, const ParameterLattice& l) {
  j = nlohmann::json{{"base", l.base},
                     {"lambda", l.lambda},
                     {"theta", l.theta},
                     {"warps", l.warps},
                     {"nscales", l.nscales},
                     {"median_filter_radius", l.median_filter_radius}};
}

inline void from_json(const nlohmann::json& j, ParameterLattice& l) {
  for (const auto& [key, value] : j.items()) {
    if (key == "base") value.get_to(l.base);
    else if (key == "lambda") l.lambda = value.get<std::vector<double>>();
    else if (key == "theta") l.theta = value.get<std::vector<double>>();
    else if (key == "warps") l.warps = value.get<std::vector<int>>();
    else if (key == "nscales") l.nscales = value.get<std::vector<int>>();
    else if (key == "median_filter_radius") l.median_filter_radius = value.get<std::vector<int>>();
    else throw ValidationError("unknown lattice field '" + key + "'");
  }
  cloudcast::detail::require(l.size() > 0, "parameter lattice is empty");
}

struct TuneOptions {
  std::size_t origins = 20;
  std::size_t steps = nowcast::kHorizon;
  std::uint64_t seed = 0;
};

struct ComboScore {
  std::size_t index = 0;
  flow::TvL1Params params;
  double mean_accuracy = 0.0;
};

struct TuneResult {
  flow::TvL1Params best;
  std::size_t best_index = 0;
  std::vector<std::size_t> origins;  // indices into the training sequence
  std::vector<ComboScore> scores;
  std::vector<std::string> warnings;
};

/// Origin indices whose previous frame and full horizon are present and
/// contiguous.
inline std::vector<std::size_t> candidate_origins(const LabelSequence& seq, std::size_t steps) {
  std::vector<std::size_t> out;
  if (seq.size() < steps + 2) return out;
  for (std::size_t i = 1; i + steps < seq.size(); ++i) {
    if (seq[i + steps].timestamp() - seq[i - 1].timestamp() ==
        kCadence * static_cast<long>(steps + 1)) {
      out.push_back(i);
    }
  }
  return out;
}

/// `count` distinct origins drawn with a seeded partial Fisher-Yates shuffle
/// (raw mt19937_64 output, so the draw is identical across standard libraries),
/// returned in ascending order.
inline std::vector<std::size_t> sample_origins(std::vector<std::size_t> candidates,
                                               std::size_t count, std::uint64_t seed) {
  cloudcast::detail::require(candidates.size() >= count,
                             "training sequence offers " + std::to_string(candidates.size()) +
                                 " forecast origins, " + std::to_string(count) + " needed");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t span = candidates.size() - i;
    const std::size_t j = i + static_cast<std::size_t>(rng() % span);
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

/// Mean accuracy of optical-flow forecasts from the given origins.
inline double score_params(const LabelSequence& seq, const std::vector<std::size_t>& origins,
                           const flow::TvL1Params& params, std::size_t steps) {
  double sum = 0.0;
  cloudcast::detail::require(!origins.empty(), "no forecast origins to score");
  for (std::size_t o : origins) {
    cloudcast::detail::require(o >= 1 && o + steps < seq.size(),
                               "origin " + std::to_string(o) + " lacks a full forecast window");
    const nowcast::ForecastSet f =
        nowcast::invert_and_extrapolate(seq[o], seq[o - 1], params, steps);
    const std::span<const LabelGrid> truth(seq.frames().data() + o + 1, steps);
    sum += verify::accuracy_report(f, truth).mean;
  }
  return sum / static_cast<double>(origins.size());
}

/// Exhaustive grid search maximising mean forecast accuracy; ties go to the
/// lower combination index.
inline TuneResult tune_tvl1(const LabelSequence& train, const ParameterLattice& lattice,
                            const TuneOptions& options = {}) {
  cloudcast::detail::require(lattice.size() > 0, "parameter lattice is empty");
  cloudcast::detail::require(options.origins >= 1, "tuning needs at least one origin");
  cloudcast::detail::require(train.taxonomy() == Taxonomy::Reduced4,
                             "tuning works on reduced (4-class) sequences");
  TuneResult result;
  if (lattice.size() != kExpectedLatticeSize) {
    result.warnings.push_back("lattice has " + std::to_string(lattice.size()) +
                              " combinations instead of " + std::to_string(kExpectedLatticeSize));
  }
  result.origins =
      sample_origins(candidate_origins(train, options.steps), options.origins, options.seed);

  result.scores.resize(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    lattice.at(i).validate();
  }
  parallel_for(lattice.size(), [&](std::size_t i) {
    const flow::TvL1Params p = lattice.at(i);
    result.scores[i] = {i, p, score_params(train, result.origins, p, options.steps)};
  });

  for (std::size_t i = 1; i < result.scores.size(); ++i) {
    if (result.scores[i].mean_accuracy > result.scores[result.best_index].mean_accuracy) {
      result.best_index = i;
    }
  }
  result.best = result.scores[result.best_index].params;
  return result;
}

inline void to_json(nlohmann::json& j, const TuneResult& r) {
  nlohmann::json scores = nlohmann::json::array();
  for (const ComboScore& s : r.scores) {
    scores.push_back({{"index", s.index}, {"params", s.params}, {"mean_accuracy", s.mean_accuracy}});
  }
  j = nlohmann::json{{"objective", "mean_accuracy"},
                     {"best_index", r.best_index},
                     {"best", r.best},
                     {"origins", r.origins},
                     {"warnings", r.warnings},
                     {"scores", scores}};
}

}  // namespace cloudcast::tuning

#endif  // CLOUDCAST_TUNING_HPP
