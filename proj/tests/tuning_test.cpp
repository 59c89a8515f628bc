// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "cloudcast/synthetic.hpp"
#include "cloudcast/tuning.hpp"

namespace cloudcast::tuning {
namespace {

using synthetic::SyntheticSpec;

LabelSequence synthetic_sequence(synthetic::Motion motion, std::size_t frames, std::size_t size) {
  SyntheticSpec spec;
  spec.motion = motion;
  spec.frames = frames;
  spec.height = spec.width = size;
  return synthetic::generate_synthetic(spec).sequence;
}

TEST(Lattice, DefaultHas360DistinctPoints) {
  const ParameterLattice l;
  EXPECT_EQ(l.size(), 360u);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < l.size(); ++i) seen.insert(nlohmann::json(l.at(i)).dump());
  EXPECT_EQ(seen.size(), 360u);
  EXPECT_EQ(l.at(0).lambda, 0.05);
  EXPECT_EQ(l.at(0).median_filter_radius, 0);
  EXPECT_EQ(l.at(1).median_filter_radius, 2);
  EXPECT_EQ(l.at(359).lambda, 0.6);
}

TEST(Origins, CandidatesNeedContiguousWindow) {
  const LabelSequence seq = synthetic_sequence(synthetic::Translation{}, 20, 16);
  EXPECT_EQ(candidate_origins(seq, 16).size(), 3u);  // origins 1, 2, 3
  EXPECT_TRUE(candidate_origins(seq, 19).empty());
}

TEST(Origins, SamplingIsSeededAndSorted) {
  std::vector<std::size_t> cand(100);
  for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = i + 1;
  const auto a = sample_origins(cand, 20, 7);
  EXPECT_EQ(a, sample_origins(cand, 20, 7));
  EXPECT_NE(a, sample_origins(cand, 20, 8));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 20u);
  EXPECT_THROW(sample_origins(cand, 101, 0), ValidationError);
}

TEST(Tune, SinglePointLattice) {
  ParameterLattice l;
  l.lambda = {0.3};
  l.theta = {0.5};
  l.warps = {3};
  l.nscales = {3};
  l.median_filter_radius = {2};
  const LabelSequence seq = synthetic_sequence(synthetic::Translation{1.0, 0.0}, 12, 32);
  const TuneResult r = tune_tvl1(seq, l, {2, 4, 0});
  EXPECT_EQ(r.best_index, 0u);
  EXPECT_EQ(r.best, l.at(0));
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(Tune, StaticSequenceTiesToIndexZero) {
  ParameterLattice l;
  l.nscales = {1};
  l.warps = {1};
  const LabelSequence seq = synthetic_sequence(synthetic::Translation{}, 8, 32);
  const TuneResult r = tune_tvl1(seq, l, {2, 4, 0});
  for (const ComboScore& s : r.scores) EXPECT_EQ(s.mean_accuracy, 1.0);
  EXPECT_EQ(r.best_index, 0u);
}

TEST(Tune, TranslatingSequenceSeparatesLambda) {
  ParameterLattice l;
  l.lambda = {0.002, 0.15, 0.6};
  l.theta = {0.3};
  l.warps = {5};
  l.nscales = {3};
  l.median_filter_radius = {2};
  // Integer translations of piecewise-constant maps are matched exactly at any
  // lambda, so use a rotation.
  const LabelSequence seq = synthetic_sequence(synthetic::Rotation{32.0, 32.0, 0.03}, 14, 64);
  const TuneResult r = tune_tvl1(seq, l, {3, 8, 1});
  // Brute force each lambda independently and compare with the search.
  double worst = 1.0, best = 0.0;
  for (double lam : l.lambda) {
    flow::TvL1Params p = l.base;
    p.lambda = lam;
    p.theta = 0.3;
    p.warps = 5;
    p.nscales = 3;
    p.median_filter_radius = 2;
    const double s = score_params(seq, r.origins, p, 8);
    worst = std::min(worst, s);
    best = std::max(best, s);
  }
  EXPECT_DOUBLE_EQ(r.scores[r.best_index].mean_accuracy, best);
  EXPECT_GT(r.scores[r.best_index].mean_accuracy - worst, 0.0);
  EXPECT_NE(r.best.lambda, 0.002);
}

TEST(Tune, ScoreRejectsShortWindow) {
  const LabelSequence seq = synthetic_sequence(synthetic::Translation{}, 10, 16);
  EXPECT_THROW(score_params(seq, {5}, {}, 8), ValidationError);
  EXPECT_THROW(score_params(seq, {0}, {}, 4), ValidationError);
}

TEST(Tune, InsufficientFramesFails) {
  const LabelSequence seq = synthetic_sequence(synthetic::Translation{}, 6, 16);
  EXPECT_THROW(tune_tvl1(seq, ParameterLattice{}, {20, 16, 0}), ValidationError);
}

TEST(Lattice, JsonRoundTrip) {
  ParameterLattice l;
  l.lambda = {0.1};
  const nlohmann::json j = l;
  EXPECT_EQ(j.get<ParameterLattice>().size(), 72u);
  EXPECT_THROW(nlohmann::json({{"lambda", nlohmann::json::array()}}).get<ParameterLattice>(),
               ValidationError);
}

}  // namespace
}  // namespace cloudcast::tuning
