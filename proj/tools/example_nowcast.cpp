// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

// Library walkthrough: generate a drifting synthetic scene, nowcast it with
// persistence and TV-L1, and print the headline scores.

#include <cstdio>

#include "cloudcast/cloudcast.hpp"

int main() {
  using namespace cloudcast;

  synthetic::SyntheticSpec spec;
  spec.motion = synthetic::Translation{1.5, -0.5};
  spec.frames = 2 + nowcast::kHorizon;
  const synthetic::SyntheticData data = synthetic::generate_synthetic(spec);
  const LabelSequence& seq = data.sequence;
  const std::span<const LabelGrid> truth(seq.frames().data() + 2, nowcast::kHorizon);

  const nowcast::ForecastSet baseline = nowcast::persistence_forecast(seq[1]);
  const nowcast::ForecastSet flow = nowcast::invert_and_extrapolate(seq[1], seq[0], {});

  for (const auto& [name, forecast] : {std::pair{"persistence", &baseline}, std::pair{"tvl1", &flow}}) {
    verify::Accumulator acc;
    acc.add(*forecast, truth, &baseline);
    const verify::MetricsReport r = acc.report();
    std::printf("%-12s accuracy %.3f  bias %.3f  brier %.4f  ssim %.3f  psnr %.2f dB\n", name,
                r.mean_accuracy, r.frequency_bias, r.brier_score, r.ssim, r.psnr);
  }
  render_frame(flow.frames.back(), "tvl1_last_step.png");
  return 0;
}
