// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_CONFIG_HPP
#define CLOUDCAST_CONFIG_HPP

// Run configuration shared by the command-line subcommands. Precedence is
// command-line flag > JSON config file > built-in default.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "cloudcast/flow.hpp"
#include "cloudcast/io.hpp"
#include "cloudcast/nowcast.hpp"
#include "cloudcast/pipeline.hpp"
#include "cloudcast/segmentation.hpp"
#include "cloudcast/synthetic.hpp"
#include "cloudcast/tuning.hpp"

namespace cloudcast {

struct RunConfig {
  segmentation::OpacityConfig opacity;
  flow::TvL1Params tvl1;
  pipeline::SplitSpec split;
  synthetic::SyntheticSpec synthetic;
  tuning::ParameterLattice lattice;
  std::size_t tune_origins = 20;
  std::uint64_t seed = 0;
  std::size_t steps = nowcast::kHorizon;
  std::size_t origin_stride = nowcast::kHorizon;
  double intensity_sigma = 0.0;
  std::size_t factor = 5;
  std::optional<std::pair<std::size_t, std::size_t>> crop;
  Taxonomy declared_taxonomy = Taxonomy::Reduced4;
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  j = nlohmann::json::object();
  j["opacity"] = c.opacity;
  j["tvl1"] = c.tvl1;
  j["split"] = {{"fraction", c.split.train_fraction}};
  j["synthetic"] = c.synthetic;
  j["tune"] = {{"lattice", c.lattice}, {"origins", c.tune_origins}};
  j["forecast"] = {{"steps", c.steps}, {"origin_stride", c.origin_stride},
                   {"sigma", c.intensity_sigma}};
  j["seed"] = c.seed;
  j["factor"] = c.factor;
  j["crop"] = c.crop ? nlohmann::json{c.crop->first, c.crop->second} : nlohmann::json(nullptr);
  j["taxonomy"] = std::string(to_string(c.declared_taxonomy));
}

/// Overlays the keys present in `j` onto `c`.
inline void apply_config(const nlohmann::json& j, RunConfig& c) {
  detail::require(j.is_object(), "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "opacity") {
      from_json(value, c.opacity);
    } else if (key == "tvl1") {
      from_json(value, c.tvl1);
    } else if (key == "split") {
      if (value.contains("fraction")) c.split.train_fraction = value["fraction"].get<double>();
    } else if (key == "synthetic") {
      from_json(value, c.synthetic);
    } else if (key == "tune") {
      if (value.contains("lattice")) from_json(value["lattice"], c.lattice);
      if (value.contains("origins")) c.tune_origins = value["origins"].get<std::size_t>();
    } else if (key == "forecast") {
      if (value.contains("steps")) c.steps = value["steps"].get<std::size_t>();
      if (value.contains("origin_stride")) c.origin_stride = value["origin_stride"].get<std::size_t>();
      if (value.contains("sigma")) c.intensity_sigma = value["sigma"].get<double>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
      c.synthetic.seed = c.seed;
    } else if (key == "factor") {
      c.factor = value.get<std::size_t>();
    } else if (key == "crop") {
      if (!value.is_null()) {
        const auto dims = value.get<std::vector<std::size_t>>();
        detail::require(dims.size() == 2, "crop must be [height, width]");
        c.crop = std::pair{dims[0], dims[1]};
      }
    } else if (key == "taxonomy") {
      c.declared_taxonomy = taxonomy_from_string(value.get<std::string>());
    } else {
      throw ValidationError("unknown config section '" + key + "'");
    }
  }
  detail::require(c.origin_stride >= 1, "origin_stride must be at least 1");
  detail::require(c.steps >= 1, "steps must be at least 1");
}

inline RunConfig load_config(const std::filesystem::path& path) {
  RunConfig c;
  const std::string text = read_text(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON config: " + e.what());
  }
  apply_config(j, c);
  return c;
}

}  // namespace cloudcast

#endif  // CLOUDCAST_CONFIG_HPP
