// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_CLI_HPP
#define CLOUDCAST_CLI_HPP

// The `cloudcast` command-line front end. Exit status: 0 success, 1 invalid
// arguments, configuration or data, 2 I/O failure.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cloudcast/config.hpp"
#include "cloudcast/io.hpp"
#include "cloudcast/metrics.hpp"
#include "cloudcast/npy.hpp"
#include "cloudcast/nowcast.hpp"
#include "cloudcast/parallel.hpp"
#include "cloudcast/pipeline.hpp"
#include "cloudcast/render.hpp"
#include "cloudcast/segmentation.hpp"
#include "cloudcast/synthetic.hpp"
#include "cloudcast/tuning.hpp"

namespace cloudcast::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitIo = 2;

struct Args {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> timestamps;
  std::string output;
  std::string config;
  std::string method = "tvl1";
  std::optional<std::size_t> steps;
  std::optional<std::size_t> factor;
  std::optional<std::string> size;
  std::optional<double> fraction;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> flow;
  std::optional<std::size_t> frames;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
  auto parse_one = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    cloudcast::detail::require(used == s.size() && v > 0,
                               "--size must be N or HxW with positive integers, got '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  const auto x = text.find('x');
  if (x == std::string::npos) {
    const std::size_t n = parse_one(text);
    return {n, n};
  }
  return {parse_one(text.substr(0, x)), parse_one(text.substr(x + 1))};
}

inline RunConfig effective_config(const Args& a) {
  RunConfig c = a.config.empty() ? RunConfig{} : load_config(a.config);
  if (a.seed) {
    c.seed = *a.seed;
    c.synthetic.seed = *a.seed;
  }
  if (a.fraction) c.split.train_fraction = *a.fraction;
  if (a.steps) c.steps = *a.steps;
  if (a.factor) c.factor = *a.factor;
  if (a.flow) c.synthetic.motion = synthetic::parse_motion(*a.flow);
  if (a.frames) c.synthetic.frames = *a.frames;
  if (a.size) {
    const auto dims = parse_size(*a.size);
    c.crop = dims;
    c.synthetic.height = dims.first;
    c.synthetic.width = dims.second;
  }
  cloudcast::detail::require(c.steps >= 1, "--steps must be at least 1");
  return c;
}

inline fs::path output_dir(const Args& a) {
  cloudcast::detail::require(!a.output.empty(), "--output directory is required");
  const fs::path dir(a.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

inline fs::path input_at(const Args& a, std::size_t i, const char* what) {
  cloudcast::detail::require(a.inputs.size() > i, std::string("missing --input for ") + what);
  const fs::path p(a.inputs[i]);
  if (!fs::exists(p)) throw IoError("input " + p.string() + " does not exist");
  return p;
}

inline fs::path timestamps_at(const Args& a, std::size_t i, const fs::path& array) {
  const fs::path p = a.timestamps.size() > i ? fs::path(a.timestamps[i]) : sidecar_path(array);
  if (!fs::exists(p)) throw IoError("timestamp sidecar " + p.string() + " does not exist");
  return p;
}

inline LabelSequence load_input(const Args& a, const RunConfig& c, std::size_t i,
                                const char* what) {
  const fs::path array = input_at(a, i, what);
  return load_sequence(array, timestamps_at(a, i, array), c.declared_taxonomy);
}

inline void save(const LabelSequence& seq, const fs::path& dir, const std::string& stem) {
  save_sequence(seq, dir / (stem + ".npy"), dir / (stem + ".json"));
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// segment

inline std::optional<npy::Array> read_optional(const fs::path& dir, const char* name) {
  const fs::path p = dir / (std::string(name) + ".npy");
  if (!fs::exists(p)) return std::nullopt;
  return npy::read(p);
}

inline npy::Array read_required(const fs::path& dir, const char* name) {
  auto a = read_optional(dir, name);
  if (!a) throw IoError("segment input " + (dir / name).string() + ".npy is missing");
  return *a;
}

// Frame `t` of a 2-D (single scene) or 3-D (scenes × rows × cols) array.
template <typename T>
Plane<T> frame_of(const npy::Array& a, std::size_t t, std::size_t frames, const char* name) {
  std::size_t h = 0, w = 0;
  if (a.shape.size() == 2) {
    h = a.shape[0];
    w = a.shape[1];
  } else if (a.shape.size() == 3 && a.shape[0] == frames) {
    h = a.shape[1];
    w = a.shape[2];
  } else {
    throw ValidationError(std::string(name) + " must be HxW or " + std::to_string(frames) +
                          "xHxW");
  }
  const std::vector<double> all = a.as_doubles();
  const std::size_t offset = a.shape.size() == 3 ? t * h * w : 0;
  std::vector<T> data(h * w);
  for (std::size_t i = 0; i < h * w; ++i) data[i] = static_cast<T>(all[offset + i]);
  return Plane<T>(h, w, std::move(data));
}

inline int cmd_segment(const Args& a, const RunConfig& c) {
  const fs::path dir = input_at(a, 0, "segment (directory of NPY planes)");
  cloudcast::detail::require(fs::is_directory(dir), "segment --input must be a directory");
  cloudcast::detail::require(!a.timestamps.empty(), "segment needs --timestamps");
  const Sidecar meta = parse_sidecar(parse_json_file(a.timestamps[0]));
  const std::size_t frames = meta.timestamps.size();
  cloudcast::detail::require(frames > 0, "segment needs at least one timestamp");

  const char* channel_names[] = {"bt073", "bt087", "bt108", "bt120", "refl06"};
  std::map<std::string, std::optional<npy::Array>> channels;
  for (const char* n : channel_names) channels[n] = read_optional(dir, n);
  const char* nwp_names[] = {"t_surface", "t950", "t850", "t700", "t500", "t_tropopause"};
  std::map<std::string, npy::Array> nwp_arrays;
  for (const char* n : nwp_names) nwp_arrays.emplace(n, read_required(dir, n));
  const auto tcwv = read_optional(dir, "tcwv");
  const npy::Array sza = read_required(dir, "solar_zenith");
  const npy::Array vza = read_required(dir, "satellite_zenith");
  const auto land_sea = read_optional(dir, "land_sea");
  const npy::Array mask = read_required(dir, "cloud_mask");

  std::vector<LabelGrid> out;
  for (std::size_t t = 0; t < frames; ++t) {
    ChannelStack stack;
    auto chan = [&](const char* n) -> std::optional<RealPlane> {
      if (!channels[n]) return std::nullopt;
      return frame_of<double>(*channels[n], t, frames, n);
    };
    stack.bt073 = chan("bt073");
    stack.bt087 = chan("bt087");
    stack.bt108 = chan("bt108");
    stack.bt120 = chan("bt120");
    stack.refl06 = chan("refl06");
    auto nwp_plane = [&](const char* n) { return frame_of<double>(nwp_arrays.at(n), t, frames, n); };
    segmentation::NwpFields nwp{nwp_plane("t_surface"), nwp_plane("t950"), nwp_plane("t850"),
                                nwp_plane("t700"),      nwp_plane("t500"), nwp_plane("t_tropopause"),
                                std::nullopt};
    if (tcwv) nwp.total_column_water_vapour = frame_of<double>(*tcwv, t, frames, "tcwv");
    std::optional<LabelPlane> ls;
    if (land_sea) ls = frame_of<std::uint8_t>(*land_sea, t, frames, "land_sea");
    const GeoContext geo(frame_of<double>(sza, t, frames, "solar_zenith"),
                         frame_of<double>(vza, t, frames, "satellite_zenith"), std::move(ls));
    out.push_back(segmentation::segment_frame(stack, nwp, geo, c.opacity,
                                              frame_of<std::uint8_t>(mask, t, frames, "cloud_mask"),
                                              meta.timestamps[t]));
  }
  save(LabelSequence(std::move(out)), output_dir(a), "segmented");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sequence transforms

inline nlohmann::json gap_report_json(const pipeline::GapReport& r) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"start", format_timestamp(run.start)},
                    {"end", format_timestamp(run.end)},
                    {"frames", run.frames},
                    {"repaired", run.repaired}});
  }
  return {{"runs", runs}};
}

inline int cmd_repair(const Args& a, const RunConfig& c) {
  const auto [seq, report] = pipeline::repair_gaps(load_input(a, c, 0, "repair"));
  const fs::path dir = output_dir(a);
  save(seq, dir, "repaired");
  write_json(dir / "gap_report.json", gap_report_json(report));
  return kExitOk;
}

inline int cmd_split(const Args& a, const RunConfig& c) {
  const auto parts = pipeline::split(load_input(a, c, 0, "split"), c.split);
  const fs::path dir = output_dir(a);
  save(parts.train, dir, "train");
  save(parts.test, dir, "test");
  write_json(dir / "split.json", {{"fraction", c.split.train_fraction},
                                  {"boundary", format_timestamp(parts.boundary)},
                                  {"train_frames", parts.train.size()},
                                  {"test_frames", parts.test.size()}});
  return kExitOk;
}

inline int cmd_reduce(const Args& a, const RunConfig& c) {
  const LabelSequence in = load_input(a, c, 0, "reduce");
  save(segmentation::reduce_to_four(in), output_dir(a), "reduced");
  return kExitOk;
}

inline int cmd_downsample(const Args& a, const RunConfig& c) {
  save(pipeline::downsample_majority(load_input(a, c, 0, "downsample"), c.factor), output_dir(a),
       "downsampled");
  return kExitOk;
}

inline int cmd_crop(const Args& a, const RunConfig& c) {
  cloudcast::detail::require(c.crop.has_value(), "crop needs --size");
  save(pipeline::crop_center(load_input(a, c, 0, "crop"), c.crop->first, c.crop->second),
       output_dir(a), "cropped");
  return kExitOk;
}

inline int cmd_render(const Args& a, const RunConfig& c) {
  const LabelSequence seq = load_input(a, c, 0, "render");
  const fs::path dir = output_dir(a);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu_", i);
    render_frame(seq[i], dir / (name + compact_timestamp(seq[i].timestamp()) + ".png"));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// forecasting

/// Origins at least `stride` apart whose previous frame and full horizon are
/// present; falls back to the last frame when none qualifies.
inline std::vector<std::size_t> forecast_origins(const LabelSequence& seq, std::size_t steps,
                                                 std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t i : tuning::candidate_origins(seq, steps)) {
    if (out.empty() || i >= out.back() + stride) out.push_back(i);
  }
  if (out.empty()) out.push_back(seq.size() - 1);
  return out;
}

inline int cmd_forecast(const Args& a, const RunConfig& c) {
  cloudcast::detail::require(a.method == "tvl1" || a.method == "persistence",
                             "--method must be tvl1 or persistence");
  LabelSequence seq = load_input(a, c, 0, "forecast");
  if (seq.taxonomy() == Taxonomy::Full11) seq = segmentation::reduce_to_four(seq);
  const bool tvl1 = a.method == "tvl1";
  const std::vector<std::size_t> origins = forecast_origins(seq, c.steps, c.origin_stride);
  if (tvl1) {
    for (std::size_t o : origins) {
      cloudcast::detail::require(o >= 1 && seq[o - 1].timestamp() + kCadence == seq[o].timestamp(),
                                 "tvl1 forecast from " + format_timestamp(seq[o].timestamp()) +
                                     " needs the frame 15 minutes earlier");
    }
  }

  std::vector<nowcast::ForecastSet> sets(origins.size());
  parallel_for(origins.size(), [&](std::size_t j) {
    const std::size_t o = origins[j];
    sets[j] = tvl1 ? nowcast::invert_and_extrapolate(seq[o], seq[o - 1], c.tvl1, c.steps,
                                                     c.intensity_sigma)
                   : nowcast::persistence_forecast(seq[o], c.steps);
  });

  const fs::path dir = output_dir(a);
  nlohmann::json index = nlohmann::json::array();
  for (const nowcast::ForecastSet& f : sets) {
    const std::string stem = "forecast_" + compact_timestamp(f.origin);
    save(LabelSequence(f.frames), dir, stem);
    index.push_back({{"origin", format_timestamp(f.origin)},
                     {"array", stem + ".npy"},
                     {"timestamps", stem + ".json"}});
  }
  write_json(dir / "forecasts.json", {{"method", a.method},
                                      {"steps", c.steps},
                                      {"forecasts", index},
                                      {"config", c}});
  return kExitOk;
}

inline int cmd_tune(const Args& a, const RunConfig& c) {
  LabelSequence train = load_input(a, c, 0, "tune");
  if (train.taxonomy() == Taxonomy::Full11) train = segmentation::reduce_to_four(train);
  tuning::TuneOptions opts;
  opts.origins = c.tune_origins;
  opts.steps = c.steps;
  opts.seed = c.seed;
  const tuning::TuneResult result = tuning::tune_tvl1(train, c.lattice, opts);
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  const fs::path dir = output_dir(a);
  write_json(dir / "tvl1_params.json", result.best);
  nlohmann::json report = result;
  report["config"] = c;
  write_json(dir / "tuning_report.json", report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluation

inline std::vector<nowcast::ForecastSet> load_forecasts(const fs::path& input,
                                                        const std::optional<fs::path>& stamps,
                                                        const RunConfig& c) {
  std::vector<nowcast::ForecastSet> out;
  auto load_one = [&](const fs::path& array, const fs::path& meta) {
    LabelSequence seq = load_sequence(array, meta, c.declared_taxonomy);
    if (seq.taxonomy() == Taxonomy::Full11) seq = segmentation::reduce_to_four(seq);
    out.push_back({seq.front().timestamp() - kCadence, seq.frames(), std::nullopt});
  };
  if (fs::is_directory(input)) {
    const fs::path index_path = input / "forecasts.json";
    const nlohmann::json index = parse_json_file(index_path);
    cloudcast::detail::require(index.contains("forecasts") && index["forecasts"].is_array(),
                               index_path.string() + " lacks a 'forecasts' list");
    for (const auto& entry : index["forecasts"]) {
      load_one(input / entry.at("array").get<std::string>(),
               input / entry.at("timestamps").get<std::string>());
    }
  } else {
    load_one(input, stamps ? *stamps : sidecar_path(input));
  }
  return out;
}

inline int cmd_eval(const Args& a, const RunConfig& c) {
  cloudcast::detail::require(a.inputs.size() == 2,
                             "eval needs --input <predictions> --input <truth>");
  const fs::path pred_path = input_at(a, 0, "eval predictions");
  std::optional<fs::path> pred_stamps;
  if (!a.timestamps.empty()) pred_stamps = fs::path(a.timestamps[0]);
  const std::vector<nowcast::ForecastSet> forecasts = load_forecasts(pred_path, pred_stamps, c);
  LabelSequence truth = load_input(a, c, 1, "eval truth");
  if (truth.taxonomy() == Taxonomy::Full11) truth = segmentation::reduce_to_four(truth);

  verify::Accumulator acc;
  std::size_t skipped = 0;
  for (const nowcast::ForecastSet& f : forecasts) {
    std::vector<LabelGrid> observed;
    for (const LabelGrid& g : f.frames) {
      const auto idx = truth.find(g.timestamp());
      if (!idx) break;
      observed.push_back(truth[*idx]);
    }
    if (observed.size() != f.frames.size()) {
      ++skipped;
      continue;
    }
    const auto origin = truth.find(f.origin);
    if (origin) {
      const nowcast::ForecastSet ref = nowcast::persistence_forecast(truth[*origin], f.steps());
      acc.add(f, observed, &ref);
    } else {
      acc.add(f, observed);
    }
  }
  cloudcast::detail::require(acc.forecasts() > 0, "no forecast has matching truth frames");
  const verify::MetricsReport report = acc.report();

  const fs::path dir = output_dir(a);
  nlohmann::json j = report;
  j["skipped_forecasts"] = skipped;
  j["config"] = c;
  write_json(dir / "metrics.json", j);
  write_text(dir / "per_step.csv", verify::per_step_csv(report));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synthetic data

inline int cmd_synth(const Args& a, const RunConfig& c) {
  const synthetic::SyntheticData data = synthetic::generate_synthetic(c.synthetic);
  const fs::path dir = output_dir(a);
  save(data.sequence, dir, "synthetic");
  const std::array<std::size_t, 3> shape{2, data.truth.height(), data.truth.width()};
  std::vector<double> uv(data.truth.u.values().begin(), data.truth.u.values().end());
  uv.insert(uv.end(), data.truth.v.values().begin(), data.truth.v.values().end());
  npy::write<double>(dir / "true_flow.npy", shape, uv);
  write_json(dir / "synthetic_spec.json", c.synthetic);
  return kExitOk;
}

}  // namespace detail

inline const std::map<std::string, std::string>& subcommands() {
  static const std::map<std::string, std::string> table{
      {"segment", "label scenes from channel, NWP, geometry and cloud-mask NPY planes"},
      {"repair", "fill short gaps in a label sequence"},
      {"split", "temporal train/test split"},
      {"reduce", "group the 11 cloud types into 4 height classes"},
      {"downsample", "majority-vote spatial downsampling"},
      {"crop", "centre crop"},
      {"forecast", "nowcast 16 steps with tvl1 or persistence"},
      {"tune", "grid-search TV-L1 parameters on a training sequence"},
      {"eval", "score forecasts against observed frames"},
      {"synth", "generate a synthetic sequence with known motion"},
      {"render", "write PNG class maps"},
  };
  return table;
}

inline int dispatch(const Args& a) {
  const RunConfig c = detail::effective_config(a);
  if (a.command == "segment") return detail::cmd_segment(a, c);
  if (a.command == "repair") return detail::cmd_repair(a, c);
  if (a.command == "split") return detail::cmd_split(a, c);
  if (a.command == "reduce") return detail::cmd_reduce(a, c);
  if (a.command == "downsample") return detail::cmd_downsample(a, c);
  if (a.command == "crop") return detail::cmd_crop(a, c);
  if (a.command == "forecast") return detail::cmd_forecast(a, c);
  if (a.command == "tune") return detail::cmd_tune(a, c);
  if (a.command == "eval") return detail::cmd_eval(a, c);
  if (a.command == "synth") return detail::cmd_synth(a, c);
  if (a.command == "render") return detail::cmd_render(a, c);
  throw ValidationError("unknown subcommand '" + a.command + "'");
}

inline int run(int argc, const char* const* argv) {
  CLI::App app{"Cloud-type nowcasting and verification toolkit", "cloudcast"};
  app.require_subcommand(1);
  Args args;
  for (const auto& [name, help] : subcommands()) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--input", args.inputs, "input array/directory (repeat for eval: predictions, truth)");
    sub->add_option("--timestamps", args.timestamps, "JSON timestamp sidecar(s); default <input>.json");
    sub->add_option("--output", args.output, "output directory");
    sub->add_option("--config", args.config, "JSON config file");
    sub->add_option("--method", args.method, "forecast method: tvl1 | persistence");
    sub->add_option("--steps", args.steps, "forecast horizon in 15-minute steps");
    sub->add_option("--factor", args.factor, "downsampling factor");
    sub->add_option("--size", args.size, "crop / synthetic size, N or HxW");
    sub->add_option("--fraction", args.fraction, "train fraction for split");
    sub->add_option("--seed", args.seed, "random seed");
    sub->add_option("--flow", args.flow, "synthetic motion: translation:vx,vy | rotation:cx,cy,omega");
    sub->add_option("--frames", args.frames, "synthetic frame count");
    sub->callback([&args, sub] { args.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    return dispatch(args);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad JSON content: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace cloudcast::cli

#endif  // CLOUDCAST_CLI_HPP
