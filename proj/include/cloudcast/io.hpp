// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_IO_HPP
#define CLOUDCAST_IO_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cloudcast/grids.hpp"
#include "cloudcast/npy.hpp"

namespace cloudcast {

/// Sidecar path conventionally paired with an array file: same stem, ".json".
inline std::filesystem::path sidecar_path(const std::filesystem::path& array_path) {
  std::filesystem::path p = array_path;
  return p.replace_extension(".json");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": invalid JSON: " + e.what());
  }
}

/// Canonical on-disk pair for a sequence: NPY bytes and sidecar text.
struct EncodedSequence {
  std::vector<unsigned char> array;
  std::string sidecar;
};

inline EncodedSequence encode_sequence(const LabelSequence& seq) {
  detail::require(!seq.empty(), "cannot serialise an empty sequence");
  const std::array<std::size_t, 3> shape{seq.size(), seq.height(), seq.width()};
  std::vector<std::uint8_t> payload;
  payload.reserve(seq.size() * seq.height() * seq.width());
  nlohmann::json stamps = nlohmann::json::array();
  for (const LabelGrid& g : seq) {
    payload.insert(payload.end(), g.labels().values().begin(), g.labels().values().end());
    stamps.push_back(format_timestamp(g.timestamp()));
  }
  nlohmann::json meta;
  meta["timestamps"] = std::move(stamps);
  meta["taxonomy"] = std::string(to_string(seq.taxonomy()));
  return {npy::encode<std::uint8_t>(shape, payload), meta.dump(2) + "\n"};
}

/// Builds a sequence from a decoded T×H×W u8 array and its timestamps.
/// Taxonomy is Full11 whenever a label exceeds 3, otherwise `declared`.
inline LabelSequence decode_sequence(const npy::Array& array, const std::vector<Timestamp>& stamps,
                                     Taxonomy declared) {
  if (array.dtype != npy::DType::U8) throw IoError("label array must have dtype u1");
  if (array.shape.size() != 3) {
    throw IoError("label array must be 3-D (T×H×W), got " + std::to_string(array.shape.size()) +
                  " dimensions");
  }
  const std::size_t t = array.shape[0], h = array.shape[1], w = array.shape[2];
  if (stamps.size() != t) {
    throw ValidationError("array holds " + std::to_string(t) + " frames but " +
                          std::to_string(stamps.size()) + " timestamps were given");
  }
  detail::require(t > 0 && h > 0 && w > 0, "label array has an empty dimension");
  std::uint8_t max_label = 0;
  for (unsigned char b : array.bytes) max_label = std::max<std::uint8_t>(max_label, b);
  if (max_label >= cardinality(Taxonomy::Full11)) {
    throw ValidationError("label " + std::to_string(max_label) + " is outside the 0-10 class range");
  }
  const Taxonomy taxonomy = max_label > 3 ? Taxonomy::Full11 : declared;

  std::vector<LabelGrid> frames;
  frames.reserve(t);
  const std::size_t plane = h * w;
  for (std::size_t i = 0; i < t; ++i) {
    std::vector<std::uint8_t> data(array.bytes.begin() + static_cast<std::ptrdiff_t>(i * plane),
                                   array.bytes.begin() + static_cast<std::ptrdiff_t>((i + 1) * plane));
    frames.emplace_back(LabelPlane(h, w, std::move(data)), taxonomy, stamps[i]);
  }
  return LabelSequence(std::move(frames));
}

struct Sidecar {
  std::vector<Timestamp> timestamps;
  std::optional<Taxonomy> taxonomy;
};

inline Sidecar parse_sidecar(const nlohmann::json& meta) {
  if (!meta.is_object() || !meta.contains("timestamps") || !meta["timestamps"].is_array()) {
    throw ValidationError("timestamp sidecar must be an object with a 'timestamps' array");
  }
  Sidecar out;
  for (const auto& s : meta["timestamps"]) {
    if (!s.is_string()) throw ValidationError("timestamps must be ISO-8601 strings");
    out.timestamps.push_back(parse_timestamp(s.get<std::string>()));
  }
  if (meta.contains("taxonomy")) out.taxonomy = taxonomy_from_string(meta["taxonomy"].get<std::string>());
  return out;
}

/// Reads an NPY label array and its JSON timestamp sidecar.
inline LabelSequence load_sequence(const std::filesystem::path& path,
                                   const std::filesystem::path& meta_path,
                                   Taxonomy declared = Taxonomy::Reduced4) {
  const npy::Array array = npy::read(path);
  const Sidecar meta = parse_sidecar(parse_json_file(meta_path));
  LabelSequence seq = decode_sequence(array, meta.timestamps, meta.taxonomy.value_or(declared));
  return seq;
}

inline void save_sequence(const LabelSequence& seq, const std::filesystem::path& path,
                          const std::filesystem::path& meta_path) {
  const EncodedSequence enc = encode_sequence(seq);
  npy::write_bytes(path, enc.array);
  write_text(meta_path, enc.sidecar);
}

}  // namespace cloudcast

#endif  // CLOUDCAST_IO_HPP
