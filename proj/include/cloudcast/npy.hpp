// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_NPY_HPP
#define CLOUDCAST_NPY_HPP

// Minimal reader/writer for the NumPy .npy container (format versions 1.0 and
// 2.0, little-endian, C order). Only the dtypes this toolkit exchanges are
// supported: u1, b1, f4, f8, i4, i8.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cloudcast/error.hpp"

namespace cloudcast::npy {

inline constexpr char kMagic[] = "\x93NUMPY";
inline constexpr std::size_t kMagicLen = 6;

enum class DType : std::uint8_t { U8, Bool, F32, F64, I32, I64 };

constexpr std::size_t item_size(DType t) noexcept {
  switch (t) {
    case DType::U8:
    case DType::Bool:
      return 1;
    case DType::F32:
    case DType::I32:
      return 4;
    case DType::F64:
    case DType::I64:
      return 8;
  }
  return 0;
}

constexpr std::string_view descr_of(DType t) noexcept {
  switch (t) {
    case DType::U8:
      return "|u1";
    case DType::Bool:
      return "|b1";
    case DType::F32:
      return "<f4";
    case DType::F64:
      return "<f8";
    case DType::I32:
      return "<i4";
    case DType::I64:
      return "<i8";
  }
  return "";
}

template <typename T>
constexpr DType dtype_of() {
  if constexpr (std::is_same_v<T, std::uint8_t>) return DType::U8;
  else if constexpr (std::is_same_v<T, bool>) return DType::Bool;
  else if constexpr (std::is_same_v<T, float>) return DType::F32;
  else if constexpr (std::is_same_v<T, double>) return DType::F64;
  else if constexpr (std::is_same_v<T, std::int32_t>) return DType::I32;
  else if constexpr (std::is_same_v<T, std::int64_t>) return DType::I64;
  else static_assert(sizeof(T) == 0, "unsupported npy element type");
}

/// Decoded array: shape plus raw little-endian element bytes.
struct Array {
  DType dtype = DType::U8;
  std::vector<std::size_t> shape;
  std::vector<unsigned char> bytes;

  [[nodiscard]] std::size_t count() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
  }

  /// All elements widened to double.
  [[nodiscard]] std::vector<double> as_doubles() const {
    std::vector<double> out(count());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const unsigned char* p = bytes.data() + i * item_size(dtype);
      switch (dtype) {
        case DType::U8:
        case DType::Bool:
          out[i] = static_cast<double>(*p);
          break;
        case DType::F32: {
          float v;
          std::memcpy(&v, p, 4);
          out[i] = v;
          break;
        }
        case DType::F64:
          std::memcpy(&out[i], p, 8);
          break;
        case DType::I32: {
          std::int32_t v;
          std::memcpy(&v, p, 4);
          out[i] = static_cast<double>(v);
          break;
        }
        case DType::I64: {
          std::int64_t v;
          std::memcpy(&v, p, 8);
          out[i] = static_cast<double>(v);
          break;
        }
      }
    }
    return out;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

// Value text for `key` inside the header dict literal.
inline std::string_view dict_value(std::string_view header, std::string_view key) {
  std::string quoted = "'" + std::string(key) + "'";
  std::size_t pos = header.find(quoted);
  if (pos == std::string_view::npos) {
    quoted = "\"" + std::string(key) + "\"";
    pos = header.find(quoted);
  }
  if (pos == std::string_view::npos) throw IoError("npy header lacks '" + std::string(key) + "'");
  pos = header.find(':', pos + quoted.size());
  if (pos == std::string_view::npos) throw IoError("npy header is malformed near '" + std::string(key) + "'");
  std::string_view rest = header.substr(pos + 1);
  rest = trim(rest);
  if (rest.empty()) throw IoError("npy header is truncated");
  std::size_t end = 0;
  if (rest.front() == '(') {
    end = rest.find(')');
    if (end == std::string_view::npos) throw IoError("npy shape tuple is unterminated");
    return rest.substr(0, end + 1);
  }
  if (rest.front() == '\'' || rest.front() == '"') {
    end = rest.find(rest.front(), 1);
    if (end == std::string_view::npos) throw IoError("npy header string is unterminated");
    return rest.substr(0, end + 1);
  }
  end = rest.find_first_of(",}");
  return trim(rest.substr(0, end));
}

inline DType parse_descr(std::string_view quoted) {
  std::string_view d = quoted.substr(1, quoted.size() - 2);
  if (d == "|u1" || d == "<u1" || d == "u1") return DType::U8;
  if (d == "|b1" || d == "<b1" || d == "b1") return DType::Bool;
  if (d == "<f4") return DType::F32;
  if (d == "<f8") return DType::F64;
  if (d == "<i4") return DType::I32;
  if (d == "<i8") return DType::I64;
  throw IoError("unsupported npy dtype " + std::string(quoted));
}

inline std::vector<std::size_t> parse_shape(std::string_view tuple) {
  std::vector<std::size_t> shape;
  std::string_view body = tuple.substr(1, tuple.size() - 2);
  while (!body.empty()) {
    const std::size_t comma = body.find(',');
    std::string_view item = trim(body.substr(0, comma));
    if (!item.empty()) {
      std::size_t v = 0;
      for (char c : item) {
        if (c < '0' || c > '9') throw IoError("npy shape has a non-integer entry");
        v = v * 10 + static_cast<std::size_t>(c - '0');
      }
      shape.push_back(v);
    }
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return shape;
}

}  // namespace detail

/// Parses a complete .npy image held in memory.
inline Array parse(std::span<const unsigned char> file) {
  if (file.size() < kMagicLen + 4 || std::memcmp(file.data(), kMagic, kMagicLen) != 0) {
    throw IoError("not an npy file (bad magic)");
  }
  const unsigned major = file[6];
  std::size_t header_len = 0;
  std::size_t offset = 0;
  if (major == 1) {
    header_len = file[8] | (std::size_t{file[9]} << 8);
    offset = 10;
  } else if (major == 2) {
    if (file.size() < 12) throw IoError("npy v2 preamble truncated");
    header_len = file[8] | (std::size_t{file[9]} << 8) | (std::size_t{file[10]} << 16) |
                 (std::size_t{file[11]} << 24);
    offset = 12;
  } else {
    throw IoError("unsupported npy format version " + std::to_string(major));
  }
  if (file.size() < offset + header_len) throw IoError("npy header truncated");
  const std::string_view header(reinterpret_cast<const char*>(file.data() + offset), header_len);
  if (header.find('{') == std::string_view::npos) throw IoError("npy header is not a dict");

  Array out;
  out.dtype = detail::parse_descr(detail::dict_value(header, "descr"));
  if (detail::dict_value(header, "fortran_order") != "False") {
    throw IoError("fortran-ordered npy arrays are not supported");
  }
  out.shape = detail::parse_shape(detail::dict_value(header, "shape"));
  const std::size_t payload = out.count() * item_size(out.dtype);
  const std::size_t start = offset + header_len;
  if (file.size() - start != payload) {
    throw IoError("npy payload has " + std::to_string(file.size() - start) + " bytes, expected " +
                  std::to_string(payload));
  }
  out.bytes.assign(file.begin() + static_cast<std::ptrdiff_t>(start), file.end());
  return out;
}

inline Array read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  try {
    return parse(buf);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

/// Canonical encoding: v1.0 unless the header needs more than 65535 bytes,
/// header padded with spaces so the payload starts on a 64-byte boundary.
template <typename T>
std::vector<unsigned char> encode(std::span<const std::size_t> shape, std::span<const T> values) {
  std::string dict = "{'descr': '" + std::string(descr_of(dtype_of<T>())) +
                     "', 'fortran_order': False, 'shape': (";
  std::size_t total = 1;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) dict += ",";
    if (i + 1 < shape.size()) dict += " ";
    total *= shape[i];
  }
  dict += "), }";
  if (total != values.size()) {
    throw ValidationError("npy shape does not match element count");
  }

  unsigned major = 1;
  std::size_t preamble = 10;
  std::size_t padded = ((preamble + dict.size() + 1 + 63) / 64) * 64 - preamble;
  if (padded > 0xFFFF) {
    major = 2;
    preamble = 12;
    padded = ((preamble + dict.size() + 1 + 63) / 64) * 64 - preamble;
  }
  dict.append(padded - dict.size() - 1, ' ');
  dict.push_back('\n');

  std::vector<unsigned char> out(kMagic, kMagic + kMagicLen);
  out.push_back(static_cast<unsigned char>(major));
  out.push_back(0);
  for (std::size_t b = 0; b < preamble - 8; ++b) {
    out.push_back(static_cast<unsigned char>((dict.size() >> (8 * b)) & 0xFF));
  }
  out.insert(out.end(), dict.begin(), dict.end());
  const std::size_t payload = values.size() * sizeof(T);
  const std::size_t start = out.size();
  out.resize(start + payload);
  if (payload > 0) std::memcpy(out.data() + start, values.data(), payload);
  return out;
}

inline void write_bytes(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

template <typename T>
void write(const std::filesystem::path& path, std::span<const std::size_t> shape,
           std::span<const T> values) {
  write_bytes(path, encode<T>(shape, values));
}

}  // namespace cloudcast::npy

#endif  // CLOUDCAST_NPY_HPP
