// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <array>
#include <cstring>
#include <string>
#include <vector>

#include "cloudcast/npy.hpp"

namespace cloudcast::npy {
namespace {

std::vector<unsigned char> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::vector<unsigned char> v1_file(const std::string& header, std::vector<unsigned char> payload) {
  std::string pre("\x93NUMPY\x01\x00", 8);
  pre.push_back(static_cast<char>(header.size() & 0xFF));
  pre.push_back(static_cast<char>(header.size() >> 8));
  auto out = bytes_of(pre + header);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

TEST(Npy, CanonicalHeaderBytes) {
  const std::array<std::size_t, 3> shape{1, 2, 2};
  const std::vector<std::uint8_t> values{0, 1, 2, 3};
  const auto enc = encode<std::uint8_t>(shape, values);
  ASSERT_EQ(enc.size(), 128u + 4u);
  EXPECT_EQ(std::memcmp(enc.data(), "\x93NUMPY\x01\x00", 8), 0);
  const std::size_t hlen = enc[8] | (enc[9] << 8);
  EXPECT_EQ((10 + hlen) % 64, 0u);
  const std::string header(enc.begin() + 10, enc.begin() + 10 + static_cast<long>(hlen));
  const std::string dict = "{'descr': '|u1', 'fortran_order': False, 'shape': (1, 2, 2), }";
  EXPECT_EQ(header.substr(0, dict.size()), dict);
  EXPECT_EQ(header.back(), '\n');
  for (std::size_t i = dict.size(); i + 1 < header.size(); ++i) EXPECT_EQ(header[i], ' ');
}

TEST(Npy, OneDimensionalShapeHasTrailingComma) {
  const std::array<std::size_t, 1> shape{3};
  const std::vector<double> values{1.0, 2.5, -3.0};
  const auto enc = encode<double>(shape, values);
  const std::string text(enc.begin(), enc.end());
  EXPECT_NE(text.find("'descr': '<f8'"), std::string::npos);
  EXPECT_NE(text.find("'shape': (3,)"), std::string::npos);
  const Array a = parse(enc);
  EXPECT_EQ(a.dtype, DType::F64);
  EXPECT_EQ(a.as_doubles(), values);
}

TEST(Npy, ParsesNumpyStyleHeaders) {
  // Header as written by numpy, with a different key order and no trailing comma.
  std::string h = "{'fortran_order': False, 'shape': (2, 3), 'descr': '<i4'}";
  h.append(118 - h.size() - 1, ' ');
  h.push_back('\n');
  std::vector<unsigned char> payload(24, 0);
  const std::int32_t v = -7;
  std::memcpy(payload.data() + 20, &v, 4);
  const Array a = parse(v1_file(h, payload));
  EXPECT_EQ(a.shape, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(a.as_doubles().back(), -7.0);
}

TEST(Npy, ParsesVersionTwo) {
  std::string h = "{'descr': '|b1', 'fortran_order': False, 'shape': (2,), }";
  h.append(116 - h.size() - 1, ' ');
  h.push_back('\n');
  std::string pre("\x93NUMPY\x02\x00", 8);
  pre.push_back(static_cast<char>(h.size()));
  pre.append(3, '\0');
  auto file = bytes_of(pre + h);
  file.push_back(1);
  file.push_back(0);
  const Array a = parse(file);
  EXPECT_EQ(a.dtype, DType::Bool);
  EXPECT_EQ(a.as_doubles(), (std::vector<double>{1.0, 0.0}));
}

TEST(Npy, RejectsMalformed) {
  EXPECT_THROW(parse(bytes_of("hello world, not npy")), IoError);
  const std::string dict = "{'descr': '|u1', 'fortran_order': False, 'shape': (2, 2), }\n";
  EXPECT_THROW(parse(v1_file(dict, {0, 1, 2})), IoError);         // short payload
  EXPECT_THROW(parse(v1_file(dict, {0, 1, 2, 3, 4})), IoError);   // long payload
  const std::string fortran = "{'descr': '|u1', 'fortran_order': True, 'shape': (2, 2), }\n";
  EXPECT_THROW(parse(v1_file(fortran, {0, 1, 2, 3})), IoError);
  const std::string odd = "{'descr': '<c16', 'fortran_order': False, 'shape': (1,), }\n";
  EXPECT_THROW(parse(v1_file(odd, std::vector<unsigned char>(16))), IoError);
  const std::string noshape = "{'descr': '|u1', 'fortran_order': False}\n";
  EXPECT_THROW(parse(v1_file(noshape, {})), IoError);
  auto truncated = v1_file(dict, {0, 1, 2, 3});
  truncated.resize(20);
  EXPECT_THROW(parse(truncated), IoError);
}

TEST(Npy, EncodeRejectsCountMismatch) {
  const std::array<std::size_t, 2> shape{2, 2};
  const std::vector<std::uint8_t> values{1, 2, 3};
  EXPECT_THROW(encode<std::uint8_t>(shape, values), ValidationError);
}

TEST(Npy, FloatRoundTrip) {
  const std::array<std::size_t, 2> shape{2, 2};
  const std::vector<float> values{1.5f, -0.25f, 300.0f, 0.0f};
  const Array a = parse(encode<float>(shape, values));
  EXPECT_EQ(a.dtype, DType::F32);
  EXPECT_EQ(a.as_doubles(), (std::vector<double>{1.5, -0.25, 300.0, 0.0}));
}

}  // namespace
}  // namespace cloudcast::npy
