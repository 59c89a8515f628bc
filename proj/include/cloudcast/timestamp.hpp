// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_TIMESTAMP_HPP
#define CLOUDCAST_TIMESTAMP_HPP

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "cloudcast/error.hpp"

namespace cloudcast {

/// UTC instant with second resolution.
using Timestamp = std::chrono::sys_seconds;

/// Imaging cadence of the satellite sequences.
inline constexpr std::chrono::minutes kCadence{15};

/// True when the instant falls on a quarter hour with zero seconds.
inline bool is_cadence_aligned(Timestamp t) {
  const auto since_epoch = t.time_since_epoch();
  return since_epoch % std::chrono::duration_cast<std::chrono::seconds>(kCadence) ==
         std::chrono::seconds{0};
}

/// Parses "YYYY-MM-DDTHH:MM:SSZ". Throws ValidationError on anything else.
inline Timestamp parse_timestamp(std::string_view text) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  char tail = '\0';
  int consumed = 0;
  const std::string buf(text);
  const int fields = std::sscanf(buf.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c%n", &year, &month,
                                 &day, &hour, &minute, &second, &tail, &consumed);
  if (fields != 7 || tail != 'Z' || static_cast<std::size_t>(consumed) != buf.size() ||
      buf.size() != 20) {
    throw ValidationError("malformed timestamp '" + buf + "', expected YYYY-MM-DDTHH:MM:SSZ");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
    throw ValidationError("timestamp out of range: '" + buf + "'");
  }
  return std::chrono::sys_days{ymd} + std::chrono::hours{hour} + std::chrono::minutes{minute} +
         std::chrono::seconds{second};
}

inline std::string format_timestamp(Timestamp t) {
  const auto day = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

/// Compact form used in file names: YYYYMMDDTHHMMZ.
inline std::string compact_timestamp(Timestamp t) {
  std::string s = format_timestamp(t);
  std::string out;
  for (char c : s.substr(0, 16)) {
    if (c != '-' && c != ':') out.push_back(c);
  }
  return out + "Z";
}

}  // namespace cloudcast

#endif  // CLOUDCAST_TIMESTAMP_HPP
