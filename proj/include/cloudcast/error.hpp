// Copyright 2026 The cloudcast Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOUDCAST_ERROR_HPP
#define CLOUDCAST_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cloudcast {

/// Input violates a documented precondition or invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed, or its bytes are not what we expect.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace detail
}  // namespace cloudcast

#endif  // CLOUDCAST_ERROR_HPP
