// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace encctl {

// Mismatched or invalid ring / gadget / scale parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Matrix or vector dimensions that do not conform.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A required automorphism key is absent or does not match the request.
class KeyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integer state-matrix conversion failed (complex / repeated eigenvalues,
// or the transformed matrix is not integral within tolerance).
class ConversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed-loop matrix is not Schur stable.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized data or I/O failure.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace encctl
