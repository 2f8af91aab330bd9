// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "encctl/gsw.hpp"

namespace encctl {

inline constexpr std::uint64_t kDefaultModulus = 72057594037948417ULL;

// Ring, gadget and error distribution shared by every ciphertext of a run.
struct CryptoParams {
  RingPtr ring;
  Gadget gadget;
  ErrorDist dist;

  static CryptoParams create(std::size_t n, std::uint64_t q = kDefaultModulus,
                             std::int64_t base = 128, double sd = 3.2,
                             double bound = 19.2);

  std::size_t degree() const { return ring->degree(); }
  std::uint64_t modulus() const { return ring->modulus(); }
  // d * N * sigma * nu
  double sigma_mult() const;
};

double sigma_mult(int digits, double n, double sigma, double base);

}  // namespace encctl
