// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "encctl/lwe.hpp"

namespace encctl::testing {

inline constexpr std::uint64_t kDefaultQ = 72057594037948417ULL;

inline Poly random_poly(const RingPtr& ring, Prng& rng) {
  return sample_uniform(ring, rng);
}

inline Poly small_poly(const RingPtr& ring, Prng& rng, std::int64_t bound) {
  std::vector<std::int64_t> c(ring->degree());
  for (auto& x : c) {
    x = static_cast<std::int64_t>(rng.next_u64() % (2 * bound + 1)) - bound;
  }
  return Poly::from_coeffs(ring, c);
}

// Reference negacyclic convolution written independently of the library:
// plain int128 double loop, reduced with % at the end.
inline std::vector<std::int64_t> oracle_mul(const Poly& a, const Poly& b) {
  const std::size_t n = a.size();
  const auto q = static_cast<i128>(a.ring()->modulus());
  std::vector<i128> acc(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const i128 p = static_cast<i128>(a[i]) * b[j] % q;
      if (i + j < n) {
        acc[i + j] += p;
      } else {
        acc[i + j - n] -= p;
      }
    }
  }
  std::vector<std::int64_t> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    i128 r = ((acc[k] % q) + q) % q;
    if (2 * r >= q) r -= q;
    out[k] = static_cast<std::int64_t>(r);
  }
  return out;
}

}  // namespace encctl::testing
