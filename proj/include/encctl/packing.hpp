// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Coefficient-slot packing: vectors live at X^(i*N/tau).

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "encctl/automorph.hpp"

namespace encctl {

struct PackLayout {
  std::size_t tau = 1;     // slot count, power of two
  std::size_t stride = 1;  // N / tau
  int log_tau = 0;

  // Throws ParameterError unless tau is a power of two with tau <= n.
  static PackLayout create(std::size_t n, std::size_t tau);
  // Smallest power of two >= max(dims).
  static PackLayout for_dims(std::size_t n, std::initializer_list<std::size_t> dims);

  friend bool operator==(const PackLayout&, const PackLayout&) = default;
};

// sum_i a_i X^(i*stride); ParameterError if a.size() > tau.
Poly pack(const RingPtr& ring, std::span<const std::int64_t> a,
          const PackLayout& layout);

// Divide-and-conquer slot extraction followed by bit-reverse reordering.
// Returns the first k slot values; exact for any m.
std::vector<std::int64_t> unpack_pt(const Poly& m, std::size_t k,
                                    const PackLayout& layout);

// Reverses the low `bits` binary digits of idx.
std::size_t bit_reverse(std::size_t idx, int bits);

// Homomorphic unpack_pt: the constant term of dec(result[i]) carries slot i
// of dec(c), with fresh error at most log2(tau) * sigma_mult.
std::vector<RlweCt> unpack_ct(const RlweCt& c, std::size_t k,
                              const AutomorphismKeySet& keys,
                              const PackLayout& layout);

// Zeroes every non-slot coefficient.
Poly slot_project(const Poly& m, const PackLayout& layout);

}  // namespace encctl
