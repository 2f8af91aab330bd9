// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Per-thread instrumentation of homomorphic operations. Counting is off unless
// a CountingScope is alive on the current thread.

#pragma once

#include <cstdint>

namespace encctl {

struct OpCounts {
  std::uint64_t enc = 0;
  std::uint64_t dec = 0;
  std::uint64_t add = 0;          // ⊕ (subtraction counts too)
  std::uint64_t ext_product = 0;  // ⊡ issued directly by the caller
  std::uint64_t automorphism = 0;
  std::uint64_t unpack_ct = 0;
  std::uint64_t unpack_pt = 0;
  std::uint64_t pack = 0;
  // Work performed inside unpack_ct calls, kept apart from the direct counts.
  std::uint64_t unpack_ext_product = 0;
  std::uint64_t unpack_add = 0;

  OpCounts& operator+=(const OpCounts& o);
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

namespace internal {
OpCounts*& active_counts();
}

// Routes operation counts on this thread into `sink` for its lifetime.
class CountingScope {
 public:
  explicit CountingScope(OpCounts& sink)
      : previous_(internal::active_counts()) {
    internal::active_counts() = &sink;
  }
  ~CountingScope() { internal::active_counts() = previous_; }
  CountingScope(const CountingScope&) = delete;
  CountingScope& operator=(const CountingScope&) = delete;

 private:
  OpCounts* previous_;
};

inline void count_op(std::uint64_t OpCounts::*field, std::uint64_t k = 1) {
  if (OpCounts* c = internal::active_counts()) c->*field += k;
}

}  // namespace encctl
