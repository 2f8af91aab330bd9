// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Negacyclic NTT over Z_q with Shoup-precomputed twiddles. Operands live in
// [0, q); the transform output is in bit-reversed order, which is fine since
// it is only ever consumed by the matching inverse.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace encctl::internal {

using u128 = unsigned __int128;

inline std::uint64_t mulhi(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>((static_cast<u128>(a) * b) >> 64);
}

inline std::uint64_t shoup_precompute(std::uint64_t w, std::uint64_t q) {
  return static_cast<std::uint64_t>((static_cast<u128>(w) << 64) / q);
}

// x * w mod q in [0, 2q), given w_shoup = floor(w * 2^64 / q).
inline std::uint64_t mul_shoup_lazy(std::uint64_t x, std::uint64_t w,
                                    std::uint64_t w_shoup, std::uint64_t q) {
  return x * w - mulhi(x, w_shoup) * q;
}

inline std::uint64_t mul_shoup(std::uint64_t x, std::uint64_t w,
                               std::uint64_t w_shoup, std::uint64_t q) {
  std::uint64_t r = mul_shoup_lazy(x, w, w_shoup, q);
  return r >= q ? r - q : r;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b,
                            std::uint64_t q) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % q);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t q);

class NttTables {
 public:
  // Requires q prime and q = 1 (mod 2n).
  NttTables(std::size_t n, std::uint64_t q);

  std::size_t size() const { return n_; }
  std::uint64_t modulus() const { return q_; }
  std::uint64_t root() const { return psi_; }

  void forward(std::span<std::uint64_t> a) const;
  void inverse(std::span<std::uint64_t> a) const;

 private:
  std::size_t n_;
  std::uint64_t q_;
  std::uint64_t psi_;
  std::uint64_t n_inv_, n_inv_shoup_;
  std::vector<std::uint64_t> psi_rev_, psi_rev_shoup_;
  std::vector<std::uint64_t> psi_inv_rev_, psi_inv_rev_shoup_;
};

// Centered residue -> [0, q) and back.
inline std::uint64_t to_unsigned(std::int64_t c, std::uint64_t q) {
  return c < 0 ? static_cast<std::uint64_t>(c + static_cast<std::int64_t>(q))
               : static_cast<std::uint64_t>(c);
}

inline std::int64_t to_centered(std::uint64_t u, std::uint64_t q) {
  return u > (q - 1) / 2 ? static_cast<std::int64_t>(u) -
                               static_cast<std::int64_t>(q)
                         : static_cast<std::int64_t>(u);
}

}  // namespace encctl::internal
