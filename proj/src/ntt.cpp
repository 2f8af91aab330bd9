// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "ntt.hpp"

#include <bit>

#include "encctl/errors.hpp"

namespace encctl::internal {

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t q) {
  std::uint64_t result = 1 % q;
  base %= q;
  while (exp != 0) {
    if (exp & 1) result = mulmod(result, base, q);
    base = mulmod(base, base, q);
    exp >>= 1;
  }
  return result;
}

namespace {

std::size_t bit_reverse_index(std::size_t i, int bits) {
  std::size_t r = 0;
  for (int b = 0; b < bits; ++b) {
    r = (r << 1) | ((i >> b) & 1);
  }
  return r;
}

// Smallest primitive 2n-th root of unity found by scanning bases.
std::uint64_t find_primitive_root(std::size_t n, std::uint64_t q) {
  const std::uint64_t order = 2 * n;
  const std::uint64_t cofactor = (q - 1) / order;
  for (std::uint64_t g = 2; g < q; ++g) {
    std::uint64_t psi = powmod(g, cofactor, q);
    if (powmod(psi, n, q) == q - 1) return psi;
  }
  throw ParameterError("no primitive 2N-th root of unity modulo q");
}

}  // namespace

NttTables::NttTables(std::size_t n, std::uint64_t q) : n_(n), q_(q) {
  if (q >= (1ULL << 62)) throw ParameterError("NTT requires q < 2^62");
  if ((q - 1) % (2 * n) != 0) {
    throw ParameterError("NTT requires q = 1 mod 2N");
  }
  psi_ = find_primitive_root(n, q);
  const std::uint64_t psi_inv = powmod(psi_, 2 * n - 1, q);
  const int bits = std::countr_zero(n);

  psi_rev_.resize(n);
  psi_rev_shoup_.resize(n);
  psi_inv_rev_.resize(n);
  psi_inv_rev_shoup_.resize(n);
  std::uint64_t pw = 1, pw_inv = 1;
  std::vector<std::uint64_t> powers(n), inv_powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    powers[i] = pw;
    inv_powers[i] = pw_inv;
    pw = mulmod(pw, psi_, q);
    pw_inv = mulmod(pw_inv, psi_inv, q);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = bit_reverse_index(i, bits);
    psi_rev_[i] = powers[r];
    psi_rev_shoup_[i] = shoup_precompute(powers[r], q);
    psi_inv_rev_[i] = inv_powers[r];
    psi_inv_rev_shoup_[i] = shoup_precompute(inv_powers[r], q);
  }
  n_inv_ = powmod(n % q, q - 2, q);
  n_inv_shoup_ = shoup_precompute(n_inv_, q);
}

// Lazy butterflies keep values in [0, 4q); q < 2^62 is checked at construction.
void NttTables::forward(std::span<std::uint64_t> a) const {
  const std::uint64_t q = q_;
  const std::uint64_t two_q = 2 * q;
  std::uint64_t* x = a.data();
  std::size_t t = n_;
  for (std::size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * t;
      const std::uint64_t w = psi_rev_[m + i];
      const std::uint64_t ws = psi_rev_shoup_[m + i];
      for (std::size_t j = j1; j < j1 + t; ++j) {
        std::uint64_t u = x[j];
        u -= (u >= two_q) ? two_q : 0;
        const std::uint64_t v = mul_shoup_lazy(x[j + t], w, ws, q);
        x[j] = u + v;
        x[j + t] = u - v + two_q;
      }
    }
  }
  for (std::size_t j = 0; j < n_; ++j) {
    std::uint64_t u = x[j];
    u -= (u >= two_q) ? two_q : 0;
    u -= (u >= q) ? q : 0;
    x[j] = u;
  }
}

void NttTables::inverse(std::span<std::uint64_t> a) const {
  const std::uint64_t q = q_;
  const std::uint64_t two_q = 2 * q;
  std::uint64_t* x = a.data();
  std::size_t t = 1;
  for (std::size_t m = n_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const std::uint64_t w = psi_inv_rev_[h + i];
      const std::uint64_t ws = psi_inv_rev_shoup_[h + i];
      for (std::size_t j = j1; j < j1 + t; ++j) {
        const std::uint64_t u = x[j];
        const std::uint64_t v = x[j + t];
        std::uint64_t sum = u + v;
        sum -= (sum >= two_q) ? two_q : 0;
        x[j] = sum;
        x[j + t] = mul_shoup_lazy(u - v + two_q, w, ws, q);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (std::size_t j = 0; j < n_; ++j) {
    x[j] = mul_shoup(x[j], n_inv_, n_inv_shoup_, q);
  }
}

}  // namespace encctl::internal
