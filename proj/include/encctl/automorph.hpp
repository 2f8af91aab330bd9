// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Keyed ciphertext automorphisms X -> X^theta.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "encctl/gsw.hpp"

namespace encctl {

// GSW encryption of sk(X^theta).
struct AutomorphismKey {
  std::uint64_t theta = 1;
  RgswCt ak;

  friend bool operator==(const AutomorphismKey&, const AutomorphismKey&) =
      default;
};

// error_scale multiplies every zero-encryption error of the key.
AutomorphismKey gen_autokey(std::uint64_t theta, const SecretKey& key,
                            const Gadget& g, const ErrorDist& dist, Prng& rng,
                            std::int64_t error_scale = 1);

// Key noise used by unpacking. kSlotSafe scales the error of the key for
// theta = zeta + 1 by zeta / 2, so the halvings of later unpacking levels
// divide the accumulated error exactly. kPlain keys leave odd error sums in
// the cancelled slots, which halving turns into values near q/2.
enum class KeyNoise { kSlotSafe, kPlain };

std::int64_t unpack_error_scale(std::uint64_t theta, KeyNoise noise);

// [b(X^theta); 0] - ak ⊡ [a(X^theta); 0]. Decrypts to dec(c)(X^theta) plus a
// fresh error of at most d*N*sigma*nu.
RlweCt ct_automorphism(const RlweCt& c, const AutomorphismKey& key);

// Same, but asserts the key matches the requested theta (KeyError otherwise).
RlweCt ct_automorphism(const RlweCt& c, std::uint64_t theta,
                       const AutomorphismKey& key);

// theta in {2^k + 1 : 2 <= 2^k <= tau}, ascending.
std::vector<std::uint64_t> required_thetas(std::size_t tau);

// Automorphism keys indexed by theta.
class AutomorphismKeySet {
 public:
  AutomorphismKeySet() = default;

  static AutomorphismKeySet generate(std::size_t tau, const SecretKey& key,
                                     const Gadget& g, const ErrorDist& dist,
                                     Prng& rng,
                                     KeyNoise noise = KeyNoise::kSlotSafe);

  void insert(AutomorphismKey key);
  bool contains(std::uint64_t theta) const { return keys_.count(theta) != 0; }
  // KeyError when absent.
  const AutomorphismKey& at(std::uint64_t theta) const;
  std::size_t size() const { return keys_.size(); }
  const std::map<std::uint64_t, AutomorphismKey>& keys() const { return keys_; }

  friend bool operator==(const AutomorphismKeySet&,
                         const AutomorphismKeySet&) = default;

 private:
  std::map<std::uint64_t, AutomorphismKey> keys_;
};

}  // namespace encctl
