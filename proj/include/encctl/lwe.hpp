// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Ring-LWE encryption over R_q: key generation, bounded Gaussian errors,
// Enc / Dec, homomorphic addition and plaintext multiplication.

#pragma once

#include <cstdint>
#include <random>

#include "encctl/ring.hpp"

namespace encctl {

// Seedable pseudo-random stream. Not cryptographically secure; every
// simulation records its seed so runs are reproducible.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double normal(double sd) {
    return std::normal_distribution<double>(0.0, sd)(engine_);
  }
  // Independent child stream derived from this one.
  Prng fork() { return Prng(engine_() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 engine_;
};

// Discrete Gaussian with standard deviation `sd`, truncated at `bound`.
struct ErrorDist {
  double sd = 3.2;
  double bound = 6 * 3.2;

  // Throws ParameterError unless sd > 0 and bound >= 0.
  void validate() const;
};

// Rounds a continuous N(0, sd) sample half away from zero and rejects it
// while |e| > bound.
std::int64_t sample_error_coeff(const ErrorDist& dist, Prng& rng);
Poly sample_error(const RingPtr& ring, const ErrorDist& dist, Prng& rng);
Poly sample_error(const RingPtr& ring, const ErrorDist& dist,
                  std::uint64_t seed);

// Uniform over Z_q per coefficient (64-bit draw reduced mod q).
Poly sample_uniform(const RingPtr& ring, Prng& rng);

struct SecretKey {
  Poly sk;
};

SecretKey keygen(const RingPtr& ring, const ErrorDist& dist, Prng& rng);

struct RlweCt {
  Poly b;
  Poly a;

  const RingPtr& ring() const { return b.ring(); }
  friend bool operator==(const RlweCt&, const RlweCt&) = default;
};

// [sk*a + m + e; a] with caller-supplied mask and error.
RlweCt encrypt_with(const Poly& m, const SecretKey& key, const Poly& mask,
                    const Poly& error);
RlweCt encrypt(const Poly& m, const SecretKey& key, const ErrorDist& dist,
               Prng& rng);
Poly decrypt(const RlweCt& c, const SecretKey& key);

// Transparent encryption of m (zero mask, zero error).
RlweCt trivial_ct(const Poly& m);

RlweCt ct_add(const RlweCt& c1, const RlweCt& c2);
RlweCt ct_sub(const RlweCt& c1, const RlweCt& c2);
RlweCt ct_neg(const RlweCt& c);
RlweCt plain_mul(const Poly& k, const RlweCt& c);
RlweCt scalar_mul(std::int64_t k, const RlweCt& c);
RlweCt ct_monomial_shift(const RlweCt& c, std::int64_t e);

// Scaled variants: Enc_L(m) = Enc(m / L mod q), Dec_L(c) = round(L*Dec(c))
// mod q, with 1/L = inv_scale. Exact when 1/L > 2*bound and
// ||m|| < L*q/2 - 1/2; larger messages wrap silently.
RlweCt encrypt_scaled(const Poly& m, std::int64_t inv_scale,
                      const SecretKey& key, const ErrorDist& dist, Prng& rng);
Poly decrypt_scaled(const RlweCt& c, std::int64_t inv_scale,
                    const SecretKey& key);

// round(a / d) with ties away from zero, d > 0.
std::int64_t div_round(i128 a, std::int64_t d);

}  // namespace encctl
