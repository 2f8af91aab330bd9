// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/lwe.hpp"

#include <cmath>

#include "encctl/errors.hpp"
#include "encctl/op_counters.hpp"

namespace encctl {

void ErrorDist::validate() const {
  if (!(sd > 0.0) || !(bound >= 0.0)) {
    throw ParameterError("error distribution needs sd > 0 and bound >= 0");
  }
}

std::int64_t sample_error_coeff(const ErrorDist& dist, Prng& rng) {
  for (;;) {
    const double e = std::round(rng.normal(dist.sd));
    if (std::abs(e) <= dist.bound) return static_cast<std::int64_t>(e);
  }
}

Poly sample_error(const RingPtr& ring, const ErrorDist& dist, Prng& rng) {
  Poly e(ring);
  for (auto& c : e.mutable_coeffs()) c = sample_error_coeff(dist, rng);
  return e;
}

Poly sample_error(const RingPtr& ring, const ErrorDist& dist,
                  std::uint64_t seed) {
  Prng rng(seed);
  return sample_error(ring, dist, rng);
}

Poly sample_uniform(const RingPtr& ring, Prng& rng) {
  Poly a(ring);
  const auto q = ring->modulus();
  for (auto& c : a.mutable_coeffs()) {
    c = reduce_centered(static_cast<i128>(rng.next_u64() % q), q);
  }
  return a;
}

SecretKey keygen(const RingPtr& ring, const ErrorDist& dist, Prng& rng) {
  dist.validate();
  return SecretKey{sample_error(ring, dist, rng)};
}

RlweCt encrypt_with(const Poly& m, const SecretKey& key, const Poly& mask,
                    const Poly& error) {
  count_op(&OpCounts::enc);
  return RlweCt{key.sk * mask + m + error, mask};
}

RlweCt encrypt(const Poly& m, const SecretKey& key, const ErrorDist& dist,
               Prng& rng) {
  Poly mask = sample_uniform(m.ring(), rng);
  Poly error = sample_error(m.ring(), dist, rng);
  return encrypt_with(m, key, mask, error);
}

Poly decrypt(const RlweCt& c, const SecretKey& key) {
  count_op(&OpCounts::dec);
  return c.b - key.sk * c.a;
}

RlweCt trivial_ct(const Poly& m) { return RlweCt{m, Poly(m.ring())}; }

RlweCt ct_add(const RlweCt& c1, const RlweCt& c2) {
  count_op(&OpCounts::add);
  return RlweCt{c1.b + c2.b, c1.a + c2.a};
}

RlweCt ct_sub(const RlweCt& c1, const RlweCt& c2) {
  count_op(&OpCounts::add);
  return RlweCt{c1.b - c2.b, c1.a - c2.a};
}

RlweCt ct_neg(const RlweCt& c) { return RlweCt{-c.b, -c.a}; }

RlweCt plain_mul(const Poly& k, const RlweCt& c) {
  return RlweCt{k * c.b, k * c.a};
}

RlweCt scalar_mul(std::int64_t k, const RlweCt& c) {
  return RlweCt{c.b * k, c.a * k};
}

RlweCt ct_monomial_shift(const RlweCt& c, std::int64_t e) {
  return RlweCt{monomial_shift(c.b, e), monomial_shift(c.a, e)};
}

std::int64_t div_round(i128 a, std::int64_t d) {
  const i128 dd = d;
  const i128 mag = a < 0 ? -a : a;
  const i128 r = (2 * mag + dd) / (2 * dd);
  return static_cast<std::int64_t>(a < 0 ? -r : r);
}

RlweCt encrypt_scaled(const Poly& m, std::int64_t inv_scale,
                      const SecretKey& key, const ErrorDist& dist, Prng& rng) {
  if (inv_scale <= 0) throw ParameterError("1/L must be a positive integer");
  return encrypt(m * inv_scale, key, dist, rng);
}

Poly decrypt_scaled(const RlweCt& c, std::int64_t inv_scale,
                    const SecretKey& key) {
  if (inv_scale <= 0) throw ParameterError("1/L must be a positive integer");
  Poly d = decrypt(c, key);
  for (auto& x : d.mutable_coeffs()) {
    x = reduce_centered(div_round(x, inv_scale), c.ring()->modulus());
  }
  return d;
}

}  // namespace encctl
