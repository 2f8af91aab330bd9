// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/automorph.hpp"

#include <string>

#include "encctl/errors.hpp"
#include "encctl/op_counters.hpp"

namespace encctl {

AutomorphismKey gen_autokey(std::uint64_t theta, const SecretKey& key,
                            const Gadget& g, const ErrorDist& dist, Prng& rng,
                            std::int64_t error_scale) {
  if (theta % 2 == 0) throw ParameterError("automorphism index must be odd");
  if (error_scale < 1) throw ParameterError("error scale must be positive");
  const auto& ring = key.sk.ring();
  const auto cols = 2 * static_cast<std::size_t>(g.digits);
  std::vector<Poly> masks, errors;
  for (std::size_t j = 0; j < cols; ++j) {
    masks.push_back(sample_uniform(ring, rng));
    errors.push_back(sample_error(ring, dist, rng) * error_scale);
  }
  return {theta, encrypt_gsw_with(automorphism_pt(key.sk, theta), key, g,
                                  masks, errors)};
}

std::int64_t unpack_error_scale(std::uint64_t theta, KeyNoise noise) {
  if (noise == KeyNoise::kPlain || theta < 3) return 1;
  return static_cast<std::int64_t>((theta - 1) / 2);
}

RlweCt ct_automorphism(const RlweCt& c, const AutomorphismKey& key) {
  count_op(&OpCounts::automorphism);
  const Poly zero(c.ring());
  const RlweCt rotated_a{automorphism_pt(c.a, key.theta), zero};
  const RlweCt switched = external_product(key.ak, rotated_a);
  return {automorphism_pt(c.b, key.theta) - switched.b, -switched.a};
}

RlweCt ct_automorphism(const RlweCt& c, std::uint64_t theta,
                       const AutomorphismKey& key) {
  if (key.theta != theta) {
    throw KeyError("automorphism key is for theta=" +
                   std::to_string(key.theta) + ", requested " +
                   std::to_string(theta));
  }
  return ct_automorphism(c, key);
}

std::vector<std::uint64_t> required_thetas(std::size_t tau) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t z = 2; z <= tau; z *= 2) out.push_back(z + 1);
  return out;
}

AutomorphismKeySet AutomorphismKeySet::generate(std::size_t tau,
                                                const SecretKey& key,
                                                const Gadget& g,
                                                const ErrorDist& dist,
                                                Prng& rng, KeyNoise noise) {
  AutomorphismKeySet set;
  for (auto theta : required_thetas(tau)) {
    set.insert(gen_autokey(theta, key, g, dist, rng,
                           unpack_error_scale(theta, noise)));
  }
  return set;
}

void AutomorphismKeySet::insert(AutomorphismKey key) {
  const auto theta = key.theta;
  keys_.insert_or_assign(theta, std::move(key));
}

const AutomorphismKey& AutomorphismKeySet::at(std::uint64_t theta) const {
  auto it = keys_.find(theta);
  if (it == keys_.end()) {
    throw KeyError("missing automorphism key for theta=" +
                   std::to_string(theta));
  }
  return it->second;
}

}  // namespace encctl
