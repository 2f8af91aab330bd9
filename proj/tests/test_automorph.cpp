// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "encctl/automorph.hpp"
#include "encctl/errors.hpp"
#include "encctl/op_counters.hpp"
#include "test_util.hpp"

using namespace encctl;
using encctl::testing::kDefaultQ;
using encctl::testing::random_poly;

namespace {

struct Fixture {
  ErrorDist dist;
  RingPtr ring;
  Gadget g;
  Prng rng{21};
  SecretKey key;
  double sigma_mult;

  explicit Fixture(std::size_t n)
      : ring(RingParams::create(n, kDefaultQ)), g(make_gadget(kDefaultQ, 128)) {
    key = keygen(ring, dist, rng);
    sigma_mult = g.digits * static_cast<double>(n) * dist.bound * 128;
  }
};

}  // namespace

TEST_CASE("required automorphism indices") {
  CHECK(required_thetas(1).empty());
  CHECK(required_thetas(2) == std::vector<std::uint64_t>{3});
  CHECK(required_thetas(4) == std::vector<std::uint64_t>{3, 5});
  CHECK(required_thetas(8) == std::vector<std::uint64_t>{3, 5, 9});
}

TEST_CASE("identity key encrypts the secret itself") {
  Fixture f(16);
  auto k1 = gen_autokey(1, f.key, f.g, f.dist, f.rng);
  // Column 0 carries sk in its b-row: dec(column 0) = sk + e.
  auto m = decrypt(k1.ak.columns()[0], f.key);
  CHECK(inf_norm(m - f.key.sk) <= 19);
  CHECK_THROWS_AS(gen_autokey(4, f.key, f.g, f.dist, f.rng), ParameterError);
}

TEST_CASE("ciphertext automorphism error bound") {
  for (std::size_t n : {64, 1 << 11}) {
    Fixture f(n);
    const int trials = n == 64 ? 100 : 5;
    for (std::uint64_t theta : {3, 5, 9}) {
      auto key = gen_autokey(theta, f.key, f.g, f.dist, f.rng);
      for (int t = 0; t < trials; ++t) {
        auto c = encrypt(random_poly(f.ring, f.rng), f.key, f.dist, f.rng);
        auto expect = automorphism_pt(decrypt(c, f.key), theta);
        auto got = decrypt(ct_automorphism(c, key), f.key);
        CHECK(static_cast<double>(inf_norm(got - expect)) <= f.sigma_mult);
      }
    }
  }
}

TEST_CASE("automorphism error does not depend on input noise") {
  Fixture f(32);
  const std::uint64_t theta = 5;
  auto key = gen_autokey(theta, f.key, f.g, f.dist, f.rng);
  // Error near q/8 in the input.
  auto big = Poly::constant(f.ring, static_cast<std::int64_t>(kDefaultQ / 8));
  auto c = encrypt_with(random_poly(f.ring, f.rng), f.key,
                        random_poly(f.ring, f.rng), big);
  auto dec_c = decrypt(c, f.key);
  // Plaintext commutation: psi(b - sk a) = psi(b) - psi(sk) psi(a).
  CHECK(automorphism_pt(dec_c, theta) ==
        automorphism_pt(c.b, theta) -
            automorphism_pt(f.key.sk, theta) * automorphism_pt(c.a, theta));
  auto delta = decrypt(ct_automorphism(c, key), f.key) -
               automorphism_pt(dec_c, theta);
  CHECK(static_cast<double>(inf_norm(delta)) <= f.sigma_mult);
}

TEST_CASE("key set lookup and counting") {
  Fixture f(16);
  auto set = AutomorphismKeySet::generate(4, f.key, f.g, f.dist, f.rng);
  CHECK(set.size() == 2);
  CHECK(set.contains(3));
  CHECK(set.contains(5));
  CHECK_THROWS_AS(set.at(9), KeyError);
  auto c = encrypt(random_poly(f.ring, f.rng), f.key, f.dist, f.rng);
  CHECK_THROWS_AS(ct_automorphism(c, 5, set.at(3)), KeyError);

  OpCounts counts;
  {
    CountingScope scope(counts);
    (void)ct_automorphism(c, set.at(3));
  }
  CHECK(counts.automorphism == 1);
  CHECK(counts.ext_product == 1);
}
