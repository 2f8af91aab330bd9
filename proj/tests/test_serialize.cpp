// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "encctl/errors.hpp"
#include "encctl/serialize.hpp"

using namespace encctl;

namespace {

struct Fixture {
  CryptoParams params = CryptoParams::create(64);
  Prng rng{99};
  SecretKey key = keygen(params.ring, params.dist, rng);
  QuantizedController qc = quantize_controller(
      four_tank_controller(four_tank_fixture()), Scales{});
};

}  // namespace

TEST_CASE("header layout") {
  Fixture f;
  const auto blob = serialize(f.key, f.params);
  CHECK(blob.substr(0, 4) == "ENCT");
  // version 1, little-endian
  CHECK(static_cast<unsigned char>(blob[4]) == 1);
  CHECK(blob[5] == 0);
  const auto h = read_header(blob);
  CHECK(h.kind == BlobKind::kSecretKey);
  CHECK(h.degree == 64);
  CHECK(h.modulus == kDefaultModulus);
  CHECK(h.bound == 19.2);
  CHECK(h.sd == 3.2);
  CHECK(h.base == 128);
  auto p = params_from_header(h);
  CHECK(p.gadget.digits == f.params.gadget.digits);
  // header + length + N coefficients
  CHECK(blob.size() == 4 + 4 + 4 + 8 * 5 + 8 + 8 * 64);
}

TEST_CASE("round trips are bit-exact") {
  Fixture f;
  CHECK(deserialize_secret_key(serialize(f.key, f.params), f.params).sk == f.key.sk);
  auto c = encrypt(Poly::constant(f.params.ring, 42), f.key, f.params.dist, f.rng);
  CHECK(deserialize_ciphertext(serialize(c, f.params), f.params) == c);
  std::vector<RlweCt> cs{c, c, trivial_ct(Poly::constant(f.params.ring, -7))};
  CHECK(deserialize_ciphertexts(serialize(cs, f.params), f.params) == cs);
  auto g = encrypt_gsw(Poly::constant(f.params.ring, 3), f.key, f.params.gadget,
                       f.params.dist, f.rng);
  auto g2 = deserialize_gsw(serialize(g, f.params), f.params);
  CHECK(g2 == g);
  // The rebuilt NTT cache gives identical products.
  CHECK(external_product(g2, c) == external_product(g, c));

  auto naive = EncControllerNaive::setup(f.qc, Scales{}, f.key, f.params, f.rng);
  auto nk = deserialize_naive_eval(serialize(naive.keys(), f.params), f.params);
  CHECK(nk.FG == naive.keys().FG);
  CHECK(nk.H == naive.keys().H);

  auto packed = EncControllerPacked::setup(f.qc, Scales{}, f.key, f.params, f.rng);
  auto pk = deserialize_packed_eval(serialize(packed.keys(), f.params), f.params);
  CHECK(pk.layout.tau == packed.layout().tau);
  CHECK(pk.outputs == packed.outputs());
  CHECK(pk.F == packed.keys().F);
  CHECK(pk.G == packed.keys().G);
  CHECK(pk.H == packed.keys().H);
  CHECK(pk.autokeys == packed.keys().autokeys);
  CHECK(deserialize_automorphism_keys(serialize(pk.autokeys, f.params), f.params) ==
        pk.autokeys);
}

TEST_CASE("malformed blobs are rejected") {
  Fixture f;
  const auto blob = serialize(f.key, f.params);
  CHECK_THROWS_AS(deserialize_secret_key(blob.substr(0, blob.size() - 1), f.params),
                  FormatError);
  CHECK_THROWS_AS(deserialize_secret_key(blob + "x", f.params), FormatError);
  auto bad_magic = blob;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_secret_key(bad_magic, f.params), FormatError);
  auto bad_version = blob;
  bad_version[4] = 2;
  CHECK_THROWS_AS(deserialize_secret_key(bad_version, f.params), FormatError);
  // Wrong kind.
  CHECK_THROWS_AS(deserialize_ciphertext(blob, f.params), FormatError);
  // Parameter mismatch.
  CHECK_THROWS_AS(deserialize_secret_key(blob, CryptoParams::create(128)),
                  FormatError);
  CHECK_THROWS_AS(
      deserialize_secret_key(blob, CryptoParams::create(64, kDefaultModulus, 128, 3.0)),
      FormatError);
  // Coefficient outside the centered range.
  auto big = blob;
  for (int i = 0; i < 8; ++i) big[big.size() - 8 + i] = static_cast<char>(0x7f);
  CHECK_THROWS_AS(deserialize_secret_key(big, f.params), FormatError);
  CHECK_THROWS_AS(read_header("EN"), FormatError);
}

TEST_CASE("files") {
  Fixture f;
  const std::string path = "test_serialize_key.bin";
  write_file(path, serialize(f.key, f.params));
  CHECK(deserialize_secret_key(read_file(path), f.params).sk == f.key.sk);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_file("/nonexistent/dir/key.bin"), FormatError);
}
