// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "encctl/enc_controller.hpp"

namespace encctl {

// Little-endian binary blobs: a fixed header followed by length-prefixed
// coefficient arrays. Every reader checks the header against the caller's
// parameters and throws FormatError on any mismatch or truncation.
inline constexpr std::uint32_t kFormatVersion = 1;

enum class BlobKind : std::uint32_t {
  kSecretKey = 1,
  kCiphertext = 2,
  kCiphertextVector = 3,
  kGsw = 4,
  kAutomorphismKeys = 5,
  kNaiveEval = 6,
  kPackedEval = 7,
};

struct BlobHeader {
  std::uint32_t version = kFormatVersion;
  BlobKind kind = BlobKind::kSecretKey;
  std::uint64_t degree = 0;
  std::uint64_t modulus = 0;
  std::int64_t base = 0;
  double bound = 0;  // sigma
  double sd = 0;

  static BlobHeader of(const CryptoParams& params, BlobKind kind);
  friend bool operator==(const BlobHeader&, const BlobHeader&) = default;
};

BlobHeader read_header(std::string_view blob);
// Rebuilds the parameter set recorded in a header.
CryptoParams params_from_header(const BlobHeader& h);

std::string serialize(const SecretKey& key, const CryptoParams& params);
std::string serialize(const RlweCt& c, const CryptoParams& params);
std::string serialize(const std::vector<RlweCt>& c, const CryptoParams& params);
std::string serialize(const RgswCt& c, const CryptoParams& params);
std::string serialize(const AutomorphismKeySet& keys, const CryptoParams& params);
std::string serialize(const NaiveEvalKeys& keys, const CryptoParams& params);
std::string serialize(const PackedEvalKeys& keys, const CryptoParams& params);

SecretKey deserialize_secret_key(std::string_view blob, const CryptoParams& params);
RlweCt deserialize_ciphertext(std::string_view blob, const CryptoParams& params);
std::vector<RlweCt> deserialize_ciphertexts(std::string_view blob,
                                            const CryptoParams& params);
RgswCt deserialize_gsw(std::string_view blob, const CryptoParams& params);
AutomorphismKeySet deserialize_automorphism_keys(std::string_view blob,
                                                 const CryptoParams& params);
NaiveEvalKeys deserialize_naive_eval(std::string_view blob,
                                     const CryptoParams& params);
PackedEvalKeys deserialize_packed_eval(std::string_view blob,
                                       const CryptoParams& params);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

}  // namespace encctl
