// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Ring-GSW encryption and the external product with Ring-LWE ciphertexts.

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "encctl/lwe.hpp"

namespace encctl {

// Decomposition base nu = 2^log_base and digit count d, with
// nu^(d-1) < q <= nu^d.
struct Gadget {
  int log_base = 7;
  int digits = 9;

  std::int64_t base() const { return std::int64_t{1} << log_base; }
  friend bool operator==(const Gadget&, const Gadget&) = default;
};

// Smallest d with nu^d >= q. Throws ParameterError if nu is not a power of
// two >= 2.
Gadget make_gadget(std::uint64_t q, std::int64_t base);
void validate_gadget(const Gadget& g, std::uint64_t q);

// Balanced base-nu digits of a centered residue: digits 0..d-2 lie in
// [-nu/2, nu/2), the top digit takes the remainder (|top| <= nu/2).
std::vector<std::int64_t> decompose_scalar(std::int64_t c, const Gadget& g);

// D(c) = [b_0; a_0; b_1; a_1; ...; b_{d-1}; a_{d-1}] with c = sum_i
// [b_i; a_i] * nu^i exactly on centered representatives.
std::vector<Poly> decompose(const RlweCt& c, const Gadget& g);

// G * D(c): recombines a decomposition (inverse of decompose).
RlweCt recompose(const std::vector<Poly>& digits, const Gadget& g);

namespace internal {
struct GswNttCache;
}

// 2 x 2d matrix stored as 2d Ring-LWE columns; column 2i carries M*nu^i in
// its b-row, column 2i+1 in its a-row.
class RgswCt {
 public:
  RgswCt() = default;
  RgswCt(Gadget gadget, std::vector<RlweCt> columns);

  const Gadget& gadget() const { return gadget_; }
  const std::vector<RlweCt>& columns() const { return columns_; }
  const RingPtr& ring() const { return columns_.front().ring(); }
  const internal::GswNttCache* ntt_cache() const { return cache_.get(); }

  friend bool operator==(const RgswCt& x, const RgswCt& y) {
    return x.gadget_ == y.gadget_ && x.columns_ == y.columns_;
  }

 private:
  Gadget gadget_;
  std::vector<RlweCt> columns_;
  std::shared_ptr<const internal::GswNttCache> cache_;
};

// M*G + [Enc(0) ... Enc(0)] with caller-supplied masks and errors (2d each).
RgswCt encrypt_gsw_with(const Poly& m, const SecretKey& key, const Gadget& g,
                        const std::vector<Poly>& masks,
                        const std::vector<Poly>& errors);
RgswCt encrypt_gsw(const Poly& m, const SecretKey& key, const Gadget& g,
                   const ErrorDist& dist, Prng& rng);

// C ⊡ c := C * D(c) mod q. Fresh error bounded by d*N*sigma*nu.
RlweCt external_product(const RgswCt& gsw, const RlweCt& c);

using GswMatrix = std::vector<std::vector<RgswCt>>;

// Row i: ⊕_j K[i][j] ⊡ c[j], summed in ascending j.
std::vector<RlweCt> gsw_matvec(const GswMatrix& k,
                               const std::vector<RlweCt>& c);

}  // namespace encctl
