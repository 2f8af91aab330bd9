// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/params.hpp"

namespace encctl {

CryptoParams CryptoParams::create(std::size_t n, std::uint64_t q,
                                  std::int64_t base, double sd, double bound) {
  CryptoParams p;
  p.ring = RingParams::create(n, q);
  p.gadget = make_gadget(q, base);
  p.dist = ErrorDist{sd, bound};
  p.dist.validate();
  return p;
}

double CryptoParams::sigma_mult() const {
  return encctl::sigma_mult(gadget.digits, static_cast<double>(degree()),
                            dist.bound, static_cast<double>(gadget.base()));
}

double sigma_mult(int digits, double n, double sigma, double base) {
  return static_cast<double>(digits) * n * sigma * base;
}

}  // namespace encctl
