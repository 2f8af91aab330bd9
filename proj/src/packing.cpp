// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/packing.hpp"

#include <algorithm>
#include <bit>
#include <utility>

#include "encctl/errors.hpp"
#include "encctl/op_counters.hpp"

namespace encctl {

PackLayout PackLayout::create(std::size_t n, std::size_t tau) {
  if (tau == 0 || !std::has_single_bit(tau) || tau > n) {
    throw ParameterError("slot count must be a power of two no larger than N");
  }
  return {tau, n / tau, std::countr_zero(tau)};
}

PackLayout PackLayout::for_dims(std::size_t n,
                                std::initializer_list<std::size_t> dims) {
  const std::size_t need = std::max<std::size_t>(1, std::max(dims));
  return create(n, std::bit_ceil(need));
}

Poly pack(const RingPtr& ring, std::span<const std::int64_t> a,
          const PackLayout& layout) {
  if (a.size() > layout.tau) {
    throw ParameterError("vector longer than the number of packing slots");
  }
  if (ring->degree() != layout.tau * layout.stride) {
    throw ParameterError("pack layout does not match the ring degree");
  }
  count_op(&OpCounts::pack);
  std::vector<std::int64_t> c(ring->degree(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) c[i * layout.stride] = a[i];
  return Poly::from_coeffs(ring, c);
}

std::size_t bit_reverse(std::size_t idx, int bits) {
  std::size_t out = 0;
  for (int b = 0; b < bits; ++b) {
    out = (out << 1) | ((idx >> b) & 1U);
  }
  return out;
}

namespace {

template <class T>
void bit_reverse_permute(std::vector<T>& v, int bits) {
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    const std::size_t br = bit_reverse(idx, bits);
    if (idx < br) std::swap(v[idx], v[br]);
  }
}

void check_k(std::size_t k, const PackLayout& layout) {
  if (k > layout.tau) throw ParameterError("k exceeds the number of slots");
}

}  // namespace

std::vector<std::int64_t> unpack_pt(const Poly& m, std::size_t k,
                                    const PackLayout& layout) {
  check_k(k, layout);
  count_op(&OpCounts::unpack_pt);
  const auto& ring = m.ring();
  const auto n = static_cast<std::int64_t>(ring->degree());
  std::vector<Poly> w(layout.tau, Poly(ring));
  w[0] = m;
  for (std::size_t zeta = layout.tau; zeta > 1; zeta /= 2) {
    for (std::size_t omega = 0; omega < layout.tau; omega += zeta) {
      w[omega] *= ring->half();
      Poly tmp = automorphism_pt(w[omega], zeta + 1);
      w[omega + zeta / 2] =
          monomial_shift(w[omega] - tmp, -n / static_cast<std::int64_t>(zeta));
      w[omega] += tmp;
    }
  }
  bit_reverse_permute(w, layout.log_tau);
  std::vector<std::int64_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = w[i][0];
  return out;
}

std::vector<RlweCt> unpack_ct(const RlweCt& c, std::size_t k,
                              const AutomorphismKeySet& keys,
                              const PackLayout& layout) {
  check_k(k, layout);
  for (auto theta : required_thetas(layout.tau)) (void)keys.at(theta);

  OpCounts* outer = internal::active_counts();
  OpCounts inner;
  std::vector<RlweCt> w(layout.tau, RlweCt{});
  {
    CountingScope scope(inner);
    const auto& ring = c.ring();
    const auto n = static_cast<std::int64_t>(ring->degree());
    w[0] = c;
    for (std::size_t zeta = layout.tau; zeta > 1; zeta /= 2) {
      const auto& key = keys.at(zeta + 1);
      const auto shift = -n / static_cast<std::int64_t>(zeta);
      for (std::size_t omega = 0; omega < layout.tau; omega += zeta) {
        w[omega] = scalar_mul(ring->half(), w[omega]);
        RlweCt tmp = ct_automorphism(w[omega], zeta + 1, key);
        w[omega + zeta / 2] =
            ct_monomial_shift(ct_add(w[omega], ct_neg(tmp)), shift);
        w[omega] = ct_add(w[omega], tmp);
      }
    }
  }
  bit_reverse_permute(w, layout.log_tau);
  w.resize(k);

  if (outer != nullptr) {
    outer->unpack_ct += 1;
    outer->unpack_ext_product += inner.ext_product;
    outer->unpack_add += inner.add;
    outer->automorphism += inner.automorphism;
  }
  return w;
}

Poly slot_project(const Poly& m, const PackLayout& layout) {
  Poly out(m.ring());
  auto& c = out.mutable_coeffs();
  for (std::size_t i = 0; i < layout.tau; ++i) {
    c[i * layout.stride] = m[i * layout.stride];
  }
  return out;
}

}  // namespace encctl
