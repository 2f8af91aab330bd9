// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/gsw.hpp"

#include <bit>

#include "encctl/errors.hpp"
#include "encctl/op_counters.hpp"
#include "ntt.hpp"

namespace encctl {

namespace internal {

struct GswNttCache {
  // Per column: NTT of the b and a rows plus their Shoup companions.
  std::vector<std::vector<std::uint64_t>> b, b_shoup, a, a_shoup;
};

namespace {

std::vector<std::uint64_t> to_ntt(const Poly& p, const NttTables& ntt) {
  const auto q = ntt.modulus();
  std::vector<std::uint64_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = to_unsigned(p[i], q);
  ntt.forward(out);
  return out;
}

std::vector<std::uint64_t> shoup_all(const std::vector<std::uint64_t>& v,
                                     std::uint64_t q) {
  std::vector<std::uint64_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = shoup_precompute(v[i], q);
  return out;
}

std::shared_ptr<const GswNttCache> build_cache(
    const std::vector<RlweCt>& columns) {
  const auto& ring = columns.front().ring();
  if (!ring->ntt_ready()) return nullptr;
  const auto& ntt = *ring->ntt();
  const auto q = ring->modulus();
  auto cache = std::make_shared<GswNttCache>();
  for (const auto& col : columns) {
    cache->b.push_back(to_ntt(col.b, ntt));
    cache->b_shoup.push_back(shoup_all(cache->b.back(), q));
    cache->a.push_back(to_ntt(col.a, ntt));
    cache->a_shoup.push_back(shoup_all(cache->a.back(), q));
  }
  return cache;
}

}  // namespace
}  // namespace internal

void validate_gadget(const Gadget& g, std::uint64_t q) {
  if (g.log_base < 1 || g.log_base > 31 || g.digits < 1) {
    throw ParameterError("gadget base must be 2^k with 1 <= k <= 31");
  }
  // nu^(d-1) < q <= nu^d, evaluated in bits to avoid overflow.
  const int bits = std::bit_width(q - 1);  // q <= 2^bits
  const int lower = g.log_base * (g.digits - 1);
  const bool upper_ok = g.log_base * g.digits >= bits;
  const bool lower_ok = lower < 64 && (std::uint64_t{1} << lower) < q;
  if (!upper_ok || !lower_ok) {
    throw ParameterError("gadget must satisfy nu^(d-1) < q <= nu^d");
  }
}

Gadget make_gadget(std::uint64_t q, std::int64_t base) {
  if (base < 2 || !std::has_single_bit(static_cast<std::uint64_t>(base))) {
    throw ParameterError("gadget base must be a power of two >= 2");
  }
  Gadget g;
  g.log_base = std::countr_zero(static_cast<std::uint64_t>(base));
  const int bits = std::bit_width(q - 1);
  g.digits = (bits + g.log_base - 1) / g.log_base;
  if (g.digits == 0) g.digits = 1;
  validate_gadget(g, q);
  return g;
}

std::vector<std::int64_t> decompose_scalar(std::int64_t c, const Gadget& g) {
  const std::int64_t nu = g.base();
  const std::int64_t half = nu / 2;
  std::vector<std::int64_t> out(static_cast<std::size_t>(g.digits));
  std::int64_t rest = c;
  for (int i = 0; i + 1 < g.digits; ++i) {
    std::int64_t r = rest & (nu - 1);  // rest mod nu in [0, nu)
    if (r >= half) r -= nu;
    out[static_cast<std::size_t>(i)] = r;
    rest = (rest - r) >> g.log_base;
  }
  out.back() = rest;
  return out;
}

std::vector<Poly> decompose(const RlweCt& c, const Gadget& g) {
  const auto& ring = c.ring();
  const std::size_t n = ring->degree();
  const auto d = static_cast<std::size_t>(g.digits);
  const std::int64_t nu = g.base();
  const std::int64_t half = nu / 2;
  std::vector<Poly> digits(2 * d, Poly(ring));
  std::vector<std::int64_t*> out(2 * d);
  for (std::size_t j = 0; j < 2 * d; ++j) out[j] = digits[j].mutable_coeffs().data();
  const Poly* rows[2] = {&c.b, &c.a};
  for (std::size_t row = 0; row < 2; ++row) {
    const auto src = rows[row]->coeffs();
    for (std::size_t k = 0; k < n; ++k) {
      std::int64_t rest = src[k];
      for (std::size_t i = 0; i + 1 < d; ++i) {
        std::int64_t r = rest & (nu - 1);
        r -= (r >= half) ? nu : 0;
        out[2 * i + row][k] = r;
        rest = (rest - r) >> g.log_base;
      }
      out[2 * (d - 1) + row][k] = rest;
    }
  }
  return digits;
}

RlweCt recompose(const std::vector<Poly>& digits, const Gadget& g) {
  const auto d = static_cast<std::size_t>(g.digits);
  if (digits.size() != 2 * d) throw ShapeError("expected 2d digit polynomials");
  const auto& ring = digits.front().ring();
  RlweCt out{Poly(ring), Poly(ring)};
  for (std::size_t i = d; i-- > 0;) {
    // Horner: out = out * nu + digit_i
    out.b = out.b * g.base() + digits[2 * i];
    out.a = out.a * g.base() + digits[2 * i + 1];
  }
  return out;
}

RgswCt::RgswCt(Gadget gadget, std::vector<RlweCt> columns)
    : gadget_(gadget), columns_(std::move(columns)) {
  if (columns_.size() != 2 * static_cast<std::size_t>(gadget_.digits)) {
    throw ShapeError("Ring-GSW ciphertext must have 2d columns");
  }
  validate_gadget(gadget_, columns_.front().ring()->modulus());
  cache_ = internal::build_cache(columns_);
}

RgswCt encrypt_gsw_with(const Poly& m, const SecretKey& key, const Gadget& g,
                        const std::vector<Poly>& masks,
                        const std::vector<Poly>& errors) {
  const auto cols = 2 * static_cast<std::size_t>(g.digits);
  if (masks.size() != cols || errors.size() != cols) {
    throw ShapeError("need 2d masks and 2d errors");
  }
  const Poly zero(m.ring());
  std::vector<RlweCt> columns;
  columns.reserve(cols);
  Poly scaled = m;  // M * nu^i
  for (std::size_t i = 0; i < cols / 2; ++i) {
    RlweCt cb = encrypt_with(zero, key, masks[2 * i], errors[2 * i]);
    RlweCt ca = encrypt_with(zero, key, masks[2 * i + 1], errors[2 * i + 1]);
    cb.b += scaled;
    ca.a += scaled;
    columns.push_back(std::move(cb));
    columns.push_back(std::move(ca));
    scaled *= g.base();
  }
  return RgswCt(g, std::move(columns));
}

RgswCt encrypt_gsw(const Poly& m, const SecretKey& key, const Gadget& g,
                   const ErrorDist& dist, Prng& rng) {
  const auto cols = 2 * static_cast<std::size_t>(g.digits);
  std::vector<Poly> masks, errors;
  masks.reserve(cols);
  errors.reserve(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    masks.push_back(sample_uniform(m.ring(), rng));
    errors.push_back(sample_error(m.ring(), dist, rng));
  }
  return encrypt_gsw_with(m, key, g, masks, errors);
}

namespace {

RlweCt external_product_ntt(const RgswCt& gsw,
                            const std::vector<Poly>& digits) {
  const auto& ring = gsw.ring();
  const auto& ntt = *ring->ntt();
  const auto* cache = gsw.ntt_cache();
  const auto q = ring->modulus();
  const auto two_q = 2 * q;
  const std::size_t n = ring->degree();
  std::vector<std::uint64_t> acc_b(n, 0), acc_a(n, 0), tmp(n);
  for (std::size_t j = 0; j < digits.size(); ++j) {
    if (digits[j].is_zero()) continue;
    for (std::size_t k = 0; k < n; ++k) {
      tmp[k] = internal::to_unsigned(digits[j][k], q);
    }
    ntt.forward(tmp);
    const auto& cb = cache->b[j];
    const auto& cbs = cache->b_shoup[j];
    const auto& ca = cache->a[j];
    const auto& cas = cache->a_shoup[j];
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t vb = acc_b[k] + internal::mul_shoup_lazy(tmp[k], cb[k], cbs[k], q);
      acc_b[k] = vb >= two_q ? vb - two_q : vb;
      std::uint64_t va = acc_a[k] + internal::mul_shoup_lazy(tmp[k], ca[k], cas[k], q);
      acc_a[k] = va >= two_q ? va - two_q : va;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (acc_b[k] >= q) acc_b[k] -= q;
    if (acc_a[k] >= q) acc_a[k] -= q;
  }
  ntt.inverse(acc_b);
  ntt.inverse(acc_a);
  RlweCt out{Poly(ring), Poly(ring)};
  auto& ob = out.b.mutable_coeffs();
  auto& oa = out.a.mutable_coeffs();
  for (std::size_t k = 0; k < n; ++k) {
    ob[k] = internal::to_centered(acc_b[k], q);
    oa[k] = internal::to_centered(acc_a[k], q);
  }
  return out;
}

// Schoolbook path: one 128-bit accumulator per output coefficient across all
// 2d columns, reduced once at the end.
RlweCt external_product_schoolbook(const RgswCt& gsw,
                                   const std::vector<Poly>& digits) {
  const auto& ring = gsw.ring();
  const std::size_t n = ring->degree();
  std::vector<i128> acc_b(n, 0), acc_a(n, 0);
  for (std::size_t j = 0; j < digits.size(); ++j) {
    const auto dc = digits[j].coeffs();
    const auto bc = gsw.columns()[j].b.coeffs();
    const auto ac = gsw.columns()[j].a.coeffs();
    for (std::size_t i = 0; i < n; ++i) {
      const i128 di = dc[i];
      if (di == 0) continue;
      for (std::size_t k = 0; k < n - i; ++k) {
        acc_b[i + k] += di * bc[k];
        acc_a[i + k] += di * ac[k];
      }
      for (std::size_t k = n - i; k < n; ++k) {
        acc_b[i + k - n] -= di * bc[k];
        acc_a[i + k - n] -= di * ac[k];
      }
    }
  }
  RlweCt out{Poly(ring), Poly(ring)};
  for (std::size_t k = 0; k < n; ++k) {
    out.b.mutable_coeffs()[k] = ring->reduce(acc_b[k]);
    out.a.mutable_coeffs()[k] = ring->reduce(acc_a[k]);
  }
  return out;
}

}  // namespace

RlweCt external_product(const RgswCt& gsw, const RlweCt& c) {
  if (!gsw.ring()->same_as(*c.ring())) {
    throw ParameterError("external product operands use different rings");
  }
  count_op(&OpCounts::ext_product);
  const auto digits = decompose(c, gsw.gadget());
  if (gsw.ntt_cache() != nullptr) return external_product_ntt(gsw, digits);
  return external_product_schoolbook(gsw, digits);
}

std::vector<RlweCt> gsw_matvec(const GswMatrix& k,
                               const std::vector<RlweCt>& c) {
  std::vector<RlweCt> out;
  out.reserve(k.size());
  for (const auto& row : k) {
    if (row.size() != c.size() || row.empty()) {
      throw ShapeError("GSW matrix columns must match the vector length");
    }
    RlweCt acc = external_product(row[0], c[0]);
    for (std::size_t j = 1; j < row.size(); ++j) {
      acc = ct_add(acc, external_product(row[j], c[j]));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace encctl
