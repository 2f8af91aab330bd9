// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/ring.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>

#include "encctl/errors.hpp"
#include "ntt.hpp"

namespace encctl {

namespace {

std::atomic<std::uint64_t> g_schoolbook_fallbacks{0};

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic Miller-Rabin bases for all 64-bit n.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = internal::powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = internal::mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

RingParams::RingParams(std::size_t n, std::uint64_t q)
    : n_(n),
      q_(q),
      log_n_(std::countr_zero(n)),
      half_(reduce_centered((static_cast<i128>(q) + 1) / 2, q)) {
  if (q % (2 * n) == 1) {
    ntt_ = std::make_unique<internal::NttTables>(n, q);
  }
}

RingParams::~RingParams() = default;

std::shared_ptr<const RingParams> RingParams::create(std::size_t n,
                                                     std::uint64_t q) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw ParameterError("ring degree N must be a power of two");
  }
  if (q % 2 == 0 || q >= (1ULL << 62) || !is_prime_u64(q)) {
    throw ParameterError("ring modulus q must be an odd prime below 2^62");
  }
  return std::shared_ptr<const RingParams>(new RingParams(n, q));
}

std::uint64_t RingParams::schoolbook_fallbacks() {
  return g_schoolbook_fallbacks.load(std::memory_order_relaxed);
}

Poly::Poly(RingPtr ring)
    : ring_(std::move(ring)), coeffs_(ring_->degree(), 0) {}

Poly Poly::from_coeffs(RingPtr ring, std::span<const std::int64_t> coeffs) {
  if (coeffs.size() != ring->degree()) {
    throw ShapeError("coefficient count must equal N");
  }
  Poly p(std::move(ring));
  const auto q = p.ring_->modulus();
  std::ranges::transform(coeffs, p.coeffs_.begin(), [q](std::int64_t c) {
    return reduce_centered(c, q);
  });
  return p;
}

Poly Poly::constant(RingPtr ring, std::int64_t c) {
  Poly p(std::move(ring));
  p.coeffs_[0] = p.ring_->reduce(c);
  return p;
}

Poly Poly::monomial(RingPtr ring, std::int64_t e) {
  return monomial_shift(constant(std::move(ring), 1), e);
}

bool Poly::is_zero() const {
  return std::ranges::all_of(coeffs_, [](std::int64_t c) { return c == 0; });
}

void require_same_ring(const Poly& a, const Poly& b) {
  if (!a.ring() || !b.ring() || !a.ring()->same_as(*b.ring())) {
    throw ParameterError("polynomials belong to different rings");
  }
}

Poly& Poly::operator+=(const Poly& other) {
  require_same_ring(*this, other);
  const auto q = static_cast<std::int64_t>(ring_->modulus());
  const std::int64_t hi = (q - 1) / 2;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    std::int64_t s = coeffs_[i] + other.coeffs_[i];
    if (s > hi) s -= q;
    else if (s < -hi) s += q;
    coeffs_[i] = s;
  }
  return *this;
}

Poly& Poly::operator-=(const Poly& other) {
  require_same_ring(*this, other);
  const auto q = static_cast<std::int64_t>(ring_->modulus());
  const std::int64_t hi = (q - 1) / 2;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    std::int64_t s = coeffs_[i] - other.coeffs_[i];
    if (s > hi) s -= q;
    else if (s < -hi) s += q;
    coeffs_[i] = s;
  }
  return *this;
}

Poly& Poly::operator*=(const Poly& other) {
  *this = negacyclic_mul(*this, other);
  return *this;
}

Poly& Poly::operator*=(std::int64_t k) {
  const auto q = ring_->modulus();
  const std::int64_t kr = reduce_centered(k, q);
  for (auto& c : coeffs_) c = reduce_centered(static_cast<i128>(c) * kr, q);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) { return negacyclic_mul(a, b); }

Poly Poly::operator-() const {
  Poly r(ring_);
  const auto q = ring_->modulus();
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    // -(-(q-1)/2) = (q-1)/2 stays in range; plain negation suffices.
    r.coeffs_[i] = reduce_centered(-static_cast<i128>(coeffs_[i]), q);
  }
  return r;
}

Poly poly_add(const Poly& a, const Poly& b) { return a + b; }
Poly poly_sub(const Poly& a, const Poly& b) { return a - b; }

Poly schoolbook_mul(const Poly& a, const Poly& b) {
  require_same_ring(a, b);
  const std::size_t n = a.size();
  std::vector<i128> acc(n, 0);
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  for (std::size_t i = 0; i < n; ++i) {
    const i128 ai = ac[i];
    if (ai == 0) continue;
    for (std::size_t j = 0; j < n - i; ++j) acc[i + j] += ai * bc[j];
    for (std::size_t j = n - i; j < n; ++j) acc[i + j - n] -= ai * bc[j];
  }
  Poly r(a.ring());
  auto& rc = r.mutable_coeffs();
  for (std::size_t i = 0; i < n; ++i) rc[i] = a.ring()->reduce(acc[i]);
  return r;
}

Poly negacyclic_mul(const Poly& a, const Poly& b) {
  require_same_ring(a, b);
  const auto& ring = *a.ring();
  if (!ring.ntt_ready()) {
    g_schoolbook_fallbacks.fetch_add(1, std::memory_order_relaxed);
    return schoolbook_mul(a, b);
  }
  const auto q = ring.modulus();
  const std::size_t n = ring.degree();
  std::vector<std::uint64_t> fa(n), fb(n);
  for (std::size_t i = 0; i < n; ++i) {
    fa[i] = internal::to_unsigned(a[i], q);
    fb[i] = internal::to_unsigned(b[i], q);
  }
  ring.ntt()->forward(fa);
  ring.ntt()->forward(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] = internal::mulmod(fa[i], fb[i], q);
  ring.ntt()->inverse(fa);
  Poly r(a.ring());
  auto& rc = r.mutable_coeffs();
  for (std::size_t i = 0; i < n; ++i) rc[i] = internal::to_centered(fa[i], q);
  return r;
}

Poly monomial_shift(const Poly& a, std::int64_t e) {
  const auto n = static_cast<std::int64_t>(a.size());
  const std::int64_t two_n = 2 * n;
  std::int64_t k = e % two_n;
  if (k < 0) k += two_n;
  Poly r(a.ring());
  auto& rc = r.mutable_coeffs();
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t c = a[static_cast<std::size_t>(i)];
    std::int64_t j = i + k;
    bool negate = false;
    if (j >= two_n) j -= two_n;
    if (j >= n) {
      j -= n;
      negate = true;
    }
    // Centered range is symmetric for odd q, so negation never leaves it.
    rc[static_cast<std::size_t>(j)] = negate ? -c : c;
  }
  return r;
}

Poly automorphism_pt(const Poly& a, std::uint64_t theta) {
  if (theta % 2 == 0) {
    throw ParameterError("automorphism index must be odd");
  }
  const std::uint64_t n = a.size();
  const std::uint64_t two_n = 2 * n;
  const std::uint64_t t = theta % two_n;
  Poly r(a.ring());
  auto& rc = r.mutable_coeffs();
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t j = (i * t) % two_n;
    const std::int64_t c = a[i];
    if (j >= n) rc[j - n] = -c;
    else rc[j] = c;
  }
  return r;
}

std::uint64_t inf_norm(const Poly& a) {
  std::uint64_t m = 0;
  for (std::int64_t c : a.coeffs()) {
    m = std::max<std::uint64_t>(m, static_cast<std::uint64_t>(c < 0 ? -c : c));
  }
  return m;
}

}  // namespace encctl
