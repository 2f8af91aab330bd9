// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Arithmetic in R_q = Z_q[X]/(X^N + 1) with coefficients stored as centered
// residues in [-q/2, q/2).

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace encctl {

namespace internal {
class NttTables;
}

using i128 = __int128;

// Centered reduction a mod q := a - floor((a + q/2) / q) * q, for odd q.
inline std::int64_t reduce_centered(i128 a, std::uint64_t q) {
  const auto qq = static_cast<i128>(q);
  i128 r = a % qq;
  if (r < 0) r += qq;
  if (r > (qq - 1) / 2) r -= qq;
  return static_cast<std::int64_t>(r);
}

bool is_prime_u64(std::uint64_t n);

// Ring parameters shared by all polynomials of one ring. Immutable after
// construction; hold through RingPtr.
class RingParams {
 public:
  // Throws ParameterError unless n is a power of two (n >= 1), q is an odd
  // prime and q < 2^62.
  static std::shared_ptr<const RingParams> create(std::size_t n,
                                                  std::uint64_t q);

  ~RingParams();
  RingParams(const RingParams&) = delete;
  RingParams& operator=(const RingParams&) = delete;

  std::size_t degree() const { return n_; }
  std::uint64_t modulus() const { return q_; }
  int log_degree() const { return log_n_; }

  // True iff q = 1 (mod 2N); multiplication then runs through the NTT.
  bool ntt_ready() const { return ntt_ != nullptr; }
  const internal::NttTables* ntt() const { return ntt_.get(); }

  // (q + 1) / 2, the inverse of two in Z_q (centered).
  std::int64_t half() const { return half_; }

  std::int64_t reduce(i128 a) const { return reduce_centered(a, q_); }

  bool same_as(const RingParams& other) const {
    return n_ == other.n_ && q_ == other.q_;
  }

  // Number of products computed by the schoolbook path because the ring was
  // not NTT-ready. Process-wide diagnostics.
  static std::uint64_t schoolbook_fallbacks();

 private:
  RingParams(std::size_t n, std::uint64_t q);

  std::size_t n_;
  std::uint64_t q_;
  int log_n_;
  std::int64_t half_;
  std::unique_ptr<internal::NttTables> ntt_;
};

using RingPtr = std::shared_ptr<const RingParams>;

class Poly {
 public:
  Poly() = default;
  explicit Poly(RingPtr ring);  // zero polynomial

  // Coefficients are reduced to centered residues; throws ShapeError if the
  // length differs from N.
  static Poly from_coeffs(RingPtr ring, std::span<const std::int64_t> coeffs);
  static Poly constant(RingPtr ring, std::int64_t c);
  // X^e for any integer e (negative exponents allowed).
  static Poly monomial(RingPtr ring, std::int64_t e);

  const RingPtr& ring() const { return ring_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const std::int64_t> coeffs() const { return coeffs_; }
  std::int64_t operator[](std::size_t i) const { return coeffs_[i]; }

  // Raw access for callers that keep the centered invariant themselves.
  std::vector<std::int64_t>& mutable_coeffs() { return coeffs_; }

  bool is_zero() const;

  Poly& operator+=(const Poly& other);
  Poly& operator-=(const Poly& other);
  Poly& operator*=(const Poly& other);
  Poly& operator*=(std::int64_t k);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, std::int64_t k) { return a *= k; }
  friend Poly operator*(std::int64_t k, Poly a) { return a *= k; }
  Poly operator-() const;

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.ring_->same_as(*b.ring_) && a.coeffs_ == b.coeffs_;
  }

 private:
  RingPtr ring_;
  std::vector<std::int64_t> coeffs_;
};

void require_same_ring(const Poly& a, const Poly& b);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);

// Product in R_q. Uses the negacyclic NTT when the ring is NTT-ready and the
// schoolbook convolution otherwise; both give identical results.
Poly negacyclic_mul(const Poly& a, const Poly& b);

// Schoolbook negacyclic convolution with 128-bit accumulation.
Poly schoolbook_mul(const Poly& a, const Poly& b);

// a * X^e using X^N = -1.
Poly monomial_shift(const Poly& a, std::int64_t e);

// a(X^theta) for odd theta; ParameterError on even theta.
Poly automorphism_pt(const Poly& a, std::uint64_t theta);

std::uint64_t inf_norm(const Poly& a);

}  // namespace encctl
