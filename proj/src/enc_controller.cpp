// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/enc_controller.hpp"

#include <cmath>

#include "encctl/errors.hpp"

namespace encctl {

using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

long double Scales::state_scale() const {
  return static_cast<long double>(r) / static_cast<long double>(inv_s) /
         static_cast<long double>(inv_L);
}

long double Scales::output_scale() const {
  return state_scale() / static_cast<long double>(inv_s);
}

void Scales::validate() const {
  if (!(r > 0) || !std::isfinite(r)) {
    throw ParameterError("quantization step r must be positive");
  }
  if (inv_s < 1 || inv_L < 1) {
    throw ParameterError("1/s and 1/L must be positive integers");
  }
}

namespace {

std::int64_t exact_integer(double value, const char* what) {
  const double k = std::round(value);
  if (std::abs(value - k) > 1e-6 * std::max(1.0, std::abs(value)) ||
      std::abs(k) > 4e18) {
    throw ParameterError(std::string(what) + " is not integral at scale s");
  }
  return static_cast<std::int64_t>(k);
}

Poly constant_mod(const RingPtr& ring, i128 v) {
  return Poly::constant(ring, ring->reduce(v));
}

IntVec column(const IntMat& m, Eigen::Index j) { return m.col(j); }

Poly pack_vec(const RingPtr& ring, const IntVec& v, const PackLayout& layout,
              std::int64_t factor = 1) {
  std::vector<std::int64_t> vals(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    vals[static_cast<std::size_t>(i)] =
        ring->reduce(static_cast<i128>(v(i)) * factor);
  }
  return pack(ring, vals, layout);
}

}  // namespace

QuantizedController quantize_controller(const NominalController& c,
                                        const Scales& scales) {
  c.validate();
  scales.validate();
  QuantizedController qc;
  qc.F = c.F;
  qc.fed_back = c.fed_back;
  const auto inv_s = static_cast<double>(scales.inv_s);
  qc.G.resize(c.G.rows(), c.G.cols());
  for (Eigen::Index i = 0; i < c.G.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.G.cols(); ++j) {
      qc.G(i, j) = exact_integer(c.G(i, j) * inv_s, "G");
    }
  }
  qc.H.resize(c.H.rows(), c.H.cols());
  for (Eigen::Index i = 0; i < c.H.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.H.cols(); ++j) {
      qc.H(i, j) = exact_integer(c.H(i, j) * inv_s, "H");
    }
  }
  qc.x_ini.resize(c.x_ini.size());
  for (Eigen::Index i = 0; i < c.x_ini.size(); ++i) {
    qc.x_ini(i) =
        exact_integer(c.x_ini(i) * inv_s / scales.r, "initial state / r");
  }
  return qc;
}

Sensor::Sensor(CryptoParams params, Scales scales, KeyPtr key, Prng rng)
    : params_(std::move(params)),
      scales_(scales),
      key_(std::move(key)),
      rng_(rng) {
  scales_.validate();
}

std::vector<RlweCt> Sensor::encrypt(const Vec& v) {
  std::vector<RlweCt> out;
  out.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const i128 m = static_cast<i128>(quantize_scalar(v(i), scales_.r)) *
                   scales_.inv_L;
    out.push_back(encctl::encrypt(constant_mod(params_.ring, m), *key_, params_.dist,
                          rng_));
  }
  return out;
}

RlweCt Sensor::encrypt_packed(const Vec& v, const PackLayout& layout) {
  return encctl::encrypt(pack_vec(params_.ring, quantize_output(v, scales_.r), layout,
                          scales_.inv_L),
                 *key_, params_.dist, rng_);
}

Actuator::Actuator(CryptoParams params, Scales scales, KeyPtr key)
    : params_(std::move(params)), scales_(scales), key_(std::move(key)) {
  scales_.validate();
}

Vec Actuator::decode(const std::vector<RlweCt>& u) const {
  const IntVec raw = decrypt_constants(u, *key_);
  Vec out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    out(i) = static_cast<double>(static_cast<long double>(raw(i)) *
                                 scales_.output_scale());
  }
  return out;
}

Vec Actuator::decode_packed(const RlweCt& u, std::size_t m,
                            const PackLayout& layout) const {
  const IntVec raw = decrypt_slots(u, m, layout, *key_);
  Vec out(raw.size());
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    out(i) = static_cast<double>(static_cast<long double>(raw(i)) *
                                 scales_.output_scale());
  }
  return out;
}

std::size_t NaiveEvalKeys::gsw_count() const {
  std::size_t k = 0;
  for (const auto& row : FG) k += row.size();
  for (const auto& row : H) k += row.size();
  return k;
}

EncControllerNaive EncControllerNaive::setup(const QuantizedController& qc,
                                             const Scales& scales,
                                             const SecretKey& key,
                                             const CryptoParams& params,
                                             Prng& rng) {
  scales.validate();
  const auto& ring = params.ring;
  const auto n = qc.F.rows();
  const auto p = qc.G.cols();
  const auto m = qc.H.rows();
  if (qc.F.cols() != n || qc.G.rows() != n || qc.H.cols() != n ||
      qc.x_ini.size() != n) {
    throw ShapeError("controller matrices do not conform");
  }
  auto gsw_const = [&](std::int64_t v) {
    return encrypt_gsw(constant_mod(ring, v), key, params.gadget, params.dist,
                       rng);
  };
  NaiveEvalKeys keys;
  keys.FG.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& row = keys.FG[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) row.push_back(gsw_const(qc.F(i, j)));
    for (Eigen::Index j = 0; j < p; ++j) row.push_back(gsw_const(qc.G(i, j)));
  }
  keys.H.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      keys.H[static_cast<std::size_t>(i)].push_back(gsw_const(qc.H(i, j)));
    }
  }
  std::vector<RlweCt> x;
  for (Eigen::Index i = 0; i < n; ++i) {
    x.push_back(encrypt(
        constant_mod(ring, static_cast<i128>(qc.x_ini(i)) * scales.inv_L), key,
        params.dist, rng));
  }
  return EncControllerNaive(std::move(keys), std::move(x));
}

EncControllerNaive::EncControllerNaive(NaiveEvalKeys keys,
                                       std::vector<RlweCt> state)
    : keys_(std::move(keys)), x_(std::move(state)) {
  if (keys_.FG.size() != x_.size() || keys_.FG.empty() ||
      keys_.FG[0].size() < x_.size()) {
    throw ShapeError("state size does not match the parameter ciphertexts");
  }
  for (const auto& row : keys_.H) {
    if (row.size() != x_.size()) throw ShapeError("H has wrong width");
  }
}

std::size_t EncControllerNaive::inputs() const {
  return keys_.FG[0].size() - x_.size();
}

std::vector<RlweCt> EncControllerNaive::output() const {
  return gsw_matvec(keys_.H, x_);
}

void EncControllerNaive::update(const std::vector<RlweCt>& v) {
  if (v.size() != inputs()) throw ShapeError("controller input has wrong size");
  std::vector<RlweCt> xv = x_;
  xv.insert(xv.end(), v.begin(), v.end());
  x_ = gsw_matvec(keys_.FG, xv);
}

std::vector<RlweCt> EncControllerNaive::step(const std::vector<RlweCt>& v) {
  std::vector<RlweCt> u = output();
  update(v);
  return u;
}

EncControllerPacked EncControllerPacked::setup(const QuantizedController& qc,
                                               const Scales& scales,
                                               const SecretKey& key,
                                               const CryptoParams& params,
                                               Prng& rng) {
  scales.validate();
  const auto& ring = params.ring;
  const auto n = qc.F.rows();
  const auto p = qc.G.cols();
  const auto m = qc.H.rows();
  if (qc.F.cols() != n || qc.G.rows() != n || qc.H.cols() != n ||
      qc.x_ini.size() != n) {
    throw ShapeError("controller matrices do not conform");
  }
  PackedEvalKeys keys;
  keys.layout = PackLayout::for_dims(
      params.degree(), {static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                        static_cast<std::size_t>(p)});
  keys.outputs = static_cast<std::size_t>(m);
  auto gsw_col = [&](const IntVec& col) {
    return encrypt_gsw(pack_vec(ring, col, keys.layout), key, params.gadget,
                       params.dist, rng);
  };
  for (Eigen::Index i = 0; i < n; ++i) keys.F.push_back(gsw_col(column(qc.F, i)));
  for (Eigen::Index i = 0; i < p; ++i) keys.G.push_back(gsw_col(column(qc.G, i)));
  for (Eigen::Index i = 0; i < n; ++i) keys.H.push_back(gsw_col(column(qc.H, i)));
  keys.autokeys = AutomorphismKeySet::generate(keys.layout.tau, key,
                                               params.gadget, params.dist, rng);
  RlweCt x = encrypt(pack_vec(ring, qc.x_ini, keys.layout, scales.inv_L), key,
                     params.dist, rng);
  return EncControllerPacked(std::move(keys), std::move(x),
                             static_cast<std::size_t>(p));
}

EncControllerPacked::EncControllerPacked(PackedEvalKeys keys, RlweCt state,
                                         std::size_t inputs)
    : keys_(std::move(keys)), x_(std::move(state)) {
  if (keys_.F.empty() || keys_.H.size() != keys_.F.size() ||
      keys_.G.size() != inputs) {
    throw ShapeError("packed parameter ciphertexts do not conform");
  }
  const std::size_t tau = keys_.layout.tau;
  if (keys_.F.size() > tau || inputs > tau || keys_.outputs > tau) {
    throw ShapeError("dimensions exceed the packing slots");
  }
  for (auto theta : required_thetas(tau)) (void)keys_.autokeys.at(theta);
}

const std::vector<RlweCt>& EncControllerPacked::unpacked_state() {
  if (xs_.empty()) xs_ = unpack_ct(x_, states(), keys_.autokeys, keys_.layout);
  return xs_;
}

RlweCt EncControllerPacked::output() {
  const auto& xs = unpacked_state();
  RlweCt u = external_product(keys_.H[0], xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    u = ct_add(u, external_product(keys_.H[i], xs[i]));
  }
  return u;
}

void EncControllerPacked::update(const RlweCt& v) {
  const auto& xs = unpacked_state();
  const auto vs = unpack_ct(v, inputs(), keys_.autokeys, keys_.layout);
  RlweCt next = external_product(keys_.F[0], xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    next = ct_add(next, external_product(keys_.F[i], xs[i]));
  }
  for (std::size_t i = 0; i < vs.size(); ++i) {
    next = ct_add(next, external_product(keys_.G[i], vs[i]));
  }
  x_ = std::move(next);
  xs_.clear();
}

RlweCt EncControllerPacked::step(const RlweCt& v) {
  RlweCt u = output();
  update(v);
  return u;
}

IntVec decrypt_constants(const std::vector<RlweCt>& c, const SecretKey& key) {
  IntVec out(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = decrypt(c[i], key)[0];
  }
  return out;
}

IntVec decrypt_slots(const RlweCt& c, std::size_t k, const PackLayout& layout,
                     const SecretKey& key) {
  const auto slots = unpack_pt(decrypt(c, key), k, layout);
  IntVec out(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) out(static_cast<Eigen::Index>(i)) = slots[i];
  return out;
}

Mat coeff_trace(const std::vector<RlweCt>& x, const Scales& scales,
                const SecretKey& key) {
  if (x.empty()) return Mat();
  const auto n = static_cast<Eigen::Index>(x[0].ring()->degree());
  Mat out(static_cast<Eigen::Index>(x.size()), n);
  const long double sc = scales.state_scale();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Poly m = decrypt(x[i], key);
    for (Eigen::Index k = 0; k < n; ++k) {
      out(static_cast<Eigen::Index>(i), k) =
          static_cast<double>(m[static_cast<std::size_t>(k)] * sc);
    }
  }
  return out;
}

namespace {

double max_abs(const LVec& v) {
  long double m = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::fabs(v(i)));
  return static_cast<double>(m);
}

}  // namespace

double initial_perturbation(const IntVec& x0, const QuantizedController& qc,
                            const Scales& scales) {
  LVec e(x0.size());
  for (Eigen::Index i = 0; i < x0.size(); ++i) {
    const i128 d = static_cast<i128>(x0(i)) -
                   static_cast<i128>(qc.x_ini(i)) * scales.inv_L;
    e(i) = static_cast<long double>(d) * scales.state_scale();
  }
  return max_abs(e);
}

double state_perturbation(const IntVec& x, const IntVec& x_next, const Vec& v,
                          const NominalController& c,
                          const QuantizedController& qc, const Scales& scales) {
  const auto n = x.size();
  LVec e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    i128 d = x_next(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      d -= static_cast<i128>(qc.F(i, j)) * x(j);
    }
    long double gv = 0;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      gv += static_cast<long double>(c.G(i, j)) * v(j);
    }
    e(i) = static_cast<long double>(d) * scales.state_scale() - gv;
  }
  return max_abs(e);
}

double output_perturbation(const IntVec& x, const IntVec& u,
                           const QuantizedController& qc, const Scales& scales) {
  LVec e(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    i128 d = u(i);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      d -= static_cast<i128>(qc.H(i, j)) * x(j);
    }
    e(i) = static_cast<long double>(d) * scales.output_scale();
  }
  return max_abs(e);
}

}  // namespace encctl
