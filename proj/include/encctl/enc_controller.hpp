// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Encrypted linear controllers over Ring-LWE / Ring-GSW. The controller
// objects hold only ciphertexts and evaluation keys; the secret key lives in
// the Sensor and Actuator.

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "encctl/control.hpp"
#include "encctl/packing.hpp"
#include "encctl/params.hpp"

namespace encctl {

// r: sensor quantization step; s = 1/inv_s: parameter scale;
// L = 1/inv_L: error headroom scale.
struct Scales {
  double r = 1e-4;
  std::int64_t inv_s = 10000;
  std::int64_t inv_L = 10000;

  double s() const { return 1.0 / static_cast<double>(inv_s); }
  double L() const { return 1.0 / static_cast<double>(inv_L); }
  // r * s * L, the scale of the decrypted state.
  long double state_scale() const;
  // r * s^2 * L, the scale of the decrypted output.
  long double output_scale() const;
  void validate() const;
};

// F, G/s, H/s and x_ini/(r s) as integers.
struct QuantizedController {
  IntMat F, G, H;
  IntVec x_ini;
  std::size_t fed_back = 0;

  std::size_t states() const { return static_cast<std::size_t>(F.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(G.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(H.rows()); }
};

// ParameterError when G/s, H/s or x_ini/(r s) are not integral.
QuantizedController quantize_controller(const NominalController& c,
                                        const Scales& scales);

using KeyPtr = std::shared_ptr<const SecretKey>;

// Quantizes and encrypts controller inputs.
class Sensor {
 public:
  Sensor(CryptoParams params, Scales scales, KeyPtr key, Prng rng);

  // One ciphertext per entry: Enc(round(v_i / r) / L).
  std::vector<RlweCt> encrypt(const Vec& v);
  // Enc(Pack(round(v / r) / L)).
  RlweCt encrypt_packed(const Vec& v, const PackLayout& layout);

 private:
  CryptoParams params_;
  Scales scales_;
  KeyPtr key_;
  Prng rng_;
};

// Decrypts and rescales controller outputs.
class Actuator {
 public:
  Actuator(CryptoParams params, Scales scales, KeyPtr key);

  // u_i = r s^2 L * (constant term of dec(u_i)).
  Vec decode(const std::vector<RlweCt>& u) const;
  // u = r s^2 L * unpack_pt(dec(u)).
  Vec decode_packed(const RlweCt& u, std::size_t m,
                    const PackLayout& layout) const;

 private:
  CryptoParams params_;
  Scales scales_;
  KeyPtr key_;
};

// Parameter ciphertexts of the entry-wise controller.
struct NaiveEvalKeys {
  GswMatrix FG;  // n x (n + p): [F, G/s]
  GswMatrix H;   // m x n: H/s

  std::size_t gsw_count() const;
};

// Parameter ciphertexts of the packed controller plus automorphism keys.
struct PackedEvalKeys {
  PackLayout layout;
  std::vector<RgswCt> F;  // column i: Enc'(Pack_n(F_i))
  std::vector<RgswCt> G;  // column i: Enc'(Pack_n(G_i / s))
  std::vector<RgswCt> H;  // column i: Enc'(Pack_m(H_i / s))
  AutomorphismKeySet autokeys;
  std::size_t outputs = 0;

  std::size_t gsw_count() const { return F.size() + G.size() + H.size(); }
};

class EncControllerNaive {
 public:
  // Offline: encrypts F, G/s, H/s and x_ini / (r s L).
  static EncControllerNaive setup(const QuantizedController& qc,
                                  const Scales& scales, const SecretKey& key,
                                  const CryptoParams& params, Prng& rng);

  EncControllerNaive(NaiveEvalKeys keys, std::vector<RlweCt> state);

  // u(t) = H x(t).
  std::vector<RlweCt> output() const;
  // x(t+1) = F x(t) + G v(t).
  void update(const std::vector<RlweCt>& v);
  // output() then update(v). Returns u(t).
  std::vector<RlweCt> step(const std::vector<RlweCt>& v);

  const std::vector<RlweCt>& state() const { return x_; }
  const NaiveEvalKeys& keys() const { return keys_; }
  std::size_t states() const { return x_.size(); }
  std::size_t inputs() const;
  std::size_t outputs() const { return keys_.H.size(); }

 private:
  NaiveEvalKeys keys_;
  std::vector<RlweCt> x_;
};

class EncControllerPacked {
 public:
  // Offline: packs and encrypts the columns of F, G/s, H/s and x_ini.
  // Automorphism keys for the layout are generated with slot-safe noise.
  static EncControllerPacked setup(const QuantizedController& qc,
                                   const Scales& scales, const SecretKey& key,
                                   const CryptoParams& params, Prng& rng);

  EncControllerPacked(PackedEvalKeys keys, RlweCt state, std::size_t inputs);

  // Unpacks x(t) and returns u(t) = sum H_i ⊡ x_i.
  RlweCt output();
  // Unpacks v(t) and sets x(t+1) = sum F_i ⊡ x_i ⊕ sum G_i ⊡ v_i, reusing the
  // unpacked state from output() when present.
  void update(const RlweCt& v);
  RlweCt step(const RlweCt& v);

  const RlweCt& state() const { return x_; }
  const PackedEvalKeys& keys() const { return keys_; }
  const PackLayout& layout() const { return keys_.layout; }
  std::size_t states() const { return keys_.F.size(); }
  std::size_t inputs() const { return keys_.G.size(); }
  std::size_t outputs() const { return keys_.outputs; }

 private:
  const std::vector<RlweCt>& unpacked_state();

  PackedEvalKeys keys_;
  RlweCt x_;
  std::vector<RlweCt> xs_;
};

// Key-holder side probes for white-box analysis.

// Centered constant terms of dec(c_i).
IntVec decrypt_constants(const std::vector<RlweCt>& c, const SecretKey& key);
// First k slots of dec(c).
IntVec decrypt_slots(const RlweCt& c, std::size_t k, const PackLayout& layout,
                     const SecretKey& key);

// Row i, column k: r s L * (coefficient k of dec(x_i)).
Mat coeff_trace(const std::vector<RlweCt>& x, const Scales& scales,
                const SecretKey& key);

// Perturbations of the equivalent real-valued controller, computed from the
// raw decrypted integers so the only rounding is the final scaling.
//   e_ini = r s L X(0) - x_ini
//   e_x   = r s L X(t+1) - (F r s L X(t) + G v(t))
//   e_u   = r s^2 L U(t) - H r s L X(t)
double initial_perturbation(const IntVec& x0, const QuantizedController& qc,
                            const Scales& scales);
double state_perturbation(const IntVec& x, const IntVec& x_next, const Vec& v,
                          const NominalController& c,
                          const QuantizedController& qc, const Scales& scales);
double output_perturbation(const IntVec& x, const IntVec& u,
                           const QuantizedController& qc, const Scales& scales);

}  // namespace encctl
