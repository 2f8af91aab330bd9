// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdlib>
#include <type_traits>

#include "doctest.h"
#include "encctl/enc_controller.hpp"
#include "encctl/errors.hpp"
#include "encctl/op_counters.hpp"

using namespace encctl;

static_assert(!std::is_invocable_v<decltype(&EncControllerNaive::step),
                                   EncControllerNaive&,
                                   const std::vector<RlweCt>&,
                                   const SecretKey&>);
static_assert(!std::is_invocable_v<decltype(&EncControllerPacked::step),
                                   EncControllerPacked&, const RlweCt&,
                                   const SecretKey&>);
static_assert(std::is_invocable_v<decltype(&EncControllerPacked::step),
                                  EncControllerPacked&, const RlweCt&>);

namespace {

struct Loop {
  FourTank fx = four_tank_fixture();
  NominalController nom = four_tank_controller(fx);
  Scales scales;
  QuantizedController qc = quantize_controller(nom, scales);
  CryptoParams params = CryptoParams::create(64);
  Prng rng{2024};
  KeyPtr key = std::make_shared<SecretKey>(keygen(params.ring, params.dist, rng));
};

// Controller driven by the measured outputs only.
QuantizedController y_only(const QuantizedController& qc) {
  QuantizedController out = qc;
  out.G = qc.G.leftCols(qc.G.cols() - static_cast<Eigen::Index>(qc.fed_back));
  out.fed_back = 0;
  return out;
}

}  // namespace

TEST_CASE("scales") {
  Scales sc;
  CHECK(static_cast<double>(sc.state_scale()) == doctest::Approx(1e-12));
  CHECK(static_cast<double>(sc.output_scale()) == doctest::Approx(1e-16));
  sc.inv_L = 0;
  CHECK_THROWS_AS(sc.validate(), ParameterError);
}

TEST_CASE("quantized controller is exact on the grid") {
  Loop lp;
  for (Eigen::Index i = 0; i < lp.nom.G.rows(); ++i) {
    for (Eigen::Index j = 0; j < lp.nom.G.cols(); ++j) {
      CHECK(static_cast<double>(lp.qc.G(i, j)) * 1e-4 ==
            doctest::Approx(lp.nom.G(i, j)).epsilon(1e-12));
    }
  }
  NominalController off = lp.nom;
  off.G(0, 0) += 3e-6;
  CHECK_THROWS_AS(quantize_controller(off, lp.scales), ParameterError);
}

TEST_CASE("sensor encoding") {
  Loop lp;
  Sensor sensor(lp.params, lp.scales, lp.key, Prng(7));
  Vec v(2);
  v << 0.5, -1.23456789;
  auto cts = sensor.encrypt(v);
  auto raw = decrypt_constants(cts, *lp.key);
  // Exact up to the encryption noise bound.
  CHECK(std::llabs(raw(0) - 5000LL * 10000LL) <= 19);
  CHECK(std::llabs(raw(1) + 12346LL * 10000LL) <= 19);
  auto layout = PackLayout::for_dims(64, {4, 2, 2});
  auto slots = decrypt_slots(sensor.encrypt_packed(v, layout), 2, layout, *lp.key);
  CHECK(std::llabs(slots(0) - 5000LL * 10000LL) <= 19);
  CHECK(std::llabs(slots(1) + 12346LL * 10000LL) <= 19);
  Actuator act(lp.params, lp.scales, lp.key);
  CHECK(act.decode(cts)(0) == doctest::Approx(5e-9).epsilon(1e-6));
}

TEST_CASE("operation counts and storage at n=4, m=p=2") {
  Loop lp;
  auto qc = y_only(lp.qc);
  Sensor sensor(lp.params, lp.scales, lp.key, Prng(8));
  Vec y(2);
  y << 0.1, -0.2;

  auto naive = EncControllerNaive::setup(qc, lp.scales, *lp.key, lp.params, lp.rng);
  CHECK(naive.keys().gsw_count() == 32);
  auto v = sensor.encrypt(y);
  OpCounts counts;
  {
    CountingScope scope(counts);
    (void)naive.step(v);
  }
  CHECK(counts.ext_product == 32);
  CHECK(counts.add == 26);
  CHECK(counts.enc == 0);
  CHECK(counts.dec == 0);

  auto packed = EncControllerPacked::setup(qc, lp.scales, *lp.key, lp.params, lp.rng);
  CHECK(packed.keys().gsw_count() == 10);
  auto vp = sensor.encrypt_packed(y, packed.layout());
  OpCounts pc;
  {
    CountingScope scope(pc);
    (void)packed.step(vp);
  }
  CHECK(pc.ext_product == 10);
  CHECK(pc.add == 8);
  CHECK(pc.unpack_ct == 2);
  CHECK(pc.enc == 0);
  CHECK(pc.dec == 0);
}

TEST_CASE("encrypted loops follow the nominal loop") {
  Loop lp;
  Sensor sensor(lp.params, lp.scales, lp.key, Prng(9));
  Actuator act(lp.params, lp.scales, lp.key);
  auto naive = EncControllerNaive::setup(lp.qc, lp.scales, *lp.key, lp.params, lp.rng);
  auto packed = EncControllerPacked::setup(lp.qc, lp.scales, *lp.key, lp.params, lp.rng);
  const auto& layout = packed.layout();
  PlantModel pn = lp.fx.plant, pp = lp.fx.plant, pnom = lp.fx.plant;
  pn.reset();
  pp.reset();
  pnom.reset();
  Vec xnom = lp.nom.x_ini;
  const std::size_t m = lp.nom.outputs();
  CHECK(initial_perturbation(decrypt_constants(naive.state(), *lp.key), lp.qc,
                             lp.scales) < 1e-9);
  double worst = 0, worst_ex = 0, worst_eu = 0;
  for (int t = 0; t < 60; ++t) {
    const Vec unom = lp.nom.H * xnom;
    Vec vnom(lp.nom.inputs());
    vnom << pnom.output(), unom;
    xnom = lp.nom.F_real() * xnom + lp.nom.G * vnom;
    pnom.advance(unom);

    const IntVec x = decrypt_constants(naive.state(), *lp.key);
    const auto u_ct = naive.output();
    const Vec u = act.decode(u_ct);
    worst_eu = std::max(worst_eu, output_perturbation(
                                      x, decrypt_constants(u_ct, *lp.key),
                                      lp.qc, lp.scales));
    Vec v(lp.nom.inputs());
    v << pn.output(), u;
    Vec vq = (quantize_output(v, lp.scales.r).cast<double>() * lp.scales.r);
    naive.update(sensor.encrypt(v));
    worst_ex = std::max(
        worst_ex, state_perturbation(x, decrypt_constants(naive.state(), *lp.key),
                                     vq, lp.nom, lp.qc, lp.scales));
    pn.advance(u);

    const Vec up = act.decode_packed(packed.output(), m, layout);
    Vec vp(lp.nom.inputs());
    vp << pp.output(), up;
    packed.update(sensor.encrypt_packed(vp, layout));
    pp.advance(up);

    worst = std::max({worst, (u - unom).cwiseAbs().maxCoeff(),
                      (up - unom).cwiseAbs().maxCoeff()});
  }
  CHECK(worst < 0.05);
  CHECK(worst_ex < 1e-6);
  CHECK(worst_eu < 1e-6);
  // The update never re-encrypts the state: only the sensor encrypts.
  OpCounts counts;
  {
    CountingScope scope(counts);
    (void)naive.output();
  }
  CHECK(counts.enc == 0);
}

TEST_CASE("shape checks") {
  Loop lp;
  auto naive = EncControllerNaive::setup(lp.qc, lp.scales, *lp.key, lp.params, lp.rng);
  CHECK_THROWS_AS(naive.update({}), ShapeError);
  QuantizedController bad = lp.qc;
  bad.x_ini.resize(3);
  CHECK_THROWS_AS(
      EncControllerNaive::setup(bad, lp.scales, *lp.key, lp.params, lp.rng),
      ShapeError);
}
