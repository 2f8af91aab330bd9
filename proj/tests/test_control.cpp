// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "encctl/control.hpp"
#include "encctl/errors.hpp"

using namespace encctl;

TEST_CASE("plant step") {
  auto fx = four_tank_fixture();
  auto p = fx.plant;
  p.x = Vec::Zero(4);
  auto [x0, y0] = plant_step(p, Vec::Zero(2));
  CHECK(x0.isZero());
  CHECK(y0.isZero());

  p.x = Vec::Ones(4);
  Vec u(2);
  u << 0.3, -0.2;
  auto [x1, y1] = plant_step(p, u);
  CHECK(x1(0) == doctest::Approx(0.9984 + 0.0042 + 0.0083 * 0.3));
  CHECK(y1(0) == doctest::Approx(0.5));

  // x(t) = A^t x0 + sum_k A^(t-1-k) B u(k)
  p.x = p.x_ini;
  std::vector<Vec> us;
  for (int t = 0; t < 10; ++t) {
    Vec ut(2);
    ut << std::sin(t), std::cos(3.0 * t);
    us.push_back(ut);
    p.advance(ut);
  }
  Vec expect = Vec::Zero(4);
  Mat pw = Mat::Identity(4, 4);
  for (int k = 9; k >= 0; --k) {
    expect += pw * p.B * us[static_cast<std::size_t>(k)];
    pw = p.A * pw;
  }
  expect += pw * p.x_ini;
  CHECK((p.x - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("output quantization") {
  Vec y(3);
  y << 0.0, 0.12345, -0.12345;
  auto q = quantize_output(y, 1e-4);
  CHECK(q(0) == 0);
  CHECK(q(1) == 1235);
  CHECK(q(2) == -1235);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::sin(0.37 * i) * 3;
    CHECK(std::abs(1e-4 * static_cast<double>(quantize_scalar(v, 1e-4)) - v) <=
          0.5e-4 + 1e-15);
  }
  CHECK_THROWS_AS(quantize_scalar(1.0, 0.0), ParameterError);
}

TEST_CASE("four-tank fixture") {
  auto fx = four_tank_fixture();
  Vec both(8);
  both << fx.plant.x_ini, fx.x_ini;
  CHECK(inf_norm(both) == 1.0);
  CHECK(fx.plant.C(0, 0) == 0.5);
  CHECK(fx.plant.C(1, 1) == 0.5);
  CHECK(spectral_radius(fx.plant.A) < 1.0);
}

TEST_CASE("modal conversion of the four-tank controller") {
  auto fx = four_tank_fixture();
  const auto& p = fx.plant;
  // The printed four-decimal gains miss the integer spectrum by ~4e-5.
  CHECK_THROWS_AS(modal_convert(p.A, p.B, p.C, fx.K, fx.L_obs, fx.R),
                  ConversionError);
  auto m = modal_convert(p.A, p.B, p.C, fx.K, fx.L_obs, fx.R,
                         kFourTankModalTolerance);
  IntMat f = IntMat::Zero(4, 4);
  f.diagonal() << -1, 0, 1, 2;
  CHECK(m.F == f);
  CHECK(m.residual < 1e-4);
  const double expect[] = {-1, 0, 1, 2};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(m.eigenvalues(i) - expect[i]) < 1e-4);

  // Along the observer-form trajectory, x = T z satisfies the modal
  // recursion step by step and produces the same input.
  const Mat ac = p.A + p.B * fx.K - fx.L_obs * p.C - fx.R * fx.K;
  const Mat tinv = m.T.inverse();
  const Mat f_exact = m.T * ac * tinv;
  Mat lr(4, 4);
  lr << fx.L_obs, fx.R;
  Vec z = tinv * fx.x_ini;
  auto plant = p;
  for (int t = 0; t < 1000; ++t) {
    const Vec u_obs = fx.K * z;
    const Vec x = m.T * z;
    REQUIRE((u_obs - m.H * x).cwiseAbs().maxCoeff() < 1e-9);
    Vec v(4);
    v << plant.output(), u_obs;
    z = ac * z + lr * v;
    REQUIRE((m.T * z - (f_exact * x + m.G * v)).cwiseAbs().maxCoeff() < 1e-9);
    plant.advance(u_obs);
  }
}

TEST_CASE("identity-like system gives an identity transform") {
  Mat a = Mat::Zero(3, 3);
  a.diagonal() << 1, 2, 3;
  Mat b = Mat::Zero(3, 1), c = Mat::Zero(1, 3), k = Mat::Zero(1, 3),
      l = Mat::Zero(3, 1), r = Mat::Zero(3, 1);
  auto m = modal_convert(a, b, c, k, l, r);
  CHECK((m.T - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m.F(2, 2) == 3);

  Mat rot(2, 2);
  rot << 0, -1, 1, 0;
  Mat z2 = Mat::Zero(2, 1), z2r = Mat::Zero(1, 2);
  CHECK_THROWS_AS(modal_convert(rot, z2, z2r, z2r, z2, z2), ConversionError);
}

TEST_CASE("closed loop is Schur and bounded") {
  auto fx = four_tank_fixture();
  auto ctrl = four_tank_controller(fx);
  CHECK(ctrl.fed_back == 2);
  CHECK(ctrl.inputs() == 4);
  const Mat abar = closed_loop_matrix(fx.plant, ctrl);
  const double rho = spectral_radius(abar);
  CHECK(rho < 1.0);
  CHECK(rho == doctest::Approx(0.99693).epsilon(1e-4));

  auto plant = fx.plant;
  Vec x = ctrl.x_ini;
  double peak = 0;
  for (int t = 0; t < 10000; ++t) {
    const Vec y = plant.output();
    const Vec u = ctrl.H * x;
    Vec v(4);
    v << y, u;
    x = nominal_step(ctrl, x, v).first;
    plant.advance(u);
    Vec s(8);
    s << plant.x, x;
    peak = std::max(peak, inf_norm(s));
  }
  CHECK(peak < 10);
  Vec s(8);
  s << plant.x, x;
  CHECK(inf_norm(s) < 1e-6);
}

TEST_CASE("scale inference") {
  auto fx = four_tank_fixture();
  auto ctrl = four_tank_controller(fx);
  CHECK(infer_scale(ctrl, 1e-4) == doctest::Approx(1e-4));
}

TEST_CASE("fixture JSON round trip") {
  auto fx = four_tank_fixture();
  const auto text = fixture_to_json(fx);
  CHECK(text.find("\"0.9984\"") != std::string::npos);
  auto back = fixture_from_json(text);
  CHECK(back.plant.A == fx.plant.A);
  CHECK(back.R == fx.R);
  CHECK(back.x_ini == fx.x_ini);
  CHECK_THROWS_AS(fixture_from_json("{\"A\": 1}"), FormatError);
}
