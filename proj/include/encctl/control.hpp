// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

// Real-valued plant and controller models, output quantization, the
// integer modal conversion and the four-tank benchmark.

#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace encctl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Induced infinity norm (max absolute row sum); for vectors the max-abs.
double inf_norm(const Mat& a);

// x+ = A x + B u, y = C x.
struct PlantModel {
  Mat A, B, C;
  Vec x;
  Vec x_ini;

  std::size_t states() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(B.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(C.rows()); }

  // Throws ShapeError on non-conforming matrices.
  void validate() const;
  void reset() { x = x_ini; }
  Vec output() const { return C * x; }
  void advance(const Vec& u) { x = A * x + B * u; }
};

// Returns (A x + B u, C x).
std::pair<Vec, Vec> plant_step(const PlantModel& p, const Vec& u);

// x+ = F x + G v, u = H x with integer F. The controller input is
// v = [y; u_fed], where the last `fed_back` entries re-inject the plant input
// (zero for a controller driven by y alone).
struct NominalController {
  IntMat F;
  Mat G, H;
  Vec x_ini;
  std::size_t fed_back = 0;

  std::size_t states() const { return static_cast<std::size_t>(F.rows()); }
  std::size_t inputs() const { return static_cast<std::size_t>(G.cols()); }
  std::size_t outputs() const { return static_cast<std::size_t>(H.rows()); }

  void validate() const;
  Mat F_real() const { return F.cast<double>(); }
};

// Returns (F x + G v, H x).
std::pair<Vec, Vec> nominal_step(const NominalController& c, const Vec& x,
                                 const Vec& v);

// round(value / r), ties away from zero. Unit-fraction steps are applied as a
// multiplication by 1/r so decimal inputs round as written.
std::int64_t quantize_scalar(double value, double r);
IntVec quantize_output(const Vec& y, double r);

// Rounds every entry to the grid `step` (ties away from zero).
Mat round_to_grid(const Mat& m, double step);

struct ModalForm {
  IntMat F;
  Mat G, H, T;
  Vec eigenvalues;  // ascending
  double residual = 0;  // max |T Ac T^-1 - F|
};

// Ac = A + B K - L_obs C - R K; T = V^-1 with V the eigenvectors of Ac in
// ascending eigenvalue order, each scaled so its largest-magnitude entry is
// +1. F = round(T Ac T^-1), G = T [L_obs R], H = K T^-1. Throws
// ConversionError on complex or repeated eigenvalues or when the residual
// exceeds tol.
ModalForm modal_convert(const Mat& A, const Mat& B, const Mat& C, const Mat& K,
                        const Mat& L_obs, const Mat& R, double tol = 1e-6);

struct FourTank {
  PlantModel plant;
  Mat K, L_obs, R;
  Vec x_ini;  // controller initial state in the modal coordinates
};

FourTank four_tank_fixture();

// Residual of the printed four-decimal gains is ~4e-5.
inline constexpr double kFourTankModalTolerance = 1e-4;

// Modal controller for the four-tank loop with G, H rounded to the grid s.
NominalController four_tank_controller(const FourTank& fx, double s = 1e-4);

// Closed-loop matrix of plant + controller with the fed-back inputs closed:
// [[A, B H], [G_y C, F + G_u H]].
Mat closed_loop_matrix(const PlantModel& p, const NominalController& c);

double spectral_radius(const Mat& a);

// Smallest power of ten s (down to 1e-12) such that every entry of G, H and
// x_ini / r is an integer multiple of s after rounding to 10 decimals.
double infer_scale(const NominalController& c, double r);

// JSON document with row-major matrices of decimal strings.
std::string fixture_to_json(const FourTank& fx);
FourTank fixture_from_json(const std::string& text);

}  // namespace encctl
