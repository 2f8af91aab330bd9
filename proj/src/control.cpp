// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/control.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "encctl/errors.hpp"
#include "json.hpp"

namespace encctl {

double inf_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

void PlantModel::validate() const {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n || x.size() != n ||
      x_ini.size() != n) {
    throw ShapeError("plant matrices do not conform");
  }
}

std::pair<Vec, Vec> plant_step(const PlantModel& p, const Vec& u) {
  if (u.size() != p.B.cols()) throw ShapeError("plant input has wrong size");
  return {p.A * p.x + p.B * u, p.C * p.x};
}

void NominalController::validate() const {
  const auto n = F.rows();
  if (F.cols() != n || G.rows() != n || H.cols() != n || x_ini.size() != n) {
    throw ShapeError("controller matrices do not conform");
  }
  if (fed_back > static_cast<std::size_t>(G.cols()) ||
      (fed_back > 0 && fed_back != static_cast<std::size_t>(H.rows()))) {
    throw ShapeError("fed-back inputs must match the controller output size");
  }
}

std::pair<Vec, Vec> nominal_step(const NominalController& c, const Vec& x,
                                 const Vec& v) {
  if (v.size() != c.G.cols() || x.size() != c.F.rows()) {
    throw ShapeError("controller state or input has wrong size");
  }
  return {c.F_real() * x + c.G * v, c.H * x};
}

namespace {

// 1/r when it is (numerically) a positive integer, else 0.
double unit_fraction_inverse(double r) {
  const double inv = 1.0 / r;
  const double ri = std::round(inv);
  return (ri >= 1 && std::abs(inv - ri) <= 1e-9 * ri) ? ri : 0.0;
}

}  // namespace

std::int64_t quantize_scalar(double value, double r) {
  if (!(r > 0)) throw ParameterError("quantization step must be positive");
  const double inv = unit_fraction_inverse(r);
  const double scaled = inv > 0 ? value * inv : value / r;
  if (!std::isfinite(scaled) || std::abs(scaled) > 9.2e18) {
    throw ParameterError("quantized value out of range");
  }
  return std::llround(scaled);
}

IntVec quantize_output(const Vec& y, double r) {
  IntVec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = quantize_scalar(y(i), r);
  return out;
}

Mat round_to_grid(const Mat& m, double step) {
  Mat out(m.rows(), m.cols());
  const double inv = unit_fraction_inverse(step);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const auto k = quantize_scalar(m(i, j), step);
      out(i, j) = inv > 0 ? static_cast<double>(k) / inv
                          : static_cast<double>(k) * step;
    }
  }
  return out;
}

ModalForm modal_convert(const Mat& A, const Mat& B, const Mat& C, const Mat& K,
                        const Mat& L_obs, const Mat& R, double tol) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || C.cols() != n || K.cols() != n ||
      K.rows() != B.cols() || L_obs.rows() != n || L_obs.cols() != C.rows() ||
      R.rows() != n || R.cols() != K.rows()) {
    throw ShapeError("conversion inputs do not conform");
  }
  const Mat ac = A + B * K - L_obs * C - R * K;
  Eigen::EigenSolver<Mat> es(ac);
  if (es.info() != Eigen::Success) {
    throw ConversionError("eigendecomposition failed");
  }
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  const double scale = std::max(1.0, inf_norm(ac));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(vals(i).imag()) > 1e-9 * scale) {
      throw ConversionError("state matrix has complex eigenvalues");
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    return vals(a).real() < vals(b).real();
  });
  ModalForm out;
  out.eigenvalues.resize(n);
  Mat v(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto i = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = vals(i).real();
    Vec col = vecs.col(i).real();
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    v.col(k) = col / col(arg);
  }
  for (Eigen::Index k = 1; k < n; ++k) {
    if (out.eigenvalues(k) - out.eigenvalues(k - 1) <= 1e-9 * scale) {
      throw ConversionError("state matrix has repeated eigenvalues");
    }
  }
  Eigen::FullPivLU<Mat> lu(v);
  if (!lu.isInvertible()) throw ConversionError("eigenvectors are dependent");
  out.T = lu.inverse();
  const Mat modal = out.T * ac * v;
  out.F = modal.array().round().cast<std::int64_t>().matrix();
  out.residual = (modal - out.F.cast<double>()).cwiseAbs().maxCoeff();
  if (out.residual > tol) {
    throw ConversionError("modal matrix is not integral within tolerance");
  }
  Mat lr(n, L_obs.cols() + R.cols());
  lr << L_obs, R;
  out.G = out.T * lr;
  out.H = K * v;
  return out;
}

FourTank four_tank_fixture() {
  FourTank fx;
  auto& p = fx.plant;
  p.A.resize(4, 4);
  p.A << 0.9984, 0, 0.0042, 0,
         0, 0.9989, 0, -0.0033,
         0, 0, 0.9958, 0,
         0, 0, 0, 0.9967;
  p.B.resize(4, 2);
  p.B << 0.0083, 0,
         0, 0.0063,
         0, 0.0048,
         0.0031, 0;
  p.C.resize(2, 4);
  p.C << 0.5, 0, 0, 0,
         0, 0.5, 0, 0;
  p.x_ini = Vec::Ones(4);
  p.x = p.x_ini;
  fx.K.resize(2, 4);
  fx.K << -0.7905, 0.1579, -0.2745, -0.2686,
          -0.1552, -0.7874, -0.3427, 0.3137;
  fx.L_obs.resize(4, 2);
  fx.L_obs << 0.7815, 0,
              0, 0.7816,
              0.3190, 0,
              0, -0.3199;
  fx.R.resize(4, 2);
  fx.R << -1.6879, -0.6892,
          0.4148, -2.1054,
          0.2880, 4.1931,
          -0.7385, -2.0807;
  fx.x_ini.resize(4);
  fx.x_ini << 0.5, 0.02, -1, 0.9;
  return fx;
}

NominalController four_tank_controller(const FourTank& fx, double s) {
  const auto& p = fx.plant;
  const auto modal = modal_convert(p.A, p.B, p.C, fx.K, fx.L_obs, fx.R,
                                   kFourTankModalTolerance);
  NominalController c;
  c.F = modal.F;
  c.G = round_to_grid(modal.G, s);
  c.H = round_to_grid(modal.H, s);
  c.x_ini = fx.x_ini;
  c.fed_back = static_cast<std::size_t>(fx.K.rows());
  c.validate();
  return c;
}

Mat closed_loop_matrix(const PlantModel& p, const NominalController& c) {
  p.validate();
  c.validate();
  const auto np = p.A.rows();
  const auto n = c.F.rows();
  const auto py = c.G.cols() - static_cast<Eigen::Index>(c.fed_back);
  if (py != p.C.rows() || c.H.rows() != p.B.cols()) {
    throw ShapeError("plant and controller do not interconnect");
  }
  const Mat gy = c.G.leftCols(py);
  Mat fcl = c.F_real();
  if (c.fed_back > 0) {
    fcl += c.G.rightCols(static_cast<Eigen::Index>(c.fed_back)) * c.H;
  }
  Mat abar(np + n, np + n);
  abar << p.A, p.B * c.H, gy * p.C, fcl;
  return abar;
}

double spectral_radius(const Mat& a) {
  Eigen::EigenSolver<Mat> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double infer_scale(const NominalController& c, double r) {
  auto on_grid = [](double v, double s) {
    const double k = std::round(v * 1e10) / 1e10 / s;
    return std::abs(k - std::round(k)) <= 1e-6;
  };
  auto all_on_grid = [&](const Mat& m, double s) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!on_grid(m.data()[i], s)) return false;
    }
    return true;
  };
  const Mat xr = c.x_ini / r;
  double s = 1.0;
  for (int k = 0; k <= 12; ++k, s /= 10) {
    if (all_on_grid(c.G, s) && all_on_grid(c.H, s) && all_on_grid(xr, s)) {
      return s;
    }
  }
  throw ParameterError("no power-of-ten scale makes the parameters integral");
}

namespace {

using nlohmann::json;

std::string to_decimal(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double from_decimal(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError("not a decimal number: " + s);
  }
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_decimal(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Mat mat_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw FormatError("matrix must be a non-empty array of rows");
  }
  Mat m(static_cast<Eigen::Index>(j.size()),
        static_cast<Eigen::Index>(j[0].size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw FormatError("ragged matrix");
    for (std::size_t k = 0; k < j[i].size(); ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          from_decimal(j[i][k].get<std::string>());
    }
  }
  return m;
}

}  // namespace

std::string fixture_to_json(const FourTank& fx) {
  json j;
  j["A"] = mat_to_json(fx.plant.A);
  j["B"] = mat_to_json(fx.plant.B);
  j["C"] = mat_to_json(fx.plant.C);
  j["K"] = mat_to_json(fx.K);
  j["L_obs"] = mat_to_json(fx.L_obs);
  j["R"] = mat_to_json(fx.R);
  j["x_p_ini"] = mat_to_json(fx.plant.x_ini);
  j["x_ini"] = mat_to_json(fx.x_ini);
  return j.dump(2);
}

FourTank fixture_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    FourTank fx;
    fx.plant.A = mat_from_json(j.at("A"));
    fx.plant.B = mat_from_json(j.at("B"));
    fx.plant.C = mat_from_json(j.at("C"));
    fx.K = mat_from_json(j.at("K"));
    fx.L_obs = mat_from_json(j.at("L_obs"));
    fx.R = mat_from_json(j.at("R"));
    fx.plant.x_ini = mat_from_json(j.at("x_p_ini"));
    fx.plant.x = fx.plant.x_ini;
    fx.x_ini = mat_from_json(j.at("x_ini"));
    fx.plant.validate();
    return fx;
  } catch (const json::exception& e) {
    throw FormatError(std::string("fixture JSON: ") + e.what());
  }
}

}  // namespace encctl
