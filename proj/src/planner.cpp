// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/planner.hpp"

#include <algorithm>
#include <cmath>

#include "encctl/errors.hpp"
#include "json.hpp"

namespace encctl {

StabilityCert estimate_decay(const Mat& abar, int max_horizon) {
  if (abar.rows() != abar.cols()) throw ShapeError("Abar must be square");
  const double rho = abar.size() == 0 ? 0.0 : spectral_radius(abar);
  if (!(rho < 1.0)) {
    throw InstabilityError("closed loop is not Schur stable (rho = " +
                           std::to_string(rho) + ")");
  }
  StabilityCert cert;
  cert.lambda = (1.0 + rho) / 2.0;
  cert.M = 1.0;
  Mat power = Mat::Identity(abar.rows(), abar.cols());
  double lam_k = 1.0;
  for (int k = 1; k <= max_horizon; ++k) {
    power = power * abar;
    lam_k *= cert.lambda;
    const double norm = inf_norm(power);
    if (norm <= lam_k) {
      cert.horizon = k;
      return cert;
    }
    cert.M = std::max(cert.M, norm / lam_k);
  }
  throw InstabilityError("decay certificate horizon exceeded");
}

ErrorBudget error_budget(const BudgetInputs& in) {
  const double r = in.scales.r;
  const double s = in.scales.s();
  const double L = in.scales.L();
  const auto n = static_cast<double>(in.states);
  const auto p = static_cast<double>(in.inputs);
  const double log_tau = std::log2(static_cast<double>(std::max<std::size_t>(in.tau, 1)));
  const double sm = in.sigma_mult;
  ErrorBudget b;
  b.sigma_mult = sm;
  b.alpha = r * s * L * (n + p) * sm + r * in.norm_G / 2 + r * L * in.norm_G * in.sigma;
  b.beta = r * s * s * L * n * sm;
  b.gamma = r * s * L * in.sigma;
  b.alpha_packed =
      b.alpha + r * s * L * (n * in.norm_Ft + p * in.norm_Gt / s) * log_tau * sm;
  b.beta_packed = b.beta + r * s * L * n * in.norm_Ht * log_tau * sm;
  return b;
}

double eta(double alpha, double beta, double gamma, const StabilityCert& cert,
           double norm_B, double norm_init) {
  return cert.M * (norm_init + gamma + (norm_B * beta + alpha) / (1.0 - cert.lambda));
}

void finish_budget(ErrorBudget& b, const StabilityCert& cert, double norm_B,
                   double norm_init, double norm_H, const Scales& scales) {
  b.eta = eta(b.alpha, b.beta, b.gamma, cert, norm_B, norm_init);
  b.eta_packed =
      eta(b.alpha_packed, b.beta_packed, b.gamma, cert, norm_B, norm_init);
  const double rsl = scales.r * scales.s() * scales.L();
  const double rs2l = rsl * scales.s();
  b.q_min_naive = 2 * std::max(b.eta / rsl, (norm_H * b.eta + b.beta) / rs2l);
  b.q_min_packed = 2 * std::max(b.eta_packed / rsl,
                                (norm_H * b.eta_packed + b.beta_packed) / rs2l);
}

namespace {

double slack(double epsilon, double beta, double eta_bar,
             const StabilityCert& cert, double norm_H, double norm_init) {
  const double first = epsilon / 2 - beta;
  const double second =
      cert.M * norm_init + epsilon / (2 * norm_H) - eta_bar;
  return std::min(first, second);
}

double min_epsilon(double beta, double eta_bar, const StabilityCert& cert,
                   double norm_H, double norm_init) {
  return std::max(2 * beta, 2 * norm_H * (eta_bar - cert.M * norm_init));
}

}  // namespace

Feasibility check_feasibility(double epsilon, const ErrorBudget& b,
                              const StabilityCert& cert, double norm_H,
                              double norm_init) {
  Feasibility f;
  f.naive_slack = slack(epsilon, b.beta, b.eta, cert, norm_H, norm_init);
  f.packed_slack =
      slack(epsilon, b.beta_packed, b.eta_packed, cert, norm_H, norm_init);
  f.naive_ok = f.naive_slack >= 0;
  f.packed_ok = f.packed_slack >= 0;
  return f;
}

double min_feasible_epsilon(const ErrorBudget& b, const StabilityCert& cert,
                            double norm_H, double norm_init) {
  return std::max(min_epsilon(b.beta, b.eta, cert, norm_H, norm_init),
                  min_epsilon(b.beta_packed, b.eta_packed, cert, norm_H,
                              norm_init));
}

bool modulus_exceeds(std::uint64_t q, double bound) {
  if (!std::isfinite(bound)) return false;
  if (bound < 0) return true;
  const long double up = std::ceil(static_cast<long double>(bound));
  if (up >= 18446744073709551616.0L) return false;
  const auto k = static_cast<std::uint64_t>(up);
  // q > bound iff q > ceil(bound) or (q == ceil(bound) and bound not integral).
  return q > k || (q == k && static_cast<long double>(bound) < up);
}

Plan plan(const PlantModel& plant, const NominalController& c,
          const Scales& scales, const CryptoParams& params) {
  scales.validate();
  Plan out;
  out.cert = estimate_decay(closed_loop_matrix(plant, c));
  const auto tau = PackLayout::for_dims(
                       params.degree(),
                       {c.states(), c.outputs(), c.inputs()})
                       .tau;
  BudgetInputs& in = out.inputs;
  in.scales = scales;
  in.states = c.states();
  in.inputs = c.inputs();
  in.norm_G = inf_norm(c.G);
  in.norm_Ft = inf_norm(c.F_real().transpose());
  in.norm_Gt = inf_norm(c.G.transpose());
  in.norm_Ht = inf_norm(c.H.transpose());
  in.tau = tau;
  in.sigma = params.dist.bound;
  in.sigma_mult = params.sigma_mult();
  out.norm_B = inf_norm(plant.B);
  out.norm_H = inf_norm(c.H);
  Vec init(plant.x_ini.size() + c.x_ini.size());
  init << plant.x_ini, c.x_ini;
  out.norm_init = init.size() ? init.cwiseAbs().maxCoeff() : 0.0;
  out.budget = error_budget(in);
  finish_budget(out.budget, out.cert, out.norm_B, out.norm_init, out.norm_H,
                scales);
  out.q = params.modulus();
  out.q_ok_naive = modulus_exceeds(out.q, out.budget.q_min_naive);
  out.q_ok_packed = modulus_exceeds(out.q, out.budget.q_min_packed);
  out.epsilon_min =
      min_feasible_epsilon(out.budget, out.cert, out.norm_H, out.norm_init);
  return out;
}

std::string plan_to_json(const Plan& p) {
  const auto& b = p.budget;
  nlohmann::json j;
  j["M"] = p.cert.M;
  j["lambda"] = p.cert.lambda;
  j["horizon"] = p.cert.horizon;
  j["tau"] = p.inputs.tau;
  j["r"] = p.inputs.scales.r;
  j["inv_s"] = p.inputs.scales.inv_s;
  j["inv_L"] = p.inputs.scales.inv_L;
  j["sigma_mult"] = b.sigma_mult;
  j["alpha"] = b.alpha;
  j["beta"] = b.beta;
  j["gamma"] = b.gamma;
  j["alpha_packed"] = b.alpha_packed;
  j["beta_packed"] = b.beta_packed;
  j["eta"] = b.eta;
  j["eta_packed"] = b.eta_packed;
  j["q"] = p.q;
  j["q_min_naive"] = b.q_min_naive;
  j["q_min_packed"] = b.q_min_packed;
  j["q_ok_naive"] = p.q_ok_naive;
  j["q_ok_packed"] = p.q_ok_packed;
  j["norm_B"] = p.norm_B;
  j["norm_H"] = p.norm_H;
  j["norm_init"] = p.norm_init;
  j["epsilon_min"] = p.epsilon_min;
  return j.dump(2);
}

}  // namespace encctl
