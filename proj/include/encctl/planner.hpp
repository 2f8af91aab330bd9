// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "encctl/control.hpp"
#include "encctl/enc_controller.hpp"

namespace encctl {

// ||Abar^k|| <= M lambda^k for all k >= 0.
struct StabilityCert {
  double M = 1;
  double lambda = 0;
  int horizon = 0;  // first k >= 1 with ||Abar^k|| <= lambda^k
};

// lambda = (1 + rho) / 2, M = max_{k <= K} ||Abar^k|| / lambda^k.
// Throws InstabilityError when rho >= 1 or no K <= max_horizon exists.
StabilityCert estimate_decay(const Mat& abar, int max_horizon = 1000000);

// Induced infinity norms and sizes the closed-form bounds depend on.
struct BudgetInputs {
  Scales scales;
  std::size_t states = 0;   // n
  std::size_t inputs = 0;   // p, controller input width
  double norm_G = 0;        // ||G||
  double norm_Ft = 0;       // ||F^T||
  double norm_Gt = 0;       // ||G^T||
  double norm_Ht = 0;       // ||H^T||
  std::size_t tau = 1;
  double sigma = 0;         // error bound
  double sigma_mult = 0;
};

struct ErrorBudget {
  double sigma_mult = 0;
  double alpha = 0, beta = 0, gamma = 0;
  double alpha_packed = 0, beta_packed = 0;
  double eta = 0, eta_packed = 0;
  double q_min_naive = 0, q_min_packed = 0;
};

// Fills sigma_mult, alpha, beta, gamma and their packed variants.
ErrorBudget error_budget(const BudgetInputs& in);

double eta(double alpha, double beta, double gamma, const StabilityCert& cert,
           double norm_B, double norm_init);

// Completes eta and the modulus lower bounds of an error budget.
void finish_budget(ErrorBudget& b, const StabilityCert& cert, double norm_B,
                   double norm_init, double norm_H, const Scales& scales);

struct Feasibility {
  bool naive_ok = false;
  bool packed_ok = false;
  double naive_slack = 0;   // min over both conditions of rhs - lhs
  double packed_slack = 0;
};

Feasibility check_feasibility(double epsilon, const ErrorBudget& b,
                              const StabilityCert& cert, double norm_H,
                              double norm_init);

// Smallest epsilon for which both the naive and packed conditions hold.
double min_feasible_epsilon(const ErrorBudget& b, const StabilityCert& cert,
                            double norm_H, double norm_init);

struct Plan {
  StabilityCert cert;
  BudgetInputs inputs;
  ErrorBudget budget;
  double norm_B = 0, norm_H = 0, norm_init = 0;
  std::uint64_t q = 0;
  bool q_ok_naive = false;
  bool q_ok_packed = false;
  double epsilon_min = 0;
};

// Evaluates every bound for a plant, controller and parameter set.
Plan plan(const PlantModel& plant, const NominalController& c,
          const Scales& scales, const CryptoParams& params);

// Exact integer q against a rounded-up real bound.
bool modulus_exceeds(std::uint64_t q, double bound);

std::string plan_to_json(const Plan& p);

}  // namespace encctl
