// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "encctl/errors.hpp"
#include "encctl/planner.hpp"
#include "encctl/serialize.hpp"
#include "encctl/simulation.hpp"
#include "json.hpp"

using namespace encctl;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> mode;
  std::optional<std::size_t> steps;
  std::optional<std::size_t> degree;
  std::optional<double> r;
  std::optional<double> L;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "JSON run configuration")
        ->check(CLI::ExistingFile);
    app->add_option("--mode", mode, "plaintext | naive | packed");
    app->add_option("--steps", steps, "closed-loop steps");
    app->add_option("--N", degree, "ring degree");
    app->add_option("--r", r, "sensor quantization step");
    app->add_option("--L", L, "message scale, 1/integer");
    app->add_option("--seed", seed, "RNG seed");
    app->add_option("--out", out, "trace CSV path");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : RunConfig::from_json(read_file(config));
    if (mode) c.mode = parse_mode(*mode);
    if (steps) c.steps = *steps;
    if (degree) c.degree = *degree;
    if (r) c.scales.r = *r;
    if (L) {
      if (!(*L > 0) || *L > 1) throw ParameterError("L must lie in (0, 1]");
      const double inv = std::round(1.0 / *L);
      if (std::abs(inv - 1.0 / *L) > 1e-6 * inv) {
        throw ParameterError("L must be 1/integer");
      }
      c.scales.inv_L = static_cast<std::int64_t>(inv);
    }
    if (seed) c.seed = *seed;
    if (out) c.out = *out;
    c.validate();
    return c;
  }
};

void print_plan(const Plan& p, std::optional<double> epsilon) {
  const auto& b = p.budget;
  std::cout << "decay certificate: M = " << p.cert.M << ", lambda = " << p.cert.lambda
            << " (K = " << p.cert.horizon << ")\n"
            << "sigma_mult = " << b.sigma_mult << ", tau = " << p.inputs.tau << "\n"
            << "alpha = " << b.alpha << ", beta = " << b.beta << ", gamma = " << b.gamma
            << "\n"
            << "alpha' = " << b.alpha_packed << ", beta' = " << b.beta_packed << "\n"
            << "eta = " << b.eta << ", eta' = " << b.eta_packed << "\n"
            << "q = " << p.q << "\n"
            << "  naive  bound " << b.q_min_naive << (p.q_ok_naive ? "  ok" : "  VIOLATED")
            << "\n"
            << "  packed bound " << b.q_min_packed
            << (p.q_ok_packed ? "  ok" : "  VIOLATED") << "\n"
            << "minimal feasible epsilon = " << p.epsilon_min << "\n";
  if (epsilon) {
    const auto f = check_feasibility(*epsilon, b, p.cert, p.norm_H, p.norm_init);
    std::cout << "epsilon = " << *epsilon << ": naive "
              << (f.naive_ok ? "feasible" : "infeasible") << " (slack "
              << f.naive_slack << "), packed "
              << (f.packed_ok ? "feasible" : "infeasible") << " (slack "
              << f.packed_slack << ")\n";
  }
  std::cout << "--- json ---\n" << plan_to_json(p) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encrypted linear controller: keys, simulation, planning, timing"};
  app.require_subcommand(1);

  Overrides keygen_o;
  std::string key_dir = "keys";
  auto* keygen_cmd = app.add_subcommand("keygen", "write secret key and controller bundle");
  keygen_o.attach(keygen_cmd);
  keygen_cmd->add_option("--dir", key_dir, "output directory");

  Overrides sim_o;
  bool no_timing = false, probe = false;
  std::optional<double> max_err;
  auto* sim_cmd = app.add_subcommand("simulate", "run the closed loop");
  sim_o.attach(sim_cmd);
  sim_cmd->add_flag("--no-timing", no_timing, "write step_ms = 0");
  sim_cmd->add_flag("--probe", probe, "check per-step perturbations against the bounds");
  sim_cmd->add_option("--max-err", max_err, "fail when max err_inf reaches this value");

  Overrides plan_o;
  std::optional<double> epsilon;
  bool require_q = false;
  auto* plan_cmd = app.add_subcommand("check-params", "evaluate the error budget");
  plan_o.attach(plan_cmd);
  plan_cmd->add_option("--epsilon", epsilon, "fail unless this epsilon is feasible");
  plan_cmd->add_flag("--require-q", require_q, "fail unless q meets both bounds");

  Overrides bench_o;
  int reps = 1;
  bool bench_json = false;
  auto* bench_cmd = app.add_subcommand("bench", "per-step timing of every mode");
  bench_o.attach(bench_cmd);
  bench_cmd->add_option("--reps", reps, "repetitions per mode")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--json", bench_json, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*keygen_cmd) {
      const auto cfg = keygen_o.resolve();
      const auto paths = keygen_files(cfg, key_dir);
      std::cout << "secret key:  " << paths.secret_key << "\n"
                << "eval keys:   " << paths.eval_keys << "\n"
                << "init state:  " << paths.state << "\n";
      return 0;
    }
    if (*sim_cmd) {
      auto cfg = sim_o.resolve();
      if (no_timing) cfg.record_timing = false;
      cfg.probe = probe;
      const auto fx = four_tank_fixture();
      const auto nominal = four_tank_controller(fx, cfg.scales.s());
      int status = 0;
      if (cfg.mode != Mode::kPlaintext) {
        const auto p = plan(fx.plant, nominal, cfg.scales, cfg.params());
        const bool ok = cfg.mode == Mode::kNaive ? p.q_ok_naive : p.q_ok_packed;
        if (!ok) std::cerr << "warning: q is below the modulus lower bound\n";
      }
      const auto res = run_simulation(cfg, fx);
      std::cout << summary_json(res) << "\n";
      if (max_err && !(res.max_err < *max_err)) {
        std::cerr << "max err_inf " << res.max_err << " >= " << *max_err << "\n";
        status = 1;
      }
      if (probe && cfg.mode != Mode::kPlaintext) {
        const auto p = plan(fx.plant, nominal, cfg.scales, cfg.params());
        const bool packed = cfg.mode == Mode::kPacked;
        const double a = packed ? p.budget.alpha_packed : p.budget.alpha;
        const double b = packed ? p.budget.beta_packed : p.budget.beta;
        std::size_t bad = res.probe.e_ini > p.budget.gamma ? 1 : 0;
        for (double e : res.probe.e_x) bad += e > a;
        for (double e : res.probe.e_u) bad += e > b;
        std::cout << "perturbation bound violations: " << bad << "\n";
        if (bad != 0) status = 1;
      }
      return status;
    }
    if (*plan_cmd) {
      const auto cfg = plan_o.resolve();
      const auto fx = four_tank_fixture();
      const auto p = plan(fx.plant, four_tank_controller(fx, cfg.scales.s()),
                          cfg.scales, cfg.params());
      print_plan(p, epsilon);
      int status = 0;
      if (epsilon) {
        const auto f = check_feasibility(*epsilon, p.budget, p.cert, p.norm_H, p.norm_init);
        if (!f.naive_ok || !f.packed_ok) status = 1;
      }
      if (require_q && !(p.q_ok_naive && p.q_ok_packed)) status = 1;
      return status;
    }
    if (*bench_cmd) {
      auto cfg = bench_o.resolve();
      cfg.record_timing = true;
      const auto rows = run_bench(cfg, reps);
      if (bench_json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) {
          j.push_back({{"mode", mode_name(r.mode)},
                       {"N", r.degree},
                       {"mean_ms", r.timing.mean},
                       {"max_ms", r.timing.max},
                       {"min_ms", r.timing.min},
                       {"std_ms", r.timing.std},
                       {"ext_product", r.step_counts.ext_product},
                       {"add", r.step_counts.add}});
        }
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << bench_table(rows);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
