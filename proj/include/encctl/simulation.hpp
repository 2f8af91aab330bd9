// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "encctl/enc_controller.hpp"
#include "encctl/op_counters.hpp"

namespace encctl {

enum class Mode { kPlaintext, kNaive, kPacked };

std::string mode_name(Mode m);
Mode parse_mode(const std::string& name);  // throws ParameterError

struct RunConfig {
  std::size_t degree = 2048;
  std::uint64_t modulus = kDefaultModulus;
  std::int64_t base = 128;
  double sd = 3.2;
  double bound = 19.2;
  Scales scales;
  std::size_t steps = 1000;
  Mode mode = Mode::kNaive;
  std::uint64_t seed = 1;
  std::string out;             // trace CSV path, empty for none
  bool record_timing = true;   // false writes step_ms = 0
  bool probe = false;          // white-box perturbation and coefficient traces

  // Re-validates scales and the cryptographic parameters.
  void validate() const;
  CryptoParams params() const;

  // Unknown keys are rejected; missing keys keep their defaults.
  static RunConfig from_json(const std::string& text);
  std::string to_json() const;
};

struct TraceRow {
  std::size_t t = 0;
  Vec u, u_nom;
  double err_inf = 0;
  double step_ms = 0;
};

// Filled when RunConfig::probe is set.
struct ProbeTrace {
  double e_ini = 0;
  std::vector<double> e_x, e_u;
  // Per step, coefficient 1 of every naive state ciphertext (centered).
  std::vector<IntVec> nonconst;
};

struct TimingStats {
  double mean = 0, max = 0, min = 0, std = 0;
};

TimingStats timing_stats(const std::vector<double>& ms);

struct RunResult {
  RunConfig config;
  std::vector<TraceRow> rows;
  double max_err = 0;
  double mean_err = 0;
  TimingStats timing;
  OpCounts step_counts;  // operations of one controller step
  ProbeTrace probe;
};

// Closed loop of the four-tank plant with the selected controller; the
// nominal loop runs in lock-step to produce u_nom.
RunResult run_simulation(const RunConfig& cfg);
RunResult run_simulation(const RunConfig& cfg, const FourTank& fx);

// CSV: t,u_0..u_{m-1},unom_0..unom_{m-1},err_inf,step_ms
std::string trace_header(std::size_t m);
void write_trace(std::ostream& os, const std::vector<TraceRow>& rows);
void write_trace_file(const std::string& path, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace(std::istream& is);  // throws FormatError

std::string summary_json(const RunResult& r);

// True when some state coefficient wrapped modulo q between two steps:
// |c(t+1) - 2 c(t)| > q / 4 for the component whose integer dynamics is 2.
bool wrap_observed(const ProbeTrace& p, const IntMat& F, std::uint64_t q);

struct BenchRow {
  Mode mode = Mode::kNaive;
  std::size_t degree = 0;
  TimingStats timing;
  OpCounts step_counts;
};

// Timing of every encrypted mode over `repetitions` runs of cfg.steps.
std::vector<BenchRow> run_bench(const RunConfig& cfg, int repetitions);
std::string bench_table(const std::vector<BenchRow>& rows);

struct KeygenPaths {
  std::string secret_key;
  std::string eval_keys;
  std::string state;
};

// Writes the secret key (sensor/actuator side) and the controller-side
// bundle: evaluation keys and the encrypted initial state.
KeygenPaths keygen_files(const RunConfig& cfg, const std::string& dir);

}  // namespace encctl
