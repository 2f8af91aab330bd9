// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "encctl/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "encctl/errors.hpp"
#include "encctl/serialize.hpp"
#include "json.hpp"

namespace encctl {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kPlaintext:
      return "plaintext";
    case Mode::kNaive:
      return "naive";
    case Mode::kPacked:
      return "packed";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  if (name == "plaintext") return Mode::kPlaintext;
  if (name == "naive") return Mode::kNaive;
  if (name == "packed") return Mode::kPacked;
  throw ParameterError("unknown mode '" + name + "'");
}

void RunConfig::validate() const {
  scales.validate();
  if (steps == 0) throw ParameterError("steps must be positive");
  (void)params();
}

CryptoParams RunConfig::params() const {
  return CryptoParams::create(degree, modulus, base, sd, bound);
}

namespace {

std::int64_t inverse_of(double step, const char* what) {
  if (!(step > 0) || step > 1) {
    throw ParameterError(std::string(what) + " must lie in (0, 1]");
  }
  const double inv = 1.0 / step;
  const double k = std::round(inv);
  if (std::abs(inv - k) > 1e-6 * k) {
    throw ParameterError(std::string(what) + " must be 1/integer");
  }
  return static_cast<std::int64_t>(k);
}

}  // namespace

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  RunConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "N") {
        c.degree = value.get<std::size_t>();
      } else if (key == "q") {
        c.modulus = value.get<std::uint64_t>();
      } else if (key == "nu") {
        c.base = value.get<std::int64_t>();
      } else if (key == "sd") {
        c.sd = value.get<double>();
      } else if (key == "sigma") {
        c.bound = value.get<double>();
      } else if (key == "r") {
        c.scales.r = value.get<double>();
      } else if (key == "s") {
        c.scales.inv_s = inverse_of(value.get<double>(), "s");
      } else if (key == "L") {
        c.scales.inv_L = inverse_of(value.get<double>(), "L");
      } else if (key == "steps") {
        c.steps = value.get<std::size_t>();
      } else if (key == "mode") {
        c.mode = parse_mode(value.get<std::string>());
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else if (key == "record_timing") {
        c.record_timing = value.get<bool>();
      } else if (key == "probe") {
        c.probe = value.get<bool>();
      } else {
        throw FormatError("config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["N"] = degree;
  j["q"] = modulus;
  j["nu"] = base;
  j["sd"] = sd;
  j["sigma"] = bound;
  j["r"] = scales.r;
  j["s"] = scales.s();
  j["L"] = scales.L();
  j["steps"] = steps;
  j["mode"] = mode_name(mode);
  j["seed"] = seed;
  j["out"] = out;
  j["record_timing"] = record_timing;
  j["probe"] = probe;
  return j.dump(2);
}

TimingStats timing_stats(const std::vector<double>& ms) {
  TimingStats s;
  if (ms.empty()) return s;
  double sum = 0;
  s.max = ms.front();
  s.min = ms.front();
  for (double v : ms) {
    sum += v;
    s.max = std::max(s.max, v);
    s.min = std::min(s.min, v);
  }
  s.mean = sum / static_cast<double>(ms.size());
  double var = 0;
  for (double v : ms) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(ms.size()));
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Controller input [y; u_fed].
Vec controller_input(const NominalController& c, const Vec& y, const Vec& u) {
  Vec v(static_cast<Eigen::Index>(c.inputs()));
  const auto py = v.size() - static_cast<Eigen::Index>(c.fed_back);
  v.head(py) = y;
  if (c.fed_back > 0) v.tail(static_cast<Eigen::Index>(c.fed_back)) = u;
  return v;
}

IntVec nonconst_coeffs(const std::vector<RlweCt>& x, const SecretKey& key) {
  IntVec out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = decrypt(x[i], key)[1];
  }
  return out;
}

// One closed loop driven by an encrypted (or plaintext) controller.
class Loop {
 public:
  Loop(const RunConfig& cfg, const FourTank& fx)
      : cfg_(cfg),
        nominal_(four_tank_controller(fx, cfg.scales.s())),
        plant_(fx.plant),
        params_(cfg.params()),
        rng_(cfg.seed) {
    plant_.reset();
    if (cfg_.mode == Mode::kPlaintext) {
      x_plain_ = nominal_.x_ini;
      return;
    }
    qc_ = quantize_controller(nominal_, cfg_.scales);
    key_ = std::make_shared<SecretKey>(keygen(params_.ring, params_.dist, rng_));
    sensor_.emplace(params_, cfg_.scales, key_, rng_.fork());
    actuator_.emplace(params_, cfg_.scales, key_);
    if (cfg_.mode == Mode::kNaive) {
      naive_.emplace(EncControllerNaive::setup(qc_, cfg_.scales, *key_, params_, rng_));
    } else {
      packed_.emplace(EncControllerPacked::setup(qc_, cfg_.scales, *key_, params_, rng_));
    }
  }

  const NominalController& nominal() const { return nominal_; }

  // Advances one step; returns u(t) and fills the timing and probes.
  Vec step(double& ms, OpCounts* counts, ProbeTrace* probe) {
    const Vec y = plant_.output();
    Vec u;
    if (cfg_.mode == Mode::kPlaintext) {
      const auto start = Clock::now();
      u = nominal_.H * x_plain_;
      const Vec v = controller_input(nominal_, y, u);
      x_plain_ = nominal_.F_real() * x_plain_ + nominal_.G * v;
      ms = elapsed_ms(start);
    } else if (naive_) {
      u = step_naive(y, ms, counts, probe);
    } else {
      u = step_packed(y, ms, counts, probe);
    }
    plant_.advance(u);
    return u;
  }

  double initial_perturbation_norm() const {
    if (naive_) {
      return initial_perturbation(decrypt_constants(naive_->state(), *key_), qc_,
                                  cfg_.scales);
    }
    if (packed_) {
      return initial_perturbation(
          decrypt_slots(packed_->state(), packed_->states(), packed_->layout(), *key_),
          qc_, cfg_.scales);
    }
    return 0;
  }

 private:
  Vec step_naive(const Vec& y, double& ms, OpCounts* counts, ProbeTrace* probe) {
    IntVec x;
    if (probe) {
      x = decrypt_constants(naive_->state(), *key_);
      probe->nonconst.push_back(nonconst_coeffs(naive_->state(), *key_));
    }
    auto start = Clock::now();
    std::vector<RlweCt> u_ct;
    {
      OpCounts scratch;
      CountingScope scope(counts ? *counts : scratch);
      u_ct = naive_->output();
    }
    ms = elapsed_ms(start);
    const Vec u = actuator_->decode(u_ct);
    const Vec v = controller_input(nominal_, y, u);
    auto v_ct = sensor_->encrypt(v);
    start = Clock::now();
    {
      OpCounts scratch;
      CountingScope scope(counts ? *counts : scratch);
      naive_->update(v_ct);
    }
    ms += elapsed_ms(start);
    if (probe) {
      probe->e_u.push_back(output_perturbation(
          x, decrypt_constants(u_ct, *key_), qc_, cfg_.scales));
      probe->e_x.push_back(state_perturbation(
          x, decrypt_constants(naive_->state(), *key_), v, nominal_, qc_,
          cfg_.scales));
    }
    return u;
  }

  Vec step_packed(const Vec& y, double& ms, OpCounts* counts, ProbeTrace* probe) {
    const auto& layout = packed_->layout();
    const std::size_t n = packed_->states();
    IntVec x;
    if (probe) x = decrypt_slots(packed_->state(), n, layout, *key_);
    auto start = Clock::now();
    RlweCt u_ct;
    {
      OpCounts scratch;
      CountingScope scope(counts ? *counts : scratch);
      u_ct = packed_->output();
    }
    ms = elapsed_ms(start);
    const Vec u = actuator_->decode_packed(u_ct, packed_->outputs(), layout);
    const Vec v = controller_input(nominal_, y, u);
    auto v_ct = sensor_->encrypt_packed(v, layout);
    start = Clock::now();
    {
      OpCounts scratch;
      CountingScope scope(counts ? *counts : scratch);
      packed_->update(v_ct);
    }
    ms += elapsed_ms(start);
    if (probe) {
      probe->e_u.push_back(output_perturbation(
          x, decrypt_slots(u_ct, packed_->outputs(), layout, *key_), qc_,
          cfg_.scales));
      probe->e_x.push_back(state_perturbation(
          x, decrypt_slots(packed_->state(), n, layout, *key_), v, nominal_, qc_,
          cfg_.scales));
    }
    return u;
  }

  RunConfig cfg_;
  NominalController nominal_;
  PlantModel plant_;
  CryptoParams params_;
  Prng rng_;
  QuantizedController qc_;
  KeyPtr key_;
  Vec x_plain_;
  std::optional<Sensor> sensor_;
  std::optional<Actuator> actuator_;
  std::optional<EncControllerNaive> naive_;
  std::optional<EncControllerPacked> packed_;
};

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

RunResult run_simulation(const RunConfig& cfg) {
  return run_simulation(cfg, four_tank_fixture());
}

RunResult run_simulation(const RunConfig& cfg, const FourTank& fx) {
  cfg.validate();
  RunResult res;
  res.config = cfg;
  Loop loop(cfg, fx);
  const auto& nom = loop.nominal();
  PlantModel nominal_plant = fx.plant;
  nominal_plant.reset();
  Vec x_nom = nom.x_ini;
  ProbeTrace* probe = cfg.probe ? &res.probe : nullptr;
  if (probe) res.probe.e_ini = loop.initial_perturbation_norm();
  std::vector<double> times;
  double err_sum = 0;
  for (std::size_t t = 0; t < cfg.steps; ++t) {
    const Vec u_nom = nom.H * x_nom;
    const Vec v_nom = controller_input(nom, nominal_plant.output(), u_nom);
    x_nom = nom.F_real() * x_nom + nom.G * v_nom;
    nominal_plant.advance(u_nom);

    double ms = 0;
    const Vec u = loop.step(ms, t == 0 ? &res.step_counts : nullptr, probe);
    TraceRow row;
    row.t = t;
    row.u = u;
    row.u_nom = u_nom;
    row.err_inf = (u - u_nom).cwiseAbs().maxCoeff();
    row.step_ms = cfg.record_timing ? ms : 0.0;
    times.push_back(ms);
    res.max_err = std::max(res.max_err, row.err_inf);
    err_sum += row.err_inf;
    res.rows.push_back(std::move(row));
  }
  res.mean_err = err_sum / static_cast<double>(cfg.steps);
  res.timing = timing_stats(times);
  if (!cfg.out.empty()) write_trace_file(cfg.out, res.rows);
  return res;
}

std::string trace_header(std::size_t m) {
  std::string h = "t";
  for (std::size_t i = 0; i < m; ++i) h += ",u_" + std::to_string(i);
  for (std::size_t i = 0; i < m; ++i) h += ",unom_" + std::to_string(i);
  return h + ",err_inf,step_ms";
}

void write_trace(std::ostream& os, const std::vector<TraceRow>& rows) {
  const std::size_t m = rows.empty() ? 0 : static_cast<std::size_t>(rows[0].u.size());
  os << trace_header(m) << '\n';
  for (const auto& r : rows) {
    os << r.t;
    for (Eigen::Index i = 0; i < r.u.size(); ++i) os << ',' << fmt12(r.u(i));
    for (Eigen::Index i = 0; i < r.u_nom.size(); ++i) os << ',' << fmt12(r.u_nom(i));
    os << ',' << fmt12(r.err_inf) << ',' << fmt12(r.step_ms) << '\n';
  }
}

void write_trace_file(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  write_trace(out, rows);
  if (!out) throw FormatError("write failed for " + path);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw FormatError("trace: bad number '" + s + "'");
  }
  if (used != s.size()) throw FormatError("trace: bad number '" + s + "'");
  return v;
}

}  // namespace

std::vector<TraceRow> read_trace(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("trace: empty file");
  const auto head = split_csv(line);
  if (head.size() < 3 || (head.size() - 3) % 2 != 0) {
    throw FormatError("trace: bad header");
  }
  const std::size_t m = (head.size() - 3) / 2;
  if (line != trace_header(m)) throw FormatError("trace: header mismatch");
  std::vector<TraceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != head.size()) throw FormatError("trace: ragged row");
    TraceRow r;
    const double t = parse_double(cells[0]);
    if (t < 0 || t != std::floor(t)) throw FormatError("trace: bad t");
    r.t = static_cast<std::size_t>(t);
    if (!rows.empty() && r.t <= rows.back().t) {
      throw FormatError("trace: t not increasing");
    }
    r.u.resize(static_cast<Eigen::Index>(m));
    r.u_nom.resize(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      r.u(static_cast<Eigen::Index>(i)) = parse_double(cells[1 + i]);
      r.u_nom(static_cast<Eigen::Index>(i)) = parse_double(cells[1 + m + i]);
    }
    r.err_inf = parse_double(cells[1 + 2 * m]);
    r.step_ms = parse_double(cells[2 + 2 * m]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_json(const RunResult& r) {
  nlohmann::json j;
  j["mode"] = mode_name(r.config.mode);
  j["N"] = r.config.degree;
  j["steps"] = r.config.steps;
  j["seed"] = r.config.seed;
  j["r"] = r.config.scales.r;
  j["L"] = r.config.scales.L();
  j["max_err"] = r.max_err;
  j["mean_err"] = r.mean_err;
  j["step_ms"] = {{"mean", r.timing.mean},
                  {"max", r.timing.max},
                  {"min", r.timing.min},
                  {"std", r.timing.std}};
  j["step_ops"] = {{"ext_product", r.step_counts.ext_product},
                   {"add", r.step_counts.add},
                   {"automorphism", r.step_counts.automorphism},
                   {"unpack_ct", r.step_counts.unpack_ct},
                   {"enc", r.step_counts.enc},
                   {"dec", r.step_counts.dec}};
  return j.dump(2);
}

bool wrap_observed(const ProbeTrace& p, const IntMat& F, std::uint64_t q) {
  const long double quarter = static_cast<long double>(q) / 4;
  for (Eigen::Index j = 0; j < F.rows(); ++j) {
    if (F(j, j) != 2) continue;
    for (std::size_t t = 0; t + 1 < p.nonconst.size(); ++t) {
      const i128 jump = static_cast<i128>(p.nonconst[t + 1](j)) -
                        2 * static_cast<i128>(p.nonconst[t](j));
      if (std::fabs(static_cast<long double>(jump)) > quarter) return true;
    }
  }
  return false;
}

std::vector<BenchRow> run_bench(const RunConfig& cfg, int repetitions) {
  if (repetitions < 1) throw ParameterError("repetitions must be positive");
  std::vector<BenchRow> rows;
  for (Mode mode : {Mode::kPlaintext, Mode::kNaive, Mode::kPacked}) {
    RunConfig c = cfg;
    c.mode = mode;
    c.out.clear();
    c.record_timing = true;
    c.probe = false;
    BenchRow row;
    row.mode = mode;
    row.degree = c.degree;
    std::vector<double> ms;
    for (int rep = 0; rep < repetitions; ++rep) {
      c.seed = cfg.seed + static_cast<std::uint64_t>(rep);
      auto res = run_simulation(c);
      for (const auto& r : res.rows) ms.push_back(r.step_ms);
      row.step_counts = res.step_counts;
    }
    row.timing = timing_stats(ms);
    rows.push_back(row);
  }
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "mode" << std::setw(7) << "N"
     << std::right << std::setw(10) << "mean_ms" << std::setw(10) << "max_ms"
     << std::setw(10) << "min_ms" << std::setw(10) << "std_ms" << std::setw(8)
     << "ext" << std::setw(8) << "add" << '\n';
  os << std::fixed << std::setprecision(3);
  for (const auto& r : rows) {
    os << std::left << std::setw(10) << mode_name(r.mode) << std::setw(7)
       << r.degree << std::right << std::setw(10) << r.timing.mean
       << std::setw(10) << r.timing.max << std::setw(10) << r.timing.min
       << std::setw(10) << r.timing.std << std::setw(8)
       << r.step_counts.ext_product << std::setw(8) << r.step_counts.add << '\n';
  }
  return os.str();
}

KeygenPaths keygen_files(const RunConfig& cfg, const std::string& dir) {
  cfg.validate();
  if (cfg.mode == Mode::kPlaintext) {
    throw ParameterError("keygen needs an encrypted mode");
  }
  std::filesystem::create_directories(dir);
  const auto params = cfg.params();
  const auto fx = four_tank_fixture();
  const auto qc = quantize_controller(four_tank_controller(fx, cfg.scales.s()),
                                      cfg.scales);
  Prng rng(cfg.seed);
  const SecretKey key = keygen(params.ring, params.dist, rng);
  KeygenPaths paths;
  const std::string tag = mode_name(cfg.mode);
  paths.secret_key = (std::filesystem::path(dir) / "secret.key").string();
  paths.eval_keys = (std::filesystem::path(dir) / ("eval_" + tag + ".bin")).string();
  paths.state = (std::filesystem::path(dir) / ("state_" + tag + ".bin")).string();
  write_file(paths.secret_key, serialize(key, params));
  if (cfg.mode == Mode::kNaive) {
    auto c = EncControllerNaive::setup(qc, cfg.scales, key, params, rng);
    write_file(paths.eval_keys, serialize(c.keys(), params));
    write_file(paths.state, serialize(c.state(), params));
  } else {
    auto c = EncControllerPacked::setup(qc, cfg.scales, key, params, rng);
    write_file(paths.eval_keys, serialize(c.keys(), params));
    write_file(paths.state, serialize(c.state(), params));
  }
  return paths;
}

}  // namespace encctl
