// Copyright 2026 The encctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "encctl/errors.hpp"
#include "encctl/serialize.hpp"
#include "encctl/simulation.hpp"

using namespace encctl;

namespace {

RunConfig small(Mode mode, std::size_t steps = 20) {
  RunConfig c;
  c.degree = 64;
  c.steps = steps;
  c.mode = mode;
  c.seed = 5;
  c.record_timing = false;
  return c;
}

std::string trace_text(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  write_trace(os, rows);
  return os.str();
}

}  // namespace

TEST_CASE("plaintext mode has zero error") {
  auto res = run_simulation(small(Mode::kPlaintext, 200));
  CHECK(res.rows.size() == 200);
  CHECK(res.max_err == 0);
  for (const auto& r : res.rows) CHECK(r.err_inf == 0);
}

TEST_CASE("same seed gives an identical trace") {
  for (Mode m : {Mode::kNaive, Mode::kPacked}) {
    const auto a = trace_text(run_simulation(small(m)).rows);
    const auto b = trace_text(run_simulation(small(m)).rows);
    CHECK(a == b);
    auto other = small(m);
    other.seed = 6;
    CHECK(trace_text(run_simulation(other).rows) != a);
  }
}

TEST_CASE("encrypted modes stay close to the nominal loop") {
  for (Mode m : {Mode::kNaive, Mode::kPacked}) {
    auto res = run_simulation(small(m, 100));
    CHECK(res.max_err < 0.2);
    CHECK(res.mean_err <= res.max_err);
    CHECK(res.step_counts.enc == 0);
    CHECK(res.step_counts.dec == 0);
  }
  // Four-tank controller: n = 4, m = 2, p = 4 (outputs and fed-back inputs).
  auto naive = run_simulation(small(Mode::kNaive, 1));
  CHECK(naive.step_counts.ext_product == 4 * 4 + 4 * (4 + 2));
  CHECK(naive.step_counts.add == 4 * 4 + 4 * (4 + 2 - 1) - 2);
  auto packed = run_simulation(small(Mode::kPacked, 1));
  CHECK(packed.step_counts.ext_product == 2 * 4 + 4);
  CHECK(packed.step_counts.add == 2 * 4 + 4 - 2);
  CHECK(packed.step_counts.unpack_ct == 2);
}

TEST_CASE("trace CSV schema") {
  auto res = run_simulation(small(Mode::kNaive, 10));
  const auto text = trace_text(res.rows);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "t,u_0,u_1,unom_0,unom_1,err_inf,step_ms");
  // Independent parse: split every line and recompute err_inf.
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 7);
    CHECK(cells[0] == static_cast<double>(count));
    const double err = std::max(std::abs(cells[1] - cells[3]), std::abs(cells[2] - cells[4]));
    CHECK(std::abs(err - cells[5]) <= 1e-11 * std::max(1.0, std::abs(cells[1])));
    CHECK(cells[6] == 0);
    ++count;
  }
  CHECK(count == 10);

  std::istringstream in(text);
  auto back = read_trace(in);
  REQUIRE(back.size() == res.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].t == res.rows[i].t);
    CHECK(back[i].u(0) == doctest::Approx(res.rows[i].u(0)).epsilon(1e-11));
    CHECK(back[i].err_inf == doctest::Approx(res.rows[i].err_inf).epsilon(1e-11));
  }
  // Re-serializing the parsed rows is a fixed point.
  CHECK(trace_text(back) == text);
  CHECK(trace_header(1) == "t,u_0,unom_0,err_inf,step_ms");
}

TEST_CASE("malformed traces are rejected") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return read_trace(in);
  };
  CHECK_THROWS_AS(parse(""), FormatError);
  CHECK_THROWS_AS(parse("t,u_0,unom_0,err\n"), FormatError);
  CHECK_THROWS_AS(parse("t,u_0,unom_0,err_inf,step_ms\n0,1,2\n"), FormatError);
  CHECK_THROWS_AS(parse("t,u_0,unom_0,err_inf,step_ms\n0,1,x,1,0\n"), FormatError);
  CHECK_THROWS_AS(parse("t,u_0,unom_0,err_inf,step_ms\n1,1,1,0,0\n0,1,1,0,0\n"),
                  FormatError);
  CHECK(parse("t,u_0,unom_0,err_inf,step_ms\n").empty());
}

TEST_CASE("trace file output") {
  auto cfg = small(Mode::kPlaintext, 3);
  cfg.out = "test_simulation_trace.csv";
  (void)run_simulation(cfg);
  const auto text = read_file(cfg.out);
  CHECK(text.rfind("t,u_0,u_1,unom_0,unom_1,err_inf,step_ms\n", 0) == 0);
  std::remove(cfg.out.c_str());
}

TEST_CASE("run configuration") {
  auto c = RunConfig::from_json(
      R"({"N": 128, "r": 0.01, "L": 0.01, "s": 0.0001, "steps": 7,
          "mode": "packed", "seed": 11, "record_timing": false})");
  CHECK(c.degree == 128);
  CHECK(c.scales.r == 0.01);
  CHECK(c.scales.inv_L == 100);
  CHECK(c.scales.inv_s == 10000);
  CHECK(c.mode == Mode::kPacked);
  CHECK(c.seed == 11);
  auto back = RunConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK_THROWS_AS(RunConfig::from_json(R"({"bogus": 1})"), FormatError);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"L": 0.3})"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"N": 100})"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"mode": "x"})"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_json(R"({"steps": 0})"), ParameterError);
  CHECK_THROWS_AS(RunConfig::from_json("[1,2"), FormatError);
  CHECK(parse_mode(mode_name(Mode::kNaive)) == Mode::kNaive);
}

TEST_CASE("timing statistics") {
  auto s = timing_stats({1, 2, 3, 4});
  CHECK(s.mean == 2.5);
  CHECK(s.max == 4);
  CHECK(s.min == 1);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(timing_stats({}).mean == 0);
}

TEST_CASE("wrap detection") {
  IntMat F = IntMat::Zero(2, 2);
  F(1, 1) = 2;
  const std::uint64_t q = 1000;
  ProbeTrace p;
  IntVec a(2), b(2), c(2);
  a << 0, 100;
  b << 0, 200;
  c << 0, -400;  // jump of -800 exceeds q / 4
  p.nonconst = {a, b};
  CHECK_FALSE(wrap_observed(p, F, q));
  p.nonconst.push_back(c);
  CHECK(wrap_observed(p, F, q));
  F(1, 1) = 1;
  CHECK_FALSE(wrap_observed(p, F, q));
}

TEST_CASE("naive state coefficients wrap while the output stays accurate") {
  auto cfg = small(Mode::kNaive, 200);
  cfg.probe = true;
  auto res = run_simulation(cfg);
  const auto fx = four_tank_fixture();
  CHECK(wrap_observed(res.probe, four_tank_controller(fx).F, cfg.modulus));
  CHECK(res.max_err < 0.2);
}

TEST_CASE("keygen bundle") {
  auto cfg = small(Mode::kPacked);
  const auto dir = (std::filesystem::temp_directory_path() / "encctl_keygen_test").string();
  const auto paths = keygen_files(cfg, dir);
  const auto params = cfg.params();
  const auto eval_blob = read_file(paths.eval_keys);
  const auto eval = deserialize_packed_eval(eval_blob, params);
  CHECK(eval.gsw_count() == 2 * 4 + 4);
  CHECK(eval.autokeys.size() == 2);
  CHECK(eval.autokeys.contains(3));
  CHECK(eval.autokeys.contains(5));
  CHECK(read_header(eval_blob).kind == BlobKind::kPackedEval);
  // The secret key bytes do not occur in the controller-side files.
  const auto key_blob = read_file(paths.secret_key);
  const auto key_body = key_blob.substr(key_blob.size() - 8 * 64);
  CHECK(eval_blob.find(key_body) == std::string::npos);
  CHECK(read_file(paths.state).find(key_body) == std::string::npos);
  // Loading twice reproduces identical ciphertexts.
  CHECK(deserialize_packed_eval(read_file(paths.eval_keys), params).F == eval.F);

  cfg.mode = Mode::kNaive;
  const auto np = keygen_files(cfg, dir);
  CHECK(deserialize_naive_eval(read_file(np.eval_keys), params).gsw_count() ==
        4 * (4 + 4) + 2 * 4);
  CHECK(deserialize_ciphertexts(read_file(np.state), params).size() == 4);
  std::filesystem::remove_all(dir);
  cfg.mode = Mode::kPlaintext;
  CHECK_THROWS_AS(keygen_files(cfg, dir), ParameterError);
}

TEST_CASE("bench reports every mode") {
  auto cfg = small(Mode::kNaive, 3);
  auto rows = run_bench(cfg, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].step_counts.ext_product == 40);
  CHECK(rows[2].step_counts.ext_product == 12);
  CHECK(rows[1].timing.mean > 0);
  CHECK(bench_table(rows).find("packed") != std::string::npos);
  CHECK_THROWS_AS(run_bench(cfg, 0), ParameterError);
}
