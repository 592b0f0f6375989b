#include <doctest.h>

#include "margauss/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace margauss;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.bodies = {"product-uniform"};
  c.ns = {16, 64, 256};
  c.ks = {1};
  c.frames = {"walsh"};
  c.samples = 100000;
  c.seeds = {2024};
  c.metrics = {"w1"};
  return c;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fit_decay") {
  std::vector<double> ns = {16, 64, 256, 1024}, values;
  for (double n : ns) values.push_back(std::pow(n, -0.5));
  auto fit = fit_decay(ns, values);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));

  fit = fit_decay(ns, std::vector<double>(4, 0.3));
  CHECK(fit.slope == doctest::Approx(0.0).scale(1.0));
  CHECK(fit.intercept == doctest::Approx(std::log(0.3)));

  CHECK_THROWS(fit_decay({16, 64}, {0.1, 0.05}));
  CHECK_THROWS(fit_decay({16, 16, 64}, {0.1, 0.1, 0.05}));
  CHECK_THROWS(fit_decay({16, 64, 256}, {0.1, 0.0, 0.05}));

  std::vector<ResultRow> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].n = static_cast<int>(ns[i]);
    rows[i].emp_w1 = 2.0 / ns[i];
  }
  CHECK(fit_decay(rows).slope == doctest::Approx(-1.0));
}

TEST_CASE("csv formatting and round trip") {
  CHECK(to_csv({}) == std::string(kCsvHeader) + "\n");

  ResultRow a;
  a.body = "lp-ball:1.5";
  a.n = 64;
  a.k = 2;
  a.frame = "haar";
  a.seed = 18446744073709551615ULL;
  a.N = 100000;
  a.l4_sum = 0.1 + 0.2;
  a.bound_d1_thm = 1.0 / 3.0;
  a.bound_dtv_thm = 5e-320;
  a.bound_d1_cor = -0.0;
  a.bound_dtv_cor = 1e300;
  a.emp_w1 = std::nextafter(1.0, 2.0);
  a.emp_w1_se = 0.0;
  ResultRow b = a;
  b.body = "simplex";
  b.simplex_quartic = 0.123456789012345678;
  b.emp_ks = 0.5;
  b.emp_tv = 2.0;
  b.runtime_ms = 12.5;
  b.emp_w1.reset();
  const std::vector<ResultRow> rows = {a, b};
  const auto text = to_csv(rows);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find(",,") != std::string::npos);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == a);
  CHECK(back[1] == b);
  CHECK(std::signbit(back[0].bound_d1_cor));
  CHECK(format_real(0.1) == "0.10000000000000001");

  CHECK_THROWS(parse_csv("body,n\n"));
  CHECK_THROWS(parse_csv(std::string(kCsvHeader) + "\nsimplex,1,2\n"));
}

TEST_CASE("emit_csv reports the path on failure") {
  try {
    emit_csv({}, "/nonexistent-dir/out.csv");
    FAIL("expected failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/out.csv") != std::string::npos);
  }
  const std::string path = "harness_test_empty.csv";
  emit_csv({}, path);
  CHECK(slurp(path) == std::string(kCsvHeader) + "\n");
  std::remove(path.c_str());
}

TEST_CASE("config parsing") {
  const auto c = parse_experiment_config(R"({
    "bodies": ["simplex"], "ns": [8], "ks": [1, 2], "frames": ["haar"],
    "samples": 20000, "seeds": [1, 2], "metrics": ["w1", "ks"],
    "constants": {"C_tv_multi": 2}
  })");
  CHECK(c.ks.size() == 2);
  CHECK(c.constants.C_tv_multi == 2.0);
  CHECK_FALSE(c.record_runtime);
  CHECK_THROWS(parse_experiment_config(R"({"bodies": [], "ns": [], "ks": [], "frames": [],
    "samples": 1, "seeds": [], "metrics": []})"));
  CHECK_THROWS(parse_experiment_config(R"({"bodies": [], "ns": [], "ks": [], "frames": [],
    "samples": 1, "seeds": [1], "metrics": ["d2"]})"));
  CHECK_THROWS(parse_experiment_config(R"({"bodies": [], "ns": [], "ks": [], "frames": [],
    "samples": 1, "seeds": [1], "extra": 0})"));
  CHECK_THROWS(load_experiment_config("/nonexistent/config.json"));
}

TEST_CASE("sweep over n: bound dominance, decay, determinism") {
  const auto config = small_config();
  const auto result = run_experiment(config);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.notes.empty());
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = result.rows[i];
    CAPTURE(r.n);
    CHECK(r.n == config.ns[i]);
    REQUIRE(r.emp_w1);
    CHECK(*r.emp_w1 >= 0.0);
    CHECK(*r.emp_w1 < r.bound_d1_thm);
    CHECK(*r.emp_w1 <= r.bound_d1_cor + 3 * *r.emp_w1_se);
    CHECK(r.bound_d1_cor <= r.bound_d1_thm);
    CHECK(r.bound_d1_thm == doctest::Approx(14 * std::pow(r.n, -0.25)));
    CHECK_FALSE(r.emp_ks);
    CHECK_FALSE(r.runtime_ms);
  }
  for (int i = 0; i + 1 < 3; ++i)
    CHECK(*result.rows[i + 1].emp_w1 <=
          *result.rows[i].emp_w1 + 3 * (*result.rows[i].emp_w1_se + *result.rows[i + 1].emp_w1_se));

  const auto again = run_experiment(config);
  CHECK(to_csv(again.rows) == to_csv(result.rows));
}

TEST_CASE("sweep: bounds only, skipped combinations, ordering") {
  ExperimentConfig c;
  c.bodies = {"simplex", "product-laplace"};
  c.ns = {8, 4};
  c.ks = {2, 5};
  c.frames = {"walsh", "haar"};
  c.samples = 10000;
  c.seeds = {3};
  const auto result = run_experiment(c);
  // k = 5 is invalid for n = 4 under both frames; walsh at n = 8 has m = 8.
  CHECK(result.rows.size() == 2 * 6);
  CHECK(result.notes.size() == 2 * 2);
  for (const auto& note : result.notes) CHECK(note.rfind("skipped", 0) == 0);
  for (const auto& r : result.rows) {
    CHECK_FALSE(r.emp_w1);
    CHECK_FALSE(r.emp_w1_se);
    CHECK(r.simplex_quartic.has_value() == (r.body == "simplex"));
  }
  CHECK(result.rows.front().body == "product-laplace");
  CHECK(result.rows.front().n == 4);
  for (std::size_t i = 0; i + 1 < result.rows.size(); ++i) {
    const auto& x = result.rows[i];
    const auto& y = result.rows[i + 1];
    CHECK(std::tie(x.body, x.n, x.k, x.frame) < std::tie(y.body, y.n, y.k, y.frame));
  }
}

TEST_CASE("simplex k = 1 rows use the smaller theorem TV bound and carry ks/tv") {
  const auto row = run_row("simplex", 16, 1, "haar", 5, 20000, {"w1", "ks", "tv"}, {});
  REQUIRE(row.emp_ks);
  REQUIRE(row.emp_tv);
  CHECK(*row.emp_ks <= 1.0);
  CHECK(row.bound_dtv_thm > 0);
  const auto multi = run_row("simplex", 16, 2, "haar", 5, 20000, {"w1", "ks"}, {});
  CHECK_FALSE(multi.emp_ks);
  CHECK(multi.emp_w1);
  CHECK_THROWS(run_row("simplex", 16, 1, "haar", 5, 5000, {}, {}));
}

TEST_CASE("time budget caps the sample count with a note") {
  auto c = small_config();
  c.ns = {64};
  c.samples = 10000000;
  c.row_time_budget_ms = 1.0;
  c.record_runtime = true;
  const auto result = run_experiment(c);
  REQUIRE(result.rows.size() == 1);
  CHECK(result.rows[0].N == 10000);
  REQUIRE(result.notes.size() == 1);
  CHECK(result.notes[0].rfind("capped", 0) == 0);
  CHECK(result.rows[0].runtime_ms);
}
