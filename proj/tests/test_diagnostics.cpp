#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "usm/diagnostics.hpp"
#include "usm/error.hpp"
#include "usm/qr.hpp"

using namespace usm;

namespace {

ExperimentConfig config_for(const ProblemSpec& spec, std::vector<std::size_t> ns) {
  ExperimentConfig cfg;
  cfg.problem = spec;
  cfg.n_values = std::move(ns);
  return cfg;
}

}  // namespace

TEST_CASE("geometric grid") {
  CHECK(geometric_grid(10, 20, 1.2) == std::vector<std::size_t>{10, 12, 15, 18, 20});
  CHECK(geometric_grid(4, 4, 2.0) == std::vector<std::size_t>{4});
  CHECK(geometric_grid(3, 10, 1.01) == std::vector<std::size_t>{3, 4, 5, 6, 7, 8, 9, 10});
  CHECK_THROWS_AS(geometric_grid(10, 5, 1.2), Error);
  CHECK_THROWS_AS(geometric_grid(10, 50, 1.0), Error);
}

TEST_CASE("Cauchy partner and ratio parsing") {
  CHECK(cauchy_partner(200, 101, 100) == 202);
  CHECK(cauchy_partner(100, 101, 100) == 101);
  CHECK(cauchy_partner(101, 101, 100) == 103);
  CHECK(cauchy_partner(10, 101, 100) == 11);
  std::uint64_t num = 0, den = 0;
  parse_ratio("1.01", num, den);
  CHECK(num == 101);
  CHECK(den == 100);
  parse_ratio("2", num, den);
  CHECK(num == 2);
  CHECK(den == 1);
  CHECK_THROWS_AS(parse_ratio("1e-2", num, den), Error);
  CHECK_THROWS_AS(parse_ratio("", num, den), Error);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(2.220446049250313e-16) == "2.220446049250313e-16");
}

TEST_CASE("csv writing and reading") {
  std::ostringstream empty;
  write_csv({}, empty);
  CHECK(empty.str() == std::string(kCsvHeader) + "\n");

  DiagnosticsRecord a;
  a.n = 12;
  a.total_error = 0.0;
  a.cauchy_error = 1.5e-17;
  a.k = 3;
  a.m = 2;
  DiagnosticsRecord b;
  b.n = 15;
  b.kappa_inf = 1234.5;
  b.kappa_2 = 0.1 + 0.2;
  b.cond_Eb = 10.19223064;
  b.rule_of_thumb = 2.26e-15;
  b.rounding_error = 4.9406564584124654e-324;
  b.q_tail_sum = 1e300;
  std::ostringstream out;
  write_csv({a, b}, out);
  const std::string text = out.str();
  CHECK(text.find("\n12,0,,1.5e-17,,,,,,3,2\n") != std::string::npos);

  std::istringstream in(text);
  const auto back = read_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(same_csv_fields(back[0], a));
  CHECK(same_csv_fields(back[1], b));
  CHECK(*back[1].kappa_2 == 0.1 + 0.2);

  std::istringstream bad_header("n,total\n1,2\n");
  CHECK_THROWS_AS(read_csv(bad_header), Error);
  std::istringstream bad_row(std::string(kCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad_row), Error);
  std::istringstream bad_num(std::string(kCsvHeader) + "\n1,abc,,,,,,,,1,1\n");
  CHECK_THROWS_AS(read_csv(bad_num), Error);
  try {
    read_csv(std::string("/nonexistent/records.csv"));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
  try {
    write_csv({a}, std::string("/nonexistent/dir/records.csv"));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("exact polynomial solution has total error near machine precision") {
  const auto cfg = config_for(testing::corpus()[1].spec, {4, 16, 64, 256});
  const auto recs = total_error_study(cfg);
  REQUIRE(recs.size() == 4);
  for (const auto& r : recs) {
    REQUIRE(r.total_error.has_value());
    CHECK(*r.total_error <= 10 * machine_epsilon_working());
    CHECK(r.m == 2);
  }
}

TEST_CASE("zero data gives zero rounding error") {
  const auto spec = parse_problem_string(
      "order = 2\ncoeff.2 = [1]\nbc.0 = (-1, 0, 0)\nbc.1 = (1, 0, 0)\nrhs = [0]\n");
  const auto recs = rounding_error_study(config_for(spec, {8, 32, 128}));
  for (const auto& r : recs) CHECK(*r.rounding_error == 0.0);
}

TEST_CASE("Airy study behaviour") {
  auto cfg = config_for(testing::corpus()[0].spec, geometric_grid(10, 2000, 1.2));
  const auto cauchy = cauchy_error_study(cfg);
  bool reached_zero = false;
  for (std::size_t i = 0; i < cauchy.size(); ++i) {
    const double e = *cauchy[i].cauchy_error;
    if (e == 0.0) reached_zero = true;
    if (i > 0 && *cauchy[i - 1].cauchy_error > 0.0) {
      CHECK(e <= 1e4 * *cauchy[i - 1].cauchy_error);
    }
  }
  CHECK(reached_zero);
  CHECK(*cauchy.back().cauchy_error == 0.0);

  const auto again = cauchy_error_study(cfg);
  REQUIRE(again.size() == cauchy.size());
  for (std::size_t i = 0; i < again.size(); ++i) CHECK(same_csv_fields(again[i], cauchy[i]));

  cfg.n_values = {100, 200, 400};
  const auto total = total_error_study(cfg);
  const auto rounding = rounding_error_study(cfg);
  for (std::size_t i = 0; i < total.size(); ++i) {
    CAPTURE(total[i].n);
    const double parts = *rounding[i].rounding_error + *total[i].representation_error +
                         *total[i].truncation_error;
    // once the discretization error is gone the total is bounded by its parts
    CHECK(*total[i].total_error <= parts * (1 + 1e-6) + 1e-30);
    CHECK(*total[i].total_error < 1e-12);
  }
}

TEST_CASE("Airy mu = 1e-2 total error decays to a plateau near machine precision") {
  const auto recs = total_error_study(config_for(testing::corpus()[0].spec, geometric_grid(10, 2000, 1.2)));
  double lo = 1, hi = 0;
  for (const auto& r : recs) {
    if (r.n < 200) continue;
    lo = std::min(lo, *r.total_error);
    hi = std::max(hi, *r.total_error);
  }
  // levels off near machine precision, about 1.4e-16 with correctly rounded boundary data
  CHECK(hi <= 1e-12);
  CHECK(lo >= machine_epsilon_working() / 10);
  CHECK(hi <= 10 * lo);
  CHECK(*recs.front().total_error > 1e-3);
}

TEST_CASE("configuration errors") {
  auto expect = [](const ExperimentConfig& cfg, ErrorCode code) {
    try {
      cauchy_error_study(cfg);
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  const auto spec = testing::corpus()[0].spec;
  expect(config_for(spec, {}), ErrorCode::InvalidArgument);
  expect(config_for(spec, {20, 10}), ErrorCode::InvalidArgument);
  expect(config_for(spec, {3, 10}), ErrorCode::InvalidArgument);
  auto cfg = config_for(spec, {10});
  cfg.cauchy_num = 100;
  expect(cfg, ErrorCode::InvalidArgument);
  cfg = config_for(spec, {10});
  cfg.reference_bits = 128;
  expect(cfg, ErrorCode::InvalidArgument);

  const auto no_ref = parse_problem_string(
      "order = 2\ncoeff.2 = [1]\nbc.0 = (-1, 0, 0)\nbc.1 = (1, 0, 0)\nrhs = [1]\n");
  try {
    total_error_study(config_for(no_ref, {10}));
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  auto big = config_for(spec, {kDenseCutoff + 1});
  try {
    q_tail_study(big);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DenseCutoff);
  }
}

TEST_CASE("q tail and conditioning studies fill their columns") {
  const auto cfg = config_for(testing::corpus()[0].spec, {64, 128});
  for (const auto& r : q_tail_study(cfg)) {
    CHECK(r.q_tail_sum.has_value());
    CHECK(r.cauchy_error.has_value());
    REQUIRE(r.sigma.has_value());
    CHECK(*r.sigma < 1.0);
    CHECK_FALSE(r.kappa_inf.has_value());
  }
  for (const auto& r : conditioning_study(cfg)) {
    CHECK(r.kappa_inf.has_value());
    CHECK(r.kappa_2.has_value());
    CHECK(r.cond_Eb.has_value());
    CHECK(*r.rule_of_thumb >= *r.rounding_error);
    CHECK(r.k == 37);
  }
}
