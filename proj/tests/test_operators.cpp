#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "usm/assembly.hpp"
#include "usm/error.hpp"
#include "usm/operators.hpp"

using namespace usm;

TEST_CASE("differentiation entries") {
  const auto d1 = diff_op<double>(1, 5, 6);
  CHECK(d1.entry(0, 1) == 1.0);
  CHECK(d1.entry(1, 2) == 2.0);
  CHECK(d1.entry(4, 5) == 5.0);
  CHECK(d1.entry(1, 1) == 0.0);
  const auto d2 = diff_op<double>(2, 4, 6);
  // 2^(lam-1) (lam-1)! k
  CHECK(d2.entry(0, 2) == 4.0);
  CHECK(d2.entry(3, 5) == 10.0);
  const auto d3 = diff_op<double>(3, 2, 6);
  CHECK(d3.entry(0, 3) == 24.0);
  CHECK_THROWS_AS(diff_op<double>(0, 3, 3), Error);
}

TEST_CASE("conversion entries") {
  const auto s0 = conv_op<double>(0, 4, 4);
  CHECK(s0.entry(0, 0) == 1.0);
  CHECK(s0.entry(1, 1) == 0.5);
  CHECK(s0.entry(3, 3) == 0.5);
  CHECK(s0.entry(0, 2) == -0.5);
  CHECK(s0.entry(1, 3) == -0.5);
  const auto s1 = conv_op<double>(1, 4, 4);
  CHECK(s1.entry(0, 0) == 1.0);
  CHECK(s1.entry(1, 1) == 0.5);
  CHECK(s1.entry(0, 2) == -1.0 / 3.0);
  const auto s2 = conv_op<double>(2, 4, 4);
  CHECK(s2.entry(2, 2) == 0.5);
  CHECK(s2.entry(1, 3) == -2.0 / 5.0);
}

TEST_CASE("conversion is upper triangular with positive diagonal") {
  for (int lam = 0; lam <= 5; ++lam) {
    const auto s = conv_op<double>(lam, 30, 30);
    CHECK(s.lower() == 0);
    for (std::size_t k = 0; k < 30; ++k) {
      CHECK(s.entry(k, k) > 0.0);
      for (std::size_t j = 0; j < k; ++j) CHECK(s.entry(k, j) == 0.0);
    }
  }
}

TEST_CASE("Jacobi operator reproduces x C_k") {
  for (int lam = 0; lam <= 3; ++lam) {
    const std::size_t n = 12;
    const auto j = jacobi_op<double>(lam, n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      for (testing::LD x : {-0.7L, 0.1L, 0.85L}) {
        testing::LD lhs = x * testing::basis(lam, static_cast<int>(k), x);
        testing::LD rhs = 0;
        for (std::size_t i = 0; i < n; ++i) rhs += j.entry(i, k) * testing::basis(lam, static_cast<int>(i), x);
        CHECK(static_cast<double>(lhs) == doctest::Approx(static_cast<double>(rhs)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("multiplication bandwidths and structure") {
  const std::vector<double> a{1, 0, 0.5, 0.25};
  for (int lam = 0; lam <= 2; ++lam) {
    const auto m = mult_op<double>(std::span<const double>(a), lam, 20);
    CHECK(m.lower() == 3);
    CHECK(m.upper() == 3);
  }
  const std::vector<double> zero{0, 0};
  const auto z = mult_op<double>(std::span<const double>(zero), 1, 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(z.entry(i, i) == 0.0);
  const std::vector<double> one{1};
  const auto id = mult_op<double>(std::span<const double>(one), 2, 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(id.entry(i, i) == 1.0);
}

TEST_CASE("banded algebra") {
  BandedMatrix<double> a(3, 3, 1, 0), b(3, 3, 0, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    a.at(i, i) = 1;
    b.at(i, i) = 2;
    if (i > 0) a.at(i, i - 1) = 3;
    if (i + 1 < 3) b.at(i, i + 1) = 4;
  }
  const auto c = band_mul(a, b);
  // [1 0 0; 3 1 0; 0 3 1] * [2 4 0; 0 2 4; 0 0 2]
  CHECK(c.entry(0, 0) == 2);
  CHECK(c.entry(0, 1) == 4);
  CHECK(c.entry(1, 0) == 6);
  CHECK(c.entry(1, 1) == 14);
  CHECK(c.entry(1, 2) == 4);
  CHECK(c.entry(2, 1) == 6);
  CHECK(c.entry(2, 2) == 14);
  const auto s = band_add(a, band_scale(b, -1.0));
  CHECK(s.entry(0, 0) == -1);
  CHECK(s.entry(1, 0) == 3);
  CHECK(s.entry(0, 1) == -4);
  CHECK_THROWS_AS(band_mul(a, BandedMatrix<double>(2, 2, 0, 0)), Error);
  const std::vector<double> x{1, 1, 1};
  CHECK(c.apply(x) == std::vector<double>{6, 24, 20});
}

TEST_CASE("assembled operator matches the pointwise oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-1, 1);
  std::uniform_int_distribution<int> ord(1, 3), adeg(0, 3), udeg(0, 16);
  for (int trial = 0; trial < 100; ++trial) {
    OdeProblem<double> p;
    p.order = ord(rng);
    p.coeffs.assign(p.order + 1, {});
    for (int l = 0; l <= p.order; ++l) {
      if (l < p.order && val(rng) < -0.3) continue;
      p.coeffs[l].resize(adeg(rng) + 1);
      for (auto& c : p.coeffs[l]) c = val(rng);
      if (l == p.order) p.coeffs[l][0] = 2.5;  // keeps a^N from vanishing
    }
    for (int i = 0; i < p.order; ++i) p.bcs.push_back({i % 2 ? 1 : -1, 0, 0.0});
    std::vector<double> u(udeg(rng) + 1);
    for (auto& c : u) c = val(rng);

    const auto ref = testing::operator_oracle(p.coeffs, u);
    const std::size_t rows = ref.size() + 4;
    const std::size_t cols = std::max(rows, u.size());
    const auto op = assemble_operator(p, rows, cols);
    std::vector<double> padded(u);
    padded.resize(cols, 0.0);
    const auto got = op.apply(padded);
    double scale = 0;
    for (auto v : ref) scale = std::max(scale, static_cast<double>(std::fabs(v)));
    for (std::size_t i = 0; i < rows; ++i) {
      const double want = i < ref.size() ? static_cast<double>(ref[i]) : 0.0;
      CHECK(std::fabs(got[i] - want) <= 1e-11 * std::max(1.0, scale));
    }
  }
}
