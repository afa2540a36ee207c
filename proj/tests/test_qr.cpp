#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "support.hpp"
#include "usm/assembly.hpp"
#include "usm/error.hpp"
#include "usm/problem.hpp"
#include "usm/qr.hpp"
#include "usm/series.hpp"

using namespace usm;

namespace {

AlmostBandedMatrix<double> dense2(double a, double b, double c, double d) {
  const std::vector<double> m{a, b, c, d};
  return AlmostBandedMatrix<double>::from_dense(2, m, 0, 1, 1);
}

double inf_norm(const std::vector<double>& v) { return norm_inf(std::span<const double>(v)); }

AssembledSystem<double> system_for(const testing::NamedProblem& np, std::size_t n) {
  return assemble(materialize<double>(np.spec), n);
}

}  // namespace

TEST_CASE("identity factorizes trivially") {
  const auto a = AlmostBandedMatrix<double>(3, 0, {}, BandedMatrix<double>::identity(3));
  const auto qr = qr_factor(a);
  CHECK(qr.rotations().empty());
  for (std::size_t i = 0; i < 3; ++i) CHECK(qr.diagonal(i) == 1.0);
  const std::vector<double> f{1, 2, 3};
  CHECK(solve(qr, std::span<const double>(f)) == f);
}

TEST_CASE("2x2 permutation") {
  const auto qr = qr_factor(dense2(0, 1, 1, 0));
  REQUIRE(qr.rotations().size() == 1);
  CHECK(qr.rotations()[0].c == 0.0);
  CHECK(qr.rotations()[0].s == 1.0);
  CHECK(qr.r_entry(0, 0) == 1.0);
  CHECK(qr.r_entry(0, 1) == 0.0);
  CHECK(qr.r_entry(1, 1) == -1.0);
  const std::vector<double> f{3, 5};
  CHECK(solve(qr, std::span<const double>(f)) == std::vector<double>{5, 3});
}

TEST_CASE("back substitution on an upper triangular matrix") {
  const auto qr = qr_factor(dense2(2, 1, 0, 4));
  CHECK(qr.rotations().empty());
  const std::vector<double> s{4, 8};
  CHECK(back_substitute(qr, std::span<const double>(s)) == std::vector<double>{1, 2});
  const std::vector<double> y{2, 9};
  // R^T z = y: 2 z0 = 2, z0 + 4 z1 = 9
  CHECK(solve_r_transpose(qr, std::span<const double>(y)) == std::vector<double>{1, 2});
}

TEST_CASE("exactly singular matrix reports the column") {
  try {
    qr_factor(dense2(1, 1, 1, 1));
    FAIL("no error");
  } catch (const SingularMatrixError& e) {
    CHECK(e.code() == ErrorCode::SingularMatrix);
    CHECK(e.index() == 1);
  }
}

TEST_CASE("simple problems recover their exact solutions") {
  const auto corpus = testing::corpus();
  const double eps = machine_epsilon_working();
  for (std::size_t n : {4, 16, 64, 256}) {
    const auto sys = system_for(corpus[1], n);
    const auto u = solve(sys.A, std::span<const double>(sys.f));
    std::vector<double> want(n, 0.0);
    want[0] = 0.5;
    want[2] = 0.5;
    for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(u[i] - want[i]) <= 10 * eps);
  }
  const auto sys = system_for(corpus[2], 32);
  const auto u = solve(sys.A, std::span<const double>(sys.f));
  CHECK(std::fabs(u[0] - 0.5) <= 10 * eps);
  CHECK(std::fabs(u[1] - 0.5) <= 10 * eps);
  for (std::size_t i = 2; i < 32; ++i) CHECK(std::fabs(u[i]) <= 10 * eps);
}

TEST_CASE("Airy solve agrees with a long double dense LU") {
  const std::size_t n = 1000;
  const auto sys = system_for(testing::corpus()[0], n);
  const auto u = solve(sys.A, std::span<const double>(sys.f));
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  Mat a(n, n);
  Vec f(n);
  const auto dense = sys.A.to_dense();
  for (std::size_t i = 0; i < n; ++i) {
    f(i) = sys.f[i];
    for (std::size_t j = 0; j < n; ++j) a(i, j) = dense[i * n + j];
  }
  const Vec ref = a.partialPivLu().solve(f);
  long double diff = 0, scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    diff = std::max(diff, std::fabs(ref(i) - u[i]));
    scale = std::max(scale, std::fabs(ref(i)));
  }
  CHECK(static_cast<double>(diff / scale) <= 1e-12);
}

TEST_CASE("factorizations nest bitwise across n") {
  for (const auto& np : testing::corpus()) {
    for (std::size_t n : {64, 128, 256}) {
      CAPTURE(np.name);
      CAPTURE(n);
      const auto a = system_for(np, n);
      const auto b = system_for(np, n + 17);
      const auto qa = qr_factor(a.A);
      const auto qb = qr_factor(b.A);
      const std::size_t m = a.m;
      const std::size_t settled = n - m;
      for (std::size_t i = 0; i < settled; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          if (!(qa.r_entry(i, j) == qb.r_entry(i, j))) FAIL("R(" << i << ", " << j << ") differs");
        }
      }
      const std::size_t rot_end = qa.col_offsets()[settled];
      REQUIRE(qb.col_offsets()[settled] == rot_end);
      for (std::size_t r = 0; r < rot_end; ++r) {
        const auto& x = qa.rotations()[r];
        const auto& y = qb.rotations()[r];
        if (!(x.row == y.row && x.col == y.col && x.c == y.c && x.s == y.s)) {
          FAIL("rotation " << r << " differs");
        }
      }
    }
  }
}

TEST_CASE("Q^T f is backward stable and the solve residual is small") {
  const double eps = machine_epsilon_working();
  for (const auto& np : testing::corpus()) {
    CAPTURE(np.name);
    const std::size_t n = 300;
    const auto sys = system_for(np, n);
    const auto qr = qr_factor(sys.A);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(-1, 1);
    std::vector<double> f(n);
    for (auto& v : f) v = val(rng);
    const auto s = apply_qt(qr, std::span<const double>(f));
    std::vector<long double> ref(f.begin(), f.end());
    for (const auto& g : qr.rotations()) {
      const long double x = ref[g.row], y = ref[g.row + 1];
      ref[g.row] = g.c * x + g.s * y;
      ref[g.row + 1] = g.c * y - g.s * x;
    }
    long double err = 0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::fabs(ref[i] - s[i]));
    CHECK(static_cast<double>(err) <= 50 * sys.m * eps * inf_norm(f));

    const auto u = solve(qr, std::span<const double>(sys.f));
    const auto r = sys.A.apply(u);
    double res = 0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::fabs(r[i] - sys.f[i]));
    CHECK(res <= 50 * sys.m * eps * sys.A.norm_inf() * inf_norm(u));
  }
}

TEST_CASE("accumulated Q is orthogonal") {
  const std::size_t n = 512;
  const auto sys = system_for(testing::corpus()[0], n);
  const auto qr = qr_factor(sys.A);
  const auto q = accumulate_q(qr);
  Eigen::MatrixXd qm(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) qm(i, j) = q[i * n + j];
  }
  const Eigen::MatrixXd g = qm.transpose() * qm - Eigen::MatrixXd::Identity(n, n);
  CHECK(g.cwiseAbs().maxCoeff() <= 1e-12);
  for (std::size_t i = 0; i < n; ++i) CHECK(qm.row(i).norm() == doctest::Approx(1.0).epsilon(1e-13));

  // Q R reproduces A
  double worst = 0;
  for (std::size_t i = 0; i < n; i += 37) {
    for (std::size_t j = 0; j < n; j += 41) {
      double acc = 0;
      for (std::size_t p = 0; p <= j; ++p) acc += q[i * n + p] * qr.r_entry(p, j);
      worst = std::max(worst, std::fabs(acc - sys.A.entry(i, j)));
    }
  }
  CHECK(worst <= 1e-10 * sys.A.norm_inf());

  // row j of Q is Q^T e_j
  for (std::size_t j : {0, 1, 2, 17, 200, 511}) {
    const auto col = apply_qt_unit(qr, j);
    for (std::size_t p = 0; p < n; ++p) {
      if (!(col[p] == q[j * n + p])) FAIL("Q^T e_" << j << " differs at " << p);
    }
  }
}

TEST_CASE("q tail norms") {
  const std::vector<double> id{1, 0, 0, 0, 1, 0, 0, 0, 1};
  CHECK(q_tail_norm<double>(id, 3, 0, 1) == 0.0);
  CHECK(q_tail_norm<double>(id, 3, 2, 1) == 1.0);
  CHECK(q_tail_norm<double>(id, 3, 1, 2) == 1.0);
  const std::vector<double> q{0.6, 0.8, -0.8, 0.6};
  CHECK(q_tail_norm<double>(q, 2, 0, 1) == doctest::Approx(0.8));
  CHECK(q_tail_norm<double>(q, 2, 1, 2) == doctest::Approx(1.0));
}

TEST_CASE("trailing coefficients vanish exactly at large n") {
  const std::size_t n = 2000;
  const auto sys = system_for(testing::corpus()[0], n);
  const auto qr = qr_factor(sys.A);
  const auto s = apply_qt(qr, std::span<const double>(sys.f));
  const auto u = back_substitute(qr, std::span<const double>(s));
  for (std::size_t i = n - 100; i < n; ++i) {
    CHECK(s[i] == 0.0);
    CHECK(u[i] == 0.0);
  }
}

TEST_CASE("dense Q refuses systems above the cutoff") {
  const auto sys = system_for(testing::corpus()[1], kDenseCutoff + 1);
  const auto qr = qr_factor(sys.A);
  try {
    accumulate_q(qr);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DenseCutoff);
  }
}

TEST_CASE("extended precision factorization") {
  PrecisionScope scope(256);
  const auto p = materialize<BigFloat>(testing::corpus()[1].spec);
  const auto sys = assemble(p, 20);
  const auto u = solve(sys.A, std::span<const BigFloat>(sys.f));
  const BigFloat tol = BigFloat::pow2(-240, 64);
  CHECK(abs(u[0] - BigFloat(0.5)) <= tol);
  CHECK(abs(u[2] - BigFloat(0.5)) <= tol);
  CHECK(abs(u[1]) <= tol);
}
