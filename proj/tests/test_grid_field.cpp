#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "solflow/algebra.hpp"
#include "solflow/field.hpp"
#include "solflow/testbeds.hpp"

#include <cmath>

using namespace solflow;

namespace {
constexpr double kPi = 3.14159265358979323846;

TensorField sampled_scalar(const Grid& g, double (*fn)(double)) {
  TensorField f = TensorField::scalar(g);
  for (Index p = 0; p < g.size(); ++p) f.scalar_at(p) = fn(g.point(p)[0]);
  return f;
}
}  // namespace

TEST_CASE("partial derivative: sin on periodic grid matches cos at O(h^2)") {
  auto grid = torus_grid(1, 128);
  TensorField f = sampled_scalar(*grid, [](double x) { return std::sin(x); });
  TensorField d = fd_partial(f, 0, 1);
  double h = grid->spacing(0);
  double err = 0;
  for (Index p = 0; p < grid->size(); ++p)
    err = std::max(err, std::abs(d.scalar_at(p) - std::cos(grid->point(p)[0])));
  CHECK(err < h * h);

  TensorField d4 = fd_partial(f, 0, 1, 4);
  double err4 = 0;
  for (Index p = 0; p < grid->size(); ++p)
    err4 = std::max(err4, std::abs(d4.scalar_at(p) - std::cos(grid->point(p)[0])));
  CHECK(err4 < std::pow(h, 4));
}

TEST_CASE("partial derivative of a constant field vanishes exactly") {
  auto grid = gaussian_grid(1, 64);
  TensorField f = sampled_scalar(*grid, [](double) { return 3.25; });
  CHECK(fd_partial(f, 0, 1).max_abs() == 0.0);
  CHECK(fd_partial(f, 0, 2).max_abs() < 1e-12);
}

TEST_CASE("second derivative of x^2 on truncated axis is exact") {
  auto grid = gaussian_grid(1, 64);
  TensorField f = sampled_scalar(*grid, [](double x) { return x * x; });
  TensorField d2 = fd_partial(f, 0, 2);
  for (Index p = 0; p < grid->size(); ++p) CHECK(d2.scalar_at(p) == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("fd_partial rejects out-of-range axis") {
  auto grid = gaussian_grid(1, 32);
  TensorField f = TensorField::scalar(*grid);
  CHECK_THROWS_AS(fd_partial(f, 1, 1), std::invalid_argument);
}

TEST_CASE("omega integration on the Gaussian line") {
  auto grid = gaussian_grid(1, 256);
  TensorField one = sampled_scalar(*grid, [](double) { return 1.0; });
  // oracle: int_{-8}^{8} exp(-x^2/2) dx
  double expected = oracles::simpson([](double x) { return std::exp(-0.5 * x * x); }, -8, 8);
  CHECK(integrate_omega(one) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(integrate_omega(one) - std::sqrt(2 * kPi)) < 1e-8);

  TensorField zero = TensorField::scalar(*grid);
  CHECK(integrate_omega(zero) == 0.0);

  TensorField x = sampled_scalar(*grid, [](double x_) { return x_; });
  CHECK(std::abs(integrate_omega(x)) < 1e-12);
}

TEST_CASE("omega integration is linear and monotone") {
  auto grid = gaussian_grid(1, 128);
  Rng rng(7);
  TensorField a = random_scalar(*grid, rng);
  TensorField b = random_scalar(*grid, rng);
  double ia = integrate_omega(a), ib = integrate_omega(b);
  CHECK(integrate_omega(a + b) == doctest::Approx(ia + ib).epsilon(1e-12));
  CHECK(integrate_omega(2.5 * a) == doctest::Approx(2.5 * ia).epsilon(1e-12));

  TensorField pos = a;
  for (Index p = 0; p < grid->size(); ++p)
    pos.scalar_at(p) = std::abs(a.scalar_at(p)) + 0.1;
  CHECK(integrate_omega(pos) > 0.0);
}

TEST_CASE("integration rejects NaN") {
  auto grid = gaussian_grid(1, 32);
  TensorField f = TensorField::scalar(*grid);
  f.scalar_at(3) = std::nan("");
  CHECK_THROWS_AS(integrate_omega(f), std::domain_error);
}

TEST_CASE("endo exp/log are mutually inverse on symmetric fields") {
  auto grid = torus_grid(2, 12);
  Rng rng(11);
  TensorField A = random_symmetric_endo(*grid, rng, 3, 0.7);
  TensorField back = endo_log(endo_exp(A));
  CHECK((back - A).max_abs() < 1e-12);

  TensorField zero = TensorField::vector_valued(*grid, 1);
  TensorField expzero = endo_exp(zero);
  for (Index p = 0; p < grid->size(); ++p)
    CHECK((Mat(expzero.endo(p)) - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("endo_log of a diagonal field") {
  auto grid = torus_grid(2, 8);
  TensorField B = TensorField::vector_valued(*grid, 1);
  for (Index p = 0; p < grid->size(); ++p) {
    B.endo(p)(0, 0) = std::exp(1.0);
    B.endo(p)(1, 1) = std::exp(2.0);
  }
  TensorField L = endo_log(B);
  for (Index p = 0; p < grid->size(); ++p) {
    CHECK(L.endo(p)(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(L.endo(p)(1, 1) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(std::abs(L.endo(p)(0, 1)) < 1e-14);
  }
}

TEST_CASE("endo_exp against a scaling-and-squaring series oracle") {
  auto grid = torus_grid(2, 6);
  Rng rng(23);
  TensorField A = random_symmetric_endo(*grid, rng, 2, 1.3);
  TensorField E = endo_exp(A);
  for (Index p = 0; p < grid->size(); ++p) {
    Mat ref = oracles::expm_series(Mat(A.endo(p)));
    CHECK((Mat(E.endo(p)) - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("endo_log rejects non-positive input") {
  auto grid = torus_grid(2, 6);
  TensorField B = TensorField::vector_valued(*grid, 1);
  for (Index p = 0; p < grid->size(); ++p) {
    B.endo(p)(0, 0) = -1.0;
    B.endo(p)(1, 1) = 1.0;
  }
  CHECK_THROWS_AS(endo_log(B), std::domain_error);
}

TEST_CASE("g-relative exp/log round-trip for g-symmetric endomorphisms") {
  auto grid = torus_grid(2, 8);
  Rng rng(31);
  TensorField g = random_metric_near(*grid, euclidean_metric(*grid), rng, 0.2);
  TensorField M = random_gsym_endo(*grid, g, rng, 2, 0.5);
  CHECK(asymmetry_g(g, M) < 1e-12);
  TensorField back = endo_log_g(g, endo_exp_g(g, M));
  CHECK((back - M).max_abs() < 1e-11);
}
