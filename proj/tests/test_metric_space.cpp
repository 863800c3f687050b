#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "solflow/metric_space.hpp"
#include "solflow/testbeds.hpp"

#include <cmath>

using namespace solflow;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("scalar product of the space of metrics") {
  auto grid = gaussian_grid(1, 256);
  TensorField g0 = euclidean_metric(*grid);

  SUBCASE("G(g, g) = n * vol_Omega") {
    double vol = integrate_omega([&] {
      TensorField one = TensorField::scalar(*grid);
      for (Index p = 0; p < grid->size(); ++p) one.scalar_at(p) = 1.0;
      return one;
    }());
    CHECK(g_inner(g0, g0, g0) == doctest::Approx(1.0 * vol).epsilon(1e-12));
  }
  SUBCASE("symmetry") {
    Rng rng(201);
    TensorField u = random_symmetric_2tensor(*grid, rng, 3, 1.0);
    TensorField v = random_symmetric_2tensor(*grid, rng, 3, 1.0);
    CHECK(g_inner(g0, u, v) == doctest::Approx(g_inner(g0, v, u)).epsilon(1e-13));
  }
  SUBCASE("sin(x) g against the quadrature oracle") {
    TensorField u = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p)
      u.mat2(p)(0, 0) = std::sin(grid->point(p)[0]);
    double expected =
        oracles::simpson([](double x) { return std::sin(x) * std::sin(x) * std::exp(-0.5 * x * x); },
                         -8, 8);
    CHECK(g_inner(g0, u, u) == doctest::Approx(expected).epsilon(1e-10));
    // closed form over the full line: sqrt(2 pi)/2 (1 - e^{-2})
    CHECK(std::abs(g_inner(g0, u, u) - std::sqrt(2 * kPi) / 2 * (1 - std::exp(-2.0))) < 1e-8);
  }
}

TEST_CASE("geodesics of the space of metrics") {
  SUBCASE("t = 0 returns the base point") {
    auto grid = torus_grid(2, 8);
    Rng rng(203);
    TensorField g0 = random_metric_near(*grid, euclidean_metric(*grid), rng, 0.2);
    TensorField v = random_symmetric_2tensor(*grid, rng, 2, 0.5);
    TensorField g = geodesic(*grid, g0, v, 0.0);
    CHECK((g - g0).max_abs() < 1e-14);
  }
  SUBCASE("diagonal closed form") {
    auto grid = torus_grid(2, 8);
    TensorField g0 = euclidean_metric(*grid);
    TensorField v = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) {
      v.mat2(p)(0, 0) = 1.0;
      v.mat2(p)(1, 1) = -1.0;
    }
    TensorField g = geodesic(*grid, g0, v, 1.0);
    for (Index p = 0; p < grid->size(); ++p) {
      CHECK(g.mat2(p)(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
      CHECK(g.mat2(p)(1, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
      CHECK(std::abs(g.mat2(p)(0, 1)) < 1e-14);
    }
  }
  SUBCASE("geodesic equation: finite-difference velocity lift is constant") {
    auto grid = gaussian_grid(1, 64);
    Rng rng(207);
    TensorField g0 = random_metric_near(*grid, euclidean_metric(*grid), rng, 0.2);
    TensorField v = random_symmetric_2tensor(*grid, rng, 2, 0.4);
    TensorField E0 = endo_of(*grid, g0, v);
    double dt = 1e-4, t = 0.7;
    TensorField gp = geodesic(*grid, g0, v, t + dt);
    TensorField gm = geodesic(*grid, g0, v, t - dt);
    TensorField gt = geodesic(*grid, g0, v, t);
    TensorField gdot = (0.5 / dt) * (gp - gm);
    TensorField lift = endo_of(*grid, gt, gdot);
    CHECK((lift - E0).max_abs() < 1e-6);
  }
  SUBCASE("one-parameter group law") {
    auto grid = torus_grid(1, 16);
    Rng rng(211);
    TensorField g0 = random_metric_near(*grid, euclidean_metric(*grid), rng, 0.3);
    TensorField v = random_symmetric_2tensor(*grid, rng, 2, 0.4);
    double s = 0.4, t = 0.9;
    TensorField gs = geodesic(*grid, g0, v, s);
    TensorField gst = geodesic(*grid, g0, v, s + t);
    // g0^{-1} g_{s+t} = (g0^{-1} g_s)(g0^{-1} g_t) when the lift commutes
    TensorField lhs = endo_of(*grid, g0, gst);
    TensorField rhs = endo_mult(endo_of(*grid, g0, gs), endo_of(*grid, g0, geodesic(*grid, g0, v, t)));
    CHECK((lhs - rhs).max_abs() < 1e-10);
  }
  SUBCASE("asymmetric velocity is rejected") {
    auto grid = torus_grid(2, 8);
    TensorField g0 = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) {
      g0.mat2(p)(0, 0) = 2.0;
      g0.mat2(p)(1, 1) = 0.5;
    }
    TensorField v = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) {
      v.mat2(p)(0, 1) = 1.0;  // not symmetric as a tensor entry pattern vs g0
      v.mat2(p)(1, 0) = -1.0;
    }
    CHECK_THROWS_AS(geodesic(*grid, g0, v, 1.0), std::invalid_argument);
  }
}

TEST_CASE("curvature of the space of metrics") {
  auto grid = torus_grid(2, 8);
  Rng rng(213);
  TensorField g = random_metric_near(*grid, euclidean_metric(*grid), rng, 0.2);
  TensorField u = random_symmetric_2tensor(*grid, rng, 2, 1.0);
  TensorField v = random_symmetric_2tensor(*grid, rng, 2, 1.0);
  TensorField w = random_symmetric_2tensor(*grid, rng, 2, 1.0);

  SUBCASE("antisymmetry: u = v gives zero") {
    CHECK(curvature_space_of_metrics(*grid, g, u, u, w).max_abs() < 1e-14);
  }
  SUBCASE("commuting directions are flat") {
    TensorField du = TensorField::covariant(*grid, 2);
    TensorField dv = TensorField::covariant(*grid, 2);
    Rng r2(217);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    for (Index p = 0; p < grid->size(); ++p) {
      du.mat2(p)(0, 0) = unif(r2);
      du.mat2(p)(1, 1) = unif(r2);
      dv.mat2(p)(0, 0) = unif(r2);
      dv.mat2(p)(1, 1) = unif(r2);
    }
    TensorField gd = euclidean_metric(*grid);
    CHECK(curvature_space_of_metrics(*grid, gd, du, dv, w).max_abs() < 1e-13);
  }
  SUBCASE("independent re-evaluation of the bracket formula") {
    TensorField R = curvature_space_of_metrics(*grid, g, u, v, w);
    double worst = 0;
    for (Index p = 0; p < grid->size(); ++p) {
      Mat G = g.mat2(p);
      Mat us = G.inverse() * Mat(u.mat2(p));
      Mat vs = G.inverse() * Mat(v.mat2(p));
      Mat ws = G.inverse() * Mat(w.mat2(p));
      Mat inner = (us * vs - vs * us) * ws - ws * (us * vs - vs * us);
      Mat expect = -0.25 * (inner.transpose() * G);
      worst = std::max(worst, (Mat(R.mat2(p)) - expect).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("membership predicates") {
  SUBCASE("1D: every velocity satisfies the 3-symmetry condition") {
    auto grid = gaussian_grid(1, 64);
    Rng rng(219);
    TensorField g = random_metric_near(*grid, euclidean_metric(*grid), rng, 0.2);
    Geometry geo = make_geometry(*grid, g);
    TensorField v = random_symmetric_2tensor(*grid, rng, 3, 0.7);
    CHECK(in_F(geo, v).max() < 1e-12);
  }
  SUBCASE("flat 2D torus with constant diagonal data passes all residuals") {
    auto grid = torus_grid(2, 12);
    Geometry geo = make_geometry(*grid, euclidean_metric(*grid));
    Polarization K = make_polarization(*grid, {1.0, 2.0});
    TensorField v = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) {
      v.mat2(p)(0, 0) = 0.7;
      v.mat2(p)(1, 1) = -0.3;
    }
    CHECK(in_F_K(geo, v, K).max() < 1e-12);
    CHECK(in_E(geo, v).max() < 1e-12);
    CHECK(in_F_infty(geo, v).max() < 1e-12);
  }
  SUBCASE("rotation-conjugated diagonal with varying angle fails (negative control)") {
    auto grid = torus_grid(2, 32);
    Geometry geo = make_geometry(*grid, euclidean_metric(*grid));
    Polarization K = make_polarization(*grid, {1.0, 2.0});
    TensorField v = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) {
      double th = 0.5 * std::sin(grid->point(p)[0]);
      Mat rot(2, 2);
      rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      Mat diag = Mat::Zero(2, 2);
      diag(0, 0) = 1.0;
      diag(1, 1) = -1.0;
      v.mat2(p) = rot * diag * rot.transpose();
    }
    CHECK(in_F_K(geo, v, K).max() > 1e-2);
  }
  SUBCASE("both polarized-space characterisations co-vanish and co-fail") {
    auto grid = torus_grid(2, 24);
    Geometry geo = make_geometry(*grid, euclidean_metric(*grid));
    Polarization K = make_polarization(*grid, {1.0, 2.0});
    TensorField member = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) {
      member.mat2(p)(0, 0) = 1.1;
      member.mat2(p)(1, 1) = 0.4;
    }
    auto [a, b] = equivalent_FK_check(geo, member, K);
    CHECK(a.max() < 1e-12);
    CHECK(b.max() < 1e-12);

    Rng rng(223);
    TensorField non = random_symmetric_2tensor(*grid, rng, 2, 0.8);
    auto [c, d] = equivalent_FK_check(geo, non, K);
    CHECK(c.max() > 1e-3);
    CHECK(d.max() > 1e-3);
  }
}

TEST_CASE("scattering predicates") {
  SUBCASE("Gaussian soliton is scattering data") {
    auto grid = gaussian_grid(1, 128);
    Geometry geo = make_geometry(*grid, euclidean_metric(*grid));
    Polarization K = make_polarization(*grid, {1.0});
    double h = grid->spacing(0);
    CHECK(is_prescattering(geo).max() < 10 * h * h);
    CHECK(is_scattering_K(geo, K).max() < 10 * h * h);
  }
  SUBCASE("flat torus with Omega = dV") {
    auto grid = torus_grid(2, 12);
    TensorField g = euclidean_metric(*grid);
    set_omega_from_metric(*grid, g);
    Geometry geo = make_geometry(*grid, g);
    Polarization K = make_polarization(*grid, {1.0, 2.0});
    CHECK(is_prescattering(geo).max() < 1e-12);
    CHECK(is_scattering_K(geo, K).max() < 1e-12);
  }
  SUBCASE("2D negative control: non-commuting weighted Ricci") {
    auto grid = torus_grid(2, 32);
    Rng rng(227);
    TensorField w = random_scalar(*grid, rng, 2, 0.8);
    Grid::ArrayX omega(grid->size());
    for (Index p = 0; p < grid->size(); ++p) omega[p] = std::exp(w.scalar_at(p));
    grid->set_omega(omega);
    Geometry geo = make_geometry(*grid, euclidean_metric(*grid));
    Polarization K = make_polarization(*grid, {1.0, 2.0});
    CHECK(is_scattering_K(geo, K).max() > 1e-2);
  }
}

TEST_CASE("flat coordinates and distance") {
  auto grid = gaussian_grid(1, 128);
  TensorField g0 = euclidean_metric(*grid);

  SUBCASE("distance to itself is zero") {
    FlatCoordinates fc = flat_coordinates(*grid, g0, g0);
    CHECK(fc.distance == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fc.A.max_abs() < 1e-14);
  }
  SUBCASE("constant conformal scaling has closed-form distance") {
    double c = 0.35;
    TensorField g = std::exp(-2 * c) * g0;
    FlatCoordinates fc = flat_coordinates(*grid, g0, g);
    TensorField one = TensorField::scalar(*grid);
    for (Index p = 0; p < grid->size(); ++p) one.scalar_at(p) = 1.0;
    double vol = integrate_omega(one);
    CHECK(fc.distance == doctest::Approx(2 * c * std::sqrt(1.0 * vol)).epsilon(1e-10));
  }
  SUBCASE("triangle inequality on sampled members") {
    Rng rng(229);
    std::vector<TensorField> gs;
    for (int i = 0; i < 3; ++i) {
      TensorField a = random_scalar(*grid, rng, 2, 0.3);
      TensorField g = TensorField::covariant(*grid, 2);
      for (Index p = 0; p < grid->size(); ++p)
        g.mat2(p)(0, 0) = std::exp(-2 * a.scalar_at(p));
      gs.push_back(g);
    }
    double d01 = dist_on_flat(*grid, g0, gs[0], gs[1]);
    double d12 = dist_on_flat(*grid, g0, gs[1], gs[2]);
    double d02 = dist_on_flat(*grid, g0, gs[0], gs[2]);
    CHECK(d02 <= d01 + d12 + 1e-8);
  }
}

TEST_CASE("membership is preserved along polarized geodesics") {
  auto grid = gaussian_grid(1, 128);
  TensorField g0 = euclidean_metric(*grid);
  Polarization K = make_polarization(*grid, {1.0});
  Rng rng(233);
  TensorField phi = random_scalar(*grid, rng, 2, 0.4);
  TensorField v = TensorField::covariant(*grid, 2);
  for (Index p = 0; p < grid->size(); ++p) v.mat2(p)(0, 0) = phi.scalar_at(p);
  double h = grid->spacing(0);
  for (double t : {0.5, 1.0, 2.0}) {
    TensorField gt = geodesic(*grid, g0, v, t);
    ResidualReport r = sigma_K_membership(*grid, g0, gt, K);
    CHECK(r.max() < 50 * h * h);
  }
}

TEST_CASE("conservation along geodesics") {
  SUBCASE("zero velocity: all drifts vanish") {
    auto grid = gaussian_grid(1, 64);
    TensorField g0 = euclidean_metric(*grid);
    Polarization K = make_polarization(*grid, {1.0});
    TensorField v = TensorField::covariant(*grid, 2);
    auto recs = conservation_along_geodesic(*grid, g0, v, K, {0.5, 1.0});
    for (const auto& r : recs) {
      CHECK(r.curvature_drift < 1e-14);
      CHECK(r.nabla_gdot_drift < 1e-14);
    }
  }
  SUBCASE("constant commuting data on the torus: exact conservation") {
    auto grid = torus_grid(2, 12);
    TensorField g0 = euclidean_metric(*grid);
    set_omega_from_metric(*grid, g0);
    Polarization K = make_polarization(*grid, {1.0, 2.0});
    TensorField v = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) {
      v.mat2(p)(0, 0) = 0.8;
      v.mat2(p)(1, 1) = -0.2;
    }
    auto recs = conservation_along_geodesic(*grid, g0, v, K, {1.0, 2.0});
    for (const auto& r : recs) {
      CHECK(r.curvature_drift < 1e-12);
      CHECK(r.prescattering_residual < 1e-12);
      CHECK(r.nabla_gdot_drift < 1e-12);
      CHECK(r.membership.max() < 1e-12);
    }
  }
  SUBCASE("1D Gaussian soliton with a conformal velocity") {
    auto grid = gaussian_grid(1, 128);
    TensorField g0 = euclidean_metric(*grid);
    Polarization K = make_polarization(*grid, {1.0});
    Rng rng(239);
    TensorField phi = random_scalar(*grid, rng, 2, 0.3);
    TensorField v = TensorField::covariant(*grid, 2);
    for (Index p = 0; p < grid->size(); ++p) v.mat2(p)(0, 0) = phi.scalar_at(p);
    double h = grid->spacing(0);
    auto recs = conservation_along_geodesic(*grid, g0, v, K, {0.5, 1.0});
    for (const auto& r : recs) {
      CHECK(r.curvature_drift < 1e-10);  // 1D flatness
      CHECK(r.prescattering_residual < 50 * h * h);
    }
  }
}
