#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "solflow/w_functional.hpp"

#include <cmath>

using namespace solflow;

namespace {
constexpr double kPi = 3.14159265358979323846;

TensorField iso_endo(const Grid& grid, const TensorField& s) {
  TensorField A = TensorField::vector_valued(grid, 1);
  for (Index p = 0; p < grid.size(); ++p)
    A.endo(p) = s.scalar_at(p) * Mat::Identity(grid.dim(), grid.dim());
  return A;
}

double torus_volume(const Grid& grid) {
  TensorField one = TensorField::scalar(grid);
  for (Index p = 0; p < grid.size(); ++p) one.scalar_at(p) = 1.0;
  return integrate_omega(one);
}
}  // namespace

TEST_CASE("functional value oracles") {
  SUBCASE("Gaussian soliton: W = 2 int f0 Omega") {
    auto grid = gaussian_grid(1, 256);
    double w = w_omega_metric(*grid, euclidean_metric(*grid));
    double expected =
        oracles::simpson([](double x) { return x * x * std::exp(-0.5 * x * x); }, -8, 8);
    double h = grid->spacing(0);
    CHECK(std::abs(w - expected) < 10 * h * h);
    CHECK(std::abs(expected - std::sqrt(2 * kPi)) < 1e-7);  // closed form of the oracle
  }
  SUBCASE("flat torus with Omega = dV: W = -n vol") {
    auto grid = torus_grid(2, 16);
    TensorField g = euclidean_metric(*grid);
    set_omega_from_metric(*grid, g);
    double vol = torus_volume(*grid);
    CHECK(w_omega_metric(*grid, g) == doctest::Approx(-2.0 * vol).epsilon(1e-12));
  }
  SUBCASE("scaling probe re-evaluates consistently") {
    auto grid = torus_grid(2, 16);
    TensorField g = euclidean_metric(*grid);
    set_omega_from_metric(*grid, g);
    double c = 0.2;
    TensorField gs = std::exp(-2 * c) * g;
    double direct = w_omega_metric(*grid, gs);
    double again = w_omega_metric(*grid, gs);
    CHECK(direct == doctest::Approx(again).epsilon(1e-14));
  }
}

TEST_CASE("coordinate form of the functional") {
  SUBCASE("A = 0 agrees with the metric form at the base point") {
    auto grid = gaussian_grid(1, 256);
    FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
    TensorField zero = TensorField::vector_valued(*grid, 1);
    double h = grid->spacing(0);
    CHECK(std::abs(w_bold(ctx, zero) - w_omega_metric(*grid, ctx.geo0.g)) < 10 * h * h);
  }
  SUBCASE("agreement with the metric route for random coordinates") {
    auto grid = gaussian_grid(1, 128);
    FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
    Rng rng(301);
    TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.4));
    double via_coord = w_bold(ctx, A);
    double via_metric = w_omega_metric(*grid, metric_of_coordinate(ctx, A));
    double h = grid->spacing(0);
    CHECK(std::abs(via_coord - via_metric) < 50 * h * h * std::max(1.0, std::abs(via_metric)));
  }
  SUBCASE("constant isotropic coordinate on the unweighted torus") {
    auto grid = torus_grid(2, 16);
    TensorField g = euclidean_metric(*grid);
    set_omega_from_metric(*grid, g);
    FlatContext ctx = make_flat_context(*grid, g);
    double c = 0.3, n = 2;
    TensorField s = TensorField::scalar(*grid);
    for (Index p = 0; p < grid->size(); ++p) s.scalar_at(p) = c;
    double vol = torus_volume(*grid);
    CHECK(w_bold(ctx, iso_endo(*grid, s)) ==
          doctest::Approx(-(2 * c + 1) * n * vol).epsilon(1e-12));
  }
}

TEST_CASE("gradient of the functional") {
  auto grid = gaussian_grid(1, 256);
  FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
  double h = grid->spacing(0);

  SUBCASE("the soliton is a critical point") {
    TensorField zero = TensorField::vector_valued(*grid, 1);
    CHECK(sup_norm_g(ctx.geo0.g, grad_w(ctx, zero)) < 10 * h * h);
  }
  SUBCASE("matches central differences through the constant L2 product") {
    Rng rng(307);
    const double eps = 1e-5;
    for (int trial = 0; trial < 5; ++trial) {
      TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.3));
      TensorField V = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.5));
      double fd = (w_bold(ctx, A + eps * V) - w_bold(ctx, A - eps * V)) / (2 * eps);
      double pairing = l2_product4(ctx, grad_w(ctx, A), V);
      CHECK(std::abs(fd - pairing) < 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
  SUBCASE("constant isotropic direction on the unweighted torus") {
    auto tgrid = torus_grid(2, 12);
    TensorField g = euclidean_metric(*tgrid);
    set_omega_from_metric(*tgrid, g);
    FlatContext tctx = make_flat_context(*tgrid, g);
    TensorField s = TensorField::scalar(*tgrid);
    for (Index p = 0; p < tgrid->size(); ++p) s.scalar_at(p) = 0.25;
    TensorField grad = grad_w(tctx, iso_endo(*tgrid, s));
    for (Index p = 0; p < tgrid->size(); ++p)
      CHECK((Mat(grad.endo(p)) + 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("second variation") {
  auto grid = gaussian_grid(1, 256);
  FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
  Rng rng(311);

  SUBCASE("V = 0 gives zero") {
    TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.3));
    TensorField zero = TensorField::vector_valued(*grid, 1);
    CHECK(second_variation_w(ctx, A, zero) == 0.0);
  }
  SUBCASE("at the soliton base point: 2 int (2|V|^2 + |nabla V|^2)") {
    TensorField zero = TensorField::vector_valued(*grid, 1);
    TensorField V = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.5));
    double got = second_variation_w(ctx, zero, V);
    double n2 = integrate_omega(pointwise_norm2_g(ctx.geo0.g, V));
    double dn2 =
        integrate_omega(pointwise_norm2_g(ctx.geo0.g, covariant_derivative(ctx.geo0, V)));
    double h = grid->spacing(0);
    CHECK(std::abs(got - 2 * (2 * n2 + dn2)) < 100 * h * h);
    CHECK(got > 0.0);
  }
  SUBCASE("matches second central differences") {
    const double eps = 1e-4;
    for (int trial = 0; trial < 3; ++trial) {
      TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.3));
      TensorField V = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.5));
      double fd =
          (w_bold(ctx, A + eps * V) - 2 * w_bold(ctx, A) + w_bold(ctx, A - eps * V)) / (eps * eps);
      double formula = second_variation_w(ctx, A, V);
      CHECK(std::abs(fd - formula) < 1e-4 * std::max(1.0, std::abs(formula)));
    }
  }
}

TEST_CASE("weighted Ricci of a coordinate: three routes") {
  SUBCASE("A = 0 returns the base tensor") {
    auto grid = gaussian_grid(1, 128);
    FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
    TensorField zero = TensorField::vector_valued(*grid, 1);
    CHECK(sup_norm_g(ctx.geo0.g, ric_of_A_bracket(ctx, zero) - ctx.ric0) < 1e-12);
    CHECK(sup_norm_g(ctx.geo0.g, ric_of_A_hform(ctx, zero) - ctx.ric0) < 1e-12);
    CHECK(sup_norm_g(ctx.geo0.g, ric_of_A_direct(ctx, zero) - ctx.ric0) < 1e-12);
  }
  SUBCASE("random 1D coordinate: all routes agree at O(h^2)") {
    double res_c = 0, res_f = 0;
    for (int pts : {128, 256}) {
      auto grid = gaussian_grid(1, pts);
      FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
      Rng rng(313);
      TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.3));
      TensorField direct = ric_of_A_direct(ctx, A);
      TensorField viabr = ric_of_A_bracket(ctx, A);
      TensorField viah = ric_of_A_hform(ctx, A);
      double r = std::max(sup_norm_g(ctx.geo0.g, direct - viabr),
                          sup_norm_g(ctx.geo0.g, direct - viah));
      (pts == 128 ? res_c : res_f) = r;
    }
    CHECK(std::log2(res_c / res_f) > 1.8);
    CHECK(res_f < 1e-2);
  }
  SUBCASE("the bracket term is a nonnegative form") {
    auto grid = gaussian_grid(1, 128);
    FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
    Rng rng(317);
    TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.8));
    TensorField br = bracket_product(ctx, A, A);
    CHECK(min_eigenvalue_g(ctx.geo0.g, endo_of(*grid, ctx.geo0.g, br)) > -1e-10);
  }
}

TEST_CASE("convex set membership") {
  auto grid = gaussian_grid(1, 256);
  FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
  double h = grid->spacing(0);

  SUBCASE("A = 0 is a member of every set with margin near epsilon") {
    TensorField zero = TensorField::vector_valued(*grid, 1);
    CHECK(ctx.epsilon > 1 - 10 * h * h);
    for (auto kind : {ConvexSetKind::PlusPlus, ConvexSetKind::Minus, ConvexSetKind::Plus}) {
      ConvexMargin m = convex_set_membership(ctx, zero, make_convex_spec(ctx, kind));
      CHECK(m.pointwise > 0.9);
    }
    ConvexMargin md =
        convex_set_membership(ctx, zero, make_convex_spec(ctx, ConvexSetKind::Delta, 0.5));
    CHECK(md.pointwise > 0.4);
  }
  SUBCASE("delta-set specification enforces delta < epsilon") {
    CHECK_THROWS_AS(make_convex_spec(ctx, ConvexSetKind::Delta, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(make_convex_spec(ctx, ConvexSetKind::Delta, -0.1), std::invalid_argument);
  }
  SUBCASE("sin-amplitude threshold of the strong set sits at a = 1") {
    // A = a sin(x) I: member iff a^2 cos^2(x) <= 1 pointwise
    auto member_at = [&](double a) {
      TensorField s = TensorField::scalar(*grid);
      for (Index p = 0; p < grid->size(); ++p)
        s.scalar_at(p) = a * std::sin(grid->point(p)[0]);
      ConvexMargin m = convex_set_membership(ctx, iso_endo(*grid, s),
                                             make_convex_spec(ctx, ConvexSetKind::PlusPlus));
      return m.pointwise >= 0.0;
    };
    double lo = 0.5, hi = 1.5;
    REQUIRE(member_at(lo));
    REQUIRE(!member_at(hi));
    while (hi - lo > 1e-4) {
      double mid = 0.5 * (lo + hi);
      (member_at(mid) ? lo : hi) = mid;
    }
    CHECK(std::abs(0.5 * (lo + hi) - 1.0) < 5e-3);
  }
  SUBCASE("midpoints of member pairs are members") {
    Rng rng(331);
    ConvexSetSpec spec = make_convex_spec(ctx, ConvexSetKind::PlusPlus);
    int tested = 0;
    while (tested < 8) {
      TensorField A0 = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.5));
      TensorField A1 = iso_endo(*grid, random_scalar(*grid, rng, 3, 0.5));
      if (convex_set_membership(ctx, A0, spec).pointwise < 0.0) continue;
      if (convex_set_membership(ctx, A1, spec).pointwise < 0.0) continue;
      TensorField mid = 0.5 * (A0 + A1);
      CHECK(convex_set_membership(ctx, mid, spec).pointwise >= -1e-8);
      ++tested;
    }
  }
  SUBCASE("sampled integral inequality for the weak set") {
    Rng rng(337);
    TensorField s = TensorField::scalar(*grid);
    for (Index p = 0; p < grid->size(); ++p)
      s.scalar_at(p) = 0.5 * std::sin(grid->point(p)[0]);
    ConvexMargin m = convex_set_membership(ctx, iso_endo(*grid, s),
                                           make_convex_spec(ctx, ConvexSetKind::Plus), &rng, 64);
    CHECK(m.pointwise > 0.0);
    CHECK(m.sampled > 0.0);
  }
}

TEST_CASE("uniform lower bound") {
  auto grid = gaussian_grid(1, 256);
  FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
  double h = grid->spacing(0);

  SUBCASE("equality at the soliton with eps = 1") {
    TensorField zero = TensorField::vector_valued(*grid, 1);
    double bound = w_lower_bound(ctx, 1.0);
    double val = w_bold(ctx, zero);
    CHECK(val >= bound - 1e-9);
    CHECK(std::abs(val - bound) < 10 * h * h);
  }
  SUBCASE("random coordinates stay above the bound") {
    Rng rng(341);
    double bound = w_lower_bound(ctx, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 4, 0.6));
      CHECK(w_bold(ctx, A) >= bound - 1e-6);
    }
  }
  SUBCASE("bound is monotone in eps") {
    CHECK(w_lower_bound(ctx, 0.5) < w_lower_bound(ctx, 1.0));
    CHECK_THROWS_AS(w_lower_bound(ctx, 0.0), std::invalid_argument);
  }
}

TEST_CASE("criticality at coordinates characterises solitons") {
  auto grid = gaussian_grid(1, 256);
  FlatContext ctx = make_flat_context(*grid, euclidean_metric(*grid));
  double h = grid->spacing(0);

  TensorField zero = TensorField::vector_valued(*grid, 1);
  double grad_at_soliton = sup_norm_g(ctx.geo0.g, grad_w(ctx, zero));
  TensorField gA = metric_of_coordinate(ctx, zero);
  double soliton_res = sup_norm_g(gA, ric_of_A_direct(ctx, zero) - gA);
  CHECK(grad_at_soliton < 10 * h * h);
  CHECK(soliton_res < 10 * h * h);

  Rng rng(347);
  TensorField A = iso_endo(*grid, random_scalar(*grid, rng, 2, 0.4));
  double grad_off = sup_norm_g(ctx.geo0.g, grad_w(ctx, A));
  TensorField gB = metric_of_coordinate(ctx, A);
  double res_off = sup_norm_g(gB, ric_of_A_direct(ctx, A) - gB);
  CHECK(grad_off > 1e4 * std::max(grad_at_soliton, 1e-12));
  CHECK(res_off > 1e4 * std::max(soliton_res, 1e-12));
  CHECK(grad_off > 0.01);
  CHECK(res_off > 0.01);
}
