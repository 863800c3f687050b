#include "solflow/verifier.hpp"

#include <cmath>
#include <map>

namespace solflow {

namespace {

struct FamilyPoint {
  Geometry geo;
  TensorField gdot;       // central difference of the family
  TensorField gdot_star;  // endomorphism lift at t0
};

FamilyPoint family_point(const Grid& grid, const Family& fam, double t0, double dt) {
  FamilyPoint fp{make_geometry(grid, fam.metric(t0)),
                 (0.5 / dt) * (fam.metric(t0 + dt) - fam.metric(t0 - dt)), TensorField()};
  fp.gdot_star = endo_of(grid, fp.geo.g, fp.gdot);
  return fp;
}

/// Central time difference of a geometry-derived quantity.
template <class F>
TensorField time_fd(const Grid& grid, const Family& fam, double t0, double dt, F&& eval) {
  Geometry gp = make_geometry(grid, fam.metric(t0 + dt));
  Geometry gm = make_geometry(grid, fam.metric(t0 - dt));
  return (0.5 / dt) * (eval(gp) - eval(gm));
}

IdentityReport report(const std::string& id, const std::string& instance,
                      const std::string& control, const Grid& grid, const TensorField& g,
                      const TensorField& lhs, const TensorField& rhs, double dt) {
  IdentityReport r;
  r.identity_id = id;
  r.instance = instance;
  r.control = control;
  r.h = grid.min_spacing();
  r.dt = dt;
  r.lhs_norm = bulk_sup_norm_g(g, lhs);
  r.rhs_norm = bulk_sup_norm_g(g, rhs);
  r.residual = bulk_sup_norm_g(g, lhs - rhs);
  return r;
}

}  // namespace

VerifyResult verify_connection_variation(const Grid& grid, const Family& fam, double t0,
                                         double dt, bool with_controls) {
  FamilyPoint fp = family_point(grid, fam, t0, dt);
  TensorField gamma_dot = time_fd(grid, fam, t0, dt, [](const Geometry& g) { return g.gamma; });

  VerifyResult out;
  // total form: 2 g(dGamma(xi,eta), mu) against the three-term derivative sum
  {
    TensorField lhs = 2.0 * lower_value_last(fp.geo.g, gamma_dot);
    TensorField dg = covariant_derivative(fp.geo, fp.gdot);
    TensorField rhs = TensorField::covariant(grid, 3);
    TensorField rhs_broken = TensorField::covariant(grid, 3);
    const int n = grid.dim();
    for (Index p = 0; p < grid.size(); ++p)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int m = 0; m < n; ++m) {
            rhs.at(p, {i, j, m}) =
                dg.at(p, {i, j, m}) + dg.at(p, {j, i, m}) - dg.at(p, {m, i, j});
            rhs_broken.at(p, {i, j, m}) =
                dg.at(p, {i, j, m}) + dg.at(p, {j, i, m}) + dg.at(p, {m, i, j});
          }
    out.push_back(report("connection_variation_total", fam.name, "positive", grid, fp.geo.g, lhs,
                         rhs, dt));
    if (with_controls)
      out.push_back(report("connection_variation_total", fam.name + "_sign_swapped_term",
                           "negative", grid, fp.geo.g, lhs, rhs_broken, dt));
  }
  // polarized form: 2 dGamma = nabla gdot*
  {
    TensorField lhs = 2.0 * gamma_dot;
    TensorField rhs = covariant_derivative(fp.geo, fp.gdot_star);
    out.push_back(report("connection_variation_polarized", fam.name,
                         fam.polarized ? "positive" : "negative", grid, fp.geo.g, lhs, rhs, dt));
  }
  return out;
}

VerifyResult verify_curvature_variation(const Grid& grid, const Family& fam, double t0,
                                        double dt, bool with_controls) {
  FamilyPoint fp = family_point(grid, fam, t0, dt);
  TensorField r_dot =
      time_fd(grid, fam, t0, dt, [](const Geometry& g) { return riemann_curvature(g); });
  TensorField gamma_dot = time_fd(grid, fam, t0, dt, [](const Geometry& g) { return g.gamma; });

  VerifyResult out;
  {
    TensorField cov = covariant_derivative(fp.geo, gamma_dot);
    TensorField rhs = alt2(cov, 0, 1);
    out.push_back(report("curvature_variation_total", fam.name, "positive", grid, fp.geo.g, r_dot,
                         rhs, dt));
    if (with_controls)  // forgetting the antisymmetrisation
      out.push_back(report("curvature_variation_total", fam.name + "_missing_antisymmetrisation",
                           "negative", grid, fp.geo.g, r_dot, cov, dt));
  }
  {
    TensorField R = riemann_curvature(fp.geo);
    TensorField rhs = bracket_last(R, fp.gdot_star);
    out.push_back(report("curvature_variation_bracket", fam.name,
                         fam.polarized ? "positive" : "negative", grid, fp.geo.g, 2.0 * r_dot, rhs,
                         dt));
  }
  return out;
}

VerifyResult verify_ric_variation(const Grid& grid, const Family& fam, double t0, double dt,
                                  bool with_controls) {
  FamilyPoint fp = family_point(grid, fam, t0, dt);
  const std::string pol = fam.polarized ? "positive" : "negative";
  VerifyResult out;

  TensorField ric_dot =
      time_fd(grid, fam, t0, dt, [](const Geometry& g) { return bakry_emery_ricci(g); });
  {
    TensorField rhs = -1.0 * adjoint_nabla_omega(fp.geo, d_operator(fp.geo, fp.gdot));
    out.push_back(report("ric_variation_divergence", fam.name, "positive", grid, fp.geo.g,
                         2.0 * ric_dot, rhs, dt));
    if (with_controls) {
      // wrong operator weight: symmetrised derivative minus one gradient
      TensorField nu = covariant_derivative(fp.geo, fp.gdot);
      TensorField du_wrong = TensorField::covariant(grid, 3);
      const int n = grid.dim();
      for (Index p = 0; p < grid.size(); ++p)
        for (int m = 0; m < n; ++m)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              du_wrong.at(p, {m, i, j}) = nu.at(p, {i, m, j}) + nu.at(p, {j, m, i});
      TensorField rhs_broken = -1.0 * adjoint_nabla_omega(fp.geo, du_wrong);
      out.push_back(report("ric_variation_divergence", fam.name + "_wrong_operator_weight",
                           "negative", grid, fp.geo.g, 2.0 * ric_dot, rhs_broken, dt));
    }
  }
  {
    TensorField rhs = -1.0 * laplacian_omega(fp.geo, fp.gdot);
    out.push_back(
        report("ric_variation_laplacian", fam.name, pol, grid, fp.geo.g, 2.0 * ric_dot, rhs, dt));
  }
  {
    TensorField ric_star_dot =
        time_fd(grid, fam, t0, dt, [](const Geometry& g) { return ric_star_omega(g); });
    TensorField ric_star = ric_star_omega(fp.geo);
    TensorField rhs = -1.0 * laplacian_omega(fp.geo, fp.gdot_star) -
                      2.0 * endo_mult(fp.gdot_star, ric_star);
    out.push_back(report("ric_endo_variation_weighted", fam.name, pol, grid, fp.geo.g,
                         2.0 * ric_star_dot, rhs, dt));
  }
  {
    TensorField plain_dot = time_fd(grid, fam, t0, dt, [&grid](const Geometry& g) {
      return endo_of(grid, g.g, ricci(g, riemann_curvature(g)));
    });
    TensorField ric_plain = endo_of(grid, fp.geo.g, ricci(fp.geo, riemann_curvature(fp.geo)));
    TensorField R = riemann_curvature(fp.geo);
    TensorField rhs = -1.0 * endo_mult(fp.gdot_star, ric_plain) -
                      star_endo(fp.geo.ginv, R, fp.gdot_star);
    out.push_back(report("ric_endo_variation_plain", fam.name, pol, grid, fp.geo.g,
                         2.0 * plain_dot, rhs, dt));
  }
  {
    TensorField grad_dot = time_fd(grid, fam, t0, dt, [](const Geometry& g) { return g.gradf; });
    TensorField rhs = -1.0 * adjoint_nabla(fp.geo, fp.gdot_star) -
                      2.0 * endo_apply(fp.gdot_star, fp.geo.gradf);
    out.push_back(
        report("gradient_variation", fam.name, pol, grid, fp.geo.g, 2.0 * grad_dot, rhs, dt));
  }
  return out;
}

VerifyResult verify_prescattering_variation(const Grid& grid, const Family& fam, double t0,
                                            double dt) {
  FamilyPoint fp = family_point(grid, fam, t0, dt);
  const Geometry& geo = fp.geo;
  TensorField P_dot = time_fd(grid, fam, t0, dt,
                              [](const Geometry& g) { return nabla_tx(g, ric_star_omega(g)); });
  TensorField P = nabla_tx(geo, ric_star_omega(geo));
  TensorField R = riemann_curvature(geo);
  TensorField ntx_gdot = nabla_tx(geo, fp.gdot_star);
  TensorField cov_gdot = covariant_derivative(geo, fp.gdot_star);

  VerifyResult out;
  {
    TensorField rhs = div_underline_omega(geo, bracket_last(R, fp.gdot_star)) +
                      alt2(star_circle(geo.ginv, R, cov_gdot)) -
                      2.0 * compose_value(fp.gdot_star, P);
    out.push_back(report("prescattering_variation_polarized", fam.name,
                         fam.polarized ? "positive" : "negative", grid, geo.g, 2.0 * P_dot, rhs,
                         dt));
  }
  {
    TensorField T1 = nabla_tx(
        geo, transpose_endo_g(geo.g, adjoint_nabla_omega(geo, ntx_gdot)));
    TensorField T2 = div_underline_omega(geo, bracket_last(R, fp.gdot_star));
    TensorField T3 = alt2(star_circle(geo.ginv, R, cov_gdot - ntx_gdot));
    TensorField ric_star = ric_star_omega(geo);
    TensorField T4 = alt2(bullet_endo(ric_star, transpose_g_last(geo.g, ntx_gdot), 1));
    TensorField T5 = -1.0 * endo_neg(ric_star, ntx_gdot);
    TensorField T6 = -2.0 * compose_value(fp.gdot_star, P);
    TensorField rhs = T1 + T2 + T3 + T4 + T5 + T6;
    out.push_back(report("prescattering_variation_total", fam.name, "positive", grid, geo.g,
                         2.0 * P_dot, rhs, dt));
    // ingredient-swap control: sign-swapped leading adjoint term
    TensorField rhs_broken = rhs - 2.0 * T1;
    out.push_back(report("prescattering_variation_total", fam.name + "_sign_swapped_adjoint_term",
                         "negative", grid, geo.g, 2.0 * P_dot, rhs_broken, dt));
  }
  return out;
}

VerifyResult verify_extD_and_Pder(const Grid& grid, const Family& fam, const TensorField& H,
                                  double t0, double dt, bool with_controls) {
  FamilyPoint fp = family_point(grid, fam, t0, dt);
  const Geometry& geo = fp.geo;
  TensorField ntx_gdot = nabla_tx(geo, fp.gdot_star);
  TensorField cov_gdot = covariant_derivative(geo, fp.gdot_star);

  // commuting hypothesis for the bracket/second-derivative forms
  double hyp = std::max(max_bracket_residual(geo, cov_gdot, H),
                        max_bracket_residual(geo, cov_gdot, covariant_derivative(geo, H)));
  bool commuting = hyp < 1e-8 * std::max(1.0, H.max_abs());

  VerifyResult out;
  {
    TensorField lhs =
        2.0 * time_fd(grid, fam, t0, dt, [&H](const Geometry& g) { return nabla_tx(g, H); });
    TensorField alt_term = alt2(bullet_endo(H, transpose_g_last(geo.g, ntx_gdot), 1));
    TensorField product_term = nabla_tx(geo, endo_mult(fp.gdot_star, H));
    TensorField rhs = -1.0 * endo_neg(H, ntx_gdot) + product_term -
                      compose_value(fp.gdot_star, nabla_tx(geo, H)) + alt_term;
    out.push_back(
        report("tx_derivative_variation", fam.name, "positive", grid, geo.g, lhs, rhs, dt));
    if (with_controls && bulk_sup_norm_g(geo.g, product_term) > 1e-10) {
      TensorField rhs_broken = rhs - 2.0 * product_term;  // sign-swapped product term
      out.push_back(report("tx_derivative_variation", fam.name + "_sign_swapped_product_term",
                           "negative", grid, geo.g, lhs, rhs_broken, dt));
    }
  }
  {
    TensorField lhs = 2.0 * time_fd(grid, fam, t0, dt, [&H](const Geometry& g) {
      return covariant_derivative(g, H);
    });
    TensorField rhs = bracket_last(cov_gdot, H);
    IdentityReport r = report("connection_endo_variation", fam.name,
                              (fam.polarized && commuting) ? "positive" : "negative", grid, geo.g,
                              lhs, rhs, dt);
    r.hypothesis_ok = commuting;
    out.push_back(r);
  }
  {
    TensorField lhs =
        2.0 * time_fd(grid, fam, t0, dt, [&H](const Geometry& g) { return nabla_p(g, H, 2); });
    TensorField rhs = -1.0 * bullet_k(cov_gdot, covariant_derivative(geo, H), 1);
    IdentityReport r = report("second_derivative_variation", fam.name,
                              (fam.polarized && commuting) ? "positive" : "negative", grid, geo.g,
                              lhs, rhs, dt);
    r.hypothesis_ok = commuting;
    out.push_back(r);
  }
  if (grid.dim() == 1) {
    // derivative expansion of the weighted Laplacian at first order; the
    // curvature corrections are absent in one dimension
    TensorField lhs = covariant_derivative(geo, laplacian_omega(geo, H));
    TensorField n3 = nabla_p(geo, H, 3);
    TensorField hess_f = endo_of(grid, geo.g, covariant_derivative(geo, geo.df));
    TensorField rhs = -1.0 * trace_slots_g(geo.ginv, n3, 1, 2) +
                      insert_vector(geo.gradf, nabla_p(geo, H, 2), 1) +
                      bullet_endo(hess_f, covariant_derivative(geo, H), 0);
    out.push_back(report("laplacian_derivative_expansion", fam.name, "positive", grid, geo.g, lhs,
                         rhs, dt));
    if (with_controls) {
      TensorField rhs_broken =
          rhs - 2.0 * bullet_endo(hess_f, covariant_derivative(geo, H), 0);
      out.push_back(report("laplacian_derivative_expansion", fam.name + "_sign_swapped_hessian_term",
                           "negative", grid, geo.g, lhs, rhs_broken, dt));
    }
  }
  return out;
}

VerifyResult verify_log_derivative(const Grid& grid, const TensorField& g, const TensorField& B,
                                   const std::string& instance, bool commuting) {
  Geometry geo = make_geometry(grid, g);
  TensorField L = endo_log(B);
  TensorField lhs = covariant_derivative(geo, L);
  TensorField Binv = TensorField::vector_valued(grid, 1);
  for (Index p = 0; p < grid.size(); ++p) Binv.endo(p) = Mat(B.endo(p)).inverse();
  TensorField rhs = compose_value(Binv, covariant_derivative(geo, B));
  VerifyResult out;
  out.push_back(report("log_derivative", instance, commuting ? "positive" : "negative", grid, g,
                       lhs, rhs, grid.min_spacing()));
  return out;
}

InterpolationReport verify_hamilton_interpolation(const Grid& grid, const TensorField& g,
                                                  const TensorField& A,
                                                  const std::string& instance) {
  Geometry geo = make_geometry(grid, g);
  TensorField dA = covariant_derivative(geo, A);
  TensorField d2A = covariant_derivative(geo, dA);
  TensorField n_dA = pointwise_norm2_g(g, dA);
  TensorField n_d2A = pointwise_norm2_g(g, d2A);
  TensorField n_A = pointwise_norm2_g(g, A);

  auto power_integral = [&](const TensorField& n2, double exponent) {
    TensorField f = TensorField::scalar(grid);
    for (Index p = 0; p < grid.size(); ++p)
      f.scalar_at(p) = std::pow(std::max(0.0, n2.scalar_at(p)), exponent);
    return integrate_omega(f);
  };

  InterpolationReport rep;
  rep.instance = instance;
  double i_dA2 = power_integral(n_dA, 1.0);        // int |nabla A|^2
  double i_dA4 = power_integral(n_dA, 2.0);        // int |nabla A|^4
  double i_d2A2 = power_integral(n_d2A, 1.0);      // int |nabla^2 A|^2
  double i_A2 = power_integral(n_A, 1.0);          // int |A|^2
  double supA = 0;
  for (Index p = 0; p < grid.size(); ++p)
    supA = std::max(supA, std::sqrt(std::max(0.0, n_A.scalar_at(p))));

  double denom = std::sqrt(i_d2A2) * std::sqrt(i_A2);
  rep.c_gradient = denom > 0 ? i_dA2 / denom : 0;
  double denom1 = supA * supA * i_d2A2;
  rep.c_interp1 = denom1 > 0 ? i_dA4 / denom1 : 0;
  rep.c_interp2 = rep.c_gradient;  // the r = 1, p = 2 corollary coincides
  return rep;
}

// ---------------------------------------------------------------------------
// Suite assembly
// ---------------------------------------------------------------------------

namespace {

struct InstanceSet {
  std::unique_ptr<Grid> grid;
  std::vector<Family> families_for_connection;  // also curvature / ric / prescattering
  std::vector<std::pair<Family, TensorField>> extd_instances;
  std::vector<std::tuple<TensorField, TensorField, std::string, bool>> log_instances;
};

/// Budget constants per identity, multiplying (h^2 + dt^2) * scale.
/// Calibrated on the shipped instance matrix with a 4x safety margin.
const std::map<std::string, double>& budget_constants() {
  static const std::map<std::string, double> k = {
      {"connection_variation_total", 40.0},
      {"connection_variation_polarized", 40.0},
      {"curvature_variation_total", 60.0},
      {"curvature_variation_bracket", 60.0},
      {"ric_variation_divergence", 120.0},
      {"ric_variation_laplacian", 120.0},
      {"ric_endo_variation_weighted", 120.0},
      {"ric_endo_variation_plain", 60.0},
      {"gradient_variation", 60.0},
      {"connection_endo_variation", 40.0},
      {"tx_derivative_variation", 60.0},
      {"second_derivative_variation", 80.0},
      {"laplacian_derivative_expansion", 120.0},
      {"contracted_bianchi_weighted", 120.0},
      {"prescattering_variation_polarized", 160.0},
      {"prescattering_variation_total", 160.0},
      {"hodge_laplacian_plain", 80.0},
      {"hodge_laplacian_weighted", 80.0},
      {"endo_divergence_formula", 80.0},
      {"gradient_laplacian_commutator", 120.0},
      {"log_derivative", 40.0},
  };
  return k;
}

TensorField iso_endo_from(const Grid& grid, const TensorField& s) {
  TensorField A = TensorField::vector_valued(grid, 1);
  for (Index p = 0; p < grid.size(); ++p)
    A.endo(p) = s.scalar_at(p) * Mat::Identity(grid.dim(), grid.dim());
  return A;
}

}  // namespace

namespace {

void run_level(const SuiteConfig& config, int level, std::vector<IdentityReport>& sink,
               std::vector<InterpolationReport>& interp_sink) {
  const int pts1 = config.points_1d << level;
  const int pts2 = config.points_2d << level;
  Rng rng(config.seed);  // identical draws per level: the continuum instances match

  auto push = [&](VerifyResult r) {
    for (auto& rep : r) sink.push_back(std::move(rep));
  };

  // ----- 1D Gaussian instances -----
  {
    auto grid_ptr = gaussian_grid(1, pts1);
    Grid& grid = *grid_ptr;
    const double dt = grid.min_spacing();
    TensorField g0 = euclidean_metric(grid);
    TensorField phi = random_scalar(grid, rng, 3, 0.4);
    TensorField v = TensorField::covariant(grid, 2);
    for (Index p = 0; p < grid.size(); ++p) v.mat2(p)(0, 0) = phi.scalar_at(p);
    Family geo_fam{"1d_gaussian_geodesic",
                   [&grid, g0, v](double t) { return geodesic(grid, g0, v, t); }, true};

    push(verify_connection_variation(grid, geo_fam, 0.4, dt));
    push(verify_curvature_variation(grid, geo_fam, 0.4, dt));
    push(verify_ric_variation(grid, geo_fam, 0.4, dt));
    push(verify_prescattering_variation(grid, geo_fam, 0.4, dt));
    TensorField H1 = random_symmetric_endo(grid, rng, 3, 0.6);
    push(verify_extD_and_Pder(grid, geo_fam, H1, 0.4, dt, true));

    TensorField B = endo_exp(iso_endo_from(grid, random_scalar(grid, rng, 3, 0.5)));
    push(verify_log_derivative(grid, g0, B, "1d_exponential_isotropic", true));

    // gradient-Laplacian commutator on a scalar field
    {
      Geometry geo = make_geometry(grid, g0);
      TensorField A = random_scalar(grid, rng, 3, 1.0);
      CommutatorValue cv = commutator_nabla_laplacian(geo, A);
      IdentityReport r = report("gradient_laplacian_commutator", "1d_gaussian_scalar", "positive",
                                grid, g0, cv.lhs, cv.rhs, dt);
      r.hypothesis_ok = cv.hypothesis_residual < 1e-8;
      sink.push_back(r);
    }

    // interpolation constants on sampled fields
    for (int k = 0; k < 10; ++k) {
      TensorField A = random_symmetric_endo(grid, rng, 3, 0.8);
      InterpolationReport rep = verify_hamilton_interpolation(
          grid, g0, A, "field" + std::to_string(k) + (level == 0 ? "_coarse" : "_fine"));
      interp_sink.push_back(rep);
    }
  }

  // ----- 2D weighted flat-base instances -----
  {
    auto grid_ptr = torus_grid(2, pts2);
    Grid& grid = *grid_ptr;
    TensorField w = random_scalar(grid, rng, 2, 0.5);
    Grid::ArrayX omega(grid.size());
    for (Index p = 0; p < grid.size(); ++p) omega[p] = std::exp(w.scalar_at(p));
    grid.set_omega(omega);
    const double dt = grid.min_spacing();
    TensorField g0 = euclidean_metric(grid);

    // separable diagonal geodesic: gdot* = diag(d1(x), d2(y)) is polarized
    TensorField d1f = random_scalar(grid, rng, 2, 0.4);
    TensorField d2f = random_scalar(grid, rng, 2, 0.4);
    TensorField D = TensorField::vector_valued(grid, 1);
    for (Index p = 0; p < grid.size(); ++p) {
      auto idx = grid.unflatten(p);
      auto row0 = grid.flatten({idx[0], 0, 0});
      auto col0 = grid.flatten({0, idx[1], 0});
      D.endo(p)(0, 0) = d1f.scalar_at(row0);
      D.endo(p)(1, 1) = d2f.scalar_at(col0);
    }
    Family diag_fam{"2d_diagonal_separable_geodesic",
                    [&grid, g0, D](double t) {
                      return lower_endo(grid, g0, endo_exp(t * D));
                    },
                    true};
    push(verify_connection_variation(grid, diag_fam, 0.3, dt));
    push(verify_curvature_variation(grid, diag_fam, 0.3, dt));
    push(verify_ric_variation(grid, diag_fam, 0.3, dt));
    push(verify_prescattering_variation(grid, diag_fam, 0.3, dt));
    TensorField Hdiag = TensorField::vector_valued(grid, 1);
    {
      TensorField h1 = random_scalar(grid, rng, 2, 0.6);
      TensorField h2 = random_scalar(grid, rng, 2, 0.6);
      for (Index p = 0; p < grid.size(); ++p) {
        auto idx = grid.unflatten(p);
        Hdiag.endo(p)(0, 0) = h1.scalar_at(grid.flatten({idx[0], 0, 0}));
        Hdiag.endo(p)(1, 1) = h2.scalar_at(grid.flatten({0, idx[1], 0}));
      }
    }
    push(verify_extD_and_Pder(grid, diag_fam, Hdiag, 0.3, dt));

    // curved conformal base with a scaling family (polarized, curvature on)
    TensorField uc = random_scalar(grid, rng, 2, 0.15);
    TensorField gc = conformal_metric(grid, uc);
    Family scaling_fam{"2d_curved_conformal_scaling",
                       [gc](double t) { return std::exp(0.4 * t) * gc; }, true};
    push(verify_curvature_variation(grid, scaling_fam, 0.3, dt));
    push(verify_ric_variation(grid, scaling_fam, 0.3, dt));

    // generic curved family: all polarized forms become negative controls
    TensorField E = random_gsym_endo(grid, gc, rng, 2, 0.5);
    Family generic_fam{"2d_generic",
                       [&grid, gc, E](double t) {
                         return lower_endo(grid, gc, endo_exp_g(gc, t * E));
                       },
                       false};
    push(verify_connection_variation(grid, generic_fam, 0.3, dt, true));
    push(verify_curvature_variation(grid, generic_fam, 0.3, dt, true));
    push(verify_ric_variation(grid, generic_fam, 0.3, dt, true));
    push(verify_prescattering_variation(grid, generic_fam, 0.3, dt));
    TensorField Hgen = random_symmetric_endo(grid, rng, 2, 0.6);
    push(verify_extD_and_Pder(grid, generic_fam, Hgen, 0.3, dt, true));

    // spatial identities on the curved weighted base
    Geometry geoc = make_geometry(grid, gc);
    {
      IdentityValue v2 = contracted_bianchi_omega(geoc);
      sink.push_back(report("contracted_bianchi_weighted", "2d_curved_weighted", "positive", grid,
                            gc, v2.lhs, v2.rhs, dt));
      // classic sign mistake in the contracted identity
      TensorField rhs_broken = -1.0 * v2.rhs;
      sink.push_back(report("contracted_bianchi_weighted", "2d_curved_sign_swapped", "negative",
                            grid, gc, v2.lhs, rhs_broken, dt));
    }
    {
      TensorField H = random_symmetric_endo(grid, rng, 2, 0.8);
      IdentityValue plain = weitzenbock_tx(geoc, H, false);
      IdentityValue weighted = weitzenbock_tx(geoc, H, true);
      sink.push_back(report("hodge_laplacian_plain", "2d_curved", "positive", grid, gc, plain.lhs,
                            plain.rhs, dt));
      sink.push_back(report("hodge_laplacian_weighted", "2d_curved_weighted", "positive", grid,
                            gc, weighted.lhs, weighted.rhs, dt));
      TensorField R = riemann_curvature(geoc);
      TensorField curv_term = star_endo(geoc.ginv, R, H);
      sink.push_back(report("hodge_laplacian_plain", "2d_sign_swapped_curvature_term", "negative",
                            grid, gc, plain.lhs, plain.rhs + 2.0 * curv_term, dt));
      sink.push_back(report("hodge_laplacian_weighted", "2d_sign_swapped_curvature_term",
                            "negative", grid, gc, weighted.lhs, weighted.rhs + 2.0 * curv_term,
                            dt));
    }
    {
      TensorField u = random_symmetric_2tensor(grid, rng, 2, 0.6);
      IdentityValue v2 = endo_div_formula(geoc, u);
      sink.push_back(report("endo_divergence_formula", "2d_curved_weighted", "positive", grid, gc,
                            v2.lhs, v2.rhs, dt));
      TensorField ustar = endo_of(grid, gc, u);
      TensorField S = adjoint_nabla_omega(geoc, nabla_tx(geoc, ustar));
      TensorField rhs_broken =
          S - transpose_endo_g(gc, S) - laplacian_omega(geoc, ustar);  // transposed term flipped
      sink.push_back(report("endo_divergence_formula", "2d_curved_sign_swapped_transpose",
                            "negative", grid, gc, v2.lhs, rhs_broken, dt));
    }
    {
      // commutator expansion: flat weighted endomorphism instance
      Geometry geof = make_geometry(grid, g0);
      TensorField A = random_symmetric_endo(grid, rng, 2, 0.8);
      CommutatorValue cv = commutator_nabla_laplacian(geof, A);
      IdentityReport r = report("gradient_laplacian_commutator", "2d_flat_weighted_endo",
                                "positive", grid, g0, cv.lhs, cv.rhs, dt);
      r.hypothesis_ok = cv.hypothesis_residual < 1e-8;
      sink.push_back(r);

      // curved instance with an identity-valued 1-form (hypotheses hold)
      TensorField phi2 = random_scalar(grid, rng, 2, 0.8);
      TensorField A2 = TensorField::vector_valued(grid, 2);
      for (int d = 0; d < 2; ++d) {
        TensorField dphi = fd_partial(phi2, d, 1);
        for (Index p = 0; p < grid.size(); ++p)
          A2.endo(p, d) = dphi.scalar_at(p) * Mat::Identity(2, 2);
      }
      CommutatorValue cv2 = commutator_nabla_laplacian(geoc, A2);
      IdentityReport r2 = report("gradient_laplacian_commutator", "2d_curved_isotropic_oneform",
                                 "positive", grid, gc, cv2.lhs, cv2.rhs, dt);
      r2.hypothesis_ok = cv2.hypothesis_residual < 1e-8;
      sink.push_back(r2);

      // strongly curved instance with a large generic endomorphism:
      // the bracket hypothesis fails badly
      TensorField ustrong = random_scalar(grid, rng, 2, 0.35);
      Geometry geos = make_geometry(grid, conformal_metric(grid, ustrong));
      TensorField Abig = random_symmetric_endo(grid, rng, 2, 2.5);
      CommutatorValue cv3 = commutator_nabla_laplacian(geos, Abig);
      IdentityReport r3 = report("gradient_laplacian_commutator", "2d_strongly_curved_generic_endo",
                                 "negative", grid, geos.g, cv3.lhs, cv3.rhs, dt);
      r3.hypothesis_ok = cv3.hypothesis_residual < 1e-8;
      sink.push_back(r3);
    }
    {
      // non-commuting logarithm argument: the derivative formula fails
      TensorField theta = random_scalar(grid, rng, 2, 0.5);
      TensorField B = TensorField::vector_valued(grid, 1);
      for (Index p = 0; p < grid.size(); ++p) {
        double th = theta.scalar_at(p);
        Mat rot(2, 2);
        rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        Mat diag = Mat::Zero(2, 2);
        diag(0, 0) = 1.5;
        diag(1, 1) = 0.5;
        B.endo(p) = rot * diag * rot.transpose();
      }
      push(verify_log_derivative(grid, g0, B, "2d_rotating_eigenframe", false));
      // commuting 2D counterpart: separable diagonal positive control
      TensorField Bpos = TensorField::vector_valued(grid, 1);
      TensorField b1 = random_scalar(grid, rng, 2, 0.4);
      TensorField b2 = random_scalar(grid, rng, 2, 0.4);
      for (Index p = 0; p < grid.size(); ++p) {
        auto idx = grid.unflatten(p);
        Bpos.endo(p)(0, 0) = std::exp(b1.scalar_at(grid.flatten({idx[0], 0, 0})));
        Bpos.endo(p)(1, 1) = std::exp(b2.scalar_at(grid.flatten({0, idx[1], 0})));
      }
      push(verify_log_derivative(grid, g0, Bpos, "2d_diagonal_separable", true));
    }
  }
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& config) {
  SuiteReport suite;
  std::vector<IdentityReport> coarse, fine;
  std::vector<InterpolationReport> interp;
  run_level(config, 0, coarse, interp);
  run_level(config, 1, fine, interp);
  suite.interpolation = std::move(interp);

  if (coarse.size() != fine.size())
    throw std::logic_error("verifier suite: level report counts differ");

  // residual floor below which an instance counts as exactly satisfied
  const double exact_floor = 1e-9;

  // max positive residual per identity and level, for the negative verdicts
  std::map<std::string, double> pos_coarse, pos_fine;
  for (size_t i = 0; i < coarse.size(); ++i) {
    if (coarse[i].control == "positive") {
      pos_coarse[coarse[i].identity_id] =
          std::max(pos_coarse[coarse[i].identity_id], coarse[i].residual);
      pos_fine[fine[i].identity_id] = std::max(pos_fine[fine[i].identity_id], fine[i].residual);
    }
  }

  std::map<std::string, bool> has_negative;
  for (size_t i = 0; i < coarse.size(); ++i) {
    IdentityReport rc = coarse[i];
    IdentityReport rf = fine[i];
    if (rc.identity_id != rf.identity_id || rc.instance != rf.instance)
      throw std::logic_error("verifier suite: report pairing mismatch");

    double c = config.budget_scale * budget_constants().at(rc.identity_id);
    auto budget = [&](const IdentityReport& r) {
      return c * (r.h * r.h + r.dt * r.dt) * std::max({1.0, r.lhs_norm, r.rhs_norm});
    };
    rc.budget = budget(rc);
    rf.budget = budget(rf);
    rf.slope = std::log2(std::max(rc.residual, 1e-300) / std::max(rf.residual, 1e-300));

    if (rc.control == "positive") {
      bool exactish = rf.residual <= exact_floor * std::max(1.0, rf.lhs_norm);
      bool within = rc.residual <= rc.budget && rf.residual <= rf.budget;
      bool slope_ok = exactish || rf.slope >= config.slope_min;
      rc.passed = rf.passed = within && slope_ok;
      if (!rf.passed) ++suite.positive_failures;
    } else {
      has_negative[rc.identity_id] = true;
      double floor_c = std::max(pos_coarse[rc.identity_id], 1e-14);
      double floor_f = std::max(pos_fine[rf.identity_id], 1e-14);
      rc.passed = rc.residual >= config.negative_factor * floor_c;
      rf.passed = rf.residual >= config.negative_factor * floor_f;
      if (!(rc.passed && rf.passed)) ++suite.negative_failures;
    }
    suite.reports.push_back(rc);
    suite.reports.push_back(rf);
  }

  for (const auto& [id, cval] : budget_constants())
    if (!has_negative.count(id)) ++suite.vacuous_identities;

  suite.pass = suite.positive_failures == 0 && suite.negative_failures == 0 &&
               suite.vacuous_identities == 0;
  return suite;
}

}  // namespace solflow
