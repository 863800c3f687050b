#include "solflow/w_functional.hpp"

namespace solflow {

FlatContext make_flat_context(const Grid& grid, TensorField g0, int accuracy) {
  FlatContext ctx;
  ctx.grid = &grid;
  ctx.geo0 = make_geometry(grid, std::move(g0), accuracy);
  ctx.ric0 = bakry_emery_ricci(ctx.geo0);
  ctx.ric0_star = endo_of(grid, ctx.geo0.g, ctx.ric0);
  ctx.epsilon = min_eigenvalue_g(ctx.geo0.g, ctx.ric0_star);
  return ctx;
}

TensorField metric_of_coordinate(const FlatContext& ctx, const TensorField& A) {
  TensorField E = endo_exp_g(ctx.geo0.g, -2.0 * A);
  return lower_endo(*ctx.grid, ctx.geo0.g, E);
}

double w_omega_metric(const Grid& grid, const TensorField& g, int accuracy) {
  Geometry geo = make_geometry(grid, g, accuracy);
  TensorField ric = bakry_emery_ricci(geo);
  TensorField integrand = trace_g(geo.g, ric);
  const double n = grid.dim();
  for (Index p = 0; p < grid.size(); ++p)
    integrand.scalar_at(p) += -n + 2.0 * geo.f.scalar_at(p);
  return integrate_omega(integrand);
}

double w_bold(const FlatContext& ctx, const TensorField& A) {
  const Grid& grid = *ctx.grid;
  const Geometry& geo0 = ctx.geo0;
  TensorField expA = endo_exp_g(geo0.g, A);
  TensorField dexpA = covariant_derivative(geo0, expA);
  TensorField grad_norm = pointwise_norm2_g(geo0.g, dexpA);
  TensorField exp2A = endo_exp_g(geo0.g, 2.0 * A);
  TensorField prod = endo_mult(exp2A, ctx.ric0_star);

  const double n = grid.dim();
  TensorField integrand = TensorField::scalar(grid);
  for (Index p = 0; p < grid.size(); ++p) {
    double tr = (Mat(prod.endo(p)) - 2.0 * Mat(A.endo(p))).trace();
    integrand.scalar_at(p) =
        grad_norm.scalar_at(p) + tr + 2.0 * geo0.f.scalar_at(p) - n;
  }
  return integrate_omega(integrand);
}

TensorField grad_w(const FlatContext& ctx, const TensorField& A) {
  const Geometry& geo0 = ctx.geo0;
  TensorField expA = endo_exp_g(geo0.g, A);
  // e^A nabla A evaluated through the commuting identity as nabla e^A, so
  // the discrete formula stays the exact gradient of the discrete energy
  TensorField flux = covariant_derivative(geo0, expA);
  TensorField div = omega_div(geo0, flux);
  TensorField exp2A = endo_exp_g(geo0.g, 2.0 * A);
  TensorField out =
      -1.0 * endo_mult(expA, div) + endo_mult(exp2A, ctx.ric0_star) - identity_endo(*ctx.grid);
  return 0.5 * out;
}

double l2_product4(const FlatContext& ctx, const TensorField& U, const TensorField& V) {
  return 4.0 * integrate_omega(pointwise_inner_g(ctx.geo0.g, U, V));
}

double second_variation_w(const FlatContext& ctx, const TensorField& A, const TensorField& V) {
  const Geometry& geo0 = ctx.geo0;
  TensorField expA = endo_exp_g(geo0.g, A);
  TensorField div = omega_div(geo0, covariant_derivative(geo0, expA));
  TensorField exp2A = endo_exp_g(geo0.g, 2.0 * A);
  TensorField M = -1.0 * endo_mult(expA, div) + 2.0 * endo_mult(exp2A, ctx.ric0_star);
  double term1 = 2.0 * integrate_omega(pointwise_inner_g(geo0.g, endo_mult(M, V), V));
  TensorField eAV = endo_mult(expA, V);
  double term2 = 2.0 * integrate_omega(pointwise_norm2_g(geo0.g, covariant_derivative(geo0, eAV)));
  return term1 + term2;
}

TensorField bracket_product(const FlatContext& ctx, const TensorField& A, const TensorField& B) {
  const Geometry& geo0 = ctx.geo0;
  const Grid& grid = *ctx.grid;
  TensorField nA = covariant_derivative(geo0, A);
  TensorField nB = covariant_derivative(geo0, B);
  const int n = grid.dim();
  TensorField acc = TensorField::vector_valued(grid, 1);
  for (Index p = 0; p < grid.size(); ++p) {
    Mat Gi = geo0.ginv.mat2(p);
    Mat m = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) m += Gi(k, l) * Mat(nA.endo(p, k)) * Mat(nB.endo(p, l));
    acc.endo(p) = m;
  }
  return lower_endo(grid, geo0.g, acc);
}

TensorField ric_of_A_direct(const FlatContext& ctx, const TensorField& A) {
  return bakry_emery_ricci(*ctx.grid, metric_of_coordinate(ctx, A), ctx.geo0.accuracy);
}

TensorField ric_of_A_bracket(const FlatContext& ctx, const TensorField& A) {
  TensorField lap = laplacian_omega(ctx.geo0, A);
  return lower_endo(*ctx.grid, ctx.geo0.g, lap) - bracket_product(ctx, A, A) + ctx.ric0;
}

TensorField ric_of_A_hform(const FlatContext& ctx, const TensorField& A) {
  TensorField H = endo_exp_g(ctx.geo0.g, A);
  TensorField lapH = laplacian_omega(ctx.geo0, H);
  TensorField ric_star = endo_mult(H, lapH) + endo_mult(endo_mult(H, H), ctx.ric0_star);
  return lower_endo(*ctx.grid, metric_of_coordinate(ctx, A), ric_star);
}

ConvexSetSpec make_convex_spec(const FlatContext& ctx, ConvexSetKind kind, double delta) {
  if (kind == ConvexSetKind::Delta) {
    if (delta < 0) throw std::invalid_argument("convex set: delta must be nonnegative");
    if (delta >= ctx.epsilon)
      throw std::invalid_argument(
          "convex set: delta must stay below the weighted Ricci lower bound");
  }
  return ConvexSetSpec{kind, delta};
}

ConvexMargin convex_set_membership(const FlatContext& ctx, const TensorField& A,
                                   const ConvexSetSpec& spec, Rng* rng, int u_samples) {
  const Grid& grid = *ctx.grid;
  const Geometry& geo0 = ctx.geo0;
  ConvexMargin out{0.0, std::numeric_limits<double>::infinity()};

  switch (spec.kind) {
    case ConvexSetKind::Delta: {
      TensorField lhs = lower_endo(grid, geo0.g, laplacian_omega(geo0, A));
      TensorField gA = metric_of_coordinate(ctx, A);
      TensorField M = lhs - bracket_product(ctx, A, A) + ctx.ric0 - spec.delta * gA;
      out.pointwise = min_eigenvalue_g(geo0.g, endo_of(grid, geo0.g, M));
      break;
    }
    case ConvexSetKind::Minus: {
      TensorField lhs = lower_endo(grid, geo0.g, laplacian_omega(geo0, A));
      TensorField M = lhs - bracket_product(ctx, A, A) + 2.0 * ctx.ric0;
      out.pointwise = min_eigenvalue_g(geo0.g, endo_of(grid, geo0.g, M));
      break;
    }
    case ConvexSetKind::PlusPlus: {
      TensorField M = ctx.ric0 - bracket_product(ctx, A, A);
      out.pointwise = min_eigenvalue_g(geo0.g, endo_of(grid, geo0.g, M));
      break;
    }
    case ConvexSetKind::Plus: {
      // pointwise sufficient criterion Tr(nabla A nabla A) <= Ric0*
      TensorField M = ctx.ric0 - bracket_product(ctx, A, A);
      out.pointwise = min_eigenvalue_g(geo0.g, endo_of(grid, geo0.g, M));
      // sampled integral inequality over diagonal (polarization-commuting) U
      if (rng) {
        double worst = std::numeric_limits<double>::infinity();
        TensorField nA = covariant_derivative(geo0, A);
        for (int s = 0; s < u_samples; ++s) {
          TensorField U = TensorField::vector_valued(grid, 1);
          for (int d = 0; d < grid.dim(); ++d) {
            TensorField c = random_scalar(grid, *rng, 3, 1.0);
            for (Index p = 0; p < grid.size(); ++p) U.endo(p)(d, d) = c.scalar_at(p);
          }
          TensorField UnA = compose_value(U, nA);
          double lhs = integrate_omega(pointwise_norm2_g(geo0.g, UnA));
          TensorField U2R = endo_mult(endo_mult(U, U), ctx.ric0_star);
          double rhs = integrate_omega(trace_endo(U2R));
          double norm = integrate_omega(pointwise_norm2_g(geo0.g, U));
          worst = std::min(worst, (rhs - lhs) / std::max(norm, 1e-300));
        }
        out.sampled = worst;
      }
      break;
    }
  }
  return out;
}

double w_lower_bound(const FlatContext& ctx, double eps) {
  if (eps <= 0) throw std::invalid_argument("w_lower_bound: eps must be positive");
  const Grid& grid = *ctx.grid;
  const double n = grid.dim();
  TensorField integrand = TensorField::scalar(grid);
  for (Index p = 0; p < grid.size(); ++p)
    integrand.scalar_at(p) = 2.0 * (ctx.geo0.f.scalar_at(p) + 0.5 * n * std::log(eps));
  return integrate_omega(integrand);
}

}  // namespace solflow
