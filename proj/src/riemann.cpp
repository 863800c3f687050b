#include "solflow/riemann.hpp"

namespace solflow {

TensorField christoffel(const Grid& grid, const TensorField& g, int accuracy) {
  const int n = grid.dim();
  TensorField ginv = inverse2(g);
  std::vector<TensorField> dg;
  dg.reserve(n);
  for (int a = 0; a < n; ++a) dg.push_back(fd_partial(g, a, 1, accuracy));

  TensorField gamma = TensorField::vector_valued(grid, 2);
  for (Index p = 0; p < grid.size(); ++p) {
    Mat Gi = ginv.mat2(p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Vec rhs = Vec::Zero(n);
        for (int l = 0; l < n; ++l)
          rhs[l] = 0.5 * (dg[i].mat2(p)(j, l) + dg[j].mat2(p)(i, l) - dg[l].mat2(p)(i, j));
        Vec gk = Gi * rhs;
        for (int k = 0; k < n; ++k) gamma.at(p, {i, j}, k) = gk[k];
      }
  }
  return gamma;
}

Geometry make_geometry(const Grid& grid, TensorField g, int accuracy) {
  Geometry geo;
  geo.grid = &grid;
  geo.accuracy = accuracy;
  geo.ginv = inverse2(g);
  geo.gamma = christoffel(grid, g, accuracy);
  geo.f = log_density(grid, g);
  geo.df = TensorField::covariant(grid, 1);
  for (int a = 0; a < grid.dim(); ++a) {
    TensorField d = fd_partial(geo.f, a, 1, accuracy);
    for (Index p = 0; p < grid.size(); ++p) geo.df.at(p, {a}) = d.scalar_at(p);
  }
  geo.gradf = TensorField::vector_valued(grid, 0);
  for (Index p = 0; p < grid.size(); ++p) {
    Vec dfv(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) dfv[a] = geo.df.at(p, {a});
    geo.gradf.value(p) = Mat(geo.ginv.mat2(p)) * dfv;
  }
  geo.g = std::move(g);
  return geo;
}

TensorField covariant_derivative(const Geometry& geo, const TensorField& A) {
  const Grid& grid = *geo.grid;
  const int n = grid.dim();
  const int q = A.order();
  const bool vv = A.vector_valued();
  TensorField out =
      vv ? TensorField::vector_valued(grid, q + 1) : TensorField::covariant(grid, q + 1);

  std::vector<TensorField> dA;
  dA.reserve(n);
  for (int a = 0; a < n; ++a) dA.push_back(fd_partial(A, a, 1, geo.accuracy));

  const int vals = vv ? n : 1;
  std::array<int, 6> I{};
  for (Index p = 0; p < grid.size(); ++p) {
    for (int d = 0; d < n; ++d) {
      I.fill(0);
      do {
        std::array<int, 6> full{};
        full[0] = d;
        for (int s = 0; s < q; ++s) full[s + 1] = I[s];
        for (int a = 0; a < vals; ++a) {
          double acc = dA[d].at(p, I, a);
          if (vv)
            for (int k = 0; k < n; ++k) acc += geo.gamma.at(p, {d, k}, a) * A.at(p, I, k);
          for (int s = 0; s < q; ++s) {
            std::array<int, 6> J = I;
            for (int k = 0; k < n; ++k) {
              J[s] = k;
              acc -= geo.gamma.at(p, {d, I[s]}, k) * A.at(p, J, a);
            }
            J[s] = I[s];
          }
          out.at(p, full, a) = acc;
        }
      } while (advance_multi(n, q, I));
    }
  }
  return out;
}

TensorField nabla_p(const Geometry& geo, const TensorField& A, int p) {
  TensorField out = A;
  for (int i = 0; i < p; ++i) out = covariant_derivative(geo, out);
  return out;
}

TensorField nabla_tx(const Geometry& geo, const TensorField& A) {
  if (!A.vector_valued()) throw std::invalid_argument("nabla_tx: vector-valued field expected");
  TensorField nA = covariant_derivative(geo, A);
  if (A.order() == 0) return nA;  // exterior derivative of a 0-form
  return alt2(nA, 0, 1);
}

TensorField riemann_curvature(const Geometry& geo) {
  const Grid& grid = *geo.grid;
  const int n = grid.dim();
  std::vector<TensorField> dGamma;
  dGamma.reserve(n);
  for (int a = 0; a < n; ++a) dGamma.push_back(fd_partial(geo.gamma, a, 1, geo.accuracy));

  TensorField R = TensorField::vector_valued(grid, 3);
  for (Index p = 0; p < grid.size(); ++p) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int a = 0; a < n; ++a) {
            double acc = dGamma[i].at(p, {j, k}, a) - dGamma[j].at(p, {i, k}, a);
            for (int l = 0; l < n; ++l)
              acc += geo.gamma.at(p, {i, l}, a) * geo.gamma.at(p, {j, k}, l) -
                     geo.gamma.at(p, {j, l}, a) * geo.gamma.at(p, {i, k}, l);
            R.at(p, {i, j, k}, a) = acc;
          }
  }
  return R;
}

TensorField ricci(const Geometry& geo, const TensorField& curv) {
  const Grid& grid = *geo.grid;
  const int n = grid.dim();
  TensorField ric = TensorField::covariant(grid, 2);
  for (Index p = 0; p < grid.size(); ++p) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += curv.at(p, {i, j, k}, i);
        ric.at(p, {j, k}) = acc;
      }
    Mat m = ric.mat2(p);
    ric.mat2(p) = 0.5 * (m + m.transpose());
  }
  return ric;
}

TensorField log_density(const Grid& grid, const TensorField& g) {
  TensorField f = TensorField::scalar(grid);
  TensorField det = det2(g);
  for (Index p = 0; p < grid.size(); ++p) {
    double d = det.scalar_at(p);
    if (d <= 0.0) throw std::domain_error("log_density: non-positive metric determinant");
    f.scalar_at(p) = 0.5 * std::log(d) - grid.log_omega()[p];
  }
  return f;
}

TensorField bakry_emery_ricci(const Geometry& geo) {
  TensorField R = riemann_curvature(geo);
  TensorField ric = ricci(geo, R);
  TensorField hess = covariant_derivative(geo, geo.df);  // Hessian of f
  return ric + hess;
}

TensorField bakry_emery_ricci(const Grid& grid, const TensorField& g, int accuracy) {
  Geometry geo = make_geometry(grid, g, accuracy);
  return bakry_emery_ricci(geo);
}

TensorField ric_star_omega(const Geometry& geo) {
  return endo_of(*geo.grid, geo.g, bakry_emery_ricci(geo));
}

TensorField laplacian(const Geometry& geo, const TensorField& A) {
  TensorField n2 = covariant_derivative(geo, covariant_derivative(geo, A));
  return -trace_slots_g(geo.ginv, n2, 0, 1);
}

TensorField laplacian_omega(const Geometry& geo, const TensorField& A) {
  TensorField nA = covariant_derivative(geo, A);
  TensorField n2 = covariant_derivative(geo, nA);
  return -trace_slots_g(geo.ginv, n2, 0, 1) + insert_vector(geo.gradf, nA, 0);
}

TensorField adjoint_nabla(const Geometry& geo, const TensorField& A) {
  TensorField nA = covariant_derivative(geo, A);
  return -trace_slots_g(geo.ginv, nA, 0, 1);
}

TensorField adjoint_nabla_omega(const Geometry& geo, const TensorField& A) {
  return adjoint_nabla(geo, A) + insert_vector(geo.gradf, A, 0);
}

TensorField div_underline(const Geometry& geo, const TensorField& A) {
  TensorField nA = covariant_derivative(geo, A);
  return trace_slots_g(geo.ginv, nA, 0, A.order());
}

TensorField div_underline_omega(const Geometry& geo, const TensorField& A) {
  return div_underline(geo, A) - insert_vector(geo.gradf, A, A.order() - 1);
}

TensorField omega_div(const Geometry& geo, const TensorField& A) {
  // conservation form e^f div(e^{-f} .): the discrete operator stays the
  // exact quadrature adjoint of the discrete gradient up to boundary tails
  const Grid& grid = *geo.grid;
  TensorField wminus = TensorField::scalar(grid);
  TensorField wplus = TensorField::scalar(grid);
  for (Index p = 0; p < grid.size(); ++p) {
    wminus.scalar_at(p) = std::exp(-geo.f.scalar_at(p));
    wplus.scalar_at(p) = std::exp(geo.f.scalar_at(p));
  }
  TensorField damped = scale_pointwise(A, wminus);
  TensorField div = trace_slots_g(geo.ginv, covariant_derivative(geo, damped), 0, 1);
  return scale_pointwise(div, wplus);
}

TensorField d_operator(const Geometry& geo, const TensorField& u) {
  TensorField nu = covariant_derivative(geo, u);  // (mu, i, j)
  const Grid& grid = *geo.grid;
  const int n = grid.dim();
  TensorField out = TensorField::covariant(grid, 3);
  for (Index p = 0; p < grid.size(); ++p)
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          out.at(p, {m, i, j}) =
              nu.at(p, {i, m, j}) + nu.at(p, {j, m, i}) - nu.at(p, {m, i, j});
  return out;
}

IdentityValue make_identity_value(const TensorField& g, TensorField lhs, TensorField rhs) {
  IdentityValue v;
  v.lhs_norm = sup_norm_g(g, lhs);
  v.rhs_norm = sup_norm_g(g, rhs);
  v.residual = sup_norm_g(g, lhs - rhs);
  v.lhs = std::move(lhs);
  v.rhs = std::move(rhs);
  return v;
}

IdentityValue weitzenbock_tx(const Geometry& geo, const TensorField& H, bool weighted) {
  // direct Hodge form
  TensorField adjH = weighted ? adjoint_nabla_omega(geo, H) : adjoint_nabla(geo, H);
  // adjH is vv order 0 (a vector field)
  TensorField term1 = covariant_derivative(geo, adjH);
  TensorField txH = nabla_tx(geo, H);
  TensorField term2 = weighted ? adjoint_nabla_omega(geo, txH) : adjoint_nabla(geo, txH);
  TensorField direct = term1 + term2;

  // curvature form
  TensorField R = riemann_curvature(geo);
  TensorField lap = weighted ? laplacian_omega(geo, H) : laplacian(geo, H);
  TensorField ric = ricci(geo, R);
  TensorField ricstar = weighted ? ric_star_omega(geo) : endo_of(*geo.grid, geo.g, ric);
  TensorField rhs = lap - star_endo(geo.ginv, R, H) + endo_mult(H, ricstar);
  return make_identity_value(geo.g, std::move(direct), std::move(rhs));
}

IdentityValue endo_div_formula(const Geometry& geo, const TensorField& u) {
  TensorField Du = d_operator(geo, u);
  TensorField lhs = -endo_of(*geo.grid, geo.g, adjoint_nabla_omega(geo, Du));

  TensorField ustar = endo_of(*geo.grid, geo.g, u);
  TensorField S = adjoint_nabla_omega(geo, nabla_tx(geo, ustar));
  TensorField rhs = S + transpose_endo_g(geo.g, S) - laplacian_omega(geo, ustar);
  return make_identity_value(geo.g, std::move(lhs), std::move(rhs));
}

CommutatorValue commutator_nabla_laplacian(const Geometry& geo, const TensorField& A) {
  TensorField nA = covariant_derivative(geo, A);
  TensorField lhs = covariant_derivative(geo, laplacian_omega(geo, A)) - laplacian_omega(geo, nA);

  TensorField R = riemann_curvature(geo);
  TensorField ricstar = ric_star_omega(geo);
  TensorField rhs = bullet_endo(ricstar, nA, 0);
  if (A.vector_valued()) {
    rhs += 2.0 * hat_neg_g(geo.ginv, R, nA);
    TensorField adjR = adjoint_nabla_omega(geo, R);  // End-valued 1-form
    rhs += hat_neg(adjR, A);
  } else if (A.order() > 0) {
    throw std::invalid_argument("commutator_nabla_laplacian: plain fields must be scalar");
  }

  CommutatorValue v;
  static_cast<IdentityValue&>(v) = make_identity_value(geo.g, std::move(lhs), std::move(rhs));

  // bracket hypothesis [R, xi -| nabla^r A] = 0, r = 0, 1
  double hyp = 0.0;
  if (A.vector_valued() && A.order() >= 1) {
    for (const TensorField* F : std::initializer_list<const TensorField*>{&A, &nA}) {
      TensorField br = TensorField::vector_valued(*geo.grid, F->order() + 2);
      const int n = geo.grid->dim();
      for (Index p = 0; p < geo.grid->size(); ++p) {
        for (int o = 0; o < F->outer_count(); ++o) {
          Mat Fe = F->endo(p, o);
          for (int ij = 0; ij < n * n; ++ij) {
            Mat Re = R.endo(p, ij);
            br.endo(p, ij * F->outer_count() + o) = Re * Fe - Fe * Re;
          }
        }
      }
      hyp = std::max(hyp, sup_norm_g(geo.g, br));
    }
  }
  v.hypothesis_residual = hyp;
  return v;
}

IdentityValue com_cov_identity(const Geometry& geo, const TensorField& H) {
  // nabla^2 H antisymmetrised in the two derivative slots vs [R(.,.), H]
  TensorField n2 = nabla_p(geo, H, 2);
  TensorField lhs = alt2(n2, 0, 1);
  TensorField R = riemann_curvature(geo);
  TensorField rhs = bracket_last(R, H);  // [R(xi,eta), H] per form-index pair
  return make_identity_value(geo.g, std::move(lhs), std::move(rhs));
}

IdentityValue contracted_bianchi_omega(const Geometry& geo) {
  TensorField R = riemann_curvature(geo);
  TensorField lhs = div_underline_omega(geo, R);
  TensorField ric_endo = ric_star_omega(geo);
  TensorField rhs = -nabla_tx(geo, ric_endo);
  return make_identity_value(geo.g, std::move(lhs), std::move(rhs));
}

}  // namespace solflow
