#include "solflow/metric_space.hpp"

#include <algorithm>

namespace solflow {

Polarization make_polarization(const Grid& grid, const std::vector<double>& diag,
                               double gap_threshold) {
  if (static_cast<int>(diag.size()) != grid.dim())
    throw std::invalid_argument("polarization diagonal size must match grid dimension");
  std::vector<double> sorted = diag;
  std::sort(sorted.begin(), sorted.end());
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < sorted.size(); ++i) gap = std::min(gap, sorted[i + 1] - sorted[i]);
  if (grid.dim() == 1) gap = std::numeric_limits<double>::infinity();
  if (gap <= gap_threshold)
    throw std::invalid_argument("polarization eigenvalues not separated beyond threshold");

  Polarization P;
  P.K = TensorField::vector_valued(grid, 1);
  for (Index p = 0; p < grid.size(); ++p) {
    Mat m = Mat::Zero(grid.dim(), grid.dim());
    for (int i = 0; i < grid.dim(); ++i) m(i, i) = diag[i];
    P.K.endo(p) = m;
  }
  P.eigengap = gap;
  return P;
}

double g_inner(const TensorField& g, const TensorField& u, const TensorField& v) {
  return integrate_omega(pointwise_inner_g(g, u, v));
}

TensorField geodesic(const Grid& grid, const TensorField& g0, const TensorField& v, double t,
                     double sym_tol) {
  TensorField E = endo_of(grid, g0, v);
  double asym = asymmetry_g(g0, E);
  double scale = std::max(1.0, E.max_abs());
  if (asym > sym_tol * scale)
    throw std::invalid_argument("geodesic: g0^{-1} v is not g0-symmetric");
  TensorField expE = endo_exp_g(g0, t * E);
  return lower_endo(grid, g0, expE);
}

TensorField curvature_space_of_metrics(const Grid& grid, const TensorField& g,
                                       const TensorField& u, const TensorField& v,
                                       const TensorField& w) {
  TensorField us = endo_of(grid, g, u);
  TensorField vs = endo_of(grid, g, v);
  TensorField ws = endo_of(grid, g, w);
  TensorField inner = endo_commutator(endo_commutator(us, vs), ws);
  return -0.25 * lower_endo(grid, g, inner);
}

double max_bracket_residual(const Geometry& geo, const TensorField& A, const TensorField& B) {
  const Grid& grid = *geo.grid;
  double m = 0.0;
  for (Index p = 0; p < grid.size(); ++p) {
    Mat G = geo.g.mat2(p);
    Mat Gi = geo.ginv.mat2(p);
    for (int oa = 0; oa < A.outer_count(); ++oa) {
      Mat Ae = A.endo(p, oa);
      for (int ob = 0; ob < B.outer_count(); ++ob) {
        Mat Be = B.endo(p, ob);
        Mat C = Ae * Be - Be * Ae;
        // g-frame endomorphism norm: tr(C g^{-1} C^T g)
        double n2 = (C * Gi * C.transpose() * G).trace();
        m = std::max(m, std::sqrt(std::max(0.0, n2)));
      }
    }
  }
  return m;
}

ResidualReport in_F(const Geometry& geo, const TensorField& v) {
  ResidualReport r;
  TensorField vs = endo_of(*geo.grid, geo.g, v);
  r.add("tx_derivative", sup_norm_g(geo.g, nabla_tx(geo, vs)));
  return r;
}

ResidualReport in_F_infty(const Geometry& geo, const TensorField& v, int p_max) {
  ResidualReport r;
  TensorField vs = endo_of(*geo.grid, geo.g, v);
  TensorField power = vs;
  for (int p = 1; p <= p_max; ++p) {
    r.add("tx_derivative_power_" + std::to_string(p), sup_norm_g(geo.g, nabla_tx(geo, power)));
    power = endo_mult(power, vs);
  }
  return r;
}

ResidualReport in_E(const Geometry& geo, const TensorField& v) {
  ResidualReport r;
  TensorField vs = endo_of(*geo.grid, geo.g, v);
  TensorField R = riemann_curvature(geo);
  r.add("curv_bracket", max_bracket_residual(geo, R, vs));
  r.add("curv_bracket_derivative",
        max_bracket_residual(geo, R, covariant_derivative(geo, vs)));
  return r;
}

ResidualReport in_F_K(const Geometry& geo, const TensorField& v, const Polarization& K,
                      int p_max) {
  ResidualReport r = in_F(geo, v);
  TensorField vs = endo_of(*geo.grid, geo.g, v);
  TensorField R = riemann_curvature(geo);
  TensorField der = vs;
  for (int p = 0; p <= p_max; ++p) {
    r.add("K_bracket_p" + std::to_string(p), max_bracket_residual(geo, K.K, der));
    r.add("curv_bracket_p" + std::to_string(p), max_bracket_residual(geo, R, der));
    if (p < p_max) der = covariant_derivative(geo, der);
  }
  return r;
}

std::pair<ResidualReport, ResidualReport> equivalent_FK_check(const Geometry& geo,
                                                              const TensorField& v,
                                                              const Polarization& K, int p_max) {
  ResidualReport first = in_F_K(geo, v, K, p_max);

  ResidualReport second = in_F(geo, v);
  TensorField vs = endo_of(*geo.grid, geo.g, v);
  TensorField R = riemann_curvature(geo);
  TensorField derK = K.K;
  TensorField derR = R;
  for (int p = 0; p <= p_max; ++p) {
    second.add("K_derivative_bracket_p" + std::to_string(p),
               max_bracket_residual(geo, derK, vs));
    second.add("curv_derivative_bracket_p" + std::to_string(p),
               max_bracket_residual(geo, derR, vs));
    if (p < p_max) {
      derK = covariant_derivative(geo, derK);
      derR = covariant_derivative(geo, derR);
    }
  }
  return {first, second};
}

ResidualReport is_prescattering(const Geometry& geo) {
  ResidualReport r;
  TensorField ric_endo = ric_star_omega(geo);
  r.add("prescattering", sup_norm_g(geo.g, nabla_tx(geo, ric_endo)));
  return r;
}

ResidualReport is_scattering_K(const Geometry& geo, const Polarization& K, int p_max) {
  TensorField ric = bakry_emery_ricci(geo);
  return in_F_K(geo, ric, K, p_max);
}

FlatCoordinates flat_coordinates(const Grid& grid, const TensorField& g0, const TensorField& g) {
  TensorField P = endo_of(grid, g0, g);
  FlatCoordinates fc{(-0.5) * endo_log_g(g0, P), 0.0};
  TensorField n2 = TensorField::scalar(grid);
  for (Index p = 0; p < grid.size(); ++p) {
    Mat A = fc.A.endo(p);
    n2.scalar_at(p) = 4.0 * (A * A).trace();
  }
  fc.distance = std::sqrt(std::max(0.0, integrate_omega(n2)));
  return fc;
}

ResidualReport sigma_K_membership(const Grid& grid, const TensorField& g0, const TensorField& g,
                                  const Polarization& K, int p_max) {
  FlatCoordinates fc = flat_coordinates(grid, g0, g);
  TensorField v = lower_endo(grid, g0, -2.0 * fc.A);
  Geometry geo0 = make_geometry(grid, g0);
  return in_F_K(geo0, v, K, p_max);
}

double dist_on_flat(const Grid& grid, const TensorField& g0, const TensorField& ga,
                    const TensorField& gb) {
  FlatCoordinates fa = flat_coordinates(grid, g0, ga);
  FlatCoordinates fb = flat_coordinates(grid, g0, gb);
  TensorField diff = fa.A - fb.A;
  TensorField n2 = TensorField::scalar(grid);
  for (Index p = 0; p < grid.size(); ++p) {
    Mat D = diff.endo(p);
    n2.scalar_at(p) = 4.0 * (D * D).trace();
  }
  return std::sqrt(std::max(0.0, integrate_omega(n2)));
}

std::vector<ConservationRecord> conservation_along_geodesic(const Grid& grid,
                                                            const TensorField& g0,
                                                            const TensorField& v,
                                                            const Polarization& K,
                                                            const std::vector<double>& times,
                                                            int p_max) {
  Geometry geo0 = make_geometry(grid, g0);
  TensorField R0 = riemann_curvature(geo0);
  TensorField gdot_star = endo_of(grid, g0, v);  // constant along the geodesic
  TensorField nabla0 = covariant_derivative(geo0, gdot_star);

  std::vector<ConservationRecord> out;
  out.reserve(times.size());
  for (double t : times) {
    TensorField gt = geodesic(grid, g0, v, t);
    Geometry geot = make_geometry(grid, gt);
    ConservationRecord rec;
    rec.t = t;
    rec.curvature_drift = sup_norm_g(geo0.g, riemann_curvature(geot) - R0);
    rec.prescattering_residual = is_prescattering(geot).max();
    rec.nabla_gdot_drift =
        sup_norm_g(geo0.g, covariant_derivative(geot, gdot_star) - nabla0);
    TensorField gdot_t = lower_endo(grid, gt, gdot_star);
    rec.membership = in_F_K(geot, gdot_t, K, p_max);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace solflow
