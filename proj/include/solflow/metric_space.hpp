#pragma once

#include "solflow/riemann.hpp"

#include <string>
#include <vector>

namespace solflow {

/// Center of polarization: an endomorphism field with pointwise distinct
/// real eigenvalues.
struct Polarization {
  TensorField K;  // endomorphism field
  double eigengap = 0;
};

/// Constant diagonal polarization; throws if the diagonal entries are not
/// pairwise distinct beyond `gap_threshold`.
Polarization make_polarization(const Grid& grid, const std::vector<double>& diag,
                               double gap_threshold = 1e-6);

/// L2(Omega) scalar product of symmetric 2-tensor fields at the metric g.
double g_inner(const TensorField& g, const TensorField& u, const TensorField& v);

/// Geodesic of the metric-space scalar product: g_t = g0 exp(t g0^{-1} v).
/// Throws if g0^{-1} v fails g0-symmetry beyond `sym_tol`.
TensorField geodesic(const Grid& grid, const TensorField& g0, const TensorField& v, double t,
                     double sym_tol = 1e-8);

/// Curvature of the space of metrics:
/// R(g)(u, v) w = -1/4 g [[u*, v*], w*].
TensorField curvature_space_of_metrics(const Grid& grid, const TensorField& g,
                                       const TensorField& u, const TensorField& v,
                                       const TensorField& w);

/// Named residual list; membership predicates return these and leave the
/// tolerance policy to the caller.
struct ResidualReport {
  std::vector<std::pair<std::string, double>> entries;
  double max() const {
    double m = 0;
    for (auto& e : entries) m = std::max(m, e.second);
    return m;
  }
  void add(std::string name, double v) { entries.emplace_back(std::move(name), v); }
};

/// sup over the grid and all derivative indices of the g-frame norm of
/// [A(outer), B(outer')] between two vector-valued fields.
double max_bracket_residual(const Geometry& geo, const TensorField& A, const TensorField& B);

/// 3-symmetric covariant derivative condition: |nabla_TX v*|.
ResidualReport in_F(const Geometry& geo, const TensorField& v);

/// Power conditions |nabla_TX (v*)^p| for p = 1..p_max.
ResidualReport in_F_infty(const Geometry& geo, const TensorField& v, int p_max = 3);

/// Curvature commutation conditions [R, v*] and [R, nabla v*].
ResidualReport in_E(const Geometry& geo, const TensorField& v);

/// Full polarized space: nabla_TX v* = 0 and [T, nabla^p v*] = 0 for
/// T = K, R and p = 0..p_max.
ResidualReport in_F_K(const Geometry& geo, const TensorField& v, const Polarization& K,
                      int p_max = 3);

/// Both characterisations of the polarized space: the derivative-commutator
/// form and the [nabla^p T, v*] form. They must co-vanish.
std::pair<ResidualReport, ResidualReport> equivalent_FK_check(const Geometry& geo,
                                                              const TensorField& v,
                                                              const Polarization& K, int p_max = 3);

/// Pre-scattering condition |nabla_TX Ric*(Omega)|.
ResidualReport is_prescattering(const Geometry& geo);

/// Scattering condition Ric(Omega) in F^K_g.
ResidualReport is_scattering_K(const Geometry& geo, const Polarization& K, int p_max = 3);

/// Flat-coordinate data of a metric relative to a base point.
struct FlatCoordinates {
  TensorField A;      // log coordinate, -1/2 log(g0^{-1} g)
  double distance;    // sqrt(4 int |A|^2 Omega)
};

FlatCoordinates flat_coordinates(const Grid& grid, const TensorField& g0, const TensorField& g);

/// Membership of g in the flat through g0: residuals of the log coordinate.
ResidualReport sigma_K_membership(const Grid& grid, const TensorField& g0, const TensorField& g,
                                  const Polarization& K, int p_max = 3);

/// Distance between two members of the flat through g0.
double dist_on_flat(const Grid& grid, const TensorField& g0, const TensorField& ga,
                    const TensorField& gb);

/// Drift of conserved quantities along a geodesic: curvature, the
/// pre-scattering residual and nabla gdot* at each sample time.
struct ConservationRecord {
  double t;
  double curvature_drift;
  double prescattering_residual;
  double nabla_gdot_drift;
  ResidualReport membership;
};

std::vector<ConservationRecord> conservation_along_geodesic(const Grid& grid,
                                                            const TensorField& g0,
                                                            const TensorField& v,
                                                            const Polarization& K,
                                                            const std::vector<double>& times,
                                                            int p_max = 3);

}  // namespace solflow
