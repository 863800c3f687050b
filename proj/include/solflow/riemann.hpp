#pragma once

#include "solflow/algebra.hpp"
#include "solflow/field.hpp"
#include "solflow/products.hpp"

namespace solflow {

/// Cached differential-geometric data of one metric on one grid.
struct Geometry {
  const Grid* grid = nullptr;
  int accuracy = 2;
  TensorField g;      // plain (0,2), symmetric positive
  TensorField ginv;   // plain (0,2), components g^{ij}
  TensorField gamma;  // Levi-Civita coefficients, vector-valued (0,2)
  TensorField f;      // scalar log(dV_g / Omega)
  TensorField df;     // plain (0,1)
  TensorField gradf;  // gradient vector field
};

Geometry make_geometry(const Grid& grid, TensorField g, int accuracy = 2);

/// Levi-Civita coefficients of a metric field.
TensorField christoffel(const Grid& grid, const TensorField& g, int accuracy = 2);

/// Covariant derivative; the new derivative slot is prepended.
TensorField covariant_derivative(const Geometry& geo, const TensorField& A);

/// Iterated covariant derivative (p new slots, outermost first).
TensorField nabla_p(const Geometry& geo, const TensorField& A, int p);

/// Covariant exterior derivative on vector-valued fields:
/// (nabla_TX A)(xi, eta, ...) antisymmetrises the new slot against the first.
TensorField nabla_tx(const Geometry& geo, const TensorField& A);

/// (1,3) curvature field R(e_i, e_j) e_k, from Christoffel derivatives.
TensorField riemann_curvature(const Geometry& geo);

/// Ricci tensor (symmetrised trace of the curvature).
TensorField ricci(const Geometry& geo, const TensorField& curv);

/// f = log(dV_g / Omega) = (1/2) log det g - log omega_density.
TensorField log_density(const Grid& grid, const TensorField& g);

/// Weighted Bakry-Emery-Ricci tensor Ric + Hess f (plain symmetric).
TensorField bakry_emery_ricci(const Geometry& geo);
TensorField bakry_emery_ricci(const Grid& grid, const TensorField& g, int accuracy = 2);

/// Endomorphism lift g^{-1} Ric(Omega).
TensorField ric_star_omega(const Geometry& geo);

/// Rough Laplacian  Delta A = nabla* nabla A  (positive spectrum).
TensorField laplacian(const Geometry& geo, const TensorField& A);

/// Weighted Laplacian  Delta A + nabla_{grad f} A.
TensorField laplacian_omega(const Geometry& geo, const TensorField& A);

/// Formal adjoint of nabla (first-slot contraction), plain and weighted.
TensorField adjoint_nabla(const Geometry& geo, const TensorField& A);
TensorField adjoint_nabla_omega(const Geometry& geo, const TensorField& A);

/// Divergence contracting the derivative against the last argument slot,
/// plain and weighted (underlined divergence of curvature-type fields).
TensorField div_underline(const Geometry& geo, const TensorField& A);
TensorField div_underline_omega(const Geometry& geo, const TensorField& A);

/// First-slot weighted divergence  div A - grad f -| A.
TensorField omega_div(const Geometry& geo, const TensorField& A);

/// Symmetrised-derivative operator  D u = hat-nabla u - 2 nabla u  on
/// symmetric 2-tensors (plain (0,3) result, first slot is mu).
TensorField d_operator(const Geometry& geo, const TensorField& u);

/// Both sides of an identity plus their sup-norm residual in the g-frame.
struct IdentityValue {
  TensorField lhs;
  TensorField rhs;
  double lhs_norm = 0;
  double rhs_norm = 0;
  double residual = 0;
};

IdentityValue make_identity_value(const TensorField& g, TensorField lhs, TensorField rhs);

/// Hodge Laplacian on endomorphisms, direct evaluation vs curvature form:
/// direct = nabla_TX nabla* H + nabla* nabla_TX H,
/// rhs    = Delta H - R * H + H Ric*        (weighted variant with Omega).
IdentityValue weitzenbock_tx(const Geometry& geo, const TensorField& H, bool weighted);

/// Divergence identity for symmetric 2-tensors:
/// -(nabla*_Omega D u)* = nabla*_Omega nabla_TX u* + (...)^T_g - Delta^Omega u*.
IdentityValue endo_div_formula(const Geometry& geo, const TensorField& u);

/// Commutator [nabla, Delta^Omega] A against its curvature expansion.
/// `hypothesis_residual` reports the bracket hypothesis [R, xi -| nabla^r A].
struct CommutatorValue : IdentityValue {
  double hypothesis_residual = 0;
};
CommutatorValue commutator_nabla_laplacian(const Geometry& geo, const TensorField& A);

/// General commuted-derivative identity on endomorphism fields:
/// nabla_xi nabla_eta H - nabla_eta nabla_xi H = [R(xi,eta), H] (+ lower term).
IdentityValue com_cov_identity(const Geometry& geo, const TensorField& H);

/// Contracted-Bianchi residual  div_Omega R + nabla_TX Ric*(Omega).
IdentityValue contracted_bianchi_omega(const Geometry& geo);

}  // namespace solflow
