#pragma once

#include "solflow/field.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace solflow {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Pointwise metric algebra
// ---------------------------------------------------------------------------

/// Inverse of a plain rank-2 field (componentwise matrix inverse).
TensorField inverse2(const TensorField& g);

/// Endomorphism lift u* = g^{-1} u of a plain symmetric 2-tensor.
TensorField endo_of(const Grid& grid, const TensorField& g, const TensorField& u);

/// Lower an endomorphism to the 2-tensor u(x, y) = g(Hx, y).
TensorField lower_endo(const Grid& grid, const TensorField& g, const TensorField& H);

/// Pointwise product of endomorphism fields.
TensorField endo_mult(const TensorField& A, const TensorField& B);
TensorField endo_commutator(const TensorField& A, const TensorField& B);

/// Real trace of an endomorphism field.
TensorField trace_endo(const TensorField& H);

/// Metric trace of a plain 2-tensor: g^{ij} u_ij.
TensorField trace_g(const TensorField& g, const TensorField& u);

/// Apply an endomorphism field to a vector field.
TensorField endo_apply(const TensorField& H, const TensorField& v);

/// Identity endomorphism field.
TensorField identity_endo(const Grid& grid);

/// Pointwise determinant of a plain rank-2 field.
TensorField det2(const TensorField& g);

/// Multiply every component by a scalar field.
TensorField scale_pointwise(const TensorField& A, const TensorField& s);

/// g-transpose of an endomorphism field: g(H^T x, y) = g(x, H y).
TensorField transpose_endo_g(const TensorField& g, const TensorField& H);

/// g-transpose of a vector-valued 2-tensor in its last slot:
/// (v -| A^T)(x) = (v -| A)^T_g x  for each first argument v.
TensorField transpose_g_last(const TensorField& g, const TensorField& A);

// ---------------------------------------------------------------------------
// Pointwise pairings and norms
// ---------------------------------------------------------------------------

/// Pointwise scalar product <u, v>_g: argument slots contracted with g^{-1},
/// value slots with g. Fields must share shape.
TensorField pointwise_inner_g(const TensorField& g, const TensorField& u, const TensorField& v);

TensorField pointwise_norm2_g(const TensorField& g, const TensorField& u);

/// max over the grid of the pointwise g-frame norm.
double sup_norm_g(const TensorField& g, const TensorField& u);

/// Same, restricted to the bulk region (reference density above the grid's
/// tail cutoff); on weight-one grids this is the plain sup norm.
double bulk_sup_norm_g(const TensorField& g, const TensorField& u);

// ---------------------------------------------------------------------------
// Symmetric matrix functions (pointwise eigendecomposition)
// ---------------------------------------------------------------------------

/// exp of a coordinate-symmetric endomorphism field.
TensorField endo_exp(const TensorField& A);

/// log of a coordinate-symmetric positive-definite endomorphism field.
/// Throws std::domain_error on a non-positive eigenvalue.
TensorField endo_log(const TensorField& B);

/// exp/log/sqrt of a g-symmetric endomorphism field, via the Cholesky
/// conjugation S = L^T M L^{-T} that turns g-symmetry into plain symmetry.
TensorField endo_exp_g(const TensorField& g, const TensorField& M);
TensorField endo_log_g(const TensorField& g, const TensorField& M);
TensorField endo_sqrt_g(const TensorField& g, const TensorField& M);

/// Pointwise minimum eigenvalue of a g-symmetric endomorphism field.
double min_eigenvalue_g(const TensorField& g, const TensorField& M);

/// Check symmetry of g^{-1}u-type lifts: max |g M - (g M)^T|.
double asymmetry_g(const TensorField& g, const TensorField& M);

// pointwise helpers on single matrices
Mat sym_matrix_function(const Mat& S, double (*fn)(double), bool require_positive);
Mat gsym_matrix_function(const Mat& G, const Mat& M, double (*fn)(double), bool require_positive);

}  // namespace solflow
