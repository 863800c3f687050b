#pragma once

#include "solflow/algebra.hpp"
#include "solflow/field.hpp"

namespace solflow {

// Pointwise product algebra on tensor fields. Orthonormal-frame sums in the
// defining formulas become metric contractions here, so every operation that
// consumes a frame takes the inverse metric field.

/// Swap-antisymmetrisation of two argument slots: (Alt A)(u,v) = A(u,v) - A(v,u).
TensorField alt2(const TensorField& A, int s1 = 0, int s2 = 1);

/// Replace-argument action of an endomorphism on one covariant slot:
/// out(..., u_s, ...) = A(..., H u_s, ...).
TensorField bullet_endo(const TensorField& H, const TensorField& A, int slot);

/// Derivation action of an endomorphism on a 2-argument tensor:
/// (H -| A)(u, v) = A(Hu, v) + A(u, Hv).
TensorField endo_neg(const TensorField& H, const TensorField& A);

/// Compose the value of a vector-valued tensor with an endomorphism:
/// (H A)(u, ...) = H (A(u, ...)).
TensorField compose_value(const TensorField& H, const TensorField& A);

/// Contract a vector field into one covariant slot (xi -| A).
TensorField insert_vector(const TensorField& v, const TensorField& A, int slot);

/// Metric contraction of two covariant argument slots.
TensorField trace_slots_g(const TensorField& ginv, const TensorField& A, int s1, int s2);

/// Natural pairing of the value slot with one argument slot (plain result).
TensorField trace_value_slot(const TensorField& A, int slot);

/// Commutator of the trailing endomorphism block with an endomorphism field:
/// out(args) = [A(args, .), H].
TensorField bracket_last(const TensorField& A, const TensorField& H);

/// (B * A)(u, v) = B(u, e_k) A(e_k, v) over a g-orthonormal frame;
/// B a curvature-shaped field (vv order 3), A a vv order-2 field.
TensorField star_form(const TensorField& ginv, const TensorField& B, const TensorField& A);

/// (B (*) A)(u, v) = [B(u, e_k), e_k -| A] v.
TensorField star_circle(const TensorField& ginv, const TensorField& B, const TensorField& A);

/// (A * B)(u, v) = A(e_k, B(u, v) e_k), A vv order 2, B curvature-shaped.
TensorField star_argvalue(const TensorField& ginv, const TensorField& A, const TensorField& B);

/// (R * H) xi = sum_k R(xi, e_k) H e_k (endomorphism result).
TensorField star_endo(const TensorField& ginv, const TensorField& R, const TensorField& H);

/// Generalized product A bullet_k B (k 1-based as in its defining formula):
/// the last argument of A consumes the k-th argument of B, A's value refills it.
TensorField bullet_k(const TensorField& A, const TensorField& B, int k);

/// A hat-neg B = sum_{k=1..q-1} A bullet_k B  (q = argument count of B).
TensorField hat_neg(const TensorField& A, const TensorField& B);

/// Trace-type product A odot^g_{k,l} B, 1 <= l <= k <= q-2.
TensorField odot_g(const TensorField& ginv, const TensorField& A, const TensorField& B, int k,
                   int l);

/// A hat-neg_g B = sum_{k=1..q-2} A odot^g_{k,1} B.
TensorField hat_neg_g(const TensorField& ginv, const TensorField& A, const TensorField& B);

/// Lower the value slot of a vector-valued tensor into a trailing covariant
/// slot: out(args, m) = g(A(args), e_m).
TensorField lower_value_last(const TensorField& g, const TensorField& A);

}  // namespace solflow
