#pragma once

#include "solflow/metric_space.hpp"
#include "solflow/riemann.hpp"
#include "solflow/testbeds.hpp"

namespace solflow {

/// Base-point data for the functional in flat (log) coordinates: the
/// geometry of g0 with its weighted Ricci tensor cached.
struct FlatContext {
  const Grid* grid = nullptr;
  Geometry geo0;
  TensorField ric0;       // Ric_{g0}(Omega), plain symmetric
  TensorField ric0_star;  // endomorphism lift
  double epsilon = 0;     // min eigenvalue of ric0_star against g0
};

FlatContext make_flat_context(const Grid& grid, TensorField g0, int accuracy = 2);

/// Metric of the flat coordinate A: g_A = g0 exp(-2A).
TensorField metric_of_coordinate(const FlatContext& ctx, const TensorField& A);

/// The entropy-type functional on metrics:
/// W(g) = int [ Tr_g(Ric_g(Omega) - g) + 2 log(dV_g/Omega) ] Omega.
double w_omega_metric(const Grid& grid, const TensorField& g, int accuracy = 2);

/// Coordinate form on the flat through g0:
/// W(A) = int [ |nabla e^A|^2 + Tr(e^{2A} Ric0* - 2A) ] Omega + int [2 f0 - n] Omega.
double w_bold(const FlatContext& ctx, const TensorField& A);

/// L2 gradient against the constant product 4 int <.,.>_{g0} Omega:
/// 2 grad W(A) = -e^A div^Omega(e^A nabla A) + e^{2A} Ric0* - I.
TensorField grad_w(const FlatContext& ctx, const TensorField& A);

/// The constant L2 product 4 int <U, V>_{g0} Omega.
double l2_product4(const FlatContext& ctx, const TensorField& U, const TensorField& V);

/// Second variation along the line A + tV:
/// 2 int <[-e^A div^Omega(e^A nabla A) + 2 e^{2A} Ric0*] V, V> Omega
///   + 2 int |nabla(e^A V)|^2 Omega.
double second_variation_w(const FlatContext& ctx, const TensorField& A, const TensorField& V);

/// Bilinear bracket {A, B} = g0 Tr_{g0}(nabla_. A nabla_. B) (plain 2-tensor).
TensorField bracket_product(const FlatContext& ctx, const TensorField& A, const TensorField& B);

/// Weighted Ricci of g_A by three routes that must agree:
TensorField ric_of_A_direct(const FlatContext& ctx, const TensorField& A);
TensorField ric_of_A_bracket(const FlatContext& ctx, const TensorField& A);
TensorField ric_of_A_hform(const FlatContext& ctx, const TensorField& A);

enum class ConvexSetKind { Delta, PlusPlus, Plus, Minus };

struct ConvexSetSpec {
  ConvexSetKind kind = ConvexSetKind::PlusPlus;
  double delta = 0;
};

/// Validates delta < epsilon for the delta-set.
ConvexSetSpec make_convex_spec(const FlatContext& ctx, ConvexSetKind kind, double delta = 0);

struct ConvexMargin {
  double pointwise;        // most negative eigenvalue margin; >= 0 means member
  double sampled;          // integral-inequality margin over random directions
                           // (only meaningful for the Plus set, else +inf)
};

/// Margin of the defining inequality of a convex set at the coordinate A.
ConvexMargin convex_set_membership(const FlatContext& ctx, const TensorField& A,
                                   const ConvexSetSpec& spec, Rng* rng = nullptr,
                                   int u_samples = 64);

/// Uniform lower bound 2 int log(dV_{eps g0}/Omega) Omega; throws for eps <= 0.
double w_lower_bound(const FlatContext& ctx, double eps);

}  // namespace solflow
