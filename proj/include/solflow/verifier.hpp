#pragma once

#include "solflow/metric_space.hpp"
#include "solflow/riemann.hpp"
#include "solflow/testbeds.hpp"

#include <functional>
#include <string>
#include <vector>

namespace solflow {

/// A smooth one-parameter family of metrics for variation checks.
struct Family {
  std::string name;
  std::function<TensorField(double)> metric;
  bool polarized = false;  // gdot_t lies in the 3-symmetric space along the family
};

/// One verified identity instance. `residual` is recomputable from the
/// stored side norms only up to the triangle inequality; the sides
/// themselves stay in memory only transiently.
struct IdentityReport {
  std::string identity_id;
  std::string instance;
  std::string control;  // "positive" or "negative"
  double h = 0;
  double dt = 0;
  double lhs_norm = 0;
  double rhs_norm = 0;
  double residual = 0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double budget = std::numeric_limits<double>::quiet_NaN();
  bool hypothesis_ok = true;
  bool passed = true;
};

/// residual measured in the bulk sup norm of the family metric at t0
using VerifyResult = std::vector<IdentityReport>;

/// Variation of the Levi-Civita connection: the total three-term form and
/// the polarized form 2 dGamma/dt = nabla gdot*. `with_controls` adds an
/// ingredient-swap negative control for the unconditional form.
VerifyResult verify_connection_variation(const Grid& grid, const Family& family, double t0,
                                         double dt, bool with_controls = false);

/// Variation of the curvature: the total second-derivative form and the
/// polarized bracket form 2 dR/dt = [R, gdot*].
VerifyResult verify_curvature_variation(const Grid& grid, const Family& family, double t0,
                                        double dt, bool with_controls = false);

/// Variations of the weighted Ricci tensor: the total divergence form,
/// the polarized Laplacian forms (tensor and endomorphism), the unweighted
/// endomorphism form and the gradient variation.
VerifyResult verify_ric_variation(const Grid& grid, const Family& family, double t0, double dt,
                                  bool with_controls = false);

/// Variation of the pre-scattering operator: the polarized three-term form
/// and the unrestricted total form.
VerifyResult verify_prescattering_variation(const Grid& grid, const Family& family, double t0,
                                            double dt);

/// Variations of covariant derivatives of a fixed endomorphism: the
/// covariant-exterior form, the bracket form, the second-derivative form
/// and the derivative expansion of the weighted Laplacian (1D).
VerifyResult verify_extD_and_Pder(const Grid& grid, const Family& family, const TensorField& H,
                                  double t0, double dt, bool with_controls = false);

/// Spatial derivative of the endomorphism logarithm.
VerifyResult verify_log_derivative(const Grid& grid, const TensorField& g, const TensorField& B,
                                   const std::string& instance, bool commuting);

/// Hamilton-type interpolation inequalities: empirical constants of the
/// gradient inequality and its two corollaries on a sample field.
struct InterpolationReport {
  std::string instance;
  double c_gradient = 0;   // |nabla A|_{2r} vs |nabla^2 A|_p |A|_q
  double c_interp1 = 0;    // int |nabla^r A|^{2p/r} vs max|A|^... int |nabla^p A|^2
  double c_interp2 = 0;    // int |nabla^r A|^2 vs product of powers
};
InterpolationReport verify_hamilton_interpolation(const Grid& grid, const TensorField& g,
                                                  const TensorField& A, const std::string& instance);

struct SuiteConfig {
  int points_1d = 128;      // coarse 1D resolution (the ladder doubles it)
  int points_2d = 24;       // coarse 2D resolution
  unsigned long seed = 2024;
  double slope_min = 1.8;
  double negative_factor = 100.0;
  double budget_scale = 1.0;  // multiplies the per-identity budget constants
};

struct SuiteReport {
  std::vector<IdentityReport> reports;
  std::vector<InterpolationReport> interpolation;
  bool pass = false;
  int positive_failures = 0;
  int negative_failures = 0;
  int vacuous_identities = 0;
};

/// Run every identity across the instance matrix at two resolutions,
/// attach refinement slopes and verdicts.
SuiteReport run_suite(const SuiteConfig& config);

}  // namespace solflow
