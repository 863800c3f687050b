#pragma once

#include "solflow/w_functional.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace solflow {

/// Representation of the evolving state: the metric itself, the square-root
/// transfer endomorphism H = (g^{-1} g0)^{1/2}, or its logarithm A = log H.
enum class FlowRepr { Metric, SquareRoot, Log };

enum class FlowStatus { ReachedEnd, PositivityLoss, CflViolation, NonFinite };

struct IntegratorConfig {
  enum class Scheme { Rk4, Euler };
  double dt = 1e-3;
  Scheme scheme = Scheme::Rk4;
  double t_end = 1.0;
  double cfl_guard = 0.25;  // bound on dt * max|H|^2 / h_min^2
  int diagnostics_stride = 100;
  int hp_max = 3;
  bool collect_heat_samples = true;
};

/// Right-hand sides of the three equivalent evolution equations.
/// Metric form:      gdot = Ric_g(Omega) - g.
/// Square-root form: 2 Hdot = -H^2 Lap^Omega H - H^3 Ric0* + H.
/// Log form:         2 Adot = e^A div^Omega(e^A nabla A) - e^{2A} Ric0* + I.
TensorField rhs_g(const FlatContext& ctx, const TensorField& g);
TensorField rhs_H(const FlatContext& ctx, const TensorField& H);
TensorField rhs_A(const FlatContext& ctx, const TensorField& A);

/// Conversions between representations (relative to the base point).
TensorField metric_from_H(const FlatContext& ctx, const TensorField& H);
TensorField metric_from_A(const FlatContext& ctx, const TensorField& A);
TensorField H_from_A(const FlatContext& ctx, const TensorField& A);
TensorField A_from_metric(const FlatContext& ctx, const TensorField& g);

struct DiagnosticsRecord {
  double t = 0;
  double sup_gdot = 0;         // sup_X |gdot|_g
  double sup_nabla_gdot = 0;   // sup_X |nabla gdot*|_g
  double w_value = 0;
  double soliton_residual = 0;  // sup_X |Ric(Omega) - g|_g
  double min_ric_eigenvalue = 0;
  std::array<double, 4> hp_seminorm{};  // int |nabla^p gdot*|^2 Omega, p = 0..3
  double cross_drift = 0;               // filled by cross-form runs
};

/// Per-record scalar fields used by the heat diagnostics.
struct HeatSample {
  double t = 0;
  TensorField gdot_norm2;      // |gdot|_g^2
  TensorField lap_gdot_norm2;  // Delta^Omega_{g_t} |gdot|^2
  TensorField expansion;       // -2|nabla gdot*|^2 - 4|gdot|^2 - 4 Tr (gdot*)^3
  TensorField metric;          // g_t
};

struct FlowResult {
  FlowStatus status = FlowStatus::ReachedEnd;
  std::string message;
  double t_final = 0;
  FlowRepr repr = FlowRepr::SquareRoot;
  TensorField final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<HeatSample> heat_samples;
  double advisory_dt = 0;  // suggested step after a CFL abort
};

/// Integrate the flow from the coordinate A0 in the chosen representation.
FlowResult run_flow(const FlatContext& ctx, const TensorField& A0, FlowRepr repr,
                    const IntegratorConfig& config);

/// One explicit step in the given representation (RK4 or Euler).
TensorField step(const FlatContext& ctx, const TensorField& state, FlowRepr repr, double dt,
                 IntegratorConfig::Scheme scheme);

struct CrossCheckRow {
  double t;
  double drift_gH;
  double drift_gA;
  double drift_HA;
};

struct CrossCheckResult {
  double max_drift = 0;
  std::vector<CrossCheckRow> rows;
};

/// Integrate the same initial data in all three representations and report
/// the pairwise metric drift at the shared record times.
CrossCheckResult cross_check(const FlatContext& ctx, const TensorField& A0,
                             const IntegratorConfig& config);

struct HeatReport {
  double heat_identity_residual = 0;  // box |gdot|^2 against its expansion
  double delta = 0;                   // inf over records of min eig Ric*(Omega)
  bool decay_bound_ok = false;        // sup|gdot_t| <= sup|gdot_0| e^{-delta t/2} (1+1e-2)
  double worst_decay_margin = 0;      // min over records of bound - value
  bool w_monotone = false;
  double worst_w_increase = 0;
  double sandwich_constant = 0;  // estimate of int_0^inf sup|gdot| dt
  bool sandwich_ok = false;
};

HeatReport heat_diagnostics(const FlatContext& ctx, const FlowResult& result);

struct HpReport {
  std::array<double, 4> theta{};  // fitted decay rates per derivative order
  std::array<bool, 4> fitted{};   // false when the seminorm sits at noise level
};

HpReport hp_monitor(const FlowResult& result, int p_max = 3);

}  // namespace solflow
