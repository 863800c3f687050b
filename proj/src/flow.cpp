#include "solflow/flow.hpp"

#include <cmath>

namespace solflow {

namespace {

/// Weighted Laplacian in conservation form, the exact negative of the
/// divergence used by rhs_A; keeps the representations in exact agreement.
TensorField weighted_lap(const Geometry& geo0, const TensorField& H) {
  return -1.0 * omega_div(geo0, covariant_derivative(geo0, H));
}

double max_operator_norm_sq(const FlatContext& ctx, const TensorField& H) {
  double m = 0;
  for (Index p = 0; p < H.points(); ++p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (Mat(H.endo(p)) + Mat(H.endo(p)).transpose())));
    m = std::max(m, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return m * m;
}

}  // namespace

TensorField rhs_g(const FlatContext& ctx, const TensorField& g) {
  return bakry_emery_ricci(*ctx.grid, g, ctx.geo0.accuracy) - g;
}

TensorField rhs_H(const FlatContext& ctx, const TensorField& H) {
  TensorField lap = weighted_lap(ctx.geo0, H);
  TensorField H2 = endo_mult(H, H);
  TensorField out =
      -1.0 * endo_mult(H2, lap) - endo_mult(endo_mult(H2, H), ctx.ric0_star) + H;
  return 0.5 * out;
}

TensorField rhs_A(const FlatContext& ctx, const TensorField& A) {
  const Geometry& geo0 = ctx.geo0;
  TensorField expA = endo_exp_g(geo0.g, A);
  TensorField div = omega_div(geo0, covariant_derivative(geo0, expA));
  TensorField exp2A = endo_mult(expA, expA);
  TensorField out =
      endo_mult(expA, div) - endo_mult(exp2A, ctx.ric0_star) + identity_endo(*ctx.grid);
  return 0.5 * out;
}

TensorField metric_from_H(const FlatContext& ctx, const TensorField& H) {
  TensorField H2 = endo_mult(H, H);
  TensorField inv = TensorField::vector_valued(*ctx.grid, 1);
  for (Index p = 0; p < H.points(); ++p) inv.endo(p) = Mat(H2.endo(p)).inverse();
  return lower_endo(*ctx.grid, ctx.geo0.g, inv);
}

TensorField metric_from_A(const FlatContext& ctx, const TensorField& A) {
  return metric_of_coordinate(ctx, A);
}

TensorField H_from_A(const FlatContext& ctx, const TensorField& A) {
  return endo_exp_g(ctx.geo0.g, A);
}

TensorField A_from_metric(const FlatContext& ctx, const TensorField& g) {
  return (-0.5) * endo_log_g(ctx.geo0.g, endo_of(*ctx.grid, ctx.geo0.g, g));
}

namespace {

TensorField eval_rhs(const FlatContext& ctx, const TensorField& state, FlowRepr repr) {
  switch (repr) {
    case FlowRepr::Metric:
      return rhs_g(ctx, state);
    case FlowRepr::SquareRoot:
      return rhs_H(ctx, state);
    case FlowRepr::Log:
      return rhs_A(ctx, state);
  }
  throw std::logic_error("unreachable");
}

TensorField to_metric(const FlatContext& ctx, const TensorField& state, FlowRepr repr) {
  switch (repr) {
    case FlowRepr::Metric:
      return state;
    case FlowRepr::SquareRoot:
      return metric_from_H(ctx, state);
    case FlowRepr::Log:
      return metric_from_A(ctx, state);
  }
  throw std::logic_error("unreachable");
}

TensorField initial_state(const FlatContext& ctx, const TensorField& A0, FlowRepr repr) {
  switch (repr) {
    case FlowRepr::Metric:
      return metric_from_A(ctx, A0);
    case FlowRepr::SquareRoot:
      return H_from_A(ctx, A0);
    case FlowRepr::Log:
      return A0;
  }
  throw std::logic_error("unreachable");
}

bool positivity_ok(const FlatContext& ctx, const TensorField& state, FlowRepr repr) {
  if (repr == FlowRepr::Log) return true;  // exp coordinates are positive by construction
  return min_eigenvalue_g(ctx.geo0.g,
                          repr == FlowRepr::Metric ? endo_of(*ctx.grid, ctx.geo0.g, state) : state) >
         0.0;
}

DiagnosticsRecord make_record(const FlatContext& ctx, double t, const TensorField& g, int hp_max,
                              HeatSample* heat) {
  DiagnosticsRecord rec;
  rec.t = t;
  Geometry geo = make_geometry(*ctx.grid, g, ctx.geo0.accuracy);
  TensorField ric = bakry_emery_ricci(geo);
  TensorField gdot = ric - g;
  TensorField gdot_star = endo_of(*ctx.grid, g, gdot);
  TensorField n2 = pointwise_norm2_g(g, gdot);
  for (Index p = 0; p < g.points(); ++p)
    rec.sup_gdot = std::max(rec.sup_gdot, std::sqrt(std::max(0.0, n2.scalar_at(p))));
  rec.soliton_residual = rec.sup_gdot;  // identical by the evolution equation
  rec.min_ric_eigenvalue = min_eigenvalue_g(g, endo_of(*ctx.grid, g, ric));

  const double n = ctx.grid->dim();
  TensorField wint = trace_g(g, ric);
  for (Index p = 0; p < g.points(); ++p)
    wint.scalar_at(p) += -n + 2.0 * geo.f.scalar_at(p);
  rec.w_value = integrate_omega(wint);

  TensorField der = gdot_star;
  for (int p = 0; p <= std::min(hp_max, 3); ++p) {
    rec.hp_seminorm[p] = integrate_omega(pointwise_norm2_g(g, der));
    if (p == 1) rec.sup_nabla_gdot = sup_norm_g(g, der);
    if (p < std::min(hp_max, 3)) der = covariant_derivative(geo, der);
  }
  if (rec.sup_nabla_gdot == 0 && hp_max >= 1) {
    TensorField nd = covariant_derivative(geo, gdot_star);
    rec.sup_nabla_gdot = sup_norm_g(g, nd);
  }

  if (heat) {
    heat->t = t;
    heat->gdot_norm2 = n2;
    heat->lap_gdot_norm2 = laplacian_omega(geo, n2);
    TensorField ndot = covariant_derivative(geo, gdot_star);
    TensorField nd2 = pointwise_norm2_g(g, ndot);
    TensorField cube = endo_mult(endo_mult(gdot_star, gdot_star), gdot_star);
    TensorField expansion = TensorField::scalar(*ctx.grid);
    for (Index p = 0; p < g.points(); ++p)
      expansion.scalar_at(p) =
          -2.0 * nd2.scalar_at(p) - 4.0 * n2.scalar_at(p) - 4.0 * Mat(cube.endo(p)).trace();
    heat->expansion = expansion;
    heat->metric = g;
  }
  return rec;
}

}  // namespace

TensorField step(const FlatContext& ctx, const TensorField& state, FlowRepr repr, double dt,
                 IntegratorConfig::Scheme scheme) {
  if (scheme == IntegratorConfig::Scheme::Euler) {
    TensorField k1 = eval_rhs(ctx, state, repr);
    return state + dt * k1;
  }
  TensorField k1 = eval_rhs(ctx, state, repr);
  TensorField k2 = eval_rhs(ctx, state + (0.5 * dt) * k1, repr);
  TensorField k3 = eval_rhs(ctx, state + (0.5 * dt) * k2, repr);
  TensorField k4 = eval_rhs(ctx, state + dt * k3, repr);
  return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

FlowResult run_flow(const FlatContext& ctx, const TensorField& A0, FlowRepr repr,
                    const IntegratorConfig& config) {
  FlowResult out;
  out.repr = repr;
  const double hmin = ctx.grid->min_spacing();

  TensorField state = initial_state(ctx, A0, repr);
  double t = 0;
  long step_count = 0;

  auto record = [&](const TensorField& s) {
    HeatSample heat;
    DiagnosticsRecord rec = make_record(ctx, t, to_metric(ctx, s, repr), config.hp_max,
                                        config.collect_heat_samples ? &heat : nullptr);
    out.records.push_back(rec);
    if (config.collect_heat_samples) out.heat_samples.push_back(std::move(heat));
  };

  record(state);
  while (t < config.t_end - 1e-14) {
    // CFL guard against the stiffness of the current transfer endomorphism
    TensorField H = repr == FlowRepr::SquareRoot
                        ? state
                        : H_from_A(ctx, repr == FlowRepr::Log ? state : A_from_metric(ctx, state));
    double stiff = max_operator_norm_sq(ctx, H);
    double dt = std::min(config.dt, config.t_end - t);
    if (dt * stiff / (hmin * hmin) > config.cfl_guard) {
      out.status = FlowStatus::CflViolation;
      out.advisory_dt = config.cfl_guard * hmin * hmin / stiff;
      out.message = "time step exceeds the stability guard";
      break;
    }
    state = step(ctx, state, repr, dt, config.scheme);
    t += dt;
    ++step_count;
    if (!state.all_finite()) {
      out.status = FlowStatus::NonFinite;
      out.message = "non-finite value in evolving state";
      break;
    }
    if (!positivity_ok(ctx, state, repr)) {
      out.status = FlowStatus::PositivityLoss;
      out.message = "evolving metric lost positivity";
      break;
    }
    bool at_end = t >= config.t_end - 1e-14;
    if (step_count % config.diagnostics_stride == 0 || at_end) record(state);
    if (at_end) out.status = FlowStatus::ReachedEnd;
  }
  out.t_final = t;
  out.final_state = std::move(state);
  return out;
}

CrossCheckResult cross_check(const FlatContext& ctx, const TensorField& A0,
                             const IntegratorConfig& config) {
  // integrate the three representations in lockstep and compare the
  // reconstructed metrics at the shared record times
  CrossCheckResult out;
  TensorField sg = initial_state(ctx, A0, FlowRepr::Metric);
  TensorField sh = initial_state(ctx, A0, FlowRepr::SquareRoot);
  TensorField sa = initial_state(ctx, A0, FlowRepr::Log);
  double t = 0;
  long step_count = 0;
  auto push_row = [&]() {
    TensorField gg = sg;
    TensorField gh = metric_from_H(ctx, sh);
    TensorField ga = metric_from_A(ctx, sa);
    CrossCheckRow row{t, bulk_sup_norm_g(ctx.geo0.g, gg - gh),
                      bulk_sup_norm_g(ctx.geo0.g, gg - ga),
                      bulk_sup_norm_g(ctx.geo0.g, gh - ga)};
    out.max_drift = std::max({out.max_drift, row.drift_gH, row.drift_gA, row.drift_HA});
    out.rows.push_back(row);
  };
  push_row();
  while (t < config.t_end - 1e-14) {
    double dt = std::min(config.dt, config.t_end - t);
    sg = step(ctx, sg, FlowRepr::Metric, dt, config.scheme);
    sh = step(ctx, sh, FlowRepr::SquareRoot, dt, config.scheme);
    sa = step(ctx, sa, FlowRepr::Log, dt, config.scheme);
    t += dt;
    ++step_count;
    if (step_count % config.diagnostics_stride == 0 || t >= config.t_end - 1e-14) push_row();
  }
  return out;
}

HeatReport heat_diagnostics(const FlatContext& ctx, const FlowResult& result) {
  HeatReport rep;
  const auto& recs = result.records;
  if (recs.size() < 3) return rep;

  rep.delta = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) rep.delta = std::min(rep.delta, r.min_ric_eigenvalue);

  // heat identity: box |gdot|^2 = Delta^Omega |gdot|^2 + 2 d/dt |gdot|^2
  // against its on-flow expansion, interior records only
  const auto& hs = result.heat_samples;
  for (size_t i = 1; i + 1 < hs.size(); ++i) {
    double dtm = hs[i + 1].t - hs[i - 1].t;
    if (dtm <= 0) continue;
    TensorField ddt = (1.0 / dtm) * (hs[i + 1].gdot_norm2 - hs[i - 1].gdot_norm2);
    TensorField box = hs[i].lap_gdot_norm2 + 2.0 * ddt;
    rep.heat_identity_residual =
        std::max(rep.heat_identity_residual, (box - hs[i].expansion).max_abs());
  }

  // pointwise exponential decay bound with the measured delta
  double sup0 = recs.front().sup_gdot;
  rep.decay_bound_ok = true;
  rep.worst_decay_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : recs) {
    double bound = sup0 * std::exp(-0.5 * rep.delta * r.t) * (1 + 1e-2);
    rep.worst_decay_margin = std::min(rep.worst_decay_margin, bound - r.sup_gdot);
    if (r.sup_gdot > bound) rep.decay_bound_ok = false;
  }

  // monotonicity of the functional
  rep.w_monotone = true;
  rep.worst_w_increase = 0;
  for (size_t i = 1; i < recs.size(); ++i) {
    double inc = recs[i].w_value - recs[i - 1].w_value;
    rep.worst_w_increase = std::max(rep.worst_w_increase, inc);
    if (inc > 1e-8) rep.w_monotone = false;
  }

  // uniform metric sandwich with C = int sup|gdot| dt (trapezoid + tail)
  double C = 0;
  for (size_t i = 1; i < recs.size(); ++i)
    C += 0.5 * (recs[i].sup_gdot + recs[i - 1].sup_gdot) * (recs[i].t - recs[i - 1].t);
  if (rep.delta > 0) C += recs.back().sup_gdot * 2.0 / rep.delta;  // exponential tail
  rep.sandwich_constant = C;
  rep.sandwich_ok = true;
  if (!hs.empty()) {
    for (const auto& s : hs) {
      TensorField lift = endo_of(*ctx.grid, ctx.geo0.g, s.metric);
      double lo = min_eigenvalue_g(ctx.geo0.g, lift);
      double hi = -min_eigenvalue_g(ctx.geo0.g, -1.0 * lift);
      if (lo < std::exp(-C) - 1e-9 || hi > std::exp(C) + 1e-9) rep.sandwich_ok = false;
    }
  }
  return rep;
}

HpReport hp_monitor(const FlowResult& result, int p_max) {
  HpReport rep;
  const auto& recs = result.records;
  for (int p = 0; p <= std::min(p_max, 3); ++p) {
    // least-squares slope of log seminorm over time
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : recs)
      if (r.hp_seminorm[p] > 1e-24) pts.emplace_back(r.t, std::log(r.hp_seminorm[p]));
    if (pts.size() < recs.size() / 2 || pts.size() < 3) {
      rep.fitted[p] = false;
      continue;
    }
    double n = pts.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.theta[p] = -slope;
    rep.fitted[p] = true;
  }
  return rep;
}

}  // namespace solflow
