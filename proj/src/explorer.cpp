#include "nanophot/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nanophot/error.hpp"
#include "nanophot/gates.hpp"
#include "nanophot/parallel.hpp"

namespace nanophot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Nanocavity ctx_cavity(const ExplorerContext& ctx, double rest, double q) {
  return Nanocavity{rest, ctx.fsr, q, ctx.m, ctx.floor};
}

ExplorerContext context_of(const ArchitectureDesign& d) {
  ExplorerContext c;
  c.lambda_s = d.lambda_s1;
  c.m = d.m;
  c.fsr = d.fsr;
  c.floor = d.floor;
  c.il = d.il;
  c.er_mod = d.er_mod;
  c.kappa = d.kappa();
  return c;
}

// Lexicographic preference: smaller key, then higher Q, then smaller x.
bool better(double key_a, const SweepCell& a, double key_b, const SweepCell& b) {
  if (key_a != key_b) return key_a < key_b;
  if (a.q != b.q) return a.q > b.q;
  return a.x < b.x;
}

template <class Pred, class Key>
std::optional<std::size_t> pick(const SweepTable& t, Pred ok, Key key) {
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < t.cells.size(); ++k) {
    const auto& c = t.cells[k];
    if (!ok(c)) continue;
    if (!best || better(key(c), c, key(t.cells[*best]), t.cells[*best])) best = k;
  }
  return best;
}

}  // namespace

double snr_for_ber(double target_ber) {
  if (target_ber >= 0.5) return 0.0;
  if (!(target_ber > 0.0)) return kInf;
  double lo = 0.0, hi = 1.0;
  while (ber(hi) > target_ber) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ber(mid) > target_ber ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double calibrate_kappa(const DetuningCalibration& calib, const NoiseAnchor& a) {
  const NotGate g =
      make_not_gate(calib, a.lambda_s, a.q_s, a.design_detuning, a.m, a.fsr, a.floor);
  const double dt = not_transmission(g, calib, 0) - not_transmission(g, calib, 1);
  if (!(dt > 0.0) || !(a.olp_input > 0.0))
    throw InvalidParameter("noise anchor has no extinction to calibrate against");
  return snr_for_ber(a.ber) / (a.olp_input * dt);
}

NotPowerPoint not_power_point(const DetuningCalibration& calib, double kappa,
                              const NoiseAnchor& gate, double design_detuning,
                              double target_ber) {
  NotPowerPoint p;
  p.detuning = design_detuning;
  const Nanocavity cav{gate.lambda_s + design_detuning, gate.fsr, gate.q_s, gate.m, gate.floor};
  p.olp_p = pump_for_detuning(cav, calib, design_detuning);
  if (!std::isfinite(p.olp_p)) {
    p.olp_input = kInf;
    return p;
  }
  const double t0 = through_transmission(cav, gate.lambda_s, 0.0);
  const double t1 = through_transmission(cav, gate.lambda_s, detuning(cav, calib, p.olp_p));
  const double dt = t0 - t1;
  p.olp_input = dt > 0.0 ? snr_for_ber(target_ber) / (kappa * dt) : kInf;
  p.valid = p.olp_input <= 0.1 * p.olp_p;
  return p;
}

std::optional<double> not_valid_onset(const DetuningCalibration& calib, double kappa,
                                      const NoiseAnchor& gate, double target_ber, double step) {
  if (!(step > 0.0)) throw InvalidParameter("step must be positive");
  const Nanocavity cav{gate.lambda_s, gate.fsr, gate.q_s, gate.m, gate.floor};
  const double sat = max_detuning(cav, calib);
  for (int k = 1; k * step < sat; ++k) {
    const double dl = k * step;
    if (not_power_point(calib, kappa, gate, dl, target_ber).valid) return dl;
  }
  return std::nullopt;
}

double Range::at(int k) const {
  if (steps == 1) return min;
  return min + (max - min) * static_cast<double>(k) / static_cast<double>(steps - 1);
}

void Range::validate() const {
  if (steps == 1 && min == max) return;  // single-cell grid
  if (!(min < max)) throw InvalidParameter("range needs min < max");
  if (steps < 2) throw InvalidParameter("range needs at least 2 steps");
}

std::optional<std::size_t> best_valid_by_power(const SweepTable& t) {
  return pick(
      t, [](const SweepCell& c) { return c.valid && std::isfinite(c.total_uw); },
      [](const SweepCell& c) { return c.total_uw; });
}

double xor_pump_power(const DetuningCalibration& calib, const ExplorerContext& ctx, double q_s,
                      double delta) {
  const Nanocavity cav = ctx_cavity(ctx, ctx.lambda_s, q_s);
  return pump_for_detuning(cav, calib, delta) / (2.0 * ctx.il);
}

SweepTable explore_xor(const SweepGrid& grid, const DetuningCalibration& calib,
                       const ExplorerContext& ctx) {
  grid.q.validate();
  grid.x.validate();
  SweepTable t;
  t.nq = grid.q.steps;
  t.nx = grid.x.steps;
  t.cells.resize(static_cast<std::size_t>(t.nq) * static_cast<std::size_t>(t.nx));
  const double s_req = snr_for_ber(grid.target_ber);

  parallel_for(t.cells.size(), [&](std::size_t idx) {
    SweepCell& c = t.cells[idx];
    c.q = grid.q.at(static_cast<int>(idx / static_cast<std::size_t>(t.nx)));
    c.x = grid.x.at(static_cast<int>(idx % static_cast<std::size_t>(t.nx)));
    c.total_uw = c.olp_p_uw = c.olp_in_uw = kInf;
    XorGate g;
    g.cavity1 = ctx_cavity(ctx, ctx.lambda_s, c.q);
    g.cavity2 = ctx_cavity(ctx, ctx.lambda_s + c.x, c.q);
    if (!(c.x > 0.0) || !g.cavity1.is_valid() || !g.cavity2.is_valid()) return;
    const double received = pump_for_detuning(g.cavity1, calib, c.x);
    if (!std::isfinite(received)) return;
    c.reachable = true;
    g.delta_lambda_xor = c.x;
    g.signal_wavelength = ctx.lambda_s;
    const double pr = 0.5 * received;  // per pump, bit '1'
    c.olp_p_uw = pr / ctx.il;
    const double t00 = xor_transmission_at(g, calib, 2.0 * ctx.er_mod * pr);
    const double t01 = xor_transmission_at(g, calib, pr * (1.0 + ctx.er_mod));
    const double t11 = xor_transmission_at(g, calib, 2.0 * pr);
    const double dt = t01 - std::max(t00, t11);
    if (!(dt > 0.0)) return;
    c.olp_in_uw = s_req / (ctx.kappa * dt);
    c.total_uw = 2.0 * c.olp_p_uw + c.olp_in_uw;
    c.ber = ber(c.olp_in_uw * ctx.kappa * dt);
    c.valid = c.olp_in_uw <= 0.1 * 2.0 * c.olp_p_uw;
  });
  return t;
}

double mux_pump_power(const ArchitectureDesign& d, const DetuningCalibration& calib, int stage) {
  const auto s = static_cast<std::size_t>(stage);
  // Rest resonance of the first MUX of this stage: mean of its first signal set.
  double spread = 0.0;
  for (std::size_t n = 0; n < s; ++n) spread += d.wls[n];
  const Nanocavity cav{d.lambda_s1 - 0.5 * spread, d.fsr, d.q_s_mux[s], d.m, d.floor};
  return pump_for_detuning(cav, calib, d.wls[s]) / d.il;
}

SweepTable explore_mux_stage(const ArchitectureDesign& so_far, int stage, const SweepGrid& grid,
                             const DetuningCalibration& calib) {
  grid.q.validate();
  grid.x.validate();
  if (stage < 0) throw InvalidParameter("stage must be non-negative");
  const auto s = static_cast<std::size_t>(stage);
  if (so_far.wls.size() < s || so_far.q_s_mux.size() < s || so_far.olp_pump_mux.size() < s)
    throw InvalidState("earlier stages are not fixed");
  const ExplorerContext ctx = context_of(so_far);

  SweepTable t;
  t.nq = grid.q.steps;
  t.nx = grid.x.steps;
  t.cells.resize(static_cast<std::size_t>(t.nq) * static_cast<std::size_t>(t.nx));
  parallel_for(t.cells.size(), [&](std::size_t idx) {
    SweepCell& c = t.cells[idx];
    c.q = grid.q.at(static_cast<int>(idx / static_cast<std::size_t>(t.nx)));
    c.x = grid.x.at(static_cast<int>(idx % static_cast<std::size_t>(t.nx)));
    c.total_uw = c.olp_p_uw = kInf;
    c.olp_in_uw = so_far.olp_input;
    if (!(c.x > 0.0)) return;
    if (stage > 0 && !(c.x > so_far.wls[s - 1] && c.q < so_far.q_s_mux[s - 1])) return;

    ArchitectureDesign d = so_far;
    d.n_stages = stage + 1;
    d.wls.resize(s + 1);
    d.q_s_mux.resize(s + 1);
    d.olp_pump_mux.resize(s + 1);
    d.wls[s] = c.x;
    d.q_s_mux[s] = c.q;
    if (stage == 0) {
      d.q_s_xor = c.q;
      if (!ctx_cavity(ctx, d.lambda_s1, c.q).is_valid()) return;
      d.olp_pump_xor = xor_pump_power(calib, ctx, c.q, d.delta_lambda_xor);
      if (!std::isfinite(d.olp_pump_xor)) return;
    }
    if (!ctx_cavity(ctx, d.lambda_s1, c.q).is_valid()) return;
    d.olp_pump_mux[s] = mux_pump_power(d, calib, stage);
    if (!std::isfinite(d.olp_pump_mux[s])) return;
    SignalPlan plan;
    try {
      plan = make_plan(d);
    } catch (const InvalidParameter&) {
      return;
    }
    c.reachable = true;
    c.olp_p_uw = d.olp_pump_mux[s];
    c.total_uw = d.total_laser_power();
    c.ber = ber(snr(d, plan, calib, 0, stage + 1));
    c.valid = d.power_rule_ok();
  });
  return t;
}

std::pair<double, double> energy_per_pixel(const DesignPoint& p, int bsl) {
  if (bsl < 0) throw InvalidParameter("bsl must be non-negative");
  // 1 ns bit slots; 20% wall-plug efficiency.
  const double time_ns = static_cast<double>(bsl);
  const double energy_nj = static_cast<double>(bsl) * p.total_laser_power_uw * 1e-6 / 0.2;
  return {energy_nj, time_ns};
}

ArchitectureDesign size_pumps(ArchitectureDesign d, const DetuningCalibration& calib) {
  d.olp_pump_mux.resize(d.wls.size());
  d.validate();
  d.olp_pump_xor = xor_pump_power(calib, context_of(d), d.q_s_xor, d.delta_lambda_xor);
  if (!std::isfinite(d.olp_pump_xor))
    throw MiscalibratedGate("XOR split beyond saturation for its Q");
  for (int n = 0; n < d.n_stages; ++n) {
    d.olp_pump_mux[static_cast<std::size_t>(n)] = mux_pump_power(d, calib, n);
    if (!std::isfinite(d.olp_pump_mux[static_cast<std::size_t>(n)]))
      throw MiscalibratedGate("MUX stage " + std::to_string(n + 1) +
                              " spacing beyond saturation for its Q");
  }
  return d;
}

DesignPoint evaluate_design(ArchitectureDesign d, const DetuningCalibration& calib, int bsl) {
  DesignPoint p;
  p.design = size_pumps(std::move(d), calib);
  const SignalPlan plan = make_plan(p.design);
  for (int n = 1; n <= p.design.n_stages; ++n)
    p.stage_ber.push_back(ber(snr(p.design, plan, calib, 0, n)));
  p.total_laser_power_uw = p.design.total_laser_power();
  p.valid = p.design.power_rule_ok();
  p.bsl = bsl;
  std::tie(p.energy_per_pixel_nj, p.time_per_pixel_ns) = energy_per_pixel(p, bsl);
  return p;
}

namespace {

ArchitectureDesign reference(double kappa, double q_xor, std::vector<double> q_mux,
                             std::vector<double> wls, double olp_input) {
  ArchitectureDesign d;
  d.n_stages = static_cast<int>(wls.size());
  d.q_s_xor = q_xor;
  d.q_s_mux = std::move(q_mux);
  d.wls = std::move(wls);
  d.olp_pump_mux.assign(d.wls.size(), 0.0);
  d.delta_lambda_xor = 0.14;
  d.olp_input = olp_input;
  d.noise = d.responsivity * 1e-6 / kappa;
  return d;
}

}  // namespace

ArchitectureDesign reference_design_a(double kappa) {
  return reference(kappa, 10000.0, {10000.0, 1900.0, 500.0}, {0.215, 1.19, 4.35}, 3.0);
}

ArchitectureDesign reference_design_b(double kappa) {
  return reference(kappa, 7700.0, {7700.0, 1600.0, 200.0}, {0.275, 1.41, 11.3}, 4.0);
}

std::vector<SweepGrid> default_stage_grids(int n_stages) {
  std::vector<SweepGrid> g;
  for (int n = 0; n < n_stages; ++n) {
    if (n == 0)
      g.push_back({{1.0, 10000.0, 100}, {0.0, 1.2, 100}, 0.1});
    else if (n == n_stages - 1 && n_stages >= 3)
      g.push_back({{1.0, 1000.0, 100}, {3.0, 12.0, 100}, 0.1});
    else
      g.push_back({{1.0, 10000.0, 100}, {0.0, 1.6, 100}, 0.1});
  }
  return g;
}

FlowResult run_design_flow(const FlowInputs& in, const DetuningCalibration& calib) {
  if (in.n_stages < 1) throw InvalidParameter("n_stages must be at least 1");
  if (!(in.kappa > 0.0)) throw InvalidParameter("kappa must be positive");
  FlowResult r;
  r.degenerate_target = in.target_ber >= 0.5;
  if (r.degenerate_target)
    r.diagnostics.push_back("target BER >= 0.5 carries no information; trivially achieved");

  ExplorerContext ctx;
  ctx.lambda_s = in.lambda_s1;
  ctx.m = in.m;
  ctx.fsr = in.fsr;
  ctx.floor = in.floor;
  ctx.il = in.il;
  ctx.er_mod = in.er_mod;
  ctx.kappa = in.kappa;

  SweepGrid xg = in.xor_grid;
  xg.target_ber = in.xor_target_ber;
  r.xor_table = explore_xor(xg, calib, ctx);
  // The chain runs at the given input power, so the XOR cell must reach its BER target
  // with that input and keep it under 10% of the pump pair.
  auto xbest = pick(
      r.xor_table,
      [&](const SweepCell& c) {
        return c.reachable && c.olp_in_uw <= in.olp_input && in.olp_input <= 0.2 * c.olp_p_uw;
      },
      [](const SweepCell& c) { return c.olp_p_uw; });
  if (!xbest) {
    r.diagnostics.push_back("no XOR cell works at the given input power; using the sweep optimum");
    xbest = best_valid_by_power(r.xor_table);
  }
  if (!xbest) {
    r.diagnostics.push_back("no valid XOR cell; using the lowest-power reachable one");
    xbest = pick(
        r.xor_table, [](const SweepCell& c) { return std::isfinite(c.total_uw); },
        [](const SweepCell& c) { return c.total_uw; });
  }
  if (!xbest) {
    r.failing_stage = 0;
    r.diagnostics.push_back("XOR design space is empty");
    return r;
  }

  ArchitectureDesign d;
  d.n_stages = 0;
  d.lambda_s1 = in.lambda_s1;
  d.m = in.m;
  d.fsr = in.fsr;
  d.floor = in.floor;
  d.il = in.il;
  d.er_mod = in.er_mod;
  d.olp_input = in.olp_input;
  d.noise = d.responsivity * 1e-6 / in.kappa;
  d.q_s_xor = r.xor_table.cells[*xbest].q;
  d.delta_lambda_xor = r.xor_table.cells[*xbest].x;
  d.olp_pump_xor = r.xor_table.cells[*xbest].olp_p_uw;

  const auto grids = in.stage_grids.empty() ? default_stage_grids(in.n_stages) : in.stage_grids;
  if (static_cast<int>(grids.size()) != in.n_stages)
    throw InvalidParameter("one sweep grid per stage is required");

  double first_ber = 0.5;
  for (int s = 0; s < in.n_stages; ++s) {
    r.stage_tables.push_back(explore_mux_stage(d, s, grids[static_cast<std::size_t>(s)], calib));
    const SweepTable& t = r.stage_tables.back();
    const bool last = s == in.n_stages - 1;
    auto reachable = [](const SweepCell& c) { return c.reachable; };
    std::optional<std::size_t> choice;
    if (s == 0 && !last) {
      // First stage: lowest BER, preferring cells that respect the power rule.
      choice = pick(
          t, [](const SweepCell& c) { return c.reachable && c.valid; },
          [](const SweepCell& c) { return c.ber; });
      if (!choice) choice = pick(t, reachable, [](const SweepCell& c) { return c.ber; });
    } else {
      // Later stages: cheapest pump meeting the stage target. Intermediate targets are
      // log-spaced between the first-stage BER and the final target.
      double target = in.target_ber;
      if (!last) {
        const double a = std::log(std::max(first_ber, 1e-300));
        const double b = std::log(std::min(in.target_ber, 0.5));
        target = std::exp(a + (b - a) * s / (in.n_stages - 1));
      }
      choice = pick(
          t, [&](const SweepCell& c) { return c.reachable && c.valid && c.ber <= target; },
          [](const SweepCell& c) { return c.olp_p_uw; });
      if (!choice) {
        r.failing_stage = s;
        r.diagnostics.push_back("stage " + std::to_string(s + 1) +
                                ": no valid cell meets the BER target; using the lowest BER");
        choice = pick(t, reachable, [](const SweepCell& c) { return c.ber; });
      }
    }
    if (!choice) {
      r.failing_stage = s;
      r.diagnostics.push_back("stage " + std::to_string(s + 1) + ": no reachable cell");
      break;
    }
    const SweepCell& c = t.cells[*choice];
    if (s == 0) {
      first_ber = c.ber;
      d.q_s_xor = c.q;
      d.olp_pump_xor = xor_pump_power(calib, ctx, c.q, d.delta_lambda_xor);
    }
    d.n_stages = s + 1;
    d.wls.push_back(c.x);
    d.q_s_mux.push_back(c.q);
    d.olp_pump_mux.push_back(c.olp_p_uw);
  }

  if (d.n_stages == in.n_stages) {
    r.point = evaluate_design(d, calib, in.bsl);
    if (!r.point.valid) r.diagnostics.push_back("chosen design violates the 10% power rule");
  } else {
    r.point.design = d;
    r.point.bsl = in.bsl;
  }
  return r;
}

}  // namespace nanophot
