#include "nanophot/architecture.hpp"

#include <algorithm>
#include <cmath>

#include "nanophot/error.hpp"

namespace nanophot {

namespace {

Nanocavity cavity(const ArchitectureDesign& d, double rest, double q) {
  return Nanocavity{rest, d.fsr, q, d.m, d.floor};
}

}  // namespace

void ArchitectureDesign::validate() const {
  if (n_stages < 1 || n_stages > 16) throw InvalidParameter("n_stages must be in [1,16]");
  const auto n = static_cast<std::size_t>(n_stages);
  if (wls.size() != n || q_s_mux.size() != n || olp_pump_mux.size() != n)
    throw InvalidParameter("wls, q_s_mux and olp_pump_mux need one entry per stage");
  if (!(lambda_s1 > 0.0)) throw InvalidParameter("lambda_s1 must be positive");
  if (!(delta_lambda_xor > 0.0)) throw InvalidParameter("delta_lambda_xor must be positive");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(wls[k] > 0.0)) throw InvalidParameter("WLS must be positive");
    if (!(q_s_mux[k] > 0.0)) throw InvalidParameter("MUX Q must be positive");
    if (!(olp_pump_mux[k] >= 0.0)) throw InvalidParameter("MUX pump power must be non-negative");
    if (k > 0 && !(wls[k] > wls[k - 1])) throw InvalidParameter("WLS must increase with stage");
    if (k > 0 && !(q_s_mux[k] < q_s_mux[k - 1]))
      throw InvalidParameter("MUX Q must decrease with stage");
  }
  if (!(q_s_xor > 0.0)) throw InvalidParameter("XOR Q must be positive");
  if (!(olp_input >= 0.0) || !(olp_pump_xor >= 0.0))
    throw InvalidParameter("laser powers must be non-negative");
  if (!(il > 0.0 && il <= 1.0)) throw InvalidParameter("il must lie in (0,1]");
  if (!(er_mod > 0.0 && er_mod < 1.0)) throw InvalidParameter("er_mod must lie in (0,1)");
  if (!(responsivity > 0.0) || !(noise > 0.0))
    throw InvalidParameter("responsivity and noise must be positive");
  if (!(floor > 0.0 && floor < 1.0)) throw InvalidParameter("floor must lie in (0,1)");
  if (!(m > 0.0)) throw InvalidParameter("m must be positive");
  cavity(*this, lambda_s1, q_s_xor).validate();
  for (double q : q_s_mux) cavity(*this, lambda_s1, q).validate();
}

double ArchitectureDesign::min_chain_pump() const {
  // Both XOR pumps land on the same cavity pair.
  double p = 2.0 * olp_pump_xor;
  for (double x : olp_pump_mux) p = std::min(p, x);
  return p;
}

bool ArchitectureDesign::power_rule_ok() const { return olp_input <= 0.1 * min_chain_pump(); }

int ArchitectureDesign::laser_count() const {
  // inputs + two pumps per XOR + one pump per MUX
  return rows() + 2 * rows() + (rows() - 1);
}

double ArchitectureDesign::total_laser_power() const {
  double total = rows() * olp_input + 2.0 * rows() * olp_pump_xor;
  for (int n = 0; n < n_stages; ++n)
    total += (rows() >> (n + 1)) * olp_pump_mux[static_cast<std::size_t>(n)];
  return total;
}

std::vector<double> assign_signal_wavelengths(const ArchitectureDesign& d) {
  d.validate();
  std::vector<double> lambda(static_cast<std::size_t>(d.rows()));
  for (int i = 0; i < d.rows(); ++i) {
    double l = d.lambda_s1;
    for (int n = 0; n < d.n_stages; ++n) l -= bit_of(i, n) * d.wls[static_cast<std::size_t>(n)];
    lambda[static_cast<std::size_t>(i)] = l;
  }
  return lambda;
}

SignalPlan assign_xor_resonances(const ArchitectureDesign& d, SignalPlan plan) {
  if (plan.lambda_s.size() != static_cast<std::size_t>(d.rows()))
    throw InvalidState("signal wavelengths not assigned");
  plan.xor_res_1 = plan.lambda_s;
  plan.xor_res_2 = plan.lambda_s;
  for (auto& l : plan.xor_res_2) l += d.delta_lambda_xor;
  return plan;
}

SignalPlan assign_mux_resonances(const ArchitectureDesign& d, SignalPlan plan) {
  if (plan.lambda_s.size() != static_cast<std::size_t>(d.rows()))
    throw InvalidState("signal wavelengths not assigned");
  plan.mux_res.assign(static_cast<std::size_t>(d.n_stages), {});
  for (int n = 1; n <= d.n_stages; ++n) {
    const int block = 1 << n;
    auto& stage = plan.mux_res[static_cast<std::size_t>(n - 1)];
    for (int j = 0; j < d.rows() / block; ++j) {
      const double first = plan.lambda_s[static_cast<std::size_t>(block * j)];
      const double last = plan.lambda_s[static_cast<std::size_t>(block * j + block / 2 - 1)];
      stage.push_back(0.5 * (first + last));
    }
  }
  return plan;
}

SignalPlan make_plan(const ArchitectureDesign& d) {
  SignalPlan plan;
  plan.lambda_s = assign_signal_wavelengths(d);
  plan = assign_xor_resonances(d, std::move(plan));
  return assign_mux_resonances(d, std::move(plan));
}

double pump_power_received(const ArchitectureDesign& d, GateKind kind, int stage, int bit) {
  if (bit != 0 && bit != 1) throw InvalidParameter("stochastic bit must be 0 or 1");
  double olp = d.olp_pump_xor;
  if (kind == GateKind::Mux) {
    if (stage < 0 || stage >= static_cast<int>(d.olp_pump_mux.size()))
      throw InvalidParameter("stage out of range");
    olp = d.olp_pump_mux[static_cast<std::size_t>(stage)];
  }
  return bit ? olp * d.il : olp * d.il * d.er_mod;
}

std::vector<int> route_selects(int row, int n_stages) {
  std::vector<int> s(static_cast<std::size_t>(n_stages));
  // Select 1 shifts the resonance onto the second set and passes the first.
  for (int n = 0; n < n_stages; ++n) s[static_cast<std::size_t>(n)] = bit_of(row, n) ? 0 : 1;
  return s;
}

double chain_transmission(const ArchitectureDesign& d, const SignalPlan& plan,
                          const DetuningCalibration& calib, int row, int z1, int z2,
                          const std::vector<int>& selects, int stages) {
  if (stages < 0) stages = d.n_stages;
  if (row < 0 || row >= d.rows()) throw InvalidParameter("row out of range");
  if (stages > d.n_stages || static_cast<int>(selects.size()) < stages)
    throw InvalidParameter("select vector shorter than the traversed stages");
  const auto r = static_cast<std::size_t>(row);
  const double lambda = plan.lambda_s[r];

  const Nanocavity x1 = cavity(d, plan.xor_res_1[r], d.q_s_xor);
  const Nanocavity x2 = cavity(d, plan.xor_res_2[r], d.q_s_xor);
  const double pump = pump_power_received(d, GateKind::Xor, 0, z1) +
                      pump_power_received(d, GateKind::Xor, 0, z2);
  const double dx = detuning(x1, calib, pump);
  double t = through_transmission(x1, lambda, dx) * through_transmission(x2, lambda, dx);

  for (int n = 0; n < stages; ++n) {
    const auto sn = static_cast<std::size_t>(n);
    const auto j = static_cast<std::size_t>(row >> (n + 1));
    const Nanocavity mc = cavity(d, plan.mux_res[sn][j], d.q_s_mux[sn]);
    const double dm = detuning(mc, calib, pump_power_received(d, GateKind::Mux, n, selects[sn]));
    t *= through_transmission(mc, lambda, dm);
  }
  return t;
}

double snr(const ArchitectureDesign& d, const SignalPlan& plan, const DetuningCalibration& calib,
           int row, int stages) {
  if (stages < 0) stages = d.n_stages;
  const auto sel = route_selects(row, d.n_stages);
  const double own = chain_transmission(d, plan, calib, row, 0, 1, sel, stages);
  // Crosstalk from every other row merged into the same output, each driven '1'.
  const int block = 1 << stages;
  const int base = (row / block) * block;
  double cross = 0.0;
  for (int k = base; k < base + block; ++k)
    if (k != row) cross += chain_transmission(d, plan, calib, k, 0, 1, sel, stages);
  return d.olp_input * d.kappa() * (own - cross);
}

double ber(double snr_value) { return 0.5 * std::erfc(snr_value / (2.0 * std::sqrt(2.0))); }

}  // namespace nanophot
