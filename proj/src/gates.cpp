#include "nanophot/gates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nanophot/error.hpp"

namespace nanophot {

namespace {

constexpr double kOperatingPointTolerance = 0.05;
constexpr double kLinearityTolerance = 0.10;

void check_bit(int b) {
  if (b != 0 && b != 1) throw InvalidParameter("logical inputs must be 0 or 1");
}

}  // namespace

void NotGate::validate() const {
  cavity.validate();
  if (!(pump_power_high >= 0.0)) throw InvalidParameter("NOT pump power must be non-negative");
  if (std::abs(cavity.lambda_s_rest - signal_wavelength) < design_detuning - 1e-9)
    throw InvalidParameter("NOT rest resonance closer to the signal than the design detuning");
}

NotGate make_not_gate(const DetuningCalibration& calib, double signal_wavelength, double q_s,
                      double design_detuning, double m, double fsr, double floor) {
  if (!(design_detuning > 0.0)) throw InvalidParameter("NOT design detuning must be positive");
  NotGate g;
  g.cavity = make_cavity(signal_wavelength + design_detuning, q_s, m, fsr, floor);
  g.signal_wavelength = signal_wavelength;
  g.design_detuning = design_detuning;
  g.pump_power_high = pump_for_detuning(g.cavity, calib, design_detuning);
  if (!std::isfinite(g.pump_power_high))
    throw MiscalibratedGate("NOT detuning beyond saturation for this Q");
  g.validate();
  return g;
}

double not_transmission(const NotGate& g, const DetuningCalibration& calib, int input_bit) {
  check_bit(input_bit);
  const double det = input_bit ? detuning(g.cavity, calib, g.pump_power_high) : 0.0;
  return through_transmission(g.cavity, g.signal_wavelength, det);
}

void XorGate::validate(const DetuningCalibration& calib) const {
  cavity1.validate();
  cavity2.validate();
  if (cavity1.q_s != cavity2.q_s) throw InvalidParameter("XOR cavities must share q_s");
  if (!(delta_lambda_xor > 0.0)) throw InvalidParameter("delta_lambda_xor must be positive");
  if (std::abs(cavity2.lambda_s_rest - cavity1.lambda_s_rest - delta_lambda_xor) > 1e-9)
    throw InvalidParameter("XOR resonances must be split by delta_lambda_xor");
  if (std::abs(cavity1.lambda_s_rest - signal_wavelength) > 1e-9)
    throw InvalidParameter("first XOR resonance must sit on the signal");
  if (!(il > 0.0 && il <= 1.0)) throw InvalidParameter("il must lie in (0,1]");
  const double d2 = detuning(cavity1, calib, 2.0 * pump_power_high * il);
  if (std::abs(d2 - delta_lambda_xor) > kOperatingPointTolerance * delta_lambda_xor)
    throw MiscalibratedGate("XOR pump does not shift the pair by delta_lambda_xor");
}

XorGate make_xor_gate(const DetuningCalibration& calib, double signal_wavelength, double q_s,
                      double delta_lambda_xor, double m, double fsr, double floor, double il) {
  if (!(delta_lambda_xor > 0.0)) throw InvalidParameter("delta_lambda_xor must be positive");
  if (!(il > 0.0 && il <= 1.0)) throw InvalidParameter("il must lie in (0,1]");
  XorGate g;
  g.cavity1 = make_cavity(signal_wavelength, q_s, m, fsr, floor);
  g.cavity2 = make_cavity(signal_wavelength + delta_lambda_xor, q_s, m, fsr, floor);
  g.delta_lambda_xor = delta_lambda_xor;
  g.signal_wavelength = signal_wavelength;
  g.il = il;
  const double total = pump_for_detuning(g.cavity1, calib, delta_lambda_xor);
  if (!std::isfinite(total)) throw MiscalibratedGate("XOR split beyond saturation for this Q");
  g.pump_power_high = total / (2.0 * il);
  const double d1 = detuning(g.cavity1, calib, 0.5 * total);
  g.linear_pumping = std::abs(d1 - 0.5 * delta_lambda_xor) <=
                     kLinearityTolerance * 0.5 * delta_lambda_xor;
  g.validate(calib);
  return g;
}

double xor_transmission_at(const XorGate& g, const DetuningCalibration& calib, double total_uw) {
  const double det = detuning(g.cavity1, calib, total_uw);
  return through_transmission(g.cavity1, g.signal_wavelength, det) *
         through_transmission(g.cavity2, g.signal_wavelength, det);
}

double xor_transmission(const XorGate& g, const DetuningCalibration& calib, int in1, int in2) {
  check_bit(in1);
  check_bit(in2);
  return xor_transmission_at(g, calib, (in1 + in2) * g.pump_power_high * g.il);
}

void MuxGate::validate(const DetuningCalibration& calib) const {
  cavity.validate();
  if (!(shift > 0.0)) throw InvalidParameter("MUX shift must be positive");
  const double d = detuning(cavity, calib, pump_power_high);
  if (std::abs(d - shift) > kOperatingPointTolerance * shift)
    throw MiscalibratedGate("MUX pump does not shift the resonance by the set spacing");
}

MuxGate make_mux_gate(const DetuningCalibration& calib, double lambda_rest, double q_s,
                      double shift, double m, double fsr, double floor) {
  if (!(shift > 0.0)) throw InvalidParameter("MUX shift must be positive");
  MuxGate g;
  g.cavity = make_cavity(lambda_rest, q_s, m, fsr, floor);
  g.shift = shift;
  g.pump_power_high = pump_for_detuning(g.cavity, calib, shift);
  if (!std::isfinite(g.pump_power_high))
    throw MiscalibratedGate("MUX shift beyond saturation for this Q");
  g.validate(calib);
  return g;
}

double mux_transmission(const MuxGate& g, const DetuningCalibration& calib, int sel,
                        double lambda) {
  check_bit(sel);
  const double det = sel ? detuning(g.cavity, calib, g.pump_power_high) : 0.0;
  return through_transmission(g.cavity, lambda, det);
}

double gate_extinction_ratio(double t_high, double t_low) {
  if (t_low == 0.0) return std::numeric_limits<double>::infinity();
  if (!(t_low > 0.0 && t_low <= 1.0 && t_high > 0.0 && t_high <= 1.0))
    throw InvalidParameter("transmissions must lie in (0,1]");
  if (t_high < t_low) throw InvalidParameter("t_high must not be below t_low");
  return 10.0 * std::log10(t_high / t_low);
}

TruthTable make_truth_table(std::vector<double> transmission, std::vector<int> expected) {
  if (transmission.size() != expected.size() || transmission.empty())
    throw LengthMismatch("truth table sizes differ");
  TruthTable t;
  double min_high = std::numeric_limits<double>::infinity();
  double max_low = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < transmission.size(); ++k) {
    if (expected[k])
      min_high = std::min(min_high, transmission[k]);
    else
      max_low = std::max(max_low, transmission[k]);
  }
  t.transmission = std::move(transmission);
  t.expected = std::move(expected);
  if (!std::isfinite(min_high) || !std::isfinite(max_low)) {
    t.consistent = false;
    return t;
  }
  t.threshold = 0.5 * (min_high + max_low);
  t.consistent = min_high > max_low;
  t.er_db = max_low > 0.0 ? 10.0 * std::log10(min_high / max_low)
                          : std::numeric_limits<double>::infinity();
  return t;
}

TruthTable not_truth_table(const NotGate& g, const DetuningCalibration& calib) {
  return make_truth_table({not_transmission(g, calib, 0), not_transmission(g, calib, 1)}, {1, 0});
}

TruthTable xor_truth_table(const XorGate& g, const DetuningCalibration& calib) {
  std::vector<double> t;
  std::vector<int> e;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      t.push_back(xor_transmission(g, calib, a, b));
      e.push_back(a ^ b);
    }
  return make_truth_table(std::move(t), std::move(e));
}

TruthTable mux_truth_table(const MuxGate& g, const DetuningCalibration& calib) {
  const double l1 = g.cavity.lambda_s_rest;
  const double l2 = g.cavity.lambda_s_rest - g.shift;
  std::vector<double> t;
  std::vector<int> e;
  for (int sel = 0; sel < 2; ++sel)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        t.push_back(a * mux_transmission(g, calib, sel, l1) +
                    b * mux_transmission(g, calib, sel, l2));
        e.push_back(sel ? a : b);
      }
  return make_truth_table(std::move(t), std::move(e));
}

}  // namespace nanophot
