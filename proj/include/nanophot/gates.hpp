#pragma once

#include <vector>

#include "nanophot/device.hpp"

namespace nanophot {

// Pump powers in this module are the powers reaching the cavity (uW).

struct NotGate {
  Nanocavity cavity;
  double pump_power_high = 0.0;
  double signal_wavelength = 1542.0;
  double design_detuning = 0.0;

  void validate() const;
};

// Rest resonance placed design_detuning above the signal; pump sized to pull it back.
NotGate make_not_gate(const DetuningCalibration& calib, double signal_wavelength, double q_s,
                      double design_detuning, double m = 2.0, double fsr = 24.0,
                      double floor = 0.1);

double not_transmission(const NotGate& g, const DetuningCalibration& calib, int input_bit);

struct XorGate {
  Nanocavity cavity1;
  Nanocavity cavity2;
  double delta_lambda_xor = 0.0;
  double pump_power_high = 0.0;  // per pump input, as emitted by the laser
  double il = 1.0;               // fraction of pump power reaching the cavities
  double signal_wavelength = 1542.0;
  bool linear_pumping = true;    // one pump gives about half the two-pump shift

  void validate(const DetuningCalibration& calib) const;
};

XorGate make_xor_gate(const DetuningCalibration& calib, double signal_wavelength, double q_s,
                      double delta_lambda_xor, double m = 2.0, double fsr = 24.0,
                      double floor = 0.1, double il = 1.0);

// Transmission at the signal with an arbitrary total pump power on both cavities.
double xor_transmission_at(const XorGate& g, const DetuningCalibration& calib, double total_uw);
double xor_transmission(const XorGate& g, const DetuningCalibration& calib, int in1, int in2);

struct MuxGate {
  Nanocavity cavity;
  double shift = 0.0;
  double pump_power_high = 0.0;

  void validate(const DetuningCalibration& calib) const;
};

MuxGate make_mux_gate(const DetuningCalibration& calib, double lambda_rest, double q_s,
                      double shift, double m = 2.0, double fsr = 24.0, double floor = 0.1);

double mux_transmission(const MuxGate& g, const DetuningCalibration& calib, int sel,
                        double lambda);

// +inf when t_low is zero.
double gate_extinction_ratio(double t_high, double t_low);

struct TruthTable {
  std::vector<double> transmission;  // one entry per input combination
  std::vector<int> expected;         // Boolean function value for that combination
  double threshold = 0.0;            // midpoint of min-high and max-low
  double er_db = 0.0;                // min-high over max-low
  bool consistent = false;           // every combination lands on the right side
};

TruthTable make_truth_table(std::vector<double> transmission, std::vector<int> expected);
TruthTable not_truth_table(const NotGate& g, const DetuningCalibration& calib);
TruthTable xor_truth_table(const XorGate& g, const DetuningCalibration& calib);
// Combinations ordered (sel, in1, in2) as binary 000..111; In1 sits on the rest
// resonance, In2 one shift below it; received power is the sum of both.
TruthTable mux_truth_table(const MuxGate& g, const DetuningCalibration& calib);

}  // namespace nanophot
