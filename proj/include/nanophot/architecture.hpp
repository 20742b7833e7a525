#pragma once

#include <vector>

#include "nanophot/device.hpp"

namespace nanophot {

// Size-N edge detector: 2^N XOR rows merged by a binary tree of MUX stages.
// Rows, stages and positions are 0-based in this API.
struct ArchitectureDesign {
  int n_stages = 3;
  double lambda_s1 = 1542.0;
  std::vector<double> wls;           // nm, one per stage
  double q_s_xor = 10000.0;
  std::vector<double> q_s_mux;       // one per stage
  double delta_lambda_xor = 0.14;    // nm
  double olp_input = 3.0;            // uW per input laser
  double olp_pump_xor = 0.0;         // uW per XOR pump laser
  std::vector<double> olp_pump_mux;  // uW per MUX pump laser, one per stage
  double il = 0.7943282347242815;    // 1 dB
  double er_mod = 0.1;               // 10 dB
  double responsivity = 1.0;         // A/W
  double noise = 1.1e-7;             // A
  double m = 2.0;
  double fsr = 24.0;
  double floor = 0.1;

  int rows() const { return 1 << n_stages; }
  // R/I expressed per uW of optical power.
  double kappa() const { return responsivity / noise * 1e-6; }
  // Structural checks; throws InvalidParameter.
  void validate() const;
  // Input lasers stay within 10% of every pump along the chain.
  bool power_rule_ok() const;
  double min_chain_pump() const;
  double total_laser_power() const;
  int laser_count() const;
};

struct SignalPlan {
  std::vector<double> lambda_s;
  std::vector<double> xor_res_1;
  std::vector<double> xor_res_2;
  std::vector<std::vector<double>> mux_res;  // [stage][position]
};

enum class GateKind { Xor, Mux };

// Register bit n of x.
inline int bit_of(int x, int n) { return (x >> n) & 1; }

std::vector<double> assign_signal_wavelengths(const ArchitectureDesign& d);
SignalPlan assign_xor_resonances(const ArchitectureDesign& d, SignalPlan plan);
SignalPlan assign_mux_resonances(const ArchitectureDesign& d, SignalPlan plan);
SignalPlan make_plan(const ArchitectureDesign& d);

// Pump power reaching a cavity for a stochastic bit (stage is ignored for XOR).
double pump_power_received(const ArchitectureDesign& d, GateKind kind, int stage, int bit);

// Select configuration that routes `row` through stages 0..n_stages-1.
std::vector<int> route_selects(int row, int n_stages);

// Transmission of row `row` through its XOR pair and its MUX at each of the first
// `stages` stages (all stages when stages < 0).
double chain_transmission(const ArchitectureDesign& d, const SignalPlan& plan,
                          const DetuningCalibration& calib, int row, int z1, int z2,
                          const std::vector<int>& selects, int stages = -1);

// Signal-to-crosstalk SNR of `row` at the output of stage `stages` (all when < 0).
double snr(const ArchitectureDesign& d, const SignalPlan& plan, const DetuningCalibration& calib,
           int row, int stages = -1);

double ber(double snr_value);

}  // namespace nanophot
