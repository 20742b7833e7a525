#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nanophot/architecture.hpp"
#include "nanophot/device.hpp"

namespace nanophot {

// SNR needed for a given BER; 0 for ber >= 0.5.
double snr_for_ber(double target_ber);

// Single-point noise calibration against a NOT gate operating point.
struct NoiseAnchor {
  double q_s = 2000.0;
  double m = 2.0;
  double lambda_s = 1542.0;
  double fsr = 24.0;
  double floor = 0.1;
  double design_detuning = 0.35;  // nm
  double olp_input = 0.7;         // uW
  double ber = 0.1;
};

// kappa = R/I per uW such that the anchor input power gives exactly the anchor BER.
double calibrate_kappa(const DetuningCalibration& calib, const NoiseAnchor& anchor = {});

struct NotPowerPoint {
  double detuning = 0.0;
  double olp_p = 0.0;
  double olp_input = 0.0;
  bool valid = false;  // input within 10% of the pump
};

NotPowerPoint not_power_point(const DetuningCalibration& calib, double kappa,
                              const NoiseAnchor& gate, double design_detuning,
                              double target_ber);

// Smallest design detuning (scanned in `step` nm) from which the NOT gate is valid.
std::optional<double> not_valid_onset(const DetuningCalibration& calib, double kappa,
                                      const NoiseAnchor& gate, double target_ber,
                                      double step = 0.001);

struct Range {
  double min = 0.0;
  double max = 1.0;
  int steps = 100;
  double at(int k) const;
  void validate() const;
};

struct SweepGrid {
  Range q{1.0, 10000.0, 100};
  Range x{0.0, 1.0, 100};  // delta_lambda_xor or WLS, nm
  double target_ber = 0.1;
};

struct ExplorerContext {
  double lambda_s = 1542.0;
  double m = 2.0;
  double fsr = 24.0;
  double floor = 0.1;
  double il = 0.7943282347242815;
  double er_mod = 0.1;
  double kappa = 9.0;  // per uW
};

struct SweepCell {
  double q = 0.0;
  double x = 0.0;
  double total_uw = 0.0;
  double olp_p_uw = 0.0;
  double olp_in_uw = 0.0;
  double ber = 0.5;
  bool reachable = false;
  bool valid = false;
};

struct SweepTable {
  int nq = 0;
  int nx = 0;
  std::vector<SweepCell> cells;  // q-major
  const SweepCell& at(int iq, int ix) const {
    return cells[static_cast<std::size_t>(iq) * static_cast<std::size_t>(nx) +
                 static_cast<std::size_t>(ix)];
  }
};

// Lowest total among valid cells; ties go to higher Q, then smaller x.
std::optional<std::size_t> best_valid_by_power(const SweepTable& t);

SweepTable explore_xor(const SweepGrid& grid, const DetuningCalibration& calib,
                       const ExplorerContext& ctx);

// Per-pump laser power so that both pumps together shift the XOR pair by delta.
double xor_pump_power(const DetuningCalibration& calib, const ExplorerContext& ctx, double q_s,
                      double delta);

// Sweeps (Q_S[MUX,stage], WLS_stage) with stages before `stage` taken from `so_far`.
// For stage 0 the XOR Q follows the cell Q and its pump is resized.
SweepTable explore_mux_stage(const ArchitectureDesign& so_far, int stage, const SweepGrid& grid,
                             const DetuningCalibration& calib);

// Laser power per MUX pump so that the received pump shifts the stage by its WLS.
double mux_pump_power(const ArchitectureDesign& d, const DetuningCalibration& calib, int stage);

struct DesignPoint {
  ArchitectureDesign design;
  std::vector<double> stage_ber;
  double total_laser_power_uw = 0.0;
  bool valid = false;
  double energy_per_pixel_nj = 0.0;
  double time_per_pixel_ns = 0.0;
  int bsl = 512;
  std::optional<double> ber_override;  // externally anchored BER for imaging

  double output_ber() const {
    return ber_override ? *ber_override : (stage_ber.empty() ? 0.5 : stage_ber.back());
  }
};

// (energy nJ, time ns)
std::pair<double, double> energy_per_pixel(const DesignPoint& p, int bsl);

// Sizes pumps from the device model and fills BER, power, validity, energy and time.
DesignPoint evaluate_design(ArchitectureDesign d, const DetuningCalibration& calib, int bsl);
ArchitectureDesign size_pumps(ArchitectureDesign d, const DetuningCalibration& calib);

// Parameter sets of the two reference designs (pumps and noise left for sizing).
ArchitectureDesign reference_design_a(double kappa);
ArchitectureDesign reference_design_b(double kappa);

struct FlowInputs {
  double m = 2.0;
  double lambda_s1 = 1542.0;
  double target_ber = 0.1;
  double olp_input = 4.0;
  double xor_target_ber = 0.1;
  int n_stages = 3;
  double il = 0.7943282347242815;
  double er_mod = 0.1;
  double fsr = 24.0;
  double floor = 0.1;
  double kappa = 9.0;
  int bsl = 512;
  SweepGrid xor_grid{{1.0, 10000.0, 100}, {0.0, 1.0, 100}, 0.1};
  std::vector<SweepGrid> stage_grids;  // defaults filled when empty
};

std::vector<SweepGrid> default_stage_grids(int n_stages);

struct FlowResult {
  DesignPoint point;
  SweepTable xor_table;
  std::vector<SweepTable> stage_tables;
  int failing_stage = -1;
  bool degenerate_target = false;
  std::vector<std::string> diagnostics;
};

FlowResult run_design_flow(const FlowInputs& in, const DetuningCalibration& calib);

}  // namespace nanophot
