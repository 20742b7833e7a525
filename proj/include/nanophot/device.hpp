#pragma once

#include <span>
#include <string>
#include <vector>

namespace nanophot {

// One photonic-crystal nanocavity. Wavelengths in nm.
struct Nanocavity {
  double lambda_s_rest = 1542.0;
  double fsr = 24.0;  // lambda_p_rest - lambda_s_rest
  double q_s = 2000.0;
  double m = 2.0;     // q_s / q_p
  double floor = 0.1; // on-resonance transmission

  double q_p() const { return q_s / m; }
  double lambda_p_rest() const { return lambda_s_rest + fsr; }
  double linewidth_s() const { return lambda_s_rest / q_s; }
  double linewidth_p() const { return lambda_p_rest() / q_p(); }

  // Throws InvalidParameter when the cavity is not physical.
  void validate() const;
  bool is_valid() const noexcept;
};

Nanocavity make_cavity(double lambda_s_rest, double q_s, double m = 2.0, double fsr = 24.0,
                       double floor = 0.1);

struct CalibrationPoint {
  double power_uw = 0.0;
  double detuning_nm = 0.0;
};

struct DetuningCalibration {
  double q_p_ref = 700.0;
  double lambda_p_ref = 1568.8;   // pump resonance of the measured device
  std::vector<double> coeffs;     // c1, c2, c3 multiply P, P^2, P^3
  double sat_scale = 0.0;         // S
  double power_scale = 1.0;       // C, uW
  double residual_rms = 0.0;      // polynomial fit residual, nm
  double closed_form_deviation = 0.0;  // max |closed - poly| / max poly over the fitted range
  double fitted_max_power = 0.0;
  bool monotone = true;
  bool monotone_constrained = false;  // free fit was not monotone; refit with a slope constraint
  bool degenerate = false;

  double polynomial(double power_uw) const;
  double closed_form(double power_uw) const;  // at the reference device
  bool closed_form_ok() const { return closed_form_deviation <= 0.10; }
};

DetuningCalibration fit_calibration(std::span<const CalibrationPoint> points, double q_p_ref,
                                    double lambda_p_ref = 1568.8);

double lorentzian(double lambda, double lambda_res, double q);

// Notch response of the signal resonance after a blue shift of `detuning` nm.
double through_transmission(const Nanocavity& cav, double lambda, double detuning);

double max_detuning(const Nanocavity& cav, const DetuningCalibration& calib);
double detuning(const Nanocavity& cav, const DetuningCalibration& calib, double pump_uw);

// Smallest pump power reaching `target_nm`; +inf if the target is at or beyond saturation.
double pump_for_detuning(const Nanocavity& cav, const DetuningCalibration& calib,
                         double target_nm);

std::vector<CalibrationPoint> read_calibration_csv(const std::string& path);

}  // namespace nanophot
