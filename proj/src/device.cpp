#include "nanophot/device.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nanophot/error.hpp"

namespace nanophot {

namespace {

// Pump and signal resonances must not overlap: their separation has to exceed
// the sum of the two half-widths.
bool resonances_separated(const Nanocavity& c) {
  return std::abs(c.fsr) > 0.5 * (c.linewidth_s() + c.linewidth_p());
}

// Least squares of y ~ D * (1 - exp(-x / c)) for fixed c, D in closed form.
double saturation_residual(std::span<const CalibrationPoint> pts, double c, double* d_out) {
  double gy = 0.0, gg = 0.0;
  for (const auto& p : pts) {
    const double g = 1.0 - std::exp(-p.power_uw / c);
    gy += g * p.detuning_nm;
    gg += g * g;
  }
  const double d = gg > 0.0 ? gy / gg : 0.0;
  double r = 0.0;
  for (const auto& p : pts) {
    const double e = p.detuning_nm - d * (1.0 - std::exp(-p.power_uw / c));
    r += e * e;
  }
  if (d_out) *d_out = d;
  return r;
}

}  // namespace

void Nanocavity::validate() const {
  if (!(q_s > 0.0) || !std::isfinite(q_s)) throw InvalidParameter("q_s must be positive");
  if (!(m > 0.0) || !std::isfinite(m)) throw InvalidParameter("m must be positive");
  if (!(floor > 0.0 && floor < 1.0)) throw InvalidParameter("floor must lie in (0,1)");
  if (!(lambda_s_rest > 0.0)) throw InvalidParameter("lambda_s_rest must be positive");
  if (!(lambda_p_rest() > 0.0)) throw InvalidParameter("pump resonance must be positive");
  if (!resonances_separated(*this))
    throw InvalidParameter("pump and signal resonances overlap (|fsr| too small for q_s)");
}

bool Nanocavity::is_valid() const noexcept {
  try {
    validate();
    return true;
  } catch (const Error&) {
    return false;
  }
}

Nanocavity make_cavity(double lambda_s_rest, double q_s, double m, double fsr, double floor) {
  Nanocavity c{lambda_s_rest, fsr, q_s, m, floor};
  c.validate();
  return c;
}

double DetuningCalibration::polynomial(double p) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (acc + *it) * p;
  return acc;
}

double DetuningCalibration::closed_form(double p) const {
  return sat_scale * lambda_p_ref / q_p_ref * (1.0 - std::exp(-p / power_scale));
}

DetuningCalibration fit_calibration(std::span<const CalibrationPoint> points, double q_p_ref,
                                    double lambda_p_ref) {
  if (points.size() < 4) throw InsufficientData("insufficient data: need at least 4 points");
  if (!(q_p_ref > 0.0)) throw InvalidParameter("q_p_ref must be positive");
  if (!(lambda_p_ref > 0.0)) throw InvalidParameter("lambda_p_ref must be positive");
  std::vector<double> powers;
  for (const auto& p : points) {
    if (!(p.power_uw >= 0.0) || !std::isfinite(p.power_uw))
      throw InvalidParameter("pump powers must be non-negative");
    if (!(p.detuning_nm >= 0.0) || !std::isfinite(p.detuning_nm))
      throw InvalidParameter("detunings must be non-negative");
    powers.push_back(p.power_uw);
  }
  std::sort(powers.begin(), powers.end());
  if (std::adjacent_find(powers.begin(), powers.end()) != powers.end())
    throw InvalidParameter("pump powers must be distinct");

  DetuningCalibration cal;
  cal.q_p_ref = q_p_ref;
  cal.lambda_p_ref = lambda_p_ref;
  cal.fitted_max_power = powers.back();

  const auto n = static_cast<Eigen::Index>(points.size());
  // Columns scaled by the largest power to keep the normal problem well conditioned.
  const double scale = cal.fitted_max_power > 0.0 ? cal.fitted_max_power : 1.0;
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = points[static_cast<std::size_t>(i)].power_uw / scale;
    a(i, 0) = x;
    a(i, 1) = x * x;
    a(i, 2) = x * x * x;
    y(i) = points[static_cast<std::size_t>(i)].detuning_nm;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  cal.coeffs = {c(0) / scale, c(1) / (scale * scale), c(2) / (scale * scale * scale)};

  const int probes = 2000;
  auto slope_ok = [&] {
    for (int k = 0; k <= probes; ++k) {
      const double p = cal.fitted_max_power * k / probes;
      if (cal.coeffs[0] + 2.0 * cal.coeffs[1] * p + 3.0 * cal.coeffs[2] * p * p < -1e-12)
        return false;
    }
    return true;
  };
  if (!slope_ok()) {
    // Saturating data bends a free cubic downwards near the top of the range. Refit
    // with zero slope at the largest power (scaled x = 1): c1 = -2 c2 - 3 c3.
    Eigen::MatrixXd b(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = a(i, 0);
      b(i, 0) = x * x - 2.0 * x;
      b(i, 1) = x * x * x - 3.0 * x;
    }
    const Eigen::VectorXd d = b.colPivHouseholderQr().solve(y);
    const double c1 = -2.0 * d(0) - 3.0 * d(1);
    cal.coeffs = {c1 / scale, d(0) / (scale * scale), d(1) / (scale * scale * scale)};
    cal.monotone_constrained = true;
  }
  cal.monotone = slope_ok();

  double ss = 0.0;
  for (const auto& p : points) {
    const double e = cal.polynomial(p.power_uw) - p.detuning_nm;
    ss += e * e;
  }
  cal.residual_rms = std::sqrt(ss / static_cast<double>(points.size()));

  double poly_max = 0.0;
  for (int k = 0; k <= probes; ++k)
    poly_max = std::max(poly_max, std::abs(cal.polynomial(cal.fitted_max_power * k / probes)));

  const bool all_zero = std::all_of(points.begin(), points.end(),
                                    [](const CalibrationPoint& p) { return p.detuning_nm == 0.0; });
  if (all_zero || cal.fitted_max_power <= 0.0) {
    cal.coeffs = {0.0, 0.0, 0.0};
    cal.sat_scale = 0.0;
    cal.power_scale = 1.0;
    cal.degenerate = true;
    return cal;
  }

  // Separable fit: scan log(C), then refine by golden section around the best sample.
  const double lo = std::log(cal.fitted_max_power * 1e-3);
  const double hi = std::log(cal.fitted_max_power * 1e3);
  const int scan = 400;
  int best = 0;
  double best_r = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= scan; ++k) {
    const double r = saturation_residual(points, std::exp(lo + (hi - lo) * k / scan), nullptr);
    if (r < best_r) {
      best_r = r;
      best = k;
    }
  }
  double a_lo = lo + (hi - lo) * std::max(best - 1, 0) / scan;
  double a_hi = lo + (hi - lo) * std::min(best + 1, scan) / scan;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = a_hi - g * (a_hi - a_lo), x2 = a_lo + g * (a_hi - a_lo);
  double f1 = saturation_residual(points, std::exp(x1), nullptr);
  double f2 = saturation_residual(points, std::exp(x2), nullptr);
  for (int it = 0; it < 200 && a_hi - a_lo > 1e-12; ++it) {
    if (f1 < f2) {
      a_hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = a_hi - g * (a_hi - a_lo);
      f1 = saturation_residual(points, std::exp(x1), nullptr);
    } else {
      a_lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = a_lo + g * (a_hi - a_lo);
      f2 = saturation_residual(points, std::exp(x2), nullptr);
    }
  }
  const double c_fit = std::exp(0.5 * (a_lo + a_hi));
  double d_sat = 0.0;
  saturation_residual(points, c_fit, &d_sat);
  cal.power_scale = c_fit;
  cal.sat_scale = d_sat * q_p_ref / lambda_p_ref;
  if (!(cal.sat_scale > 0.0)) {
    cal.sat_scale = 0.0;
    cal.degenerate = true;
  }

  double dev = 0.0;
  for (int k = 0; k <= probes; ++k) {
    const double p = cal.fitted_max_power * k / probes;
    dev = std::max(dev, std::abs(cal.closed_form(p) - cal.polynomial(p)));
  }
  cal.closed_form_deviation = poly_max > 0.0 ? dev / poly_max : 0.0;
  return cal;
}

double lorentzian(double lambda, double lambda_res, double q) {
  if (!(q > 0.0)) throw InvalidParameter("lorentzian: q must be positive");
  if (!(lambda_res > 0.0)) throw InvalidParameter("lorentzian: lambda_res must be positive");
  const double u = 2.0 * q * (lambda - lambda_res) / lambda_res;
  return 1.0 / (1.0 + u * u);
}

double through_transmission(const Nanocavity& cav, double lambda, double det) {
  if (!(det >= 0.0)) throw InvalidParameter("detuning must be non-negative");
  return 1.0 - (1.0 - cav.floor) * lorentzian(lambda, cav.lambda_s_rest - det, cav.q_s);
}

double max_detuning(const Nanocavity& cav, const DetuningCalibration& calib) {
  return calib.sat_scale * cav.lambda_p_rest() / cav.q_p();
}

double detuning(const Nanocavity& cav, const DetuningCalibration& calib, double pump_uw) {
  if (!(pump_uw >= 0.0)) throw InvalidParameter("pump power must be non-negative");
  if (calib.sat_scale == 0.0) return 0.0;
  const double x = pump_uw * cav.q_p() / (calib.power_scale * calib.q_p_ref);
  return max_detuning(cav, calib) * -std::expm1(-x);
}

double pump_for_detuning(const Nanocavity& cav, const DetuningCalibration& calib,
                         double target_nm) {
  if (!(target_nm >= 0.0)) throw InvalidParameter("target detuning must be non-negative");
  if (target_nm == 0.0) return 0.0;
  const double sat = max_detuning(cav, calib);
  if (!(target_nm < sat)) return std::numeric_limits<double>::infinity();
  // Exact inverse of the saturation law.
  return -std::log1p(-target_nm / sat) * calib.power_scale * calib.q_p_ref / cav.q_p();
}

std::vector<CalibrationPoint> read_calibration_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParameter("cannot open calibration file: " + path);
  std::vector<CalibrationPoint> pts;
  std::string line;
  std::size_t offset = 0;
  bool header = true;
  while (std::getline(in, line)) {
    const std::size_t start = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line != "power_uw,detuning_nm")
        throw ParseError("calibration CSV header must be 'power_uw,detuning_nm'", start);
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected two columns", start);
    try {
      std::size_t used = 0;
      CalibrationPoint p;
      p.power_uw = std::stod(line.substr(0, comma), &used);
      p.detuning_nm = std::stod(line.substr(comma + 1));
      pts.push_back(p);
    } catch (const std::logic_error&) {
      throw ParseError("malformed number", start);
    }
  }
  return pts;
}

}  // namespace nanophot
