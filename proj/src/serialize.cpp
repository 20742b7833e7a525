#include "nanophot/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nanophot/error.hpp"

namespace nanophot {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  if (!j.at(key).is_number()) throw InvalidParameter(std::string("field '") + key + "' must be numeric");
  return j.at(key).get<double>();
}

std::vector<double> get_vec(const json& j, const char* key, std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_array()) throw InvalidParameter(std::string("field '") + key + "' must be an array");
  std::vector<double> v;
  for (const auto& e : j.at(key)) {
    if (!e.is_number()) throw InvalidParameter(std::string("field '") + key + "' must hold numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

void check_schema(const json& j) {
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw InvalidParameter("unsupported schema_version");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

json to_json(const DetuningCalibration& c) {
  return json{{"schema_version", kSchemaVersion},
              {"q_p_ref", c.q_p_ref},
              {"lambda_p_ref", c.lambda_p_ref},
              {"coeffs", c.coeffs},
              {"sat_scale", c.sat_scale},
              {"power_scale", c.power_scale},
              {"residual_rms", c.residual_rms},
              {"closed_form_deviation", c.closed_form_deviation},
              {"fitted_max_power", c.fitted_max_power},
              {"monotone", c.monotone},
              {"monotone_constrained", c.monotone_constrained},
              {"degenerate", c.degenerate}};
}

DetuningCalibration calibration_from_json(const json& j) {
  check_schema(j);
  DetuningCalibration c;
  c.q_p_ref = get_num(j, "q_p_ref", c.q_p_ref);
  c.lambda_p_ref = get_num(j, "lambda_p_ref", c.lambda_p_ref);
  c.coeffs = get_vec(j, "coeffs", {});
  if (c.coeffs.size() > 3) throw InvalidParameter("polynomial degree must not exceed 3");
  c.sat_scale = get_num(j, "sat_scale", 0.0);
  c.power_scale = get_num(j, "power_scale", 1.0);
  c.residual_rms = get_num(j, "residual_rms", 0.0);
  c.closed_form_deviation = get_num(j, "closed_form_deviation", 0.0);
  c.fitted_max_power = get_num(j, "fitted_max_power", 0.0);
  c.monotone = j.value("monotone", true);
  c.monotone_constrained = j.value("monotone_constrained", false);
  c.degenerate = j.value("degenerate", false);
  if (!(c.q_p_ref > 0.0) || !(c.power_scale > 0.0) || c.sat_scale < 0.0)
    throw InvalidParameter("calibration constants out of range");
  return c;
}

json to_json(const ArchitectureDesign& d) {
  return json{{"schema_version", kSchemaVersion},
              {"n_stages", d.n_stages},
              {"lambda_s1", d.lambda_s1},
              {"wls", d.wls},
              {"q_s_xor", d.q_s_xor},
              {"q_s_mux", d.q_s_mux},
              {"delta_lambda_xor", d.delta_lambda_xor},
              {"olp_input", d.olp_input},
              {"olp_pump_xor", num(d.olp_pump_xor)},
              {"olp_pump_mux", d.olp_pump_mux},
              {"il", d.il},
              {"er_mod", d.er_mod},
              {"responsivity", d.responsivity},
              {"noise", d.noise},
              {"m", d.m},
              {"fsr", d.fsr},
              {"floor", d.floor}};
}

ArchitectureDesign design_from_json(const json& j) {
  check_schema(j);
  ArchitectureDesign d;
  d.n_stages = static_cast<int>(get_num(j, "n_stages", d.n_stages));
  d.lambda_s1 = get_num(j, "lambda_s1", d.lambda_s1);
  d.wls = get_vec(j, "wls", {});
  d.q_s_xor = get_num(j, "q_s_xor", d.q_s_xor);
  d.q_s_mux = get_vec(j, "q_s_mux", {});
  d.delta_lambda_xor = get_num(j, "delta_lambda_xor", d.delta_lambda_xor);
  d.olp_input = get_num(j, "olp_input", d.olp_input);
  d.olp_pump_xor = get_num(j, "olp_pump_xor", 0.0);
  d.olp_pump_mux = get_vec(j, "olp_pump_mux", std::vector<double>(d.wls.size(), 0.0));
  d.il = get_num(j, "il", d.il);
  d.er_mod = get_num(j, "er_mod", d.er_mod);
  d.responsivity = get_num(j, "responsivity", d.responsivity);
  d.noise = get_num(j, "noise", d.noise);
  d.m = get_num(j, "m", d.m);
  d.fsr = get_num(j, "fsr", d.fsr);
  d.floor = get_num(j, "floor", d.floor);
  d.validate();
  return d;
}

json to_json(const DesignPoint& p) {
  json sb = json::array();
  for (double b : p.stage_ber) sb.push_back(num(b));
  json j{{"schema_version", kSchemaVersion},
         {"design", to_json(p.design)},
         {"stage_ber", sb},
         {"total_laser_power_uw", num(p.total_laser_power_uw)},
         {"valid", p.valid},
         {"energy_per_pixel_nj", num(p.energy_per_pixel_nj)},
         {"time_per_pixel_ns", p.time_per_pixel_ns},
         {"bsl", p.bsl}};
  if (p.ber_override) j["ber_override"] = *p.ber_override;
  return j;
}

DesignPoint design_point_from_json(const json& j) {
  check_schema(j);
  DesignPoint p;
  if (j.contains("design")) {
    p.design = design_from_json(j.at("design"));
    p.stage_ber = get_vec(j, "stage_ber", {});
    p.total_laser_power_uw = get_num(j, "total_laser_power_uw", p.design.total_laser_power());
    p.valid = j.value("valid", p.design.power_rule_ok());
    p.energy_per_pixel_nj = get_num(j, "energy_per_pixel_nj", 0.0);
    p.time_per_pixel_ns = get_num(j, "time_per_pixel_ns", 0.0);
    p.bsl = static_cast<int>(get_num(j, "bsl", p.bsl));
  } else {
    p.design = design_from_json(j);
    p.total_laser_power_uw = p.design.total_laser_power();
    p.valid = p.design.power_rule_ok();
  }
  if (j.contains("ber_override") && !j.at("ber_override").is_null())
    p.ber_override = get_num(j, "ber_override", 0.5);
  return p;
}

json to_json(const AccuracyReport& r) {
  json j{{"schema_version", kSchemaVersion},
         {"rows", r.rows},
         {"cols", r.cols},
         {"bsl", r.bsl},
         {"seed", r.seed},
         {"ber_injected", r.ber_injected},
         {"ber_model", num(r.ber_model)},
         {"mse_total", r.mse_total},
         {"psnr_total_db", num(r.psnr_total)},
         {"psnr_infinite", std::isinf(r.psnr_total)},
         {"mean_ed_bsl", r.mean_ed_bsl},
         {"mean_ed_trans", r.mean_ed_trans},
         {"energy_per_pixel_nj", r.energy_per_pixel_nj},
         {"time_per_pixel_ns", r.time_per_pixel_ns}};
  return j;
}

void apply_override(json& design, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw InvalidParameter("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  static const char* known[] = {"n_stages", "lambda_s1", "wls",      "q_s_xor",      "q_s_mux",
                                "delta_lambda_xor", "olp_input", "olp_pump_xor", "olp_pump_mux",
                                "il",       "er_mod",    "responsivity", "noise", "m", "fsr",
                                "floor"};
  bool ok = false;
  for (const char* k : known) ok = ok || key == k;
  if (!ok) throw InvalidParameter("unknown design field: " + key);
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) throw InvalidParameter("cannot parse value for " + key);
  design[key] = parsed;
}

void write_sweep_csv(std::ostream& out, const SweepTable& t, const std::string& x_name) {
  out << "# units: q dimensionless, x = " << x_name
      << " nm, powers uW, ber probability, valid 0/1\n";
  out << "q,x,total_uw,olp_p_uw,olp_in_uw,ber,valid\n";
  for (const auto& c : t.cells)
    out << fmt(c.q) << ',' << fmt(c.x) << ',' << fmt(c.total_uw) << ',' << fmt(c.olp_p_uw) << ','
        << fmt(c.olp_in_uw) << ',' << (c.reachable ? fmt(c.ber) : std::string("nan")) << ','
        << (c.valid ? 1 : 0) << '\n';
}

void write_plan_csv(std::ostream& out, const SignalPlan& plan) {
  out << "# units: wavelengths nm, indices 1-based\n";
  out << "row,lambda_s,xor_res_1,xor_res_2\n";
  for (std::size_t i = 0; i < plan.lambda_s.size(); ++i)
    out << i + 1 << ',' << fmt(plan.lambda_s[i]) << ',' << fmt(plan.xor_res_1[i]) << ','
        << fmt(plan.xor_res_2[i]) << '\n';
  out << "stage,pos,mux_res\n";
  for (std::size_t n = 0; n < plan.mux_res.size(); ++n)
    for (std::size_t j = 0; j < plan.mux_res[n].size(); ++j)
      out << n + 1 << ',' << j + 1 << ',' << fmt(plan.mux_res[n][j]) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON in " + path, 0);
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + path);
  out << text;
}

}  // namespace nanophot
