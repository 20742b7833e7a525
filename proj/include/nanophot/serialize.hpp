#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "nanophot/architecture.hpp"
#include "nanophot/device.hpp"
#include "nanophot/explorer.hpp"
#include "nanophot/imaging.hpp"

namespace nanophot {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const DetuningCalibration& c);
DetuningCalibration calibration_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ArchitectureDesign& d);
ArchitectureDesign design_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DesignPoint& p);
// Accepts either a DesignPoint document or a bare design document.
DesignPoint design_point_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AccuracyReport& r);

// Applies `key=value` to a design object; value parsed as JSON when possible.
void apply_override(nlohmann::json& design, const std::string& assignment);

// Header: q,x,total_uw,olp_p_uw,olp_in_uw,ber,valid (preceded by a units comment).
void write_sweep_csv(std::ostream& out, const SweepTable& t, const std::string& x_name);
// Two tables: row,lambda_s,xor_res_1,xor_res_2 then stage,pos,mux_res (1-based indices).
void write_plan_csv(std::ostream& out, const SignalPlan& plan);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace nanophot
