#pragma once

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "powerlaw/analysis.hpp"
#include "powerlaw/pressure.hpp"
#include "powerlaw/trajectory.hpp"

namespace powerlaw {

// Fixed 17-significant-digit decimal, so values round-trip exactly.
std::string format_double(double x);

// One row per recorded state (steps + 1 rows after the header):
//   step, t, energy = 1/2 ||v||^2, grad_lp_increment, stab_increment, noise_qv
// Increments refer to the step that ended at the row's state and are 0 on row 0.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

nlohmann::json coefficients_json(const Trajectory& trajectory);

nlohmann::json energy_report_json(const EnergyReport& report);
// Per-trajectory rows followed by a "mean" and a "std_error" row.
void write_energy_csv(std::ostream& out, const EnergyReport& report);

nlohmann::json alpha_study_json(const AlphaStudy& study);
void write_alpha_csv(std::ostream& out, const AlphaStudy& study);

nlohmann::json stabilization_study_json(const StabilizationStudy& study);
void write_stabilization_csv(std::ostream& out, const StabilizationStudy& study);

nlohmann::json estimate_report_json(const EstimateReport& report);

// Writes `content` to `path`, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace powerlaw
