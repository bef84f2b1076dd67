#include "powerlaw/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace powerlaw {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "step,t,energy,grad_lp_increment,stab_increment,noise_qv\n";
  for (int n = 0; n <= traj.steps(); ++n) {
    double grad_inc = 0.0, stab_inc = 0.0, qv = 0.0;
    if (n > 0) {
      const double dt = traj.times[n] - traj.times[n - 1];
      grad_inc = 0.5 * dt * (traj.integrals[n - 1].grad_lp + traj.integrals[n].grad_lp);
      stab_inc = traj.stabilization[n - 1];
      qv = traj.quadratic_variation[n - 1];
    }
    out << n << ',' << format_double(traj.times[n]) << ',' << format_double(0.5 * traj.integrals[n].l2_sq) << ','
        << format_double(grad_inc) << ',' << format_double(stab_inc) << ',' << format_double(qv) << '\n';
  }
}

json coefficients_json(const Trajectory& traj) {
  json doc;
  doc["seed"] = traj.seed;
  doc["dt"] = traj.cfg.dt;
  doc["scheme"] = to_string(traj.cfg.scheme);
  doc["times"] = traj.times;
  json coeffs = json::array();
  for (const auto& c : traj.coeffs) coeffs.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  doc["coeffs"] = std::move(coeffs);
  return doc;
}

namespace {

json mean_json(const MeanEstimate& m) { return {{"mean", m.mean}, {"std_error", m.std_error}}; }

}  // namespace

json energy_report_json(const EnergyReport& rep) {
  json doc;
  doc["beta"] = rep.beta;
  doc["r0"] = rep.r0;
  doc["n_traj"] = rep.n_traj;
  doc["sup_l2_sq"] = mean_json(rep.sup_l2_sq);
  doc["grad_lp"] = mean_json(rep.grad_lp);
  doc["stab_lq"] = mean_json(rep.stab_lq);
  doc["interp_lr0"] = mean_json(rep.interp_lr0);
  doc["lhs"] = mean_json(rep.lhs);
  doc["lhs_beta_moment"] = mean_json(rep.lhs_beta);
  doc["v0_l2_sq"] = rep.v0_l2_sq;
  doc["forcing_norm_sq"] = rep.forcing_norm_sq;
  doc["bound_ratio"] = rep.bound_ratio();
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"seed", r.seed},
                    {"sup_l2_sq", r.sup_l2_sq},
                    {"grad_lp", r.grad_lp},
                    {"stab_lq", r.stab_lq},
                    {"interp_lr0", r.interp_lr0},
                    {"lhs", r.lhs},
                    {"lhs_beta", r.lhs_beta}});
  }
  doc["trajectories"] = std::move(rows);
  return doc;
}

void write_energy_csv(std::ostream& out, const EnergyReport& rep) {
  out << "row,seed,sup_l2_sq,grad_lp,stab_lq,interp_lr0,lhs,lhs_beta\n";
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    out << i << ',' << r.seed << ',' << format_double(r.sup_l2_sq) << ',' << format_double(r.grad_lp) << ','
        << format_double(r.stab_lq) << ',' << format_double(r.interp_lr0) << ',' << format_double(r.lhs) << ','
        << format_double(r.lhs_beta) << '\n';
  }
  auto summary = [&](const char* name, double MeanEstimate::* f) {
    out << name << ",," << format_double(rep.sup_l2_sq.*f) << ',' << format_double(rep.grad_lp.*f) << ','
        << format_double(rep.stab_lq.*f) << ',' << format_double(rep.interp_lr0.*f) << ','
        << format_double(rep.lhs.*f) << ',' << format_double(rep.lhs_beta.*f) << '\n';
  };
  summary("mean", &MeanEstimate::mean);
  summary("std_error", &MeanEstimate::std_error);
}

json alpha_study_json(const AlphaStudy& study) {
  json rows = json::array();
  for (const auto& r : study.rows) rows.push_back({{"alpha", r.alpha}, {"ratio", r.ratio}, {"lhs", mean_json(r.lhs)}});
  return {{"rows", rows}, {"spread", study.spread}};
}

void write_alpha_csv(std::ostream& out, const AlphaStudy& study) {
  out << "alpha,ratio,lhs_mean,lhs_std_error\n";
  for (const auto& r : study.rows) {
    out << format_double(r.alpha) << ',' << format_double(r.ratio) << ',' << format_double(r.lhs.mean) << ','
        << format_double(r.lhs.std_error) << '\n';
  }
}

json stabilization_study_json(const StabilizationStudy& study) {
  json rows = json::array();
  for (const auto& r : study.rows) {
    rows.push_back({{"m_a", r.m_a}, {"m_b", r.m_b}, {"difference", mean_json(r.difference)}});
  }
  return {{"rows", rows}, {"strictly_decreasing", study.strictly_decreasing}};
}

void write_stabilization_csv(std::ostream& out, const StabilizationStudy& study) {
  out << "m_a,m_b,difference_mean,difference_std_error\n";
  for (const auto& r : study.rows) {
    out << format_double(r.m_a) << ',' << format_double(r.m_b) << ',' << format_double(r.difference.mean) << ','
        << format_double(r.difference.std_error) << '\n';
  }
}

json estimate_report_json(const EstimateReport& rep) {
  auto side = [](double lhs, double rhs, double ratio) { return json{{"lhs", lhs}, {"rhs", rhs}, {"ratio", ratio}}; };
  return {{"s", rep.s},
          {"chi", rep.chi},
          {"n_traj", rep.n_traj},
          {"pi_H", side(rep.lhs_H, rep.rhs_H, rep.ratio_H)},
          {"pi_Phi", side(rep.lhs_Phi, rep.rhs_Phi, rep.ratio_Phi)},
          {"pi_h", side(rep.lhs_h, rep.rhs_h, rep.ratio_h)}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace powerlaw
