#include <cstdlib>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "powerlaw/config.hpp"
#include "powerlaw/output.hpp"

using namespace powerlaw;

namespace {

const char* kMinimal = R"({"d": 2, "p": 1.6, "N": 4, "dt": 0.01, "T_end": 0.1,
  "init_coeffs": [1.0, -0.5], "alpha": 0.1, "seed": 3})";

}  // namespace

TEST(Config, SerializeIsAFixedPoint) {
  const SimulationConfig c = SimulationConfig::parse(kMinimal);
  const std::string once = c.serialize();
  EXPECT_EQ(SimulationConfig::parse(once).serialize(), once);
  EXPECT_FALSE(c.to_json().contains("m"));
  EXPECT_TRUE(c.to_json().contains("alpha"));
}

TEST(Config, DerivedQuantities) {
  SimulationConfig c = SimulationConfig::parse(kMinimal);
  c.validate();
  EXPECT_EQ(c.steps(), 10);
  EXPECT_EQ(c.grid(), dealiased_grid(2, 4));
  EXPECT_NEAR(c.constitutive().q, 16.0 / 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(c.effective_alpha(), 0.1);
  const GalerkinSpace space = c.space();
  const Eigen::VectorXd v0 = c.initial_coeffs(space);
  EXPECT_EQ(v0(0), 1.0);
  EXPECT_EQ(v0(1), -0.5);
  EXPECT_EQ(v0(2), 0.0);

  c.alpha.reset();
  c.m = 10.0;
  EXPECT_DOUBLE_EQ(c.effective_alpha(), 0.1);
}

TEST(Config, Validation) {
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      SimulationConfig::parse(text).validate();
      ADD_FAILURE() << "accepted " << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field) << e.what();
    }
  };
  expect_field(R"({"p": 0.9})", "p");
  expect_field(R"({"d": 4})", "d");
  expect_field(R"({"dt": 0.03, "T_end": 0.1})", "T_end");
  expect_field(R"({"alpha": 1.0, "m": 2.0})", "m");
  expect_field(R"({"p": 1.6, "alpha": 1.0, "q": 4.0})", "q");
  expect_field(R"({"noise_family": "cubic"})", "noise_family");
  expect_field(R"({"N": 2, "init_coeffs": [1, 2, 3]})", "init_coeffs");
  expect_field(R"({"N": 8, "M": 2})", "M");
  EXPECT_THROW(SimulationConfig::parse(R"({"colour": 1})"), ConfigError);
  EXPECT_THROW(SimulationConfig::parse("{"), ConfigError);
  EXPECT_THROW(SimulationConfig::parse(R"({"N": "eight"})"), ConfigError);
  try {
    SimulationConfig::parse(R"({"p": 0.9})").validate();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("p > 1"), std::string::npos);
  }
}

TEST(Output, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
}

TEST(Output, TrajectoryCsvLayout) {
  SimulationConfig c = SimulationConfig::parse(kMinimal);
  const GalerkinSystem sys = c.system();
  const Trajectory t = run_trajectory(sys, c.initial_coeffs(sys.space()), c.step_config(), c.steps(), WienerPath{c.seed});
  std::ostringstream a, b;
  write_trajectory_csv(a, t);
  write_trajectory_csv(b, t);
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,t,energy,grad_lp_increment,stab_increment,noise_qv");
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  EXPECT_EQ(rows, c.steps() + 1);
  EXPECT_EQ(first.substr(0, 4), "0,0,");
  EXPECT_EQ(first.substr(first.size() - 6), ",0,0,0");
}

TEST(Output, EnergyCsvHasSummaryRows) {
  SimulationConfig c = SimulationConfig::parse(kMinimal);
  const GalerkinSystem sys = c.system();
  const EnergyReport rep = ensemble_moments(sys, c.initial_coeffs(sys.space()), c.step_config(), c.steps(), 1, 4, 0.0);
  std::ostringstream out;
  write_energy_csv(out, rep);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++lines;
    last = line;
  }
  EXPECT_EQ(lines, 1 + 4 + 2);
  EXPECT_EQ(last.rfind("std_error", 0), 0u);
  EXPECT_EQ(energy_report_json(rep)["n_traj"], 4);
}
