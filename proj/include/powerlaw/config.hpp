#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "powerlaw/analysis.hpp"
#include "powerlaw/galerkin_system.hpp"

namespace powerlaw {

// Validation failure naming the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline constexpr int kConfigVersion = 1;

// Flat, typed, versioned run description. Optional keys stay unset until
// needed, so serialize(parse(text)) is a fixed point.
struct SimulationConfig {
  int version = kConfigVersion;
  int d = 2;
  double p = 2.0;
  double nu0 = 1.0;
  std::optional<double> q;
  std::optional<double> alpha;
  std::optional<double> m;  // alpha = 1 / m
  int N = 8;
  std::optional<int> M;
  int K = 4;
  std::string noise_family = "linear";
  double noise_amplitude = 0.1;
  double dt = 1e-2;
  double T_end = 0.1;
  std::string scheme = "semi_implicit";
  std::string forcing_mode = "zero";  // zero | coeffs
  std::vector<double> forcing_coeffs;
  std::string init_mode = "coeffs";  // zero | coeffs | taylor_green
  std::vector<double> init_coeffs;
  double init_amplitude = 1.0;
  std::uint64_t seed = 1;
  int n_traj = 4;
  std::optional<double> beta;
  double newton_tol = 1e-10;
  int newton_max_iter = 50;

  static SimulationConfig from_json(const nlohmann::json& doc);
  static SimulationConfig parse(const std::string& text);
  static SimulationConfig load(const std::string& path);
  nlohmann::json to_json() const;
  std::string serialize() const;

  // Re-checks every module-level invariant; throws ConfigError.
  void validate() const;

  double effective_alpha() const;
  int steps() const;
  int grid() const;
  ConstitutiveParams constitutive() const;
  SdeStepConfig step_config() const;
  NoiseModel noise() const;
  GalerkinSpace space() const;
  Forcing forcing(const GalerkinSpace& space) const;
  Eigen::VectorXd initial_coeffs(const GalerkinSpace& space) const;
  GalerkinSystem system() const;
  StudySetup study_setup() const;
};

}  // namespace powerlaw
