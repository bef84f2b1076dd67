#include "powerlaw/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace powerlaw {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "version",        "d",         "p",           "nu0",          "q",           "alpha",
      "m",              "N",         "M",           "K",            "noise_family", "noise_amplitude",
      "dt",             "T_end",     "scheme",      "forcing_mode", "forcing_coeffs", "init_mode",
      "init_coeffs",    "init_amplitude", "seed",   "n_traj",       "beta",        "newton_tol",
      "newton_max_iter"};
  return keys;
}

template <typename T>
T read(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ConfigError(key, "expected a string");
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned()) throw ConfigError(key, "expected a non-negative integer");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
    for (const auto& x : v)
      if (!x.is_number()) throw ConfigError(key, "expected an array of numbers");
  }
  return v.get<T>();
}

template <typename T>
void read_into(const json& doc, const std::string& key, T& out) {
  if (doc.contains(key)) out = read<T>(doc, key);
}

template <typename T>
void read_into(const json& doc, const std::string& key, std::optional<T>& out) {
  if (doc.contains(key)) out = read<T>(doc, key);
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

SimulationConfig SimulationConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (!known_keys().count(key)) throw ConfigError(key, "unknown key");
  }
  SimulationConfig c;
  read_into(doc, "version", c.version);
  read_into(doc, "d", c.d);
  read_into(doc, "p", c.p);
  read_into(doc, "nu0", c.nu0);
  read_into(doc, "q", c.q);
  read_into(doc, "alpha", c.alpha);
  read_into(doc, "m", c.m);
  read_into(doc, "N", c.N);
  read_into(doc, "M", c.M);
  read_into(doc, "K", c.K);
  read_into(doc, "noise_family", c.noise_family);
  read_into(doc, "noise_amplitude", c.noise_amplitude);
  read_into(doc, "dt", c.dt);
  read_into(doc, "T_end", c.T_end);
  read_into(doc, "scheme", c.scheme);
  read_into(doc, "forcing_mode", c.forcing_mode);
  read_into(doc, "forcing_coeffs", c.forcing_coeffs);
  read_into(doc, "init_mode", c.init_mode);
  read_into(doc, "init_coeffs", c.init_coeffs);
  read_into(doc, "init_amplitude", c.init_amplitude);
  read_into(doc, "seed", c.seed);
  read_into(doc, "n_traj", c.n_traj);
  read_into(doc, "beta", c.beta);
  read_into(doc, "newton_tol", c.newton_tol);
  read_into(doc, "newton_max_iter", c.newton_max_iter);
  c.validate();
  return c;
}

SimulationConfig SimulationConfig::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  return from_json(doc);
}

SimulationConfig SimulationConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

json SimulationConfig::to_json() const {
  json doc;
  doc["version"] = version;
  doc["d"] = d;
  doc["p"] = p;
  doc["nu0"] = nu0;
  if (q) doc["q"] = *q;
  if (alpha) doc["alpha"] = *alpha;
  if (m) doc["m"] = *m;
  doc["N"] = N;
  if (M) doc["M"] = *M;
  doc["K"] = K;
  doc["noise_family"] = noise_family;
  doc["noise_amplitude"] = noise_amplitude;
  doc["dt"] = dt;
  doc["T_end"] = T_end;
  doc["scheme"] = scheme;
  doc["forcing_mode"] = forcing_mode;
  doc["forcing_coeffs"] = forcing_coeffs;
  doc["init_mode"] = init_mode;
  doc["init_coeffs"] = init_coeffs;
  doc["init_amplitude"] = init_amplitude;
  doc["seed"] = seed;
  doc["n_traj"] = n_traj;
  if (beta) doc["beta"] = *beta;
  doc["newton_tol"] = newton_tol;
  doc["newton_max_iter"] = newton_max_iter;
  return doc;
}

std::string SimulationConfig::serialize() const { return to_json().dump(2) + "\n"; }

double SimulationConfig::effective_alpha() const {
  if (m) return 1.0 / *m;
  return alpha.value_or(0.0);
}

void SimulationConfig::validate() const {
  require(version == kConfigVersion, "version", "unsupported version " + std::to_string(version));
  require(d == 2 || d == 3, "d", "must be 2 or 3");
  require(std::isfinite(p) && p > 1.0, "p", "p must satisfy p > 1");
  require(std::isfinite(nu0) && nu0 > 0.0, "nu0", "must be > 0");
  require(!(alpha && m), "m", "give either alpha or m, not both");
  if (alpha) require(std::isfinite(*alpha) && *alpha >= 0.0, "alpha", "must be >= 0");
  if (m) require(std::isfinite(*m) && *m > 0.0, "m", "must be > 0");
  if (q) {
    const double qmin = minimal_stabilization_exponent(p);
    require(std::isfinite(*q) && *q >= qmin, "q", "must satisfy q >= max{2p', 3} = " + std::to_string(qmin));
  }
  require(N >= 1, "N", "must be >= 1");
  if (M) {
    require(*M >= minimal_grid(d, N), "M", "must be >= 2 kmax + 1 = " + std::to_string(minimal_grid(d, N)));
  }
  require(K >= 0, "K", "must be >= 0");
  try {
    parse_noise_family(noise_family);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise_family", e.what());
  }
  require(std::isfinite(noise_amplitude) && noise_amplitude >= 0.0, "noise_amplitude", "must be >= 0");
  require(std::isfinite(dt) && dt > 0.0, "dt", "must be > 0");
  require(std::isfinite(T_end) && T_end >= 0.0, "T_end", "must be >= 0");
  const double ratio = T_end / dt;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio), "T_end",
          "must be an integer multiple of dt");
  try {
    parse_scheme(scheme);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheme", e.what());
  }
  require(forcing_mode == "zero" || forcing_mode == "coeffs", "forcing_mode", "must be zero or coeffs");
  if (forcing_mode == "coeffs") {
    require(static_cast<int>(forcing_coeffs.size()) <= N, "forcing_coeffs", "has more entries than N");
  }
  require(init_mode == "zero" || init_mode == "coeffs" || init_mode == "taylor_green", "init_mode",
          "must be zero, coeffs or taylor_green");
  if (init_mode == "coeffs") {
    require(static_cast<int>(init_coeffs.size()) <= N, "init_coeffs", "has more entries than N");
  }
  if (init_mode == "taylor_green") require(d == 2, "init_mode", "taylor_green is defined for d = 2");
  for (double x : init_coeffs) require(std::isfinite(x), "init_coeffs", "entries must be finite");
  for (double x : forcing_coeffs) require(std::isfinite(x), "forcing_coeffs", "entries must be finite");
  require(std::isfinite(init_amplitude), "init_amplitude", "must be finite");
  require(n_traj >= 1, "n_traj", "must be >= 1");
  if (beta) require(std::isfinite(*beta) && *beta > 0.0, "beta", "must be > 0");
  require(std::isfinite(newton_tol) && newton_tol > 0.0, "newton_tol", "must be > 0");
  require(newton_max_iter >= 1, "newton_max_iter", "must be >= 1");
}

int SimulationConfig::steps() const { return static_cast<int>(std::llround(T_end / dt)); }

int SimulationConfig::grid() const { return M.value_or(dealiased_grid(d, N)); }

ConstitutiveParams SimulationConfig::constitutive() const { return ConstitutiveParams::make(d, p, nu0, effective_alpha(), q); }

SdeStepConfig SimulationConfig::step_config() const {
  SdeStepConfig cfg;
  cfg.dt = dt;
  cfg.scheme = parse_scheme(scheme);
  cfg.newton_tol = newton_tol;
  cfg.newton_max_iter = newton_max_iter;
  return cfg;
}

NoiseModel SimulationConfig::noise() const {
  return NoiseModel::make(parse_noise_family(noise_family), d, K, noise_amplitude);
}

GalerkinSpace SimulationConfig::space() const { return build_space(d, N, grid()); }

Forcing SimulationConfig::forcing(const GalerkinSpace& sp) const {
  if (forcing_mode == "zero" || forcing_coeffs.empty()) return Forcing::zero();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sp.size());
  for (std::size_t i = 0; i < forcing_coeffs.size(); ++i) c(static_cast<Eigen::Index>(i)) = forcing_coeffs[i];
  return Forcing::steady(sp.synthesize(c));
}

Eigen::VectorXd SimulationConfig::initial_coeffs(const GalerkinSpace& sp) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(sp.size());
  if (init_mode == "coeffs") {
    for (std::size_t i = 0; i < init_coeffs.size(); ++i) c(static_cast<Eigen::Index>(i)) = init_amplitude * init_coeffs[i];
  } else if (init_mode == "taylor_green") {
    GridField f(sp.dim(), sp.grid());
    for (std::size_t pt = 0; pt < sp.points(); ++pt) {
      const auto x = grid_point(sp.dim(), sp.grid(), pt);
      f.at(pt)[0] = init_amplitude * std::sin(x[0]) * std::cos(x[1]);
      f.at(pt)[1] = -init_amplitude * std::cos(x[0]) * std::sin(x[1]);
    }
    c = project_initial(sp, f).coeffs;
  }
  return c;
}

GalerkinSystem SimulationConfig::system() const {
  const GalerkinSpace sp = space();
  return GalerkinSystem(constitutive(), sp, noise(), forcing(sp));
}

StudySetup SimulationConfig::study_setup() const {
  const GalerkinSpace sp = space();
  StudySetup s{constitutive(), sp, noise(), forcing(sp), initial_coeffs(sp), step_config(), steps(), seed, n_traj,
               beta.value_or(0.0)};
  return s;
}

}  // namespace powerlaw
