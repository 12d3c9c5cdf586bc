#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace prandtl {

struct BlasiusSection {
  double z_max = 10.0;
  double step = 1e-3;
  double shoot_tol = 1e-10;
  double residual_tol = 1e-6;
  double tail_tol = 1e-3;
  int cells = 512;  // psi-grid for the self-similar export
};

struct EigenSection {
  double z_max = 10.0;
  int cells = 1024;  // finest grid
  int levels = 3;    // coarser nested grids in the refinement history
  double tail_tol = 1e-3;
  double mass_tol = 1e-10;
  double tol = 1e-10;
  double shift = 0.5;
  int max_iters = 500;
  int battery = 50;  // random admissible vectors for the coercivity sweep
};

struct SolveSection {
  std::string initial = "equilibrium";  // equilibrium, shifted, scaled, tanh, erf, convex, csv
  std::string csv;
  double s = 4.0;
  double d = 1.0;
  double scale = 0.9;
  double z_max = 16.0;
  double psi_max = 12.0;
  int cells = 512;
  double dxi = 1e-2;
  double xi_span = 1.0;  // xi_end = ln(d) + xi_span
  int outputs = 5;
  std::string scheme = "cn";  // cn, be
  std::string form = "perturbation";  // perturbation, full
  std::string guards = "comparison,wall_slope";
  bool fatal = true;
  int picard_max = 1;
  double picard_tol = 1e-10;
};

struct DecaySection {
  std::string initial = "shifted";  // shifted, tanh, erf, csv
  std::string csv;
  double s = 4.0;
  double d = 1.0;
  double z_max = 16.0;
  double psi_max = 20.0;
  int cells = 512;
  double dxi = 1e-2;
  std::string scheme = "cn";
  double x_lo = 5.0;
  double x_hi = 50.0;
  int stations = 12;
  double fit_lo = 5.0;
  double fit_hi = 50.0;
  bool oracle = true;
  bool weighted = false;
  std::string barriers;  // comma list of phi1, phi2
  double alpha = 0.5;
  double mu = 0.05;
  double delta = 0.5;
  double psi_cut = 8.0;
};

struct SharpnessSection {
  double s = 4.0;
  double d = 1.0;
  double z_max = 16.0;
  double x_lo = 10.0;
  double x_hi = 200.0;
  int stations = 16;
  int samples = 8000;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string out = "out";
  BlasiusSection blasius;
  EigenSection eigen;
  SolveSection solve;
  DecaySection decay;
  SharpnessSection sharpness;
};

/// INI text: `[section]` headers, `key = value` lines, `#` or `;` comments.
/// Unknown sections or keys and malformed values raise ConfigError.
void apply_ini(RunConfig& config, const std::string& text, const std::string& origin = "<string>");
void apply_ini_file(RunConfig& config, const std::string& path);

/// One `section.key=value` override.
void apply_override(RunConfig& config, const std::string& assignment);

/// Named bundles of overrides.
std::vector<std::string> preset_names();
void apply_preset(RunConfig& config, const std::string& name);

/// Canonical text: every key in fixed order, numbers with 17 significant
/// digits. Parsing the canonical text reproduces it byte for byte.
std::string canonical(const RunConfig& config);

struct ConfigEntry {
  std::string section;
  std::string key;
  std::string value;
};
std::vector<ConfigEntry> entries(const RunConfig& config);

}  // namespace prandtl
