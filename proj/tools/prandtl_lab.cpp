// prandtl_lab: command-line driver for the Blasius, eigenvalue, marching and
// decay experiments. Every run writes its artifacts plus the resolved config
// into the output directory.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prandtl/config.hpp"
#include "prandtl/diagnostics.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/initial_data.hpp"
#include "prandtl/io.hpp"
#include "prandtl/march.hpp"
#include "prandtl/spectral.hpp"

namespace fs = std::filesystem;
using namespace prandtl;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumeric = 3, kGuard = 4 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::IoError: return kConfig;
    case ErrorCode::GuardViolation: return kGuard;
    default: return kNumeric;
  }
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

BlasiusPtr solve_profile(const RunConfig& c, double z_max) {
  const BlasiusSection& b = c.blasius;
  return std::make_shared<const BlasiusProfile>(solve_blasius(z_max, b.step, b.shoot_tol, b.residual_tol));
}

Scheme scheme_of(const std::string& s) { return s == "be" ? Scheme::BackwardEuler : Scheme::CrankNicolson; }

bool has_item(const std::string& list, const std::string& item) {
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t next = list.find(',', pos);
    if (next == std::string::npos) next = list.size();
    std::string tok = list.substr(pos, next - pos);
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    if (tok == item) return true;
    pos = next + 1;
  }
  return false;
}

void report(const char* fmt, double a) {
  std::printf(fmt, a);
  std::fflush(stdout);
}

int cmd_blasius(const RunConfig& c, const std::string& out) {
  const BlasiusSection& b = c.blasius;
  const BlasiusPtr profile = solve_profile(c, b.z_max);
  const double psi_max = psi_for_tail(*profile, b.tail_tol);
  auto grid = std::make_shared<const PsiGrid>(PsiGrid::clustered(psi_max, b.cells));
  const SelfSimilarProfile ss = build_self_similar(profile, grid);
  const FarFieldFit fit = fit_far_field(*profile, 0.6 * b.z_max, 0.95 * b.z_max);

  blasius_csv(*profile).save(path_in(out, "blasius_profile.csv"));
  self_similar_csv(ss).save(path_in(out, "self_similar.csv"));
  Json j{{"b0", profile->b0},
         {"n1", profile->n1},
         {"n2", profile->n2},
         {"residual", profile->ode_residual},
         {"shoot_residual", profile->shoot_residual},
         {"shoot_iterations", profile->shoot_iterations},
         {"z_max", profile->z_max},
         {"step", profile->step},
         {"far_field_rms", fit.rms_residual},
         {"psi_max", psi_max},
         {"wbar_psi_max", ss.wbar[ss.wbar.size() - 1]},
         {"wbar_p0", ss.wbar_p[0]},
         {"config", to_json(c)}};
  write_text(path_in(out, "blasius.json"), dump(j));
  report("b0 = %.12f\n", profile->b0);
  return kOk;
}

int cmd_eigen(const RunConfig& c, const std::string& out) {
  const EigenSection& e = c.eigen;
  require(e.cells >= 16, ErrorCode::ConfigError, "eigen.cells must be at least 16");
  int levels = std::max(e.levels, 0);
  while (levels > 0 && (e.cells % (1 << levels) != 0 || (e.cells >> levels) < 16)) --levels;
  const BlasiusPtr profile = solve_profile(c, e.z_max);
  const double psi_max = spectral_psi_max(*profile, e.tail_tol, e.mass_tol);
  const EigenResult r = eigen_refinement(profile, psi_max, e.cells >> levels, levels, e.tol, e.shift, e.max_iters);

  const SelfSimilarProfile ss = build_self_similar(profile, r.grid);
  const OperatorMatrices mats = assemble(ss);
  Vector cand = eigenfunction_candidate(ss);
  cand[cand.size() - 1] = 0.0;
  const double cand_norm = quadrature_norm(cand, ss.a_mass);
  const double efun_err = quadrature_norm(r.eigvec - cand / cand_norm, ss.a_mass);
  double min_gap = std::numeric_limits<double>::infinity();
  for (const Vector& v : admissible_battery(ss, e.battery, c.seed)) min_gap = std::min(min_gap, coercivity_gap(mats, v));

  eigenvector_csv(r, *r.grid).save(path_in(out, "eigenvector.csv"));
  Json j = to_json(r);
  j["J"] = r.grid->cells();
  j["psi_tail"] = psi_for_tail(*profile, e.tail_tol);
  j["tail_weight_ratio"] = tail_weight_ratio(*profile, psi_max);
  j["eigenfunction_rel_error"] = efun_err;
  j["candidate_rq"] = rayleigh(mats, cand);
  j["coercivity"] = Json{{"vectors", e.battery}, {"seed", c.seed},
                         {"min_gap", e.battery > 0 ? Json(min_gap) : Json(nullptr)}};
  j["config"] = to_json(c);
  write_text(path_in(out, "eigen.json"), dump(j));
  report("lambda1 = %.10f\n", r.lambda1);
  return kOk;
}

void write_trajectory(const Trajectory& t, const std::string& out) {
  for (std::size_t k = 0; k < t.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
    omega_csv(t.snapshots[k]).save(path_in(out, name));
  }
  std::string lines;
  for (const GuardRecord& g : t.guard_log) lines += to_json(g).dump() + "\n";
  write_text(path_in(out, "guard_log.jsonl"), lines);
}

int cmd_solve(const RunConfig& c, const std::string& out) {
  const SolveSection& s = c.solve;
  require(s.outputs >= 1, ErrorCode::ConfigError, "solve.outputs must be positive");
  const BlasiusPtr profile = solve_profile(c, s.z_max);
  auto grid = std::make_shared<const PsiGrid>(PsiGrid::clustered(s.psi_max, s.cells));
  const SelfSimilarProfile ss = build_self_similar(profile, grid);
  const InitialSpec spec{s.initial, s.s, s.d, s.scale, s.csv};
  const OmegaField init = initial_field(spec, ss);

  MarchConfig cfg;
  cfg.d_shift = s.d;
  cfg.dxi = s.dxi;
  cfg.scheme = scheme_of(s.scheme);
  cfg.form = s.form == "full" ? Form::Full : Form::Perturbation;
  cfg.xi_end = init.xi + s.xi_span;
  cfg.guards.comparison = has_item(s.guards, "comparison");
  cfg.guards.wall_slope = has_item(s.guards, "wall_slope");
  cfg.guards.concavity = has_item(s.guards, "concavity");
  cfg.guards.fatal = s.fatal;
  cfg.picard_max = s.picard_max;
  cfg.picard_tol = s.picard_tol;
  std::vector<double> xis;
  for (int k = 1; k <= s.outputs; ++k) xis.push_back(init.xi + s.xi_span * k / s.outputs);

  Trajectory t;
  try {
    t = march(init, cfg, xis, &ss);
  } catch (const GuardViolationError& e) {
    write_trajectory(e.partial(), out);
    throw;
  }
  write_trajectory(t, out);

  const OmegaField& last = t.snapshots.back();
  Json j{{"initial", s.initial},
         {"steps", t.steps},
         {"xi0", init.xi},
         {"xi_end", last.xi},
         {"k1_initial", t.k1_initial},
         {"k2_initial", t.k2_initial},
         {"final_linf_vs_wbar", (last.values - ss.wbar).lpNorm<Eigen::Infinity>()}};
  if (s.initial == "shifted") {
    OmegaField exact = shifted_blasius_field(*profile, grid, s.s, s.d, last.xi);
    exact.values[grid->size() - 1] = 1.0;
    j["oracle_linf"] = (last.values - exact.values).lpNorm<Eigen::Infinity>();
  }
  std::size_t failures = 0;
  double min_wall = std::numeric_limits<double>::infinity(), max_p = -std::numeric_limits<double>::infinity();
  for (const GuardRecord& g : t.guard_log) {
    failures += g.ok() ? 0 : 1;
    min_wall = std::min(min_wall, g.wall_slope);
    max_p = std::max(max_p, g.max_p);
  }
  j["guard_failures"] = failures;
  j["min_wall_slope"] = t.guard_log.empty() ? Json(nullptr) : Json(min_wall);
  j["max_p"] = cfg.guards.concavity && !t.guard_log.empty() ? Json(max_p) : Json(nullptr);
  Json snaps = Json::array();
  for (std::size_t k = 0; k < t.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
    snaps.push_back(Json{{"xi", t.snapshots[k].xi}, {"x", t.snapshots[k].x()}, {"file", name}});
  }
  j["snapshots"] = snaps;
  j["config"] = to_json(c);
  write_text(path_in(out, "solve.json"), dump(j));
  report("final |omega - wbar|_inf = %.3e\n", j["final_linf_vs_wbar"].get<double>());
  return kOk;
}

int cmd_decay(const RunConfig& c, const std::string& out) {
  const DecaySection& d = c.decay;
  const BlasiusPtr profile = solve_profile(c, d.z_max);
  DecayStudy st;
  st.s = d.s;
  st.d = d.d;
  st.psi_max = d.psi_max;
  st.cells = d.cells;
  st.dxi = d.dxi;
  st.scheme = scheme_of(d.scheme);
  st.fit_lo = d.fit_lo;
  st.fit_hi = d.fit_hi;
  st.oracle = d.oracle;
  st.weighted = d.weighted;
  if (d.stations > 0) st.stations = log_stations(d.x_lo, d.x_hi, d.stations);
  if (d.initial != "shifted") {
    const InitialSpec spec{d.initial, d.s, d.d, 1.0, d.csv};
    st.initial = d.initial == "csv" ? read_initial_csv(d.csv) : sample_inlet(analytic_inlet(spec, *profile), 40.0, 8001);
  }
  BarrierParams bp;
  bp.alpha = d.alpha;
  bp.mu = d.mu;
  bp.delta = d.delta;
  bp.psi_cut = d.psi_cut;
  if (has_item(d.barriers, "phi1")) st.barriers.push_back({BarrierFamily::Phi1, bp});
  if (has_item(d.barriers, "phi2")) st.barriers.push_back({BarrierFamily::Phi2, bp});

  const DecayReport rep = run_decay(profile, st);
  norms_csv(rep.norms).save(path_in(out, "decay_norms.csv"));
  loglog_csv(rep.norms).save(path_in(out, "decay_loglog.csv"));
  if (!rep.oracle.empty()) norms_csv(rep.oracle).save(path_in(out, "oracle_norms.csv"));
  Json j = to_json(rep);
  j["config"] = to_json(c);
  write_text(path_in(out, "decay_report.json"), dump(j));
  if (rep.slopes[0]) report("slope_00 = %.4f\n", rep.slopes[0]->slope);
  return kOk;
}

int cmd_sharpness(const RunConfig& c, const std::string& out) {
  const SharpnessSection& h = c.sharpness;
  const BlasiusPtr profile = solve_profile(c, h.z_max);
  const std::vector<double> stations = h.stations > 0 ? log_stations(h.x_lo, h.x_hi, h.stations) : std::vector<double>{};
  const std::vector<NormRow> rows = sharpness_family(*profile, h.s, h.d, stations, h.samples);
  norms_csv(rows).save(path_in(out, "sharpness.csv"));
  Json slopes = Json::object();
  for (Derivative which : kDerivatives) {
    const std::string key = std::string("slope_") + derivative_name(which);
    try {
      slopes[key] = to_json(fit_decay(rows, h.x_lo, h.x_hi, which));
    } catch (const Error& e) {
      slopes[key] = Json{{"error", e.what()}};
    }
  }
  Json j{{"s", h.s}, {"d", h.d}, {"stations", stations}, {"slopes", slopes}, {"config", to_json(c)}};
  write_text(path_in(out, "sharpness.json"), dump(j));
  return kOk;
}

void diagnose(const std::string& command, const std::string& code, const std::string& message, int exit_code,
              const std::string& out_dir) {
  Json j{{"command", command}, {"error", code}, {"message", message}, {"exit_code", exit_code}};
  std::cerr << j.dump() << std::endl;
  if (!out_dir.empty() && fs::is_directory(out_dir)) {
    try {
      write_text(path_in(out_dir, "error.json"), dump(j));
    } catch (const Error&) {
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blasius boundary-layer laboratory: profile, principal eigenvalue, marching and decay fits"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir, preset;
  std::vector<std::string> sets;
  std::optional<double> step, z_max, dxi, s_shift, d_shift;
  std::optional<int> cells;
  std::optional<std::uint64_t> seed;
  bool print_config = false;
  app.add_option("--config", config_path, "INI config file");
  app.add_option("--out", out_dir, "output directory (overrides run.out)");
  app.add_option("--preset", preset, "named parameter bundle")->check(CLI::IsMember(preset_names()));
  app.add_option("--set", sets, "override, section.key=value (repeatable)");
  app.add_option("--step", step, "Blasius RK4 step");
  app.add_option("--z-max", z_max, "Blasius truncation for the selected command");
  app.add_option("--J", cells, "grid cells for the selected command");
  app.add_option("--dxi", dxi, "marching step in xi");
  app.add_option("--s", s_shift, "shift s of the sharpness family");
  app.add_option("--d", d_shift, "coordinate shift d");
  app.add_option("--seed", seed, "seed for random test batteries");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, const std::string&);
  };
  const std::vector<Command> commands{
      {"blasius", "solve the Blasius problem and export the self-similar profile", cmd_blasius},
      {"eigen", "principal eigenvalue of the linearized operator with refinement history", cmd_eigen},
      {"solve", "march the omega equation with structural guards", cmd_solve},
      {"decay", "march, reconstruct and fit decay rates against the Blasius flow", cmd_decay},
      {"sharpness", "closed-form norms of the shifted Blasius family", cmd_sharpness},
  };
  for (const Command& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diagnose("", "ConfigError", e.what(), kConfig, "");
    return kConfig;
  }

  const Command* chosen = nullptr;
  for (const Command& c : commands) {
    if (app.got_subcommand(c.name)) chosen = &c;
  }
  const std::string name = chosen->name;

  RunConfig config;
  std::string out;
  try {
    if (!preset.empty()) apply_preset(config, preset);
    if (!config_path.empty()) apply_ini_file(config, config_path);
    auto set = [&](const std::string& key, const std::string& value) { apply_override(config, key + "=" + value); };
    auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    if (step) set("blasius.step", num(*step));
    if (z_max) set(name + ".z_max", num(*z_max));
    if (cells) set(name + ".cells", std::to_string(*cells));
    if (dxi) set(name + ".dxi", num(*dxi));
    if (s_shift) set(name + ".s", num(*s_shift));
    if (d_shift) set(name + ".d", num(*d_shift));
    if (seed) set("run.seed", std::to_string(*seed));
    for (const std::string& o : sets) apply_override(config, o);
    if (!out_dir.empty()) config.out = out_dir;
    out = config.out;
    if (print_config) {
      std::cout << canonical(config);
      return kOk;
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create output directory " + out + ": " + ec.message());
    write_text(path_in(out, "config.ini"), canonical(config));
  } catch (const Error& e) {
    diagnose(name, std::string(to_string(e.code())), e.what(), kConfig, "");
    return kConfig;
  }

  try {
    return chosen->run(config, out);
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    diagnose(name, std::string(to_string(e.code())), e.what(), code, out);
    return code;
  } catch (const std::exception& e) {
    diagnose(name, "Internal", e.what(), kNumeric, out);
    return kNumeric;
  }
}
