#include "prandtl/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "prandtl/errors.hpp"

namespace prandtl {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string format(int v) { return std::to_string(v); }
std::string format(std::uint64_t v) { return std::to_string(v); }
std::string format(bool v) { return v ? "true" : "false"; }
std::string format(const std::string& v) { return v; }

[[noreturn]] void bad_value(const std::string& where, const std::string& value, const char* what) {
  fail(ErrorCode::ConfigError, where + ": cannot read `" + value + "` as " + what);
}

void parse(const std::string& where, const std::string& text, double& out) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || errno == ERANGE) bad_value(where, text, "a number");
  out = v;
}
void parse(const std::string& where, const std::string& text, int& out) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || errno == ERANGE || v < -1000000000L || v > 1000000000L) {
    bad_value(where, text, "an integer");
  }
  out = static_cast<int>(v);
}
void parse(const std::string& where, const std::string& text, std::uint64_t& out) {
  errno = 0;
  char* end = nullptr;
  if (!text.empty() && text[0] == '-') bad_value(where, text, "an unsigned integer");
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0' || errno == ERANGE) bad_value(where, text, "an unsigned integer");
  out = v;
}
void parse(const std::string& where, const std::string& text, bool& out) {
  if (text == "true" || text == "1" || text == "yes") {
    out = true;
  } else if (text == "false" || text == "0" || text == "no") {
    out = false;
  } else {
    bad_value(where, text, "a boolean");
  }
}
void parse(const std::string&, const std::string& text, std::string& out) { out = text; }

template <typename Visitor>
void visit(RunConfig& c, Visitor&& v) {
  v("run", "seed", c.seed);
  v("run", "out", c.out);

  BlasiusSection& b = c.blasius;
  v("blasius", "z_max", b.z_max);
  v("blasius", "step", b.step);
  v("blasius", "shoot_tol", b.shoot_tol);
  v("blasius", "residual_tol", b.residual_tol);
  v("blasius", "tail_tol", b.tail_tol);
  v("blasius", "cells", b.cells);

  EigenSection& e = c.eigen;
  v("eigen", "z_max", e.z_max);
  v("eigen", "cells", e.cells);
  v("eigen", "levels", e.levels);
  v("eigen", "tail_tol", e.tail_tol);
  v("eigen", "mass_tol", e.mass_tol);
  v("eigen", "tol", e.tol);
  v("eigen", "shift", e.shift);
  v("eigen", "max_iters", e.max_iters);
  v("eigen", "battery", e.battery);

  SolveSection& s = c.solve;
  v("solve", "initial", s.initial);
  v("solve", "csv", s.csv);
  v("solve", "s", s.s);
  v("solve", "d", s.d);
  v("solve", "scale", s.scale);
  v("solve", "z_max", s.z_max);
  v("solve", "psi_max", s.psi_max);
  v("solve", "cells", s.cells);
  v("solve", "dxi", s.dxi);
  v("solve", "xi_span", s.xi_span);
  v("solve", "outputs", s.outputs);
  v("solve", "scheme", s.scheme);
  v("solve", "form", s.form);
  v("solve", "guards", s.guards);
  v("solve", "fatal", s.fatal);
  v("solve", "picard_max", s.picard_max);
  v("solve", "picard_tol", s.picard_tol);

  DecaySection& d = c.decay;
  v("decay", "initial", d.initial);
  v("decay", "csv", d.csv);
  v("decay", "s", d.s);
  v("decay", "d", d.d);
  v("decay", "z_max", d.z_max);
  v("decay", "psi_max", d.psi_max);
  v("decay", "cells", d.cells);
  v("decay", "dxi", d.dxi);
  v("decay", "scheme", d.scheme);
  v("decay", "x_lo", d.x_lo);
  v("decay", "x_hi", d.x_hi);
  v("decay", "stations", d.stations);
  v("decay", "fit_lo", d.fit_lo);
  v("decay", "fit_hi", d.fit_hi);
  v("decay", "oracle", d.oracle);
  v("decay", "weighted", d.weighted);
  v("decay", "barriers", d.barriers);
  v("decay", "alpha", d.alpha);
  v("decay", "mu", d.mu);
  v("decay", "delta", d.delta);
  v("decay", "psi_cut", d.psi_cut);

  SharpnessSection& h = c.sharpness;
  v("sharpness", "s", h.s);
  v("sharpness", "d", h.d);
  v("sharpness", "z_max", h.z_max);
  v("sharpness", "x_lo", h.x_lo);
  v("sharpness", "x_hi", h.x_hi);
  v("sharpness", "stations", h.stations);
  v("sharpness", "samples", h.samples);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void check_choice(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  fail(ErrorCode::ConfigError, key + ": `" + value + "` is not one of " + list);
}

void check_list(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
  for (const std::string& item : split_list(value)) check_choice(key, item, allowed);
}

void at_least(const std::string& key, double value, double lo) {
  if (!(value >= lo)) fail(ErrorCode::ConfigError, key + " = " + format(value) + " is below " + format(lo));
}

void positive(const std::string& key, double value) {
  if (!(value > 0.0)) fail(ErrorCode::ConfigError, key + " must be positive");
}

void validate(const RunConfig& c) {
  at_least("blasius.cells", c.blasius.cells, 4);
  at_least("eigen.cells", c.eigen.cells, 16);
  at_least("solve.cells", c.solve.cells, 4);
  at_least("decay.cells", c.decay.cells, 4);
  at_least("eigen.levels", c.eigen.levels, 0);
  at_least("eigen.battery", c.eigen.battery, 0);
  at_least("solve.outputs", c.solve.outputs, 1);
  at_least("solve.picard_max", c.solve.picard_max, 1);
  at_least("decay.stations", c.decay.stations, 0);
  at_least("sharpness.stations", c.sharpness.stations, 0);
  at_least("sharpness.samples", c.sharpness.samples, 16);
  for (const auto& [key, value] :
       {std::pair<const char*, double>{"blasius.step", c.blasius.step}, {"blasius.shoot_tol", c.blasius.shoot_tol},
        {"blasius.tail_tol", c.blasius.tail_tol}, {"eigen.tol", c.eigen.tol}, {"eigen.tail_tol", c.eigen.tail_tol},
        {"eigen.mass_tol", c.eigen.mass_tol}, {"solve.dxi", c.solve.dxi}, {"solve.xi_span", c.solve.xi_span},
        {"solve.psi_max", c.solve.psi_max}, {"solve.d", c.solve.d}, {"solve.s", c.solve.s},
        {"decay.dxi", c.decay.dxi}, {"decay.psi_max", c.decay.psi_max}, {"decay.d", c.decay.d},
        {"decay.s", c.decay.s}, {"sharpness.s", c.sharpness.s}, {"sharpness.d", c.sharpness.d}}) {
    positive(key, value);
  }
  check_choice("solve.initial", c.solve.initial, {"equilibrium", "shifted", "scaled", "tanh", "erf", "convex", "csv"});
  check_choice("solve.scheme", c.solve.scheme, {"cn", "be"});
  check_choice("solve.form", c.solve.form, {"perturbation", "full"});
  check_list("solve.guards", c.solve.guards, {"comparison", "wall_slope", "concavity"});
  check_choice("decay.initial", c.decay.initial, {"shifted", "tanh", "erf", "csv"});
  check_choice("decay.scheme", c.decay.scheme, {"cn", "be"});
  check_list("decay.barriers", c.decay.barriers, {"phi1", "phi2"});
  if (c.solve.initial == "csv" && c.solve.csv.empty()) fail(ErrorCode::ConfigError, "solve.csv is required");
  if (c.decay.initial == "csv" && c.decay.csv.empty()) fail(ErrorCode::ConfigError, "decay.csv is required");
}

bool assign(RunConfig& c, const std::string& section, const std::string& key, const std::string& value,
            const std::string& where) {
  bool found = false;
  visit(c, [&](const char* sec, const char* k, auto& field) {
    if (found || section != sec || key != k) return;
    parse(where + " " + section + "." + key, value, field);
    found = true;
  });
  return found;
}

bool known_section(const std::string& name) {
  return name == "run" || name == "blasius" || name == "eigen" || name == "solve" || name == "decay" ||
         name == "sharpness";
}

}  // namespace

void apply_ini(RunConfig& c, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = origin + ":" + std::to_string(number);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(ErrorCode::ConfigError, where + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!known_section(section)) fail(ErrorCode::ConfigError, where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(ErrorCode::ConfigError, where + ": expected `key = value`");
    if (section.empty()) fail(ErrorCode::ConfigError, where + ": key outside of any section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!assign(c, section, key, value, where)) {
      fail(ErrorCode::ConfigError, where + ": unknown key " + section + "." + key);
    }
  }
  validate(c);
}

void apply_ini_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  apply_ini(c, text.str(), path);
}

void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    fail(ErrorCode::ConfigError, "override `" + assignment + "` is not of the form section.key=value");
  }
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!assign(c, section, key, value, "--set")) fail(ErrorCode::ConfigError, "unknown key " + section + "." + key);
  validate(c);
}

namespace {

const std::map<std::string, std::vector<std::string>>& presets() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"default", {}},
      {"equilibrium", {"solve.initial=equilibrium"}},
      {"us4",
       {"solve.initial=shifted", "solve.s=4", "solve.d=1", "solve.psi_max=20", "solve.xi_span=2",
        "solve.guards=comparison,wall_slope,concavity", "decay.initial=shifted", "decay.s=4", "decay.d=1"}},
      {"small",
       {"solve.initial=shifted", "solve.s=1.2", "solve.d=1", "solve.psi_max=14", "solve.xi_span=3",
        "decay.s=1.2", "decay.d=1", "decay.psi_max=14", "decay.x_lo=1", "decay.fit_lo=1", "decay.weighted=true",
        "decay.oracle=false"}},
      {"barrier",
       {"solve.initial=shifted", "solve.s=4", "solve.d=8", "solve.psi_max=20", "solve.xi_span=2", "decay.s=4",
        "decay.d=8", "decay.x_lo=0.5", "decay.fit_lo=5", "decay.barriers=phi1,phi2", "decay.oracle=false"}},
      {"tanh",
       {"solve.initial=tanh", "solve.guards=comparison,wall_slope,concavity", "solve.xi_span=3",
        "decay.initial=tanh", "decay.oracle=false"}},
      {"erf",
       {"solve.initial=erf", "solve.guards=comparison,wall_slope,concavity", "solve.xi_span=3",
        "decay.initial=erf", "decay.oracle=false"}},
      {"convex", {"solve.initial=convex", "solve.guards=comparison,wall_slope,concavity", "solve.fatal=true"}},
      {"coarse", {"eigen.cells=64", "eigen.levels=2"}},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : presets()) names.push_back(name);
  return names;
}

void apply_preset(RunConfig& c, const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end()) fail(ErrorCode::ConfigError, "unknown preset `" + name + "`");
  for (const std::string& o : it->second) apply_override(c, o);
}

std::vector<ConfigEntry> entries(const RunConfig& config) {
  RunConfig copy = config;
  std::vector<ConfigEntry> out;
  visit(copy, [&](const char* sec, const char* key, auto& field) { out.push_back({sec, key, format(field)}); });
  return out;
}

std::string canonical(const RunConfig& config) {
  std::string text, section;
  for (const ConfigEntry& e : entries(config)) {
    if (e.section != section) {
      if (!section.empty()) text += "\n";
      section = e.section;
      text += "[" + section + "]\n";
    }
    text += e.key + " = " + e.value + "\n";
  }
  return text;
}

}  // namespace prandtl
