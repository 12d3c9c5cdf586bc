#include <doctest.h>

#include <cstdio>
#include <functional>
#include <set>

#include "prandtl/config.hpp"
#include "prandtl/errors.hpp"
#include "prandtl/io.hpp"

using namespace prandtl;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("config: defaults match the documented values") {
  const RunConfig c;
  CHECK(c.blasius.z_max == 10.0);
  CHECK(c.blasius.step == 1e-3);
  CHECK(c.blasius.shoot_tol == 1e-10);
  CHECK(c.eigen.cells == 1024);
  CHECK(c.eigen.tail_tol == 1e-3);
  CHECK(c.eigen.battery == 50);
  CHECK(c.solve.dxi == 1e-2);
  CHECK(c.decay.cells == 512);
  CHECK(c.decay.x_lo == 5.0);
  CHECK(c.decay.x_hi == 50.0);
  CHECK(c.sharpness.x_hi == 200.0);
}

TEST_CASE("config: ini, overrides and presets") {
  RunConfig c;
  apply_ini(c, "# comment\n[run]\nseed = 42\n\n[solve]\n; whole-line comment\ninitial = tanh\ndxi=0.005\nfatal = false\n");
  CHECK(c.seed == 42);
  CHECK(c.solve.initial == "tanh");
  CHECK(c.solve.dxi == 0.005);
  CHECK_FALSE(c.solve.fatal);
  apply_override(c, "eigen.cells=256");
  CHECK(c.eigen.cells == 256);
  apply_preset(c, "small");
  CHECK(c.decay.s == 1.2);
  CHECK(c.decay.weighted);
  for (const std::string& name : preset_names()) {
    RunConfig p;
    CHECK_NOTHROW(apply_preset(p, name));
  }
}

TEST_CASE("config: malformed input is a ConfigError") {
  RunConfig c;
  CHECK(code_of([&] { apply_ini(c, "[nosuch]\nx=1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_ini(c, "[solve]\nnosuch=1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_ini(c, "[solve]\ndxi=abc\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_ini(c, "[solve\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_ini(c, "dxi=1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_override(c, "solve.scheme=rk4"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_override(c, "solve.cells=12.5"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_override(c, "nodot=1"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_preset(c, "nosuch"); }) == ErrorCode::ConfigError);
  CHECK(code_of([&] { apply_ini_file(c, "/nonexistent.ini"); }) == ErrorCode::ConfigError);
}

TEST_CASE("config: canonical text round trips byte for byte") {
  RunConfig c;
  apply_preset(c, "barrier");
  apply_override(c, "solve.dxi=0.1");
  apply_override(c, "run.seed=18446744073709551615");
  const std::string text = canonical(c);
  RunConfig d;
  apply_ini(d, text);
  CHECK(canonical(d) == text);
  CHECK(d.solve.dxi == 0.1);
  CHECK(d.seed == 18446744073709551615ull);
  // JSON keeps types and the full seed
  const Json j = to_json(d);
  CHECK(j["run"]["seed"].get<std::uint64_t>() == 18446744073709551615ull);
  CHECK(j["solve"]["dxi"].get<double>() == 0.1);
  CHECK(j["solve"]["fatal"].get<bool>());
  CHECK(j["solve"]["scheme"].get<std::string>() == "cn");
}

TEST_CASE("csv writer: header, widths, exact numbers") {
  CsvWriter w({"a", "b"});
  w.row({0.1, 1e-300});
  CHECK(w.str() == "a,b\n0.10000000000000001,1e-300\n");
  CHECK_THROWS_AS(w.row({1.0}), Error);
  CHECK(code_of([] { write_text("/nonexistent/dir/x.txt", "x"); }) == ErrorCode::IoError);
}

TEST_CASE("errors: every code has a distinct name") {
  std::set<std::string> names;
  for (int k = 0; k <= static_cast<int>(ErrorCode::IoError); ++k) names.insert(std::string(to_string(static_cast<ErrorCode>(k))));
  CHECK(names.size() == static_cast<std::size_t>(ErrorCode::IoError) + 1);
}
