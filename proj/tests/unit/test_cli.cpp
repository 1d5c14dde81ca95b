// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "dtnres/config.hpp"
#include "dtnres/driver.hpp"
#include "dtnres/errors.hpp"
#include "dtnres/specfun.hpp"

using namespace dtnres;

namespace
{

config::RunConfig random_config(std::mt19937_64 &gen)
{
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::uniform_int_distribution<int> small(1, 6);
  config::RunConfig c;
  const int kind = small(gen) % 4;
  c.geometry.kind = static_cast<fem::GeometryConfig::Kind>(kind);
  c.geometry.R = u(gen);
  c.geometry.d = u(gen) - 2.0;
  c.geometry.s = u(gen);
  c.geometry.eta = u(gen);
  c.geometry.a = u(gen) + 1.0 / 3.0;
  c.geometry.degree = small(gen);
  c.geometry.levels = small(gen) - 1;
  c.geometry.nu_max = 3 * small(gen);
  c.geometry.ring_layers = small(gen);
  if (c.geometry.kind == fem::GeometryConfig::Kind::Custom)
  {
    c.geometry.regions.push_back({{u(gen) - 2.0, u(gen) - 2.0}, u(gen) / 7.0, u(gen)});
  }
  c.shift = cd(u(gen), -u(gen) / 3.0);
  c.iterations = 10 * small(gen);
  c.tolerance = 1e-9 * u(gen);
  c.cancel = small(gen) % 2 == 0;
  if (small(gen) % 2)
  {
    c.pole_region = Region{0.5, 0.5 + u(gen), -u(gen), 0.0};
  }
  c.seed = gen();
  if (small(gen) % 2)
  {
    c.output = "out_" + std::to_string(small(gen)) + ".csv";
  }
  c.history_stride = small(gen) - 1;
  for (int i = 0; i < small(gen) - 1; ++i)
  {
    c.track.emplace_back(u(gen), -u(gen) / 10.0);
  }
  if (small(gen) % 2)
  {
    c.reference_geometry = small(gen) % 2 ? "dimer" : "single-disk";
    c.reference = {small(gen), small(gen)};
  }
  if (small(gen) % 2)
  {
    c.sweep_axis = "p";
    c.sweep_values = {2, 3, small(gen) + 3};
  }
  return c;
}

int run_cli(const std::function<int(std::ostream &, std::ostream &)> &cmd, std::string &out)
{
  std::ostringstream o, e;
  const int code = cli::guarded(e, [&] { return cmd(o, e); });
  out = o.str();
  return code;
}

}  // namespace

TEST_CASE("config print/parse round trip")
{
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 200; ++trial)
  {
    const config::RunConfig c = random_config(gen);
    const std::string text = config::print(c);
    const config::RunConfig back = config::parse_string(text);
    INFO(text);
    CHECK(back == c);
    CHECK(config::print(back) == text);
  }
}

TEST_CASE("config parse errors")
{
  CHECK_THROWS_AS(config::parse_string("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_string("iterations = ten\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_string("shift = 9\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_string("shift 9 -0.1\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_string("geometry = torus\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_string("cancel = maybe\n"), ConfigError);
  CHECK_THROWS_AS(config::load("/nonexistent/run.cfg"), ConfigError);

  const config::RunConfig c = config::parse_string("# comment\n\nshift = 3 -0.5\n  seed = 7\n");
  CHECK(c.shift == cd(3.0, -0.5));
  CHECK(c.seed == 7u);
}

TEST_CASE("config validation")
{
  config::RunConfig c;
  CHECK_NOTHROW(config::validate(c));
  auto bad = [&](auto mutate) {
    config::RunConfig x;
    mutate(x);
    CHECK_THROWS_AS(config::validate(x), ConfigError);
  };
  bad([](config::RunConfig &x) { x.iterations = 0; });
  bad([](config::RunConfig &x) { x.iterations = 151; });
  bad([](config::RunConfig &x) { x.tolerance = 0.0; });
  bad([](config::RunConfig &x) { x.geometry.R = -1.0; });
  bad([](config::RunConfig &x) { x.geometry.a = 0.0; });
  bad([](config::RunConfig &x) { x.geometry.degree = 0; });
  bad([](config::RunConfig &x) { x.geometry.nu_max = -1; });
  bad([](config::RunConfig &x) { x.shift = cd(-1.0, 0.0); });
  bad([](config::RunConfig &x) { x.pole_region = Region{-1.0, 1.0, -1.0, 0.0}; });
  bad([](config::RunConfig &x) { x.sweep_axis = "q"; });
  bad([](config::RunConfig &x) { x.reference_geometry = "trimer"; });
  bad([](config::RunConfig &x) { x.geometry.kind = fem::GeometryConfig::Kind::Custom; });
}

TEST_CASE("shipped configs parse and validate")
{
  for (const char *name : {"single_disk", "dimer", "dimer_cancel", "empty", "sweep_h", "sweep_p",
                           "sweep_numax"})
  {
    INFO(name);
    const config::RunConfig c =
        config::load(std::string(DTNRES_SOURCE_DIR) + "/configs/" + name + ".cfg");
    CHECK_NOTHROW(config::validate(c));
  }
}

TEST_CASE("exit codes")
{
  CHECK(cli::exit_code(ConfigError("x")) == cli::kConfigError);
  CHECK(cli::exit_code(RangeError("x")) == cli::kConfigError);
  CHECK(cli::exit_code(DomainError("x")) == cli::kConfigError);
  CHECK(cli::exit_code(GeometryError("x")) == cli::kGeometryError);
  CHECK(cli::exit_code(ConvergenceError("x")) == cli::kNumericalFailure);
  CHECK(cli::exit_code(SingularError("x")) == cli::kNumericalFailure);
  CHECK(cli::exit_code(std::runtime_error("x")) == cli::kNumericalFailure);

  std::ostringstream err;
  CHECK(cli::guarded(err, [] { return 0; }) == 0);
  CHECK(cli::guarded(err, []() -> int { throw GeometryError("touching"); }) ==
        cli::kGeometryError);
  CHECK(err.str().find("touching") != std::string::npos);
}

TEST_CASE("eval-hankel output")
{
  std::string out;
  REQUIRE(run_cli([](auto &o, auto &e) { return cli::cmd_eval_hankel(3, {2.0, -0.5}, 1, o, e); },
                  out) == 0);
  std::istringstream is(out);
  std::string header, line;
  std::getline(is, header);
  std::getline(is, line);
  CHECK(header == "re,im");
  const auto comma = line.find(',');
  const cd h(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  CHECK(std::abs(h - specfun::hankel1(3, {2.0, -0.5})) == 0.0);

  REQUIRE(run_cli([](auto &o, auto &e) { return cli::cmd_eval_hankel(0, {2.0, 0.0}, 5, o, e); },
                  out) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 6);
  CHECK(run_cli([](auto &o, auto &e) { return cli::cmd_eval_hankel(2, {2.0, 0.0}, 5, o, e); },
                out) == cli::kConfigError);
  CHECK(run_cli([](auto &o, auto &e) { return cli::cmd_eval_hankel(0, {0.0, 0.0}, 1, o, e); },
                out) == cli::kConfigError);
}

TEST_CASE("solve is deterministic for a fixed seed")
{
  config::RunConfig c = config::parse_string(
      "geometry = single-disk\nR = 1\nd = 0.5\neta = 2\na = 2\ndegree = 3\nlevels = 0\n"
      "nu_max = 12\nshift = 4 -0.2\niterations = 30\n");
  std::string first, second, other;
  REQUIRE(run_cli([&](auto &o, auto &e) { return cli::cmd_solve(c, o, e, true, true); }, first) ==
          0);
  REQUIRE(run_cli([&](auto &o, auto &e) { return cli::cmd_solve(c, o, e, true, true); },
                  second) == 0);
  CHECK(first == second);
  CHECK(first.find("\"pairs\"") != std::string::npos);

  c.seed = 99;
  REQUIRE(run_cli([&](auto &o, auto &e) { return cli::cmd_solve(c, o, e, true, true); }, other) ==
          0);
  CHECK(other != first);
}

TEST_CASE("find-poles and derivtable commands")
{
  config::RunConfig c = config::parse_string(
      "geometry = empty\na = 2\nnu_max = 6\nshift = 1.15 -0.8\npole_region = 0.6 1.7 -1.35 "
      "-0.25\n");
  std::string out;
  REQUIRE(run_cli([&](auto &o, auto &e) { return cli::cmd_find_poles(c, o, e); }, out) == 0);
  CHECK(out.rfind("nu,re,im,residual\n", 0) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') >= 2);

  REQUIRE(run_cli([&](auto &o, auto &e) { return cli::cmd_derivtable(c, 5, o, e); }, out) == 0);
  CHECK(std::count(out.begin(), out.end(), '\n') == 7);
  CHECK(run_cli([&](auto &o, auto &e) { return cli::cmd_derivtable(c, -1, o, e); }, out) ==
        cli::kConfigError);
}

TEST_CASE("export-matrices writes a readable bundle")
{
  config::RunConfig c = config::parse_string(
      "geometry = single-disk\ndegree = 2\nlevels = 0\nnu_max = 5\n");
  std::string out;
  REQUIRE(run_cli([&](auto &o, auto &e) { return cli::cmd_export_matrices(c, o, e); }, out) ==
          0);
  std::istringstream is(out);
  const DtnNep nep = read_bundle(is);
  CHECK(nep.nu_max() == 5);
  CHECK(nep.radius() == doctest::Approx(2.0));
  CHECK(nep.size() > nep.boundary_size());
}

TEST_CASE("geometry errors map to exit code 4")
{
  config::RunConfig c = config::parse_string(
      "geometry = single-disk\nR = 1\nd = 0.9\na = 1.5\ndegree = 2\nlevels = 0\n");
  std::string out;
  CHECK(run_cli([&](auto &o, auto &e) { return cli::cmd_export_matrices(c, o, e); }, out) ==
        cli::kGeometryError);
}
