// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// Command line driver. Exit codes: 0 ok, 2 config error, 3 numerical
// failure, 4 geometry error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dtnres/config.hpp"
#include "dtnres/driver.hpp"
#include "dtnres/errors.hpp"

using namespace dtnres;

int main(int argc, char **argv)
{
  CLI::App app{"Scattering resonances via a DtN nonlinear eigenvalue problem"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "run configuration file");
  app.add_option("--out", out_path, "output file (default: stdout)");
  app.add_option("--seed", seed, "start vector seed (overrides the config)");

  bool json = false, all_pairs = false;
  auto *solve = app.add_subcommand("solve", "compute resonances near the configured shift");
  solve->add_flag("--json", json, "write the full result as JSON");
  solve->add_flag("--all", all_pairs, "write every Ritz pair, not only converged ones");

  app.add_subcommand("sweep", "relative error of reference eigenvalues along one axis");
  app.add_subcommand("bench", "reference values against computed ones");

  int nu = 0, count = 1;
  double re = 1.0, im = 0.0;
  auto *hankel = app.add_subcommand("eval-hankel", "first-kind Hankel function values");
  hankel->add_option("--nu", nu, "order");
  hankel->add_option("--re", re, "real part of the argument");
  hankel->add_option("--im", im, "imaginary part of the argument");
  hankel->add_option("--count", count, "evaluate orders 0..count-1 instead");

  int k_max = 10;
  auto *table = app.add_subcommand("derivtable", "Taylor coefficients of the DtN terms at the shift");
  table->add_option("--kmax", k_max, "highest coefficient order");

  app.add_subcommand("find-poles", "Hankel zeros in the pole region");
  app.add_subcommand("export-matrices", "write the matrix bundle of the configured geometry");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  return cli::guarded(std::cerr, [&]() -> int {
    std::optional<config::RunConfig> cfg;
    if (!config_path.empty())
    {
      cfg = config::load(config_path);
    }
    if (cfg)
    {
      if (seed)
      {
        cfg->seed = *seed;
      }
      if (!out_path.empty())
      {
        cfg->output = out_path;
      }
    }
    if (cmd == "eval-hankel")
    {
      return cli::cmd_eval_hankel(nu, {re, im}, count, std::cout, std::cerr);
    }
    if (cmd == "bench")
    {
      // Without a configuration only the exact-relation table is produced.
      std::ofstream file;
      std::ostream *os = &std::cout;
      if (!cfg && !out_path.empty())
      {
        file.open(out_path);
        if (!file)
        {
          throw ConfigError("cannot write '" + out_path + "'");
        }
        os = &file;
      }
      return cli::cmd_bench(cfg ? &*cfg : nullptr, *os, std::cerr);
    }
    if (!cfg)
    {
      throw ConfigError(cmd + " needs --config");
    }
    if (cmd == "solve")
    {
      return cli::cmd_solve(*cfg, std::cout, std::cerr, json, all_pairs);
    }
    if (cmd == "sweep")
    {
      return cli::cmd_sweep(*cfg, std::cout, std::cerr);
    }
    if (cmd == "derivtable")
    {
      return cli::cmd_derivtable(*cfg, k_max, std::cout, std::cerr);
    }
    if (cmd == "find-poles")
    {
      return cli::cmd_find_poles(*cfg, std::cout, std::cerr);
    }
    return cli::cmd_export_matrices(*cfg, std::cout, std::cerr);
  });
}
