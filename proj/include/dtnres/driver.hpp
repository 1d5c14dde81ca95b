// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_DRIVER_HPP
#define DTNRES_DRIVER_HPP

#include <exception>
#include <functional>
#include <iosfwd>
#include <vector>

#include "dtnres/config.hpp"
#include "dtnres/tiar.hpp"

namespace dtnres::cli
{

enum ExitCode
{
  kOk = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
  kGeometryError = 4,
};

int exit_code(const std::exception &e);

// Runs `body`, printing any exception to `err` and mapping it to an exit code.
int guarded(std::ostream &err, const std::function<int()> &body);

TiarOptions tiar_options(const config::RunConfig &config);
TiarResult solve(const config::RunConfig &config, const DtnNep &nep);

// CSV writers: complex numbers as two columns, 17 significant digits.
void write_pairs_csv(std::ostream &os, const std::vector<RitzPair> &pairs);
void write_history_csv(std::ostream &os, const TiarResult &result);
void write_result_json(std::ostream &os, const TiarResult &result, int dof_count);

struct SweepRow
{
  int value;
  int dof_count;
  std::vector<cd> lambda;  // nearest Ritz value per reference
  std::vector<double> relative_error;
  std::vector<double> backward_error;
};

// Relative error per reference eigenvalue along one axis (h, p, numax, iters).
std::vector<SweepRow> sweep(const config::RunConfig &config);
void write_sweep_csv(std::ostream &os, const config::RunConfig &config,
                     const std::vector<SweepRow> &rows);

// The tracked reference eigenvalues of a configuration.
std::vector<cd> reference_values(const config::RunConfig &config);

// Subcommands. Output goes to `out`, diagnostics to `err`.
int cmd_solve(const config::RunConfig &config, std::ostream &out, std::ostream &err,
              bool json = false, bool all_pairs = false);
int cmd_sweep(const config::RunConfig &config, std::ostream &out, std::ostream &err);
int cmd_bench(const config::RunConfig *config, std::ostream &out, std::ostream &err);
int cmd_eval_hankel(int nu, cd z, int count, std::ostream &out, std::ostream &err);
int cmd_derivtable(const config::RunConfig &config, int k_max, std::ostream &out,
                   std::ostream &err);
int cmd_find_poles(const config::RunConfig &config, std::ostream &out, std::ostream &err);
int cmd_export_matrices(const config::RunConfig &config, std::ostream &out, std::ostream &err);

}  // namespace dtnres::cli

#endif  // DTNRES_DRIVER_HPP
