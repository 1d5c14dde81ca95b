// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_CONFIG_HPP
#define DTNRES_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dtnres/fem.hpp"
#include "dtnres/nepcore.hpp"

namespace dtnres::config
{

// Run configuration read from a `key = value` text file. Lines starting with
// '#' are comments. Complex values are written as two numbers "re im".
// See docs/config.md for the key list.
struct RunConfig
{
  fem::GeometryConfig geometry;
  std::string geometry_file;  // geometry keys were read from this file

  cd shift{9.0, -0.1};
  int iterations = 80;
  double tolerance = 1e-9;
  bool cancel = false;
  std::optional<Region> pole_region;
  std::uint64_t seed = 1;

  std::string output;
  std::string history_output;
  int history_stride = 0;
  std::vector<cd> track;

  // Reference ids (rows of the single-disk or dimer table) for sweeps and bench.
  std::string reference_geometry;
  std::vector<int> reference;
  std::string sweep_axis;  // h, p, numax or iters
  std::vector<int> sweep_values;

  bool operator==(const RunConfig &other) const;
};

// Parse from a stream; `base_dir` resolves a relative geometry_file.
RunConfig parse(std::istream &is, const std::string &base_dir = "");
RunConfig parse_string(const std::string &text);
RunConfig load(const std::string &path);

// Canonical text form; parse(print(c)) == c.
std::string print(const RunConfig &config);

// Range checks against the module preconditions. Throws ConfigError.
void validate(const RunConfig &config);

const char *geometry_name(fem::GeometryConfig::Kind kind);

}  // namespace dtnres::config

#endif  // DTNRES_CONFIG_HPP
