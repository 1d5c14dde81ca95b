// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_REFBENCH_HPP
#define DTNRES_REFBENCH_HPP

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace dtnres::refbench
{

using cd = std::complex<double>;

enum class Source
{
  ExactRelation,
  Tabulated
};

struct ReferenceResonance
{
  int id;
  std::optional<int> m;  // Fourier mode (single disk only)
  cd lambda;
  Source source;
  std::string geometry;  // "single-disk" or "dimer"
  std::optional<cd> seed;  // Newton seed for exact-relation records
  std::string kind;        // "interior", "exterior" or empty
};

// J_m(lambda eta R) H_m'(lambda R) - eta J_m'(lambda eta R) H_m(lambda R).
cd disk_relation(int m, cd lambda, double R, double eta);
// d/dlambda of disk_relation.
cd disk_relation_derivative(int m, cd lambda, double R, double eta);

// Newton iteration on disk_relation, stopped when |step| <= 1e-14 |lambda|.
cd newton_resonance(int m, cd seed, double R, double eta, std::vector<cd> *trace = nullptr);

// Embedded reference records for "single-disk" (R = 1, eta = 2) or "dimer".
std::vector<ReferenceResonance> reference_table(const std::string &geometry);
const ReferenceResonance &reference(const std::string &geometry, int id);

}  // namespace dtnres::refbench

#endif  // DTNRES_REFBENCH_HPP
