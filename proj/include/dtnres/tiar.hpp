// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_TIAR_HPP
#define DTNRES_TIAR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dtnres/nepcore.hpp"

namespace dtnres
{

struct RitzPair
{
  cd lambda;
  VecC v;  // unit norm
  double backward_error = 0.0;
  bool converged = false;
  cd theta;  // Hessenberg eigenvalue, lambda = mu + 1/theta
  int iterations_to_tolerance = -1;
};

// Tensor infinite Arnoldi state. The j-th Krylov vector of the companion
// linearization has blocks y_i = Z a_j(i, :)^T, i = 0..j, with Z orthonormal.
class TiarState
{
public:
  TiarState(const SmfOperator &terms, const ShiftedFactorization &lu, const VecC &start);

  cd shift() const { return terms_->shift(); }
  int iterations() const { return k_; }
  const Eigen::MatrixXcd &basis() const { return Z_; }
  const std::vector<Eigen::MatrixXcd> &coefficients() const { return a_; }
  // (k+1) x k upper Hessenberg matrix.
  Eigen::MatrixXcd hessenberg() const;
  bool broken_down() const { return breakdown_; }

  // Exploit that the DtN terms only touch the boundary indices.
  void set_locality(bool on) { locality_ = on; }

  // sum_t A_t sum_{i=1}^{k+1} f_t^{(i)}(mu) x_i for the next step, with
  // x_i = y_{i-1}/i taken from the last Krylov vector.
  VecC derivative_sum(bool local) const;

  // One Arnoldi step; false on breakdown.
  bool expand();

  // Hessenberg eigenvalues mapped to lambda = mu + 1/theta (theta = 0 skipped),
  // optionally of an earlier step.
  std::vector<cd> ritz_values(int at = -1) const;
  // Pairs with lifted eigenvectors; `original` supplies the backward errors.
  std::vector<RitzPair> ritz_pairs(const DtnNep &original, double tolerance = 1e-9,
                                   int limit = -1) const;
  // For each target the pair whose Ritz value is nearest, ignoring values
  // within `exclude_radius` of any point in `exclude`. Arnoldi is prefix
  // consistent, so `at` < iterations() gives the pairs of that earlier step.
  std::vector<RitzPair> ritz_pairs_near(const DtnNep &original, const std::vector<cd> &targets,
                                        const std::vector<cd> &exclude, double exclude_radius,
                                        double tolerance = 1e-9, int at = -1) const;

  std::size_t basis_bytes() const;
  std::size_t coefficient_bytes() const;

private:
  bool append_basis_column(VecC x0, Eigen::VectorXcd &h, double &beta);
  bool lift(const DtnNep &original, int k, cd theta, const Eigen::VectorXcd &s,
            double tolerance, RitzPair &out) const;

  const SmfOperator *terms_;
  const ShiftedFactorization *lu_;
  int n_;
  int k_ = 0;
  Eigen::MatrixXcd Z_;
  std::vector<Eigen::MatrixXcd> a_;
  Eigen::MatrixXcd H_;
  bool breakdown_ = false;
  bool locality_ = true;
  // q^T Z and q^H Z restricted to the boundary rows.
  Eigen::MatrixXcd qtZ_, qhZ_;
};

struct TiarOptions
{
  int max_iterations = 80;
  double tolerance = 1e-9;
  bool cancel = false;
  std::optional<Region> pole_region;
  std::uint64_t seed = 1;
  bool locality = true;
  // History: record the Ritz pair nearest each tracked target every
  // `history_stride` iterations (0 disables).
  int history_stride = 0;
  std::vector<cd> track;
};

struct HistoryRow
{
  int iteration;
  int target;  // index into TiarOptions::track
  cd lambda;
  double backward_error;
};

struct TiarResult
{
  cd shift;
  std::vector<RitzPair> pairs;  // sorted by backward error
  std::vector<HistoryRow> history;
  std::vector<Pole> cancelled;
  int iterations = 0;
  bool breakdown = false;
  std::string diagnostic;

  std::vector<RitzPair> converged() const;
};

// Default pole-search box around the shift used when cancelling.
Region default_cancel_region(cd mu);

VecC seeded_start_vector(int n, std::uint64_t seed);

TiarResult run(const DtnNep &nep, cd mu, const TiarOptions &options = {});

}  // namespace dtnres

#endif  // DTNRES_TIAR_HPP
