// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_NEPCORE_HPP
#define DTNRES_NEPCORE_HPP

#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dtnres/derivtab.hpp"

namespace dtnres
{

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<cd>;
using VecC = Eigen::VectorXcd;

// Helmholtz resonance problem with DtN boundary condition,
//
//   T(lambda) = A - lambda^2 M - sum_{|nu| <= nu_max} a g_nu(lambda) Q^nu,
//   g_nu(lambda) = lambda H'_nu(a lambda) / H_nu(a lambda),
//   Q^nu = conj(q^nu) (q^nu)^T,  q^{-nu} = conj(q^nu).
//
// q^nu is supported on the first N_a indices and stored as an N_a x (nu_max+1)
// block. Combining +-nu gives the real symmetric W_nu = 2 (c c^T + s s^T)
// with q = c + i s (W_0 = q^0 q^0^T), so T is complex symmetric.
class DtnNep
{
public:
  DtnNep(SpMat A, SpMat M, Eigen::MatrixXcd q, double a);

  int size() const { return static_cast<int>(A_.rows()); }
  int boundary_size() const { return static_cast<int>(q_.rows()); }
  int nu_max() const { return static_cast<int>(q_.cols()) - 1; }
  double radius() const { return a_; }
  const SpMat &A() const { return A_; }
  const SpMat &M() const { return M_; }
  const Eigen::MatrixXcd &q() const { return q_; }

  // Cached 2-norm estimates (30 power iterations, done at construction).
  double norm_A() const { return norm_A_; }
  double norm_M() const { return norm_M_; }
  // ||q^nu||^2.
  double q_norm2(int nu) const { return q_norm2_[std::abs(nu)]; }

  // g_nu(lambda) for 0 <= nu <= nu_max; PoleError at a Hankel zero.
  std::vector<cd> dtn_symbols(cd lambda) const;

  // W_nu x restricted to the boundary block (length N_a in and out).
  VecC apply_boundary_mode(int nu, const VecC &xb) const;

  VecC apply(cd lambda, const VecC &v) const;
  // c_A A + c_M M + sum_nu c_nu W_nu as one sparse matrix with the dense
  // boundary block included.
  SpMatC combine(cd c_A, cd c_M, const std::vector<cd> &c_nu) const;
  SpMatC matrix(cd lambda) const;
  Eigen::MatrixXcd dense(cd lambda) const;

private:
  SpMat A_, M_;
  Eigen::MatrixXcd q_;
  double a_;
  double norm_A_ = 0.0, norm_M_ = 0.0;
  std::vector<double> q_norm2_;
};

VecC apply_T(const DtnNep &nep, cd lambda, const VecC &v);

// ||T(lambda) v|| / alpha(lambda, v) with the term-norm scale alpha; v is
// normalised internally.
double backward_error(const DtnNep &nep, cd lambda, const VecC &v);

// LU factorization of a sparse complex matrix with iterative refinement to
// ||K x - b|| <= 1e-10 ||b||. Solves are serialised internally.
class ShiftedFactorization
{
public:
  ShiftedFactorization(SpMatC K, cd mu);
  ~ShiftedFactorization();
  ShiftedFactorization(ShiftedFactorization &&) noexcept;
  ShiftedFactorization &operator=(ShiftedFactorization &&) noexcept;

  cd shift() const { return mu_; }
  int size() const { return static_cast<int>(K_.rows()); }
  VecC solve(const VecC &b) const;
  // Relative residual of the last solve.
  double last_residual() const;

private:
  struct Impl;
  SpMatC K_;
  cd mu_;
  std::unique_ptr<Impl> impl_;
};

// Factorizes T(mu). Refuses mu within 1e-6 of a Hankel zero (PoleError).
ShiftedFactorization factorize(const DtnNep &nep, cd mu);

//
// Split matrix-function form T(lambda) = sum_j A_j f_j(lambda) with
// A_1 = A, f_1 = 1; A_2 = M, f_2 = -lambda^2; A_{nu} = W_nu, f = -a g_nu,
// optionally multiplied by p(lambda) = prod_i (lambda - z_i).
//
struct SmfTerm
{
  enum class Kind
  {
    Stiffness,
    Mass,
    Boundary
  };
  Kind kind;
  int nu = 0;
};

class SmfOperator
{
public:
  SmfOperator(const DtnNep &nep, DerivativeTable table);

  const DtnNep &nep() const { return *nep_; }
  const DerivativeTable &table() const { return table_; }
  cd shift() const { return table_.shift(); }
  int depth() const { return table_.k_max(); }
  const std::vector<cd> &poles() const { return table_.poles(); }
  const std::vector<SmfTerm> &terms() const { return terms_; }

  // Taylor coefficient f_t^{(j)}(mu)/j! of term t.
  cd coeff(int t, int j) const;
  const std::vector<cd> &stiffness_coeffs() const { return cA_; }
  const std::vector<cd> &mass_coeffs() const { return cM_; }

  // f_t(lambda) from the truncated Taylor series.
  cd value(int t, cd lambda) const;
  VecC apply_term(int t, const VecC &v) const;
  // sum_t A_t f_t(lambda) v with Taylor-summed f_t.
  VecC apply(cd lambda, const VecC &v) const;
  // The matrix at the shift (input to the factorization).
  SpMatC shift_matrix() const;

private:
  const DtnNep *nep_;
  DerivativeTable table_;
  std::vector<SmfTerm> terms_;
  std::vector<cd> cA_, cM_;
};

// Plain terms of T at mu (Taylor depth k_max).
SmfOperator smf_terms(const DtnNep &nep, cd mu, int k_max);
// Terms of (lambda - z_1)...(lambda - z_p) T(lambda); the table carries the poles.
SmfOperator cancelled_terms(const DerivativeTable &table, const DtnNep &nep);

// sum_t A_t f_t(lambda) v with exact f_t (no Taylor truncation).
VecC smf_apply_exact(const DtnNep &nep, cd lambda, const VecC &v);

//
// Hankel zeros: lambda with H_nu(a lambda) = 0.
//
struct Pole
{
  cd z;
  int nu;
  double residual;  // |H_nu(a z)| / |H'_nu(a z)|
};

struct Region
{
  double re_min, re_max, im_min, im_max;
  bool contains(cd z) const
  {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct PoleSet
{
  std::vector<Pole> poles;
  std::vector<cd> locations() const;
  int count(int nu) const;
};

// All zeros of H_nu(a lambda), 0 <= nu <= nu_max, inside the region.
PoleSet find_poles(double a, int nu_max, const Region &region);

// Newton-polishes a zero of H_nu(a z) from a seed.
Pole polish_pole(double a, int nu, cd seed);

//
// Matrix-family bundle: a text file with a header line
//   dtnres-bundle 1 N N_a a nu_max nnzA nnzM
// followed by nnzA lines "i j value", nnzM lines "i j value" and N_a lines
// holding nu_max+1 (re, im) pairs.
//
void write_bundle(std::ostream &os, const DtnNep &nep);
DtnNep read_bundle(std::istream &is);

}  // namespace dtnres

#endif  // DTNRES_NEPCORE_HPP
