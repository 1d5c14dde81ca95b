// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_DERIVTAB_HPP
#define DTNRES_DERIVTAB_HPP

#include <complex>
#include <vector>

namespace dtnres
{

using cd = std::complex<double>;

// Lower triangular Toeplitz matrix f(J_mu^T) of a scalar function f, stored by
// its first column c_j = f^(j)(mu) / j!. Products of such matrices are again
// lower triangular Toeplitz and correspond to products of the functions.
class CoefficientToeplitz
{
public:
  CoefficientToeplitz() = default;
  explicit CoefficientToeplitz(std::vector<cd> column) : c_(std::move(column)) {}

  // From raw derivatives f(mu), f'(mu), ..., f^(n-1)(mu).
  static CoefficientToeplitz from_derivatives(const std::vector<cd> &derivs);

  int size() const { return static_cast<int>(c_.size()); }
  const std::vector<cd> &column() const { return c_; }
  cd operator()(int i, int j) const { return i >= j ? c_[i - j] : cd(0.0); }

  // Truncated Cauchy product with a coefficient vector of the same length.
  std::vector<cd> apply(const std::vector<cd> &x) const;
  // Forward substitution T y = b; throws SingularError if c_0 == 0.
  std::vector<cd> solve(const std::vector<cd> &b) const;
  CoefficientToeplitz operator*(const CoefficientToeplitz &other) const;

private:
  std::vector<cd> c_;
};

// Taylor coefficients (length k) of (h1 / h2) * p at mu, given the Taylor
// coefficients of h1 and h2 and the monomial-basis coefficients of the
// polynomial p (p(lambda) = sum_i p_coeffs[i] lambda^i). Throws SingularError
// when h2(mu) == 0.
std::vector<cd> quotient_taylor(const std::vector<cd> &h1, const std::vector<cd> &h2,
                                const std::vector<cd> &p_coeffs, cd mu, int k);

// Same, but h1 and h2 given by raw derivatives h^(j)(mu); returns Taylor
// coefficients.
std::vector<cd> quotient_derivatives(const std::vector<cd> &h1_derivs,
                                     const std::vector<cd> &h2_derivs,
                                     const std::vector<cd> &p_coeffs, cd mu, int k);

// Taylor coefficients at mu of lambda * prod_i (lambda - z_i), length k.
std::vector<cd> pole_polynomial_taylor(cd mu, const std::vector<cd> &poles, int k,
                                       bool include_lambda = true);

// Taylor coefficients of
//   g~_nu(lambda) = lambda * prod_i (lambda - z_i) * H_nu'(a lambda) / H_nu(a lambda)
// at the shift mu for nu = 0..nu_max and j = 0..k_max. The table stores
// coefficients g~^(j)(mu) / j!; derivative() rescales to raw derivatives.
// g~_{-nu} = g~_nu, so negative orders share the column of |nu|.
class DerivativeTable
{
public:
  DerivativeTable(cd mu, double a, int nu_max, int k_max, std::vector<cd> poles,
                  std::vector<std::vector<cd>> columns);

  cd shift() const { return mu_; }
  double radius() const { return a_; }
  int nu_max() const { return nu_max_; }
  int k_max() const { return k_max_; }
  const std::vector<cd> &poles() const { return poles_; }

  // Taylor coefficient of order j for order nu (negative nu allowed).
  cd coeff(int j, int nu) const { return cols_[std::abs(nu)][j]; }
  const std::vector<cd> &column(int nu) const { return cols_[std::abs(nu)]; }
  // Raw derivative g~_nu^(j)(mu).
  double factorial(int j) const;
  cd derivative(int j, int nu) const;
  // Taylor polynomial of g~_nu evaluated at lambda.
  cd evaluate(int nu, cd lambda) const;

private:
  cd mu_;
  double a_;
  int nu_max_;
  int k_max_;
  std::vector<cd> poles_;
  std::vector<std::vector<cd>> cols_;
};

// Builds the derivative table (Taylor coefficients up to order k_max).
// Throws PoleError when H_nu(a mu) is within 1e-8 (Newton distance) of a
// zero that is not in `poles`.
DerivativeTable build_table(cd mu, double a, int nu_max, int k_max,
                            const std::vector<cd> &poles = {});

}  // namespace dtnres

#endif  // DTNRES_DERIVTAB_HPP
