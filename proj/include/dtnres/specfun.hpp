// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_SPECFUN_HPP
#define DTNRES_SPECFUN_HPP

#include <complex>
#include <vector>

namespace dtnres::specfun
{

using cd = std::complex<double>;

// Bessel function of the first kind J_nu(z), integer order, complex argument.
// Accurate to a few ulps times the growth factor of the backward recurrence
// for |nu| <= 130 and |z| <= 300.
cd bessel_j(int nu, cd z);

// Bessel function of the second kind Y_nu(z) = (H1_nu(z) - J_nu(z)) / i.
cd bessel_y(int nu, cd z);

// Hankel function of the first kind H1_nu(z) = J_nu(z) + i Y_nu(z).
// Throws DomainError for z = 0.
cd hankel1(int nu, cd z);

// Values H1_0(z), ..., H1_{r-1}(z).
struct HankelVector
{
  cd z;
  std::vector<cd> values;

  int order_count() const { return static_cast<int>(values.size()); }
  // H1_nu(z) for any |nu| < r, using H_{-nu} = (-1)^nu H_nu.
  cd at(int nu) const;
};

HankelVector hankel_vector(int r, cd z);

// Tridiagonal matrix B_r with B_r * [H_0, ..., H_{r-1}] = [H_0', ..., H_{r-1}']
// up to the truncated last row. Stored as three diagonals.
struct RecursionMatrix
{
  int size;

  double sub(int row) const { return row > 0 ? 0.5 : 0.0; }
  double super(int row) const { return row == 0 ? -1.0 : -0.5; }
  // y = B x, x.size() == size.
  std::vector<cd> apply(const std::vector<cd> &x) const;
};

// Derivatives d^k/dz^k of [H_0(a z), ..., H_{r-1}(a z)] for k = 0..k_max,
// obtained by k_max matrix-vector products with a*B_{r+k_max} applied to
// H_{r+k_max}(a z). Entry [k][nu] is the k-th derivative of H_nu(a z).
std::vector<std::vector<cd>> hankel_derivative_vectors(int r, int k_max, double a, cd z);

// Same as above with entries divided by k! (Taylor coefficients in z).
std::vector<std::vector<cd>> hankel_taylor_vectors(int r, int k_max, double a, cd z);

}  // namespace dtnres::specfun

#endif  // DTNRES_SPECFUN_HPP
