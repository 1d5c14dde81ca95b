// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "dtnres/derivtab.hpp"

#include <cmath>
#include <sstream>

#include "dtnres/errors.hpp"
#include "dtnres/specfun.hpp"

namespace dtnres
{

CoefficientToeplitz CoefficientToeplitz::from_derivatives(const std::vector<cd> &derivs)
{
  std::vector<cd> c(derivs.size());
  double fact = 1.0;
  for (std::size_t j = 0; j < derivs.size(); ++j)
  {
    if (j > 0)
    {
      fact *= static_cast<double>(j);
    }
    c[j] = derivs[j] / fact;
  }
  return CoefficientToeplitz(std::move(c));
}

std::vector<cd> CoefficientToeplitz::apply(const std::vector<cd> &x) const
{
  const int n = size();
  std::vector<cd> y(n, cd(0.0));
  for (int i = 0; i < n; ++i)
  {
    cd acc = 0.0;
    for (int j = 0; j <= i; ++j)
    {
      acc += c_[i - j] * x[j];
    }
    y[i] = acc;
  }
  return y;
}

std::vector<cd> CoefficientToeplitz::solve(const std::vector<cd> &b) const
{
  const int n = size();
  if (n > 0 && c_[0] == cd(0.0))
  {
    throw SingularError("triangular Toeplitz solve: zero diagonal");
  }
  std::vector<cd> y(n);
  for (int i = 0; i < n; ++i)
  {
    cd acc = b[i];
    for (int j = 0; j < i; ++j)
    {
      acc -= c_[i - j] * y[j];
    }
    y[i] = acc / c_[0];
  }
  return y;
}

CoefficientToeplitz CoefficientToeplitz::operator*(const CoefficientToeplitz &other) const
{
  return CoefficientToeplitz(apply(other.column()));
}

namespace
{

// Taylor coefficients at mu of the monomial-basis polynomial p, i.e. p(J^T) e_1.
std::vector<cd> polynomial_taylor(const std::vector<cd> &p_coeffs, cd mu, int k)
{
  // Horner: q <- J^T q + p_i e_1, from the leading coefficient down.
  std::vector<cd> q(k, cd(0.0));
  for (auto it = p_coeffs.rbegin(); it != p_coeffs.rend(); ++it)
  {
    for (int i = k - 1; i >= 0; --i)
    {
      q[i] = mu * q[i] + (i > 0 ? q[i - 1] : cd(0.0));
    }
    if (k > 0)
    {
      q[0] += *it;
    }
  }
  return q;
}

}  // namespace

std::vector<cd> quotient_taylor(const std::vector<cd> &h1, const std::vector<cd> &h2,
                                const std::vector<cd> &p_coeffs, cd mu, int k)
{
  if (static_cast<int>(h1.size()) < k || static_cast<int>(h2.size()) < k)
  {
    throw RangeError("quotient_taylor: not enough coefficients");
  }
  const CoefficientToeplitz H1(std::vector<cd>(h1.begin(), h1.begin() + k));
  const CoefficientToeplitz H2(std::vector<cd>(h2.begin(), h2.begin() + k));
  if (k > 0 && h2[0] == cd(0.0))
  {
    throw SingularError("quotient_taylor: denominator vanishes at the shift (pole)");
  }
  // H1 H2^{-1} q = H2^{-1} (H1 q) since triangular Toeplitz matrices commute.
  return H2.solve(H1.apply(polynomial_taylor(p_coeffs, mu, k)));
}

std::vector<cd> quotient_derivatives(const std::vector<cd> &h1_derivs,
                                     const std::vector<cd> &h2_derivs,
                                     const std::vector<cd> &p_coeffs, cd mu, int k)
{
  return quotient_taylor(CoefficientToeplitz::from_derivatives(h1_derivs).column(),
                         CoefficientToeplitz::from_derivatives(h2_derivs).column(),
                         p_coeffs, mu, k);
}

std::vector<cd> pole_polynomial_taylor(cd mu, const std::vector<cd> &poles, int k,
                                       bool include_lambda)
{
  std::vector<cd> q(k, cd(0.0));
  if (k == 0)
  {
    return q;
  }
  q[0] = 1.0;
  auto multiply = [&](cd root) {
    // q <- (J^T - root) q: multiply by (lambda - root) = (mu - root) + (lambda - mu).
    for (int i = k - 1; i >= 0; --i)
    {
      q[i] = (mu - root) * q[i] + (i > 0 ? q[i - 1] : cd(0.0));
    }
  };
  if (include_lambda)
  {
    multiply(0.0);
  }
  for (cd z : poles)
  {
    multiply(z);
  }
  return q;
}

DerivativeTable::DerivativeTable(cd mu, double a, int nu_max, int k_max,
                                 std::vector<cd> poles, std::vector<std::vector<cd>> columns)
  : mu_(mu), a_(a), nu_max_(nu_max), k_max_(k_max), poles_(std::move(poles)),
    cols_(std::move(columns))
{
}

double DerivativeTable::factorial(int j) const
{
  return std::exp(std::lgamma(j + 1.0));
}

cd DerivativeTable::derivative(int j, int nu) const
{
  return coeff(j, nu) * factorial(j);
}

cd DerivativeTable::evaluate(int nu, cd lambda) const
{
  const std::vector<cd> &c = column(nu);
  const cd t = lambda - mu_;
  cd acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it)
  {
    acc = acc * t + *it;
  }
  return acc;
}

DerivativeTable build_table(cd mu, double a, int nu_max, int k_max, const std::vector<cd> &poles)
{
  if (nu_max < 0 || k_max < 0 || !(a > 0.0))
  {
    throw RangeError("build_table: need nu_max >= 0, k_max >= 0, a > 0");
  }
  const int n = k_max + 1;
  // Taylor coefficients of H_nu(a lambda) at mu for j = 0..k_max+1; row nu of
  // the k-th vector is exact as long as nu + k < nu_max + k_max + 2.
  const std::vector<std::vector<cd>> r =
      specfun::hankel_taylor_vectors(nu_max + 1, k_max + 1, a, mu);
  const std::vector<cd> q = pole_polynomial_taylor(mu, poles, n);

  std::vector<std::vector<cd>> cols(nu_max + 1);
  for (int nu = 0; nu <= nu_max; ++nu)
  {
    std::vector<cd> h(n), dh(n);
    for (int j = 0; j < n; ++j)
    {
      h[j] = r[j][nu];
      // Taylor coefficient j of d/dlambda H_nu(a lambda) is (j+1) r_{j+1};
      // dividing by a turns it into H_nu'(a lambda).
      dh[j] = static_cast<double>(j + 1) * r[j + 1][nu] / a;
    }
    // Newton distance from mu to the nearest zero of H_nu(a lambda).
    const cd step = h[0] / r[1][nu];
    if (!(std::abs(step) >= 1e-8))
    {
      const cd zero = mu - step;
      bool listed = false;
      for (cd z : poles)
      {
        listed = listed || std::abs(z - zero) < 1e-6 * std::max(1.0, std::abs(zero));
      }
      if (!listed)
      {
        std::ostringstream os;
        os.precision(12);
        os << "build_table: H_" << nu << "(a lambda) vanishes near lambda = " << zero.real()
           << (zero.imag() < 0 ? "" : "+") << zero.imag()
           << "i; add it to the cancelled poles or move the shift";
        throw PoleError(os.str(), nu, zero);
      }
    }
    const CoefficientToeplitz H(std::move(h));
    const CoefficientToeplitz dH(std::move(dh));
    cols[nu] = H.solve(dH.apply(q));
  }
  return DerivativeTable(mu, a, nu_max, k_max, poles, std::move(cols));
}

}  // namespace dtnres
