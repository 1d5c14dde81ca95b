// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "dtnres/errors.hpp"
#include "dtnres/fem.hpp"

namespace dtnres::fem
{

namespace
{

// P_n(x) and P_n'(x).
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  if (n == 0)
  {
    return {1.0, 0.0};
  }
  for (int k = 2; k <= n; ++k)
  {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = (std::abs(1.0 - x * x) > 0.0) ? n * (p0 - x * p1) / (1.0 - x * x)
                                                    : 0.5 * n * (n + 1.0) * std::pow(x, n + 1);
  return {p1, dp};
}

}  // namespace

Rule1D gauss_legendre(int n)
{
  if (n < 1)
  {
    throw RangeError("gauss_legendre: need n >= 1");
  }
  Rule1D r{std::vector<double>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i)
  {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it)
    {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    const auto [p, dp] = legendre(n, x);
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Rule1D gauss_lobatto(int n)
{
  if (n < 2)
  {
    throw RangeError("gauss_lobatto: need n >= 2");
  }
  const int m = n - 1;
  Rule1D r{std::vector<double>(n), std::vector<double>(n)};
  r.x[0] = -1.0;
  r.x[m] = 1.0;
  for (int i = 1; i < m; ++i)
  {
    // Interior nodes are roots of P_m'; start from Chebyshev-Gauss-Lobatto.
    double x = -std::cos(std::numbers::pi * i / m);
    for (int it = 0; it < 100; ++it)
    {
      // Newton on (1 - x^2) P_m'(x) = m (P_{m-1} - x P_m).
      const auto [pm, dpm] = legendre(m, x);
      const double f = dpm;
      // P_m'' from the Legendre ODE.
      const double d2 = (2.0 * x * dpm - m * (m + 1.0) * pm) / (1.0 - x * x);
      const double dx = f / d2;
      x -= dx;
      if (std::abs(dx) < 1e-16)
      {
        break;
      }
    }
    r.x[i] = x;
  }
  for (int i = 0; i < n; ++i)
  {
    const double p = legendre(m, r.x[i]).first;
    r.w[i] = 2.0 / (m * (m + 1.0) * p * p);
  }
  return r;
}

LagrangeBasis1D::LagrangeBasis1D(std::vector<double> nodes) : nodes_(std::move(nodes))
{
  const int n = size();
  bary_.assign(n, 1.0);
  for (int j = 0; j < n; ++j)
  {
    for (int k = 0; k < n; ++k)
    {
      if (k != j)
      {
        bary_[j] /= (nodes_[j] - nodes_[k]);
      }
    }
  }
}

void LagrangeBasis1D::eval(double x, double *values, double *derivs) const
{
  const int n = size();
  for (int j = 0; j < n; ++j)
  {
    double prod = 1.0;
    double dsum = 0.0;
    for (int k = 0; k < n; ++k)
    {
      if (k == j)
      {
        continue;
      }
      if (derivs)
      {
        // d/dx prod_{k != j} (x - x_k) = sum_m prod_{k != j, m} (x - x_k)
        double term = 1.0;
        for (int l = 0; l < n; ++l)
        {
          if (l != j && l != k)
          {
            term *= (x - nodes_[l]);
          }
        }
        dsum += term;
      }
      prod *= (x - nodes_[k]);
    }
    values[j] = prod * bary_[j];
    if (derivs)
    {
      derivs[j] = dsum * bary_[j];
    }
  }
}

}  // namespace dtnres::fem
