// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "dtnres/specfun.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "dtnres/errors.hpp"

namespace dtnres::specfun
{

namespace
{

using cld = std::complex<long double>;

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286061;

// Below this modulus J_n is summed from its Maclaurin series.
constexpr double kSeriesRadius = 1e-3;
// At and above this modulus H_0 and H_1 come from the Hankel asymptotic
// expansion; its smallest term is ~exp(-2|z|) < 1e-15 there.
constexpr double kAsymptoticRadius = 18.0;
// exp(|Im z|) must stay representable.
constexpr double kMaxImag = 690.0;
// Miller's algorithm needs O(|z|) orders.
constexpr double kMaxAbs = 1e6;

std::string describe(int nu, cd z)
{
  std::ostringstream os;
  os.precision(17);
  os << "(nu=" << nu << ", z=" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag()
     << "i)";
  return os.str();
}

void check_range(int nu, cd z)
{
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
      std::abs(z.imag()) > kMaxImag || std::abs(z) > kMaxAbs || std::abs(nu) > 100000)
  {
    throw RangeError("Bessel evaluation out of range " + describe(nu, z));
  }
}

// J_0(z), ..., J_nmax(z) from the Maclaurin series, for small |z|.
std::vector<cd> bessel_j_series(int nmax, cd z)
{
  std::vector<cd> out(nmax + 1);
  const cd q = -0.25 * z * z;
  for (int n = 0; n <= nmax; ++n)
  {
    // (z/2)^n / n!
    cd lead = std::exp(static_cast<double>(n) * std::log(0.5 * z) - std::lgamma(n + 1.0));
    if (z == cd(0.0))
    {
      lead = (n == 0) ? cd(1.0) : cd(0.0);
    }
    cd term = 1.0, sum = 1.0;
    for (int k = 1; k < 60; ++k)
    {
      term *= q / (static_cast<double>(k) * static_cast<double>(n + k));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum))
      {
        break;
      }
    }
    out[n] = lead * sum;
  }
  return out;
}

// J_0(z), ..., J_nmax(z) by Miller's backward recurrence. The recurrence runs
// in extended precision (and range) and is normalised with the Neumann sum
// exp(+-iz) = J_0 + 2 sum_k (+-i)^k J_k, picking the sign for which exp(+-iz)
// is the large exponential, so the normalisation never cancels.
std::vector<cd> bessel_j_miller(int nmax, cd z)
{
  const double scale = std::max<double>(nmax, std::abs(z));
  int start = static_cast<int>(scale + std::sqrt(160.0 * scale) + 20.0);
  start += start % 2;

  const bool lower = z.imag() <= 0.0;
  const cld unit = lower ? cld(0.0L, 1.0L) : cld(0.0L, -1.0L);
  const cld zl(z.real(), z.imag());

  std::vector<cld> f(start + 2, cld(0.0L));
  f[start + 1] = 0.0L;
  f[start] = 1e-30L;
  for (int k = start; k >= 1; --k)
  {
    f[k - 1] = (2.0L * static_cast<long double>(k) / zl) * f[k] - f[k + 1];
  }
  // Neumann normalisation sum, summed from small terms upwards.
  cld powk = 1.0L;
  std::vector<cld> powers(start + 1);
  for (int k = 0; k <= start; ++k)
  {
    powers[k] = powk;
    powk *= unit;
  }
  cld sum = 0.0L;
  for (int k = start; k >= 1; --k)
  {
    sum += 2.0L * powers[k] * f[k];
  }
  sum += f[0];
  const cd e = lower ? std::exp(cd(0.0, 1.0) * z) : std::exp(cd(0.0, -1.0) * z);
  const cld factor = cld(e.real(), e.imag()) / sum;

  std::vector<cd> out(nmax + 1);
  for (int k = 0; k <= nmax; ++k)
  {
    const cld v = f[k] * factor;
    out[k] = cd(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  }
  return out;
}

std::vector<cd> bessel_j_sequence(int nmax, cd z)
{
  if (std::abs(z) < kSeriesRadius)
  {
    return bessel_j_series(nmax, z);
  }
  return bessel_j_miller(nmax, z);
}

// H1_0 and H1_1 from the Hankel asymptotic expansion, |z| >= kAsymptoticRadius.
std::pair<cd, cd> hankel01_asymptotic(cd z)
{
  const cd I(0.0, 1.0);
  const cd pre = std::sqrt(2.0 / (kPi * z));
  cd out[2];
  for (int nu = 0; nu <= 1; ++nu)
  {
    const double mu = 4.0 * nu * nu;
    cd term = 1.0, sum = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k)
    {
      const double odd = 2.0 * k - 1.0;
      term *= I * (mu - odd * odd) / (8.0 * k * z);
      const double mag = std::abs(term);
      if (mag > last && k > 2)
      {
        break;
      }
      sum += term;
      last = mag;
      if (mag < 1e-17 * std::abs(sum))
      {
        break;
      }
    }
    const cd phase = std::exp(I * (z - nu * 0.5 * kPi - 0.25 * kPi));
    out[nu] = pre * phase * sum;
  }
  return {out[0], out[1]};
}

// Above this imaginary part (and below kAsymptoticRadius) H_0 and H_1 come
// from the integral for K_nu; the Neumann series would cancel against
// exp(Im z) there.
constexpr double kIntegralImag = 1.0;

// H1_nu(z) = (2/pi) i^{-nu-1} K_nu(-iz) for Im z > 0, nu = 0, 1, with
//   K_nu(w) = exp(-w) int_0^inf exp(-w (cosh t - 1)) cosh(nu t) dt
// summed by the trapezoidal rule, which converges geometrically for this
// even analytic integrand. The step follows from the width of the strip
// in which the integrand stays bounded.
std::pair<cd, cd> hankel01_integral(cd z)
{
  const cd w(z.imag(), -z.real());
  const double angle = std::atan2(w.real(), std::abs(w.imag()));
  const double d = std::min(0.5 * angle, 0.5);
  const double h = 2.0 * kPi * d / (45.0 + w.real());
  cd k0 = 0.5, k1 = 0.5;
  for (int i = 1;; ++i)
  {
    const double t = i * h;
    const double c = std::cosh(t) - 1.0;
    if (w.real() * c > 45.0 + t)
    {
      break;
    }
    const cd e = std::exp(-w * c);
    k0 += e;
    k1 += e * std::cosh(t);
  }
  const cd scale = h * std::exp(-w);
  k0 *= scale;
  k1 *= scale;
  return {cd(0.0, -2.0 / kPi) * k0, (-2.0 / kPi) * k1};
}

// H1_0 and H1_1 from J_k via the Neumann series for Y_0 and its derivative.
std::pair<cd, cd> hankel01_neumann(cd z)
{
  const std::vector<cd> j = bessel_j_sequence(
      static_cast<int>(std::abs(z) + std::sqrt(160.0 * std::max(1.0, std::abs(z))) + 22.0), z);
  const int n = static_cast<int>(j.size()) - 1;
  const cd L = std::log(0.5 * z) + kEulerGamma;

  cd s0 = 0.0, s1 = 0.0;
  for (int k = n / 2 - 1; k >= 1; --k)
  {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    s0 += sign * j[2 * k] / static_cast<double>(k);
    s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / static_cast<double>(k);
  }
  const cd y0 = (2.0 / kPi) * L * j[0] - (4.0 / kPi) * s0;
  const cd y1 = -(2.0 / (kPi * z)) * j[0] + (2.0 / kPi) * L * j[1] + (2.0 / kPi) * s1;
  const cd I(0.0, 1.0);
  return {j[0] + I * y0, j[1] + I * y1};
}

}  // namespace

cd bessel_j(int nu, cd z)
{
  check_range(nu, z);
  const int n = std::abs(nu);
  if (z == cd(0.0))
  {
    return n == 0 ? cd(1.0) : cd(0.0);
  }
  const cd v = bessel_j_sequence(n, z)[n];
  return (nu < 0 && (n % 2 == 1)) ? -v : v;
}

cd hankel1(int nu, cd z)
{
  const HankelVector hv = hankel_vector(std::abs(nu) + 1, z);
  return hv.at(nu);
}

cd bessel_y(int nu, cd z)
{
  return (hankel1(nu, z) - bessel_j(nu, z)) / cd(0.0, 1.0);
}

cd HankelVector::at(int nu) const
{
  const int n = std::abs(nu);
  const cd v = values.at(n);
  return (nu < 0 && (n % 2 == 1)) ? -v : v;
}

HankelVector hankel_vector(int r, cd z)
{
  if (r < 1)
  {
    throw RangeError("hankel_vector: order count must be positive");
  }
  check_range(r - 1, z);
  if (z == cd(0.0))
  {
    throw DomainError("Hankel function is singular at z = 0 " + describe(0, z));
  }
  if (z.imag() < 0.0)
  {
    // H1_n(z) = 2 J_n(z) - conj(H1_n(conj z)). Near zeros of H1_n the forward
    // recurrence from H1_0(z) would lose digits against exp(|Im z|); here the
    // error stays at eps |J_n(z)|.
    const HankelVector upper = hankel_vector(r, std::conj(z));
    const std::vector<cd> j = bessel_j_sequence(r - 1, z);
    HankelVector hv{z, std::vector<cd>(r)};
    for (int n = 0; n < r; ++n)
    {
      hv.values[n] = 2.0 * j[n] - std::conj(upper.values[n]);
    }
    return hv;
  }
  auto [h0, h1] = std::abs(z) >= kAsymptoticRadius ? hankel01_asymptotic(z)
                  : z.imag() >= kIntegralImag       ? hankel01_integral(z)
                                                    : hankel01_neumann(z);
  HankelVector hv{z, std::vector<cd>(r)};
  hv.values[0] = h0;
  if (r > 1)
  {
    hv.values[1] = h1;
  }
  // Forward recurrence; stable for the first-kind Hankel function.
  for (int n = 1; n + 1 < r; ++n)
  {
    hv.values[n + 1] = (2.0 * n / z) * hv.values[n] - hv.values[n - 1];
    if (!std::isfinite(hv.values[n + 1].real()) || !std::isfinite(hv.values[n + 1].imag()))
    {
      throw RangeError("Hankel function overflow " + describe(n + 1, z));
    }
  }
  return hv;
}

std::vector<cd> RecursionMatrix::apply(const std::vector<cd> &x) const
{
  std::vector<cd> y(size, cd(0.0));
  for (int i = 0; i < size; ++i)
  {
    cd acc = 0.0;
    if (i > 0)
    {
      acc += sub(i) * x[i - 1];
    }
    if (i + 1 < size)
    {
      acc += super(i) * x[i + 1];
    }
    y[i] = acc;
  }
  return y;
}

namespace
{

std::vector<std::vector<cd>> derivative_chain(int r, int k_max, double a, cd z, bool taylor)
{
  if (r < 1 || k_max < 0 || !(a > 0.0))
  {
    throw RangeError("hankel_derivative_vectors: need r >= 1, k_max >= 0, a > 0");
  }
  const int len = r + k_max;
  const RecursionMatrix B{len};
  std::vector<cd> cur = hankel_vector(len, a * z).values;
  std::vector<std::vector<cd>> out;
  out.reserve(k_max + 1);
  out.emplace_back(cur.begin(), cur.begin() + r);
  for (int k = 1; k <= k_max; ++k)
  {
    cur = B.apply(cur);
    const double s = taylor ? a / k : a;
    for (cd &v : cur)
    {
      v *= s;
    }
    out.emplace_back(cur.begin(), cur.begin() + r);
  }
  return out;
}

}  // namespace

std::vector<std::vector<cd>> hankel_derivative_vectors(int r, int k_max, double a, cd z)
{
  return derivative_chain(r, k_max, a, z, false);
}

std::vector<std::vector<cd>> hankel_taylor_vectors(int r, int k_max, double a, cd z)
{
  return derivative_chain(r, k_max, a, z, true);
}

}  // namespace dtnres::specfun
