// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dtnres/errors.hpp"
#include "dtnres/nepcore.hpp"
#include "dtnres/specfun.hpp"

namespace dtnres
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// H_nu(a z) and its derivative with respect to the argument.
std::pair<cd, cd> hankel_and_derivative(double a, int nu, cd z)
{
  const specfun::HankelVector hv = specfun::hankel_vector(nu + 2, a * z);
  const cd dh = nu == 0 ? -hv.values[1] : 0.5 * (hv.values[nu - 1] - hv.values[nu + 1]);
  return {hv.values[nu], dh};
}

// Phase increment of H_nu(a z), nu = 0..nu_max, along the segment z0 -> z1,
// refining until every step turns by less than 1 rad.
void phase_walk(double a, int nu_max, cd z0, const std::vector<cd> &h0, cd z1,
                const std::vector<cd> &h1, int depth, std::vector<double> &acc)
{
  bool fine = true;
  for (int nu = 0; nu <= nu_max && fine; ++nu)
  {
    fine = std::abs(std::arg(h1[nu] / h0[nu])) < 1.0;
  }
  if (fine || depth > 24)
  {
    for (int nu = 0; nu <= nu_max; ++nu)
    {
      acc[nu] += std::arg(h1[nu] / h0[nu]);
    }
    return;
  }
  const cd zm = 0.5 * (z0 + z1);
  const std::vector<cd> hm = specfun::hankel_vector(nu_max + 1, a * zm).values;
  phase_walk(a, nu_max, z0, h0, zm, hm, depth + 1, acc);
  phase_walk(a, nu_max, zm, hm, z1, h1, depth + 1, acc);
}

std::vector<double> segment_phase(double a, int nu_max, cd z0, const std::vector<cd> &h0, cd z1,
                                  const std::vector<cd> &h1)
{
  std::vector<double> acc(nu_max + 1, 0.0);
  phase_walk(a, nu_max, z0, h0, z1, h1, 0, acc);
  return acc;
}

// Phase increment of a single order along z0 -> z1.
double order_phase(double a, int nu, cd z0, cd h0, cd z1, cd h1, int depth)
{
  if (std::abs(std::arg(h1 / h0)) < 1.0 || depth > 24)
  {
    return std::arg(h1 / h0);
  }
  const cd zm = 0.5 * (z0 + z1);
  const cd hm = specfun::hankel_vector(nu + 1, a * zm).values[nu];
  return order_phase(a, nu, z0, h0, zm, hm, depth + 1) + order_phase(a, nu, zm, hm, z1, h1, depth + 1);
}

int winding(double a, int nu, cd lo, cd hi)
{
  const cd c[4] = {lo, cd(hi.real(), lo.imag()), hi, cd(lo.real(), hi.imag())};
  cd h[4];
  for (int k = 0; k < 4; ++k)
  {
    h[k] = specfun::hankel_vector(nu + 1, a * c[k]).values[nu];
  }
  double total = 0.0;
  for (int k = 0; k < 4; ++k)
  {
    total += order_phase(a, nu, c[k], h[k], c[(k + 1) % 4], h[(k + 1) % 4], 0);
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

bool inside(cd z, cd lo, cd hi, double slack)
{
  return z.real() >= lo.real() - slack && z.real() <= hi.real() + slack &&
         z.imag() >= lo.imag() - slack && z.imag() <= hi.imag() + slack;
}

void cell_zeros(double a, int nu, cd lo, cd hi, int count, int depth, std::vector<Pole> &out)
{
  if (count <= 0)
  {
    return;
  }
  const double slack = 0.05 * std::abs(hi - lo);
  if (count == 1 || depth >= 8)
  {
    try
    {
      const Pole p = polish_pole(a, nu, 0.5 * (lo + hi));
      if (inside(p.z, lo, hi, slack) || depth >= 8)
      {
        out.push_back(p);
        return;
      }
    }
    catch (const ConvergenceError &)
    {
      if (depth >= 8)
      {
        throw;
      }
    }
  }
  const cd mid = 0.5 * (lo + hi);
  const cd sub[4][2] = {{lo, mid},
                        {cd(mid.real(), lo.imag()), cd(hi.real(), mid.imag())},
                        {mid, hi},
                        {cd(lo.real(), mid.imag()), cd(mid.real(), hi.imag())}};
  for (const auto &s : sub)
  {
    cell_zeros(a, nu, s[0], s[1], winding(a, nu, s[0], s[1]), depth + 1, out);
  }
}

}  // namespace

std::vector<cd> PoleSet::locations() const
{
  std::vector<cd> z;
  z.reserve(poles.size());
  for (const Pole &p : poles)
  {
    z.push_back(p.z);
  }
  return z;
}

int PoleSet::count(int nu) const
{
  return static_cast<int>(
      std::count_if(poles.begin(), poles.end(), [&](const Pole &p) { return p.nu == std::abs(nu); }));
}

Pole polish_pole(double a, int nu, cd seed)
{
  cd z = seed;
  for (int it = 0; it < 50; ++it)
  {
    const auto [h, dh] = hankel_and_derivative(a, nu, z);
    const cd step = h / (a * dh);
    z -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z)))
    {
      const auto [h2, dh2] = hankel_and_derivative(a, nu, z);
      return Pole{z, nu, std::abs(h2) / std::abs(dh2)};
    }
  }
  const auto [h, dh] = hankel_and_derivative(a, nu, z);
  const double res = std::abs(h) / std::abs(dh);
  // Deep in the lower half-plane the forward recurrence for H_nu loses
  // digits and Newton stalls at the evaluation noise floor. Such zeros are
  // returned with their residual.
  if (res <= 1e-6 * std::max(1.0, std::abs(a * z)))
  {
    return Pole{z, nu, res};
  }
  std::ostringstream os;
  os.precision(15);
  os << "Newton for a zero of H_" << nu << "(a z) did not converge in 50 steps from seed "
     << seed.real() << (seed.imag() < 0 ? "" : "+") << seed.imag() << "i (last iterate "
     << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
  throw ConvergenceError(os.str());
}

PoleSet find_poles(double a, int nu_max, const Region &region)
{
  if (!(a > 0.0) || nu_max < 0 || !(region.re_max > region.re_min) ||
      !(region.im_max > region.im_min))
  {
    throw RangeError("find_poles: need a > 0, nu_max >= 0 and a non-empty region");
  }
  PoleSet set;
  // H^(1) has no zeros in the closed upper half-plane.
  const double im_hi = std::min(region.im_max, 0.0);
  if (im_hi <= region.im_min)
  {
    return set;
  }
  if (region.re_min <= 0.0)
  {
    throw DomainError("find_poles: the region must lie in Re lambda > 0 (branch cut)");
  }
  const double h = 0.1 / a;
  const int nx = std::max(4, static_cast<int>(std::ceil((region.re_max - region.re_min) / h)));
  const int ny = std::max(4, static_cast<int>(std::ceil((im_hi - region.im_min) / h)));
  const double dx = (region.re_max - region.re_min) / nx, dy = (im_hi - region.im_min) / ny;
  auto node = [&](int i, int j) { return cd(region.re_min + i * dx, region.im_min + j * dy); };

  std::vector<std::vector<cd>> hv((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
  {
    for (int i = 0; i <= nx; ++i)
    {
      hv[i + (nx + 1) * j] = specfun::hankel_vector(nu_max + 1, a * node(i, j)).values;
    }
  }
  auto H = [&](int i, int j) -> const std::vector<cd> & { return hv[i + (nx + 1) * j]; };
  // Phase increments along horizontal and vertical grid edges.
  std::vector<std::vector<double>> ph(nx * (ny + 1)), pv((nx + 1) * ny);
  for (int j = 0; j <= ny; ++j)
  {
    for (int i = 0; i < nx; ++i)
    {
      ph[i + nx * j] = segment_phase(a, nu_max, node(i, j), H(i, j), node(i + 1, j), H(i + 1, j));
    }
  }
  for (int j = 0; j < ny; ++j)
  {
    for (int i = 0; i <= nx; ++i)
    {
      pv[i + (nx + 1) * j] =
          segment_phase(a, nu_max, node(i, j), H(i, j), node(i, j + 1), H(i, j + 1));
    }
  }

  for (int nu = 0; nu <= nu_max; ++nu)
  {
    std::vector<Pole> found;
    for (int j = 0; j < ny; ++j)
    {
      for (int i = 0; i < nx; ++i)
      {
        const double w = ph[i + nx * j][nu] + pv[i + 1 + (nx + 1) * j][nu] -
                         ph[i + nx * (j + 1)][nu] - pv[i + (nx + 1) * j][nu];
        const int count = static_cast<int>(std::lround(w / kTwoPi));
        cell_zeros(a, nu, node(i, j), node(i + 1, j + 1), count, 0, found);
      }
    }
    for (const Pole &p : found)
    {
      if (!region.contains(p.z) || p.z.imag() > 0.0)
      {
        continue;
      }
      const bool dup = std::any_of(set.poles.begin(), set.poles.end(), [&](const Pole &o) {
        return o.nu == p.nu && std::abs(o.z - p.z) < 1e-9;
      });
      if (!dup)
      {
        set.poles.push_back(p);
      }
    }
  }
  return set;
}

}  // namespace dtnres
