// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// Acceptance checks. Usage: acceptance [C1 C2 ...]; no arguments runs all.
// Prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtnres/config.hpp"
#include "dtnres/derivtab.hpp"
#include "dtnres/driver.hpp"
#include "dtnres/fem.hpp"
#include "dtnres/nepcore.hpp"
#include "dtnres/refbench.hpp"
#include "dtnres/specfun.hpp"
#include "dtnres/tiar.hpp"
#include "support/oracles.hpp"

using namespace dtnres;

namespace
{

struct Outcome
{
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string &what)
  {
    if (!ok)
    {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string sci(double x, int digits = 2)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*e", digits, x);
  return buf;
}

double rel(cd x, cd y)
{
  return std::abs(x - y) / std::abs(y);
}

const char *kSingleDisk =
    "geometry = single-disk\nR = 1\nd = 0.5\neta = 2\na = 2\nshift = 9 -0.1\n"
    "reference_geometry = single-disk\n";

const char *kDimer = "geometry = dimer\nR = 0.25\ns = 0.25\neta = 2\n";

// Best backward error per tracked target over the whole history.
std::vector<double> best_backward_errors(const TiarResult &r, int targets)
{
  std::vector<double> best(targets, std::numeric_limits<double>::infinity());
  for (const HistoryRow &h : r.history)
  {
    best[h.target] = std::min(best[h.target], h.backward_error);
  }
  return best;
}

// Converged Ritz value nearest `target` (NaN if none).
cd nearest_converged(const TiarResult &r, cd target)
{
  const double nan = std::numeric_limits<double>::quiet_NaN();
  cd best(nan, nan);
  for (const RitzPair &p : r.converged())
  {
    if (!std::isfinite(best.real()) || std::abs(p.lambda - target) < std::abs(best - target))
    {
      best = p.lambda;
    }
  }
  return best;
}

// Least-squares slope and intercept of y against x.
std::pair<double, double> fit_line(const std::vector<double> &x, const std::vector<double> &y)
{
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

void c1(Outcome &o)
{
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int count = 0;
  for (const auto &r : refbench::reference_table("single-disk"))
  {
    const cd z = refbench::newton_resonance(*r.m, *r.seed, 1.0, 2.0);
    worst = std::max(worst, rel(z, r.lambda));
    ++count;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.detail << count << " records, worst relative error " << sci(worst) << ", " << secs << " s";
  o.require(count == 6, "six records");
  o.require(worst <= 1e-11, "relative error <= 1e-11");
  o.require(secs < 1.0, "runtime < 1 s");
}

void c2(Outcome &o)
{
  config::RunConfig c = config::parse_string(std::string(kSingleDisk) +
                                             "degree = 10\nlevels = 2\nnu_max = 25\n"
                                             "iterations = 80\n");
  const DtnNep nep = fem::build_problem(c.geometry);
  const TiarResult r = cli::solve(c, nep);
  o.detail << "N = " << nep.size() << ";";
  o.require(nep.size() >= 5000 && nep.size() <= 20000, "5000 <= N <= 20000");
  for (int id : {1, 2, 3})
  {
    const cd ref = refbench::reference("single-disk", id).lambda;
    const cd z = nearest_converged(r, ref);
    const double e = rel(z, ref);
    o.detail << " lambda" << id << " " << sci(e);
    o.require(e <= 1e-6, "lambda" + std::to_string(id) + " relative error <= 1e-6");
  }
}

void c3(Outcome &o)
{
  config::RunConfig c = config::parse_string(std::string(kSingleDisk) +
                                             "degree = 2\nnu_max = 25\niterations = 60\n"
                                             "reference = 1\nsweep_axis = h\n"
                                             "sweep_values = 3 4 5 6\n");
  std::vector<double> x, y;
  for (const cli::SweepRow &row : cli::sweep(c))
  {
    x.push_back(std::log(static_cast<double>(row.dof_count)));
    y.push_back(std::log(row.relative_error[0]));
    o.detail << "N=" << row.dof_count << ":" << sci(row.relative_error[0]) << " ";
  }
  const double slope = fit_line(x, y).first;
  o.detail << "slope " << slope;
  o.require(std::abs(slope + 2.0) <= 0.4, "slope -2 +- 20%");
}

void c4(Outcome &o)
{
  config::RunConfig c = config::parse_string(std::string(kSingleDisk) +
                                             "levels = 1\nnu_max = 25\niterations = 60\n"
                                             "reference = 1\nsweep_axis = p\n"
                                             "sweep_values = 2 3 4 5 6 7 8 9 10\n");
  std::vector<double> x, y;
  bool monotone = true;
  for (const cli::SweepRow &row : cli::sweep(c))
  {
    if (!y.empty())
    {
      monotone = monotone && std::log(row.relative_error[0]) < y.back();
    }
    x.push_back(std::sqrt(static_cast<double>(row.dof_count)));
    y.push_back(std::log(row.relative_error[0]));
  }
  const auto [slope, intercept] = fit_line(x, y);
  const double beta = -slope;
  o.detail << "error = " << sci(std::exp(intercept)) << " exp(-" << beta << " sqrt N), p=2: "
           << sci(std::exp(y.front())) << ", p=10: " << sci(std::exp(y.back()));
  o.require(beta > 0.0, "beta > 0");
  o.require(monotone, "monotone decay in p");
}

void c5(Outcome &o)
{
  config::RunConfig c = config::parse_string(std::string(kSingleDisk) +
                                             "degree = 10\nlevels = 2\nnu_max = 40\n"
                                             "iterations = 60\nreference = 1 3\n"
                                             "sweep_axis = numax\n"
                                             "sweep_values = 18 19 20 22 25 30 40\n");
  const std::vector<cli::SweepRow> rows = cli::sweep(c);
  for (std::size_t t = 0; t < c.reference.size(); ++t)
  {
    const int id = c.reference[t];
    const double rule = c.geometry.a * refbench::reference("single-disk", id).lambda.real();
    o.detail << " lambda" << id << " (a Re = " << rule << "):";
    double first_converged = -1.0;
    std::vector<int> above, degraded;
    for (const cli::SweepRow &row : rows)
    {
      const double e = row.relative_error[t];
      o.detail << " " << row.value << ":" << sci(e, 1);
      if (row.value > rule && !(e < 1e-9))
      {
        above.push_back(row.value);
      }
      if (first_converged < 0.0 && e < 1e-9)
      {
        first_converged = e;
      }
      else if (first_converged > 0.0 && !(e <= 10.0 * first_converged))
      {
        degraded.push_back(row.value);
      }
    }
    for (int v : above)
    {
      o.require(false, "lambda" + std::to_string(id) + " error < 1e-9 at nu_max " +
                           std::to_string(v));
    }
    for (int v : degraded)
    {
      o.require(false, "lambda" + std::to_string(id) + " no 10x degradation at nu_max " +
                           std::to_string(v));
    }
    o.detail << ";";
  }
}

void c6(Outcome &o)
{
  const cd l5 = refbench::reference("dimer", 5).lambda;
  const cd l6 = refbench::reference("dimer", 6).lambda;
  config::RunConfig c = config::parse_string(std::string(kDimer) +
                                             "a = 2\ndegree = 6\nlevels = 1\nring_layers = 2\n"
                                             "nu_max = 12\nshift = 1.15 -0.8\niterations = 60\n"
                                             "history_stride = 1\n");
  c.track = {l5, l6};
  const DtnNep nep = fem::build_problem(c.geometry);

  const TiarResult plain = cli::solve(c, nep);
  c.cancel = true;
  const TiarResult cancelled = cli::solve(c, nep);
  const auto bp = best_backward_errors(plain, 2);
  const auto bc = best_backward_errors(cancelled, 2);
  o.detail << "N = " << nep.size() << ", cancelled " << cancelled.cancelled.size()
           << " pole(s); best backward error lambda5 " << sci(bp[0]) << " without, " << sci(bc[0])
           << " with; lambda6 " << sci(bp[1]) << " without, " << sci(bc[1]) << " with;";
  const double e5 = rel(nearest_converged(cancelled, l5), l5);
  const double e6 = rel(nearest_converged(cancelled, l6), l6);
  o.detail << " relative error rows 5, 6: " << sci(e5) << ", " << sci(e6);
  o.require(!cancelled.cancelled.empty(), "poles found between shift and targets");
  o.require(bp[0] > 1e-6, "lambda5 stagnates above 1e-6 without cancellation");
  o.require(bc[0] <= 1e-10, "lambda5 reaches 1e-10 with cancellation");
  o.require(bc[1] <= c.tolerance, "lambda6 converges with cancellation");
  o.require(e5 <= 1e-5 && e6 <= 1e-5, "rows 5-6 to relative 1e-5");
}

void c7(Outcome &o)
{
  config::RunConfig c = config::parse_string(std::string(kDimer) +
                                             "a = 1\ndegree = 8\nlevels = 1\nnu_max = 30\n"
                                             "shift = 20 -0.3\niterations = 80\n");
  const DtnNep nep = fem::build_problem(c.geometry);
  const TiarResult r = cli::solve(c, nep);
  o.detail << "N = " << nep.size() << ";";
  for (int id : {11, 14})
  {
    const cd ref = refbench::reference("dimer", id).lambda;
    const double e = rel(nearest_converged(r, ref), ref);
    o.detail << " row " << id << " " << sci(e);
    o.require(e <= 1e-5, "row " + std::to_string(id) + " relative error <= 1e-5");
  }
}

void c8(Outcome &o)
{
  const std::vector<cd> targets = {refbench::reference("dimer", 5).lambda,
                                   refbench::reference("dimer", 6).lambda};
  std::vector<std::vector<cd>> found;
  for (const char *a : {"1", "2"})
  {
    config::RunConfig c = config::parse_string(std::string(kDimer) + "a = " + a +
                                               "\ndegree = 8\nlevels = 1\nring_layers = 2\n"
                                               "nu_max = 12\nshift = 1.15 -0.8\n"
                                               "iterations = 60\ncancel = true\n");
    const DtnNep nep = fem::build_problem(c.geometry);
    const TiarResult r = cli::solve(c, nep);
    std::vector<cd> z;
    for (cd t : targets)
    {
      z.push_back(nearest_converged(r, t));
    }
    found.push_back(z);
    o.detail << "a=" << a << " N=" << nep.size() << " ";
  }
  for (std::size_t t = 0; t < targets.size(); ++t)
  {
    const double d = rel(found[0][t], found[1][t]);
    o.detail << "; rows " << (t == 0 ? 5 : 6) << " differ by " << sci(d);
    o.require(d <= 1e-6, "a-independence to 1e-6");
  }
}

void c9(Outcome &o)
{
  const auto start = std::chrono::steady_clock::now();

  // Wronskian J Y' - J' Y = 2 / (pi z).
  double wr = 0.0;
  for (int n = 0; n <= 60; n += 5)
  {
    for (double x = 1.0; x <= 120.0; x += 17.0)
    {
      for (double y : {-2.0, -1.0, -0.25, 0.0, 0.5})
      {
        const cd z(x, y);
        const cd J = specfun::bessel_j(n, z), Y = specfun::bessel_y(n, z);
        const cd Jp = 0.5 * (specfun::bessel_j(n - 1, z) - specfun::bessel_j(n + 1, z));
        const cd Yp = 0.5 * (specfun::bessel_y(n - 1, z) - specfun::bessel_y(n + 1, z));
        const cd exact = 2.0 / (oracle::kPi * z);
        const double scale = std::max(std::abs(exact), std::abs(J * Yp));
        wr = std::max(wr, std::abs(J * Yp - Jp * Y - exact) / scale);
      }
    }
  }
  o.detail << "Wronskian " << sci(wr);
  o.require(wr <= 1e-10, "Wronskian 1e-10");

  // Derivative table against the contour oracle, scaled norm max_j |c_j| r^j.
  {
    const cd mu(20.0, -0.3);
    const double a = 1.0;
    const int nu_max = 30, k_max = 40;
    const DerivativeTable t = build_table(mu, a, nu_max, k_max);
    const Region box{2.0, 38.0, -15.0, 0.0};
    const PoleSet zeros = find_poles(a, nu_max, box);
    double worst = 0.0;
    for (int nu = 0; nu <= nu_max; ++nu)
    {
      double dist = std::min(std::abs(mu), mu.imag() - box.im_min);
      for (const Pole &p : zeros.poles)
      {
        if (p.nu == nu)
        {
          dist = std::min(dist, std::abs(p.z - mu));
        }
      }
      const double r = std::min(0.6 * dist, 2.0);
      const auto g = [&](cd l) {
        const auto hv = specfun::hankel_vector(nu + 2, a * l);
        const cd hp = nu == 0 ? -hv.values[1] : 0.5 * (hv.values[nu - 1] - hv.values[nu + 1]);
        return l * hp / hv.values[nu];
      };
      const auto ref = oracle::contour_taylor(g, mu, r, k_max, 512);
      double err = 0.0, scale = 0.0;
      for (int j = 0; j <= k_max; ++j)
      {
        err = std::max(err, std::abs(t.coeff(j, nu) - ref[j]) * std::pow(r, j));
        scale = std::max(scale, std::abs(ref[j]) * std::pow(r, j));
      }
      worst = std::max(worst, err / scale);
    }
    o.detail << ", table " << sci(worst);
    o.require(worst <= 1e-8, "derivative table vs contour oracle 1e-8");
  }

  fem::GeometryConfig g;
  g.kind = fem::GeometryConfig::Kind::SingleDisk;
  g.d = 0.5;
  g.degree = 4;
  g.levels = 1;
  g.nu_max = 10;
  const DtnNep nep = fem::build_problem(g);

  // TIAR against the explicit infinite Arnoldi iteration.
  {
    const cd mu(3.0, -0.2);
    const int k = 30;
    const SmfOperator ops = smf_terms(nep, mu, k + 1);
    const ShiftedFactorization lu = factorize(nep, mu);
    const VecC start = seeded_start_vector(nep.size(), 11);
    TiarState state(ops, lu, start);
    for (int j = 0; j < k; ++j)
    {
      state.expand();
    }
    oracle::ExplicitIar iar;
    iar.deriv_sum = [&](const std::vector<Eigen::VectorXcd> &x) {
      return oracle::smf_deriv_sum(ops, x);
    };
    iar.solve = [&](const Eigen::VectorXcd &b) { return lu.solve(b); };
    const Eigen::MatrixXcd Href = iar.run(start, k);
    const double d = (state.hessenberg() - Href).norm() / Href.norm();
    o.detail << ", Hessenberg " << sci(d);
    o.require(d <= 1e-10, "TIAR vs explicit IAR 1e-10");
  }

  // SMF application against dense assembly with integral-representation symbols.
  {
    fem::GeometryConfig gs = g;
    gs.d = 0.3;
    gs.degree = 3;
    gs.levels = 0;
    gs.nu_max = 6;
    const DtnNep small = fem::build_problem(gs);
    const cd lambda(3.0, -0.2);
    Eigen::MatrixXcd T = Eigen::MatrixXd(small.A()).cast<cd>() -
                         lambda * lambda * Eigen::MatrixXd(small.M()).cast<cd>();
    const int na = small.boundary_size();
    for (int nu = -small.nu_max(); nu <= small.nu_max(); ++nu)
    {
      const int n = std::abs(nu);
      const cd z = small.radius() * lambda;
      const cd h = oracle::hankel_integral(n, z);
      const cd hp = n == 0 ? -oracle::hankel_integral(1, z)
                           : 0.5 * (oracle::hankel_integral(n - 1, z) -
                                    oracle::hankel_integral(n + 1, z));
      const Eigen::VectorXcd q = nu >= 0 ? Eigen::VectorXcd(small.q().col(n))
                                         : Eigen::VectorXcd(small.q().col(n).conjugate());
      T.topLeftCorner(na, na) -= small.radius() * (lambda * hp / h) * (q.conjugate() * q.transpose());
    }
    std::mt19937 gen(3);
    std::normal_distribution<double> nd;
    VecC v(small.size());
    for (auto &x : v)
    {
      x = cd(nd(gen), nd(gen));
    }
    const VecC ref = T * v;
    const double d = (smf_apply_exact(small, lambda, v) - ref).norm() / (T.norm() * v.norm());
    o.detail << ", SMF " << sci(d);
    o.require(d <= 1e-12, "SMF vs dense assembly 1e-12");
  }

  // Pole counts by the argument principle on the rectangle boundary.
  {
    const double a = 2.0;
    const int nu_max = 8;
    const Region box{0.5, 3.0, -2.0, -0.01};
    const PoleSet set = find_poles(a, nu_max, box);
    int mismatches = 0, total_count = 0;
    for (int nu = 0; nu <= nu_max; ++nu)
    {
      const cd c[4] = {cd(box.re_min, box.im_min), cd(box.re_max, box.im_min),
                       cd(box.re_max, box.im_max), cd(box.re_min, box.im_max)};
      cd total = 0.0;
      for (int s = 0; s < 4; ++s)
      {
        const cd p = c[s], q = c[(s + 1) % 4];
        total += oracle::integrate(
            [&](double t) {
              const cd z = p + t * (q - p);
              const auto hv = specfun::hankel_vector(nu + 2, a * z);
              const cd hp =
                  nu == 0 ? -hv.values[1] : 0.5 * (hv.values[nu - 1] - hv.values[nu + 1]);
              return a * hp / hv.values[nu] * (q - p);
            },
            0.0, 1.0, 256);
      }
      const int count = static_cast<int>(std::lround(total.imag() / (2.0 * oracle::kPi)));
      total_count += count;
      mismatches += set.count(nu) != count;
    }
    o.detail << ", poles " << total_count << " counted, " << mismatches << " mismatches";
    o.require(mismatches == 0, "argument-principle pole counts exact");
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.detail << "; " << secs << " s";
  o.require(secs < 120.0, "runtime < 2 min");
}

void c10(Outcome &o)
{
  fem::GeometryConfig g;
  g.kind = fem::GeometryConfig::Kind::SingleDisk;
  g.d = 0.3;
  g.degree = 3;
  g.levels = 0;
  g.nu_max = 6;
  const DtnNep nep = fem::build_problem(g);
  const Pole z = polish_pole(2.0, 4, cd(1.1, -0.99));
  const cd mu = z.z + cd(0.05, 0.0);
  const SmfOperator ops = cancelled_terms(build_table(mu, 2.0, 6, 40, {z.z}), nep);
  const int n = nep.size(), na = nep.boundary_size();
  // The +-4 pair shares the pole, so the active boundary vectors are q and conj(q).
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(n, 2);
  Q.col(0).head(na) = nep.q().col(4).conjugate();
  Q.col(1).head(na) = nep.q().col(4);
  const Eigen::MatrixXcd Qo = Q.householderQr().householderQ() * Eigen::MatrixXcd::Identity(n, 2);
  std::mt19937 gen(7);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial)
  {
    VecC v(n);
    for (auto &x : v)
    {
      x = cd(nd(gen), nd(gen));
    }
    v -= Qo * (Qo.adjoint() * v);
    v -= Qo * (Qo.adjoint() * v);
    worst = std::max(worst, ops.apply(z.z, v).norm() / ops.apply(mu, v).norm());
  }
  o.detail << "pole nu=4 at " << z.z.real() << std::showpos << z.z.imag() << std::noshowpos
           << "i, worst ||T~(z)v|| / ||T~(mu)v|| = " << sci(worst);
  o.require(worst <= 1e-8, "relative norm <= 1e-8");
}

}  // namespace

int main(int argc, char **argv)
{
  const std::vector<std::pair<std::string, std::pair<const char *, void (*)(Outcome &)>>> all = {
      {"C1", {"exact-relation benchmark", c1}},
      {"C2", {"single disk end to end", c2}},
      {"C3", {"h-FEM rate", c3}},
      {"C4", {"p-FEM rate", c4}},
      {"C5", {"nu_max rule", c5}},
      {"C6", {"pole cancellation", c6}},
      {"C7", {"dimer regression", c7}},
      {"C8", {"radius independence", c8}},
      {"C9", {"oracle suites", c9}},
      {"C10", {"rank one at a pole", c10}},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failures = 0;
  for (const auto &[id, entry] : all)
  {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end())
    {
      continue;
    }
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try
    {
      entry.second(o);
    }
    catch (const std::exception &e)
    {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << entry.first << ": "
              << o.detail.str() << " (" << static_cast<int>(secs + 0.5) << " s)" << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
