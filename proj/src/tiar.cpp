// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "dtnres/tiar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dtnres/errors.hpp"

namespace dtnres
{

namespace
{

using cld = std::complex<long double>;

// Ritz values this close to a cancelled pole are eigenvalues of the
// multiplied problem only.
constexpr double kSpuriousRadius = 1e-5;

// Relative size below which a new direction is treated as already in span(Z).
constexpr double kBasisDropTolerance = 1e-13;

cd inner(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &t)
{
  // Frobenius product <a, t> over the leading block of t.
  return (a.array().conjugate() * t.topLeftCorner(a.rows(), a.cols()).array()).sum();
}

}  // namespace

TiarState::TiarState(const SmfOperator &terms, const ShiftedFactorization &lu, const VecC &start)
  : terms_(&terms), lu_(&lu), n_(terms.nep().size())
{
  if (start.size() != n_ || !(start.norm() > 0.0))
  {
    throw RangeError("TIAR: start vector must be non-zero with length N");
  }
  Z_.resize(n_, 1);
  Z_.col(0) = start / start.norm();
  a_.push_back(Eigen::MatrixXcd::Ones(1, 1));
  H_ = Eigen::MatrixXcd::Zero(1, 0);
  const int na = terms.nep().boundary_size();
  qtZ_ = terms.nep().q().transpose() * Z_.topRows(na);
  qhZ_ = terms.nep().q().adjoint() * Z_.topRows(na);
}

Eigen::MatrixXcd TiarState::hessenberg() const
{
  return H_;
}

VecC TiarState::derivative_sum(bool local) const
{
  const int k = k_;
  if (k + 1 > terms_->depth())
  {
    throw RangeError("TIAR: derivative table too shallow for another step");
  }
  const Eigen::MatrixXcd &ak = a_[k];  // (k+1) x cols(Z)
  const int cols = static_cast<int>(ak.cols());
  const DtnNep &nep = terms_->nep();
  const int nterms = static_cast<int>(terms_->terms().size());

  // w_t = sum_{i=1}^{k+1} c_t(i) (i-1)! a_k(i-1, :), accumulated in extended
  // range since c_t(i) (i-1)! can exceed the double range for large i.
  auto combination = [&](int t) {
    std::vector<cld> acc(cols, cld(0.0L));
    long double fact = 1.0L;
    for (int i = 1; i <= k + 1; ++i)
    {
      if (i > 1)
      {
        fact *= static_cast<long double>(i - 1);
      }
      const cd c = terms_->coeff(t, i);
      const cld s = cld(c.real(), c.imag()) * fact;
      for (int l = 0; l < cols; ++l)
      {
        const cd v = ak(i - 1, l);
        acc[l] += s * cld(v.real(), v.imag());
      }
    }
    Eigen::VectorXcd w(cols);
    for (int l = 0; l < cols; ++l)
    {
      w[l] = cd(static_cast<double>(acc[l].real()), static_cast<double>(acc[l].imag()));
    }
    return w;
  };

  VecC sum = VecC::Zero(n_);
  const int na = nep.boundary_size();
  Eigen::VectorXcd c1 = Eigen::VectorXcd::Zero(nep.nu_max() + 1);
  Eigen::VectorXcd c2 = Eigen::VectorXcd::Zero(nep.nu_max() + 1);
  for (int t = 0; t < nterms; ++t)
  {
    const SmfTerm &term = terms_->terms()[t];
    const Eigen::VectorXcd w = combination(t);
    if (term.kind == SmfTerm::Kind::Boundary && local)
    {
      c1[term.nu] = (qtZ_.row(term.nu).head(cols) * w).value();
      if (term.nu > 0)
      {
        c2[term.nu] = (qhZ_.row(term.nu).head(cols) * w).value();
      }
      continue;
    }
    sum += terms_->apply_term(t, Z_.leftCols(cols) * w);
  }
  if (local && na > 0)
  {
    sum.head(na) += nep.q().conjugate() * c1 + nep.q() * c2;
  }
  return sum;
}

bool TiarState::append_basis_column(VecC x0, Eigen::VectorXcd &h, double &beta)
{
  const int c = static_cast<int>(Z_.cols());
  const double scale = x0.norm();
  h = Z_.adjoint() * x0;
  x0 -= Z_ * h;
  const Eigen::VectorXcd h2 = Z_.adjoint() * x0;
  x0 -= Z_ * h2;
  h += h2;
  beta = x0.norm();
  // x0 already lies in span(Z): keep the basis and let the coefficient
  // matrices stay rectangular.
  if (c >= n_ || !(beta > kBasisDropTolerance * scale))
  {
    beta = 0.0;
    return false;
  }
  Z_.conservativeResize(Eigen::NoChange, c + 1);
  Z_.col(c) = x0 / beta;
  const int na = terms_->nep().boundary_size();
  qtZ_.conservativeResize(Eigen::NoChange, c + 1);
  qhZ_.conservativeResize(Eigen::NoChange, c + 1);
  qtZ_.col(c) = terms_->nep().q().transpose() * Z_.col(c).head(na);
  qhZ_.col(c) = terms_->nep().q().adjoint() * Z_.col(c).head(na);
  return true;
}

bool TiarState::expand()
{
  if (breakdown_)
  {
    return false;
  }
  const int k = k_;
  const VecC rhs = derivative_sum(locality_);
  const VecC x0 = -lu_->solve(rhs);

  Eigen::VectorXcd hz;
  double beta = 0.0;
  const int zc = static_cast<int>(Z_.cols());
  const bool grown = append_basis_column(x0, hz, beta);
  const int cols = static_cast<int>(Z_.cols());

  // New Krylov vector in coefficient form: block 0 is x0 in the Z basis, blocks
  // i >= 1 are y_{i-1}/i from the last vector.
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(k + 2, cols);
  t.row(0).head(zc) = hz.transpose();
  if (grown)
  {
    t(0, zc) = beta;
  }
  for (int i = 1; i <= k + 1; ++i)
  {
    t.row(i).head(a_[k].cols()) = a_[k].row(i - 1) / static_cast<double>(i);
  }

  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(k + 2);
  for (int pass = 0; pass < 2; ++pass)
  {
    for (int j = 0; j <= k; ++j)
    {
      const cd hj = inner(a_[j], t);
      t.topLeftCorner(a_[j].rows(), a_[j].cols()) -= hj * a_[j];
      h[j] += hj;
    }
  }
  const double nt = t.norm();
  h[k + 1] = nt;
  H_.conservativeResize(k + 2, k + 1);
  H_.row(k + 1).setZero();
  H_.col(k) = h;
  if (!(nt >= 1e-14))
  {
    breakdown_ = true;
    k_ = k + 1;
    a_.push_back(Eigen::MatrixXcd::Zero(k + 2, cols));
    return false;
  }
  a_.push_back(t / nt);
  k_ = k + 1;
  return true;
}

std::vector<cd> TiarState::ritz_values(int at) const
{
  std::vector<cd> out;
  const int k = at < 0 ? k_ : std::min(at, k_);
  if (k == 0)
  {
    return out;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H_.topLeftCorner(k, k), false);
  for (int i = 0; i < k; ++i)
  {
    const cd th = es.eigenvalues()[i];
    if (std::abs(th) > 0.0)
    {
      out.push_back(shift() + 1.0 / th);
    }
  }
  return out;
}

bool TiarState::lift(const DtnNep &original, int k, cd theta, const Eigen::VectorXcd &s,
                     double tolerance, RitzPair &out) const
{
  if (!(std::abs(theta) > 0.0))
  {
    return false;
  }
  const int cols = static_cast<int>(a_[k].cols());
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(cols);
  for (int j = 0; j < k; ++j)
  {
    c.head(a_[j].cols()) += s[j] * a_[j].row(0).transpose();
  }
  VecC v = Z_.leftCols(cols) * c;
  const double nv = v.norm();
  if (!(nv > 0.0))
  {
    return false;
  }
  out.theta = theta;
  out.lambda = shift() + 1.0 / theta;
  out.v = v / nv;
  try
  {
    out.backward_error = backward_error(original, out.lambda, out.v);
  }
  catch (const Error &)
  {
    out.backward_error = std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(out.backward_error))
  {
    out.backward_error = std::numeric_limits<double>::infinity();
  }
  out.converged = out.backward_error <= tolerance;
  return true;
}

std::vector<RitzPair> TiarState::ritz_pairs(const DtnNep &original, double tolerance,
                                           int limit) const
{
  std::vector<RitzPair> out;
  if (k_ == 0)
  {
    return out;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H_.topLeftCorner(k_, k_), true);
  std::vector<int> order(k_);
  for (int i = 0; i < k_; ++i)
  {
    order[i] = i;
  }
  // Largest |theta| first: Ritz values closest to the shift.
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[j]);
  });
  for (int idx : order)
  {
    if (limit >= 0 && static_cast<int>(out.size()) >= limit)
    {
      break;
    }
    RitzPair p;
    if (lift(original, k_, es.eigenvalues()[idx], es.eigenvectors().col(idx), tolerance, p))
    {
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::vector<RitzPair> TiarState::ritz_pairs_near(const DtnNep &original,
                                                 const std::vector<cd> &targets,
                                                 const std::vector<cd> &exclude,
                                                 double exclude_radius, double tolerance,
                                                 int at) const
{
  std::vector<RitzPair> out;
  const int k = at < 0 ? k_ : std::min(at, k_);
  if (k == 0)
  {
    return out;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H_.topLeftCorner(k, k), true);
  for (cd target : targets)
  {
    int best = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
    {
      const cd th = es.eigenvalues()[i];
      if (!(std::abs(th) > 0.0))
      {
        continue;
      }
      const cd lam = shift() + 1.0 / th;
      bool skip = false;
      for (cd z : exclude)
      {
        skip = skip || std::abs(lam - z) < exclude_radius;
      }
      if (!skip && std::abs(lam - target) < dist)
      {
        dist = std::abs(lam - target);
        best = i;
      }
    }
    RitzPair p;
    if (best < 0 || !lift(original, k, es.eigenvalues()[best], es.eigenvectors().col(best),
                          tolerance, p))
    {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      p = RitzPair{};
      p.lambda = cd(nan, nan);
      p.backward_error = std::numeric_limits<double>::infinity();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::size_t TiarState::basis_bytes() const
{
  return static_cast<std::size_t>(Z_.size()) * sizeof(cd);
}

std::size_t TiarState::coefficient_bytes() const
{
  std::size_t bytes = static_cast<std::size_t>(H_.size()) * sizeof(cd);
  for (const auto &a : a_)
  {
    bytes += static_cast<std::size_t>(a.size()) * sizeof(cd);
  }
  return bytes;
}

std::vector<RitzPair> TiarResult::converged() const
{
  std::vector<RitzPair> out;
  for (const RitzPair &p : pairs)
  {
    if (p.converged)
    {
      out.push_back(p);
    }
  }
  return out;
}

Region default_cancel_region(cd mu)
{
  const double w = 0.5 * std::max(std::abs(mu.imag()), 0.2);
  return Region{std::max(mu.real() - w, 1e-3), mu.real() + w, mu.imag() - w,
                std::min(mu.imag() + w, 0.0)};
}

VecC seeded_start_vector(int n, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  VecC v(n);
  for (int i = 0; i < n; ++i)
  {
    const double re = dist(gen);
    const double im = dist(gen);
    v[i] = cd(re, im);
  }
  return v / v.norm();
}

TiarResult run(const DtnNep &nep, cd mu, const TiarOptions &options)
{
  const int m = options.max_iterations;
  if (m < 1 || m > 150)
  {
    throw RangeError("TIAR: iteration count must be in 1..150");
  }
  TiarResult result;
  result.shift = mu;
  std::vector<cd> poles;
  if (options.cancel && nep.boundary_size() > 0)
  {
    const Region region = options.pole_region.value_or(default_cancel_region(mu));
    const PoleSet set = find_poles(nep.radius(), nep.nu_max(), region);
    result.cancelled = set.poles;
    poles = set.locations();
  }
  const SmfOperator terms(nep, build_table(mu, nep.radius(), nep.nu_max(), m + 1, poles));
  const ShiftedFactorization lu =
      poles.empty() ? factorize(nep, mu) : ShiftedFactorization(terms.shift_matrix(), mu);

  TiarState state(terms, lu, seeded_start_vector(nep.size(), options.seed));
  state.set_locality(options.locality);
  for (int it = 1; it <= m; ++it)
  {
    if (!state.expand())
    {
      result.breakdown = true;
      break;
    }
  }
  result.iterations = state.iterations();
  const int k = result.iterations;

  if (options.history_stride > 0 && !options.track.empty())
  {
    for (int it = 1; it <= k; ++it)
    {
      if (it % options.history_stride != 0 && it != k)
      {
        continue;
      }
      const std::vector<RitzPair> near = state.ritz_pairs_near(
          nep, options.track, poles, kSpuriousRadius, options.tolerance, it);
      for (int t = 0; t < static_cast<int>(near.size()); ++t)
      {
        if (std::isfinite(near[t].lambda.real()))
        {
          result.history.push_back({it, t, near[t].lambda, near[t].backward_error});
        }
      }
    }
  }

  for (RitzPair &p : state.ritz_pairs(nep, options.tolerance))
  {
    bool spurious = false;
    for (cd z : poles)
    {
      spurious = spurious || std::abs(p.lambda - z) < kSpuriousRadius;
    }
    if (!spurious)
    {
      result.pairs.push_back(std::move(p));
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const RitzPair &x, const RitzPair &y) { return x.backward_error < y.backward_error; });
  // First step at which each converged pair, followed back through the
  // prefix Hessenberg matrices, met the tolerance.
  std::vector<RitzPair *> pending;
  for (RitzPair &p : result.pairs)
  {
    if (p.converged)
    {
      pending.push_back(&p);
    }
  }
  for (int it = 1; it <= k && !pending.empty(); ++it)
  {
    // Only lift where some Ritz value of this step is already close.
    const std::vector<cd> values = state.ritz_values(it);
    std::vector<RitzPair *> close;
    std::vector<cd> targets;
    for (RitzPair *p : pending)
    {
      for (cd v : values)
      {
        if (std::abs(v - p->lambda) <= 1e-6 * std::abs(p->lambda))
        {
          close.push_back(p);
          targets.push_back(p->lambda);
          break;
        }
      }
    }
    if (close.empty())
    {
      continue;
    }
    const std::vector<RitzPair> near =
        state.ritz_pairs_near(nep, targets, poles, kSpuriousRadius, options.tolerance, it);
    for (std::size_t t = 0; t < close.size(); ++t)
    {
      if (near[t].converged &&
          std::abs(near[t].lambda - targets[t]) <= 1e-6 * std::abs(targets[t]))
      {
        close[t]->iterations_to_tolerance = it;
        pending.erase(std::find(pending.begin(), pending.end(), close[t]));
      }
    }
  }
  for (RitzPair *p : pending)
  {
    p->iterations_to_tolerance = k;
  }
  if (result.converged().empty())
  {
    std::ostringstream os;
    os << "no Ritz pair reached backward error " << options.tolerance << " after "
       << result.iterations << " iterations; try more iterations or a shift closer to the targets";
    result.diagnostic = os.str();
  }
  return result;
}

}  // namespace dtnres
