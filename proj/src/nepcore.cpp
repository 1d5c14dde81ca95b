// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "dtnres/nepcore.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <Eigen/SparseLU>
#ifdef DTNRES_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "dtnres/errors.hpp"
#include "dtnres/specfun.hpp"

namespace dtnres
{

namespace
{

double power_norm(const SpMat &S)
{
  const int n = static_cast<int>(S.rows());
  if (n == 0)
  {
    return 0.0;
  }
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i)
  {
    x[i] = 1.0 + 0.5 * std::sin(1.0 + 7.0 * i);
  }
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < 30; ++it)
  {
    Eigen::VectorXd y = S * x;
    est = y.norm();
    if (est == 0.0)
    {
      return 0.0;
    }
    x = y / est;
  }
  return est;
}

std::string format_complex(cd z)
{
  std::ostringstream os;
  os.precision(15);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

}  // namespace

DtnNep::DtnNep(SpMat A, SpMat M, Eigen::MatrixXcd q, double a)
  : A_(std::move(A)), M_(std::move(M)), q_(std::move(q)), a_(a)
{
  if (A_.rows() != A_.cols() || M_.rows() != A_.rows() || M_.cols() != A_.cols())
  {
    throw RangeError("DtnNep: A and M must be square and of equal size");
  }
  if (q_.rows() > A_.rows() || q_.cols() < 1)
  {
    throw RangeError("DtnNep: boundary block must have N_a <= N rows and nu_max+1 >= 1 columns");
  }
  if (!(a > 0.0))
  {
    throw RangeError("DtnNep: radius must be positive");
  }
  A_.makeCompressed();
  M_.makeCompressed();
  norm_A_ = power_norm(A_);
  norm_M_ = power_norm(M_);
  q_norm2_.resize(q_.cols());
  for (int nu = 0; nu < q_.cols(); ++nu)
  {
    q_norm2_[nu] = q_.col(nu).squaredNorm();
  }
}

std::vector<cd> DtnNep::dtn_symbols(cd lambda) const
{
  const int nmax = nu_max();
  const specfun::HankelVector hv = specfun::hankel_vector(nmax + 2, a_ * lambda);
  std::vector<cd> g(nmax + 1);
  for (int nu = 0; nu <= nmax; ++nu)
  {
    const cd h = hv.values[nu];
    const cd dh = nu == 0 ? -hv.values[1] : 0.5 * (hv.values[nu - 1] - hv.values[nu + 1]);
    if (!(std::abs(h) > 1e-14 * std::abs(dh)))
    {
      throw PoleError("DtN symbol evaluated at a Hankel zero: H_" + std::to_string(nu) +
                          "(a lambda) = 0 at lambda = " + format_complex(lambda),
                      nu, lambda);
    }
    g[nu] = lambda * dh / h;
  }
  return g;
}

VecC DtnNep::apply_boundary_mode(int nu, const VecC &xb) const
{
  const auto q = q_.col(nu);
  VecC y = q.conjugate() * (q.transpose() * xb).value();
  if (nu > 0)
  {
    y += q * q.dot(xb);
  }
  return y;
}

VecC DtnNep::apply(cd lambda, const VecC &v) const
{
  if (v.size() != size())
  {
    throw RangeError("apply_T: vector size mismatch");
  }
  VecC y = A_ * v - (lambda * lambda) * (M_ * v);
  const int na = boundary_size();
  if (na == 0)
  {
    return y;
  }
  const std::vector<cd> g = dtn_symbols(lambda);
  const VecC vb = v.head(na);
  // sum_nu c_nu W_nu vb with W_nu = conj(q) q^T + q q^H for nu > 0.
  const Eigen::VectorXcd qt = q_.transpose() * vb;  // q^T vb
  const Eigen::VectorXcd qh = q_.adjoint() * vb;    // q^H vb
  Eigen::VectorXcd c1(q_.cols()), c2(q_.cols());
  for (int nu = 0; nu < q_.cols(); ++nu)
  {
    const cd c = -a_ * g[nu];
    c1[nu] = c * qt[nu];
    c2[nu] = nu == 0 ? cd(0.0) : c * qh[nu];
  }
  y.head(na) += q_.conjugate() * c1 + q_ * c2;
  return y;
}

SpMatC DtnNep::combine(cd c_A, cd c_M, const std::vector<cd> &c_nu) const
{
  const int n = size(), na = boundary_size();
  std::vector<Eigen::Triplet<cd>> trip;
  trip.reserve(A_.nonZeros() + M_.nonZeros() + static_cast<std::size_t>(na) * na);
  for (int k = 0; k < A_.outerSize(); ++k)
  {
    for (SpMat::InnerIterator it(A_, k); it; ++it)
    {
      trip.emplace_back(it.row(), it.col(), c_A * it.value());
    }
  }
  for (int k = 0; k < M_.outerSize(); ++k)
  {
    for (SpMat::InnerIterator it(M_, k); it; ++it)
    {
      trip.emplace_back(it.row(), it.col(), c_M * it.value());
    }
  }
  if (na > 0)
  {
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(na, na);
    for (int nu = 0; nu < q_.cols(); ++nu)
    {
      const auto q = q_.col(nu);
      W += c_nu.at(nu) * (q.conjugate() * q.transpose());
      if (nu > 0)
      {
        W += c_nu[nu] * (q * q.adjoint());
      }
    }
    for (int j = 0; j < na; ++j)
    {
      for (int i = 0; i < na; ++i)
      {
        trip.emplace_back(i, j, W(i, j));
      }
    }
  }
  SpMatC K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  return K;
}

SpMatC DtnNep::matrix(cd lambda) const
{
  std::vector<cd> c(q_.cols(), cd(0.0));
  if (boundary_size() > 0)
  {
    const std::vector<cd> g = dtn_symbols(lambda);
    for (int nu = 0; nu < q_.cols(); ++nu)
    {
      c[nu] = -a_ * g[nu];
    }
  }
  return combine(1.0, -lambda * lambda, c);
}

Eigen::MatrixXcd DtnNep::dense(cd lambda) const
{
  return Eigen::MatrixXcd(matrix(lambda));
}

VecC apply_T(const DtnNep &nep, cd lambda, const VecC &v)
{
  return nep.apply(lambda, v);
}

double backward_error(const DtnNep &nep, cd lambda, const VecC &v)
{
  const double nv = v.norm();
  if (!(nv > 0.0))
  {
    throw RangeError("backward_error: zero vector");
  }
  const VecC r = nep.apply(lambda, v / nv);
  const double l = std::abs(lambda);
  double alpha = nep.norm_A() + l * l * nep.norm_M();
  if (nep.boundary_size() > 0)
  {
    const std::vector<cd> g = nep.dtn_symbols(lambda);
    for (int nu = 0; nu <= nep.nu_max(); ++nu)
    {
      // |lambda| a |H'/H| ||Q^nu||, counted for +nu and -nu.
      alpha += (nu == 0 ? 1.0 : 2.0) * nep.radius() * std::abs(g[nu]) * nep.q_norm2(nu);
    }
  }
  return r.norm() / alpha;
}

struct ShiftedFactorization::Impl
{
#ifdef DTNRES_HAVE_UMFPACK
  Eigen::UmfPackLU<SpMatC> lu;
#else
  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu;
#endif
  mutable std::mutex mutex;
  mutable double residual = 0.0;
};

ShiftedFactorization::ShiftedFactorization(SpMatC K, cd mu)
  : K_(std::move(K)), mu_(mu), impl_(std::make_unique<Impl>())
{
  K_.makeCompressed();
  impl_->lu.compute(K_);
  if (impl_->lu.info() != Eigen::Success)
  {
    throw SingularError("LU factorization of T(mu) failed at mu = " + format_complex(mu) +
                        " (mu at or next to an eigenvalue or pole)");
  }
}

ShiftedFactorization::~ShiftedFactorization() = default;
ShiftedFactorization::ShiftedFactorization(ShiftedFactorization &&) noexcept = default;
ShiftedFactorization &ShiftedFactorization::operator=(ShiftedFactorization &&) noexcept = default;

VecC ShiftedFactorization::solve(const VecC &b) const
{
  std::lock_guard<std::mutex> lock(impl_->mutex);
  const double nb = b.norm();
  VecC x = impl_->lu.solve(b);
  if (nb == 0.0)
  {
    impl_->residual = 0.0;
    return x;
  }
  VecC r = b - K_ * x;
  double rel = r.norm() / nb;
  for (int it = 0; it < 5 && rel > 1e-10; ++it)
  {
    x += impl_->lu.solve(r);
    r = b - K_ * x;
    rel = r.norm() / nb;
  }
  if (!std::isfinite(rel))
  {
    throw SingularError("solve with T(mu) produced non-finite values at mu = " + format_complex(mu_));
  }
  impl_->residual = rel;
  return x;
}

double ShiftedFactorization::last_residual() const
{
  std::lock_guard<std::mutex> lock(impl_->mutex);
  return impl_->residual;
}

ShiftedFactorization factorize(const DtnNep &nep, cd mu)
{
  if (nep.boundary_size() > 0)
  {
    const double a = nep.radius();
    const specfun::HankelVector hv = specfun::hankel_vector(nep.nu_max() + 2, a * mu);
    for (int nu = 0; nu <= nep.nu_max(); ++nu)
    {
      const cd h = hv.values[nu];
      const cd dh = nu == 0 ? -hv.values[1] : 0.5 * (hv.values[nu - 1] - hv.values[nu + 1]);
      const double dist = std::abs(h) / (a * std::abs(dh));
      if (!(dist >= 1e-6))
      {
        throw PoleError("shift " + format_complex(mu) + " lies within 1e-6 of a zero of H_" +
                            std::to_string(nu) + "(a lambda); use pole cancellation",
                        nu, mu - h / (a * dh));
      }
    }
  }
  return ShiftedFactorization(nep.matrix(mu), mu);
}

//
// SMF form.
//

SmfOperator::SmfOperator(const DtnNep &nep, DerivativeTable table)
  : nep_(&nep), table_(std::move(table))
{
  if (table_.nu_max() < nep.nu_max() || std::abs(table_.radius() - nep.radius()) > 0.0)
  {
    throw RangeError("SMF terms: derivative table does not match the problem (a, nu_max)");
  }
  terms_.push_back({SmfTerm::Kind::Stiffness, 0});
  terms_.push_back({SmfTerm::Kind::Mass, 0});
  if (nep.boundary_size() > 0)
  {
    for (int nu = 0; nu <= nep.nu_max(); ++nu)
    {
      terms_.push_back({SmfTerm::Kind::Boundary, nu});
    }
  }
  const int n = table_.k_max() + 1;
  const cd mu = table_.shift();
  cA_ = pole_polynomial_taylor(mu, table_.poles(), n, false);
  std::vector<cd> with_sq = table_.poles();
  with_sq.push_back(0.0);
  with_sq.push_back(0.0);
  cM_ = pole_polynomial_taylor(mu, with_sq, n, false);
  for (cd &c : cM_)
  {
    c = -c;
  }
}

cd SmfOperator::coeff(int t, int j) const
{
  const SmfTerm &term = terms_.at(t);
  switch (term.kind)
  {
    case SmfTerm::Kind::Stiffness:
      return cA_.at(j);
    case SmfTerm::Kind::Mass:
      return cM_.at(j);
    case SmfTerm::Kind::Boundary:
      return -nep_->radius() * table_.coeff(j, term.nu);
  }
  return 0.0;
}

cd SmfOperator::value(int t, cd lambda) const
{
  const cd s = lambda - shift();
  cd acc = 0.0;
  for (int j = depth(); j >= 0; --j)
  {
    acc = acc * s + coeff(t, j);
  }
  return acc;
}

VecC SmfOperator::apply_term(int t, const VecC &v) const
{
  const SmfTerm &term = terms_.at(t);
  switch (term.kind)
  {
    case SmfTerm::Kind::Stiffness:
      return nep_->A() * v;
    case SmfTerm::Kind::Mass:
      return nep_->M() * v;
    case SmfTerm::Kind::Boundary:
    {
      VecC y = VecC::Zero(v.size());
      const int na = nep_->boundary_size();
      y.head(na) = nep_->apply_boundary_mode(term.nu, v.head(na));
      return y;
    }
  }
  return VecC();
}

VecC SmfOperator::apply(cd lambda, const VecC &v) const
{
  VecC y = VecC::Zero(v.size());
  for (int t = 0; t < static_cast<int>(terms_.size()); ++t)
  {
    y += value(t, lambda) * apply_term(t, v);
  }
  return y;
}

SpMatC SmfOperator::shift_matrix() const
{
  std::vector<cd> c(nep_->nu_max() + 1);
  for (int nu = 0; nu <= nep_->nu_max(); ++nu)
  {
    c[nu] = -nep_->radius() * table_.coeff(0, nu);
  }
  return nep_->combine(cA_[0], cM_[0], c);
}

SmfOperator smf_terms(const DtnNep &nep, cd mu, int k_max)
{
  return SmfOperator(nep, build_table(mu, nep.radius(), nep.nu_max(), k_max));
}

SmfOperator cancelled_terms(const DerivativeTable &table, const DtnNep &nep)
{
  return SmfOperator(nep, table);
}

VecC smf_apply_exact(const DtnNep &nep, cd lambda, const VecC &v)
{
  VecC y = nep.A() * v;
  y -= (lambda * lambda) * (nep.M() * v);
  const int na = nep.boundary_size();
  if (na == 0)
  {
    return y;
  }
  const std::vector<cd> g = nep.dtn_symbols(lambda);
  for (int nu = 0; nu <= nep.nu_max(); ++nu)
  {
    y.head(na) -= (nep.radius() * g[nu]) * nep.apply_boundary_mode(nu, v.head(na));
  }
  return y;
}

}  // namespace dtnres
