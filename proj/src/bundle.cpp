// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <istream>
#include <ostream>
#include <string>

#include "dtnres/errors.hpp"
#include "dtnres/nepcore.hpp"

namespace dtnres
{

namespace
{

void write_coo(std::ostream &os, const SpMat &S)
{
  for (int k = 0; k < S.outerSize(); ++k)
  {
    for (SpMat::InnerIterator it(S, k); it; ++it)
    {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

SpMat read_coo(std::istream &is, int n, long nnz)
{
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nnz);
  for (long k = 0; k < nnz; ++k)
  {
    long i = 0, j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v) || i < 0 || j < 0 || i >= n || j >= n)
    {
      throw ConfigError("bundle: malformed sparse entry " + std::to_string(k));
    }
    trip.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  }
  SpMat S(n, n);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

}  // namespace

void write_bundle(std::ostream &os, const DtnNep &nep)
{
  const auto old = os.precision(17);
  os << "dtnres-bundle 1 " << nep.size() << ' ' << nep.boundary_size() << ' ' << nep.radius()
     << ' ' << nep.nu_max() << ' ' << nep.A().nonZeros() << ' ' << nep.M().nonZeros() << '\n';
  write_coo(os, nep.A());
  write_coo(os, nep.M());
  const Eigen::MatrixXcd &q = nep.q();
  for (int i = 0; i < q.rows(); ++i)
  {
    for (int nu = 0; nu < q.cols(); ++nu)
    {
      os << (nu ? " " : "") << q(i, nu).real() << ' ' << q(i, nu).imag();
    }
    os << '\n';
  }
  os.precision(old);
}

DtnNep read_bundle(std::istream &is)
{
  std::string magic;
  int version = 0, n = 0, na = 0, nu_max = 0;
  double a = 0.0;
  long nnz_a = 0, nnz_m = 0;
  if (!(is >> magic >> version >> n >> na >> a >> nu_max >> nnz_a >> nnz_m) ||
      magic != "dtnres-bundle" || version != 1 || n < 1 || na < 0 || na > n || nu_max < 0)
  {
    throw ConfigError("bundle: bad header");
  }
  SpMat A = read_coo(is, n, nnz_a);
  SpMat M = read_coo(is, n, nnz_m);
  Eigen::MatrixXcd q(na, nu_max + 1);
  for (int i = 0; i < na; ++i)
  {
    for (int nu = 0; nu <= nu_max; ++nu)
    {
      double re = 0.0, im = 0.0;
      if (!(is >> re >> im))
      {
        throw ConfigError("bundle: truncated boundary block");
      }
      q(i, nu) = cd(re, im);
    }
  }
  return DtnNep(std::move(A), std::move(M), std::move(q), a);
}

}  // namespace dtnres
