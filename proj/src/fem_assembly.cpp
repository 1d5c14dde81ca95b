// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dtnres/errors.hpp"
#include "dtnres/fem.hpp"
#include "dtnres/nepcore.hpp"

namespace dtnres::fem
{

namespace
{

constexpr double kPi = std::numbers::pi;

// Basis values and derivatives of one 1D basis at a rule's points.
struct Tabulated
{
  int nb, nq;
  std::vector<double> phi, dphi;  // [q * nb + a]
};

Tabulated tabulate(const LagrangeBasis1D &basis, const std::vector<double> &x)
{
  Tabulated t{basis.size(), static_cast<int>(x.size()), {}, {}};
  t.phi.resize(t.nb * t.nq);
  t.dphi.resize(t.nb * t.nq);
  for (int q = 0; q < t.nq; ++q)
  {
    basis.eval(x[q], &t.phi[q * t.nb], &t.dphi[q * t.nb]);
  }
  return t;
}

}  // namespace

FeMatrices assemble(const FeSpace &space, const MaterialField &material)
{
  const Mesh &mesh = space.mesh();
  const Rule1D rule = gauss_legendre(space.quadrature_points());
  const Tabulated tab = tabulate(space.basis(), rule.x);
  const int nb = tab.nb, nq = tab.nq, nloc = nb * nb;

  std::vector<Eigen::Triplet<double>> ta, tm;
  const int ncells = static_cast<int>(mesh.cells().size());
  ta.reserve(static_cast<std::size_t>(ncells) * nloc * nloc);
  tm.reserve(static_cast<std::size_t>(ncells) * nloc * nloc);

  Eigen::MatrixXd K(nloc, nloc), Mloc(nloc, nloc);
  Eigen::MatrixXd grad(2, nloc);
  Eigen::VectorXd val(nloc);
  for (int c = 0; c < ncells; ++c)
  {
    K.setZero();
    Mloc.setZero();
    for (int qy = 0; qy < nq; ++qy)
    {
      for (int qx = 0; qx < nq; ++qx)
      {
        const Eigen::Matrix2d J = mesh.jacobian(c, rule.x[qx], rule.x[qy]);
        const double det = J.determinant();
        if (!(det > 0.0))
        {
          std::ostringstream os;
          os << "non-positive Jacobian " << det << " in cell " << c;
          throw GeometryError(os.str());
        }
        const Eigen::Matrix2d Jinv_t = J.inverse().transpose();
        const double w = rule.w[qx] * rule.w[qy] * det;
        const double e2 = material.eta2(mesh.map(c, rule.x[qx], rule.x[qy]));
        for (int j = 0; j < nb; ++j)
        {
          for (int i = 0; i < nb; ++i)
          {
            const int l = i + nb * j;
            const double px = tab.phi[qx * nb + i], py = tab.phi[qy * nb + j];
            val[l] = px * py;
            const Eigen::Vector2d g(tab.dphi[qx * nb + i] * py, px * tab.dphi[qy * nb + j]);
            grad.col(l) = Jinv_t * g;
          }
        }
        K.noalias() += w * grad.transpose() * grad;
        Mloc.noalias() += (w * e2) * val * val.transpose();
      }
    }
    const std::vector<int> &dofs = space.cell_dofs(c);
    for (int j = 0; j < nloc; ++j)
    {
      for (int i = 0; i < nloc; ++i)
      {
        ta.emplace_back(dofs[i], dofs[j], K(i, j));
        tm.emplace_back(dofs[i], dofs[j], Mloc(i, j));
      }
    }
  }
  const int n = space.dof_count();
  FeMatrices out;
  out.A.resize(n, n);
  out.M.resize(n, n);
  out.A.setFromTriplets(ta.begin(), ta.end());
  out.M.setFromTriplets(tm.begin(), tm.end());
  // Exact symmetry (the local matrices are symmetric up to rounding).
  SpMat At = out.A.transpose();
  out.A = 0.5 * (out.A + At);
  SpMat Mt = out.M.transpose();
  out.M = 0.5 * (out.M + Mt);
  return out;
}

double integrate(const FeSpace &space, const std::function<double(const Point &)> &f)
{
  const Mesh &mesh = space.mesh();
  const Rule1D rule = gauss_legendre(space.quadrature_points());
  double sum = 0.0;
  for (int c = 0; c < static_cast<int>(mesh.cells().size()); ++c)
  {
    for (std::size_t qy = 0; qy < rule.x.size(); ++qy)
    {
      for (std::size_t qx = 0; qx < rule.x.size(); ++qx)
      {
        const double det = mesh.jacobian(c, rule.x[qx], rule.x[qy]).determinant();
        sum += rule.w[qx] * rule.w[qy] * det * f(mesh.map(c, rule.x[qx], rule.x[qy]));
      }
    }
  }
  return sum;
}

int boundary_quadrature_points(int degree, int nu)
{
  return std::max(2 * degree + 2, static_cast<int>(std::ceil(2.0 * nu)) + degree);
}

Eigen::MatrixXcd boundary_fourier(const FeSpace &space, int nu_max)
{
  if (nu_max < 0)
  {
    throw RangeError("boundary_fourier: nu_max must be non-negative");
  }
  const Mesh &mesh = space.mesh();
  const int nb = space.basis().size();
  const int na = space.boundary_dof_count();
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(na, nu_max + 1);
  const double inv = 1.0 / std::sqrt(2.0 * kPi);

  std::vector<double> phi(nb);
  int cached_n = -1;
  Rule1D rule;
  for (int nu = 0; nu <= nu_max; ++nu)
  {
    const int n = boundary_quadrature_points(space.degree(), nu);
    if (n != cached_n)
    {
      rule = gauss_legendre(n);
      cached_n = n;
    }
    for (int c = 0; c < static_cast<int>(mesh.cells().size()); ++c)
    {
      if (!mesh.on_boundary(c))
      {
        continue;
      }
      const Cell &cell = mesh.cells()[c];
      const Curve &arc = mesh.blocks()[cell.block].top;
      const double dth = arc.theta1 - arc.theta0;
      // theta is affine in xi along the edge.
      const double th0 = arc.theta0 + 0.5 * (cell.u0 + 1.0) * dth;
      const double th1 = arc.theta0 + 0.5 * (cell.u1 + 1.0) * dth;
      const double jac = 0.5 * std::abs(th1 - th0);
      const std::vector<int> &dofs = space.cell_dofs(c);
      for (int k = 0; k < n; ++k)
      {
        const double th = th0 + 0.5 * (rule.x[k] + 1.0) * (th1 - th0);
        const cd e = std::polar(rule.w[k] * jac * inv, -nu * th);
        space.basis().eval(rule.x[k], phi.data());
        for (int i = 0; i < nb; ++i)
        {
          const int d = dofs[i + nb * (nb - 1)];
          q(d, nu) += phi[i] * e;
        }
      }
    }
  }
  return q;
}

Discretization discretize(const GeometryConfig &config)
{
  if (config.degree < 1 || config.levels < 0 || config.nu_max < 0)
  {
    throw ConfigError("need degree >= 1, levels >= 0, nu_max >= 0");
  }
  Discretization d;
  d.config = config;
  d.material = geometry_material(config);
  d.mesh = std::make_unique<Mesh>(geometry_blocks(config), config.levels, config.a);
  d.space = std::make_unique<FeSpace>(*d.mesh, config.degree);
  return d;
}

DtnNep build_problem(const Discretization &disc)
{
  FeMatrices mats = assemble(*disc.space, disc.material);
  Eigen::MatrixXcd q = boundary_fourier(*disc.space, disc.config.nu_max);
  return DtnNep(std::move(mats.A), std::move(mats.M), std::move(q), disc.config.a);
}

DtnNep build_problem(const GeometryConfig &config)
{
  return build_problem(discretize(config));
}

}  // namespace dtnres::fem
