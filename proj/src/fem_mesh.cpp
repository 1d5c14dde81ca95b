// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "dtnres/errors.hpp"
#include "dtnres/fem.hpp"

namespace dtnres::fem
{

namespace
{

constexpr double kPi = std::numbers::pi;

Point polar(const Point &c, double r, double t)
{
  return c + r * Point(std::cos(t), std::sin(t));
}

// Deduplicates points that coincide up to a relative tolerance.
class PointIndex
{
public:
  explicit PointIndex(double scale) : h_(1e-6 * scale), tol_(1e-9 * scale) {}

  int find_or_insert(const Point &x, std::vector<Point> &points)
  {
    const long long kx = std::llround(x.x() / h_), ky = std::llround(x.y() / h_);
    for (long long dx = -1; dx <= 1; ++dx)
    {
      for (long long dy = -1; dy <= 1; ++dy)
      {
        auto it = buckets_.find(key(kx + dx, ky + dy));
        if (it == buckets_.end())
        {
          continue;
        }
        for (int id : it->second)
        {
          if ((points[id] - x).norm() < tol_)
          {
            return id;
          }
        }
      }
    }
    const int id = static_cast<int>(points.size());
    points.push_back(x);
    buckets_[key(kx, ky)].push_back(id);
    return id;
  }

private:
  static long long key(long long a, long long b) { return a * 1000003LL + b * 7919LL + (a ^ (b << 21)); }

  double h_, tol_;
  std::unordered_map<long long, std::vector<int>> buckets_;
};

// Permutation putting points on the circle |x| = a first (sorted by angle),
// everything else after in original order. Returns new index of each old id.
std::vector<int> boundary_first(const std::vector<Point> &pts, double a, int &n_boundary)
{
  std::vector<int> bnd, inner;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i)
  {
    (std::abs(pts[i].norm() - a) < 1e-10 * a ? bnd : inner).push_back(i);
  }
  auto angle = [&](int i) {
    const double t = std::atan2(pts[i].y(), pts[i].x());
    return t < 0 ? t + 2 * kPi : t;
  };
  std::sort(bnd.begin(), bnd.end(), [&](int i, int j) { return angle(i) < angle(j); });
  n_boundary = static_cast<int>(bnd.size());
  std::vector<int> perm(pts.size());
  int next = 0;
  for (int i : bnd)
  {
    perm[i] = next++;
  }
  for (int i : inner)
  {
    perm[i] = next++;
  }
  return perm;
}

}  // namespace

Curve Curve::line(const Point &a, const Point &b)
{
  Curve c;
  c.kind = Kind::Line;
  c.p0 = a;
  c.p1 = b;
  return c;
}

Curve Curve::arc(const Point &center, double r, double t0, double t1)
{
  Curve c;
  c.kind = Kind::Arc;
  c.center = center;
  c.radius = r;
  c.theta0 = t0;
  c.theta1 = t1;
  return c;
}

Point Curve::eval(double t) const
{
  const double s = 0.5 * (t + 1.0);
  if (kind == Kind::Line)
  {
    return (1.0 - s) * p0 + s * p1;
  }
  return polar(center, radius, theta0 + s * (theta1 - theta0));
}

Point Curve::deriv(double t) const
{
  if (kind == Kind::Line)
  {
    return 0.5 * (p1 - p0);
  }
  const double s = 0.5 * (t + 1.0);
  const double th = theta0 + s * (theta1 - theta0);
  return 0.5 * (theta1 - theta0) * radius * Point(-std::sin(th), std::cos(th));
}

Point Block::map(double u, double v) const
{
  const Point b = bottom.eval(u), t = top.eval(u), l = left.eval(v), r = right.eval(v);
  const Point c00 = bottom.eval(-1.0), c10 = bottom.eval(1.0);
  const Point c01 = top.eval(-1.0), c11 = top.eval(1.0);
  const double um = 0.5 * (1.0 - u), up = 0.5 * (1.0 + u);
  const double vm = 0.5 * (1.0 - v), vp = 0.5 * (1.0 + v);
  return vm * b + vp * t + um * l + up * r -
         (um * vm * c00 + up * vm * c10 + um * vp * c01 + up * vp * c11);
}

Eigen::Matrix2d Block::jacobian(double u, double v) const
{
  const Point b = bottom.eval(u), t = top.eval(u), l = left.eval(v), r = right.eval(v);
  const Point db = bottom.deriv(u), dt = top.deriv(u), dl = left.deriv(v), dr = right.deriv(v);
  const Point c00 = bottom.eval(-1.0), c10 = bottom.eval(1.0);
  const Point c01 = top.eval(-1.0), c11 = top.eval(1.0);
  const double um = 0.5 * (1.0 - u), up = 0.5 * (1.0 + u);
  const double vm = 0.5 * (1.0 - v), vp = 0.5 * (1.0 + v);
  Eigen::Matrix2d J;
  J.col(0) = vm * db + vp * dt - 0.5 * l + 0.5 * r -
             (-0.5 * vm * c00 + 0.5 * vm * c10 - 0.5 * vp * c01 + 0.5 * vp * c11);
  J.col(1) = -0.5 * b + 0.5 * t + um * dl + up * dr -
             (-0.5 * um * c00 - 0.5 * up * c10 + 0.5 * um * c01 + 0.5 * up * c11);
  return J;
}

Mesh::Mesh(std::vector<Block> blocks, int levels, double radius)
  : blocks_(std::move(blocks)), levels_(levels), radius_(radius)
{
  if (levels < 0)
  {
    throw GeometryError("mesh refinement level must be non-negative");
  }
  const int f = 1 << levels;
  for (int b = 0; b < static_cast<int>(blocks_.size()); ++b)
  {
    const int nu = blocks_[b].u_div * f, nv = blocks_[b].v_div * f;
    for (int j = 0; j < nv; ++j)
    {
      for (int i = 0; i < nu; ++i)
      {
        cells_.push_back(Cell{b, -1.0 + 2.0 * i / nu, -1.0 + 2.0 * (i + 1) / nu,
                              -1.0 + 2.0 * j / nv, -1.0 + 2.0 * (j + 1) / nv});
      }
    }
  }

  PointIndex index(radius);
  std::vector<Point> pts;
  cell_vertices_.resize(cells_.size());
  static constexpr double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (std::size_t c = 0; c < cells_.size(); ++c)
  {
    for (int k = 0; k < 4; ++k)
    {
      cell_vertices_[c][k] =
          index.find_or_insert(map(static_cast<int>(c), corners[k][0], corners[k][1]), pts);
    }
  }
  const std::vector<int> perm = boundary_first(pts, radius, n_boundary_vertices_);
  vertices_.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
  {
    vertices_[perm[i]] = pts[i];
  }
  for (auto &cv : cell_vertices_)
  {
    for (int &v : cv)
    {
      v = perm[v];
    }
  }
}

Point Mesh::map(int cell, double xi, double eta) const
{
  const Cell &c = cells_[cell];
  const double u = c.u0 + 0.5 * (xi + 1.0) * (c.u1 - c.u0);
  const double v = c.v0 + 0.5 * (eta + 1.0) * (c.v1 - c.v0);
  return blocks_[c.block].map(u, v);
}

Eigen::Matrix2d Mesh::jacobian(int cell, double xi, double eta) const
{
  const Cell &c = cells_[cell];
  const double u = c.u0 + 0.5 * (xi + 1.0) * (c.u1 - c.u0);
  const double v = c.v0 + 0.5 * (eta + 1.0) * (c.v1 - c.v0);
  Eigen::Matrix2d J = blocks_[c.block].jacobian(u, v);
  J.col(0) *= 0.5 * (c.u1 - c.u0);
  J.col(1) *= 0.5 * (c.v1 - c.v0);
  return J;
}

bool Mesh::on_boundary(int cell) const
{
  const Cell &c = cells_[cell];
  return blocks_[c.block].outer_top && c.v1 == 1.0;
}

namespace
{

// Central square plus four blocks out to the circle (c, R). Sector k covers
// angles [k pi/2 - pi/4, k pi/2 + pi/4]; u runs clockwise, v outwards, so
// all Jacobians are positive.
void add_disk_blocks(std::vector<Block> &out, const Point &c, double R, bool outer,
                     const std::string &region)
{
  const double rs = 0.55 * R;
  auto corner = [&](double t) { return polar(c, rs, t); };
  Block centre;
  centre.bottom = Curve::line(corner(5 * kPi / 4), corner(7 * kPi / 4));
  centre.top = Curve::line(corner(3 * kPi / 4), corner(kPi / 4));
  centre.left = Curve::line(corner(5 * kPi / 4), corner(3 * kPi / 4));
  centre.right = Curve::line(corner(7 * kPi / 4), corner(kPi / 4));
  centre.region = region;
  out.push_back(centre);
  for (int k = 0; k < 4; ++k)
  {
    const double phi = k * kPi / 2;
    const double t0 = phi + kPi / 4, t1 = phi - kPi / 4;
    Block b;
    b.bottom = Curve::line(corner(t0), corner(t1));
    b.top = Curve::arc(c, R, t0, t1);
    b.left = Curve::line(corner(t0), polar(c, R, t0));
    b.right = Curve::line(corner(t1), polar(c, R, t1));
    b.outer_top = outer;
    b.region = region;
    out.push_back(b);
  }
}

void check_inside(const MaterialField &mat, double a)
{
  if (mat.support_radius() >= a * (1.0 - 1e-12))
  {
    std::ostringstream os;
    os << "resonator reaches radius " << mat.support_radius()
       << " which touches or crosses the DtN circle of radius " << a;
    throw GeometryError(os.str());
  }
}

}  // namespace

Mesh build_disk_mesh(double a, int levels)
{
  if (!(a > 0.0))
  {
    throw GeometryError("disk radius must be positive");
  }
  std::vector<Block> blocks;
  add_disk_blocks(blocks, Point::Zero(), a, true, "background");
  return Mesh(std::move(blocks), levels, a);
}

double MaterialField::eta2(const Point &x) const
{
  for (const DiskRegion &r : regions_)
  {
    if ((x - r.center).norm() < r.radius)
    {
      return r.eta * r.eta;
    }
  }
  return 1.0;
}

double MaterialField::support_radius() const
{
  double rmax = 0.0;
  for (const DiskRegion &r : regions_)
  {
    if (r.eta != 1.0)
    {
      rmax = std::max(rmax, r.center.norm() + r.radius);
    }
  }
  return rmax;
}

MaterialField geometry_material(const GeometryConfig &g)
{
  using K = GeometryConfig::Kind;
  switch (g.kind)
  {
    case K::SingleDisk:
      return MaterialField({DiskRegion{Point(g.d, 0.0), g.R, g.eta}});
    case K::Dimer:
    {
      const double yc = g.R + 0.5 * g.s;
      return MaterialField({DiskRegion{Point(0.0, yc), g.R, g.eta},
                            DiskRegion{Point(0.0, -yc), g.R, g.eta}});
    }
    case K::Empty:
      return MaterialField();
    case K::Custom:
      return MaterialField(g.regions);
  }
  return MaterialField();
}

std::vector<Block> geometry_blocks(const GeometryConfig &g)
{
  using K = GeometryConfig::Kind;
  if (!(g.a > 0.0))
  {
    throw GeometryError("DtN radius a must be positive");
  }
  check_inside(geometry_material(g), g.a);
  std::vector<Block> blocks;
  const int layers = std::max(1, g.ring_layers);

  if (g.kind == K::Empty || g.kind == K::Custom)
  {
    add_disk_blocks(blocks, Point::Zero(), g.a, true, "background");
    return blocks;
  }

  if (g.kind == K::SingleDisk)
  {
    if (!(g.R > 0.0) || g.d < 0.0)
    {
      throw GeometryError("single disk needs R > 0 and d >= 0");
    }
    const Point c(g.d, 0.0);
    add_disk_blocks(blocks, c, g.R, false, "resonator");
    for (int k = 0; k < 4; ++k)
    {
      const double phi = k * kPi / 2;
      const double t0 = phi + kPi / 4, t1 = phi - kPi / 4;
      Block b;
      b.bottom = Curve::arc(c, g.R, t0, t1);
      b.top = Curve::arc(Point::Zero(), g.a, t0, t1);
      b.left = Curve::line(polar(c, g.R, t0), polar(Point::Zero(), g.a, t0));
      b.right = Curve::line(polar(c, g.R, t1), polar(Point::Zero(), g.a, t1));
      b.v_div = layers;
      b.outer_top = true;
      b.region = "background";
      blocks.push_back(b);
    }
    return blocks;
  }

  // Dimer: each disk sits in a square box of half width yc; the two boxes
  // stack into the rectangle [-yc, yc] x [-2 yc, 2 yc], which is joined to
  // the DtN circle by six blocks.
  if (!(g.R > 0.0) || !(g.s > 0.0))
  {
    throw GeometryError("dimer needs R > 0 and s > 0");
  }
  const double yc = g.R + 0.5 * g.s;
  const double b = yc;
  if (std::sqrt(5.0) * b >= g.a)
  {
    throw GeometryError("dimer block layout needs sqrt(5) (R + s/2) < a");
  }
  for (double sy : {1.0, -1.0})
  {
    const Point c(0.0, sy * yc);
    add_disk_blocks(blocks, c, g.R, false, "resonator");
    for (int k = 0; k < 4; ++k)
    {
      const double phi = k * kPi / 2;
      const double t0 = phi + kPi / 4, t1 = phi - kPi / 4;
      auto box = [&](double t) {
        return Point(c.x() + b * (std::cos(t) > 0 ? 1.0 : -1.0),
                     c.y() + b * (std::sin(t) > 0 ? 1.0 : -1.0));
      };
      Block blk;
      blk.bottom = Curve::arc(c, g.R, t0, t1);
      blk.top = Curve::line(box(t0), box(t1));
      blk.left = Curve::line(polar(c, g.R, t0), box(t0));
      blk.right = Curve::line(polar(c, g.R, t1), box(t1));
      blk.region = "background";
      blocks.push_back(blk);
    }
  }
  const std::vector<Point> V = {Point(b, 0.0),  Point(b, 2 * b),   Point(-b, 2 * b),
                                Point(-b, 0.0), Point(-b, -2 * b), Point(b, -2 * b)};
  for (int k = 0; k < 6; ++k)
  {
    const Point &p = V[k], &q = V[(k + 1) % 6];
    double tp = std::atan2(p.y(), p.x()), tq = std::atan2(q.y(), q.x());
    while (tq <= tp)
    {
      tq += 2 * kPi;
    }
    Block blk;
    blk.bottom = Curve::line(q, p);
    blk.top = Curve::arc(Point::Zero(), g.a, tq, tp);
    blk.left = Curve::line(q, g.a * q.normalized());
    blk.right = Curve::line(p, g.a * p.normalized());
    blk.v_div = layers;
    blk.outer_top = true;
    blk.region = "background";
    blocks.push_back(blk);
  }
  return blocks;
}

FeSpace::FeSpace(const Mesh &mesh, int degree, int extra_quadrature)
  : mesh_(&mesh), p_(degree), nq_(degree + 2 + extra_quadrature),
    basis_(gauss_lobatto(std::max(degree, 1) + 1).x)
{
  if (degree < 1)
  {
    throw RangeError("FeSpace: polynomial degree must be >= 1");
  }
  const std::vector<double> &g = basis_.nodes();
  const int n1 = p_ + 1;
  PointIndex index(mesh.radius());
  std::vector<Point> pts;
  const int ncells = static_cast<int>(mesh.cells().size());
  cell_dofs_.assign(ncells, std::vector<int>(n1 * n1));
  for (int c = 0; c < ncells; ++c)
  {
    for (int j = 0; j < n1; ++j)
    {
      for (int i = 0; i < n1; ++i)
      {
        cell_dofs_[c][i + n1 * j] = index.find_or_insert(mesh.map(c, g[i], g[j]), pts);
      }
    }
  }
  const std::vector<int> perm = boundary_first(pts, mesh.radius(), n_boundary_);
  points_.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
  {
    points_[perm[i]] = pts[i];
  }
  for (auto &dofs : cell_dofs_)
  {
    for (int &d : dofs)
    {
      d = perm[d];
    }
  }
}

}  // namespace dtnres::fem
