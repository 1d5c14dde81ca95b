// Copyright dtnres contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef DTNRES_FEM_HPP
#define DTNRES_FEM_HPP

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dtnres
{
class DtnNep;
}

namespace dtnres::fem
{

using Point = Eigen::Vector2d;
using cd = std::complex<double>;

//
// One-dimensional rules and bases on [-1, 1].
//
struct Rule1D
{
  std::vector<double> x;
  std::vector<double> w;
};

Rule1D gauss_legendre(int n);
// n >= 2 points including both end points.
Rule1D gauss_lobatto(int n);

// Lagrange polynomials through a node set.
class LagrangeBasis1D
{
public:
  explicit LagrangeBasis1D(std::vector<double> nodes);
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double> &nodes() const { return nodes_; }
  void eval(double x, double *values, double *derivs = nullptr) const;

private:
  std::vector<double> nodes_;
  std::vector<double> bary_;
};

//
// Geometry: blocks with straight or circular edges, blended transfinitely.
//
struct Curve
{
  enum class Kind
  {
    Line,
    Arc
  };
  Kind kind = Kind::Line;
  Point p0 = Point::Zero(), p1 = Point::Zero();  // Line end points
  Point center = Point::Zero();                   // Arc
  double radius = 0.0, theta0 = 0.0, theta1 = 0.0;

  static Curve line(const Point &a, const Point &b);
  static Curve arc(const Point &c, double r, double t0, double t1);

  // t in [-1, 1].
  Point eval(double t) const;
  Point deriv(double t) const;
};

// Transfinite (Coons) patch on [-1,1]^2. Edges: bottom(u) at v=-1, top(u) at
// v=1, left(v) at u=-1, right(v) at u=1; corners must agree.
struct Block
{
  Curve bottom, right, top, left;
  int u_div = 1, v_div = 1;     // base subdivision before refinement
  bool outer_top = false;       // top edge lies on the DtN circle
  std::string region;           // informational tag

  Point map(double u, double v) const;
  // Columns d/du, d/dv.
  Eigen::Matrix2d jacobian(double u, double v) const;
};

struct Cell
{
  int block;
  double u0, u1, v0, v1;  // parameter rectangle inside the block
};

// Quadrilateral cells with exact curved geometry. Mesh vertices (cell
// corners) are numbered with the vertices on the circle of radius `radius`
// first.
class Mesh
{
public:
  Mesh(std::vector<Block> blocks, int levels, double radius);

  const std::vector<Block> &blocks() const { return blocks_; }
  const std::vector<Cell> &cells() const { return cells_; }
  int levels() const { return levels_; }
  double radius() const { return radius_; }

  Point map(int cell, double xi, double eta) const;
  Eigen::Matrix2d jacobian(int cell, double xi, double eta) const;
  // Whether the eta = +1 side of the cell lies on the outer circle.
  bool on_boundary(int cell) const;

  const std::vector<Point> &vertices() const { return vertices_; }
  int boundary_vertex_count() const { return n_boundary_vertices_; }
  // Corner vertex ids, counterclockwise from (xi, eta) = (-1, -1).
  const std::array<int, 4> &cell_vertices(int cell) const { return cell_vertices_[cell]; }

private:
  std::vector<Block> blocks_;
  std::vector<Cell> cells_;
  int levels_;
  double radius_;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 4>> cell_vertices_;
  int n_boundary_vertices_ = 0;
};

// Disk of radius a: central square plus four blended boundary blocks.
Mesh build_disk_mesh(double a, int levels);

//
// Material coefficient eta^2.
//
struct DiskRegion
{
  Point center = Point::Zero();
  double radius = 0.0;
  double eta = 1.0;
};

class MaterialField
{
public:
  MaterialField() = default;
  explicit MaterialField(std::vector<DiskRegion> regions) : regions_(std::move(regions)) {}
  double eta2(const Point &x) const;
  const std::vector<DiskRegion> &regions() const { return regions_; }
  // Largest distance from the origin reached by eta^2 - 1 != 0.
  double support_radius() const;

private:
  std::vector<DiskRegion> regions_;
};

//
// Continuous nodal Gauss-Lobatto space of degree p.
//
class FeSpace
{
public:
  FeSpace(const Mesh &mesh, int degree, int extra_quadrature = 0);

  const Mesh &mesh() const { return *mesh_; }
  int degree() const { return p_; }
  int dof_count() const { return static_cast<int>(points_.size()); }
  int boundary_dof_count() const { return n_boundary_; }
  int quadrature_points() const { return nq_; }
  const LagrangeBasis1D &basis() const { return basis_; }

  // (p+1)^2 global indices; local index i + (p+1) j for GLL nodes (xi_i, eta_j).
  const std::vector<int> &cell_dofs(int cell) const { return cell_dofs_[cell]; }
  const std::vector<Point> &dof_points() const { return points_; }

private:
  const Mesh *mesh_;
  int p_;
  int nq_;
  LagrangeBasis1D basis_;
  std::vector<std::vector<int>> cell_dofs_;
  std::vector<Point> points_;
  int n_boundary_ = 0;
};

struct FeMatrices
{
  Eigen::SparseMatrix<double> A;  // stiffness
  Eigen::SparseMatrix<double> M;  // eta^2-weighted mass
};

FeMatrices assemble(const FeSpace &space, const MaterialField &material);

// Integral of a scalar function over the meshed domain (geometry check).
double integrate(const FeSpace &space, const std::function<double(const Point &)> &f);

// Boundary Fourier vectors: column nu (0..nu_max) holds
// q_j^nu = (2 pi)^{-1/2} int_0^{2 pi} phi_j(a, theta) exp(-i nu theta) dtheta
// for the boundary dofs j = 0..N_a-1.
Eigen::MatrixXcd boundary_fourier(const FeSpace &space, int nu_max);

// Number of Gauss points per boundary edge used for mode nu.
int boundary_quadrature_points(int degree, int nu);

//
// Benchmark geometries.
//
struct GeometryConfig
{
  enum class Kind
  {
    SingleDisk,  // disk of radius R, index eta, centre (d, 0)
    Dimer,       // two disks of radius R, index eta, centres (0, +-(R + s/2))
    Empty,       // eta = 1 everywhere
    Custom       // disk regions on a plain (non-conforming) disk mesh
  };
  Kind kind = Kind::SingleDisk;
  double R = 1.0;
  double d = 0.5;
  double s = 0.25;
  double eta = 2.0;
  double a = 2.0;
  int degree = 4;
  int levels = 1;
  int nu_max = 25;
  int ring_layers = 1;   // radial subdivision of blocks outside the resonators
  std::vector<DiskRegion> regions;  // Custom only
};

// Mesh blocks for a configuration (interface conforming for SingleDisk and
// Dimer). Throws GeometryError when a resonator touches the DtN circle.
std::vector<Block> geometry_blocks(const GeometryConfig &config);
MaterialField geometry_material(const GeometryConfig &config);

// Mesh, space, matrices and boundary vectors of one configuration.
struct Discretization
{
  GeometryConfig config;
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<FeSpace> space;
  MaterialField material;
};

Discretization discretize(const GeometryConfig &config);
DtnNep build_problem(const GeometryConfig &config);
DtnNep build_problem(const Discretization &disc);

}  // namespace dtnres::fem

#endif  // DTNRES_FEM_HPP
