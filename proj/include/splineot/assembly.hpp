// Copyright 2026 The splineot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "splineot/bbspline.hpp"

namespace splineot {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// A density with known bounds. `lower` may be zero for densities that vanish
/// on part of the domain; transport requires it to be positive.
class Density {
 public:
  using Fn = std::function<double(Point2)>;

  Density() = default;
  Density(Fn fn, double lower, double upper, std::string descriptor);
  static Density constant(double value);

  double operator()(Point2 p) const { return fn_(p); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const std::string& descriptor() const { return descriptor_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

  Density scaled(double factor) const;
  Density shifted(Point2 shift) const;  // x -> f(x - shift)

 private:
  Fn fn_;
  double lower_ = 0.0;
  double upper_ = 0.0;
  std::string descriptor_;
};

struct DensityPair {
  Density f;  // source, on V
  Density g;  // target, on W
};

// Evaluation points with their locations and the derivative rows of all six
// operators (value, d/dx, d/dy, d2/dx2, d2/dxdy, d2/dy2).
class PointOperators {
 public:
  enum Op { kValue = 0, kDx, kDy, kDxx, kDxy, kDyy, kOpCount };

  PointOperators(const SplineSpace& space, std::vector<Point2> points, std::vector<Location> locations);
  static PointOperators from_domain_points(const SplineSpace& space, const DomainPointSet& pts,
                                           const std::vector<int>& subset);
  static PointOperators from_points(const SplineSpace& space, const std::vector<Point2>& points);

  int size() const { return static_cast<int>(points_.size()); }
  Point2 point(int i) const { return points_[i]; }
  const Location& location(int i) const { return locations_[i]; }
  const double* row(int i, Op op) const { return rows_.data() + (static_cast<std::size_t>(i) * kOpCount + op) * m_; }
  int block_size() const { return m_; }

  double apply(int i, Op op, const Eigen::VectorXd& coeffs) const;
  HessianInfo hessian(int i, const Eigen::VectorXd& coeffs) const;

  // One sparse row per point: sum_op weight[op] * row(op).
  SparseMatrix matrix(const std::vector<std::array<double, kOpCount>>& weights) const;
  SparseMatrix matrix(Op op) const;
  SparseMatrix laplacian() const;

 private:
  int m_;
  int n_;
  std::vector<Point2> points_;
  std::vector<Location> locations_;
  std::vector<double> rows_;
};

/// Rows of C^0..C^r Bernstein coefficient conditions across every interior
/// edge; H c = 0 iff the spline is C^r.
SparseMatrix smoothness_matrix(const SplineSpace& space);

struct LaplaceRows {
  SparseMatrix K;
  std::vector<int> points;  // indices into the DomainPointSet
};

LaplaceRows assemble_laplace(const SplineSpace& space, const DomainPointSet& pts);

struct RowBlock {
  SparseMatrix B;
  Eigen::VectorXd rhs;
};

RowBlock assemble_dirichlet(const SplineSpace& space, const std::vector<Point2>& points,
                            const std::function<double(Point2)>& h);

struct NeumannRecord {
  Point2 point;
  Point2 normal;
  Point2 target;
};

RowBlock assemble_neumann(const SplineSpace& space, const std::vector<NeumannRecord>& records);
Eigen::VectorXd neumann_rhs(const std::vector<NeumannRecord>& records);

// Dense row with row.dot(c) equal to the integral of the spline.
Eigen::VectorXd mean_value_row(const SplineSpace& space);

/// One subharmonic update value. The radicand is floored at `floor_sq`
/// (4 f0/g_max); `clamped` reports whether the floor was used.
double mae_rhs_value(double lap, double det, double ratio, double floor_sq, bool* clamped = nullptr);

struct MaeRhs {
  Eigen::VectorXd rhs;
  Eigen::VectorXd lap;    // Laplacian of u_k at the points
  Eigen::VectorXd det;    // Hessian determinant of u_k
  Eigen::VectorXd ratio;  // f / g(grad u_ref)
  int clamp_events = 0;
};

// f(x)/g(grad u_ref(x)) at every point; throws on g outside its bounds.
Eigen::VectorXd density_ratio(const PointOperators& ops, const Eigen::VectorXd& u_ref, const DensityPair& d);

MaeRhs mae_rhs(const PointOperators& ops, const Eigen::VectorXd& u_k, const Eigen::VectorXd& ratio,
               const DensityPair& d);
MaeRhs mae_rhs(const BForm& u_k, const BForm& u_ref, const DensityPair& d, const PointOperators& ops);

struct Residual {
  double rmse = 0.0;
  double sup = 0.0;
  std::vector<double> field;
};

// det D^2 u - f/g(grad u) at the given points.
Residual mae_residual(const BForm& u, const DensityPair& d, const std::vector<Point2>& grid);

// Points of an n x n grid over the mesh bounding box (cell-centred when
// `centred`, otherwise including the box edges) that lie in the mesh.
std::vector<Point2> mesh_grid(const Triangulation& mesh, int n, bool centred = false);

// Matrix Market text for debugging dumps.
std::string matrix_market(const SparseMatrix& m);

}  // namespace splineot
