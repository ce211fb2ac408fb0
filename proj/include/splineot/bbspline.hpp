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
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <string>
#include <string_view>

#include "splineot/mesh.hpp"

namespace splineot {

struct LatticeIndex {
  int i = 0;
  int j = 0;
  int k = 0;
};

// Position of (i, j, n-i-j) in the degree-n lexicographic order (i decreasing,
// then j decreasing).
constexpr int lattice_index(int n, int i, int j) {
  const int s = n - i;
  return s * (s + 1) / 2 + (s - j);
}
constexpr int lattice_size(int n) { return (n + 1) * (n + 2) / 2; }

// All lattice triples of degree n in lexicographic order.
std::vector<LatticeIndex> lattice(int n);

/// Degree-D piecewise polynomials on a triangulation in B-form, one block of
/// (D+1)(D+2)/2 coefficients per triangle (triangle-major).
class SplineSpace {
 public:
  // Requires D >= 3r + 2 unless `force` is set.
  SplineSpace(MeshPtr mesh, int degree, int smoothness, bool force = false);

  const Triangulation& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int smoothness() const { return smoothness_; }
  int block_size() const { return block_; }
  int dimension() const { return block_ * mesh_->triangle_count(); }
  int local_index(int i, int j, int k) const;
  const std::vector<LatticeIndex>& lattice() const { return lattice_; }

 private:
  MeshPtr mesh_;
  int degree_;
  int smoothness_;
  int block_;
  std::vector<LatticeIndex> lattice_;
};

using SpacePtr = std::shared_ptr<const SplineSpace>;

class BForm {
 public:
  BForm(SpacePtr space, Eigen::VectorXd coeffs);
  static BForm zero(SpacePtr space);

  const SplineSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  std::span<const double> block(int triangle) const;

 private:
  SpacePtr space_;
  Eigen::VectorXd coeffs_;
};

struct DomainPoint {
  Point2 point;
  int triangle = -1;  // lowest-index triangle containing the point
  Barycentric bary{};
  bool boundary = false;
};

struct DomainPointSet {
  int degree_prime = 1;
  std::vector<DomainPoint> points;
  std::vector<int> interior;  // indices into points
  std::vector<int> boundary;
};

DomainPointSet domain_points(const Triangulation& mesh, int degree_prime);

// Bernstein polynomials of degree n at b, lexicographic order.
std::vector<double> bernstein_values(int n, const Barycentric& b);

// Cartesian gradients of the three barycentric coordinates of triangle t.
std::array<Point2, 3> barycentric_gradients(const Triangulation& mesh, int t);

/// Local coefficients of the functional c -> d^dx/dx d^dy/dy s(p) for a point
/// inside triangle `tri`; `out` has block_size() entries. dx + dy <= 2.
void local_derivative_row(const SplineSpace& space, int tri, const Barycentric& bary, int dx, int dy,
                          std::span<double> out);

struct SparseRow {
  int triangle = -1;
  std::vector<double> values;  // block_size() entries, columns triangle*m + l

  double dot(const Eigen::VectorXd& coeffs) const;
};

SparseRow basis_derivative_row(const SplineSpace& space, Point2 p, int dx, int dy);

// d^dx/dx d^dy/dy s(p) by directional coefficient reduction and de Casteljau.
double eval_bform(const BForm& s, Point2 p, int dx, int dy);
double eval_bform_at(const BForm& s, const Location& loc, int dx, int dy);

struct HessianInfo {
  double det = 0.0;
  double lap = 0.0;
  Point2 grad;
  double hxx = 0.0;
  double hxy = 0.0;
  double hyy = 0.0;
  double value = 0.0;

  double min_eigenvalue() const;
};

HessianInfo hessian_det_lap(const BForm& s, Point2 p);
HessianInfo hessian_at(const BForm& s, const Location& loc);

double min_eigenvalue(double hxx, double hxy, double hyy);

/// Exact integral: sum over triangles of area / C(D+2,2) times the block sum.
double integral_bform(const BForm& s);

/// Per-triangle interpolation at the degree-D domain points; reproduces
/// polynomials of total degree <= D exactly.
BForm interpolate(SpacePtr space, const std::function<double(Point2)>& fn);

// JSON object {degree, smoothness, mesh_hash, coeffs}.
std::string bform_to_json(const BForm& s);
BForm bform_from_json(std::string_view text, MeshPtr mesh);

}  // namespace splineot
