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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splineot/geometry.hpp"

namespace splineot {

using Barycentric = std::array<double, 3>;

struct MeshEdge {
  std::array<int, 2> v;  // oriented as in the `left` triangle (counterclockwise)
  int left = -1;
  int right = -1;  // -1 on the boundary
  bool is_boundary() const { return right < 0; }
};

struct Location {
  int triangle = -1;
  Barycentric bary{};
};

/// Conforming triangulation with counterclockwise triangles and edge adjacency.
///
/// Immutable after construction. The constructor validates the input and
/// throws `Error` on duplicate vertices, degenerate or overlapping triangles,
/// non-manifold edges and dangling vertices.
class Triangulation {
 public:
  Triangulation(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<MeshEdge>& edges() const { return edges_; }
  const std::vector<int>& interior_edges() const { return interior_edges_; }
  // Boundary edge ids, loop by loop; within a loop each edge starts where the
  // previous one ends. The first loop is the outer boundary.
  const std::vector<int>& boundary_edges() const { return boundary_edges_; }
  const std::vector<std::vector<int>>& boundary_loops() const { return boundary_loops_; }
  // Edge ids of triangle t; entry i is the edge opposite local vertex i.
  const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int hole_count() const { return static_cast<int>(boundary_loops_.size()) - 1; }

  Point2 vertex(int t, int local) const { return vertices_[triangles_[t][local]]; }
  double triangle_area(int t) const;
  double total_area() const;
  double mesh_size() const { return mesh_size_; }
  const BoundingBox& bbox() const { return bbox_; }

  Barycentric barycentric(int t, Point2 p) const;
  Point2 point_at(int t, const Barycentric& b) const;
  // Lowest-index triangle containing p (barycentric tolerance `tol`).
  std::optional<Location> locate(Point2 p, double tol = 1e-12) const;

  // Polyline of a boundary loop (vertex coordinates, no repeated endpoint).
  std::vector<Point2> loop_polyline(int loop) const;

  // FNV-1a digest of the vertex coordinates and connectivity.
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

 private:
  void build_adjacency();
  void build_locator();

  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<MeshEdge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<int> interior_edges_;
  std::vector<int> boundary_edges_;
  std::vector<std::vector<int>> boundary_loops_;
  double mesh_size_ = 0.0;
  BoundingBox bbox_;
  std::uint64_t hash_ = 0;

  // bucket grid for point location
  int grid_nx_ = 1;
  int grid_ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

using MeshPtr = std::shared_ptr<const Triangulation>;

/// Parses Triangle-style .node/.ele text. Indices are 1-based unless the
/// .node file numbers its first vertex 0.
Triangulation parse_mesh(std::string_view node_text, std::string_view ele_text);
std::string format_node(const Triangulation& mesh);
std::string format_ele(const Triangulation& mesh);

class StarDomain {
 public:
  const std::vector<Point2>& boundary() const { return boundary_; }
  Point2 center() const { return center_; }
  double area() const { return area_; }
  const BoundingBox& bbox() const { return bbox_; }
  double diameter() const { return bbox_.diameter(); }

  bool contains(Point2 p) const;
  double boundary_distance(Point2 p) const;
  StarDomain translated(Point2 shift) const;

 private:
  friend StarDomain make_star_domain(std::vector<Point2>, std::optional<Point2>);
  std::vector<Point2> boundary_;
  Point2 center_;
  double area_ = 0.0;
  BoundingBox bbox_;
};

inline constexpr int kStarCheckRays = 720;

/// Validates a simple closed polygon as star-shaped about `center` (default:
/// the polygon centroid). The boundary is reordered counterclockwise.
StarDomain make_star_domain(std::vector<Point2> boundary, std::optional<Point2> center = {});
StarDomain star_domain_of(const Triangulation& mesh, std::optional<Point2> center = {});

double polygon_signed_area(const std::vector<Point2>& poly);
Point2 polygon_centroid(const std::vector<Point2>& poly);
bool polygon_contains(const std::vector<Point2>& poly, Point2 p);

/// Intersection of the ray center + t (cos θ, sin θ), t > 0, with the boundary.
Point2 ray_exit_point(const StarDomain& domain, double theta);

struct BoundaryRecord {
  Point2 point;
  Point2 normal;  // outward unit normal of the owning edge
  double theta = 0.0;
  int edge = -1;  // position in Triangulation::boundary_edges()
};

/// Degree-`degree_prime` domain points on the boundary edges of `mesh`.
std::vector<BoundaryRecord> boundary_collocation(const StarDomain& domain, const Triangulation& mesh,
                                                 int degree_prime);

std::vector<Point2> parse_polyline(std::string_view text);

double normalize_angle(double theta);

// Structured meshes and polygons used by the benchmarks and the CLI.
namespace shapes {

// kForward splits every cell along its rising diagonal; kUnionJack alternates
// the diagonal so that every convex corner is shared by two triangles.
enum class CellSplit { kForward, kUnionJack };

Triangulation rectangle_mesh(Point2 lo, Point2 hi, int nx, int ny, CellSplit split = CellSplit::kUnionJack);
// [-1,1]^2 with the quadrant (0,1]x(0,1] removed, n cells per unit length.
Triangulation l_shape_mesh(int n, CellSplit split = CellSplit::kUnionJack);
// Disk from a uniformly refined hexagon with vertices pushed radially.
Triangulation disk_mesh(int levels, double radius = 1.0, Point2 center = {});
Triangulation map_mesh(const Triangulation& mesh, const std::function<Point2(Point2)>& fn);
Triangulation refine_uniform(const Triangulation& mesh);
Triangulation translate_mesh(const Triangulation& mesh, Point2 shift);

std::vector<Point2> rectangle(Point2 lo, Point2 hi);
std::vector<Point2> regular_polygon(int n, double radius = 1.0, Point2 center = {});
std::vector<Point2> l_shape();
Point2 moon_map(Point2 p);
std::vector<Point2> moon(int n = 256);
std::vector<Point2> oval(int n = 256, double a = 1.0, double b = 0.6);

}  // namespace shapes

}  // namespace splineot
