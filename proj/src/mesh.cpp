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

#include "splineot/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "splineot/error.hpp"

namespace splineot {

namespace {

constexpr double kDuplicateTol = 1e-12;
constexpr double kDegenerateRel = 1e-14;

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
}

std::string fmt_point(Point2 p) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", p.x, p.y);
  return buf;
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kIndexOutOfRange: return "index_out_of_range";
    case ErrorCode::kDuplicateVertex: return "duplicate_vertex";
    case ErrorCode::kDegenerateTriangle: return "degenerate_triangle";
    case ErrorCode::kNonManifold: return "non_manifold";
    case ErrorCode::kDanglingVertex: return "dangling_vertex";
    case ErrorCode::kCenterOutside: return "center_outside";
    case ErrorCode::kNotStarShaped: return "not_star_shaped";
    case ErrorCode::kNoIntersection: return "no_intersection";
    case ErrorCode::kOutOfDomain: return "out_of_domain";
    case ErrorCode::kDensityRange: return "density_range";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kBlowUp: return "blow_up";
    case ErrorCode::kMapQuality: return "map_quality";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kMeshMismatch: return "mesh_mismatch";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Triangulation

Triangulation::Triangulation(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty() || triangles_.empty())
    throw Error(ErrorCode::kInvalidArgument, "mesh needs at least one triangle");
  const int nv = vertex_count();
  for (const Point2& p : vertices_) {
    if (!is_finite(p)) throw Error(ErrorCode::kNonFinite, "non-finite vertex coordinate");
    bbox_.expand(p);
  }
  for (const auto& tri : triangles_)
    for (int v : tri)
      if (v < 0 || v >= nv) throw Error(ErrorCode::kIndexOutOfRange, "triangle vertex index out of range");

  // duplicate vertices: sweep over x-sorted order
  std::vector<int> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return vertices_[a].x < vertices_[b].x; });
  for (int i = 0; i < nv; ++i) {
    const Point2 p = vertices_[order[i]];
    for (int j = i + 1; j < nv && vertices_[order[j]].x - p.x <= kDuplicateTol; ++j) {
      if (distance(p, vertices_[order[j]]) <= kDuplicateTol)
        throw Error(ErrorCode::kDuplicateVertex, "duplicate vertices " + std::to_string(order[i]) + " and " +
                                                     std::to_string(order[j]) + " at " + fmt_point(p));
    }
  }

  const double min_area = kDegenerateRel * bbox_.area();
  std::vector<int> refs(nv, 0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    auto& tri = triangles_[t];
    const double a2 = orient2d(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (std::abs(a2) * 0.5 <= min_area)
      throw Error(ErrorCode::kDegenerateTriangle, "degenerate triangle " + std::to_string(t));
    if (a2 < 0.0) std::swap(tri[1], tri[2]);
    for (int v : tri) ++refs[v];
  }
  for (int v = 0; v < nv; ++v)
    if (refs[v] == 0) throw Error(ErrorCode::kDanglingVertex, "vertex " + std::to_string(v) + " is not used");

  build_adjacency();

  std::uint64_t h = 1469598103934665603ULL;
  fnv_mix(h, vertices_.data(), vertices_.size() * sizeof(Point2));
  fnv_mix(h, triangles_.data(), triangles_.size() * sizeof(std::array<int, 3>));
  hash_ = h;

  build_locator();
}

void Triangulation::build_adjacency() {
  std::unordered_map<std::uint64_t, int> lookup;
  lookup.reserve(triangles_.size() * 3);
  triangle_edges_.assign(triangles_.size(), {-1, -1, -1});
  for (int t = 0; t < triangle_count(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[(i + 1) % 3];
      const int b = tri[(i + 2) % 3];
      const auto key = edge_key(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        lookup.emplace(key, edge_count());
        triangle_edges_[t][i] = edge_count();
        edges_.push_back(MeshEdge{{a, b}, t, -1});
        continue;
      }
      MeshEdge& e = edges_[it->second];
      if (e.right >= 0)
        throw Error(ErrorCode::kNonManifold,
                    "edge (" + std::to_string(a) + ", " + std::to_string(b) + ") shared by more than two triangles");
      if (e.v[0] != b || e.v[1] != a)
        throw Error(ErrorCode::kNonManifold, "triangles " + std::to_string(e.left) + " and " + std::to_string(t) +
                                                 " overlap across edge (" + std::to_string(a) + ", " +
                                                 std::to_string(b) + ")");
      e.right = t;
      triangle_edges_[t][i] = it->second;
    }
  }

  std::vector<int> outgoing(vertices_.size(), -1);
  std::vector<int> boundary;
  for (int e = 0; e < edge_count(); ++e) {
    const MeshEdge& edge = edges_[e];
    mesh_size_ = std::max(mesh_size_, distance(vertices_[edge.v[0]], vertices_[edge.v[1]]));
    if (!edge.is_boundary()) {
      interior_edges_.push_back(e);
      continue;
    }
    if (outgoing[edge.v[0]] >= 0)
      throw Error(ErrorCode::kNonManifold, "boundary pinches at vertex " + std::to_string(edge.v[0]));
    outgoing[edge.v[0]] = e;
    boundary.push_back(e);
  }
  std::sort(boundary.begin(), boundary.end(),
            [&](int a, int b) { return edges_[a].v[0] < edges_[b].v[0]; });

  std::vector<char> visited(edges_.size(), 0);
  std::vector<std::vector<int>> loops;  // edge ids
  for (int start : boundary) {
    if (visited[start]) continue;
    std::vector<int> loop;
    int e = start;
    while (!visited[e]) {
      visited[e] = 1;
      loop.push_back(e);
      e = outgoing[edges_[e].v[1]];
      if (e < 0) throw Error(ErrorCode::kNonManifold, "open boundary chain");
    }
    if (e != start) throw Error(ErrorCode::kNonManifold, "boundary chains do not close");
    loops.push_back(std::move(loop));
  }
  auto loop_area = [&](const std::vector<int>& loop) {
    double a = 0.0;
    for (int e : loop) a += cross(vertices_[edges_[e].v[0]], vertices_[edges_[e].v[1]]);
    return 0.5 * a;
  };
  std::stable_sort(loops.begin(), loops.end(), [&](const auto& a, const auto& b) {
    return std::abs(loop_area(a)) > std::abs(loop_area(b));
  });
  for (const auto& loop : loops) {
    std::vector<int> verts;
    for (int e : loop) {
      boundary_edges_.push_back(e);
      verts.push_back(edges_[e].v[0]);
    }
    boundary_loops_.push_back(std::move(verts));
  }
}

void Triangulation::build_locator() {
  const double w = std::max(bbox_.width(), 1e-300);
  const double h = std::max(bbox_.height(), 1e-300);
  const double cells = std::max(1.0, static_cast<double>(triangles_.size()));
  grid_nx_ = std::clamp(static_cast<int>(std::ceil(std::sqrt(cells * w / h))), 1, 4096);
  grid_ny_ = std::clamp(static_cast<int>(std::ceil(cells / grid_nx_)), 1, 4096);
  buckets_.assign(static_cast<std::size_t>(grid_nx_) * grid_ny_, {});
  const double margin = 1e-9 * bbox_.diameter();
  for (int t = 0; t < triangle_count(); ++t) {
    BoundingBox tb;
    for (int i = 0; i < 3; ++i) tb.expand(vertex(t, i));
    const int i0 = std::clamp(static_cast<int>((tb.lo.x - margin - bbox_.lo.x) / w * grid_nx_), 0, grid_nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((tb.hi.x + margin - bbox_.lo.x) / w * grid_nx_), 0, grid_nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((tb.lo.y - margin - bbox_.lo.y) / h * grid_ny_), 0, grid_ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((tb.hi.y + margin - bbox_.lo.y) / h * grid_ny_), 0, grid_ny_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * grid_nx_ + i].push_back(t);
  }
}

double Triangulation::triangle_area(int t) const {
  return 0.5 * orient2d(vertex(t, 0), vertex(t, 1), vertex(t, 2));
}

double Triangulation::total_area() const {
  double a = 0.0;
  for (int t = 0; t < triangle_count(); ++t) a += triangle_area(t);
  return a;
}

Barycentric Triangulation::barycentric(int t, Point2 p) const {
  const Point2 a = vertex(t, 0), b = vertex(t, 1), c = vertex(t, 2);
  const double d = orient2d(a, b, c);
  const double b0 = orient2d(p, b, c) / d;
  const double b1 = orient2d(a, p, c) / d;
  return {b0, b1, 1.0 - b0 - b1};
}

Point2 Triangulation::point_at(int t, const Barycentric& b) const {
  return b[0] * vertex(t, 0) + b[1] * vertex(t, 1) + b[2] * vertex(t, 2);
}

std::optional<Location> Triangulation::locate(Point2 p, double tol) const {
  const double margin = 1e-9 * bbox_.diameter();
  if (!bbox_.contains(p, margin)) return std::nullopt;
  const double w = std::max(bbox_.width(), 1e-300);
  const double h = std::max(bbox_.height(), 1e-300);
  const int i = std::clamp(static_cast<int>((p.x - bbox_.lo.x) / w * grid_nx_), 0, grid_nx_ - 1);
  const int j = std::clamp(static_cast<int>((p.y - bbox_.lo.y) / h * grid_ny_), 0, grid_ny_ - 1);
  for (int t : buckets_[static_cast<std::size_t>(j) * grid_nx_ + i]) {
    const Barycentric b = barycentric(t, p);
    if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol) return Location{t, b};
  }
  return std::nullopt;
}

std::vector<Point2> Triangulation::loop_polyline(int loop) const {
  std::vector<Point2> out;
  for (int v : boundary_loops_.at(loop)) out.push_back(vertices_[v]);
  return out;
}

std::string Triangulation::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

// ---------------------------------------------------------------------------
// Triangle .node/.ele text

namespace {

std::vector<std::vector<std::string>> tokenize_lines(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::istringstream in{std::string(line)};
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) lines.push_back(std::move(tokens));
    pos = end + 1;
  }
  return lines;
}

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, std::string("malformed ") + what + ": '" + s + "'");
  }
}

long to_long(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, std::string("malformed ") + what + ": '" + s + "'");
  }
}

}  // namespace

Triangulation parse_mesh(std::string_view node_text, std::string_view ele_text) {
  const auto node_lines = tokenize_lines(node_text);
  if (node_lines.empty()) throw Error(ErrorCode::kParse, "empty .node text");
  const long nv = to_long(node_lines[0][0], "vertex count");
  if (node_lines[0].size() > 1 && to_long(node_lines[0][1], "dimension") != 2)
    throw Error(ErrorCode::kParse, ".node dimension must be 2");
  if (nv <= 0 || static_cast<std::size_t>(nv) + 1 > node_lines.size())
    throw Error(ErrorCode::kParse, ".node declares " + std::to_string(nv) + " vertices but lists fewer");

  long base = 1;
  std::vector<Point2> vertices(nv);
  std::vector<char> seen(nv, 0);
  for (long i = 0; i < nv; ++i) {
    const auto& tok = node_lines[i + 1];
    if (tok.size() < 3) throw Error(ErrorCode::kParse, "short .node record on line " + std::to_string(i + 2));
    const long id = to_long(tok[0], "vertex index");
    if (i == 0) base = id == 0 ? 0 : 1;
    const long k = id - base;
    if (k < 0 || k >= nv) throw Error(ErrorCode::kIndexOutOfRange, "vertex index out of range: " + tok[0]);
    if (seen[k]) throw Error(ErrorCode::kParse, "vertex index listed twice: " + tok[0]);
    seen[k] = 1;
    vertices[k] = {to_double(tok[1], "x coordinate"), to_double(tok[2], "y coordinate")};
  }

  const auto ele_lines = tokenize_lines(ele_text);
  if (ele_lines.empty()) throw Error(ErrorCode::kParse, "empty .ele text");
  const long nt = to_long(ele_lines[0][0], "triangle count");
  const long per = ele_lines[0].size() > 1 ? to_long(ele_lines[0][1], "nodes per triangle") : 3;
  if (per != 3 && per != 6) throw Error(ErrorCode::kParse, "unsupported nodes per triangle");
  if (nt <= 0 || static_cast<std::size_t>(nt) + 1 > ele_lines.size())
    throw Error(ErrorCode::kParse, ".ele declares " + std::to_string(nt) + " triangles but lists fewer");
  std::vector<std::array<int, 3>> triangles(nt);
  for (long i = 0; i < nt; ++i) {
    const auto& tok = ele_lines[i + 1];
    if (tok.size() < 4) throw Error(ErrorCode::kParse, "short .ele record on line " + std::to_string(i + 2));
    for (int c = 0; c < 3; ++c) {
      const long k = to_long(tok[c + 1], "triangle vertex") - base;
      if (k < 0 || k >= nv)
        throw Error(ErrorCode::kIndexOutOfRange, "index out of range: triangle " + tok[0] + " references " + tok[c + 1]);
      triangles[i][c] = static_cast<int>(k);
    }
  }
  return Triangulation(std::move(vertices), std::move(triangles));
}

std::string format_node(const Triangulation& mesh) {
  std::string out = std::to_string(mesh.vertex_count()) + " 2 0 0\n";
  char buf[128];
  for (int i = 0; i < mesh.vertex_count(); ++i) {
    const Point2 p = mesh.vertices()[i];
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g\n", i + 1, p.x, p.y);
    out += buf;
  }
  return out;
}

std::string format_ele(const Triangulation& mesh) {
  std::string out = std::to_string(mesh.triangle_count()) + " 3 0\n";
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    out += std::to_string(t + 1) + " " + std::to_string(tri[0] + 1) + " " + std::to_string(tri[1] + 1) + " " +
           std::to_string(tri[2] + 1) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polygons and star-shaped domains

double polygon_signed_area(const std::vector<Point2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * a;
}

Point2 polygon_centroid(const std::vector<Point2>& poly) {
  // shifted to the first vertex for accuracy
  const Point2 o = poly.front();
  double a = 0.0;
  Point2 c;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2 p = poly[i] - o;
    const Point2 q = poly[(i + 1) % n] - o;
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return o + c / (3.0 * a);
}

bool polygon_contains(const std::vector<Point2>& poly, Point2 p) {
  bool inside = false;
  for (std::size_t i = 0, n = poly.size(), j = n - 1; i < n; j = i++) {
    const Point2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

double normalize_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  if (t >= two_pi) t -= two_pi;
  return t;
}

namespace {

// Distinct crossings of the ray origin + t dir (t > 0) with the closed polygon.
std::vector<std::pair<double, Point2>> ray_crossings(const std::vector<Point2>& poly, Point2 origin, Point2 dir,
                                                     double scale) {
  std::vector<std::pair<double, Point2>> hits;
  constexpr double kParamTol = 1e-12;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const Point2 e = b - a;
    const double den = cross(dir, e);
    if (std::abs(den) <= 1e-15 * norm(e)) continue;
    const Point2 ao = a - origin;
    const double t = cross(ao, e) / den;
    const double s = cross(ao, dir) / den;
    if (t <= kParamTol * scale || s < -kParamTol || s > 1.0 + kParamTol) continue;
    Point2 hit = origin + t * dir;
    if (s <= kParamTol) hit = a;
    else if (s >= 1.0 - kParamTol) hit = b;
    const bool dup = std::any_of(hits.begin(), hits.end(),
                                 [&](const auto& h) { return distance(h.second, hit) <= 1e-9 * scale; });
    if (!dup) hits.emplace_back(t, hit);
  }
  return hits;
}

}  // namespace

bool StarDomain::contains(Point2 p) const { return polygon_contains(boundary_, p); }

double StarDomain::boundary_distance(Point2 p) const {
  double d = 1e300;
  for (std::size_t i = 0, n = boundary_.size(); i < n; ++i)
    d = std::min(d, segment_distance(p, boundary_[i], boundary_[(i + 1) % n]));
  return d;
}

StarDomain StarDomain::translated(Point2 shift) const {
  StarDomain out = *this;
  for (Point2& p : out.boundary_) p += shift;
  out.center_ += shift;
  out.bbox_ = BoundingBox{};
  for (Point2 p : out.boundary_) out.bbox_.expand(p);
  return out;
}

StarDomain make_star_domain(std::vector<Point2> boundary, std::optional<Point2> center) {
  if (boundary.size() >= 2 && distance(boundary.front(), boundary.back()) <= 1e-14) boundary.pop_back();
  if (boundary.size() < 3) throw Error(ErrorCode::kInvalidArgument, "domain boundary needs at least 3 points");
  for (Point2 p : boundary)
    if (!is_finite(p)) throw Error(ErrorCode::kNonFinite, "non-finite boundary point");
  double area = polygon_signed_area(boundary);
  if (area < 0.0) {
    std::reverse(boundary.begin(), boundary.end());
    area = -area;
  }
  StarDomain d;
  for (Point2 p : boundary) d.bbox_.expand(p);
  if (area <= 1e-14 * d.bbox_.area()) throw Error(ErrorCode::kInvalidArgument, "domain boundary has zero area");
  d.boundary_ = std::move(boundary);
  d.area_ = area;
  d.center_ = center ? *center : polygon_centroid(d.boundary_);

  const double scale = d.bbox_.diameter();
  if (!d.contains(d.center_) || d.boundary_distance(d.center_) <= 1e-12 * scale)
    throw Error(ErrorCode::kCenterOutside, "center " + fmt_point(d.center_) + " is not inside the domain");

  for (int k = 0; k < kStarCheckRays; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / kStarCheckRays;
    const auto hits = ray_crossings(d.boundary_, d.center_, {std::cos(theta), std::sin(theta)}, scale);
    if (hits.size() != 1) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "ray at angle %.6f rad from center %s crosses the boundary %zu times", theta,
                    fmt_point(d.center_).c_str(), hits.size());
      throw Error(ErrorCode::kNotStarShaped, buf);
    }
  }
  return d;
}

StarDomain star_domain_of(const Triangulation& mesh, std::optional<Point2> center) {
  if (mesh.hole_count() > 0)
    throw Error(ErrorCode::kNotStarShaped, "a mesh with holes is not a star-shaped domain");
  return make_star_domain(mesh.loop_polyline(0), center);
}

Point2 ray_exit_point(const StarDomain& domain, double theta) {
  const auto hits = ray_crossings(domain.boundary(), domain.center(), {std::cos(theta), std::sin(theta)},
                                  domain.diameter());
  if (hits.empty()) throw Error(ErrorCode::kNoIntersection, "ray does not meet the domain boundary");
  auto best = std::max_element(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return best->second;
}

std::vector<BoundaryRecord> boundary_collocation(const StarDomain& domain, const Triangulation& mesh,
                                                 int degree_prime) {
  if (degree_prime < 1) throw Error(ErrorCode::kInvalidArgument, "collocation degree must be at least 1");
  for (int e : mesh.boundary_edges()) {
    const Point2 p = mesh.vertices()[mesh.edges()[e].v[0]];
    if (domain.boundary_distance(p) > 1e-9)
      throw Error(ErrorCode::kInvalidArgument, "mesh boundary vertex " + fmt_point(p) + " is off the domain boundary");
  }
  std::vector<BoundaryRecord> out;
  const auto& bedges = mesh.boundary_edges();
  std::size_t pos = 0;
  for (const auto& loop : mesh.boundary_loops()) {
    const std::size_t first = pos;
    const std::size_t last = pos + loop.size() - 1;
    for (; pos <= last; ++pos) {
      const MeshEdge& edge = mesh.edges()[bedges[pos]];
      const Point2 a = mesh.vertices()[edge.v[0]];
      const Point2 b = mesh.vertices()[edge.v[1]];
      const Point2 d = b - a;
      const Point2 normal = Point2{d.y, -d.x} / norm(d);
      const int i0 = pos == first ? 0 : 1;
      const int i1 = pos == last ? degree_prime - 1 : degree_prime;
      for (int i = i0; i <= i1; ++i) {
        Point2 p = i == 0 ? a : (i == degree_prime ? b : a + (static_cast<double>(i) / degree_prime) * d);
        const Point2 r = p - domain.center();
        out.push_back({p, normal, normalize_angle(std::atan2(r.y, r.x)), static_cast<int>(pos)});
      }
    }
  }
  return out;
}

std::vector<Point2> parse_polyline(std::string_view text) {
  std::vector<Point2> out;
  for (const auto& tok : tokenize_lines(text)) {
    if (tok.size() < 2) throw Error(ErrorCode::kParse, "polyline line needs an x and a y value");
    out.push_back({to_double(tok[0], "x"), to_double(tok[1], "y")});
  }
  if (out.size() < 3) throw Error(ErrorCode::kParse, "polyline needs at least 3 points");
  return out;
}

// ---------------------------------------------------------------------------
// Builtin shapes

namespace shapes {

namespace {

// Splits the cell with corners a (lower left), b, c, d (counterclockwise).
void split_cell(std::vector<std::array<int, 3>>& t, int a, int b, int c, int d, CellSplit split, int parity) {
  if (split == CellSplit::kForward || parity % 2 == 0) {
    t.push_back({a, b, c});
    t.push_back({a, c, d});
  } else {
    t.push_back({a, b, d});
    t.push_back({b, c, d});
  }
}

}  // namespace

Triangulation rectangle_mesh(Point2 lo, Point2 hi, int nx, int ny, CellSplit split) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::kInvalidArgument, "rectangle mesh needs at least one cell");
  std::vector<Point2> v;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      v.push_back({lo.x + (hi.x - lo.x) * i / nx, lo.y + (hi.y - lo.y) * j / ny});
  std::vector<std::array<int, 3>> t;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      split_cell(t, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), split, i + j);
    }
  return Triangulation(std::move(v), std::move(t));
}

Triangulation l_shape_mesh(int n, CellSplit split) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "L-shape mesh needs n >= 1");
  const int m = 2 * n;
  std::vector<int> index((m + 1) * (m + 1), -1);
  std::vector<Point2> v;
  auto id = [&](int i, int j) {
    int& slot = index[j * (m + 1) + i];
    if (slot < 0) {
      slot = static_cast<int>(v.size());
      v.push_back({-1.0 + 2.0 * i / m, -1.0 + 2.0 * j / m});
    }
    return slot;
  };
  std::vector<std::array<int, 3>> t;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      if (i >= n && j >= n) continue;
      split_cell(t, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1), split, i + j);
    }
  return Triangulation(std::move(v), std::move(t));
}

Triangulation refine_uniform(const Triangulation& mesh) {
  std::vector<Point2> v = mesh.vertices();
  std::vector<int> mid(mesh.edge_count());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    const auto& edge = mesh.edges()[e];
    mid[e] = static_cast<int>(v.size());
    v.push_back(0.5 * (mesh.vertices()[edge.v[0]] + mesh.vertices()[edge.v[1]]));
  }
  std::vector<std::array<int, 3>> t;
  for (int k = 0; k < mesh.triangle_count(); ++k) {
    const auto& tri = mesh.triangles()[k];
    const auto& te = mesh.triangle_edges(k);
    const int m0 = mid[te[0]], m1 = mid[te[1]], m2 = mid[te[2]];
    t.push_back({tri[0], m2, m1});
    t.push_back({m2, tri[1], m0});
    t.push_back({m1, m0, tri[2]});
    t.push_back({m0, m1, m2});
  }
  return Triangulation(std::move(v), std::move(t));
}

Triangulation map_mesh(const Triangulation& mesh, const std::function<Point2(Point2)>& fn) {
  std::vector<Point2> v;
  v.reserve(mesh.vertex_count());
  for (Point2 p : mesh.vertices()) v.push_back(fn(p));
  return Triangulation(std::move(v), mesh.triangles());
}

Triangulation translate_mesh(const Triangulation& mesh, Point2 shift) {
  return map_mesh(mesh, [shift](Point2 p) { return p + shift; });
}

Triangulation disk_mesh(int levels, double radius, Point2 center) {
  std::vector<Point2> v{{0.0, 0.0}};
  std::vector<std::array<int, 3>> t;
  for (int k = 0; k < 6; ++k) {
    const double a = k * std::numbers::pi / 3.0;
    v.push_back({std::cos(a), std::sin(a)});
    t.push_back({0, 1 + k, 1 + (k + 1) % 6});
  }
  Triangulation hex(std::move(v), std::move(t));
  for (int l = 0; l < levels; ++l) hex = refine_uniform(hex);
  const double apothem = std::cos(std::numbers::pi / 6.0);
  return map_mesh(hex, [&](Point2 p) {
    const double r = norm(p);
    if (r == 0.0) return center;
    double h = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double a = (k + 0.5) * std::numbers::pi / 3.0;
      h = std::max(h, (p.x * std::cos(a) + p.y * std::sin(a)) / apothem);
    }
    return center + (radius * h / r) * p;
  });
}

std::vector<Point2> rectangle(Point2 lo, Point2 hi) { return {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}; }

std::vector<Point2> regular_polygon(int n, double radius, Point2 center) {
  std::vector<Point2> out;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    out.push_back(center + radius * Point2{std::cos(a), std::sin(a)});
  }
  return out;
}

std::vector<Point2> l_shape() { return {{-1, -1}, {1, -1}, {1, 0}, {0, 0}, {0, 1}, {-1, 1}}; }

Point2 moon_map(Point2 p) { return {p.x + 0.6 * (1.0 - p.y * p.y), p.y}; }

std::vector<Point2> moon(int n) {
  auto pts = regular_polygon(n);
  for (Point2& p : pts) p = moon_map(p);
  return pts;
}

std::vector<Point2> oval(int n, double a, double b) {
  auto pts = regular_polygon(n);
  for (Point2& p : pts) p = {a * p.x, b * p.y};
  return pts;
}

}  // namespace shapes

}  // namespace splineot
