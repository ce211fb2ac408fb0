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

#include "splineot/bbspline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <Eigen/LU>
#include "json.hpp"

#include "splineot/error.hpp"

namespace splineot {

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// One reduction step: degree-n coefficients -> degree n-1 with weights w.
// Used for both de Casteljau (w = barycentric point) and directional
// differencing (w = directional coordinates).
std::vector<double> reduce(const std::vector<double>& c, int n, const std::array<double, 3>& w) {
  std::vector<double> out(lattice_size(n - 1));
  for (int i = n - 1; i >= 0; --i)
    for (int j = n - 1 - i; j >= 0; --j) {
      out[lattice_index(n - 1, i, j)] = w[0] * c[lattice_index(n, i + 1, j)] + w[1] * c[lattice_index(n, i, j + 1)] +
                                        w[2] * c[lattice_index(n, i, j)];
    }
  return out;
}

void check_order(int dx, int dy) {
  if (dx < 0 || dy < 0 || dx + dy > 2)
    throw Error(ErrorCode::kInvalidArgument, "derivative order must satisfy 0 <= dx + dy <= 2");
}

Location locate_or_throw(const Triangulation& mesh, Point2 p) {
  auto loc = mesh.locate(p);
  if (!loc) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "point (%.17g, %.17g) is outside the mesh", p.x, p.y);
    throw Error(ErrorCode::kOutOfDomain, buf);
  }
  return *loc;
}

}  // namespace

std::vector<LatticeIndex> lattice(int n) {
  std::vector<LatticeIndex> out;
  out.reserve(lattice_size(n));
  for (int i = n; i >= 0; --i)
    for (int j = n - i; j >= 0; --j) out.push_back({i, j, n - i - j});
  return out;
}

SplineSpace::SplineSpace(MeshPtr mesh, int degree, int smoothness, bool force)
    : mesh_(std::move(mesh)), degree_(degree), smoothness_(smoothness), block_(lattice_size(degree)) {
  if (!mesh_) throw Error(ErrorCode::kInvalidArgument, "spline space needs a mesh");
  if (degree_ < 1) throw Error(ErrorCode::kInvalidArgument, "degree must be at least 1");
  if (smoothness_ < 0) throw Error(ErrorCode::kInvalidArgument, "smoothness must be nonnegative");
  if (smoothness_ >= degree_) throw Error(ErrorCode::kInvalidArgument, "smoothness must be below the degree");
  if (!force && degree_ < 3 * smoothness_ + 2)
    throw Error(ErrorCode::kInvalidArgument, "degree " + std::to_string(degree_) + " < 3r+2 for smoothness " +
                                                 std::to_string(smoothness_) + " (use force to override)");
  lattice_ = splineot::lattice(degree_);
}

int SplineSpace::local_index(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i + j + k != degree_)
    throw Error(ErrorCode::kInvalidArgument, "lattice index does not sum to the degree");
  return lattice_index(degree_, i, j);
}

BForm::BForm(SpacePtr space, Eigen::VectorXd coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw Error(ErrorCode::kInvalidArgument, "B-form needs a spline space");
  if (coeffs_.size() != space_->dimension())
    throw Error(ErrorCode::kInvalidArgument, "coefficient vector length " + std::to_string(coeffs_.size()) +
                                                 " does not match space dimension " +
                                                 std::to_string(space_->dimension()));
}

BForm BForm::zero(SpacePtr space) {
  const int n = space->dimension();
  return BForm(std::move(space), Eigen::VectorXd::Zero(n));
}

std::span<const double> BForm::block(int triangle) const {
  const int m = space_->block_size();
  return {coeffs_.data() + static_cast<std::ptrdiff_t>(triangle) * m, static_cast<std::size_t>(m)};
}

// ---------------------------------------------------------------------------

DomainPointSet domain_points(const Triangulation& mesh, int degree_prime) {
  if (degree_prime < 1) throw Error(ErrorCode::kInvalidArgument, "collocation degree must be at least 1");
  DomainPointSet set;
  set.degree_prime = degree_prime;

  std::vector<char> boundary_vertex(mesh.vertex_count(), 0);
  for (int e : mesh.boundary_edges()) {
    boundary_vertex[mesh.edges()[e].v[0]] = 1;
    boundary_vertex[mesh.edges()[e].v[1]] = 1;
  }
  std::vector<char> vertex_done(mesh.vertex_count(), 0);
  std::map<std::pair<int, int>, char> edge_done;  // (edge, steps from lower vertex)

  const auto lat = lattice(degree_prime);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto& te = mesh.triangle_edges(t);
    for (const auto& l : lat) {
      const int c[3] = {l.i, l.j, l.k};
      const int zeros = (l.i == 0) + (l.j == 0) + (l.k == 0);
      bool boundary = false;
      if (zeros == 2) {
        const int local = l.i ? 0 : (l.j ? 1 : 2);
        const int v = tri[local];
        if (vertex_done[v]) continue;
        vertex_done[v] = 1;
        boundary = boundary_vertex[v];
      } else if (zeros == 1) {
        const int opp = l.i == 0 ? 0 : (l.j == 0 ? 1 : 2);
        const int a = (opp + 1) % 3, b = (opp + 2) % 3;
        const int steps = tri[a] < tri[b] ? c[a] : c[b];
        const int e = te[opp];
        if (!edge_done.emplace(std::make_pair(e, steps), 1).second) continue;
        boundary = mesh.edges()[e].is_boundary();
      }
      const Barycentric b{static_cast<double>(l.i) / degree_prime, static_cast<double>(l.j) / degree_prime,
                          static_cast<double>(l.k) / degree_prime};
      // vertices and edge points use exact endpoint arithmetic
      Point2 p;
      if (zeros == 2) p = mesh.vertices()[tri[l.i ? 0 : (l.j ? 1 : 2)]];
      else p = mesh.point_at(t, b);
      const int idx = static_cast<int>(set.points.size());
      set.points.push_back({p, t, b, boundary});
      (boundary ? set.boundary : set.interior).push_back(idx);
    }
  }
  return set;
}

std::vector<double> bernstein_values(int n, const Barycentric& b) {
  std::vector<double> p0(n + 1), p1(n + 1), p2(n + 1);
  p0[0] = p1[0] = p2[0] = 1.0;
  for (int e = 1; e <= n; ++e) {
    p0[e] = p0[e - 1] * b[0];
    p1[e] = p1[e - 1] * b[1];
    p2[e] = p2[e - 1] * b[2];
  }
  std::vector<double> out(lattice_size(n));
  for (int i = n; i >= 0; --i) {
    const double ci = binomial(n, i);
    for (int j = n - i; j >= 0; --j)
      out[lattice_index(n, i, j)] = ci * binomial(n - i, j) * p0[i] * p1[j] * p2[n - i - j];
  }
  return out;
}

std::array<Point2, 3> barycentric_gradients(const Triangulation& mesh, int t) {
  const Point2 a = mesh.vertex(t, 0), b = mesh.vertex(t, 1), c = mesh.vertex(t, 2);
  const double d = orient2d(a, b, c);
  return {Point2{b.y - c.y, c.x - b.x} / d, Point2{c.y - a.y, a.x - c.x} / d, Point2{a.y - b.y, b.x - a.x} / d};
}

void local_derivative_row(const SplineSpace& space, int tri, const Barycentric& bary, int dx, int dy,
                          std::span<double> out) {
  check_order(dx, dy);
  const int D = space.degree();
  const int q = dx + dy;
  std::fill(out.begin(), out.end(), 0.0);
  if (q > D) return;
  const auto g = barycentric_gradients(space.mesh(), tri);
  const std::array<double, 3> ax{g[0].x, g[1].x, g[2].x};
  const std::array<double, 3> ay{g[0].y, g[1].y, g[2].y};
  std::array<const std::array<double, 3>*, 2> dirs{};
  int nd = 0;
  for (int i = 0; i < dx; ++i) dirs[nd++] = &ax;
  for (int i = 0; i < dy; ++i) dirs[nd++] = &ay;

  const int n = D - q;
  double factor = 1.0;
  for (int i = 0; i < q; ++i) factor *= D - i;
  const auto bv = bernstein_values(n, bary);
  for (int i = n; i >= 0; --i)
    for (int j = n - i; j >= 0; --j) {
      const double w = factor * bv[lattice_index(n, i, j)];
      if (q == 0) {
        out[lattice_index(D, i, j)] += w;
      } else if (q == 1) {
        const auto& d = *dirs[0];
        out[lattice_index(D, i + 1, j)] += w * d[0];
        out[lattice_index(D, i, j + 1)] += w * d[1];
        out[lattice_index(D, i, j)] += w * d[2];
      } else {
        const auto& d0 = *dirs[0];
        const auto& d1 = *dirs[1];
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            const int ii = i + (a == 0) + (b == 0);
            const int jj = j + (a == 1) + (b == 1);
            out[lattice_index(D, ii, jj)] += w * d0[a] * d1[b];
          }
      }
    }
}

double SparseRow::dot(const Eigen::VectorXd& coeffs) const {
  const std::size_t m = values.size();
  const double* c = coeffs.data() + static_cast<std::ptrdiff_t>(triangle) * m;
  double s = 0.0;
  for (std::size_t l = 0; l < m; ++l) s += values[l] * c[l];
  return s;
}

SparseRow basis_derivative_row(const SplineSpace& space, Point2 p, int dx, int dy) {
  check_order(dx, dy);
  const Location loc = locate_or_throw(space.mesh(), p);
  SparseRow row{loc.triangle, std::vector<double>(space.block_size())};
  local_derivative_row(space, loc.triangle, loc.bary, dx, dy, row.values);
  return row;
}

double eval_bform_at(const BForm& s, const Location& loc, int dx, int dy) {
  check_order(dx, dy);
  const SplineSpace& space = s.space();
  int n = space.degree();
  if (dx + dy > n) return 0.0;
  const auto blk = s.block(loc.triangle);
  std::vector<double> c(blk.begin(), blk.end());
  const auto g = barycentric_gradients(space.mesh(), loc.triangle);
  const std::array<double, 3> ax{g[0].x, g[1].x, g[2].x};
  const std::array<double, 3> ay{g[0].y, g[1].y, g[2].y};
  double factor = 1.0;
  for (int i = 0; i < dx; ++i, --n) {
    factor *= n;
    c = reduce(c, n, ax);
  }
  for (int i = 0; i < dy; ++i, --n) {
    factor *= n;
    c = reduce(c, n, ay);
  }
  for (; n > 0; --n) c = reduce(c, n, loc.bary);
  return factor * c[0];
}

double eval_bform(const BForm& s, Point2 p, int dx, int dy) {
  return eval_bform_at(s, locate_or_throw(s.space().mesh(), p), dx, dy);
}

double min_eigenvalue(double hxx, double hxy, double hyy) {
  const double mean = 0.5 * (hxx + hyy);
  const double rad = std::hypot(0.5 * (hxx - hyy), hxy);
  return mean - rad;
}

double HessianInfo::min_eigenvalue() const { return splineot::min_eigenvalue(hxx, hxy, hyy); }

HessianInfo hessian_at(const BForm& s, const Location& loc) {
  const SplineSpace& space = s.space();
  std::vector<double> row(space.block_size());
  const auto blk = s.block(loc.triangle);
  auto apply = [&](int dx, int dy) {
    local_derivative_row(space, loc.triangle, loc.bary, dx, dy, row);
    double v = 0.0;
    for (std::size_t l = 0; l < row.size(); ++l) v += row[l] * blk[l];
    return v;
  };
  HessianInfo h;
  h.value = apply(0, 0);
  h.grad = {apply(1, 0), apply(0, 1)};
  h.hxx = apply(2, 0);
  h.hxy = apply(1, 1);
  h.hyy = apply(0, 2);
  h.det = h.hxx * h.hyy - h.hxy * h.hxy;
  h.lap = h.hxx + h.hyy;
  return h;
}

HessianInfo hessian_det_lap(const BForm& s, Point2 p) {
  return hessian_at(s, locate_or_throw(s.space().mesh(), p));
}

double integral_bform(const BForm& s) {
  const SplineSpace& space = s.space();
  const double denom = binomial(space.degree() + 2, 2);
  double total = 0.0;
  for (int t = 0; t < space.mesh().triangle_count(); ++t) {
    double sum = 0.0;
    for (double c : s.block(t)) sum += c;
    total += space.mesh().triangle_area(t) / denom * sum;
  }
  return total;
}

BForm interpolate(SpacePtr space, const std::function<double(Point2)>& fn) {
  const int D = space->degree();
  const int m = space->block_size();
  const auto& lat = space->lattice();
  Eigen::MatrixXd M(m, m);
  for (int r = 0; r < m; ++r) {
    const Barycentric b{static_cast<double>(lat[r].i) / D, static_cast<double>(lat[r].j) / D,
                        static_cast<double>(lat[r].k) / D};
    const auto bv = bernstein_values(D, b);
    for (int c = 0; c < m; ++c) M(r, c) = bv[c];
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  Eigen::VectorXd coeffs(space->dimension());
  Eigen::VectorXd vals(m);
  const Triangulation& mesh = space->mesh();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (int r = 0; r < m; ++r) {
      const Barycentric b{static_cast<double>(lat[r].i) / D, static_cast<double>(lat[r].j) / D,
                          static_cast<double>(lat[r].k) / D};
      vals[r] = fn(mesh.point_at(t, b));
    }
    coeffs.segment(static_cast<Eigen::Index>(t) * m, m) = lu.solve(vals);
  }
  return BForm(std::move(space), std::move(coeffs));
}

std::string bform_to_json(const BForm& s) {
  nlohmann::json j;
  j["degree"] = s.space().degree();
  j["smoothness"] = s.space().smoothness();
  j["mesh_hash"] = s.space().mesh().hash_hex();
  j["coeffs"] = std::vector<double>(s.coeffs().data(), s.coeffs().data() + s.coeffs().size());
  return j.dump();
}

BForm bform_from_json(std::string_view text, MeshPtr mesh) {
  try {
    const auto j = nlohmann::json::parse(text);
    const int degree = j.at("degree").get<int>();
    const int smoothness = j.at("smoothness").get<int>();
    const std::string hash = j.at("mesh_hash").get<std::string>();
    if (hash != mesh->hash_hex())
      throw Error(ErrorCode::kMeshMismatch, "spline was built on mesh " + hash + ", not " + mesh->hash_hex());
    const auto coeffs = j.at("coeffs").get<std::vector<double>>();
    auto space = std::make_shared<const SplineSpace>(std::move(mesh), degree, smoothness, true);
    return BForm(std::move(space), Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed spline JSON: ") + e.what());
  }
}

}  // namespace splineot
