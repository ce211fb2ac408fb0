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

#include "splineot/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "splineot/error.hpp"

namespace splineot {

namespace {

double multinomial(int n, int a, int b, int c) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  for (int i = 2; i <= a; ++i) r /= i;
  for (int i = 2; i <= b; ++i) r /= i;
  for (int i = 2; i <= c; ++i) r /= i;
  return r;
}

int local_position(const std::array<int, 3>& tri, int v) {
  for (int i = 0; i < 3; ++i)
    if (tri[i] == v) return i;
  return -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Density

Density::Density(Fn fn, double lower, double upper, std::string descriptor)
    : fn_(std::move(fn)), lower_(lower), upper_(upper), descriptor_(std::move(descriptor)) {
  if (!fn_) throw Error(ErrorCode::kInvalidArgument, "density function is empty");
  if (!(lower_ >= 0.0) || !(upper_ >= lower_) || !std::isfinite(upper_))
    throw Error(ErrorCode::kDensityRange, "density bounds must satisfy 0 <= lower <= upper < inf");
}

Density Density::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorCode::kDensityRange, "constant density must be positive and finite");
  char buf[64];
  std::snprintf(buf, sizeof buf, "const:%.17g", value);
  return Density([value](Point2) { return value; }, value, value, buf);
}

Density Density::scaled(double factor) const {
  auto fn = fn_;
  return Density([fn, factor](Point2 p) { return factor * fn(p); }, lower_ * factor, upper_ * factor, descriptor_);
}

Density Density::shifted(Point2 shift) const {
  auto fn = fn_;
  return Density([fn, shift](Point2 p) { return fn(p - shift); }, lower_, upper_, descriptor_);
}

// ---------------------------------------------------------------------------
// PointOperators

PointOperators::PointOperators(const SplineSpace& space, std::vector<Point2> points, std::vector<Location> locations)
    : m_(space.block_size()), n_(space.dimension()), points_(std::move(points)), locations_(std::move(locations)) {
  rows_.resize(points_.size() * kOpCount * m_);
  static constexpr int kOrders[kOpCount][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (int op = 0; op < kOpCount; ++op) {
      std::span<double> out(rows_.data() + (i * kOpCount + op) * m_, m_);
      local_derivative_row(space, locations_[i].triangle, locations_[i].bary, kOrders[op][0], kOrders[op][1], out);
    }
}

PointOperators PointOperators::from_domain_points(const SplineSpace& space, const DomainPointSet& pts,
                                                  const std::vector<int>& subset) {
  std::vector<Point2> points;
  std::vector<Location> locs;
  points.reserve(subset.size());
  locs.reserve(subset.size());
  for (int idx : subset) {
    const auto& dp = pts.points[idx];
    points.push_back(dp.point);
    locs.push_back({dp.triangle, dp.bary});
  }
  return PointOperators(space, std::move(points), std::move(locs));
}

PointOperators PointOperators::from_points(const SplineSpace& space, const std::vector<Point2>& points) {
  std::vector<Location> locs;
  locs.reserve(points.size());
  for (Point2 p : points) {
    auto loc = space.mesh().locate(p, 1e-9);
    if (!loc) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "point (%.17g, %.17g) is outside the mesh", p.x, p.y);
      throw Error(ErrorCode::kOutOfDomain, buf);
    }
    locs.push_back(*loc);
  }
  return PointOperators(space, points, std::move(locs));
}

double PointOperators::apply(int i, Op op, const Eigen::VectorXd& coeffs) const {
  const double* r = row(i, op);
  const double* c = coeffs.data() + static_cast<std::ptrdiff_t>(locations_[i].triangle) * m_;
  double s = 0.0;
  for (int l = 0; l < m_; ++l) s += r[l] * c[l];
  return s;
}

HessianInfo PointOperators::hessian(int i, const Eigen::VectorXd& coeffs) const {
  HessianInfo h;
  h.value = apply(i, kValue, coeffs);
  h.grad = {apply(i, kDx, coeffs), apply(i, kDy, coeffs)};
  h.hxx = apply(i, kDxx, coeffs);
  h.hxy = apply(i, kDxy, coeffs);
  h.hyy = apply(i, kDyy, coeffs);
  h.det = h.hxx * h.hyy - h.hxy * h.hxy;
  h.lap = h.hxx + h.hyy;
  return h;
}

SparseMatrix PointOperators::matrix(const std::vector<std::array<double, kOpCount>>& weights) const {
  if (static_cast<int>(weights.size()) != size())
    throw Error(ErrorCode::kInvalidArgument, "one weight set per point is required");
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(size()) * m_);
  for (int i = 0; i < size(); ++i) {
    const int base = locations_[i].triangle * m_;
    for (int l = 0; l < m_; ++l) {
      double v = 0.0;
      for (int op = 0; op < kOpCount; ++op)
        if (weights[i][op] != 0.0) v += weights[i][op] * row(i, static_cast<Op>(op))[l];
      if (v != 0.0) trip.emplace_back(i, base + l, v);
    }
  }
  SparseMatrix M(size(), n_);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SparseMatrix PointOperators::matrix(Op op) const {
  std::vector<std::array<double, kOpCount>> w(size(), std::array<double, kOpCount>{});
  for (auto& x : w) x[op] = 1.0;
  return matrix(w);
}

SparseMatrix PointOperators::laplacian() const {
  std::vector<std::array<double, kOpCount>> w(size(), std::array<double, kOpCount>{});
  for (auto& x : w) x[kDxx] = x[kDyy] = 1.0;
  return matrix(w);
}

// ---------------------------------------------------------------------------
// Smoothness conditions

SparseMatrix smoothness_matrix(const SplineSpace& space) {
  const Triangulation& mesh = space.mesh();
  const int D = space.degree();
  const int r = space.smoothness();
  const int m = space.block_size();
  std::vector<Eigen::Triplet<double>> trip;
  int row = 0;
  for (int e : mesh.interior_edges()) {
    const MeshEdge& edge = mesh.edges()[e];
    const int t1 = edge.left, t2 = edge.right;
    const auto& tri1 = mesh.triangles()[t1];
    const auto& tri2 = mesh.triangles()[t2];
    const int a = edge.v[0], b = edge.v[1];
    const int la1 = local_position(tri1, a), lb1 = local_position(tri1, b), lp1 = 3 - la1 - lb1;
    const int la2 = local_position(tri2, a), lb2 = local_position(tri2, b), lq2 = 3 - la2 - lb2;
    const int q = tri2[lq2];
    const Barycentric lam = mesh.barycentric(t1, mesh.vertices()[q]);
    const double lp = lam[lp1], la = lam[la1], lb = lam[lb1];

    for (int n = 0; n <= r; ++n) {
      for (int ia = D - n; ia >= 0; --ia) {
        const int ib = D - n - ia;
        std::array<int, 3> e2{};
        e2[lq2] = n;
        e2[la2] = ia;
        e2[lb2] = ib;
        trip.emplace_back(row, t2 * m + lattice_index(D, e2[0], e2[1]), 1.0);
        for (int np = n; np >= 0; --np)
          for (int na = n - np; na >= 0; --na) {
            const int nb = n - np - na;
            const double w = multinomial(n, np, na, nb) * std::pow(lp, np) * std::pow(la, na) * std::pow(lb, nb);
            if (w == 0.0) continue;
            std::array<int, 3> e1{};
            e1[lp1] = np;
            e1[la1] = ia + na;
            e1[lb1] = ib + nb;
            trip.emplace_back(row, t1 * m + lattice_index(D, e1[0], e1[1]), -w);
          }
        ++row;
      }
    }
  }
  SparseMatrix H(row, space.dimension());
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

// ---------------------------------------------------------------------------
// Collocation rows

LaplaceRows assemble_laplace(const SplineSpace& space, const DomainPointSet& pts) {
  const auto ops = PointOperators::from_domain_points(space, pts, pts.interior);
  return {ops.laplacian(), pts.interior};
}

RowBlock assemble_dirichlet(const SplineSpace& space, const std::vector<Point2>& points,
                            const std::function<double(Point2)>& h) {
  const auto ops = PointOperators::from_points(space, points);
  Eigen::VectorXd rhs(ops.size());
  for (int i = 0; i < ops.size(); ++i) {
    rhs[i] = h(points[i]);
    if (!std::isfinite(rhs[i])) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "boundary data is not finite at (%.17g, %.17g)", points[i].x, points[i].y);
      throw Error(ErrorCode::kNonFinite, buf);
    }
  }
  return {ops.matrix(PointOperators::kValue), std::move(rhs)};
}

Eigen::VectorXd neumann_rhs(const std::vector<NeumannRecord>& records) {
  Eigen::VectorXd rhs(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) rhs[i] = dot(records[i].target, records[i].normal);
  return rhs;
}

RowBlock assemble_neumann(const SplineSpace& space, const std::vector<NeumannRecord>& records) {
  std::vector<Point2> points;
  std::vector<std::array<double, PointOperators::kOpCount>> w;
  for (const auto& rec : records) {
    const double len = norm(rec.normal);
    if (!(len > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero-length boundary normal");
    points.push_back(rec.point);
    std::array<double, PointOperators::kOpCount> x{};
    x[PointOperators::kDx] = rec.normal.x;
    x[PointOperators::kDy] = rec.normal.y;
    w.push_back(x);
  }
  const auto ops = PointOperators::from_points(space, points);
  return {ops.matrix(w), neumann_rhs(records)};
}

Eigen::VectorXd mean_value_row(const SplineSpace& space) {
  const int m = space.block_size();
  const int D = space.degree();
  const double denom = (D + 1.0) * (D + 2.0) / 2.0;
  Eigen::VectorXd row(space.dimension());
  for (int t = 0; t < space.mesh().triangle_count(); ++t)
    row.segment(static_cast<Eigen::Index>(t) * m, m).setConstant(space.mesh().triangle_area(t) / denom);
  return row;
}

// ---------------------------------------------------------------------------
// Monge-Ampere right-hand side

double mae_rhs_value(double lap, double det, double ratio, double floor_sq, bool* clamped) {
  double rad = lap * lap + 4.0 * (ratio - std::max(0.0, det));
  const bool clamp = !(rad >= floor_sq);
  if (clamp) rad = floor_sq;
  if (clamped) *clamped = clamp;
  return std::sqrt(rad);
}

Eigen::VectorXd density_ratio(const PointOperators& ops, const Eigen::VectorXd& u_ref, const DensityPair& d) {
  Eigen::VectorXd ratio(ops.size());
  const double g0 = d.g.lower(), g1 = d.g.upper();
  for (int i = 0; i < ops.size(); ++i) {
    const Point2 x = ops.point(i);
    const Point2 y{ops.apply(i, PointOperators::kDx, u_ref), ops.apply(i, PointOperators::kDy, u_ref)};
    const double gv = d.g(y);
    if (!(gv >= g0 * (1.0 - 1e-9)) || !(gv <= g1 * (1.0 + 1e-9)) || !(gv > 0.0)) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "target density %.17g at (%.17g, %.17g) is outside [%.17g, %.17g]", gv, y.x, y.y,
                    g0, g1);
      throw Error(ErrorCode::kDensityRange, buf);
    }
    ratio[i] = d.f(x) / gv;
  }
  return ratio;
}

MaeRhs mae_rhs(const PointOperators& ops, const Eigen::VectorXd& u_k, const Eigen::VectorXd& ratio,
               const DensityPair& d) {
  const double floor_sq = 4.0 * d.f.lower() / d.g.upper();
  MaeRhs out;
  const int n = ops.size();
  out.rhs.resize(n);
  out.lap.resize(n);
  out.det.resize(n);
  out.ratio = ratio;
  for (int i = 0; i < n; ++i) {
    const double hxx = ops.apply(i, PointOperators::kDxx, u_k);
    const double hxy = ops.apply(i, PointOperators::kDxy, u_k);
    const double hyy = ops.apply(i, PointOperators::kDyy, u_k);
    out.lap[i] = hxx + hyy;
    out.det[i] = hxx * hyy - hxy * hxy;
    bool clamped = false;
    out.rhs[i] = mae_rhs_value(out.lap[i], out.det[i], ratio[i], floor_sq, &clamped);
    out.clamp_events += clamped;
  }
  return out;
}

MaeRhs mae_rhs(const BForm& u_k, const BForm& u_ref, const DensityPair& d, const PointOperators& ops) {
  if (u_k.space_ptr() != u_ref.space_ptr() && u_k.coeffs().size() != u_ref.coeffs().size())
    throw Error(ErrorCode::kInvalidArgument, "iterate and reference must share a spline space");
  return mae_rhs(ops, u_k.coeffs(), density_ratio(ops, u_ref.coeffs(), d), d);
}

Residual mae_residual(const BForm& u, const DensityPair& d, const std::vector<Point2>& grid) {
  Residual res;
  res.field.resize(grid.size());
  double sum = 0.0;
  const Triangulation& mesh = u.space().mesh();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto loc = mesh.locate(grid[i], 1e-9);
    if (!loc) throw Error(ErrorCode::kOutOfDomain, "residual grid point outside the mesh");
    const HessianInfo h = hessian_at(u, *loc);
    const double e = h.det - d.f(grid[i]) / d.g(h.grad);
    res.field[i] = e;
    sum += e * e;
    res.sup = std::max(res.sup, std::abs(e));
  }
  res.rmse = grid.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(grid.size()));
  return res;
}

std::vector<Point2> mesh_grid(const Triangulation& mesh, int n, bool centred) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "grid needs at least 2 points per side");
  const BoundingBox& bb = mesh.bbox();
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double s = centred ? (i + 0.5) / n : static_cast<double>(i) / (n - 1);
      const double t = centred ? (j + 0.5) / n : static_cast<double>(j) / (n - 1);
      const Point2 p{bb.lo.x + s * bb.width(), bb.lo.y + t * bb.height()};
      if (mesh.locate(p, 1e-12)) out.push_back(p);
    }
  return out;
}

std::string matrix_market(const SparseMatrix& m) {
  std::ostringstream os;
  os.precision(17);
  os << "%%MatrixMarket matrix coordinate real general\n" << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  return os.str();
}

}  // namespace splineot
