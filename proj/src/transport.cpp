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

#include "splineot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "json.hpp"
#include "splineot/error.hpp"
#include "splineot/quadrature.hpp"

namespace splineot {

Pretranslation pretranslate(const StarDomain& V, const StarDomain& W) {
  Pretranslation p;
  const Point2 d = W.center() - V.center();
  if (d.x == 0.0 && d.y == 0.0) return p;
  p.moved_source = V.area() <= W.area();
  p.shift = p.moved_source ? d : -d;
  p.linear_cost = dot(d, d) * (p.moved_source ? V.area() : W.area());
  return p;
}

std::vector<Point2> center_match_targets(const StarDomain& W, const std::vector<std::pair<Point2, Point2>>& v_and_grad) {
  std::vector<Point2> out;
  out.reserve(v_and_grad.size());
  const Point2 c = W.center();
  for (const auto& [v, grad] : v_and_grad) {
    Point2 dir = grad - c;
    if (norm(dir) <= 1e-10) dir = v - c;
    out.push_back(ray_exit_point(W, std::atan2(dir.y, dir.x)));
  }
  return out;
}

double integrate_density(const Density& f, const Triangulation& mesh, int n) {
  return integrate_mesh(mesh, [&](int, const Barycentric&, Point2 p) { return f(p); }, triangle_rule(n));
}

double constant_target_density(const Density& f, const Triangulation& V, const StarDomain& W) {
  if (!(W.area() > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target domain has zero area");
  return integrate_density(f, V) / W.area();
}

double transport_cost(const BForm& u, const Density& f, int n) {
  const SplineSpace& space = u.space();
  if (n <= 0) n = space.degree() + 2;
  return integrate_mesh(
      space.mesh(),
      [&](int t, const Barycentric& b, Point2 p) {
        const Location loc{t, b};
        const Point2 g{eval_bform_at(u, loc, 1, 0), eval_bform_at(u, loc, 0, 1)};
        const Point2 d = p - g;
        return dot(d, d) * f(p);
      },
      triangle_rule(n));
}

namespace {

Eigen::VectorXd values_at(const PointOperators& ops, const Eigen::VectorXd& c) {
  Eigen::VectorXd v(ops.size());
  for (int i = 0; i < ops.size(); ++i) v[i] = ops.apply(i, PointOperators::kValue, c);
  return v;
}

void check_problem(const TransportProblem& p) {
  if (!p.mesh) throw Error(ErrorCode::kInvalidArgument, "transport problem needs a source mesh");
  if (!p.densities.f || !p.densities.g) throw Error(ErrorCode::kInvalidArgument, "transport problem needs f and g");
  if (!(p.densities.g.lower() > 0.0))
    throw Error(ErrorCode::kDensityRange, "target density lower bound must be positive");
}

}  // namespace

TransportSolution solve_transport(const TransportProblem& problem, const TransportConfig& cfg) {
  check_problem(problem);
  if (cfg.inner_iters < 1 || cfg.max_outer < 1)
    throw Error(ErrorCode::kInvalidArgument, "iteration counts must be >= 1");
  if (distance(problem.V.center(), problem.W.center()) > 1e-12 * (1.0 + problem.W.diameter()))
    throw Error(ErrorCode::kInvalidArgument, "source and target centers differ; pretranslate first");

  auto space = std::make_shared<const SplineSpace>(problem.mesh, cfg.degree, cfg.smoothness, cfg.force);
  const Collocation col(space, cfg.colloc);
  const auto records = boundary_collocation(problem.V, *problem.mesh, col.boundary_degree());
  std::vector<NeumannRecord> neumann;
  neumann.reserve(records.size());
  for (const auto& r : records) neumann.push_back({r.point, r.normal, r.point});
  const RowBlock rows = assemble_neumann(*space, neumann);
  const PointOperators bops = PointOperators::from_points(*space, [&] {
    std::vector<Point2> pts;
    for (const auto& r : records) pts.push_back(r.point);
    return pts;
  }());
  const EqualityLsqSolver solver(col.K(), rows.B, col.H(), mean_value_row(*space), cfg.lsq);

  TransportSolution sol{.u = BForm::zero(space)};
  prepare_trace_bounds(col.interior(), problem.densities, sol.trace);
  const double cap = cfg.blowup_cap > 0.0 ? cfg.blowup_cap : default_blowup_cap(sol.trace);

  Eigen::VectorXd u = interpolate(space, [](Point2 p) { return 0.5 * dot(p, p); }).coeffs();
  Eigen::VectorXd vals = values_at(col.interior(), u);
  StageContext ctx{&col, &solver, &problem.densities, rows.rhs, 0, 0};
  std::vector<std::pair<Point2, Point2>> vg(records.size());
  for (int k = 0; k < cfg.max_outer; ++k) {
    for (int i = 0; i < bops.size(); ++i)
      vg[i] = {bops.point(i), {bops.apply(i, PointOperators::kDx, u), bops.apply(i, PointOperators::kDy, u)}};
    const auto targets = center_match_targets(problem.W, vg);
    for (std::size_t i = 0; i < neumann.size(); ++i) neumann[i].target = targets[i];
    ctx.boundary_rhs = neumann_rhs(neumann);
    ctx.stage = k;
    StageOutcome o = run_stage(ctx, u, cfg.inner_iters, cfg.inner_tol, cap, cfg.record_fields, sol.trace);
    ctx.first_k += o.solves;
    u = std::move(o.u);
    const Eigen::VectorXd nv = values_at(col.interior(), u);
    sol.last_outer_delta = (nv - vals).cwiseAbs().maxCoeff();
    vals = nv;
    sol.outer_iterations = k + 1;
    if (sol.last_outer_delta <= cfg.outer_tol * (1.0 + vals.cwiseAbs().maxCoeff())) {
      sol.converged = true;
      break;
    }
  }
  sol.trace.converged = sol.converged;
  sol.trace.stop_reason = sol.converged ? "tolerance" : "outer iteration budget";
  sol.u = BForm(space, std::move(u));
  return sol;
}

double map_error_sup(const BForm& u, const std::function<Point2(Point2)>& map, int n) {
  double worst = 0.0;
  const Triangulation& mesh = u.space().mesh();
  for (Point2 p : mesh_grid(mesh, n)) {
    const Location loc = *mesh.locate(p);
    const Point2 g{eval_bform_at(u, loc, 1, 0), eval_bform_at(u, loc, 0, 1)};
    worst = std::max(worst, distance(g, map(p)));
  }
  return worst;
}

TransportCertificates transport_certificates(const BForm& u, const TransportProblem& problem,
                                             const TransportConfig& cfg) {
  TransportCertificates c;
  const Triangulation& mesh = u.space().mesh();
  const StarDomain& W = problem.W;

  const Residual res = mae_residual(u, problem.densities, mesh_grid(mesh, cfg.residual_grid));
  c.residual_rmse = res.rmse;
  c.residual_sup = res.sup;
  c.cost = transport_cost(u, problem.densities.f);
  c.mean_value = integral_bform(u);

  const auto records =
      boundary_collocation(problem.V, mesh, resolve_boundary_degree(u.space(), cfg.colloc));
  for (const auto& r : records) {
    const Location loc = *mesh.locate(r.point, 1e-9);
    const Point2 g{eval_bform_at(u, loc, 1, 0), eval_bform_at(u, loc, 0, 1)};
    c.boundary_match_error = std::max(c.boundary_match_error, W.boundary_distance(g));
  }

  c.convexity_min_eig = std::numeric_limits<double>::infinity();
  for (Point2 p : mesh_grid(mesh, cfg.convexity_grid))
    c.convexity_min_eig = std::min(c.convexity_min_eig, hessian_det_lap(u, p).min_eigenvalue());

  const int nc = cfg.coverage_cells;
  const BoundingBox& bb = W.bbox();
  std::vector<char> inside(nc * nc), hit(nc * nc, 0);
  int cells = 0;
  for (int j = 0; j < nc; ++j)
    for (int i = 0; i < nc; ++i) {
      const Point2 ctr{bb.lo.x + (i + 0.5) * bb.width() / nc, bb.lo.y + (j + 0.5) * bb.height() / nc};
      inside[j * nc + i] = W.contains(ctr);
      cells += inside[j * nc + i];
    }
  const auto samples = mesh_grid(mesh, cfg.coverage_samples);
  int outside = 0;
  const double dilation = 1e-2 * W.diameter();
  for (Point2 p : samples) {
    const Location loc = *mesh.locate(p);
    const Point2 g{eval_bform_at(u, loc, 1, 0), eval_bform_at(u, loc, 0, 1)};
    if (!W.contains(g) && W.boundary_distance(g) > dilation) ++outside;
    const int i = static_cast<int>(std::floor((g.x - bb.lo.x) / bb.width() * nc));
    const int j = static_cast<int>(std::floor((g.y - bb.lo.y) / bb.height() * nc));
    if (i >= 0 && i < nc && j >= 0 && j < nc) hit[j * nc + i] = 1;
  }
  int covered = 0;
  for (int k = 0; k < nc * nc; ++k) covered += inside[k] && hit[k];
  c.coverage = cells ? static_cast<double>(covered) / cells : 0.0;
  c.outside_fraction = samples.empty() ? 0.0 : static_cast<double>(outside) / samples.size();
  return c;
}

TransportSolution solve_transport_problem(const TransportProblem& problem, const TransportConfig& cfg) {
  check_problem(problem);
  TransportProblem balanced = problem;
  const double mf = integrate_density(problem.densities.f, *problem.mesh);
  const double mg =
      integrate_star_polygon(problem.W.boundary(), problem.W.center(), [&](Point2 y) { return problem.densities.g(y); });
  if (!(mf > 0.0) || !(mg > 0.0)) throw Error(ErrorCode::kDensityRange, "densities must have positive mass");
  double ratio = 1.0;
  if (std::abs(mf - mg) > 1e-14 * mf) {
    ratio = mf / mg;
    balanced.densities.g = problem.densities.g.scaled(ratio);
  }

  const Pretranslation pt = pretranslate(problem.V, problem.W);
  TransportSolution sol{.u = BForm::zero(std::make_shared<const SplineSpace>(problem.mesh, cfg.degree, cfg.smoothness,
                                                                        cfg.force))};
  if (pt.shift.x == 0.0 && pt.shift.y == 0.0) {
    sol = solve_transport(balanced, cfg);
  } else {
    const Point2 zv = pt.source_shift(), zw = pt.target_shift();
    TransportProblem moved = balanced;
    moved.mesh = std::make_shared<const Triangulation>(shapes::translate_mesh(*problem.mesh, zv));
    moved.V = problem.V.translated(zv);
    moved.W = problem.W.translated(zw);
    moved.densities.f = balanced.densities.f.shifted(zv);
    moved.densities.g = balanced.densities.g.shifted(zw);
    TransportSolution inner = solve_transport(moved, cfg);
    // The B-form is affine invariant: the same coefficients on the original
    // mesh give u'(x + zv). Subtract zw . x and restore the zero mean.
    auto space = sol.u.space_ptr();
    Eigen::VectorXd c = inner.u.coeffs() - interpolate(space, [zw](Point2 p) { return dot(zw, p); }).coeffs();
    BForm u(space, c);
    const double mean = integral_bform(u) / problem.mesh->total_area();
    u.coeffs().array() -= mean;
    inner.u = std::move(u);
    sol = std::move(inner);
  }
  sol.shift = pt;
  sol.mass_ratio = ratio;
  sol.certificates = transport_certificates(sol.u, balanced, cfg);
  return sol;
}

std::string solution_json(const TransportSolution& s) {
  nlohmann::json j;
  j["potential"] = nlohmann::json::parse(bform_to_json(s.u));
  const auto& c = s.certificates;
  j["diagnostics"] = {{"outer_iterations", s.outer_iterations},
                      {"converged", s.converged},
                      {"last_outer_delta", s.last_outer_delta},
                      {"mass_ratio", s.mass_ratio},
                      {"shift", {s.shift.shift.x, s.shift.shift.y}},
                      {"moved", s.shift.moved_source ? "source" : "target"},
                      {"linear_cost", s.shift.linear_cost},
                      {"residual_rmse", c.residual_rmse},
                      {"residual_sup", c.residual_sup},
                      {"cost", c.cost},
                      {"boundary_match_error", c.boundary_match_error},
                      {"convexity_min_eig", c.convexity_min_eig},
                      {"coverage", c.coverage},
                      {"outside_fraction", c.outside_fraction},
                      {"mean_value", c.mean_value}};
  return j.dump(2);
}

}  // namespace splineot
