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

#include "splineot/mae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "splineot/error.hpp"

namespace splineot {

int resolve_colloc_degree(const SplineSpace& space, const CollocationOptions& opt) {
  if (opt.colloc_degree < 0) throw Error(ErrorCode::kInvalidArgument, "collocation degree must be positive");
  return opt.colloc_degree > 0 ? opt.colloc_degree : std::max(1, space.degree() - 2);
}

int resolve_boundary_degree(const SplineSpace& space, const CollocationOptions& opt) {
  if (opt.boundary_degree < 0) throw Error(ErrorCode::kInvalidArgument, "boundary degree must be positive");
  return opt.boundary_degree > 0 ? opt.boundary_degree : space.degree();
}

namespace {

std::vector<Point2> boundary_domain_points(const Triangulation& mesh, int degree) {
  const DomainPointSet set = domain_points(mesh, degree);
  std::vector<Point2> out;
  out.reserve(set.boundary.size());
  for (int i : set.boundary) out.push_back(set.points[i].point);
  return out;
}

std::vector<int> collocated(const DomainPointSet& pts, bool with_boundary) {
  if (!with_boundary) return pts.interior;
  std::vector<int> all(pts.points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

// Below C^2 the Laplacian jumps across edges, so a point shared by several
// triangles is collocated in each of them.
PointOperators per_triangle_operators(const SplineSpace& space, const DomainPointSet& pts, bool with_boundary) {
  const Triangulation& mesh = space.mesh();
  const int n = pts.degree_prime;
  std::vector<Point2> points;
  std::vector<Location> locs;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    for (const auto& l : lattice(n)) {
      const Barycentric b{static_cast<double>(l.i) / n, static_cast<double>(l.j) / n, static_cast<double>(l.k) / n};
      const Point2 p = mesh.point_at(t, b);
      if (!with_boundary) {
        // boundary lattice points lie on a boundary edge of this triangle
        const auto& te = mesh.triangle_edges(t);
        bool on_boundary = false;
        for (int v = 0; v < 3; ++v)
          if (b[v] == 0.0 && mesh.edges()[te[v]].is_boundary()) on_boundary = true;
        if (!on_boundary)
          for (int v = 0; v < 3; ++v)
            if (b[v] == 1.0)
              for (int e : mesh.boundary_edges())
                if (mesh.edges()[e].v[0] == mesh.triangles()[t][v] || mesh.edges()[e].v[1] == mesh.triangles()[t][v])
                  on_boundary = true;
        if (on_boundary) continue;
      }
      points.push_back(p);
      locs.push_back({t, b});
    }
  return PointOperators(space, std::move(points), std::move(locs));
}

}  // namespace

Collocation::Collocation(SpacePtr space, CollocationOptions opt)
    : space_(std::move(space)),
      pts_(domain_points(space_->mesh(), resolve_colloc_degree(*space_, opt))),
      interior_(space_->smoothness() >= 2
                    ? PointOperators::from_domain_points(*space_, pts_, collocated(pts_, opt.laplacian_on_boundary))
                    : per_triangle_operators(*space_, pts_, opt.laplacian_on_boundary)),
      K_(interior_.laplacian()),
      H_(smoothness_matrix(*space_)),
      boundary_degree_(resolve_boundary_degree(*space_, opt)),
      boundary_points_(boundary_domain_points(space_->mesh(), boundary_degree_)) {
  if (pts_.interior.empty()) throw Error(ErrorCode::kInvalidArgument, "mesh has no interior collocation points");
}

PoissonResult poisson_solve(SpacePtr space, const std::function<double(Point2)>& f,
                            const std::function<double(Point2)>& h, const CollocationOptions& copt,
                            const LsqOptions& lopt) {
  const Collocation col(space, copt);
  RowBlock bc = assemble_dirichlet(*space, col.boundary_points(), h);
  const EqualityLsqSolver solver(col.K(), bc.B, col.H(), std::nullopt, lopt);
  const PointOperators& ops = col.interior();
  Eigen::VectorXd b(ops.size());
  for (int i = 0; i < ops.size(); ++i) {
    b[i] = -f(ops.point(i));
    if (!std::isfinite(b[i])) throw Error(ErrorCode::kNonFinite, "source term is not finite at a collocation point");
  }
  SolveReport rep = solver.solve(b, bc.rhs);
  BForm u(space, rep.coeffs);
  return {std::move(u), std::move(rep)};
}

// ---------------------------------------------------------------------------

StageOutcome run_stage(const StageContext& ctx, const Eigen::VectorXd& u_start, int iters, double tol,
                       double blowup_cap, bool record_fields, IterationTrace& trace) {
  const PointOperators& ops = ctx.colloc->interior();
  const DensityPair& d = *ctx.densities;
  const int n = ops.size();
  const Eigen::VectorXd ratio = density_ratio(ops, u_start, d);

  auto values = [&](const Eigen::VectorXd& c) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = ops.apply(i, PointOperators::kValue, c);
    return v;
  };

  StageOutcome out;
  out.u = u_start;
  Eigen::VectorXd prev_vals = values(u_start);
  Eigen::VectorXd partial = Eigen::VectorXd::Zero(n);

  for (int step = 0; step < iters; ++step) {
    Eigen::VectorXd rhs;
    int clamps = 0;
    if (step == 0) {
      rhs = 2.0 * ratio.cwiseSqrt();
    } else {
      MaeRhs m = mae_rhs(ops, out.u, ratio, d);
      partial += ratio - m.det;
      rhs = std::move(m.rhs);
      clamps = m.clamp_events;
    }
    const SolveReport rep = ctx.solver->solve(rhs, ctx.boundary_rhs, 0.0);
    out.u = rep.coeffs;
    ++out.solves;

    const Eigen::VectorXd vals = values(out.u);
    IterationRecord rec;
    rec.k = ctx.first_k + out.solves;
    rec.stage = ctx.stage;
    rec.step = step;
    rec.delta_inf = (vals - prev_vals).cwiseAbs().maxCoeff();
    rec.clamp_events = clamps;
    rec.nonneg_min = step == 0 ? 0.0 : partial.minCoeff();
    Eigen::VectorXd lap(n), hxx(n), hxy(n), hyy(n);
    double eig = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      hxx[i] = ops.apply(i, PointOperators::kDxx, out.u);
      hxy[i] = ops.apply(i, PointOperators::kDxy, out.u);
      hyy[i] = ops.apply(i, PointOperators::kDyy, out.u);
      lap[i] = hxx[i] + hyy[i];
      eig = std::min(eig, min_eigenvalue(hxx[i], hxy[i], hyy[i]));
    }
    rec.lap_inf = lap.cwiseAbs().maxCoeff();
    rec.lap_min = lap.minCoeff();
    rec.hess_min_eig = eig;
    if (record_fields) {
      rec.lap = lap;
      rec.hxx = hxx;
      rec.hxy = hxy;
      rec.hyy = hyy;
      rec.ratio = ratio;
      rec.partial_sum = partial;
    }
    out.last_delta = rec.delta_inf;
    const double lap_inf = rec.lap_inf;
    trace.append(std::move(rec));
    prev_vals = vals;

    if (!(lap_inf <= blowup_cap)) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "iteration %d: |Lap u|_inf = %.6g exceeds the blow-up cap %.6g; restart with a different initial "
                    "guess",
                    ctx.first_k + out.solves, lap_inf, blowup_cap);
      trace.stop_reason = "blowup";
      throw Error(ErrorCode::kBlowUp, buf);
    }
    if (out.last_delta <= tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

namespace {

Eigen::VectorXd initial_coeffs(const SpacePtr& space, const SubharmonicConfig& cfg) {
  switch (cfg.initial) {
    case InitialGuess::kZero: return Eigen::VectorXd::Zero(space->dimension());
    case InitialGuess::kQuadratic:
      return interpolate(space, [](Point2 p) { return 0.5 * dot(p, p); }).coeffs();
    case InitialGuess::kUser:
      if (!cfg.user_guess || cfg.user_guess->size() != space->dimension())
        throw Error(ErrorCode::kInvalidArgument, "user initial guess missing or of the wrong length");
      return *cfg.user_guess;
  }
  return Eigen::VectorXd::Zero(space->dimension());
}

void validate(const SubharmonicConfig& cfg) {
  if (cfg.inner_iters < 1 || cfg.stages < 1) throw Error(ErrorCode::kInvalidArgument, "iteration counts must be >= 1");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "stopping tolerance must be positive");
}

}  // namespace

void prepare_trace_bounds(const PointOperators& ops, const DensityPair& d, IterationTrace& trace) {
  double sup = 0.0;
  for (int i = 0; i < ops.size(); ++i) sup = std::max(sup, std::sqrt(d.f(ops.point(i)) / d.g.lower()));
  trace.f_over_gmin_sqrt_sup = sup;
  trace.lap_floor = 2.0 * std::sqrt(d.f.lower() / d.g.upper());
}

double default_blowup_cap(const IterationTrace& trace) { return 1e3 * (1.0 + 2.0 * trace.f_over_gmin_sqrt_sup); }

SubharmonicResult subharmonic_solve(SpacePtr space, const DensityPair& d, const std::function<double(Point2)>& h,
                                    const SubharmonicConfig& cfg) {
  validate(cfg);
  if (!(d.g.lower() > 0.0)) throw Error(ErrorCode::kDensityRange, "target density lower bound must be positive");
  const Collocation col(space, cfg.colloc);
  const RowBlock bc = assemble_dirichlet(*space, col.boundary_points(), h);
  const EqualityLsqSolver solver(col.K(), bc.B, col.H(), std::nullopt, cfg.lsq);

  IterationTrace trace;
  prepare_trace_bounds(col.interior(), d, trace);
  const double cap = cfg.blowup_cap > 0.0 ? cfg.blowup_cap : default_blowup_cap(trace);

  Eigen::VectorXd u = initial_coeffs(space, cfg);
  StageContext ctx{&col, &solver, &d, bc.rhs, 0, 0};
  for (int j = 0; j < cfg.stages; ++j) {
    ctx.stage = j;
    StageOutcome o = run_stage(ctx, u, cfg.inner_iters, cfg.tol, cap, cfg.record_fields, trace);
    u = std::move(o.u);
    ctx.first_k += o.solves;
    if (o.converged) {
      trace.converged = true;
      trace.stop_reason = "tolerance";
      break;
    }
  }
  if (!trace.converged) trace.stop_reason = "iteration budget";
  return {BForm(space, std::move(u)), std::move(trace)};
}

std::string IterationTrace::to_csv() const {
  std::string out = "k,lap_inf,delta_inf,clamp_events,nonneg_min,hess_min_eig\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%.17g,%.17g\n", r.k, r.lap_inf, r.delta_inf, r.clamp_events,
                  r.nonneg_min, r.hess_min_eig);
    out += buf;
  }
  return out;
}

DiagnosticsReport iteration_diagnostics(const IterationTrace& trace, const DensityPair& d) {
  (void)d;
  DiagnosticsReport rep;
  rep.nonneg_min = std::numeric_limits<double>::infinity();
  rep.lap_min = std::numeric_limits<double>::infinity();
  rep.growth_margin = std::numeric_limits<double>::infinity();
  if (trace.records.empty()) {
    rep.flags.push_back("empty trace");
    return rep;
  }
  char buf[200];
  for (const auto& r : trace.records) {
    const double s = r.partial_sum.size() ? r.partial_sum.minCoeff() : r.nonneg_min;
    rep.nonneg_min = std::min(rep.nonneg_min, s);
    if (s < -1e-8 && r.clamp_events == 0) {
      rep.nonneg_ok = false;
      std::snprintf(buf, sizeof buf, "k=%d: stage partial sum %.3e < -1e-8", r.k, s);
      rep.flags.push_back(buf);
    } else if (s < -1e-8) {
      rep.nonneg_ok = false;
      std::snprintf(buf, sizeof buf, "k=%d: stage partial sum %.3e < -1e-8 (%d clamp events)", r.k, s,
                    r.clamp_events);
      rep.flags.push_back(buf);
    }
    const double lm = r.lap.size() ? r.lap.minCoeff() : r.lap_min;
    rep.lap_min = std::min(rep.lap_min, lm);
    if (lm < trace.lap_floor - 1e-8) {
      rep.lower_bound_ok = false;
      std::snprintf(buf, sizeof buf, "k=%d: min Lap u = %.6g below 2 sqrt(f0/g_max) = %.6g", r.k, lm, trace.lap_floor);
      rep.flags.push_back(buf);
    }
    const double bound = (r.k + 1) * 2.0 * trace.f_over_gmin_sqrt_sup + 1e-8;
    rep.growth_margin = std::min(rep.growth_margin, bound - r.lap_inf);
    if (r.lap_inf > bound) {
      rep.growth_ok = false;
      std::snprintf(buf, sizeof buf, "k=%d: |Lap u|_inf = %.6g exceeds growth bound %.6g", r.k, r.lap_inf, bound);
      rep.flags.push_back(buf);
    }
  }
  // Contraction factor with the final iterate standing in for the solution.
  const IterationRecord& last = trace.records.back();
  if (last.hxx.size()) {
    for (const auto& r : trace.records) {
      if (r.hxx.size() != last.hxx.size() || r.ratio.size() != last.hxx.size()) continue;
      double worst = 0.0;
      for (Eigen::Index i = 0; i < r.hxx.size(); ++i) {
        const double a = std::hypot(last.hxx[i] - last.hyy[i], 2.0 * last.hxy[i]);
        const double b = std::hypot(r.hxx[i] - r.hyy[i], 2.0 * r.hxy[i]);
        const double q = 4.0 * r.ratio[i];
        const double den = std::sqrt(a * a + q) + std::sqrt(b * b + q);
        if (den > 0.0) worst = std::max(worst, (a + b) / den);
      }
      rep.rho.push_back(worst);
    }
  }
  return rep;
}

}  // namespace splineot
