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

#include "splineot/assembly.hpp"
#include "splineot/lsq.hpp"

namespace splineot {

struct CollocationOptions {
  int colloc_degree = 0;    // interior collocation degree; 0 selects max(1, D-2)
  int boundary_degree = 0;  // boundary sampling degree; 0 selects D
  // Also collocate the Laplacian at the boundary domain points of degree D'.
  // Needed with Neumann data, where nothing else fixes Lap u along the
  // boundary edges.
  bool laplacian_on_boundary = false;
};

int resolve_colloc_degree(const SplineSpace& space, const CollocationOptions& opt);
int resolve_boundary_degree(const SplineSpace& space, const CollocationOptions& opt);

/// Geometry-only pieces shared by every linear stage on one spline space:
/// interior collocation points with their derivative rows, the Laplacian rows
/// K, and the smoothness matrix H. For r < 2 shared points are collocated once
/// per containing triangle.
class Collocation {
 public:
  Collocation(SpacePtr space, CollocationOptions opt = {});

  const SpacePtr& space() const { return space_; }
  const DomainPointSet& points() const { return pts_; }
  const PointOperators& interior() const { return interior_; }
  const SparseMatrix& K() const { return K_; }
  const SparseMatrix& H() const { return H_; }
  int colloc_degree() const { return pts_.degree_prime; }
  int boundary_degree() const { return boundary_degree_; }
  // Boundary domain points of the boundary sampling degree.
  const std::vector<Point2>& boundary_points() const { return boundary_points_; }

 private:
  SpacePtr space_;
  DomainPointSet pts_;
  PointOperators interior_;
  SparseMatrix K_;
  SparseMatrix H_;
  int boundary_degree_;
  std::vector<Point2> boundary_points_;
};

struct PoissonResult {
  BForm u;
  SolveReport report;
};

/// -Lap u = f at interior collocation points (hard), u = h on the boundary
/// points (least squares), C^r enforced by the smoothness penalty.
PoissonResult poisson_solve(SpacePtr space, const std::function<double(Point2)>& f,
                            const std::function<double(Point2)>& h, const CollocationOptions& copt = {},
                            const LsqOptions& lopt = {});

enum class InitialGuess { kZero, kQuadratic, kUser };

struct SubharmonicConfig {
  int inner_iters = 20;   // linear solves per stage, the stage-start solve included
  int stages = 1;
  double tol = 1e-11;     // on sup |u_{k+1} - u_k| at interior collocation points
  double blowup_cap = 0;  // 0 selects 1e3 (1 + max 2 sqrt(f/g0))
  InitialGuess initial = InitialGuess::kQuadratic;
  std::optional<Eigen::VectorXd> user_guess;
  bool record_fields = true;  // keep per-point vectors for the diagnostics
  CollocationOptions colloc;
  LsqOptions lsq;
};

struct IterationRecord {
  int k = 0;      // number of linear solves so far
  int stage = 0;
  int step = 0;   // 0 for the stage-start solve
  double lap_inf = 0.0;
  double lap_min = 0.0;
  double delta_inf = 0.0;
  int clamp_events = 0;
  double nonneg_min = 0.0;  // min over points of the stage partial sum
  double hess_min_eig = 0.0;
  // Per interior collocation point, for u_k (the solved iterate):
  Eigen::VectorXd lap, hxx, hxy, hyy;
  // Ratio f/g(grad u_ref) frozen for the stage.
  Eigen::VectorXd ratio;
  Eigen::VectorXd partial_sum;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool converged = false;
  std::string stop_reason;
  double f_over_gmin_sqrt_sup = 0.0;  // sup sqrt(f/g0) at the collocation points
  double lap_floor = 0.0;             // 2 sqrt(f0/g_max)

  void append(IterationRecord rec) { records.push_back(std::move(rec)); }
  std::string to_csv() const;
};

struct SubharmonicResult {
  BForm u;
  IterationTrace trace;
};

/// Two-level subharmonic iteration with Dirichlet data h. Each stage starts
/// from Lap u = 2 sqrt(f/g(grad u^j)) and continues with
/// Lap u_{k+1} = sqrt((Lap u_k)^2 + 4 (f/g(grad u^j) - max(0, det D^2 u_k))).
SubharmonicResult subharmonic_solve(SpacePtr space, const DensityPair& d, const std::function<double(Point2)>& h,
                                    const SubharmonicConfig& cfg = {});

/// Runs the stage iteration on a prepared linear system. `boundary_rhs`
/// supplies the soft boundary targets for each solve, `ratio` the frozen
/// density ratio; used by both the Dirichlet and the transport drivers.
struct StageContext {
  const Collocation* colloc = nullptr;
  const EqualityLsqSolver* solver = nullptr;
  const DensityPair* densities = nullptr;
  Eigen::VectorXd boundary_rhs;
  int first_k = 0;
  int stage = 0;
};

struct StageOutcome {
  Eigen::VectorXd u;
  int solves = 0;
  bool converged = false;
  double last_delta = 0.0;
};

StageOutcome run_stage(const StageContext& ctx, const Eigen::VectorXd& u_start, int iters, double tol,
                       double blowup_cap, bool record_fields, IterationTrace& trace);

struct DiagnosticsReport {
  bool nonneg_ok = true;       // stage partial sums >= -1e-8
  bool lower_bound_ok = true;  // Lap u_{k+1} >= 2 sqrt(f0/g_max) - 1e-8
  bool growth_ok = true;       // |Lap u_k|_inf <= (k+1) 2 |sqrt(f/g_min)|_inf + 1e-8
  double nonneg_min = 0.0;
  double lap_min = 0.0;
  double growth_margin = 0.0;  // min over k of bound - |Lap u_k|
  std::vector<double> rho;     // contraction factor per iterate, final iterate as reference
  std::vector<std::string> flags;

  bool ok() const { return nonneg_ok && lower_bound_ok && growth_ok; }
};

// Fills the growth and floor constants of the trace from the densities.
void prepare_trace_bounds(const PointOperators& ops, const DensityPair& d, IterationTrace& trace);
double default_blowup_cap(const IterationTrace& trace);

DiagnosticsReport iteration_diagnostics(const IterationTrace& trace, const DensityPair& d);

}  // namespace splineot
