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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "splineot/mae.hpp"

namespace splineot {

struct Pretranslation {
  Point2 shift;               // applied to the moved domain
  bool moved_source = false;  // true: V moved by shift, false: W moved by shift
  double linear_cost = 0.0;   // |x0 - y0|^2 times the area of the moved domain

  Point2 source_shift() const { return moved_source ? shift : Point2{}; }
  Point2 target_shift() const { return moved_source ? Point2{} : shift; }
};

/// Moves the domain whose linear transport cost is smaller so that both
/// centers coincide; V moves on ties.
Pretranslation pretranslate(const StarDomain& V, const StarDomain& W);

/// Target on the boundary of W for every (v, grad u(v)) pair: the exit point
/// of the ray from W's center through grad u(v), or through v when the
/// gradient sits on the center.
std::vector<Point2> center_match_targets(const StarDomain& W, const std::vector<std::pair<Point2, Point2>>& v_and_grad);

/// g = (integral of f over the mesh) / area(W).
double constant_target_density(const Density& f, const Triangulation& V, const StarDomain& W);

double integrate_density(const Density& f, const Triangulation& mesh, int n = 12);

/// Integral of |x - grad u(x)|^2 f(x) over the mesh with a per-triangle rule of
/// n = D + 2 points per direction (exact to degree 2D + 2 for constant f).
double transport_cost(const BForm& u, const Density& f, int n = 0);

struct TransportProblem {
  MeshPtr mesh;  // triangulation of V
  StarDomain V;
  StarDomain W;
  DensityPair densities;
  double mass_tol = 1e-6;
};

struct TransportConfig {
  int degree = 8;
  int smoothness = 2;
  bool force = false;
  int inner_iters = 20;   // linear solves per outer step
  int max_outer = 50;
  double outer_tol = 1e-8;  // relative to 1 + |u|_inf at the collocation points
  double inner_tol = 1e-12;
  double blowup_cap = 0;
  bool record_fields = false;
  CollocationOptions colloc{0, 0, true};
  LsqOptions lsq;
  int residual_grid = 512;
  int convexity_grid = 51;
  int coverage_samples = 101;
  int coverage_cells = 25;
};

struct TransportCertificates {
  double residual_rmse = 0.0;
  double residual_sup = 0.0;
  double cost = 0.0;                  // I[grad u] on the original domains
  double boundary_match_error = 0.0;  // max distance of grad u(v) to the boundary of W
  double convexity_min_eig = 0.0;
  double coverage = 0.0;              // fraction of W cells hit
  double outside_fraction = 0.0;      // image samples outside dilated W
  double mean_value = 0.0;
};

struct TransportSolution {
  BForm u;  // potential on the original V with grad u mapping V to W
  int outer_iterations = 0;
  bool converged = false;
  double last_outer_delta = 0.0;
  double mass_ratio = 1.0;  // scale applied to g to balance the masses
  Pretranslation shift{};
  TransportCertificates certificates{};
  IterationTrace trace{};
};

/// Center matching outer loop for problems whose domains already share a
/// center: Neumann rows with targets on the boundary of W, mean-zero hard
/// constraint, one subharmonic stage per outer step.
TransportSolution solve_transport(const TransportProblem& problem, const TransportConfig& cfg);

/// Full pipeline: mass balance, pretranslation, solve, and certificates on the
/// original domains.
TransportSolution solve_transport_problem(const TransportProblem& problem, const TransportConfig& cfg);

TransportCertificates transport_certificates(const BForm& u, const TransportProblem& problem,
                                             const TransportConfig& cfg);

// Sup of |grad u - map| over a grid of n x n points in the mesh.
double map_error_sup(const BForm& u, const std::function<Point2(Point2)>& map, int n = 51);

std::string solution_json(const TransportSolution& s);

}  // namespace splineot
