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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "splineot/mae.hpp"

using namespace splineot;

namespace {

SpacePtr make_space(Point2 lo, Point2 hi, int n, int D, int r) {
  return std::make_shared<const SplineSpace>(
      std::make_shared<const Triangulation>(shapes::rectangle_mesh(lo, hi, n, n)), D, r);
}

double grid_rmse(const BForm& u, const std::function<double(Point2)>& exact, int n) {
  double s = 0.0;
  const auto pts = mesh_grid(u.space().mesh(), n);
  for (Point2 p : pts) {
    const double e = eval_bform(u, p, 0, 0) - exact(p);
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(pts.size()));
}

}  // namespace

TEST_SUITE("mae") {
  TEST_CASE("Poisson reproduces harmonic and quadratic data") {
    const auto sp = make_space({-1, -1}, {1, 1}, 4, 5, 1);
    auto lin = [](Point2 p) { return p.x + p.y; };
    const PoissonResult a = poisson_solve(sp, [](Point2) { return 0.0; }, lin);
    CHECK(grid_rmse(a.u, lin, 21) <= 1e-10);
    auto quad = [](Point2 p) { return dot(p, p); };
    const PoissonResult b = poisson_solve(sp, [](Point2) { return -4.0; }, quad);
    CHECK(grid_rmse(b.u, quad, 21) <= 1e-10);
    CHECK(b.report.conditioning == Conditioning::kOk);
  }

  TEST_CASE("too few collocation points is reported as rank deficient") {
    const auto sp = make_space({-1, -1}, {1, 1}, 2, 5, 1);
    const PoissonResult r = poisson_solve(sp, [](Point2) { return 0.0; }, [](Point2 p) { return p.x; });
    CHECK(r.report.conditioning == Conditioning::kRankDeficient);
  }

  TEST_CASE("Poisson manufactured solution") {
    constexpr double pi = std::numbers::pi;
    const auto sp = make_space({0, 0}, {1, 1}, 4, 8, 2);
    const PoissonResult r = poisson_solve(
        sp, [](Point2 p) { return 2 * pi * pi * std::sin(pi * p.x) * std::sin(pi * p.y); }, [](Point2) { return 0.0; });
    CHECK(grid_rmse(r.u, [](Point2 p) { return std::sin(pi * p.x) * std::sin(pi * p.y); }, 101) <= 1e-7);
  }

  TEST_CASE("subharmonic fixed point") {
    const auto sp = make_space({-1, -1}, {1, 1}, 4, 5, 1);
    const DensityPair d{Density::constant(1.0), Density::constant(1.0)};
    auto h = [](Point2 p) { return 0.5 * dot(p, p); };
    SubharmonicConfig cfg;
    cfg.tol = 1e-10;
    const SubharmonicResult r = subharmonic_solve(sp, d, h, cfg);
    CHECK(r.trace.converged);
    CHECK(r.trace.records.size() <= 3);
    CHECK(grid_rmse(r.u, h, 21) <= 1e-10);
    CHECK(iteration_diagnostics(r.trace, d).ok());
  }

  TEST_CASE("smooth Dirichlet problem on a coarse mesh") {
    const auto sp = make_space({-1, -1}, {1, 1}, 4, 8, 2);
    auto u = [](Point2 p) { return std::exp(0.5 * dot(p, p)); };
    const DensityPair d{Density([](Point2 p) { return (1 + dot(p, p)) * std::exp(dot(p, p)); }, 1.0,
                               3 * std::exp(2.0), "f1"),
                        Density::constant(1.0)};
    const SubharmonicResult r = subharmonic_solve(sp, d, u);
    CHECK(grid_rmse(r.u, u, 101) <= 1e-6);
    const DiagnosticsReport rep = iteration_diagnostics(r.trace, d);
    CHECK(rep.ok());
    CHECK(rep.nonneg_min >= -1e-8);
    CHECK_FALSE(rep.rho.empty());
  }

  TEST_CASE("diagnostics flag a constructed violation") {
    IterationTrace t;
    t.lap_floor = 2.0;
    t.f_over_gmin_sqrt_sup = 1.0;
    IterationRecord good;
    good.k = 1;
    good.lap = Eigen::VectorXd::Constant(3, 2.0);
    good.lap_inf = 2.0;
    good.partial_sum = Eigen::VectorXd::Zero(3);
    t.append(good);
    const DensityPair d{Density::constant(1.0), Density::constant(1.0)};
    CHECK(iteration_diagnostics(t, d).ok());

    IterationRecord bad = good;
    bad.k = 2;
    bad.lap[1] = -1.0;
    t.append(bad);
    const DiagnosticsReport rep = iteration_diagnostics(t, d);
    CHECK_FALSE(rep.lower_bound_ok);
    CHECK(rep.nonneg_ok);
    CHECK(rep.growth_ok);
    CHECK(rep.lap_min == doctest::Approx(-1.0));
    REQUIRE(rep.flags.size() == 1);

    CHECK(iteration_diagnostics(IterationTrace{}, d).flags.size() == 1);
  }
}
