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

#include "splineot/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "splineot/error.hpp"

namespace splineot {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "Gauss rule needs at least one point");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

TriangleRule triangle_rule(int n) {
  const GaussRule g = gauss_legendre(n);
  TriangleRule r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double s = g.nodes[i], t = g.nodes[j];
      r.points.push_back({s, (1.0 - s) * t, (1.0 - s) * (1.0 - t)});
      r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - s));
    }
  return r;
}

double integrate_mesh(const Triangulation& mesh, const std::function<double(int, const Barycentric&, Point2)>& fn,
                      const TriangleRule& rule) {
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      s += rule.weights[q] * fn(t, rule.points[q], mesh.point_at(t, rule.points[q]));
    total += mesh.triangle_area(t) * s;
  }
  return total;
}

double integrate_star_polygon(const std::vector<Point2>& boundary, Point2 center,
                              const std::function<double(Point2)>& fn, int n, int levels) {
  const TriangleRule rule = triangle_rule(n);
  const int k = 1 << levels;
  double total = 0.0;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const Point2 a = center, b = boundary[i], c = boundary[(i + 1) % boundary.size()];
    // Regular k x k subdivision of the fan triangle.
    auto at = [&](int p, int q) { return a + (static_cast<double>(p) / k) * (b - a) + (static_cast<double>(q) / k) * (c - a); };
    auto tri = [&](Point2 p0, Point2 p1, Point2 p2) {
      const double area = 0.5 * orient2d(p0, p1, p2);
      double s = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const auto& w = rule.points[q];
        s += rule.weights[q] * fn(w[0] * p0 + w[1] * p1 + w[2] * p2);
      }
      return area * s;
    };
    for (int p = 0; p < k; ++p)
      for (int q = 0; p + q < k; ++q) {
        total += tri(at(p, q), at(p + 1, q), at(p, q + 1));
        if (p + q + 1 < k) total += tri(at(p + 1, q), at(p + 1, q + 1), at(p, q + 1));
      }
  }
  return total;
}

}  // namespace splineot
