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
#include <vector>

#include "splineot/mesh.hpp"

namespace splineot {

struct GaussRule {
  std::vector<double> nodes;  // on [0, 1]
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule mapped to [0, 1]; exact to degree 2n-1.
GaussRule gauss_legendre(int n);

// Collapsed (Duffy) product rule on the reference triangle: weights sum to 1,
// so the integral over T is area(T) * sum w f(b). Exact to degree 2n-2.
struct TriangleRule {
  std::vector<Barycentric> points;
  std::vector<double> weights;
};
TriangleRule triangle_rule(int n);

double integrate_mesh(const Triangulation& mesh, const std::function<double(int, const Barycentric&, Point2)>& fn,
                      const TriangleRule& rule);

// Integral over a star-shaped polygon by fan triangles from `center`, each
// refined `levels` times.
double integrate_star_polygon(const std::vector<Point2>& boundary, Point2 center,
                              const std::function<double(Point2)>& fn, int n = 12, int levels = 2);

}  // namespace splineot
