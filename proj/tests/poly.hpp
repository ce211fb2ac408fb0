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

#include <cmath>
#include <random>
#include <vector>

#include "splineot/geometry.hpp"

namespace splineot::testing {

// Bivariate polynomial sum a_ij x^i y^j with i + j <= degree.
struct Poly {
  int degree = 0;
  std::vector<double> a;  // (i, j) in the order of generation

  double operator()(Point2 p) const { return eval(p, 0, 0); }

  double eval(Point2 p, int dx, int dy) const {
    double s = 0.0;
    std::size_t n = 0;
    for (int i = 0; i <= degree; ++i)
      for (int j = 0; i + j <= degree; ++j, ++n) {
        if (i < dx || j < dy) continue;
        double c = a[n];
        for (int t = 0; t < dx; ++t) c *= i - t;
        for (int t = 0; t < dy; ++t) c *= j - t;
        s += c * std::pow(p.x, i - dx) * std::pow(p.y, j - dy);
      }
    return s;
  }

  // Exact integral over the box [x0,x1] x [y0,y1].
  double box_integral(Point2 lo, Point2 hi) const {
    double s = 0.0;
    std::size_t n = 0;
    for (int i = 0; i <= degree; ++i)
      for (int j = 0; i + j <= degree; ++j, ++n)
        s += a[n] * (std::pow(hi.x, i + 1) - std::pow(lo.x, i + 1)) / (i + 1) *
             (std::pow(hi.y, j + 1) - std::pow(lo.y, j + 1)) / (j + 1);
    return s;
  }
};

inline Poly random_poly(int degree, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Poly p{degree, {}};
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) p.a.push_back(u(rng));
  return p;
}

}  // namespace splineot::testing
