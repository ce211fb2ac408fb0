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

#include <memory>
#include <optional>
#include <string>

#include "splineot/assembly.hpp"

namespace splineot {

enum class Conditioning { kOk, kRegularized, kRankDeficient };
const char* conditioning_name(Conditioning c);

struct LsqOptions {
  double alpha = 1.0;          // weight of the boundary misfit
  double beta = 1e2;           // weight of the smoothness defect
  double eps_rel = 1e-8;       // constraint tolerance relative to max(|b|, 1)
  double lambda = 1e8;         // penalty scale of the regularized fallback
  int refinement_steps = 2;    // iterative refinement sweeps on the KKT system
};

struct SolveReport {
  Eigen::VectorXd coeffs;
  double constraint_residual = 0.0;  // |Kc - b|_2 including the mean row
  double objective = 0.0;            // (alpha |Bc-g|^2 + beta |Hc|^2) / 2
  int iterations = 0;
  Conditioning conditioning = Conditioning::kOk;
};

/// Minimize (alpha |Bc - g|^2 + beta |Hc|^2)/2 subject to Kc = b and, when
/// given, mean_row . c = mean_target. The KKT matrix depends only on the
/// operators, so it is factorized once and reused for every right-hand side.
class EqualityLsqSolver {
 public:
  EqualityLsqSolver(SparseMatrix K, SparseMatrix B, SparseMatrix H, std::optional<Eigen::VectorXd> mean_row,
                    LsqOptions options = {});
  ~EqualityLsqSolver();
  EqualityLsqSolver(EqualityLsqSolver&&) noexcept;
  EqualityLsqSolver& operator=(EqualityLsqSolver&&) noexcept;

  SolveReport solve(const Eigen::VectorXd& b, const Eigen::VectorXd& g, double mean_target = 0.0) const;

  Conditioning conditioning() const;
  int unknowns() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveReport solve_equality_ls(const SparseMatrix& K, const Eigen::VectorXd& b, const SparseMatrix& B,
                              const Eigen::VectorXd& g, const SparseMatrix& H,
                              const std::optional<Eigen::VectorXd>& mean_row, double mean_target,
                              const LsqOptions& options = {});

}  // namespace splineot
