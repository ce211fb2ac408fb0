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

#include "splineot/lsq.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <vector>

#include <Eigen/SparseLU>

#include "splineot/error.hpp"

namespace splineot {

const char* conditioning_name(Conditioning c) {
  switch (c) {
    case Conditioning::kOk: return "ok";
    case Conditioning::kRegularized: return "regularized";
    case Conditioning::kRankDeficient: return "rank_deficient";
  }
  return "unknown";
}

namespace {

bool all_finite(const SparseMatrix& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      if (!std::isfinite(it.value())) return false;
  return true;
}

// SparseLU reports success on many numerically singular matrices, so solve
// against a fixed pseudo-random vector and check the backward error.
bool factor_is_sound(const Eigen::SparseLU<SparseMatrix>& lu, const SparseMatrix& m, double tol) {
  if (lu.info() != Eigen::Success || !std::isfinite(lu.logAbsDeterminant())) return false;
  Eigen::VectorXd r(m.rows());
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    r[i] = static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5;
  }
  Eigen::VectorXd x = lu.solve(r);
  x += lu.solve(r - m * x);
  if (!x.allFinite()) return false;
  return (m * x - r).norm() <= tol * r.norm();
}

}  // namespace

struct EqualityLsqSolver::Impl {
  SparseMatrix K, B, H;
  SparseMatrix C;           // hard constraints: row-scaled K plus the mean row
  Eigen::VectorXd scale;    // row scale applied to each constraint row
  SparseMatrix Bt;          // alpha * B^T, for the right-hand side
  SparseMatrix Q;           // alpha B^T B + beta H^T H
  SparseMatrix kkt;
  bool has_mean = false;
  int n = 0;
  int nc = 0;
  LsqOptions opt;
  Conditioning cond = Conditioning::kOk;
  Eigen::SparseLU<SparseMatrix> lu;

  Eigen::VectorXd constraint_rhs(const Eigen::VectorXd& b, double mean_target) const {
    Eigen::VectorXd r(nc);
    r.head(b.size()) = b;
    if (has_mean) r[nc - 1] = mean_target;
    return r.cwiseProduct(scale);
  }
};

EqualityLsqSolver::EqualityLsqSolver(SparseMatrix K, SparseMatrix B, SparseMatrix H,
                                     std::optional<Eigen::VectorXd> mean_row, LsqOptions options)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.opt = options;
  if (!(options.alpha > 0.0) || !(options.beta >= 0.0))
    throw Error(ErrorCode::kInvalidArgument, "lsq weights must satisfy alpha > 0, beta >= 0");
  s.n = static_cast<int>(std::max({K.cols(), B.cols(), H.cols()}));
  if (mean_row) s.n = std::max<int>(s.n, static_cast<int>(mean_row->size()));
  auto fix_cols = [&](SparseMatrix& m) {
    if (m.cols() == 0 && m.rows() == 0) m.resize(0, s.n);
    if (m.cols() != s.n) throw Error(ErrorCode::kInvalidArgument, "operator column counts differ");
  };
  fix_cols(K);
  fix_cols(B);
  fix_cols(H);
  if (mean_row && mean_row->size() != s.n) throw Error(ErrorCode::kInvalidArgument, "mean row has wrong length");
  if (!all_finite(K) || !all_finite(B) || !all_finite(H) || (mean_row && !mean_row->allFinite()))
    throw Error(ErrorCode::kNonFinite, "non-finite entry in the least-squares operators");

  s.K = std::move(K);
  s.B = std::move(B);
  s.H = std::move(H);
  s.has_mean = mean_row.has_value();
  s.nc = static_cast<int>(s.K.rows()) + (s.has_mean ? 1 : 0);

  // Row equilibration of the hard constraints.
  s.scale = Eigen::VectorXd::Ones(s.nc);
  {
    Eigen::VectorXd rn = Eigen::VectorXd::Zero(s.K.rows());
    for (int k = 0; k < s.K.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s.K, k); it; ++it) rn[it.row()] = std::max(rn[it.row()], std::abs(it.value()));
    for (int i = 0; i < s.K.rows(); ++i) s.scale[i] = rn[i] > 0.0 ? 1.0 / rn[i] : 1.0;
    if (s.has_mean) {
      const double mx = mean_row->cwiseAbs().maxCoeff();
      s.scale[s.nc - 1] = mx > 0.0 ? 1.0 / mx : 1.0;
    }
  }
  std::vector<Eigen::Triplet<double>> ct;
  for (int k = 0; k < s.K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s.K, k); it; ++it)
      ct.emplace_back(it.row(), it.col(), it.value() * s.scale[it.row()]);
  if (s.has_mean)
    for (int j = 0; j < s.n; ++j)
      if ((*mean_row)[j] != 0.0) ct.emplace_back(s.nc - 1, j, (*mean_row)[j] * s.scale[s.nc - 1]);
  s.C.resize(s.nc, s.n);
  s.C.setFromTriplets(ct.begin(), ct.end());

  s.Bt = SparseMatrix(s.B.transpose()) * options.alpha;
  s.Q = s.Bt * s.B;
  if (options.beta > 0.0 && s.H.rows() > 0) s.Q += options.beta * SparseMatrix(s.H.transpose() * s.H);

  // KKT matrix [[Q, C^T], [C, 0]].
  std::vector<Eigen::Triplet<double>> kt;
  kt.reserve(s.Q.nonZeros() + 2 * s.C.nonZeros());
  for (int k = 0; k < s.Q.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s.Q, k); it; ++it) kt.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < s.C.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s.C, k); it; ++it) {
      kt.emplace_back(s.n + it.row(), it.col(), it.value());
      kt.emplace_back(it.col(), s.n + it.row(), it.value());
    }
  s.kkt.resize(s.n + s.nc, s.n + s.nc);
  s.kkt.setFromTriplets(kt.begin(), kt.end());
  s.kkt.makeCompressed();
  s.lu.analyzePattern(s.kkt);
  s.lu.factorize(s.kkt);
  if (!factor_is_sound(s.lu, s.kkt, 1e-8)) s.cond = Conditioning::kRegularized;

  if (s.cond == Conditioning::kRegularized) {
    // Weighted formulation: C^T C + (alpha B^T B + beta H^T H) / lambda.
    SparseMatrix A = SparseMatrix(s.C.transpose() * s.C) + s.Q / options.lambda;
    A.makeCompressed();
    s.kkt = A;
    s.lu.analyzePattern(s.kkt);
    s.lu.factorize(s.kkt);
    // This matrix is ill-conditioned by about lambda by construction.
    if (!factor_is_sound(s.lu, s.kkt, 1e-6)) {
      // The objective is flat on part of the feasible set; a small ridge picks
      // one minimizer and the flag tells the caller it is not unique.
      s.cond = Conditioning::kRankDeficient;
      const double ridge = 1e-12 * std::max(A.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      SparseMatrix I(s.n, s.n);
      I.setIdentity();
      s.kkt = A + ridge * I;
      s.kkt.makeCompressed();
      s.lu.factorize(s.kkt);
      if (s.lu.info() != Eigen::Success) throw Error(ErrorCode::kInfeasible, "least-squares system could not be factorized");
    }
  }
}

EqualityLsqSolver::~EqualityLsqSolver() = default;
EqualityLsqSolver::EqualityLsqSolver(EqualityLsqSolver&&) noexcept = default;
EqualityLsqSolver& EqualityLsqSolver::operator=(EqualityLsqSolver&&) noexcept = default;

Conditioning EqualityLsqSolver::conditioning() const { return impl_->cond; }
int EqualityLsqSolver::unknowns() const { return impl_->n; }

SolveReport EqualityLsqSolver::solve(const Eigen::VectorXd& b, const Eigen::VectorXd& g, double mean_target) const {
  const Impl& s = *impl_;
  if (b.size() != s.K.rows() || g.size() != s.B.rows())
    throw Error(ErrorCode::kInvalidArgument, "right-hand side lengths do not match the operators");
  if (!b.allFinite() || !g.allFinite() || !std::isfinite(mean_target))
    throw Error(ErrorCode::kNonFinite, "non-finite right-hand side");

  const Eigen::VectorXd d = s.constraint_rhs(b, mean_target);
  const Eigen::VectorXd q = s.Bt * g;
  SolveReport rep;
  rep.conditioning = s.cond;
  if (s.cond == Conditioning::kOk) {
    Eigen::VectorXd rhs(s.n + s.nc);
    rhs.head(s.n) = q;
    rhs.tail(s.nc) = d;
    Eigen::VectorXd x = s.lu.solve(rhs);
    for (int it = 0; it < s.opt.refinement_steps; ++it) {
      const Eigen::VectorXd r = rhs - s.kkt * x;
      x += s.lu.solve(r);
      ++rep.iterations;
    }
    rep.coeffs = x.head(s.n);
  } else {
    // Augmented Lagrangian sweeps on the weighted system: shifting the
    // constraint target by the current defect removes the 1/lambda bias.
    const SparseMatrix Ct = s.C.transpose();
    Eigen::VectorXd target = d;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(s.n);
    for (int sweep = 0; sweep < 20; ++sweep) {
      const Eigen::VectorXd rhs = Ct * target + q / s.opt.lambda;
      x = s.lu.solve(rhs);
      for (int it = 0; it < s.opt.refinement_steps; ++it) x += s.lu.solve(rhs - s.kkt * x);
      ++rep.iterations;
      const Eigen::VectorXd defect = d - s.C * x;
      if (defect.norm() <= 1e-3 * s.opt.eps_rel * std::max(d.norm(), 1.0)) break;
      target += defect;
    }
    rep.coeffs = x;
  }
  if (!rep.coeffs.allFinite()) throw Error(ErrorCode::kNonFinite, "least-squares solution is not finite");

  Eigen::VectorXd cres(s.nc);
  cres.head(s.K.rows()) = s.K * rep.coeffs - b;
  double bnorm2 = b.squaredNorm();
  if (s.has_mean) {
    // mean_row is stored scaled inside C
    cres[s.nc - 1] = (s.C.row(s.nc - 1) * rep.coeffs).value() / s.scale[s.nc - 1] - mean_target;
    bnorm2 += mean_target * mean_target;
  }
  rep.constraint_residual = cres.norm();
  const double bm = (s.B * rep.coeffs - g).squaredNorm();
  const double hm = s.H.rows() ? (s.H * rep.coeffs).squaredNorm() : 0.0;
  rep.objective = 0.5 * (s.opt.alpha * bm + s.opt.beta * hm);

  const double eps1 = s.opt.eps_rel * std::max(std::sqrt(bnorm2), 1.0);
  if (!(rep.constraint_residual <= eps1)) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "collocation constraints violated: residual %.3e exceeds tolerance %.3e (%s)",
                  rep.constraint_residual, eps1, conditioning_name(s.cond));
    throw Error(ErrorCode::kInfeasible, buf);
  }
  return rep;
}

SolveReport solve_equality_ls(const SparseMatrix& K, const Eigen::VectorXd& b, const SparseMatrix& B,
                              const Eigen::VectorXd& g, const SparseMatrix& H,
                              const std::optional<Eigen::VectorXd>& mean_row, double mean_target,
                              const LsqOptions& options) {
  EqualityLsqSolver solver(K, B, H, mean_row, options);
  return solver.solve(b, g, mean_target);
}

}  // namespace splineot
