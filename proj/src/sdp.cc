// Copyright 2026 The crowdsdp Authors.
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

#include "crowdsdp/sdp.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Eigenvalues>

#include "crowdsdp/error.h"

namespace crowdsdp {
namespace {

using internal::Require;

double MaxAbs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

SimilarityMatrix Similarity(const ResponseSet& responses,
                            const std::vector<int>& pilot_tasks) {
  const int n = responses.n();
  Eigen::MatrixXi pilot(static_cast<int>(pilot_tasks.size()), n);
  for (std::size_t k = 0; k < pilot_tasks.size(); ++k) {
    const int i = pilot_tasks[k];
    Require(i >= 0 && i < responses.m(), "pilot task out of range");
    auto row = responses.row(i);
    Require(static_cast<int>(row.size()) == n,
            "pilot task " + std::to_string(i) +
                " is missing responses from some workers");
    for (const WorkerResponse& c : row) pilot(static_cast<int>(k), c.worker) = c.value;
  }
  SimilarityMatrix s;
  s.r = static_cast<int>(pilot_tasks.size());
  s.a = pilot.transpose() * pilot;
  s.a.diagonal().setZero();
  return s;
}

void SdpConfig::Validate() const {
  Require(std::isfinite(nu) && nu >= 0.0, "SDP penalty nu must be >= 0");
  Require(rho > 0.0, "SDP step rho must be positive");
  Require(tol_primal > 0.0 && tol_dual > 0.0,
          "SDP tolerances must be positive");
  Require(max_iters >= 1, "SDP max_iters must be positive");
  Require(relaxation > 0.0 && relaxation < 2.0,
          "SDP relaxation must lie in (0, 2)");
}

Eigen::VectorXd ProjectOntoSimplex(const Eigen::VectorXd& v, double total) {
  const Eigen::Index n = v.size();
  Eigen::VectorXd u = v;
  std::sort(u.data(), u.data() + n, std::greater<double>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += u[k];
    double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (u[k] - candidate > 0.0) shift = candidate;
  }
  return (v.array() - shift).max(0.0).matrix();
}

Eigen::MatrixXd ProjectOntoSpectraplex(const Eigen::MatrixXd& m, double total) {
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd lambda = ProjectOntoSimplex(eig.eigenvalues(), total);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  return v * lambda.asDiagonal() * v.transpose();
}

double SdpObjective(const Eigen::MatrixXd& a, double nu,
                    const Eigen::MatrixXd& x) {
  return (a.array() * x.array()).sum() - nu * x.sum();
}

SdpSolution SolveSdp(const SimilarityMatrix& a, const SdpConfig& cfg) {
  return SolveSdp(a.ToDouble(), cfg);
}

SdpSolution SolveSdp(const Eigen::MatrixXd& a, const SdpConfig& cfg) {
  cfg.Validate();
  Require(a.rows() == a.cols() && a.rows() >= 1, "SDP input must be square");
  Require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + MaxAbs(a)),
          "SDP input must be symmetric");
  const Eigen::Index n = a.rows();
  const double trace = static_cast<double>(n);

  // The maximizer is invariant to positive scaling of the cost, so solve on
  // a unit-scale cost to make rho and the tolerances scale free.
  Eigen::MatrixXd cost = a.array() - cfg.nu;
  const double scale = MaxAbs(cost);
  if (scale > 0.0) cost /= scale;

  // tr X = n together with X_ii <= 1 forces a unit diagonal, so the box side
  // pins it.
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd z = x;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  double rho = cfg.rho;
  const double alpha = cfg.relaxation;
  const double dim = static_cast<double>(n);

  SdpSolution sol;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    x = ProjectOntoSpectraplex(z - u + cost / rho, trace);
    Eigen::MatrixXd relaxed = alpha * x + (1.0 - alpha) * z;
    Eigen::MatrixXd z_prev = std::move(z);
    z = (relaxed + u).cwiseMax(0.0).cwiseMin(1.0);
    z.diagonal().setOnes();
    u += relaxed - z;

    sol.iterations = it;
    sol.primal_residual =
        (x - z).norm() / (dim + std::max(x.norm(), z.norm()));
    sol.dual_residual = rho * (z - z_prev).norm() / (dim + rho * u.norm());
    if (sol.primal_residual < cfg.tol_primal &&
        sol.dual_residual < cfg.tol_dual) {
      sol.converged = true;
      break;
    }
    if (cfg.adaptive_rho && it % 10 == 0) {
      double ratio = std::sqrt(sol.primal_residual /
                               std::max(sol.dual_residual, 1e-300));
      if (ratio > 5.0 || ratio < 0.2) {
        ratio = std::clamp(ratio, 1e-2, 1e2);
        rho *= ratio;
        u /= ratio;
      }
    }
  }
  sol.x = RepairFeasibility(x);
  return sol;
}

Eigen::MatrixXd RepairFeasibility(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd y = 0.5 * (x + x.transpose());
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    scale[i] = y(i, i) > 1e-12 ? 1.0 / std::sqrt(y(i, i)) : 0.0;
  }
  y = scale.asDiagonal() * y * scale.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (scale[i] == 0.0) {
      y.row(i).setZero();
      y.col(i).setZero();
    }
    y(i, i) = 1.0;
  }
  y = y.cwiseMin(1.0);
  // Mixing with the all-ones matrix keeps PSD and the unit diagonal.
  const double low = y.minCoeff();
  if (low < 0.0) {
    const double t = -low / (1.0 - low);
    y = ((1.0 - t) * y.array() + t).matrix();
    y = y.cwiseMax(0.0);
  }
  return y;
}

NuBracket ExactRecoveryBracket(int r, double p_m, double p_u) {
  return {r * (0.25 * p_m + 0.75 * p_u), r * 0.5 * (p_m + p_u),
          r * (0.75 * p_m + 0.25 * p_u)};
}

int Lemma1Budget(int n, int d, double p_m, double p_u, double c2) {
  Require(p_m > p_u, "strong assortativity (p_m > p_u) required");
  Require(n >= 1 && d >= 1 && c2 >= 0.0, "invalid budget arguments");
  const double gap = p_m - p_u;
  const double log_n = std::log(static_cast<double>(n));
  return static_cast<int>(std::ceil(c2 * d * d * log_n * log_n / (gap * gap)));
}

}  // namespace crowdsdp
