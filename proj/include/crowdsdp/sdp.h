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

// Stage-one worker clustering: the pilot similarity matrix and the
// semidefinite relaxation
//
//   maximize   <A - nu * 11^T, X>
//   subject to X PSD,  tr(X) = n,  0 <= X_ij <= 1,
//
// solved by operator splitting (ADMM) between the spectral set
// {X PSD, tr X = n} and the box [0, 1]^{n x n}.

#ifndef CROWDSDP_SDP_H_
#define CROWDSDP_SDP_H_

#include <vector>

#include <Eigen/Dense>

#include "crowdsdp/model.h"

namespace crowdsdp {

// A = offdiag(sum_{i in S} M_i*^T M_i*) over the r pilot tasks S.
struct SimilarityMatrix {
  Eigen::MatrixXi a;
  int r = 0;

  int n() const { return static_cast<int>(a.rows()); }
  Eigen::MatrixXd ToDouble() const { return a.cast<double>(); }
};

// Every pilot task must have been answered by all n workers.
SimilarityMatrix Similarity(const ResponseSet& responses,
                            const std::vector<int>& pilot_tasks);

struct SdpConfig {
  double nu = 0.0;
  double rho = 1.0;
  double tol_primal = 1e-6;
  double tol_dual = 1e-6;
  int max_iters = 2000;
  // Residual balancing: rescale rho when one residual dominates the other
  // by more than a factor of 10.
  bool adaptive_rho = true;
  // Over-relaxation factor in (0, 2).
  double relaxation = 1.6;

  void Validate() const;
};

struct SdpSolution {
  Eigen::MatrixXd x;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

// Residuals are relative: ||X - Z||_F / (n + max(||X||_F, ||Z||_F)) and
// rho ||Z - Z_prev||_F / (n + rho ||U||_F). The returned X is the
// spectral-side iterate passed through RepairFeasibility, so it is feasible
// whether or not the solver converged.
// Throws ValidationError on an asymmetric A.
SdpSolution SolveSdp(const Eigen::MatrixXd& a, const SdpConfig& cfg);
SdpSolution SolveSdp(const SimilarityMatrix& a, const SdpConfig& cfg);

// Maps a PSD matrix to a nearby point with unit diagonal, entries in [0, 1]
// and no loss of PSD: diagonal rescaling, then mixing with the all-ones
// matrix. Rows with a vanishing diagonal become unit vectors.
Eigen::MatrixXd RepairFeasibility(const Eigen::MatrixXd& x);

// <A - nu 11^T, X>.
double SdpObjective(const Eigen::MatrixXd& a, double nu,
                    const Eigen::MatrixXd& x);

// Euclidean projection of v onto {lambda >= 0, sum lambda = total}.
Eigen::VectorXd ProjectOntoSimplex(const Eigen::VectorXd& v, double total);

// Projection onto {X symmetric PSD, tr X = total} via eigendecomposition.
Eigen::MatrixXd ProjectOntoSpectraplex(const Eigen::MatrixXd& m, double total);

struct NuBracket {
  double low = 0.0;   // r (p_m / 4 + 3 p_u / 4)
  double mid = 0.0;   // r (p_m + p_u) / 2
  double high = 0.0;  // r (3 p_m / 4 + p_u / 4)
};

NuBracket ExactRecoveryBracket(int r, double p_m, double p_u);

// ceil(c2 * d^2 (log n)^2 / (p_m - p_u)^2). Requires p_m > p_u.
int Lemma1Budget(int n, int d, double p_m, double p_u, double c2);

}  // namespace crowdsdp

#endif  // CROWDSDP_SDP_H_
