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

#include "crowdsdp/tuning.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "crowdsdp/error.h"

namespace crowdsdp {

Eigen::VectorXd EigenvaluesDescending(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().reverse();
}

TuningEstimate Tune(const SimilarityMatrix& a, Rng& rng) {
  return Tune(a.ToDouble(), rng);
}

TuningEstimate Tune(const Eigen::MatrixXd& a, Rng& rng) {
  const int n = static_cast<int>(a.rows());
  internal::Require(n >= 3 && a.cols() == n, "tuning needs a square n >= 3");
  TuningEstimate est;
  est.eigenvalues = EigenvaluesDescending(a);
  const Eigen::VectorXd& lam = est.eigenvalues;

  // 1-based index i in {2, ..., n-1} compares lam[i-1] and lam[i].
  std::vector<double> gaps;
  for (int i = 2; i <= n - 1; ++i) gaps.push_back(lam[i - 1] - lam[i]);
  const double best = *std::max_element(gaps.begin(), gaps.end());
  const double slack = 1e-12 * std::max(1.0, lam.cwiseAbs().maxCoeff());
  std::vector<int> ties;
  for (int k = 0; k < static_cast<int>(gaps.size()); ++k) {
    if (gaps[k] >= best - slack) ties.push_back(k + 2);
  }
  est.d_hat = ties[rng.UniformInt(0, static_cast<int>(ties.size()) - 1)];
  est.s_hat = static_cast<double>(n) / est.d_hat;

  const double s = est.s_hat;
  est.nu_hat = 0.5 * ((s * lam[0] + (n - s) * lam[1]) / (n * (s - 1.0)) +
                      (lam[0] - lam[1]) / n);
  return est;
}

}  // namespace crowdsdp
