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

#ifndef CROWDSDP_TUNING_H_
#define CROWDSDP_TUNING_H_

#include <Eigen/Dense>

#include "crowdsdp/rng.h"
#include "crowdsdp/sdp.h"

namespace crowdsdp {

struct TuningEstimate {
  int d_hat = 0;
  double s_hat = 0.0;
  double nu_hat = 0.0;
  Eigen::VectorXd eigenvalues;  // descending
};

// Eigenvalues of a symmetric matrix, largest first.
Eigen::VectorXd EigenvaluesDescending(const Eigen::MatrixXd& a);

// Spectral plug-in estimates of the number of types, the cluster size and
// the SDP penalty. d_hat maximizes the gap lambda_i - lambda_{i+1} over
// i in {2, ..., n-1} (1-based); tied gaps are broken uniformly with `rng`.
// Requires n >= 3.
TuningEstimate Tune(const Eigen::MatrixXd& a, Rng& rng);
TuningEstimate Tune(const SimilarityMatrix& a, Rng& rng);

}  // namespace crowdsdp

#endif  // CROWDSDP_TUNING_H_
