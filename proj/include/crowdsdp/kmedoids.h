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

#ifndef CROWDSDP_KMEDOIDS_H_
#define CROWDSDP_KMEDOIDS_H_

#include <vector>

#include <Eigen/Dense>

#include "crowdsdp/rng.h"

namespace crowdsdp {

// A partition of n items into k nonempty clusters labelled 0..k-1.
class ClusterAssignment {
 public:
  ClusterAssignment(std::vector<int> labels, int k,
                    std::vector<int> medoids = {});

  int n() const { return static_cast<int>(labels_.size()); }
  int k() const { return k_; }
  int operator[](int item) const { return labels_[item]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& medoids() const { return medoids_; }

  std::vector<int> Members(int cluster) const;
  std::vector<int> Sizes() const;

 private:
  std::vector<int> labels_;
  int k_;
  std::vector<int> medoids_;
};

struct KMedoidsResult {
  ClusterAssignment clusters;
  // Sum of row distances to the assigned medoid after each round; the first
  // entry is the objective of the initial medoids.
  std::vector<double> objective_trace;
};

// k-medoids on the rows of `x` under the Euclidean metric. Farthest-first
// initialization (first medoid: largest row norm, ties drawn from `rng`),
// followed by at most `max_rounds` assign/update rounds.
KMedoidsResult KMedoidsRows(const Eigen::MatrixXd& x, int k, Rng& rng,
                            int max_rounds = 50);

}  // namespace crowdsdp

#endif  // CROWDSDP_KMEDOIDS_H_
