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

#ifndef CROWDSDP_METRICS_H_
#define CROWDSDP_METRICS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "crowdsdp/estimators.h"
#include "crowdsdp/kmedoids.h"

namespace crowdsdp {

// Minimum-cost perfect matching on a square integer cost matrix. Among all
// optimal matchings, returns the lexicographically smallest row->column map.
struct AssignmentSolution {
  std::int64_t cost = 0;
  std::vector<int> column_of_row;
};
AssignmentSolution SolveAssignment(
    const std::vector<std::vector<std::int64_t>>& cost);

// Fraction of tasks whose estimate differs from the truth.
double LabelError(const LabelEstimate& est, const std::vector<int>& truth);
// Restricted to the listed tasks.
double LabelError(const LabelEstimate& est, const std::vector<int>& truth,
                  const std::vector<int>& tasks);

struct ClusteringMatch {
  double error = 0.0;
  // type_of_cluster[z] = pi(z), the true type matched to cluster z.
  std::vector<int> type_of_cluster;
};

// min over permutations pi of (1/n) sum_j 1(w_j != pi(w_hat_j)).
// Requires est.k() == d.
ClusteringMatch ClusteringError(const ClusterAssignment& est,
                                const std::vector<int>& truth, int d);

// Ids of the `count` largest clusters, largest first, lower id on ties.
std::vector<int> LargestClusters(const ClusterAssignment& est, int count);

struct SubsetClusteringErrors {
  double inclusive = 0.0;   // workers outside the top-d union count as errors
  double restricted = 0.0;  // error rate inside the union
  std::vector<int> top_clusters;
  // type_of_top[z]: true type matched to top_clusters[z].
  std::vector<int> type_of_top;
  int union_size = 0;
};

SubsetClusteringErrors SsClusteringErrors(const ClusterAssignment& est,
                                          const std::vector<int>& truth,
                                          int d);

// (1/m) sum_i 1(t_i != align(t_hat_i)). An empty alignment is the identity.
double TypeMatchError(const std::vector<int>& t_hat,
                      const std::vector<int>& truth,
                      const std::vector<int>& alignment = {});

struct MetricsRecord {
  double label_error = 0.0;
  std::optional<double> clustering_error;
  std::optional<double> ss_clustering_error_inclusive;
  std::optional<double> ss_clustering_error_restricted;
  std::optional<double> type_match_error;
  double queries_per_task = 0.0;
};

}  // namespace crowdsdp

#endif  // CROWDSDP_METRICS_H_
