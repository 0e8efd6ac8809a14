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

// End-to-end inference: the SDP-clustering + weighted-vote algorithm and the
// sequential-clustering subset-selection baseline.

#ifndef CROWDSDP_PIPELINE_H_
#define CROWDSDP_PIPELINE_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "crowdsdp/estimators.h"
#include "crowdsdp/kmedoids.h"
#include "crowdsdp/model.h"
#include "crowdsdp/rng.h"
#include "crowdsdp/sdp.h"
#include "crowdsdp/tuning.h"

namespace crowdsdp {

// Who answers what. Pilot tasks go to every worker; every other task goes to
// l workers drawn from each of the k clusters. subsets[i][z] is the size-l
// set A_z(i) used for type matching, for pilot tasks too.
struct AssignmentPlan {
  std::vector<int> pilot_tasks;
  int per_cluster_draws = 0;
  int k = 0;
  std::vector<std::vector<std::vector<int>>> subsets;
  std::vector<bool> is_pilot;

  int m() const { return static_cast<int>(subsets.size()); }
  // The full assignment set for n workers.
  Assignment ToAssignment(int n) const;
  // Non-pilot part of the assignment.
  Assignment StageTwoAssignment() const;
  std::size_t QueryCount(int n) const;
};

struct TypeMatchResult {
  std::vector<int> t_hat;                     // cluster index per task
  std::vector<std::vector<int>> bias_scores;  // |sum_{j in A_z(i)} M_ij|
};

// Throws InfeasibleError naming the first cluster with fewer than l members.
AssignmentPlan BuildAssignment(const ClusterAssignment& clusters, int m, int l,
                               const std::vector<int>& pilot_tasks, Rng& rng);

// argmax_z bias_scores[i][z], lowest z on ties.
TypeMatchResult MatchTypes(const ResponseSet& responses,
                           const AssignmentPlan& plan);

// Weight 1 on A_{t_hat}(i) and `off_weight` on the other subsets.
WeightScheme ClusterWeights(const AssignmentPlan& plan,
                            const std::vector<int>& t_hat, double off_weight);

// 1/sqrt(k-1); 0 when k == 1 (no unmatched cluster exists).
double UnmatchedWeight(int k);

// Greedy founder-based clustering on the pilot answers: workers are visited
// in index order; worker b joins the first cluster whose founder a agrees
// with b on more than a xi-fraction of the pilot tasks, otherwise b founds a
// new cluster. Medoids of the result are the founders.
ClusterAssignment SequentialClustering(const ResponseSet& responses,
                                       const std::vector<int>& pilot_tasks,
                                       double xi);

// xi = (1 + (p_m + p_u) / 2) / 2.
double OracleXi(double p_m, double p_u);

// l workers drawn uniformly per non-pilot task (the majority-vote and ML
// baselines' assignment).
Assignment RandomAssignment(int m, int n, int per_task,
                            const std::vector<int>& tasks, Rng& rng);

struct Alg1Options {
  int r = 0;
  // Pilot task ids. Empty: r tasks drawn uniformly.
  std::vector<int> pilot_tasks;
  int l = 1;
  // SDP penalty. Empty: estimated by Tune().
  std::optional<double> nu;
  // Number of clusters. Empty: the instance's d, or d_hat when
  // estimate_k is set.
  std::optional<int> k;
  bool estimate_k = false;
  SdpConfig sdp;
};

struct SubsetOptions {
  int r = 0;
  std::vector<int> pilot_tasks;  // as in Alg1Options
  int l = 1;
  // Number of (largest) clusters used for type matching.
  std::optional<int> d;
  // Agreement threshold. Empty: plug-in from Tune(): (1 + nu_hat / r) / 2.
  std::optional<double> xi;
};

struct PipelineResult {
  LabelEstimate estimate;
  // Alg1: the k inferred clusters. Subset selection: every sequential
  // cluster, of which `used_clusters` (largest first) receive tasks.
  ClusterAssignment clusters;
  std::vector<int> used_clusters;
  TypeMatchResult types;  // t_hat indexes used_clusters
  AssignmentPlan plan;
  ResponseSet responses;
  SimilarityMatrix similarity;  // from the pilot answers
  std::optional<TuningEstimate> tuning;
  std::optional<SdpSolution> sdp;
  double nu = 0.0;
  double xi = 0.0;
};

// Draws r pilot tasks uniformly from [m].
std::vector<int> ChoosePilotTasks(int m, int r, Rng& rng);

PipelineResult RunAlg1(const ModelInstance& inst, const Alg1Options& opt,
                       Rng& rng);

PipelineResult RunSubsetSelection(const ModelInstance& inst,
                                  const SubsetOptions& opt, Rng& rng);

}  // namespace crowdsdp

#endif  // CROWDSDP_PIPELINE_H_
