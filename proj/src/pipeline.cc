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

#include "crowdsdp/pipeline.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "crowdsdp/error.h"
#include "crowdsdp/metrics.h"

namespace crowdsdp {
namespace {

using internal::Require;

AssignmentPlan BuildFromGroups(const std::vector<std::vector<int>>& groups,
                               int m, int l,
                               const std::vector<int>& pilot_tasks, Rng& rng) {
  Require(l >= 1, "per-cluster draws l must be positive");
  for (std::size_t z = 0; z < groups.size(); ++z) {
    if (static_cast<int>(groups[z].size()) < l) {
      throw InfeasibleError("cluster " + std::to_string(z) + " has " +
                            std::to_string(groups[z].size()) +
                            " workers, fewer than l = " + std::to_string(l));
    }
  }
  AssignmentPlan plan;
  plan.pilot_tasks = pilot_tasks;
  std::sort(plan.pilot_tasks.begin(), plan.pilot_tasks.end());
  plan.per_cluster_draws = l;
  plan.k = static_cast<int>(groups.size());
  plan.is_pilot.assign(m, false);
  for (int i : plan.pilot_tasks) {
    Require(i >= 0 && i < m, "pilot task out of range");
    plan.is_pilot[i] = true;
  }
  plan.subsets.resize(m);
  for (int i = 0; i < m; ++i) {
    plan.subsets[i].reserve(groups.size());
    for (const auto& g : groups) {
      std::vector<int> pick = rng.SampleFrom(g, l);
      std::sort(pick.begin(), pick.end());
      plan.subsets[i].push_back(std::move(pick));
    }
  }
  return plan;
}

std::vector<std::vector<int>> Groups(const ClusterAssignment& clusters,
                                     const std::vector<int>& ids) {
  std::vector<std::vector<int>> groups;
  for (int z : ids) groups.push_back(clusters.Members(z));
  return groups;
}

struct PilotStage {
  std::vector<int> tasks;
  ResponseSet responses;
  SimilarityMatrix similarity;
};

PilotStage RunPilot(const ModelInstance& inst, int r,
                    const std::vector<int>& given, Rng& rng) {
  Require(r >= 1 && r <= inst.m(), "pilot size r must lie in [1, m]");
  PilotStage stage{{}, ResponseSet(inst.m(), inst.n()), {}};
  if (given.empty()) {
    stage.tasks = ChoosePilotTasks(inst.m(), r, rng);
  } else {
    Require(static_cast<int>(given.size()) == r,
            "pilot task list must have r entries");
    stage.tasks = given;
    std::sort(stage.tasks.begin(), stage.tasks.end());
    Require(std::adjacent_find(stage.tasks.begin(), stage.tasks.end()) ==
                stage.tasks.end(),
            "pilot tasks must be distinct");
  }
  Assignment pilot;
  pilot.reserve(static_cast<std::size_t>(r) * inst.n());
  for (int i : stage.tasks) {
    for (int j = 0; j < inst.n(); ++j) pilot.push_back({i, j});
  }
  stage.responses = SampleResponses(inst, pilot, rng);
  stage.similarity = Similarity(stage.responses, stage.tasks);
  return stage;
}

}  // namespace

Assignment AssignmentPlan::ToAssignment(int n) const {
  Assignment out;
  for (int i : pilot_tasks) {
    for (int j = 0; j < n; ++j) out.push_back({i, j});
  }
  Assignment rest = StageTwoAssignment();
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

Assignment AssignmentPlan::StageTwoAssignment() const {
  Assignment out;
  for (int i = 0; i < m(); ++i) {
    if (is_pilot[i]) continue;
    for (const auto& subset : subsets[i]) {
      for (int j : subset) out.push_back({i, j});
    }
  }
  return out;
}

std::size_t AssignmentPlan::QueryCount(int n) const {
  const std::size_t r = pilot_tasks.size();
  return static_cast<std::size_t>(n) * r +
         static_cast<std::size_t>(per_cluster_draws) * k * (m() - r);
}

AssignmentPlan BuildAssignment(const ClusterAssignment& clusters, int m, int l,
                               const std::vector<int>& pilot_tasks, Rng& rng) {
  std::vector<int> ids(clusters.k());
  for (int z = 0; z < clusters.k(); ++z) ids[z] = z;
  return BuildFromGroups(Groups(clusters, ids), m, l, pilot_tasks, rng);
}

TypeMatchResult MatchTypes(const ResponseSet& responses,
                           const AssignmentPlan& plan) {
  Require(plan.m() == responses.m(), "plan and responses disagree on m");
  TypeMatchResult res;
  res.t_hat.resize(plan.m());
  res.bias_scores.resize(plan.m());
  for (int i = 0; i < plan.m(); ++i) {
    auto& scores = res.bias_scores[i];
    scores.reserve(plan.k);
    for (const auto& subset : plan.subsets[i]) {
      int sum = 0;
      for (int j : subset) sum += responses(i, j);
      scores.push_back(std::abs(sum));
    }
    res.t_hat[i] = static_cast<int>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
  }
  return res;
}

WeightScheme ClusterWeights(const AssignmentPlan& plan,
                            const std::vector<int>& t_hat, double off_weight) {
  WeightScheme w(plan.m());
  for (int i = 0; i < plan.m(); ++i) {
    for (int z = 0; z < plan.k; ++z) {
      const double weight = z == t_hat[i] ? 1.0 : off_weight;
      for (int j : plan.subsets[i][z]) w.Set(i, j, weight);
    }
  }
  return w;
}

double UnmatchedWeight(int k) {
  return k <= 1 ? 0.0 : 1.0 / std::sqrt(k - 1.0);
}

ClusterAssignment SequentialClustering(const ResponseSet& responses,
                                       const std::vector<int>& pilot_tasks,
                                       double xi) {
  const int n = responses.n();
  const int r = static_cast<int>(pilot_tasks.size());
  Require(r >= 1, "sequential clustering needs pilot tasks");
  Eigen::MatrixXi answers(r, n);
  for (int k = 0; k < r; ++k) {
    auto row = responses.row(pilot_tasks[k]);
    Require(static_cast<int>(row.size()) == n,
            "pilot task is missing responses from some workers");
    for (const WorkerResponse& c : row) answers(k, c.worker) = c.value;
  }
  std::vector<int> founders;
  std::vector<int> labels(n, -1);
  for (int b = 0; b < n; ++b) {
    for (int z = 0; z < static_cast<int>(founders.size()); ++z) {
      const int a = founders[z];
      const int agree = (answers.col(a).array() == answers.col(b).array()).count();
      if (static_cast<double>(agree) / r > xi) {
        labels[b] = z;
        break;
      }
    }
    if (labels[b] < 0) {
      labels[b] = static_cast<int>(founders.size());
      founders.push_back(b);
    }
  }
  const int c = static_cast<int>(founders.size());
  return ClusterAssignment(std::move(labels), c, std::move(founders));
}

double OracleXi(double p_m, double p_u) {
  return 0.5 * (0.5 * (1.0 + p_m) + 0.5 * (1.0 + p_u));
}

Assignment RandomAssignment(int m, int n, int per_task,
                            const std::vector<int>& tasks, Rng& rng) {
  Require(per_task >= 0 && per_task <= n, "per-task budget exceeds n");
  Assignment out;
  out.reserve(tasks.size() * per_task);
  for (int i : tasks) {
    Require(i >= 0 && i < m, "task out of range");
    std::vector<int> pick = rng.SampleWithoutReplacement(n, per_task);
    std::sort(pick.begin(), pick.end());
    for (int j : pick) out.push_back({i, j});
  }
  return out;
}

std::vector<int> ChoosePilotTasks(int m, int r, Rng& rng) {
  std::vector<int> pilot = rng.SampleWithoutReplacement(m, r);
  std::sort(pilot.begin(), pilot.end());
  return pilot;
}

PipelineResult RunAlg1(const ModelInstance& inst, const Alg1Options& opt,
                       Rng& rng) {
  PilotStage pilot = RunPilot(inst, opt.r, opt.pilot_tasks, rng);

  std::optional<TuningEstimate> tuning;
  if (!opt.nu || opt.estimate_k) tuning = Tune(pilot.similarity, rng);
  const double nu = opt.nu ? *opt.nu : tuning->nu_hat;
  int k = opt.k.value_or(inst.d());
  if (opt.estimate_k) k = tuning->d_hat;
  Require(k >= 1 && k <= inst.n(), "cluster count out of range");

  std::optional<SdpSolution> sdp;
  std::optional<ClusterAssignment> clusters;
  if (k == 1) {
    clusters.emplace(std::vector<int>(inst.n(), 0), 1);
  } else {
    SdpConfig cfg = opt.sdp;
    cfg.nu = nu;
    sdp = SolveSdp(pilot.similarity, cfg);
    clusters.emplace(KMedoidsRows(sdp->x, k, rng).clusters);
  }

  AssignmentPlan plan = BuildAssignment(*clusters, inst.m(), opt.l,
                                        pilot.tasks, rng);
  ResponseSet stage_two = SampleResponses(inst, plan.StageTwoAssignment(), rng);
  ResponseSet all = ResponseSet::Merge(pilot.responses, stage_two);
  TypeMatchResult types = MatchTypes(all, plan);
  LabelEstimate est = WeightedMajorityVote(
      all, ClusterWeights(plan, types.t_hat, UnmatchedWeight(k)));

  std::vector<int> used(k);
  for (int z = 0; z < k; ++z) used[z] = z;
  return PipelineResult{std::move(est), std::move(*clusters), std::move(used),
                        std::move(types), std::move(plan), std::move(all),
                        std::move(pilot.similarity), std::move(tuning),
                        std::move(sdp), nu, 0.0};
}

PipelineResult RunSubsetSelection(const ModelInstance& inst,
                                  const SubsetOptions& opt, Rng& rng) {
  PilotStage pilot = RunPilot(inst, opt.r, opt.pilot_tasks, rng);

  std::optional<TuningEstimate> tuning;
  double xi;
  if (opt.xi) {
    xi = *opt.xi;
  } else {
    tuning = Tune(pilot.similarity, rng);
    xi = 0.5 * (1.0 + tuning->nu_hat / opt.r);
  }
  ClusterAssignment clusters =
      SequentialClustering(pilot.responses, pilot.tasks, xi);

  const int d = opt.d.value_or(inst.d());
  std::vector<int> top = LargestClusters(clusters, d);
  if (static_cast<int>(top.size()) < d) {
    throw InfeasibleError("sequential clustering produced " +
                          std::to_string(top.size()) + " clusters, fewer than d = " +
                          std::to_string(d));
  }
  AssignmentPlan plan =
      BuildFromGroups(Groups(clusters, top), inst.m(), opt.l, pilot.tasks, rng);
  ResponseSet stage_two = SampleResponses(inst, plan.StageTwoAssignment(), rng);
  ResponseSet all = ResponseSet::Merge(pilot.responses, stage_two);
  TypeMatchResult types = MatchTypes(all, plan);
  LabelEstimate est =
      WeightedMajorityVote(all, ClusterWeights(plan, types.t_hat, 0.0));

  return PipelineResult{std::move(est), std::move(clusters), std::move(top),
                        std::move(types), std::move(plan), std::move(all),
                        std::move(pilot.similarity), std::move(tuning),
                        std::nullopt, 0.0, xi};
}

}  // namespace crowdsdp
