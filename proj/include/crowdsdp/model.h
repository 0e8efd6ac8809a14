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

// The d-type worker-task specialization model: reliability matrices, type
// priors, sampled instances and the sparse response matrix.

#ifndef CROWDSDP_MODEL_H_
#define CROWDSDP_MODEL_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crowdsdp/rng.h"

namespace crowdsdp {

// Q(t, w): probability that a worker of type w answers a task of type t
// correctly. Rows are task types, columns are worker types. Every entry lies
// in [1/2, 1].
class ReliabilityMatrix {
 public:
  explicit ReliabilityMatrix(Eigen::MatrixXd q);

  int d() const { return static_cast<int>(q_.rows()); }
  double operator()(int task_type, int worker_type) const {
    return q_(task_type, worker_type);
  }
  const Eigen::MatrixXd& matrix() const { return q_; }
  double max_entry() const { return q_.maxCoeff(); }

  friend bool operator==(const ReliabilityMatrix& a,
                         const ReliabilityMatrix& b) {
    return a.q_ == b.q_;
  }

 private:
  Eigen::MatrixXd q_;
};

// Product priors over task types (mu) and worker types (nu).
class TypePriors {
 public:
  TypePriors(Eigen::VectorXd mu, Eigen::VectorXd nu);
  static TypePriors Uniform(int d);

  int d() const { return static_cast<int>(mu_.size()); }
  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::VectorXd& nu() const { return nu_; }

 private:
  Eigen::VectorXd mu_;
  Eigen::VectorXd nu_;
};

struct TaskWorker {
  int task;
  int worker;
  friend auto operator<=>(const TaskWorker&, const TaskWorker&) = default;
};

// A worker-task assignment set, as a list of distinct pairs.
using Assignment = std::vector<TaskWorker>;

Assignment FullAssignment(int m, int n);

// Ground truth of one draw from the model. Fidelities are derived from the
// types on demand and never stored.
class ModelInstance {
 public:
  ModelInstance(ReliabilityMatrix q, std::vector<int> labels,
                std::vector<int> task_types, std::vector<int> worker_types);

  int m() const { return static_cast<int>(labels_.size()); }
  int n() const { return static_cast<int>(worker_types_.size()); }
  int d() const { return q_.d(); }
  const ReliabilityMatrix& reliability() const { return q_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& task_types() const { return task_types_; }
  const std::vector<int>& worker_types() const { return worker_types_; }

  double fidelity(int task, int worker) const {
    return q_(task_types_[task], worker_types_[worker]);
  }

 private:
  ReliabilityMatrix q_;
  std::vector<int> labels_;
  std::vector<int> task_types_;
  std::vector<int> worker_types_;
};

struct WorkerResponse {
  int worker;
  int value;  // -1 or +1
};

struct Response {
  int task;
  int worker;
  int value;  // -1 or +1
};

// Sparse m x n response matrix over {-1, 0, +1}. Entries exist exactly on the
// assignment set; every other cell reads as 0.
class ResponseSet {
 public:
  ResponseSet(int m, int n) : ResponseSet(m, n, {}) {}
  ResponseSet(int m, int n, std::vector<Response> entries);

  int m() const { return m_; }
  int n() const { return n_; }
  std::size_t size() const { return cells_.size(); }

  // M_ij, or 0 when (i, j) was not queried.
  int operator()(int task, int worker) const;
  bool contains(int task, int worker) const;

  // Responses to task i, sorted by worker id.
  std::span<const WorkerResponse> row(int task) const {
    return {cells_.data() + offsets_[task],
            cells_.data() + offsets_[task + 1]};
  }

  std::vector<Response> entries() const;
  Assignment assignment() const;

  // Union of two response sets over disjoint assignments.
  static ResponseSet Merge(const ResponseSet& a, const ResponseSet& b);

 private:
  int m_;
  int n_;
  std::vector<std::size_t> offsets_;
  std::vector<WorkerResponse> cells_;
};

struct AssortativityReport {
  Eigen::VectorXd p_star;  // Q(t, t)
  Eigen::VectorXd q_star;  // max_{w != t} Q(t, w)
  Eigen::MatrixXd phi;     // collective quality correlation matrix
  double p_m = 0.0;        // min diagonal of phi
  double p_u = 0.0;        // max off-diagonal of phi
  bool weakly_assortative = false;
  bool strongly_assortative = false;
};

// Q = q * ones + (p - q) * I. Requires 1/2 <= q < p < 1 and d >= 2.
ReliabilityMatrix OriginalModel(int d, double p, double q);

// Diagonal ~ U[p_min, 0.99], off-diagonal ~ U[1/2, q_max].
ReliabilityMatrix SampleReliability(int d, double p_min, double q_max,
                                    Rng& rng);

// Phi(a, b) = sum_t mu(t) (2Q(t,a) - 1)(2Q(t,b) - 1).
Eigen::MatrixXd CollectiveQualityCorrelation(const ReliabilityMatrix& q,
                                             const TypePriors& priors);

// Lambda(w, w') = sum_t mu(t) [Q(t,w)Q(t,w') + (1-Q(t,w))(1-Q(t,w'))], the
// probability that two workers of types w and w' agree on a random task.
Eigen::MatrixXd AgreementMatrix(const ReliabilityMatrix& q,
                                const TypePriors& priors);

AssortativityReport Assortativity(const ReliabilityMatrix& q,
                                  const TypePriors& priors);

// Draws t ~ mu^m, w ~ nu^n and, unless given, labels uniform on {-1, +1}.
ModelInstance SampleInstance(const ReliabilityMatrix& q,
                             const TypePriors& priors, int m, int n, Rng& rng,
                             std::optional<std::vector<int>> labels = {});

// Same as SampleInstance but with worker types supplied by the caller.
ModelInstance SampleInstanceWithWorkers(const ReliabilityMatrix& q,
                                        const TypePriors& priors, int m,
                                        std::vector<int> worker_types,
                                        Rng& rng);

// n workers split into d equal-sized type groups in random order. Requires d
// to divide n.
std::vector<int> PlantedWorkerTypes(int n, int d, Rng& rng);

// M_ij = a_i with probability F_ij and -a_i otherwise, independently over the
// assignment.
ResponseSet SampleResponses(const ModelInstance& inst,
                            const Assignment& assignment, Rng& rng);

}  // namespace crowdsdp

#endif  // CROWDSDP_MODEL_H_
