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

#include "crowdsdp/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "crowdsdp/error.h"

namespace crowdsdp {
namespace {

using internal::Require;

void ValidateProbabilityVector(const Eigen::VectorXd& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Require(std::isfinite(v[i]) && v[i] >= 0.0,
            std::string(name) + " has a negative entry");
  }
  Require(std::abs(v.sum() - 1.0) <= 1e-12,
          std::string(name) + " does not sum to 1");
}

std::vector<int> DrawTypes(const Eigen::VectorXd& prior, int count, Rng& rng) {
  std::vector<double> w(prior.data(), prior.data() + prior.size());
  std::discrete_distribution<int> dist(w.begin(), w.end());
  std::vector<int> types(count);
  for (int& t : types) t = dist(rng.engine());
  return types;
}

}  // namespace

ReliabilityMatrix::ReliabilityMatrix(Eigen::MatrixXd q) : q_(std::move(q)) {
  Require(q_.rows() >= 1 && q_.rows() == q_.cols(),
          "reliability matrix must be square and nonempty");
  for (Eigen::Index t = 0; t < q_.rows(); ++t) {
    for (Eigen::Index w = 0; w < q_.cols(); ++w) {
      double v = q_(t, w);
      Require(std::isfinite(v) && v >= 0.5 && v <= 1.0,
              "reliability entry (" + std::to_string(t) + ", " +
                  std::to_string(w) + ") outside [0.5, 1]");
    }
  }
}

TypePriors::TypePriors(Eigen::VectorXd mu, Eigen::VectorXd nu)
    : mu_(std::move(mu)), nu_(std::move(nu)) {
  Require(mu_.size() >= 1 && mu_.size() == nu_.size(),
          "type priors must have equal nonzero length");
  ValidateProbabilityVector(mu_, "mu");
  ValidateProbabilityVector(nu_, "nu");
}

TypePriors TypePriors::Uniform(int d) {
  Require(d >= 1, "d must be positive");
  Eigen::VectorXd u = Eigen::VectorXd::Constant(d, 1.0 / d);
  // Absorb rounding so the sum check is exact.
  u[d - 1] = 1.0 - u.head(d - 1).sum();
  return TypePriors(u, u);
}

Assignment FullAssignment(int m, int n) {
  Assignment a;
  a.reserve(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) a.push_back({i, j});
  }
  return a;
}

ModelInstance::ModelInstance(ReliabilityMatrix q, std::vector<int> labels,
                             std::vector<int> task_types,
                             std::vector<int> worker_types)
    : q_(std::move(q)),
      labels_(std::move(labels)),
      task_types_(std::move(task_types)),
      worker_types_(std::move(worker_types)) {
  Require(labels_.size() == task_types_.size(),
          "label vector length differs from number of tasks");
  for (int a : labels_) Require(a == 1 || a == -1, "labels must be +-1");
  for (int t : task_types_) Require(t >= 0 && t < q_.d(), "task type out of range");
  for (int w : worker_types_) {
    Require(w >= 0 && w < q_.d(), "worker type out of range");
  }
}

ResponseSet::ResponseSet(int m, int n, std::vector<Response> entries)
    : m_(m), n_(n) {
  Require(m >= 0 && n >= 0, "negative response-set dimensions");
  std::sort(entries.begin(), entries.end(),
            [](const Response& a, const Response& b) {
              return std::pair(a.task, a.worker) < std::pair(b.task, b.worker);
            });
  offsets_.assign(static_cast<std::size_t>(m) + 1, 0);
  cells_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Response& e = entries[k];
    Require(e.task >= 0 && e.task < m && e.worker >= 0 && e.worker < n,
            "response index out of range");
    Require(e.value == 1 || e.value == -1, "responses must be +-1");
    Require(k == 0 || entries[k - 1].task != e.task ||
                entries[k - 1].worker != e.worker,
            "duplicate response for (" + std::to_string(e.task) + ", " +
                std::to_string(e.worker) + ")");
    ++offsets_[e.task + 1];
    cells_.push_back({e.worker, e.value});
  }
  for (int i = 0; i < m; ++i) offsets_[i + 1] += offsets_[i];
}

int ResponseSet::operator()(int task, int worker) const {
  auto r = row(task);
  auto it = std::lower_bound(
      r.begin(), r.end(), worker,
      [](const WorkerResponse& c, int w) { return c.worker < w; });
  return (it != r.end() && it->worker == worker) ? it->value : 0;
}

bool ResponseSet::contains(int task, int worker) const {
  return (*this)(task, worker) != 0;
}

std::vector<Response> ResponseSet::entries() const {
  std::vector<Response> out;
  out.reserve(cells_.size());
  for (int i = 0; i < m_; ++i) {
    for (const WorkerResponse& c : row(i)) out.push_back({i, c.worker, c.value});
  }
  return out;
}

Assignment ResponseSet::assignment() const {
  Assignment out;
  out.reserve(cells_.size());
  for (int i = 0; i < m_; ++i) {
    for (const WorkerResponse& c : row(i)) out.push_back({i, c.worker});
  }
  return out;
}

ResponseSet ResponseSet::Merge(const ResponseSet& a, const ResponseSet& b) {
  Require(a.m() == b.m() && a.n() == b.n(), "response-set shapes differ");
  std::vector<Response> all = a.entries();
  std::vector<Response> rest = b.entries();
  all.insert(all.end(), rest.begin(), rest.end());
  return ResponseSet(a.m(), a.n(), std::move(all));
}

ReliabilityMatrix OriginalModel(int d, double p, double q) {
  Require(d >= 2, "original model needs d >= 2");
  Require(0.5 <= q && q < p && p < 1.0,
          "original model needs 1/2 <= q < p < 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(d, d, q);
  m.diagonal().setConstant(p);
  return ReliabilityMatrix(std::move(m));
}

ReliabilityMatrix SampleReliability(int d, double p_min, double q_max,
                                    Rng& rng) {
  Require(d >= 1, "d must be positive");
  Require(0.5 <= q_max && q_max < p_min && p_min <= 0.99,
          "sampling needs 1/2 <= q_max < p_min <= 0.99");
  Eigen::MatrixXd m(d, d);
  for (int t = 0; t < d; ++t) {
    for (int w = 0; w < d; ++w) {
      m(t, w) = t == w ? rng.Uniform(p_min, 0.99) : rng.Uniform(0.5, q_max);
    }
  }
  return ReliabilityMatrix(std::move(m));
}

Eigen::MatrixXd CollectiveQualityCorrelation(const ReliabilityMatrix& q,
                                             const TypePriors& priors) {
  Require(priors.d() == q.d(), "priors and reliability disagree on d");
  Eigen::MatrixXd centered =
      2.0 * q.matrix() - Eigen::MatrixXd::Ones(q.d(), q.d());
  return centered.transpose() * priors.mu().asDiagonal() * centered;
}

Eigen::MatrixXd AgreementMatrix(const ReliabilityMatrix& q,
                                const TypePriors& priors) {
  Require(priors.d() == q.d(), "priors and reliability disagree on d");
  const int d = q.d();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      for (int t = 0; t < d; ++t) {
        out(a, b) += priors.mu()[t] * (q(t, a) * q(t, b) +
                                       (1.0 - q(t, a)) * (1.0 - q(t, b)));
      }
    }
  }
  return out;
}

AssortativityReport Assortativity(const ReliabilityMatrix& q,
                                  const TypePriors& priors) {
  const int d = q.d();
  AssortativityReport rep;
  rep.phi = CollectiveQualityCorrelation(q, priors);
  rep.p_star = q.matrix().diagonal();
  rep.q_star = Eigen::VectorXd::Constant(
      d, -std::numeric_limits<double>::infinity());
  rep.weakly_assortative = true;
  for (int t = 0; t < d; ++t) {
    for (int w = 0; w < d; ++w) {
      if (w != t) rep.q_star[t] = std::max(rep.q_star[t], q(t, w));
    }
    if (!(rep.p_star[t] > rep.q_star[t])) rep.weakly_assortative = false;
  }
  rep.p_m = rep.phi.diagonal().minCoeff();
  rep.p_u = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      if (a != b) rep.p_u = std::max(rep.p_u, rep.phi(a, b));
    }
  }
  rep.strongly_assortative = rep.p_m > rep.p_u;
  return rep;
}

ModelInstance SampleInstance(const ReliabilityMatrix& q,
                             const TypePriors& priors, int m, int n, Rng& rng,
                             std::optional<std::vector<int>> labels) {
  Require(m >= 1 && n >= 1, "need at least one task and one worker");
  Require(priors.d() == q.d(), "priors and reliability disagree on d");
  Require(!labels || static_cast<int>(labels->size()) == m,
          "label vector length differs from m");
  std::vector<int> t = DrawTypes(priors.mu(), m, rng);
  std::vector<int> w = DrawTypes(priors.nu(), n, rng);
  std::vector<int> a;
  if (labels) {
    a = std::move(*labels);
  } else {
    a.resize(m);
    for (int& x : a) x = rng.Bernoulli(0.5) ? 1 : -1;
  }
  return ModelInstance(q, std::move(a), std::move(t), std::move(w));
}

ModelInstance SampleInstanceWithWorkers(const ReliabilityMatrix& q,
                                        const TypePriors& priors, int m,
                                        std::vector<int> worker_types,
                                        Rng& rng) {
  Require(m >= 1 && !worker_types.empty(),
          "need at least one task and one worker");
  Require(priors.d() == q.d(), "priors and reliability disagree on d");
  std::vector<int> t = DrawTypes(priors.mu(), m, rng);
  std::vector<int> a(m);
  for (int& x : a) x = rng.Bernoulli(0.5) ? 1 : -1;
  return ModelInstance(q, std::move(a), std::move(t), std::move(worker_types));
}

std::vector<int> PlantedWorkerTypes(int n, int d, Rng& rng) {
  Require(d >= 1 && n >= d && n % d == 0,
          "planted clusters need d dividing n");
  std::vector<int> w(n);
  for (int j = 0; j < n; ++j) w[j] = j / (n / d);
  std::shuffle(w.begin(), w.end(), rng.engine());
  return w;
}

ResponseSet SampleResponses(const ModelInstance& inst,
                            const Assignment& assignment, Rng& rng) {
  std::vector<Response> entries;
  entries.reserve(assignment.size());
  for (const TaskWorker& tw : assignment) {
    Require(tw.task >= 0 && tw.task < inst.m() && tw.worker >= 0 &&
                tw.worker < inst.n(),
            "assignment index out of range");
    const int a = inst.labels()[tw.task];
    const bool correct = rng.Bernoulli(inst.fidelity(tw.task, tw.worker));
    entries.push_back({tw.task, tw.worker, correct ? a : -a});
  }
  return ResponseSet(inst.m(), inst.n(), std::move(entries));
}

}  // namespace crowdsdp
