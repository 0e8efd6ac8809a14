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

#include "crowdsdp/kmedoids.h"

#include <algorithm>
#include <limits>
#include <string>

#include "crowdsdp/error.h"

namespace crowdsdp {
namespace {

using internal::Require;

// Uniform pick among indices whose score is within a relative 1e-12 of the
// best one.
int ArgmaxWithTies(const std::vector<double>& score, Rng& rng) {
  double best = *std::max_element(score.begin(), score.end());
  double slack = 1e-12 * std::max(1.0, std::abs(best));
  std::vector<int> ties;
  for (int i = 0; i < static_cast<int>(score.size()); ++i) {
    if (score[i] >= best - slack) ties.push_back(i);
  }
  return ties.size() == 1 ? ties[0]
                          : ties[rng.UniformInt(0, static_cast<int>(ties.size()) - 1)];
}

}  // namespace

ClusterAssignment::ClusterAssignment(std::vector<int> labels, int k,
                                     std::vector<int> medoids)
    : labels_(std::move(labels)), k_(k), medoids_(std::move(medoids)) {
  Require(k >= 1, "cluster count must be positive");
  std::vector<int> sizes(k, 0);
  for (int z : labels_) {
    Require(z >= 0 && z < k, "cluster label out of range");
    ++sizes[z];
  }
  for (int z = 0; z < k; ++z) {
    Require(sizes[z] > 0, "cluster " + std::to_string(z) + " is empty");
  }
  Require(medoids_.empty() || static_cast<int>(medoids_.size()) == k,
          "one medoid per cluster expected");
}

std::vector<int> ClusterAssignment::Members(int cluster) const {
  std::vector<int> out;
  for (int j = 0; j < n(); ++j) {
    if (labels_[j] == cluster) out.push_back(j);
  }
  return out;
}

std::vector<int> ClusterAssignment::Sizes() const {
  std::vector<int> sizes(k_, 0);
  for (int z : labels_) ++sizes[z];
  return sizes;
}

KMedoidsResult KMedoidsRows(const Eigen::MatrixXd& x, int k, Rng& rng,
                            int max_rounds) {
  const int n = static_cast<int>(x.rows());
  Require(k >= 1 && k <= n, "k-medoids needs 1 <= k <= n");

  // Pairwise row distances; n is at most a few hundred.
  Eigen::MatrixXd dist(n, n);
  for (int a = 0; a < n; ++a) {
    dist(a, a) = 0.0;
    for (int b = a + 1; b < n; ++b) {
      dist(a, b) = dist(b, a) = (x.row(a) - x.row(b)).norm();
    }
  }

  std::vector<int> medoids;
  {
    std::vector<double> norms(n);
    for (int a = 0; a < n; ++a) norms[a] = x.row(a).norm();
    medoids.push_back(ArgmaxWithTies(norms, rng));
  }
  std::vector<double> nearest(n);
  for (int a = 0; a < n; ++a) nearest[a] = dist(a, medoids[0]);
  while (static_cast<int>(medoids.size()) < k) {
    std::vector<double> score = nearest;
    for (int m : medoids) score[m] = -1.0;  // never re-pick a medoid
    int next = ArgmaxWithTies(score, rng);
    medoids.push_back(next);
    for (int a = 0; a < n; ++a) nearest[a] = std::min(nearest[a], dist(a, next));
  }

  std::vector<int> labels(n, 0);
  auto assign = [&]() {
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
      int best = 0;
      for (int z = 1; z < k; ++z) {
        if (dist(a, medoids[z]) < dist(a, medoids[best])) best = z;
      }
      labels[a] = best;
      total += dist(a, medoids[best]);
    }
    // A medoid always keeps itself, so no cluster can go empty even when two
    // medoid rows coincide.
    for (int z = 0; z < k; ++z) labels[medoids[z]] = z;
    return total;
  };

  KMedoidsResult result{ClusterAssignment(std::vector<int>(n, 0), 1), {}};
  result.objective_trace.push_back(assign());
  for (int round = 0; round < max_rounds; ++round) {
    bool changed = false;
    for (int z = 0; z < k; ++z) {
      double best_cost = 0.0;
      for (int a = 0; a < n; ++a) {
        if (labels[a] == z) best_cost += dist(a, medoids[z]);
      }
      for (int c = 0; c < n; ++c) {
        if (labels[c] != z || c == medoids[z]) continue;
        double cost = 0.0;
        for (int a = 0; a < n; ++a) {
          if (labels[a] == z) cost += dist(a, c);
        }
        if (cost < best_cost - 1e-12) {
          best_cost = cost;
          medoids[z] = c;
          changed = true;
        }
      }
    }
    if (!changed) break;
    result.objective_trace.push_back(assign());
  }
  result.clusters = ClusterAssignment(labels, k, medoids);
  return result;
}

}  // namespace crowdsdp
