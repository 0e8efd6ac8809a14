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

#include "crowdsdp/metrics.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "crowdsdp/error.h"

namespace crowdsdp {
namespace {

using internal::Require;
using Cost = std::vector<std::vector<std::int64_t>>;

// Hungarian method with potentials, O(n^3). Returns the optimal cost and the
// column chosen for each row.
std::int64_t Hungarian(const Cost& a, std::vector<int>* column_of_row) {
  const int n = static_cast<int>(a.size());
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = a[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  column_of_row->assign(n, -1);
  std::int64_t total = 0;
  for (int j = 1; j <= n; ++j) {
    (*column_of_row)[p[j] - 1] = j - 1;
    total += a[p[j] - 1][j - 1];
  }
  return total;
}

Cost Submatrix(const Cost& a, const std::vector<int>& rows,
               const std::vector<int>& cols) {
  Cost out(rows.size(), std::vector<std::int64_t>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out[r][c] = a[rows[r]][cols[c]];
  }
  return out;
}

std::vector<int> MatchToTypes(const ClusterAssignment& est,
                              const std::vector<int>& truth,
                              const std::vector<int>& clusters, int d,
                              int* mismatches) {
  const int k = static_cast<int>(clusters.size());
  std::vector<int> slot(est.k(), -1);
  for (int z = 0; z < k; ++z) slot[clusters[z]] = z;
  // Rows: clusters (padded to d); columns: types. Cost counts members of the
  // cluster whose true type differs.
  Cost cost(d, std::vector<std::int64_t>(d, 0));
  std::vector<std::int64_t> size(d, 0);
  std::vector<std::vector<std::int64_t>> hits(d, std::vector<std::int64_t>(d, 0));
  for (int j = 0; j < est.n(); ++j) {
    const int z = slot[est[j]];
    if (z < 0) continue;
    Require(truth[j] >= 0 && truth[j] < d, "true type out of range");
    ++size[z];
    ++hits[z][truth[j]];
  }
  for (int z = 0; z < d; ++z) {
    for (int t = 0; t < d; ++t) cost[z][t] = size[z] - hits[z][t];
  }
  AssignmentSolution sol = SolveAssignment(cost);
  *mismatches = static_cast<int>(sol.cost);
  sol.column_of_row.resize(k);
  return sol.column_of_row;
}

}  // namespace

AssignmentSolution SolveAssignment(const Cost& cost) {
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost) {
    Require(static_cast<int>(row.size()) == n, "cost matrix must be square");
  }
  AssignmentSolution out;
  if (n == 0) return out;
  std::vector<int> scratch;
  const std::int64_t best = Hungarian(cost, &scratch);
  out.cost = best;
  out.column_of_row.assign(n, -1);

  std::vector<int> free_cols(n);
  std::iota(free_cols.begin(), free_cols.end(), 0);
  std::int64_t fixed = 0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> rest_rows;
    for (int r = i + 1; r < n; ++r) rest_rows.push_back(r);
    for (std::size_t c = 0; c < free_cols.size(); ++c) {
      const int col = free_cols[c];
      std::vector<int> rest_cols = free_cols;
      rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(c));
      std::int64_t rest = 0;
      if (!rest_rows.empty()) {
        rest = Hungarian(Submatrix(cost, rest_rows, rest_cols), &scratch);
      }
      if (fixed + cost[i][col] + rest == best) {
        out.column_of_row[i] = col;
        fixed += cost[i][col];
        free_cols = std::move(rest_cols);
        break;
      }
    }
  }
  return out;
}

double LabelError(const LabelEstimate& est, const std::vector<int>& truth) {
  Require(est.labels.size() == truth.size(), "label count mismatch");
  Require(!truth.empty(), "no tasks to score");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (est.labels[i] != truth[i]) ++wrong;
  }
  return static_cast<double>(wrong) / truth.size();
}

double LabelError(const LabelEstimate& est, const std::vector<int>& truth,
                  const std::vector<int>& tasks) {
  Require(est.labels.size() == truth.size(), "label count mismatch");
  Require(!tasks.empty(), "no tasks to score");
  std::size_t wrong = 0;
  for (int i : tasks) {
    Require(i >= 0 && i < static_cast<int>(truth.size()), "task out of range");
    if (est.labels[i] != truth[i]) ++wrong;
  }
  return static_cast<double>(wrong) / tasks.size();
}

ClusteringMatch ClusteringError(const ClusterAssignment& est,
                                const std::vector<int>& truth, int d) {
  Require(est.k() == d, "clustering error needs exactly d clusters");
  Require(static_cast<int>(truth.size()) == est.n(), "worker count mismatch");
  std::vector<int> all(d);
  std::iota(all.begin(), all.end(), 0);
  int mismatches = 0;
  ClusteringMatch out;
  out.type_of_cluster = MatchToTypes(est, truth, all, d, &mismatches);
  out.error = static_cast<double>(mismatches) / est.n();
  return out;
}

std::vector<int> LargestClusters(const ClusterAssignment& est, int count) {
  Require(count >= 0, "count must be nonnegative");
  std::vector<int> sizes = est.Sizes();
  std::vector<int> ids(est.k());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(),
                   [&](int a, int b) { return sizes[a] > sizes[b]; });
  if (static_cast<int>(ids.size()) > count) ids.resize(count);
  return ids;
}

SubsetClusteringErrors SsClusteringErrors(const ClusterAssignment& est,
                                          const std::vector<int>& truth,
                                          int d) {
  Require(d >= 1, "d must be positive");
  Require(static_cast<int>(truth.size()) == est.n(), "worker count mismatch");
  SubsetClusteringErrors out;
  out.top_clusters = LargestClusters(est, d);
  std::vector<int> sizes = est.Sizes();
  for (int z : out.top_clusters) out.union_size += sizes[z];
  int mismatches = 0;
  out.type_of_top = MatchToTypes(est, truth, out.top_clusters, d, &mismatches);
  const int outside = est.n() - out.union_size;
  out.inclusive = static_cast<double>(mismatches + outside) / est.n();
  out.restricted = out.union_size == 0
                       ? 0.0
                       : static_cast<double>(mismatches) / out.union_size;
  return out;
}

double TypeMatchError(const std::vector<int>& t_hat,
                      const std::vector<int>& truth,
                      const std::vector<int>& alignment) {
  Require(t_hat.size() == truth.size(), "task count mismatch");
  Require(!truth.empty(), "no tasks to score");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    int t = t_hat[i];
    if (!alignment.empty()) {
      Require(t >= 0 && t < static_cast<int>(alignment.size()),
              "estimated type out of range");
      t = alignment[t];
    }
    if (t != truth[i]) ++wrong;
  }
  return static_cast<double>(wrong) / truth.size();
}

}  // namespace crowdsdp
