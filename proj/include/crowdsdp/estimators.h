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

#ifndef CROWDSDP_ESTIMATORS_H_
#define CROWDSDP_ESTIMATORS_H_

#include <vector>

#include "crowdsdp/model.h"

namespace crowdsdp {

// sign(0) resolves to +1. Empty tasks are ties.
inline int SignWithTieBreak(double x) { return x < 0.0 ? -1 : +1; }

struct LabelEstimate {
  std::vector<int> labels;         // +-1 per task
  std::vector<double> margins;     // aggregation sum before the sign

  int m() const { return static_cast<int>(labels.size()); }

  // Margins are diagnostics and do not take part in equality.
  friend bool operator==(const LabelEstimate& a, const LabelEstimate& b) {
    return a.labels == b.labels;
  }
};

// Nonnegative weights mu_ij on an assignment set.
class WeightScheme {
 public:
  explicit WeightScheme(int m) : rows_(m) {}

  // Adds or overwrites the weight of (task, worker).
  void Set(int task, int worker, double weight);
  double Get(int task, int worker) const;  // 0 when absent

  int m() const { return static_cast<int>(rows_.size()); }
  const std::vector<std::pair<int, double>>& row(int task) const {
    return rows_[task];
  }

 private:
  std::vector<std::vector<std::pair<int, double>>> rows_;
};

LabelEstimate MajorityVote(const ResponseSet& responses);

// Throws ValidationError if a weight sits outside the assignment set or is
// negative.
LabelEstimate WeightedMajorityVote(const ResponseSet& responses,
                                   const WeightScheme& weights);

// Weighted vote with log-odds weights log(F/(1-F)) from the true fidelity,
// F clamped to [1e-9, 1 - 1e-9].
LabelEstimate MlOracle(const ResponseSet& responses, const ModelInstance& inst);

}  // namespace crowdsdp

#endif  // CROWDSDP_ESTIMATORS_H_
