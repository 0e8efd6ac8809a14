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

#include "crowdsdp/estimators.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "crowdsdp/error.h"

namespace crowdsdp {

void WeightScheme::Set(int task, int worker, double weight) {
  internal::Require(task >= 0 && task < m(), "weight task out of range");
  internal::Require(std::isfinite(weight) && weight >= 0.0,
                    "weights must be finite and nonnegative");
  auto& r = rows_[task];
  auto it = std::find_if(r.begin(), r.end(),
                         [&](const auto& e) { return e.first == worker; });
  if (it != r.end()) {
    it->second = weight;
  } else {
    r.emplace_back(worker, weight);
  }
}

double WeightScheme::Get(int task, int worker) const {
  for (const auto& [j, w] : rows_[task]) {
    if (j == worker) return w;
  }
  return 0.0;
}

LabelEstimate MajorityVote(const ResponseSet& responses) {
  LabelEstimate est;
  est.labels.resize(responses.m());
  est.margins.resize(responses.m());
  for (int i = 0; i < responses.m(); ++i) {
    double sum = 0.0;
    for (const WorkerResponse& c : responses.row(i)) sum += c.value;
    est.margins[i] = sum;
    est.labels[i] = SignWithTieBreak(sum);
  }
  return est;
}

LabelEstimate WeightedMajorityVote(const ResponseSet& responses,
                                   const WeightScheme& weights) {
  internal::Require(weights.m() == responses.m(),
                    "weight scheme and responses disagree on m");
  LabelEstimate est;
  est.labels.resize(responses.m());
  est.margins.resize(responses.m());
  for (int i = 0; i < responses.m(); ++i) {
    double sum = 0.0;
    for (const auto& [j, w] : weights.row(i)) {
      const int v = responses(i, j);
      if (v == 0) {
        throw ValidationError("weight on unassigned pair (" +
                              std::to_string(i) + ", " + std::to_string(j) +
                              ")");
      }
      sum += w * v;
    }
    est.margins[i] = sum;
    est.labels[i] = SignWithTieBreak(sum);
  }
  return est;
}

LabelEstimate MlOracle(const ResponseSet& responses,
                       const ModelInstance& inst) {
  internal::Require(inst.m() == responses.m() && inst.n() == responses.n(),
                    "instance and responses disagree on dimensions");
  constexpr double kClamp = 1e-9;
  LabelEstimate est;
  est.labels.resize(responses.m());
  est.margins.resize(responses.m());
  std::map<double, int> net;
  for (int i = 0; i < responses.m(); ++i) {
    // Net votes per distinct fidelity, so equal-weight answers cancel
    // exactly.
    net.clear();
    for (const WorkerResponse& c : responses.row(i)) {
      net[inst.fidelity(i, c.worker)] += c.value;
    }
    double sum = 0.0;
    for (const auto& [f, votes] : net) {
      if (votes == 0) continue;
      double g = std::clamp(f, kClamp, 1.0 - kClamp);
      sum += std::max(0.0, std::log(g / (1.0 - g))) * votes;
    }
    est.margins[i] = sum;
    est.labels[i] = SignWithTieBreak(sum);
  }
  return est;
}

}  // namespace crowdsdp
