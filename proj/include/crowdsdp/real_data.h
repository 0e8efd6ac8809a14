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

// Labelled crowdsourcing data on disk and empirical reliability estimation.
//
// A dataset directory holds four CSV files with header rows:
//   responses.csv   task_id,worker_id,answer   (answer is -1 or +1)
//   truth.csv       task_id,label
//   task_types.csv  task_id,type               (0-based)
//   pilots.csv      task_id,is_pilot           (0 or 1; optional)

#ifndef CROWDSDP_REAL_DATA_H_
#define CROWDSDP_REAL_DATA_H_

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "crowdsdp/model.h"
#include "crowdsdp/rng.h"

namespace crowdsdp {

struct RealDataset {
  ResponseSet responses{0, 0};
  std::vector<int> truth;       // +-1 per task
  std::vector<int> task_types;  // per task
  std::vector<bool> is_pilot;   // per task
};

// Paths may be empty for pilots. Throws ValidationError on duplicate
// (task, worker) pairs, unknown ids or tasks missing truth or type.
RealDataset LoadDataset(const std::string& responses_path,
                        const std::string& truth_path,
                        const std::string& types_path,
                        const std::string& pilots_path = "");
RealDataset LoadDatasetDir(const std::string& dir);
void SaveDatasetDir(const RealDataset& data, const std::string& dir);

// The first `pilots` tasks go to every worker; each worker also answers
// `tasks_per_worker` distinct non-pilot tasks drawn uniformly.
RealDataset SimulateDataset(const ModelInstance& inst, int pilots,
                            int tasks_per_worker, Rng& rng);

struct EmpiricalReliability {
  // rates(j, t): fraction of worker j's answers on type-t tasks that are
  // correct. NaN when worker j answered no type-t task.
  Eigen::MatrixXd rates;
  // argmax_t rates(j, t), lowest t on ties; -1 when no rate is defined.
  std::vector<int> worker_types;
  // q_hat(t, w): mean of rates(j, t) over workers j of type w with a defined
  // rate. NaN when no such worker exists. May fall below 1/2.
  Eigen::MatrixXd q_hat;
  std::vector<std::pair<int, int>> undefined_cells;  // (worker, type)
  std::vector<std::pair<int, int>> below_half;       // (t, w) of q_hat
};

EmpiricalReliability EstimateReliability(const RealDataset& data, int d);

}  // namespace crowdsdp

#endif  // CROWDSDP_REAL_DATA_H_
