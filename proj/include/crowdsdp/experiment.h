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

// Seeded Monte Carlo sweeps: configuration, per-trial execution, JSON-lines
// records, aggregate tables and theory curves.

#ifndef CROWDSDP_EXPERIMENT_H_
#define CROWDSDP_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crowdsdp/metrics.h"
#include "crowdsdp/model.h"
#include "crowdsdp/pipeline.h"
#include "crowdsdp/rng.h"
#include "crowdsdp/sdp.h"

namespace crowdsdp {

// Keys that may be swept, in grid order (the last key varies fastest).
const std::vector<std::string>& SweepKeys();

struct ExperimentConfig {
  std::string name = "experiment";

  // model block
  std::string reliability = "sampled";  // sampled | original | explicit
  std::optional<Eigen::MatrixXd> q_matrix;
  std::string q_path;                   // CSV, resolved at load
  std::optional<Eigen::VectorXd> mu;
  std::optional<Eigen::VectorXd> nu_prior;
  std::string workers = "random";       // random | planted
  std::string resample = "trial";       // trial | grid

  // algorithm block
  std::vector<std::string> estimators = {"alg1", "ss", "mv", "ml"};
  bool pilot_scored = false;
  double c2 = 0.1;
  SdpConfig sdp;

  // Every sweepable scalar, as text. A singleton list is a fixed value.
  std::map<std::string, std::vector<std::string>> axes;

  // sweep block
  int trials = 15;
  std::uint64_t master_seed = 1;

  // output block
  std::string out_dir = "out";
  std::string jsonl = "trials.jsonl";
  std::string aggregate = "aggregate.csv";
  std::string theory = "theory.csv";
  std::vector<double> alphas = {0.05};

  ExperimentConfig();
  void Validate() const;
};

// Throws ValidationError on malformed or inconsistent input. Relative paths
// inside the file resolve against the file's directory.
ExperimentConfig LoadConfig(const std::string& path);
ExperimentConfig ParseConfig(const std::string& yaml_text,
                             const std::string& base_dir = ".");
std::string SerializeConfig(const ExperimentConfig& cfg);

// One point of the sweep grid with typed values.
struct GridPoint {
  int index = 0;
  std::map<std::string, std::string> values;
  int d = 0;
  int m = 0;
  int n = 0;
  double p_min = 0.0;
  double q_max = 0.0;
  double p = 0.0;
  double q = 0.0;
  std::string r;   // integer or "lemma1"
  int l = 0;
  std::string nu;  // oracle | auto | low | mid | high | number
  std::string xi;  // oracle | auto | number
};

std::vector<GridPoint> ExpandGrid(const ExperimentConfig& cfg);
std::string ConfigId(const ExperimentConfig& cfg, const GridPoint& g);

// Constraint residuals of an SDP iterate.
struct SdpFeasibility {
  double min_eigenvalue = 0.0;
  double trace_error = 0.0;    // |tr X - n|
  double box_violation = 0.0;  // max distance of an entry outside [0, 1]
};
SdpFeasibility CheckSdpFeasibility(const Eigen::MatrixXd& x);

struct EstimatorOutcome {
  std::string estimator;
  bool ok = false;
  std::string error;
  MetricsRecord metrics;
  // Diagnostics; empty when not applicable.
  std::optional<int> d_hat;
  std::optional<double> s_hat;
  std::optional<double> nu;
  std::optional<double> xi;
  std::optional<int> clusters_found;
  std::optional<bool> sdp_converged;
  std::optional<int> sdp_iterations;
  std::optional<double> sdp_primal_residual;
  std::optional<double> sdp_dual_residual;
  std::optional<SdpFeasibility> sdp_feasibility;
  // Full pipeline output, kept only on request.
  std::shared_ptr<const PipelineResult> detail;
};

struct TrialRecord {
  int grid_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string config_id;
  std::vector<EstimatorOutcome> outcomes;
};

// Runs every configured estimator on one shared instance.
TrialRecord RunTrial(const ExperimentConfig& cfg, const GridPoint& g,
                     int trial, bool keep_details = false);

// All grid points x trials, ordered by (grid index, trial), independent of
// the number of worker threads.
std::vector<TrialRecord> RunSweep(const ExperimentConfig& cfg, int jobs = 1);

void WriteJsonl(std::ostream& out, const std::vector<TrialRecord>& records);

// One row per (grid point, estimator): success counts, mean and standard
// error of every metric.
void WriteAggregateCsv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<TrialRecord>& records);

struct AggregateCell {
  int count = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};
// Mean and standard error of one metric for one (grid point, estimator).
// Metric names as in the JSON records.
AggregateCell Aggregate(const std::vector<TrialRecord>& records,
                        int grid_index, const std::string& estimator,
                        const std::string& metric);

// The reliability matrix of a grid point. Sampled matrices come from the
// given stream.
ReliabilityMatrix GridReliability(const ExperimentConfig& cfg,
                                  const GridPoint& g, Rng& rng);
TypePriors GridPriors(const ExperimentConfig& cfg, int d);

// Required queries per task for every bound kind, per grid point and alpha.
void EmitTheoryCurves(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace crowdsdp

#endif  // CROWDSDP_EXPERIMENT_H_
