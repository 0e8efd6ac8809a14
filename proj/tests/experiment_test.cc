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


#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "crowdsdp/bounds.h"
#include "crowdsdp/csv_io.h"
#include "crowdsdp/error.h"
#include "crowdsdp/experiment.h"
#include "doctest.h"
#include "json.hpp"

namespace crowdsdp {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const char* kSmall = R"(
name: small
model:
  reliability: original
  d: 3
  m: 120
  n: 30
  p: 0.9
  q: 0.5
  workers: planted
algorithm:
  estimators: [alg1, ss, mv, ml]
  r: 60
  l: 2
  nu: oracle
  xi: oracle
sweep:
  q: [0.5, 0.6]
  trials: 3
  master_seed: 7
)";

std::string Jsonl(const std::vector<TrialRecord>& recs) {
  std::ostringstream s;
  WriteJsonl(s, recs);
  return s.str();
}

TEST_CASE("config defaults and parsed values") {
  ExperimentConfig def = ParseConfig("name: x\n");
  CHECK(def.trials == 15);
  CHECK(def.c2 == 0.1);
  CHECK(def.reliability == "sampled");
  CHECK(def.axes.at("r") == std::vector<std::string>{"120"});

  ExperimentConfig cfg = ParseConfig(kSmall);
  CHECK(cfg.name == "small");
  CHECK(cfg.reliability == "original");
  CHECK(cfg.workers == "planted");
  CHECK(cfg.trials == 3);
  CHECK(cfg.master_seed == 7u);
  CHECK(cfg.axes.at("q") == std::vector<std::string>{"0.5", "0.6"});
  CHECK(cfg.axes.at("l") == std::vector<std::string>{"2"});
}

TEST_CASE("serialize then parse is a fixed point") {
  ExperimentConfig cfg = ParseConfig(kSmall);
  cfg.sdp.relaxation = 1.4;
  cfg.sdp.max_iters = 321;
  cfg.alphas = {0.05, 0.1};
  Eigen::VectorXd mu(3);
  mu << 0.2, 0.3, 0.5;
  cfg.mu = mu;
  const std::string text = SerializeConfig(cfg);
  ExperimentConfig back = ParseConfig(text);
  CHECK(SerializeConfig(back) == text);
  CHECK(back.sdp.relaxation == 1.4);
  CHECK(back.sdp.max_iters == 321);
  CHECK(back.axes == cfg.axes);
  REQUIRE(back.mu.has_value());
  CHECK(*back.mu == mu);
  CHECK(back.alphas == cfg.alphas);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ParseConfig("bogus: 1\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("model:\n  dd: 3\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("algorithm:\n  sdp:\n    tau: 1\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("sweep:\n  zeta: [1]\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("output:\n  file: x\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("model:\n  reliability: magic\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("algorithm:\n  estimators: [mv, oracle]\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("model:\n  d: three\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("algorithm:\n  sdp:\n    relaxation: 2.5\n"), ValidationError);
  CHECK_THROWS_AS(ParseConfig("model:\n  reliability: explicit\n"), ValidationError);

  CHECK_THROWS_AS(ExpandGrid(ParseConfig("algorithm:\n  nu: sometimes\n")), ValidationError);
  CHECK_THROWS_AS(ExpandGrid(ParseConfig("algorithm:\n  xi: 1.5\n")), ValidationError);
  CHECK_THROWS_AS(ExpandGrid(ParseConfig("model:\n  n: 2\n")), ValidationError);
  CHECK_THROWS_AS(
      ExpandGrid(ParseConfig("model:\n  workers: planted\n  d: 4\n  n: 30\n")),
      ValidationError);
}

TEST_CASE("grid expansion order") {
  ExperimentConfig cfg = ParseConfig(
      "sweep:\n  q_max: [0.5, 0.6, 0.7]\n  l: [1, 2]\n  nu: [low, 3.5]\n");
  std::vector<GridPoint> grid = ExpandGrid(cfg);
  REQUIRE(grid.size() == 12u);
  // The last sweep key varies fastest.
  int idx = 0;
  for (double qm : {0.5, 0.6, 0.7}) {
    for (int l : {1, 2}) {
      for (const char* nu : {"low", "3.5"}) {
        CHECK(grid[idx].index == idx);
        CHECK(grid[idx].q_max == qm);
        CHECK(grid[idx].l == l);
        CHECK(grid[idx].nu == nu);
        CHECK(grid[idx].d == 3);
        CHECK(ConfigId(cfg, grid[idx]) == "experiment/" + std::to_string(idx));
        ++idx;
      }
    }
  }
}

TEST_CASE("explicit reliability sets d") {
  ExperimentConfig cfg = ParseConfig(
      "model:\n  reliability: explicit\n  q_matrix: [[0.9, 0.6], [0.55, 0.8]]\n");
  std::vector<GridPoint> grid = ExpandGrid(cfg);
  REQUIRE(grid.size() == 1u);
  CHECK(grid[0].d == 2);
  Rng rng(1);
  CHECK(GridReliability(cfg, grid[0], rng)(1, 0) == 0.55);
  cfg.mu = Eigen::VectorXd::Constant(2, 0.5);
  CHECK(GridPriors(cfg, 2).mu() == *cfg.mu);
  CHECK_THROWS_AS(GridPriors(cfg, 3), ValidationError);
}

TEST_CASE("sweeps are reproducible and independent of thread count") {
  ExperimentConfig cfg = ParseConfig(kSmall);
  const std::vector<TrialRecord> one = RunSweep(cfg, 1);
  const std::vector<TrialRecord> two = RunSweep(cfg, 2);
  const std::vector<TrialRecord> again = RunSweep(cfg, 1);
  REQUIRE(one.size() == 6u);
  CHECK(Jsonl(one) == Jsonl(two));
  CHECK(Jsonl(one) == Jsonl(again));
  for (std::size_t u = 0; u < one.size(); ++u) {
    CHECK(one[u].grid_index == static_cast<int>(u / 3));
    CHECK(one[u].trial == static_cast<int>(u % 3));
  }
  // Distinct trials see distinct seeds.
  CHECK(one[0].seed != one[1].seed);
  CHECK(one[0].seed != one[3].seed);
}

TEST_CASE("adding an estimator leaves the others unchanged") {
  ExperimentConfig full = ParseConfig(kSmall);
  ExperimentConfig part = full;
  part.estimators = {"mv"};
  const std::vector<GridPoint> grid = ExpandGrid(full);
  TrialRecord a = RunTrial(full, grid[1], 2);
  TrialRecord b = RunTrial(part, grid[1], 2);
  REQUIRE(b.outcomes.size() == 1u);
  CHECK(a.outcomes[2].estimator == "mv");
  CHECK(a.outcomes[2].metrics.label_error == b.outcomes[0].metrics.label_error);
}

TEST_CASE("JSON lines records") {
  ExperimentConfig cfg = ParseConfig(kSmall);
  cfg.trials = 1;
  std::istringstream in(Jsonl(RunSweep(cfg)));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    Json j = Json::parse(line);
    CHECK(j.contains("config_id"));
    CHECK(j.contains("seed"));
    CHECK(j["status"] == "ok");
    CHECK(j["error"].is_null());
    const double le = j["metrics"]["label_error"];
    CHECK(le >= 0.0);
    CHECK(le <= 1.0);
    if (j["estimator"] == "alg1") {
      CHECK(j["metrics"]["clustering_error"].is_number());
      CHECK(j["diagnostics"]["sdp_converged"].is_boolean());
      CHECK(j["diagnostics"]["sdp_box_violation"].is_number());
    }
    if (j["estimator"] == "mv") CHECK(j["metrics"]["clustering_error"].is_null());
    ++lines;
  }
  CHECK(lines == 2 * 4);
}

TEST_CASE("failures are recorded per estimator") {
  // xi = 1 splits the crowd into singletons, so the subset baseline cannot
  // find l = 2 workers per cluster; the other estimators still run.
  ExperimentConfig cfg = ParseConfig(kSmall);
  cfg.axes["q"] = {"0.5"};
  cfg.axes["xi"] = {"1"};
  cfg.trials = 1;
  std::vector<TrialRecord> recs = RunSweep(cfg);
  REQUIRE(recs.size() == 1u);
  for (const auto& o : recs[0].outcomes) {
    if (o.estimator == "ss") {
      CHECK_FALSE(o.ok);
      CHECK_FALSE(o.error.empty());
    } else {
      CHECK(o.ok);
    }
  }
  std::string text = Jsonl(recs);
  CHECK(text.find("\"status\":\"failed\"") != std::string::npos);

  // A pilot budget larger than m fails the whole trial.
  ExperimentConfig bad = ParseConfig(kSmall);
  bad.pilot_scored = true;
  bad.axes["r"] = {"500"};
  bad.trials = 2;
  std::vector<TrialRecord> all = RunSweep(bad);
  CHECK(all.size() == 4u);
  for (const auto& rec : all) {
    for (const auto& o : rec.outcomes) CHECK_FALSE(o.ok);
  }
  CHECK(Aggregate(all, 0, "mv", "label_error").count == 0);
}

TEST_CASE("aggregate statistics") {
  auto outcome = [](const std::string& name, bool ok, double le,
                    std::optional<double> ce) {
    EstimatorOutcome o;
    o.estimator = name;
    o.ok = ok;
    o.metrics.label_error = le;
    o.metrics.clustering_error = ce;
    return o;
  };
  std::vector<TrialRecord> recs(4);
  const double le[4] = {0.1, 0.2, 0.4, 0.9};
  for (int t = 0; t < 4; ++t) {
    recs[t].grid_index = t < 3 ? 0 : 1;
    recs[t].trial = t;
    recs[t].outcomes.push_back(outcome("alg1", true, le[t], 0.05 * t));
    recs[t].outcomes.push_back(outcome("mv", t != 1, le[t], std::nullopt));
  }
  AggregateCell a = Aggregate(recs, 0, "alg1", "label_error");
  CHECK(a.count == 3);
  CHECK(a.mean == doctest::Approx(0.7 / 3));
  // Sample variance of {0.1, 0.2, 0.4} is 7/300.
  CHECK(a.stderr_ == doctest::Approx(std::sqrt(7.0 / 300.0 / 3.0)));
  AggregateCell m = Aggregate(recs, 0, "mv", "label_error");
  CHECK(m.count == 2);
  CHECK(m.mean == doctest::Approx(0.25));
  CHECK(Aggregate(recs, 0, "mv", "clustering_error").count == 0);
  AggregateCell single = Aggregate(recs, 1, "alg1", "label_error");
  CHECK(single.count == 1);
  CHECK(single.stderr_ == 0.0);
}

TEST_CASE("aggregate CSV layout") {
  ExperimentConfig cfg = ParseConfig(kSmall);
  cfg.trials = 2;
  std::vector<TrialRecord> recs = RunSweep(cfg);
  std::ostringstream out;
  WriteAggregateCsv(out, cfg, recs);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header = SplitCsvLine(line);
  CHECK(header.front() == "config_id");
  CHECK(header.size() == 1 + SweepKeys().size() + 3 + 12);
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f = SplitCsvLine(line);
    CHECK(f.size() == header.size());
    CHECK(f[1 + SweepKeys().size() + 1] == "2");
    ++rows;
  }
  CHECK(rows == 2 * 4);
}

TEST_CASE("theory curves") {
  ExperimentConfig cfg = ParseConfig(
      "model:\n  reliability: original\n  p: 0.9\n  q: 0.5\n"
      "sweep:\n  d: [3, 6]\n"
      "output:\n  alpha: [0.05, 0.2]\n");
  std::ostringstream out;
  EmitTheoryCurves(out, cfg);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header = SplitCsvLine(line);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    FAIL("missing column " << name);
    return std::size_t{0};
  };
  const std::size_t mv = col(BoundKindName(BoundKind::kMajorityVote));
  const std::size_t imp = col(BoundKindName(BoundKind::kImpossibility));
  const std::size_t alpha = col("alpha");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(SplitCsvLine(line));
  REQUIRE(rows.size() == 4u);
  CHECK(rows[0][alpha] == "0.05");
  CHECK(std::stod(rows[0][mv]) == doctest::Approx(84.25).epsilon(1e-3));
  // Impossibility is undefined above alpha = 1/8 and left blank.
  CHECK(rows[1][imp].empty());
  CHECK_FALSE(rows[0][imp].empty());
  // Majority vote needs ~d^2 more queries: gap (p - q)/d shrinks with d.
  CHECK(std::stod(rows[2][mv]) / std::stod(rows[0][mv]) == doctest::Approx(4.0));
}

TEST_CASE("SDP feasibility check") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(3, 3);
  SdpFeasibility f = CheckSdpFeasibility(x);
  CHECK(f.min_eigenvalue == doctest::Approx(1.0));
  CHECK(f.trace_error == 0.0);
  CHECK(f.box_violation == 0.0);
  x(0, 1) = x(1, 0) = -0.25;
  x(2, 2) = 1.5;
  f = CheckSdpFeasibility(x);
  CHECK(f.trace_error == doctest::Approx(0.5));
  CHECK(f.box_violation == doctest::Approx(0.5));
}

TEST_CASE("shipped configs load") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(CROWDSDP_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    INFO(entry.path().string());
    ExperimentConfig cfg = LoadConfig(entry.path().string());
    CHECK_FALSE(ExpandGrid(cfg).empty());
    CHECK(SerializeConfig(ParseConfig(SerializeConfig(cfg))) == SerializeConfig(cfg));
    ++count;
  }
  CHECK(count == 6);
  CHECK_THROWS_AS(LoadConfig("/nonexistent/x.cfg"), ValidationError);
}

}  // namespace
}  // namespace crowdsdp
