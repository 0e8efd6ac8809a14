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
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crowdsdp/csv_io.h"
#include "crowdsdp/error.h"
#include "crowdsdp/kmedoids.h"
#include "crowdsdp/model.h"
#include "crowdsdp/pipeline.h"
#include "crowdsdp/real_data.h"
#include "crowdsdp/rng.h"
#include "crowdsdp/sdp.h"
#include "doctest.h"

namespace crowdsdp {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("crowdsdp_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ModelInstance SmallInstance(int m, int n, Rng& rng) {
  ReliabilityMatrix q = SampleReliability(3, 0.8, 0.6, rng);
  return SampleInstance(q, TypePriors::Uniform(3), m, n, rng);
}

TEST_CASE("reliability and priors round-trip") {
  Rng rng(11);
  ReliabilityMatrix q = SampleReliability(4, 0.85, 0.65, rng);
  std::stringstream s;
  WriteReliabilityCsv(s, q);
  ReliabilityMatrix back = ReadReliabilityCsv(s);
  CHECK(back == q);

  Eigen::VectorXd mu(3), nu(3);
  mu << 0.2, 0.3, 0.5;
  nu << 0.6, 0.1, 0.3;
  std::stringstream p;
  WritePriorsCsv(p, TypePriors(mu, nu));
  TypePriors pb = ReadPriorsCsv(p);
  CHECK(pb.mu() == mu);
  CHECK(pb.nu() == nu);
}

TEST_CASE("reliability reader rejects malformed input") {
  std::stringstream ragged("0.9,0.6\n0.7\n");
  CHECK_THROWS_AS(ReadReliabilityCsv(ragged), ValidationError);
  std::stringstream low("0.9,0.4\n0.6,0.9\n");
  CHECK_THROWS_AS(ReadReliabilityCsv(low), ValidationError);
  std::stringstream text("0.9,abc\n0.6,0.9\n");
  CHECK_THROWS_AS(ReadReliabilityCsv(text), ValidationError);
}

TEST_CASE("label estimate round-trip") {
  LabelEstimate est;
  est.labels = {1, -1, 1, 1};
  est.margins = {2.5, -0.125, 0.0, 7.0};
  std::stringstream s;
  WriteLabelEstimateCsv(s, est);
  CHECK(s.str().rfind("task_id,label,margin\n", 0) == 0);
  LabelEstimate back = ReadLabelEstimateCsv(s);
  CHECK(back == est);
  REQUIRE(back.margins.size() == est.margins.size());
  for (std::size_t i = 0; i < est.margins.size(); ++i) {
    CHECK(back.margins[i] == est.margins[i]);
  }
}

TEST_CASE("similarity and matrix round-trip") {
  Rng rng(12);
  ModelInstance inst = SmallInstance(20, 7, rng);
  ResponseSet resp = SampleResponses(inst, FullAssignment(20, 7), rng);
  std::vector<int> pilots = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  SimilarityMatrix a = Similarity(resp, pilots);
  std::stringstream s;
  WriteSimilarityCsv(s, a);
  CHECK(ReadIntMatrixCsv(s) == a.a);

  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 5);
  std::stringstream t;
  WriteMatrixCsv(t, x);
  Eigen::MatrixXd xb = ReadMatrixCsv(t);
  REQUIRE(xb.rows() == 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(xb(i, j) - x(i, j)) <= 1e-8 * std::max(1.0, std::abs(x(i, j))));
    }
  }
}

TEST_CASE("assignment plan CSV") {
  Rng rng(13);
  ClusterAssignment clusters({0, 0, 0, 1, 1, 1}, 2);
  AssignmentPlan plan = BuildAssignment(clusters, 10, 2, {0, 1}, rng);
  std::stringstream s;
  WriteAssignmentPlanCsv(s, plan, 6);
  std::string line;
  std::getline(s, line);
  CHECK(line == "task_id,worker_id,cluster_id");
  std::size_t rows = 0;
  std::set<std::pair<int, int>> seen;
  while (std::getline(s, line)) {
    auto f = SplitCsvLine(line);
    REQUIRE(f.size() == 3);
    const int task = std::stoi(f[0]);
    const int worker = std::stoi(f[1]);
    const int cluster = std::stoi(f[2]);
    CHECK(seen.insert({task, worker}).second);
    if (task < 2) {
      CHECK(cluster == -1);
    } else {
      CHECK(clusters[worker] == cluster);
    }
    ++rows;
  }
  CHECK(rows == plan.QueryCount(6));
  CHECK(rows == 6u * 2u + 8u * 2u * 2u);
}

TEST_CASE("responses round-trip") {
  Rng rng(14);
  ModelInstance inst = SmallInstance(15, 6, rng);
  std::vector<int> tasks(15);
  for (int i = 0; i < 15; ++i) tasks[i] = i;
  Assignment a = RandomAssignment(15, 6, 3, tasks, rng);
  ResponseSet resp = SampleResponses(inst, a, rng);
  std::stringstream s;
  WriteResponsesCsv(s, resp);
  ResponseSet back = ReadResponsesCsv(s, 15, 6);
  CHECK(back.m() == 15);
  CHECK(back.n() == 6);
  CHECK(back.entries().size() == resp.entries().size());
  for (int i = 0; i < 15; ++i) {
    for (int j = 0; j < 6; ++j) CHECK(back(i, j) == resp(i, j));
  }
  std::stringstream bad("task_id,worker_id,answer\n0,0,2\n");
  CHECK_THROWS_AS(ReadResponsesCsv(bad), ValidationError);
  std::stringstream dup("task_id,worker_id,answer\n0,0,1\n0,0,-1\n");
  CHECK_THROWS_AS(ReadResponsesCsv(dup), ValidationError);
}

TEST_CASE("dataset save and load") {
  Rng rng(15);
  ModelInstance inst = SmallInstance(40, 8, rng);
  RealDataset data = SimulateDataset(inst, 5, 10, rng);
  CHECK(data.responses.size() == 8u * 15u);
  fs::path dir = TempDir("roundtrip");
  SaveDatasetDir(data, dir.string());
  RealDataset back = LoadDatasetDir(dir.string());
  CHECK(back.truth == data.truth);
  CHECK(back.task_types == data.task_types);
  CHECK(back.is_pilot == data.is_pilot);
  CHECK(back.responses.entries().size() == data.responses.entries().size());
  for (int i = 0; i < 40; ++i) {
    for (int j = 0; j < 8; ++j) CHECK(back.responses(i, j) == data.responses(i, j));
  }
  fs::remove(dir / "pilots.csv");
  RealDataset nopilot = LoadDatasetDir(dir.string());
  for (bool b : nopilot.is_pilot) CHECK_FALSE(b);
  fs::remove_all(dir);
}

TEST_CASE("dataset loader rejects bad files") {
  fs::path dir = TempDir("bad");
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
  };
  write("truth.csv", "task_id,label\n0,1\n1,-1\n");
  write("task_types.csv", "task_id,type\n0,0\n1,1\n");
  write("responses.csv", "task_id,worker_id,answer\n0,0,1\n0,0,1\n");
  CHECK_THROWS_AS(LoadDatasetDir(dir.string()), ValidationError);
  write("responses.csv", "task_id,worker_id,answer\n0,0,1\n5,0,1\n");
  CHECK_THROWS_AS(LoadDatasetDir(dir.string()), ValidationError);
  write("responses.csv", "task_id,worker_id,answer\n0,0,1\n1,0,1\n");
  write("task_types.csv", "task_id,type\n0,0\n");
  CHECK_THROWS_AS(LoadDatasetDir(dir.string()), ValidationError);
  fs::remove_all(dir);
}

TEST_CASE("empirical reliability of a perfectly accurate crowd") {
  const int m = 12;
  const int n = 4;
  std::vector<int> truth, types;
  std::vector<Response> entries;
  for (int i = 0; i < m; ++i) {
    truth.push_back(i % 3 == 0 ? -1 : 1);
    types.push_back(i % 2);
    for (int j = 0; j < n; ++j) entries.push_back({i, j, truth.back()});
  }
  RealDataset data{ResponseSet(m, n, entries), truth, types,
                   std::vector<bool>(m, false)};
  EmpiricalReliability est = EstimateReliability(data, 2);
  CHECK(est.undefined_cells.empty());
  CHECK(est.below_half.empty());
  for (int j = 0; j < n; ++j) {
    CHECK(est.worker_types[j] == 0);
    for (int t = 0; t < 2; ++t) CHECK(est.rates(j, t) == 1.0);
  }
  CHECK(est.q_hat(0, 0) == 1.0);
  CHECK(est.q_hat(1, 0) == 1.0);
  // No worker is assigned type 1.
  CHECK(std::isnan(est.q_hat(0, 1)));
}

TEST_CASE("empirical reliability undefined and below-half cells") {
  // Worker 0 answers only type-0 tasks; worker 1 is always wrong on type 1.
  std::vector<int> truth = {1, 1, 1, 1};
  std::vector<int> types = {0, 0, 1, 1};
  std::vector<Response> entries = {{0, 0, 1}, {1, 0, 1}, {0, 1, 1},
                                   {1, 1, -1}, {2, 1, -1}, {3, 1, -1}};
  RealDataset data{ResponseSet(4, 2, entries), truth, types,
                   std::vector<bool>(4, false)};
  EmpiricalReliability est = EstimateReliability(data, 2);
  CHECK(std::isnan(est.rates(0, 1)));
  REQUIRE(est.undefined_cells.size() == 1);
  CHECK(est.undefined_cells[0] == std::pair<int, int>{0, 1});
  CHECK(est.rates(1, 0) == 0.5);
  CHECK(est.rates(1, 1) == 0.0);
  CHECK(est.worker_types[1] == 0);
  // Both workers land in type 0; q_hat(1, 0) averages only worker 1.
  CHECK(est.q_hat(1, 0) == 0.0);
  bool flagged = false;
  for (auto c : est.below_half) flagged |= (c == std::pair<int, int>{1, 0});
  CHECK(flagged);
}

TEST_CASE("empirical reliability recovers a planted matrix") {
  Rng rng(16);
  Eigen::MatrixXd qm(2, 2);
  qm << 0.9, 0.6, 0.55, 0.85;
  ReliabilityMatrix q(qm);
  const int m = 10000;
  const int n = 20;
  std::vector<int> wt(n);
  for (int j = 0; j < n; ++j) wt[j] = j % 2;
  ModelInstance inst = SampleInstanceWithWorkers(q, TypePriors::Uniform(2), m, wt, rng);
  RealDataset data = SimulateDataset(inst, 0, m, rng);
  EmpiricalReliability est = EstimateReliability(data, 2);
  CHECK(est.worker_types == wt);
  for (int t = 0; t < 2; ++t) {
    for (int w = 0; w < 2; ++w) CHECK(std::abs(est.q_hat(t, w) - qm(t, w)) <= 0.02);
  }
}

TEST_CASE("shipped ingest fixture conforms to the dataset format") {
  const fs::path dir = fs::path(CROWDSDP_TEST_DATA) / "mturk_standin";
  RealDataset data = LoadDatasetDir(dir.string());
  const int m = data.responses.m();
  const int n = data.responses.n();
  CHECK(m == 600);
  CHECK(n == 60);
  CHECK(data.truth.size() == 600u);
  int pilots = 0;
  for (bool b : data.is_pilot) pilots += b;
  CHECK(pilots == 8);
  for (int i = 0; i < m; ++i) {
    CHECK((data.truth[i] == 1 || data.truth[i] == -1));
    CHECK(data.task_types[i] >= 0);
    CHECK(data.task_types[i] < 4);
    if (data.is_pilot[i]) CHECK(static_cast<int>(data.responses.row(i).size()) == n);
  }
  std::vector<int> per_worker(n, 0);
  for (const Response& r : data.responses.entries()) {
    if (!data.is_pilot[r.task]) ++per_worker[r.worker];
  }
  for (int c : per_worker) CHECK(c == 80);

  std::ifstream qf(dir / "reliability.csv");
  ReliabilityMatrix q = ReadReliabilityCsv(qf);
  std::ifstream wf(dir / "worker_types.csv");
  std::string line;
  std::getline(wf, line);
  std::vector<int> wt;
  while (std::getline(wf, line)) wt.push_back(std::stoi(SplitCsvLine(line)[1]));
  REQUIRE(static_cast<int>(wt.size()) == n);

  // With 80 answers per worker the per-worker argmax is noisy, so only the
  // estimated diagonal is checked against the generating matrix.
  EmpiricalReliability est = EstimateReliability(data, 4);
  int agree = 0;
  for (int j = 0; j < n; ++j) agree += est.worker_types[j] == wt[j];
  CHECK(agree >= n / 2);
  for (int t = 0; t < 4; ++t) {
    if (!std::isnan(est.q_hat(t, t))) CHECK(std::abs(est.q_hat(t, t) - q(t, t)) <= 0.1);
  }
}

}  // namespace
}  // namespace crowdsdp
