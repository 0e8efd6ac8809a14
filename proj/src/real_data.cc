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

#include "crowdsdp/real_data.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "crowdsdp/csv_io.h"
#include "crowdsdp/error.h"

namespace crowdsdp {
namespace {

using internal::Require;

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return in;
}

// Reads "task_id,value" rows after a header.
std::map<int, int> ReadPairs(const std::string& path) {
  std::ifstream in = OpenOrThrow(path);
  std::map<int, int> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    auto fields = SplitCsvLine(line);
    if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
    if (first) {
      first = false;
      if (!fields[0].empty() && !std::isdigit(static_cast<unsigned char>(fields[0][0]))) {
        continue;
      }
    }
    Require(fields.size() == 2, path + ": expected two columns");
    int key = 0;
    int value = 0;
    try {
      key = std::stoi(fields[0]);
      value = std::stoi(fields[1]);
    } catch (const std::logic_error&) {
      throw ValidationError(path + ": malformed row '" + line + "'");
    }
    Require(key >= 0, path + ": negative task id");
    Require(out.emplace(key, value).second,
            path + ": duplicate task id " + std::to_string(key));
  }
  return out;
}

}  // namespace

RealDataset LoadDataset(const std::string& responses_path,
                        const std::string& truth_path,
                        const std::string& types_path,
                        const std::string& pilots_path) {
  std::ifstream in = OpenOrThrow(responses_path);
  ResponseSet raw = ReadResponsesCsv(in);
  std::map<int, int> truth = ReadPairs(truth_path);
  std::map<int, int> types = ReadPairs(types_path);
  std::map<int, int> pilots;
  if (!pilots_path.empty()) pilots = ReadPairs(pilots_path);

  int m = raw.m();
  for (const auto* table : {&truth, &types, &pilots}) {
    if (!table->empty()) m = std::max(m, table->rbegin()->first + 1);
  }
  RealDataset data;
  data.responses = ResponseSet(m, raw.n(), raw.entries());
  data.truth.assign(m, 0);
  data.task_types.assign(m, -1);
  data.is_pilot.assign(m, false);
  for (int i = 0; i < m; ++i) {
    auto t = truth.find(i);
    Require(t != truth.end(), "task " + std::to_string(i) + " has no truth");
    Require(t->second == 1 || t->second == -1,
            "truth labels must be +-1 (task " + std::to_string(i) + ")");
    data.truth[i] = t->second;
    auto ty = types.find(i);
    Require(ty != types.end() && ty->second >= 0,
            "task " + std::to_string(i) + " has no valid type");
    data.task_types[i] = ty->second;
  }
  for (const auto& [i, flag] : pilots) {
    Require(flag == 0 || flag == 1, "pilot flags must be 0 or 1");
    data.is_pilot[i] = flag == 1;
  }
  return data;
}

RealDataset LoadDatasetDir(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  const fs::path pilots = root / "pilots.csv";
  return LoadDataset((root / "responses.csv").string(),
                     (root / "truth.csv").string(),
                     (root / "task_types.csv").string(),
                     fs::exists(pilots) ? pilots.string() : "");
}

void SaveDatasetDir(const RealDataset& data, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  std::ofstream responses(root / "responses.csv");
  WriteResponsesCsv(responses, data.responses);
  std::ofstream truth(root / "truth.csv");
  truth << "task_id,label\n";
  std::ofstream types(root / "task_types.csv");
  types << "task_id,type\n";
  std::ofstream pilots(root / "pilots.csv");
  pilots << "task_id,is_pilot\n";
  for (std::size_t i = 0; i < data.truth.size(); ++i) {
    truth << i << ',' << data.truth[i] << '\n';
    types << i << ',' << data.task_types[i] << '\n';
    pilots << i << ',' << (data.is_pilot[i] ? 1 : 0) << '\n';
  }
  Require(responses && truth && types && pilots, "failed writing " + dir);
}

RealDataset SimulateDataset(const ModelInstance& inst, int pilots,
                            int tasks_per_worker, Rng& rng) {
  Require(pilots >= 0 && pilots <= inst.m(), "pilot count out of range");
  Require(tasks_per_worker >= 0 && tasks_per_worker <= inst.m() - pilots,
          "tasks per worker exceeds the non-pilot tasks");
  Assignment a;
  for (int i = 0; i < pilots; ++i) {
    for (int j = 0; j < inst.n(); ++j) a.push_back({i, j});
  }
  for (int j = 0; j < inst.n(); ++j) {
    for (int k : rng.SampleWithoutReplacement(inst.m() - pilots, tasks_per_worker)) {
      a.push_back({pilots + k, j});
    }
  }
  RealDataset data;
  data.responses = SampleResponses(inst, a, rng);
  data.truth = inst.labels();
  data.task_types = inst.task_types();
  data.is_pilot.assign(inst.m(), false);
  std::fill(data.is_pilot.begin(), data.is_pilot.begin() + pilots, true);
  return data;
}

EmpiricalReliability EstimateReliability(const RealDataset& data, int d) {
  Require(d >= 1, "d must be positive");
  const int n = data.responses.n();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd correct = Eigen::MatrixXd::Zero(n, d);
  Eigen::MatrixXd answered = Eigen::MatrixXd::Zero(n, d);
  for (const Response& r : data.responses.entries()) {
    const int t = data.task_types[r.task];
    Require(t < d, "task type exceeds d");
    answered(r.worker, t) += 1.0;
    if (r.value == data.truth[r.task]) correct(r.worker, t) += 1.0;
  }
  EmpiricalReliability out;
  out.rates = Eigen::MatrixXd::Constant(n, d, nan);
  out.worker_types.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    double best = -1.0;
    for (int t = 0; t < d; ++t) {
      if (answered(j, t) == 0.0) {
        out.undefined_cells.emplace_back(j, t);
        continue;
      }
      out.rates(j, t) = correct(j, t) / answered(j, t);
      if (out.rates(j, t) > best) {
        best = out.rates(j, t);
        out.worker_types[j] = t;
      }
    }
  }
  out.q_hat = Eigen::MatrixXd::Constant(d, d, nan);
  for (int t = 0; t < d; ++t) {
    for (int w = 0; w < d; ++w) {
      double sum = 0.0;
      int count = 0;
      for (int j = 0; j < n; ++j) {
        if (out.worker_types[j] != w || std::isnan(out.rates(j, t))) continue;
        sum += out.rates(j, t);
        ++count;
      }
      if (count == 0) continue;
      out.q_hat(t, w) = sum / count;
      if (out.q_hat(t, w) < 0.5) out.below_half.emplace_back(t, w);
    }
  }
  return out;
}

}  // namespace crowdsdp
