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

// Command-line front end: generate, run, sweep, bounds, ingest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "crowdsdp/csv_io.h"
#include "crowdsdp/error.h"
#include "crowdsdp/experiment.h"
#include "crowdsdp/real_data.h"

namespace fs = std::filesystem;
using namespace crowdsdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAllFailed = 3;

std::ofstream OpenOut(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".")
                                                    : path.parent_path());
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

ExperimentConfig Load(const std::string& path, std::optional<std::uint64_t> seed,
                      const std::string& out_dir) {
  ExperimentConfig cfg = LoadConfig(path);
  if (seed) cfg.master_seed = *seed;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cfg;
}

void WriteArtifacts(const TrialRecord& rec, int n, const fs::path& dir) {
  for (const auto& o : rec.outcomes) {
    if (!o.detail) continue;
    const fs::path base = dir / o.estimator;
    fs::create_directories(base);
    std::ofstream labels(base / "labels.csv");
    WriteLabelEstimateCsv(labels, o.detail->estimate);
    std::ofstream sim(base / "similarity.csv");
    WriteSimilarityCsv(sim, o.detail->similarity);
    std::ofstream plan(base / "plan.csv");
    WriteAssignmentPlanCsv(plan, o.detail->plan, n);
    if (o.detail->sdp) {
      std::ofstream x(base / "sdp_x.csv");
      WriteMatrixCsv(x, o.detail->sdp->x);
    }
  }
}

int RunExperiment(const ExperimentConfig& cfg, int jobs, bool single,
                  const std::string& artifacts) {
  const std::vector<GridPoint> grid = ExpandGrid(cfg);
  if (single && grid.size() != 1) {
    throw ValidationError("run expects a single grid point; the config has " +
                          std::to_string(grid.size()) + " (use sweep)");
  }
  std::vector<TrialRecord> records = RunSweep(cfg, jobs);
  const fs::path dir(cfg.out_dir);
  {
    std::ofstream out = OpenOut(dir / cfg.jsonl);
    WriteJsonl(out, records);
  }
  {
    std::ofstream out = OpenOut(dir / cfg.aggregate);
    WriteAggregateCsv(out, cfg, records);
  }
  if (!artifacts.empty()) {
    WriteArtifacts(RunTrial(cfg, grid.front(), 0, true), grid.front().n,
                   fs::path(artifacts));
  }
  std::size_t ok = 0;
  std::size_t total = 0;
  for (const auto& rec : records) {
    for (const auto& o : rec.outcomes) {
      ++total;
      ok += o.ok ? 1 : 0;
    }
  }
  std::cerr << ok << "/" << total << " estimator runs succeeded; wrote "
            << (dir / cfg.jsonl).string() << " and "
            << (dir / cfg.aggregate).string() << "\n";
  return ok == 0 ? kExitAllFailed : kExitOk;
}

int Generate(const ExperimentConfig& cfg, int per_task, int tasks_per_worker) {
  const GridPoint g = ExpandGrid(cfg).front();
  Rng rng(DeriveSeed(cfg.master_seed, 0));
  Rng q_rng = rng.Derive(0);
  ReliabilityMatrix q = GridReliability(cfg, g, q_rng);
  TypePriors priors = GridPriors(cfg, g.d);
  const AssortativityReport rep = Assortativity(q, priors);
  const int r = g.r == "lemma1"
                    ? Lemma1Budget(g.n, g.d, rep.p_m, rep.p_u, cfg.c2)
                    : std::stoi(g.r);
  Rng inst_rng = rng.Derive(1);
  ModelInstance inst =
      cfg.workers == "planted"
          ? SampleInstanceWithWorkers(q, priors, g.m + r,
                                      PlantedWorkerTypes(g.n, g.d, inst_rng),
                                      inst_rng)
          : SampleInstance(q, priors, g.m + r, g.n, inst_rng);
  Rng resp_rng = rng.Derive(2);
  RealDataset data;
  if (tasks_per_worker > 0) {
    data = SimulateDataset(inst, r, tasks_per_worker, resp_rng);
  } else {
    if (per_task <= 0) per_task = g.l * g.d;
    Assignment a;
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < g.n; ++j) a.push_back({i, j});
    }
    std::vector<int> rest(g.m);
    std::iota(rest.begin(), rest.end(), r);
    Assignment tail = RandomAssignment(inst.m(), g.n, per_task, rest, resp_rng);
    a.insert(a.end(), tail.begin(), tail.end());
    data.responses = SampleResponses(inst, a, resp_rng);
    data.truth = inst.labels();
    data.task_types = inst.task_types();
    data.is_pilot.assign(inst.m(), false);
    for (int i = 0; i < r; ++i) data.is_pilot[i] = true;
  }
  const fs::path dir(cfg.out_dir);
  SaveDatasetDir(data, dir.string());
  std::ofstream q_out(dir / "reliability.csv");
  WriteReliabilityCsv(q_out, q);
  std::ofstream p_out(dir / "priors.csv");
  WritePriorsCsv(p_out, priors);
  std::ofstream w_out(dir / "worker_types.csv");
  w_out << "worker_id,type\n";
  for (int j = 0; j < inst.n(); ++j) w_out << j << ',' << inst.worker_types()[j] << '\n';
  std::cerr << "wrote " << data.responses.size() << " responses for "
            << inst.m() << " tasks (" << r << " pilots) to " << dir.string()
            << "\n";
  return kExitOk;
}

int Bounds(const ExperimentConfig& cfg) {
  const fs::path path = fs::path(cfg.out_dir) / cfg.theory;
  std::ofstream out = OpenOut(path);
  EmitTheoryCurves(out, cfg);
  std::cerr << "wrote " << path.string() << "\n";
  return kExitOk;
}

int Ingest(const std::string& data_dir, int d, const std::string& out_dir) {
  RealDataset data = LoadDatasetDir(data_dir);
  EmpiricalReliability est = EstimateReliability(data, d);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  std::ofstream q_out(dir / "q_hat.csv");
  q_out << std::setprecision(6);
  std::cout << std::fixed << std::setprecision(4);
  for (int t = 0; t < d; ++t) {
    for (int w = 0; w < d; ++w) {
      const double v = est.q_hat(t, w);
      if (w > 0) {
        q_out << ',';
        std::cout << ' ';
      }
      if (!std::isnan(v)) q_out << v;
      std::cout << (std::isnan(v) ? std::string("   nan") : std::to_string(v).substr(0, 6));
    }
    q_out << '\n';
    std::cout << '\n';
  }
  std::ofstream w_out(dir / "worker_types.csv");
  w_out << "worker_id,type\n";
  for (std::size_t j = 0; j < est.worker_types.size(); ++j) {
    w_out << j << ',' << est.worker_types[j] << '\n';
  }
  for (const auto& [t, w] : est.below_half) {
    std::cerr << "note: q_hat(" << t << "," << w << ") is below 1/2\n";
  }
  if (!est.undefined_cells.empty()) {
    std::cerr << "note: " << est.undefined_cells.size()
              << " (worker, type) cells had no answers and were excluded\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crowdsdp: d-type crowdsourcing inference and experiments"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int jobs = 1;
  std::string artifacts;
  int per_task = 0;
  int tasks_per_worker = 0;
  std::string data_dir;
  int d = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment config (YAML)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--out", out_dir, "override the output directory");
  };
  CLI::App* gen = app.add_subcommand("generate", "write a synthetic dataset");
  add_common(gen);
  gen->add_option("--per-task", per_task,
                  "random workers per non-pilot task (default l*d)");
  gen->add_option("--tasks-per-worker", tasks_per_worker,
                  "non-pilot tasks per worker instead of --per-task");
  CLI::App* run = app.add_subcommand("run", "run a single-point config");
  CLI::App* sweep = app.add_subcommand("sweep", "run every grid point");
  for (CLI::App* sub : {run, sweep}) {
    add_common(sub);
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--artifacts", artifacts,
                    "directory for trial-0 labels, similarity, SDP and plan CSVs");
  }
  CLI::App* bounds = app.add_subcommand("bounds", "emit theory curves");
  add_common(bounds);
  CLI::App* ingest = app.add_subcommand("ingest", "estimate Q from labelled data");
  ingest->add_option("--data", data_dir, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  ingest->add_option("--d", d, "number of types")->required()->check(CLI::PositiveNumber);
  ingest->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ingest->parsed()) return Ingest(data_dir, d, out_dir);
    ExperimentConfig cfg = Load(config, seed, out_dir);
    if (gen->parsed()) return Generate(cfg, per_task, tasks_per_worker);
    if (bounds->parsed()) return Bounds(cfg);
    return RunExperiment(cfg, jobs, run->parsed(), artifacts);
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
