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

#include "crowdsdp/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <yaml-cpp/yaml.h>

#include "crowdsdp/bounds.h"
#include "crowdsdp/csv_io.h"
#include "crowdsdp/error.h"
#include "crowdsdp/estimators.h"
#include "crowdsdp/pipeline.h"
#include "json.hpp"

namespace crowdsdp {
namespace {

using internal::Require;
using Json = nlohmann::ordered_json;

const std::set<std::string> kEstimators = {"mv", "ml", "ss", "alg1",
                                           "alg1_auto"};
const std::vector<std::string> kMetricNames = {
    "label_error",
    "clustering_error",
    "ss_clustering_error_inclusive",
    "ss_clustering_error_restricted",
    "type_match_error",
    "queries_per_task"};

// Stream ids are fixed per estimator so adding one leaves the others intact.
std::uint64_t EstimatorStream(const std::string& name) {
  if (name == "mv") return 16;
  if (name == "ml") return 17;
  if (name == "ss") return 18;
  if (name == "alg1") return 19;
  return 20;
}
constexpr std::uint64_t kGridReliabilityStream = 0x5eedULL;

[[noreturn]] void Fail(const std::string& msg) { throw ValidationError(msg); }

int ToInt(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) Fail(key + ": expected an integer, got '" + s + "'");
    return static_cast<int>(v);
  } catch (const std::logic_error&) {
    Fail(key + ": expected an integer, got '" + s + "'");
  }
}

double ToDouble(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) Fail(key + ": expected a number, got '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    Fail(key + ": expected a number, got '" + s + "'");
  }
}

bool IsNumber(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string Scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) Fail(key + ": expected a scalar");
  return node.as<std::string>();
}

std::vector<std::string> ScalarList(const YAML::Node& node,
                                    const std::string& key) {
  std::vector<std::string> out;
  if (node.IsSequence()) {
    for (const auto& item : node) out.push_back(Scalar(item, key));
  } else {
    out.push_back(Scalar(node, key));
  }
  if (out.empty()) Fail(key + ": list must be nonempty");
  return out;
}

Eigen::VectorXd ToVector(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0) Fail(key + ": expected a list");
  Eigen::VectorXd v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = ToDouble(key, Scalar(node[i], key));
  }
  return v;
}

Eigen::MatrixXd ToMatrix(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() == 0) Fail(key + ": expected rows");
  const auto d = static_cast<Eigen::Index>(node.size());
  Eigen::MatrixXd q(d, d);
  for (Eigen::Index t = 0; t < d; ++t) {
    Eigen::VectorXd row = ToVector(node[static_cast<std::size_t>(t)], key);
    if (row.size() != d) Fail(key + ": matrix must be square");
    q.row(t) = row.transpose();
  }
  return q;
}

bool ToBool(const YAML::Node& node, const std::string& key) {
  const std::string s = Scalar(node, key);
  if (s == "true") return true;
  if (s == "false") return false;
  Fail(key + ": expected true or false");
}

void CheckKeys(const YAML::Node& node, const std::string& block,
               const std::set<std::string>& allowed) {
  if (!node.IsMap()) Fail(block + ": expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) Fail(block + ": unknown key '" + key + "'");
  }
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double StandardError(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) /
         std::sqrt(static_cast<double>(v.size()));
}

std::optional<double> MetricValue(const MetricsRecord& m,
                                  const std::string& name) {
  if (name == "label_error") return m.label_error;
  if (name == "clustering_error") return m.clustering_error;
  if (name == "ss_clustering_error_inclusive") {
    return m.ss_clustering_error_inclusive;
  }
  if (name == "ss_clustering_error_restricted") {
    return m.ss_clustering_error_restricted;
  }
  if (name == "type_match_error") return m.type_match_error;
  if (name == "queries_per_task") return m.queries_per_task;
  Fail("unknown metric '" + name + "'");
}

Json OptionalJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

// Problem data shared by every estimator of one trial.
struct TrialSetup {
  ModelInstance inst;
  TypePriors priors;
  AssortativityReport report;
  int r = 0;
  std::vector<int> pilots;
  std::vector<int> scored;
};

std::optional<double> OracleNu(const GridPoint& g, int r,
                               const AssortativityReport& rep) {
  const NuBracket b = ExactRecoveryBracket(r, rep.p_m, rep.p_u);
  if (g.nu == "oracle" || g.nu == "mid") return b.mid;
  if (g.nu == "low") return b.low;
  if (g.nu == "high") return b.high;
  if (g.nu == "auto") return std::nullopt;
  return ToDouble("nu", g.nu);
}

std::vector<int> Restrict(const std::vector<int>& v,
                          const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[i]);
  return out;
}

void RunMajority(const TrialSetup& s, const GridPoint& g, Rng& rng,
                 EstimatorOutcome* out) {
  std::vector<int> tasks(s.inst.m());
  std::iota(tasks.begin(), tasks.end(), 0);
  const int per_task = g.l * g.d;
  ResponseSet resp = SampleResponses(
      s.inst, RandomAssignment(s.inst.m(), s.inst.n(), per_task, tasks, rng),
      rng);
  out->metrics.label_error =
      LabelError(MajorityVote(resp), s.inst.labels(), s.scored);
  out->metrics.queries_per_task = per_task;
}

void RunMl(const TrialSetup& s, const GridPoint& g, Rng& rng,
           EstimatorOutcome* out) {
  // l workers of every true type per task.
  const std::vector<int>& w = s.inst.worker_types();
  std::vector<int> present(g.d, 0);
  for (int t : w) present[t] = 1;
  if (std::count(present.begin(), present.end(), 1) != g.d) {
    throw InfeasibleError("some worker type has no workers");
  }
  AssignmentPlan plan =
      BuildAssignment(ClusterAssignment(w, g.d), s.inst.m(), g.l, {}, rng);
  ResponseSet resp = SampleResponses(s.inst, plan.StageTwoAssignment(), rng);
  out->metrics.label_error =
      LabelError(MlOracle(resp, s.inst), s.inst.labels(), s.scored);
  out->metrics.queries_per_task = g.l * g.d;
}

void FillSdp(const SdpSolution& sol, EstimatorOutcome* out) {
  out->sdp_converged = sol.converged;
  out->sdp_iterations = sol.iterations;
  out->sdp_primal_residual = sol.primal_residual;
  out->sdp_dual_residual = sol.dual_residual;
  out->sdp_feasibility = CheckSdpFeasibility(sol.x);
}

void RunAlg1Estimator(const ExperimentConfig& cfg, const TrialSetup& s,
                      const GridPoint& g, bool auto_k, bool keep, Rng& rng,
                      EstimatorOutcome* out) {
  Alg1Options opt;
  opt.r = s.r;
  opt.pilot_tasks = s.pilots;
  opt.l = g.l;
  opt.nu = OracleNu(g, s.r, s.report);
  opt.k = g.d;
  opt.estimate_k = auto_k;
  opt.sdp = cfg.sdp;
  PipelineResult res = RunAlg1(s.inst, opt, rng);

  out->metrics.label_error = LabelError(res.estimate, s.inst.labels(), s.scored);
  out->metrics.queries_per_task =
      static_cast<double>(res.plan.QueryCount(s.inst.n())) / s.scored.size();
  out->nu = res.nu;
  out->clusters_found = res.clusters.k();
  if (res.tuning) {
    out->d_hat = res.tuning->d_hat;
    out->s_hat = res.tuning->s_hat;
  }
  if (res.sdp) FillSdp(*res.sdp, out);
  if (res.clusters.k() == g.d) {
    ClusteringMatch match =
        ClusteringError(res.clusters, s.inst.worker_types(), g.d);
    out->metrics.clustering_error = match.error;
    out->metrics.type_match_error =
        TypeMatchError(Restrict(res.types.t_hat, s.scored),
                       Restrict(s.inst.task_types(), s.scored),
                       match.type_of_cluster);
  }
  if (keep) out->detail = std::make_shared<const PipelineResult>(std::move(res));
}

void RunSubsetEstimator(const TrialSetup& s, const GridPoint& g, bool keep,
                        Rng& rng, EstimatorOutcome* out) {
  SubsetOptions opt;
  opt.r = s.r;
  opt.pilot_tasks = s.pilots;
  opt.l = g.l;
  opt.d = g.d;
  if (g.xi == "oracle") {
    opt.xi = OracleXi(s.report.p_m, s.report.p_u);
  } else if (g.xi != "auto") {
    opt.xi = ToDouble("xi", g.xi);
  }
  PipelineResult res = RunSubsetSelection(s.inst, opt, rng);

  out->metrics.label_error = LabelError(res.estimate, s.inst.labels(), s.scored);
  out->metrics.queries_per_task =
      static_cast<double>(res.plan.QueryCount(s.inst.n())) / s.scored.size();
  out->xi = res.xi;
  out->clusters_found = res.clusters.k();
  SubsetClusteringErrors errs =
      SsClusteringErrors(res.clusters, s.inst.worker_types(), g.d);
  out->metrics.ss_clustering_error_inclusive = errs.inclusive;
  out->metrics.ss_clustering_error_restricted = errs.restricted;
  out->metrics.type_match_error =
      TypeMatchError(Restrict(res.types.t_hat, s.scored),
                     Restrict(s.inst.task_types(), s.scored), errs.type_of_top);
  if (keep) out->detail = std::make_shared<const PipelineResult>(std::move(res));
}

}  // namespace

const std::vector<std::string>& SweepKeys() {
  static const std::vector<std::string> keys = {
      "d", "m", "n", "p_min", "q_max", "p", "q", "r", "l", "nu", "xi"};
  return keys;
}

ExperimentConfig::ExperimentConfig() {
  axes = {{"d", {"3"}},       {"m", {"1000"}},   {"n", {"60"}},
          {"p_min", {"0.9"}}, {"q_max", {"0.5"}}, {"p", {"0.9"}},
          {"q", {"0.5"}},     {"r", {"120"}},    {"l", {"3"}},
          {"nu", {"oracle"}}, {"xi", {"oracle"}}};
}

void ExperimentConfig::Validate() const {
  Require(reliability == "sampled" || reliability == "original" ||
              reliability == "explicit",
          "model.reliability must be sampled, original or explicit");
  Require(reliability != "explicit" || q_matrix.has_value(),
          "explicit reliability needs q_matrix or q_path");
  Require(workers == "random" || workers == "planted",
          "model.workers must be random or planted");
  Require(resample == "trial" || resample == "grid",
          "model.resample must be trial or grid");
  Require(!estimators.empty(), "algorithm.estimators must be nonempty");
  for (const auto& e : estimators) {
    Require(kEstimators.count(e) == 1, "unknown estimator '" + e + "'");
  }
  Require(c2 >= 0.0, "algorithm.c2 must be nonnegative");
  sdp.Validate();
  Require(trials >= 1, "sweep.trials must be >= 1");
  Require(!alphas.empty(), "output.alpha must be nonempty");
  for (double a : alphas) {
    Require(a > 0.0 && a <= 0.5, "output.alpha must lie in (0, 1/2]");
  }
  for (const auto& key : SweepKeys()) {
    auto it = axes.find(key);
    Require(it != axes.end() && !it->second.empty(),
            "sweep list '" + key + "' must be nonempty");
  }
  Require(axes.size() == SweepKeys().size(), "unknown sweep key");
  ExpandGrid(*this);
}

ExperimentConfig ParseConfig(const std::string& yaml_text,
                             const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    Fail(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  if (!root || root.IsNull()) Fail("config is empty");
  CheckKeys(root, "config", {"name", "model", "algorithm", "sweep", "output"});
  if (root["name"]) cfg.name = Scalar(root["name"], "name");

  bool d_given = false;
  if (const YAML::Node model = root["model"]) {
    CheckKeys(model, "model",
              {"d", "m", "n", "p_min", "q_max", "p", "q", "reliability",
               "q_matrix", "q_path", "task_prior", "worker_prior", "workers",
               "resample"});
    for (const char* key : {"d", "m", "n", "p_min", "q_max", "p", "q"}) {
      if (model[key]) cfg.axes[key] = {Scalar(model[key], key)};
    }
    d_given = static_cast<bool>(model["d"]);
    if (model["reliability"]) {
      cfg.reliability = Scalar(model["reliability"], "model.reliability");
    }
    if (model["q_matrix"]) {
      cfg.q_matrix = ToMatrix(model["q_matrix"], "model.q_matrix");
    }
    if (model["q_path"]) {
      cfg.q_path = Scalar(model["q_path"], "model.q_path");
      std::filesystem::path path(cfg.q_path);
      if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
      std::ifstream in(path);
      if (!in) Fail("model.q_path: cannot open " + path.string());
      cfg.q_matrix = ReadReliabilityCsv(in).matrix();
    }
    if (model["task_prior"]) {
      cfg.mu = ToVector(model["task_prior"], "model.task_prior");
    }
    if (model["worker_prior"]) {
      cfg.nu_prior = ToVector(model["worker_prior"], "model.worker_prior");
    }
    if (model["workers"]) cfg.workers = Scalar(model["workers"], "model.workers");
    if (model["resample"]) {
      cfg.resample = Scalar(model["resample"], "model.resample");
    }
  }
  if (const YAML::Node alg = root["algorithm"]) {
    CheckKeys(alg, "algorithm",
              {"estimators", "r", "l", "nu", "xi", "pilot_scored", "c2", "sdp"});
    if (alg["estimators"]) {
      cfg.estimators = ScalarList(alg["estimators"], "algorithm.estimators");
    }
    for (const char* key : {"r", "l", "nu", "xi"}) {
      if (alg[key]) cfg.axes[key] = {Scalar(alg[key], key)};
    }
    if (alg["pilot_scored"]) {
      cfg.pilot_scored = ToBool(alg["pilot_scored"], "algorithm.pilot_scored");
    }
    if (alg["c2"]) cfg.c2 = ToDouble("algorithm.c2", Scalar(alg["c2"], "c2"));
    if (const YAML::Node sdp = alg["sdp"]) {
      CheckKeys(sdp, "algorithm.sdp",
                {"rho", "tol_primal", "tol_dual", "max_iters", "adaptive_rho",
                 "relaxation"});
      if (sdp["rho"]) cfg.sdp.rho = ToDouble("sdp.rho", Scalar(sdp["rho"], "rho"));
      if (sdp["tol_primal"]) {
        cfg.sdp.tol_primal =
            ToDouble("sdp.tol_primal", Scalar(sdp["tol_primal"], "tol_primal"));
      }
      if (sdp["tol_dual"]) {
        cfg.sdp.tol_dual =
            ToDouble("sdp.tol_dual", Scalar(sdp["tol_dual"], "tol_dual"));
      }
      if (sdp["max_iters"]) {
        cfg.sdp.max_iters =
            ToInt("sdp.max_iters", Scalar(sdp["max_iters"], "max_iters"));
      }
      if (sdp["adaptive_rho"]) {
        cfg.sdp.adaptive_rho = ToBool(sdp["adaptive_rho"], "sdp.adaptive_rho");
      }
      if (sdp["relaxation"]) {
        cfg.sdp.relaxation =
            ToDouble("sdp.relaxation", Scalar(sdp["relaxation"], "relaxation"));
      }
    }
  }
  if (const YAML::Node sweep = root["sweep"]) {
    std::set<std::string> allowed = {"trials", "master_seed"};
    allowed.insert(SweepKeys().begin(), SweepKeys().end());
    CheckKeys(sweep, "sweep", allowed);
    if (sweep["trials"]) {
      cfg.trials = ToInt("sweep.trials", Scalar(sweep["trials"], "trials"));
    }
    if (sweep["master_seed"]) {
      const std::string s = Scalar(sweep["master_seed"], "master_seed");
      try {
        std::size_t used = 0;
        cfg.master_seed = std::stoull(s, &used);
        if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
      } catch (const std::logic_error&) {
        Fail("sweep.master_seed: expected an unsigned integer");
      }
    }
    for (const auto& key : SweepKeys()) {
      if (sweep[key]) {
        cfg.axes[key] = ScalarList(sweep[key], "sweep." + key);
        if (key == "d") d_given = true;
      }
    }
  }
  if (const YAML::Node out = root["output"]) {
    CheckKeys(out, "output", {"dir", "jsonl", "aggregate", "theory", "alpha"});
    if (out["dir"]) cfg.out_dir = Scalar(out["dir"], "output.dir");
    if (out["jsonl"]) cfg.jsonl = Scalar(out["jsonl"], "output.jsonl");
    if (out["aggregate"]) cfg.aggregate = Scalar(out["aggregate"], "output.aggregate");
    if (out["theory"]) cfg.theory = Scalar(out["theory"], "output.theory");
    if (out["alpha"]) {
      cfg.alphas.clear();
      for (const auto& s : ScalarList(out["alpha"], "output.alpha")) {
        cfg.alphas.push_back(ToDouble("output.alpha", s));
      }
    }
  }
  if (cfg.reliability == "explicit" && cfg.q_matrix && !d_given) {
    cfg.axes["d"] = {std::to_string(cfg.q_matrix->rows())};
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(),
                     std::filesystem::path(path).parent_path().string());
}

std::string SerializeConfig(const ExperimentConfig& cfg) {
  auto axis_scalar = [&](YAML::Emitter& e, const std::string& key) {
    e << YAML::Key << key << YAML::Value << cfg.axes.at(key).front();
  };
  auto is_fixed = [&](const std::string& key) {
    return cfg.axes.at(key).size() == 1;
  };
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << cfg.name;

  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "reliability" << YAML::Value << cfg.reliability;
  for (const char* key : {"d", "m", "n", "p_min", "q_max", "p", "q"}) {
    if (is_fixed(key)) axis_scalar(e, key);
  }
  if (cfg.q_matrix) {
    e << YAML::Key << "q_matrix" << YAML::Value << YAML::BeginSeq;
    for (Eigen::Index t = 0; t < cfg.q_matrix->rows(); ++t) {
      e << YAML::Flow << YAML::BeginSeq;
      for (Eigen::Index w = 0; w < cfg.q_matrix->cols(); ++w) {
        e << (*cfg.q_matrix)(t, w);
      }
      e << YAML::EndSeq;
    }
    e << YAML::EndSeq;
  }
  auto emit_vector = [&](const char* key, const Eigen::VectorXd& v) {
    e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index i = 0; i < v.size(); ++i) e << v[i];
    e << YAML::EndSeq;
  };
  if (cfg.mu) emit_vector("task_prior", *cfg.mu);
  if (cfg.nu_prior) emit_vector("worker_prior", *cfg.nu_prior);
  e << YAML::Key << "workers" << YAML::Value << cfg.workers;
  e << YAML::Key << "resample" << YAML::Value << cfg.resample;
  e << YAML::EndMap;

  e << YAML::Key << "algorithm" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "estimators" << YAML::Value << YAML::Flow
    << cfg.estimators;
  for (const char* key : {"r", "l", "nu", "xi"}) {
    if (is_fixed(key)) axis_scalar(e, key);
  }
  e << YAML::Key << "pilot_scored" << YAML::Value << cfg.pilot_scored;
  e << YAML::Key << "c2" << YAML::Value << cfg.c2;
  e << YAML::Key << "sdp" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "rho" << YAML::Value << cfg.sdp.rho;
  e << YAML::Key << "tol_primal" << YAML::Value << cfg.sdp.tol_primal;
  e << YAML::Key << "tol_dual" << YAML::Value << cfg.sdp.tol_dual;
  e << YAML::Key << "max_iters" << YAML::Value << cfg.sdp.max_iters;
  e << YAML::Key << "adaptive_rho" << YAML::Value << cfg.sdp.adaptive_rho;
  e << YAML::Key << "relaxation" << YAML::Value << cfg.sdp.relaxation;
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "trials" << YAML::Value << cfg.trials;
  e << YAML::Key << "master_seed" << YAML::Value << cfg.master_seed;
  for (const auto& key : SweepKeys()) {
    if (!is_fixed(key)) {
      e << YAML::Key << key << YAML::Value << YAML::Flow << cfg.axes.at(key);
    }
  }
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dir" << YAML::Value << cfg.out_dir;
  e << YAML::Key << "jsonl" << YAML::Value << cfg.jsonl;
  e << YAML::Key << "aggregate" << YAML::Value << cfg.aggregate;
  e << YAML::Key << "theory" << YAML::Value << cfg.theory;
  e << YAML::Key << "alpha" << YAML::Value << YAML::Flow << cfg.alphas;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::vector<GridPoint> ExpandGrid(const ExperimentConfig& cfg) {
  const auto& keys = SweepKeys();
  std::size_t total = 1;
  for (const auto& key : keys) total *= cfg.axes.at(key).size();
  std::vector<GridPoint> grid;
  grid.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    GridPoint g;
    g.index = static_cast<int>(flat);
    std::size_t rest = flat;
    for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
      const auto& list = cfg.axes.at(*it);
      g.values[*it] = list[rest % list.size()];
      rest /= list.size();
    }
    g.d = ToInt("d", g.values["d"]);
    g.m = ToInt("m", g.values["m"]);
    g.n = ToInt("n", g.values["n"]);
    g.p_min = ToDouble("p_min", g.values["p_min"]);
    g.q_max = ToDouble("q_max", g.values["q_max"]);
    g.p = ToDouble("p", g.values["p"]);
    g.q = ToDouble("q", g.values["q"]);
    g.r = g.values["r"];
    g.l = ToInt("l", g.values["l"]);
    g.nu = g.values["nu"];
    g.xi = g.values["xi"];
    Require(g.d >= 1, "d must be >= 1");
    Require(g.m >= 1, "m must be >= 1");
    Require(g.n >= 3, "n must be >= 3");
    Require(g.l >= 1, "l must be >= 1");
    if (g.r != "lemma1") Require(ToInt("r", g.r) >= 1, "r must be >= 1");
    Require(g.nu == "oracle" || g.nu == "auto" || g.nu == "low" ||
                g.nu == "mid" || g.nu == "high" ||
                (IsNumber(g.nu) && ToDouble("nu", g.nu) >= 0.0),
            "nu must be oracle, auto, low, mid, high or a number >= 0");
    Require(g.xi == "oracle" || g.xi == "auto" ||
                (IsNumber(g.xi) && ToDouble("xi", g.xi) >= 0.0 &&
                 ToDouble("xi", g.xi) <= 1.0),
            "xi must be oracle, auto or a number in [0, 1]");
    if (cfg.reliability == "explicit") {
      Require(g.d == cfg.q_matrix->rows(),
              "d must match the explicit reliability matrix");
    }
    if (cfg.workers == "planted") {
      Require(g.n % g.d == 0, "planted workers need d to divide n");
    }
    grid.push_back(std::move(g));
  }
  return grid;
}

std::string ConfigId(const ExperimentConfig& cfg, const GridPoint& g) {
  return cfg.name + "/" + std::to_string(g.index);
}

ReliabilityMatrix GridReliability(const ExperimentConfig& cfg,
                                  const GridPoint& g, Rng& rng) {
  if (cfg.reliability == "original") return OriginalModel(g.d, g.p, g.q);
  if (cfg.reliability == "explicit") return ReliabilityMatrix(*cfg.q_matrix);
  return SampleReliability(g.d, g.p_min, g.q_max, rng);
}

TypePriors GridPriors(const ExperimentConfig& cfg, int d) {
  TypePriors uniform = TypePriors::Uniform(d);
  Eigen::VectorXd mu = cfg.mu.value_or(uniform.mu());
  Eigen::VectorXd nu = cfg.nu_prior.value_or(uniform.nu());
  Require(mu.size() == d && nu.size() == d, "priors must have length d");
  return TypePriors(mu, nu);
}

SdpFeasibility CheckSdpFeasibility(const Eigen::MatrixXd& x) {
  SdpFeasibility f;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (x + x.transpose()), Eigen::EigenvaluesOnly);
  f.min_eigenvalue = eig.eigenvalues().minCoeff();
  f.trace_error = std::abs(x.trace() - static_cast<double>(x.rows()));
  f.box_violation =
      std::max({0.0, -x.minCoeff(), x.maxCoeff() - 1.0});
  return f;
}

TrialRecord RunTrial(const ExperimentConfig& cfg, const GridPoint& g,
                     int trial, bool keep_details) {
  TrialRecord rec;
  rec.grid_index = g.index;
  rec.trial = trial;
  rec.config_id = ConfigId(cfg, g);
  const std::uint64_t grid_seed = DeriveSeed(cfg.master_seed, g.index);
  rec.seed = DeriveSeed(grid_seed, static_cast<std::uint64_t>(trial));
  Rng root(rec.seed);

  auto fail_all = [&](const std::string& msg) {
    for (const auto& e : cfg.estimators) {
      EstimatorOutcome o;
      o.estimator = e;
      o.error = msg;
      rec.outcomes.push_back(std::move(o));
    }
    return rec;
  };

  std::optional<TrialSetup> setup;
  try {
    Rng q_rng = cfg.resample == "grid"
                    ? Rng(DeriveSeed(grid_seed, kGridReliabilityStream))
                    : root.Derive(0);
    ReliabilityMatrix q = GridReliability(cfg, g, q_rng);
    TypePriors priors = GridPriors(cfg, g.d);
    AssortativityReport rep = Assortativity(q, priors);
    const int r = g.r == "lemma1"
                      ? Lemma1Budget(g.n, g.d, rep.p_m, rep.p_u, cfg.c2)
                      : ToInt("r", g.r);
    Require(r >= 1, "pilot budget r must be >= 1");
    const int m_total = cfg.pilot_scored ? g.m : g.m + r;
    Require(r <= m_total, "r must not exceed m");
    Rng inst_rng = root.Derive(1);
    std::optional<ModelInstance> inst;
    if (cfg.workers == "planted") {
      inst.emplace(SampleInstanceWithWorkers(
          q, priors, m_total, PlantedWorkerTypes(g.n, g.d, inst_rng), inst_rng));
    } else {
      inst.emplace(SampleInstance(q, priors, m_total, g.n, inst_rng));
    }
    std::vector<int> pilots;
    std::vector<int> scored(g.m);
    std::iota(scored.begin(), scored.end(), 0);
    if (cfg.pilot_scored) {
      Rng pilot_rng = root.Derive(2);
      pilots = ChoosePilotTasks(g.m, r, pilot_rng);
    } else {
      pilots.resize(r);
      std::iota(pilots.begin(), pilots.end(), g.m);
    }
    setup.emplace(TrialSetup{std::move(*inst), std::move(priors),
                             std::move(rep), r, std::move(pilots),
                             std::move(scored)});
  } catch (const std::exception& e) {
    return fail_all(e.what());
  }

  for (const auto& name : cfg.estimators) {
    EstimatorOutcome o;
    o.estimator = name;
    Rng rng = root.Derive(EstimatorStream(name));
    try {
      if (name == "mv") {
        RunMajority(*setup, g, rng, &o);
      } else if (name == "ml") {
        RunMl(*setup, g, rng, &o);
      } else if (name == "ss") {
        RunSubsetEstimator(*setup, g, keep_details, rng, &o);
      } else {
        RunAlg1Estimator(cfg, *setup, g, name == "alg1_auto", keep_details,
                         rng, &o);
      }
      o.ok = true;
    } catch (const std::exception& e) {
      o = EstimatorOutcome{};
      o.estimator = name;
      o.error = e.what();
    }
    rec.outcomes.push_back(std::move(o));
  }
  return rec;
}

std::vector<TrialRecord> RunSweep(const ExperimentConfig& cfg, int jobs) {
  const std::vector<GridPoint> grid = ExpandGrid(cfg);
  const std::size_t units = grid.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<TrialRecord> records(units);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t u = next++; u < units; u = next++) {
      records[u] = RunTrial(cfg, grid[u / cfg.trials],
                            static_cast<int>(u % cfg.trials));
    }
  };
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(units)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

void WriteJsonl(std::ostream& out, const std::vector<TrialRecord>& records) {
  for (const auto& rec : records) {
    for (const auto& o : rec.outcomes) {
      Json line;
      line["config_id"] = rec.config_id;
      line["trial"] = rec.trial;
      line["seed"] = rec.seed;
      line["estimator"] = o.estimator;
      line["status"] = o.ok ? "ok" : "failed";
      line["error"] = o.ok ? Json(nullptr) : Json(o.error);
      Json metrics = Json::object();
      for (const auto& name : kMetricNames) {
        metrics[name] = o.ok ? OptionalJson(MetricValue(o.metrics, name))
                             : Json(nullptr);
      }
      line["metrics"] = metrics;
      Json diag = Json::object();
      diag["d_hat"] = o.d_hat ? Json(*o.d_hat) : Json(nullptr);
      diag["s_hat"] = OptionalJson(o.s_hat);
      diag["nu"] = OptionalJson(o.nu);
      diag["xi"] = OptionalJson(o.xi);
      diag["clusters_found"] =
          o.clusters_found ? Json(*o.clusters_found) : Json(nullptr);
      diag["sdp_converged"] =
          o.sdp_converged ? Json(*o.sdp_converged) : Json(nullptr);
      diag["sdp_iterations"] =
          o.sdp_iterations ? Json(*o.sdp_iterations) : Json(nullptr);
      diag["sdp_primal_residual"] = OptionalJson(o.sdp_primal_residual);
      diag["sdp_dual_residual"] = OptionalJson(o.sdp_dual_residual);
      if (o.sdp_feasibility) {
        diag["sdp_min_eigenvalue"] = o.sdp_feasibility->min_eigenvalue;
        diag["sdp_trace_error"] = o.sdp_feasibility->trace_error;
        diag["sdp_box_violation"] = o.sdp_feasibility->box_violation;
      }
      line["diagnostics"] = diag;
      out << line.dump() << '\n';
    }
  }
}

AggregateCell Aggregate(const std::vector<TrialRecord>& records,
                        int grid_index, const std::string& estimator,
                        const std::string& metric) {
  std::vector<double> values;
  for (const auto& rec : records) {
    if (rec.grid_index != grid_index) continue;
    for (const auto& o : rec.outcomes) {
      if (o.estimator != estimator || !o.ok) continue;
      if (auto v = MetricValue(o.metrics, metric)) values.push_back(*v);
    }
  }
  AggregateCell cell;
  cell.count = static_cast<int>(values.size());
  if (!values.empty()) {
    cell.mean = Mean(values);
    cell.stderr_ = StandardError(values);
  }
  return cell;
}

void WriteAggregateCsv(std::ostream& out, const ExperimentConfig& cfg,
                       const std::vector<TrialRecord>& records) {
  out << "config_id";
  for (const auto& key : SweepKeys()) out << ',' << key;
  out << ",estimator,trials,successes";
  for (const auto& name : kMetricNames) out << ',' << name << "_mean," << name << "_stderr";
  out << '\n' << std::setprecision(10);
  for (const GridPoint& g : ExpandGrid(cfg)) {
    for (const auto& est : cfg.estimators) {
      int trials = 0;
      int ok = 0;
      for (const auto& rec : records) {
        if (rec.grid_index != g.index) continue;
        for (const auto& o : rec.outcomes) {
          if (o.estimator != est) continue;
          ++trials;
          ok += o.ok ? 1 : 0;
        }
      }
      out << ConfigId(cfg, g);
      for (const auto& key : SweepKeys()) out << ',' << g.values.at(key);
      out << ',' << est << ',' << trials << ',' << ok;
      for (const auto& name : kMetricNames) {
        AggregateCell c = Aggregate(records, g.index, est, name);
        if (c.count == 0) {
          out << ",,";
        } else {
          out << ',' << c.mean << ',' << c.stderr_;
        }
      }
      out << '\n';
    }
  }
}

void EmitTheoryCurves(std::ostream& out, const ExperimentConfig& cfg) {
  const std::vector<BoundKind> kinds = {
      BoundKind::kMajorityVote, BoundKind::kSubset, BoundKind::kAlg1,
      BoundKind::kMl, BoundKind::kImpossibility};
  out << "config_id";
  for (const auto& key : SweepKeys()) out << ',' << key;
  out << ",alpha,p_m,p_u";
  for (BoundKind k : kinds) out << ',' << BoundKindName(k);
  out << '\n' << std::setprecision(10);
  for (const GridPoint& g : ExpandGrid(cfg)) {
    Rng rng(DeriveSeed(DeriveSeed(cfg.master_seed, g.index),
                       kGridReliabilityStream));
    ReliabilityMatrix q = GridReliability(cfg, g, rng);
    TypePriors priors = GridPriors(cfg, g.d);
    AssortativityReport rep = Assortativity(q, priors);
    for (double alpha : cfg.alphas) {
      out << ConfigId(cfg, g);
      for (const auto& key : SweepKeys()) out << ',' << g.values.at(key);
      out << ',' << alpha << ',' << rep.p_m << ',' << rep.p_u;
      for (BoundKind k : kinds) {
        out << ',';
        try {
          out << RequiredQueries(k, q, priors, alpha);
        } catch (const ValidationError&) {
          // Bound undefined here (d too small or alpha out of its range).
        }
      }
      out << '\n';
    }
  }
}

}  // namespace crowdsdp
