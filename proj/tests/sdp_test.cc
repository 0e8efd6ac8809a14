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


#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "crowdsdp/error.h"
#include "crowdsdp/kmedoids.h"
#include "crowdsdp/metrics.h"
#include "crowdsdp/model.h"
#include "crowdsdp/rng.h"
#include "crowdsdp/sdp.h"
#include "crowdsdp/tuning.h"
#include "doctest.h"
#include "oracles.h"

namespace crowdsdp {
namespace {

using namespace oracles;

double MinEig(const Eigen::MatrixXd& x) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(x).eigenvalues().minCoeff();
}

void CheckFeasible(const Eigen::MatrixXd& x, double tol) {
  const double n = static_cast<double>(x.rows());
  CHECK(std::abs(x.trace() - n) <= n * tol);
  CHECK(x.minCoeff() >= -tol);
  CHECK(x.maxCoeff() <= 1.0 + tol);
  CHECK(MinEig(x) >= -tol * std::max(1.0, x.norm()));
  CHECK((x - x.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("similarity examples") {
  ResponseSet same(3, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, -1}, {1, 1, -1}, {2, 0, 1}, {2, 1, 1}});
  SimilarityMatrix a = Similarity(same, {0, 1, 2});
  CHECK(a.a(0, 1) == 3);
  CHECK(a.a(1, 0) == 3);
  CHECK(a.a(0, 0) == 0);
  CHECK(a.r == 3);
  ResponseSet one_off(3, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, -1}, {1, 1, 1}, {2, 0, 1}, {2, 1, 1}});
  CHECK(Similarity(one_off, {0, 1, 2}).a(0, 1) == 1);
  ResponseSet missing(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}});
  CHECK_THROWS_AS(Similarity(missing, {0, 1}), ValidationError);
}

TEST_CASE("similarity invariants") {
  Rng rng(6);
  ModelInstance inst =
      SampleInstance(OriginalModel(3, 0.8, 0.6), TypePriors::Uniform(3), 30, 12, rng);
  ResponseSet r = SampleResponses(inst, FullAssignment(30, 12), rng);
  std::vector<int> pilots = {1, 4, 5, 9, 13, 20, 29};
  SimilarityMatrix s = Similarity(r, pilots);
  const int rr = static_cast<int>(pilots.size());
  for (int j = 0; j < 12; ++j) {
    CHECK(s.a(j, j) == 0);
    for (int k = 0; k < 12; ++k) {
      CHECK(s.a(j, k) == s.a(k, j));
      if (j == k) continue;
      CHECK(std::abs(s.a(j, k)) <= rr);
      CHECK(((s.a(j, k) - rr) % 2 + 2) % 2 == 0);
    }
  }
}

TEST_CASE("expected similarity is r Phi") {
  ReliabilityMatrix q = OriginalModel(3, 0.9, 0.7);
  TypePriors u = TypePriors::Uniform(3);
  Eigen::MatrixXd phi = CollectiveQualityCorrelation(q, u);
  const int r = 10, reps = 10000;
  std::vector<int> workers = {0, 0, 1};
  std::vector<int> pilots(r);
  std::iota(pilots.begin(), pilots.end(), 0);
  Rng root(8);
  double s01 = 0, s01sq = 0, s02 = 0, s02sq = 0;
  for (int k = 0; k < reps; ++k) {
    Rng rng = root.Derive(k);
    ModelInstance inst = SampleInstanceWithWorkers(q, u, r, workers, rng);
    SimilarityMatrix a = Similarity(SampleResponses(inst, FullAssignment(r, 3), rng), pilots);
    s01 += a.a(0, 1);
    s01sq += a.a(0, 1) * a.a(0, 1);
    s02 += a.a(0, 2);
    s02sq += a.a(0, 2) * a.a(0, 2);
  }
  auto within = [&](double sum, double sq, double expect) {
    double mean = sum / reps;
    double se = std::sqrt((sq / reps - mean * mean) / reps);
    return std::abs(mean - expect) <= 3 * se;
  };
  CHECK(within(s01, s01sq, r * phi(0, 0)));
  CHECK(within(s02, s02sq, r * phi(0, 1)));
}

TEST_CASE("simplex projection") {
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    int n = rng.UniformInt(1, 10);
    double total = rng.Uniform(0.5, 10.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.Uniform(-5, 5);
    Eigen::VectorXd p = ProjectOntoSimplex(v, total);
    CHECK(p.sum() == doctest::Approx(total).epsilon(1e-12));
    CHECK(p.minCoeff() >= 0.0);
    // Optimality: p = max(v - tau, 0) with one common shift tau on the
    // support.
    double tau = 0.0;
    int support = 0;
    for (int i = 0; i < n; ++i)
      if (p[i] > 0) {
        tau += v[i] - p[i];
        ++support;
      }
    tau /= support;
    for (int i = 0; i < n; ++i) {
      if (p[i] > 0) CHECK(v[i] - p[i] == doctest::Approx(tau).epsilon(1e-9));
      else CHECK(v[i] <= tau + 1e-9);
    }
  }
}

TEST_CASE("spectraplex projection") {
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    int n = rng.UniformInt(2, 8);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.Uniform(-2, 2);
    Eigen::MatrixXd p = ProjectOntoSpectraplex(m, n);
    CHECK(p.trace() == doctest::Approx(n).epsilon(1e-12));
    CHECK(MinEig(p) >= -1e-12);
    // A feasible point of the set is its own projection.
    CHECK((ProjectOntoSpectraplex(p, n) - p).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("feasibility repair") {
  Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    int n = rng.UniformInt(2, 12);
    int rank = rng.UniformInt(1, n);
    Eigen::MatrixXd g(n, rank);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < rank; ++j) g(i, j) = rng.Uniform(-1, 1);
    Eigen::MatrixXd x = RepairFeasibility(g * g.transpose());
    CHECK((x.diagonal().array() == 1.0).all());
    CheckFeasible(x, 1e-12);
  }
  Eigen::MatrixXd ok = Eigen::MatrixXd::Identity(3, 3);
  CHECK(RepairFeasibility(ok) == ok);
  Eigen::MatrixXd zero_row = Eigen::MatrixXd::Zero(2, 2);
  zero_row(0, 0) = 2.0;
  CheckFeasible(RepairFeasibility(zero_row), 1e-12);
}

TEST_CASE("sdp on two noiseless clusters") {
  const int r = 5;
  Eigen::MatrixXd a(4, 4);
  a << 0, r, -r, -r,
       r, 0, -r, -r,
       -r, -r, 0, r,
       -r, -r, r, 0;
  SdpConfig cfg;
  cfg.nu = 0.0;
  SdpSolution sol = SolveSdp(a, cfg);
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(4, 4);
  block.topLeftCorner(2, 2).setOnes();
  block.bottomRightCorner(2, 2).setOnes();
  CHECK(sol.converged);
  CHECK((sol.x - block).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(SdpObjective(a, 0.0, block) >= SdpObjective(a, 0.0, sol.x) - 1e-9);
}

TEST_CASE("sdp degenerate and invalid input") {
  SdpConfig cfg;
  SdpSolution flat = SolveSdp(Eigen::MatrixXd::Zero(5, 5), cfg);
  CheckFeasible(flat.x, 1e-6);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Zero(3, 3);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(SolveSdp(asym, cfg), ValidationError);
  SdpConfig bad;
  bad.rho = 0.0;
  CHECK_THROWS_AS(SolveSdp(Eigen::MatrixXd::Zero(3, 3), bad), ValidationError);
  bad = SdpConfig();
  bad.nu = -1.0;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = SdpConfig();
  bad.tol_dual = 0.0;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
  bad = SdpConfig();
  bad.max_iters = 0;
  CHECK_THROWS_AS(bad.Validate(), ValidationError);
}

TEST_CASE("sdp output is feasible and improves on the identity") {
  Rng rng(4);
  for (int k = 0; k < 12; ++k) {
    const int n = 30, r = 40;
    ModelInstance inst =
        SampleInstance(SampleReliability(3, 0.8, 0.7, rng), TypePriors::Uniform(3), r, n, rng);
    std::vector<int> pilots(r);
    std::iota(pilots.begin(), pilots.end(), 0);
    SimilarityMatrix a = Similarity(SampleResponses(inst, FullAssignment(r, n), rng), pilots);
    SdpConfig cfg;
    cfg.nu = rng.Uniform(0.0, 0.3 * r);
    cfg.max_iters = 300;
    SdpSolution sol = SolveSdp(a, cfg);
    CheckFeasible(sol.x, 1e-6);
    Eigen::MatrixXd ad = a.ToDouble();
    double scale = (ad.array() - cfg.nu).abs().maxCoeff();
    CHECK(SdpObjective(ad, cfg.nu, sol.x) >=
          SdpObjective(ad, cfg.nu, Eigen::MatrixXd::Identity(n, n)) - 1e-6 * scale * n * n);
  }
}

TEST_CASE("sdp recovers clusters in the reference regime") {
  ReliabilityMatrix q = OriginalModel(3, 0.9, 0.5);
  TypePriors u = TypePriors::Uniform(3);
  AssortativityReport rep = Assortativity(q, u);
  const int n = 60, r = 120;
  int exact = 0;
  for (int s = 0; s < 15; ++s) {
    Rng rng(500 + s);
    ModelInstance inst = SampleInstance(q, u, r, n, rng);
    std::vector<int> pilots(r);
    std::iota(pilots.begin(), pilots.end(), 0);
    SimilarityMatrix a = Similarity(SampleResponses(inst, FullAssignment(r, n), rng), pilots);
    SdpConfig cfg;
    cfg.nu = r * (rep.p_m + rep.p_u) / 2;
    SdpSolution sol = SolveSdp(a, cfg);
    std::set<int> present(inst.worker_types().begin(), inst.worker_types().end());
    KMedoidsResult km = KMedoidsRows(sol.x, 3, rng);
    exact += present.size() == 3 &&
             ClusteringError(km.clusters, inst.worker_types(), 3).error == 0.0;
  }
  CHECK(exact >= 14);
}

TEST_CASE("k-medoids") {
  Rng rng(5);
  // Block-constant rows: three blocks of sizes 4, 3, 5.
  std::vector<int> truth = {0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2};
  const int n = static_cast<int>(truth.size());
  Eigen::MatrixXd x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = truth[i] == truth[j] ? 1.0 : 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng r(seed);
    KMedoidsResult km = KMedoidsRows(x, 3, r);
    CHECK(ClusteringError(km.clusters, truth, 3).error == 0.0);
  }

  KMedoidsResult single = KMedoidsRows(x, n, rng);
  std::vector<int> sizes = single.clusters.Sizes();
  CHECK(std::all_of(sizes.begin(), sizes.end(), [](int s) { return s == 1; }));
  CHECK_THROWS_AS(KMedoidsRows(x, n + 1, rng), ValidationError);
  CHECK_THROWS_AS(KMedoidsRows(x, 0, rng), ValidationError);

  for (int k = 0; k < 30; ++k) {
    int m = rng.UniformInt(3, 15);
    Eigen::MatrixXd pts(m, 3);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < 3; ++j) pts(i, j) = rng.Uniform(-1, 1);
    KMedoidsResult one = KMedoidsRows(pts, 1, rng);
    int best = 0;
    double best_cost = 1e300;
    for (int c = 0; c < m; ++c) {
      double cost = 0;
      for (int i = 0; i < m; ++i) cost += (pts.row(i) - pts.row(c)).norm();
      if (cost < best_cost) {
        best_cost = cost;
        best = c;
      }
    }
    CHECK(one.clusters.medoids()[0] == best);

    int kk = rng.UniformInt(1, m);
    KMedoidsResult many = KMedoidsRows(pts, kk, rng);
    std::vector<int> sz = many.clusters.Sizes();
    CHECK(std::all_of(sz.begin(), sz.end(), [](int s) { return s > 0; }));
    for (std::size_t t = 1; t < many.objective_trace.size(); ++t)
      CHECK(many.objective_trace[t] <= many.objective_trace[t - 1] + 1e-12);
  }

  Rng a(77), b(77);
  Eigen::MatrixXd pts = Eigen::MatrixXd::Random(20, 4);
  CHECK(KMedoidsRows(pts, 4, a).clusters.labels() == KMedoidsRows(pts, 4, b).clusters.labels());
}

TEST_CASE("cluster assignment invariants") {
  CHECK_THROWS_AS(ClusterAssignment({0, 2, 2}, 3), ValidationError);
  CHECK_THROWS_AS(ClusterAssignment({0, 3}, 3), ValidationError);
  ClusterAssignment c({1, 0, 1}, 2);
  CHECK(c.Members(1) == std::vector<int>{0, 2});
}

TEST_CASE("tuning on the population similarity") {
  for (auto [p, q] : {std::pair{0.9, 0.5}, std::pair{0.9, 0.7}, std::pair{0.8, 0.6}}) {
    for (int d : {2, 3, 5}) {
      const int n = 60, r = 120, s = n / d;
      AssortativityReport rep = Assortativity(OriginalModel(d, p, q), TypePriors::Uniform(d));
      const double pm = rep.p_m, pu = rep.p_u;
      Rng rng(1);
      TuningEstimate est = Tune(PopulationSimilarity(n, d, r, pm, pu), rng);
      auto rel = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::abs(b); };
      CHECK(rel(est.eigenvalues[0], r * (s - 1) * (pm - pu) + r * (n - 1) * pu));
      for (int i = 1; i < d; ++i) CHECK(rel(est.eigenvalues[i], r * (s - 1) * (pm - pu) - r * pu));
      for (int i = d; i < n; ++i) CHECK(rel(est.eigenvalues[i], -r * pm));
      CHECK(est.d_hat == d);
      CHECK(est.s_hat == doctest::Approx(s));
      CHECK(rel(est.nu_hat, r * (pm + pu) / 2));
    }
  }
}

TEST_CASE("tuning on a zero matrix") {
  std::set<int> seen;
  for (int seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    TuningEstimate est = Tune(Eigen::MatrixXd::Zero(8, 8), rng);
    CHECK(est.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
    CHECK(est.nu_hat == 0.0);
    CHECK(est.d_hat >= 2);
    CHECK(est.d_hat <= 7);
    seen.insert(est.d_hat);
  }
  CHECK(seen.size() > 1);
  Rng rng(1);
  CHECK_THROWS_AS(Tune(Eigen::MatrixXd::Zero(2, 2), rng), ValidationError);
}

TEST_CASE("budget and bracket") {
  const double pm = 0.64 / 3, pu = 0.0;
  double direct = 9 * std::pow(std::log(60.0), 2) / ((pm - pu) * (pm - pu));
  CHECK(Lemma1Budget(60, 3, pm, pu, 1.0) == static_cast<int>(std::ceil(direct)));
  CHECK(Lemma1Budget(60, 3, 0.2133, 0.0, 1.0) ==
        static_cast<int>(std::ceil(9 * std::pow(std::log(60.0), 2) / (0.2133 * 0.2133))));
  CHECK(Lemma1Budget(60, 3, pm, pu, 0.0) == 0);
  CHECK_THROWS_AS(Lemma1Budget(60, 3, 0.2, 0.2, 1.0), ValidationError);
  NuBracket b = ExactRecoveryBracket(100, 0.3, 0.1);
  CHECK(b.low == doctest::Approx(100 * (0.075 + 0.075)));
  CHECK(b.mid == doctest::Approx(20.0));
  CHECK(b.high == doctest::Approx(100 * (0.225 + 0.025)));
}

}  // namespace
}  // namespace crowdsdp
