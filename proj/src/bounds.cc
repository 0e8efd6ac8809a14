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

#include "crowdsdp/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crowdsdp/error.h"

namespace crowdsdp {
namespace {

using internal::Require;

constexpr double kInf = std::numeric_limits<double>::infinity();

double Bhattacharyya(double x) { return std::sqrt(x * (1.0 - x)); }

// Shared shape of the two clustering-based sufficient conditions:
//   min{ 4d log((6d+3)/alpha) / min_t[(p*-q*)^2 + theta(t)],
//        4d log(3/alpha) / min_t theta(t) }.
double TwoStageBound(const ReliabilityMatrix& q, const Eigen::VectorXd& theta,
                     double alpha) {
  const int d = q.d();
  double min_theta = theta.minCoeff();
  double min_gap_theta = kInf;
  for (int t = 0; t < d; ++t) {
    double q_star = -kInf;
    for (int w = 0; w < d; ++w) {
      if (w != t) q_star = std::max(q_star, q(t, w));
    }
    double gap = q(t, t) - q_star;
    min_gap_theta = std::min(min_gap_theta, gap * gap + theta[t]);
  }
  double first = min_gap_theta > 0.0
                     ? 4.0 * d * std::log((6.0 * d + 3.0) / alpha) / min_gap_theta
                     : kInf;
  double second =
      min_theta > 0.0 ? 4.0 * d * std::log(3.0 / alpha) / min_theta : kInf;
  return std::min(first, second);
}

Eigen::VectorXd Theta3Mixture(const ReliabilityMatrix& q, bool use_matched) {
  const int d = q.d();
  Require(d >= 3, "theta3 requires d >= 3");
  const double c = 1.0 / std::sqrt(d - 1.0);
  Eigen::VectorXd out(d);
  for (int t = 0; t < d; ++t) {
    double sum = 0.0;
    double min_q = 1.0;
    for (int w = 0; w < d; ++w) {
      sum += 2.0 * q(t, w) - 1.0;
      min_q = std::min(min_q, q(t, w));
    }
    double tail = use_matched ? q(t, t) : min_q;
    double v = c * sum + (1.0 - c) * (2.0 * tail - 1.0);
    out[t] = 0.5 * v * v;
  }
  return out;
}

}  // namespace

Eigen::VectorXd Theta1(const ReliabilityMatrix& q, const TypePriors& priors) {
  Require(priors.d() == q.d(), "priors and reliability disagree on d");
  const int d = q.d();
  Eigen::VectorXd out(d);
  for (int t = 0; t < d; ++t) {
    double s = 0.0;
    for (int w = 0; w < d; ++w) s += priors.nu()[w] * (2.0 * q(t, w) - 1.0);
    out[t] = 0.5 * s * s;
  }
  return out;
}

Eigen::VectorXd Theta1(const ReliabilityMatrix& q) {
  const int d = q.d();
  Eigen::VectorXd out(d);
  for (int t = 0; t < d; ++t) {
    double s = 0.0;
    for (int w = 0; w < d; ++w) s += 2.0 * q(t, w) - 1.0;
    s /= d;
    out[t] = 0.5 * s * s;
  }
  return out;
}

Eigen::VectorXd Theta2(const ReliabilityMatrix& q) {
  Eigen::VectorXd out(q.d());
  for (int t = 0; t < q.d(); ++t) {
    double v = 2.0 * q.matrix().row(t).minCoeff() - 1.0;
    out[t] = v * v;
  }
  return out;
}

Eigen::VectorXd Theta3(const ReliabilityMatrix& q) {
  return Theta3Mixture(q, /*use_matched=*/false);
}

Eigen::VectorXd Theta3Prime(const ReliabilityMatrix& q) {
  return Theta3Mixture(q, /*use_matched=*/true);
}

double Gamma1(const ReliabilityMatrix& q, const TypePriors& priors) {
  Require(priors.d() == q.d(), "priors and reliability disagree on d");
  double worst = 0.0;
  for (int t = 0; t < q.d(); ++t) {
    double s = 0.0;
    for (int w = 0; w < q.d(); ++w) s += priors.nu()[w] * Bhattacharyya(q(t, w));
    worst = std::max(worst, s);
  }
  return std::log(1.0 / (2.0 * worst));
}

double Gamma1(const ReliabilityMatrix& q) {
  double worst = 0.0;
  for (int t = 0; t < q.d(); ++t) {
    double s = 0.0;
    for (int w = 0; w < q.d(); ++w) s += Bhattacharyya(q(t, w));
    worst = std::max(worst, s);
  }
  return std::log(q.d() / (2.0 * worst));
}

double Gamma2(const ReliabilityMatrix& q, const TypePriors& priors) {
  Require(priors.d() == q.d(), "priors and reliability disagree on d");
  double s = 0.0;
  for (int t = 0; t < q.d(); ++t) {
    for (int w = 0; w < q.d(); ++w) {
      s += priors.mu()[t] * priors.nu()[w] * Bhattacharyya(q(t, w));
    }
  }
  return std::log(1.0 / (2.0 * s));
}

double Gamma2(const ReliabilityMatrix& q) {
  double s = 0.0;
  for (int t = 0; t < q.d(); ++t) {
    for (int w = 0; w < q.d(); ++w) s += Bhattacharyya(q(t, w));
  }
  const double d = q.d();
  return std::log(d * d / (2.0 * s));
}

double MaxLogOdds(const ReliabilityMatrix& q) {
  double top = q.max_entry();
  if (top >= 1.0) return kInf;
  return std::log(top / (1.0 - top));
}

double GammaStar(int d, double p, double q) {
  Require(d >= 1, "d must be positive");
  return std::log(d / (2.0 * Bhattacharyya(p) + 2.0 * (d - 1) * Bhattacharyya(q)));
}

PiExponents BoundPi(int d, double p, double q,
                    const std::function<double(int)>& delta) {
  Require(d >= 2, "pi exponents need d >= 2");
  const double dl = delta(d);
  Require(dl >= 0.0, "delta(d) must be nonnegative");
  const double bp = 2.0 * p - 1.0;
  const double bq = 2.0 * q - 1.0;
  const double norm = 1.0 + (d - 1) * dl * dl;
  const double matched = bp + (d - 1) * dl * bq;
  const double mismatched = dl * bp + (1.0 + (d - 2) * dl) * bq;
  return {matched * matched / norm, mismatched * mismatched / norm};
}

BoundKind ParseBoundKind(std::string_view name) {
  if (name == "mv") return BoundKind::kMajorityVote;
  if (name == "subset" || name == "ss") return BoundKind::kSubset;
  if (name == "alg1") return BoundKind::kAlg1;
  if (name == "ml") return BoundKind::kMl;
  if (name == "impossibility") return BoundKind::kImpossibility;
  throw ValidationError("unknown bound kind: " + std::string(name));
}

std::string BoundKindName(BoundKind kind) {
  switch (kind) {
    case BoundKind::kMajorityVote: return "mv";
    case BoundKind::kSubset: return "subset";
    case BoundKind::kAlg1: return "alg1";
    case BoundKind::kMl: return "ml";
    case BoundKind::kImpossibility: return "impossibility";
  }
  return "?";
}

double RequiredQueries(BoundKind kind, const ReliabilityMatrix& q,
                       const TypePriors& priors, double alpha) {
  const double alpha_max = kind == BoundKind::kImpossibility ? 0.125 : 0.5;
  Require(alpha > 0.0 && alpha <= alpha_max,
          "target accuracy alpha out of range");
  switch (kind) {
    case BoundKind::kMajorityVote: {
      double theta = Theta1(q, priors).minCoeff();
      return theta > 0.0 ? std::log(1.0 / alpha) / theta : kInf;
    }
    case BoundKind::kSubset:
      return TwoStageBound(q, Theta2(q), alpha);
    case BoundKind::kAlg1:
      return TwoStageBound(q, Theta3(q), alpha);
    case BoundKind::kMl: {
      double gamma = Gamma1(q, priors);
      return gamma > 0.0 ? std::log(1.0 / alpha) / gamma : kInf;
    }
    case BoundKind::kImpossibility: {
      const double rhs = std::log(1.0 / (4.0 * alpha));
      const double g2 = Gamma2(q, priors);
      const double big = MaxLogOdds(q);
      if (std::isinf(big)) return 0.0;
      // Positive root of g2 * y^2 + big * y - rhs = 0 in y = sqrt(x).
      double y;
      if (g2 <= 0.0) {
        y = big > 0.0 ? rhs / big : kInf;
      } else {
        y = (-big + std::sqrt(big * big + 4.0 * g2 * rhs)) / (2.0 * g2);
      }
      return y * y;
    }
  }
  return kInf;
}

FeasibleD FeasibleNumTypes(int n, double alpha, double c) {
  Require(n >= 2, "feasible d needs n >= 2");
  Require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  Require(c > 0.0, "slack constant must be positive");
  auto cost = [&](int d) { return d * std::log(d / alpha); };
  FeasibleD out;
  out.slack_constant = c;
  int d = 1;
  // cost is increasing in d for alpha < 1; scan until it exceeds the budget.
  while (cost(d + 1) <= c * n) ++d;
  out.max_d = d;
  out.budget_ratio = cost(d) / (c * n);
  out.growth_ratio =
      d / ((n / std::log(static_cast<double>(n))) *
           std::sqrt(std::log(1.0 / alpha)));
  return out;
}

}  // namespace crowdsdp
