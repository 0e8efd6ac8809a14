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

// Closed-form error exponents and sample-complexity bounds.
//
// Per-task-type exponents return one value per type t. Prior-aware overloads
// weight the inner sums by nu(w) (and mu(t) for gamma2); with uniform priors
// they coincide with the unweighted forms.

#ifndef CROWDSDP_BOUNDS_H_
#define CROWDSDP_BOUNDS_H_

#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "crowdsdp/model.h"

namespace crowdsdp {

// 1/2 * (sum_w nu(w) (2Q(t,w) - 1))^2. Governs majority voting.
Eigen::VectorXd Theta1(const ReliabilityMatrix& q, const TypePriors& priors);
Eigen::VectorXd Theta1(const ReliabilityMatrix& q);

// (2 min_w Q(t,w) - 1)^2. Worst-case exponent after a type-matching miss.
Eigen::VectorXd Theta2(const ReliabilityMatrix& q);

// Exponent of the weighted vote with weights 1 and 1/sqrt(d-1), evaluated at
// the worst mismatched cluster. Requires d >= 3.
Eigen::VectorXd Theta3(const ReliabilityMatrix& q);

// Same mixture evaluated at the matched cluster. Requires d >= 3.
Eigen::VectorXd Theta3Prime(const ReliabilityMatrix& q);

// log(1 / (2 max_t sum_w nu(w) sqrt(Q(1-Q)))). ML achievability exponent.
double Gamma1(const ReliabilityMatrix& q, const TypePriors& priors);
double Gamma1(const ReliabilityMatrix& q);

// log(1 / (2 sum_{t,w} mu(t) nu(w) sqrt(Q(1-Q)))). Converse exponent.
double Gamma2(const ReliabilityMatrix& q, const TypePriors& priors);
double Gamma2(const ReliabilityMatrix& q);

// Log-odds of the largest reliability. +infinity when that reliability is 1,
// in which case the impossibility bound is vacuous.
double MaxLogOdds(const ReliabilityMatrix& q);

// log(d / (2 sqrt(p(1-p)) + 2(d-1) sqrt(q(1-q)))), the common value of gamma1
// and gamma2 on the original model.
double GammaStar(int d, double p, double q);

struct PiExponents {
  double matched = 0.0;     // pi_m
  double mismatched = 0.0;  // pi_u
};

// Matched and mismatched exponents of the weight scheme (1 on the matched
// cluster, delta(d) elsewhere) on the original model.
PiExponents BoundPi(int d, double p, double q,
                    const std::function<double(int)>& delta);

enum class BoundKind { kMajorityVote, kSubset, kAlg1, kMl, kImpossibility };

BoundKind ParseBoundKind(std::string_view name);
std::string BoundKindName(BoundKind kind);

// Right-hand side of the matching sufficient condition on |A|/m for target
// accuracy alpha in (0, 1/2]. For kImpossibility (alpha in (0, 1/8]) returns
// the supremum x of budgets |A|/m with
//   gamma2 * x + Gamma * sqrt(x) < log(1 / (4 alpha)),
// i.e. every budget below the returned value is provably insufficient.
// Returns +infinity when the bound is vacuous in the sufficient direction
// (an exponent equal to zero).
double RequiredQueries(BoundKind kind, const ReliabilityMatrix& q,
                       const TypePriors& priors, double alpha);

struct FeasibleD {
  int max_d = 1;
  double slack_constant = 1.0;
  // d log(d / alpha) / (c n) at max_d; <= 1 by construction.
  double budget_ratio = 0.0;
  // max_d / ((n / log n) * sqrt(log(1 / alpha))); should be small.
  double growth_ratio = 0.0;
};

// Largest d >= 1 with d * log(d / alpha) <= c * n.
FeasibleD FeasibleNumTypes(int n, double alpha, double c = 1.0);

}  // namespace crowdsdp

#endif  // CROWDSDP_BOUNDS_H_
