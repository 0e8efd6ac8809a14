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

#include "crowdsdp/rng.h"

#include <algorithm>
#include <numeric>

#include "crowdsdp/error.h"

namespace crowdsdp {

std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  return MixSeed(MixSeed(seed) ^ (index * 0xd1342543de82ef95ULL + 1));
}

double Rng::Uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

int Rng::UniformInt(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

bool Rng::Bernoulli(double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return std::bernoulli_distribution(p)(engine_);
}

int Rng::Categorical(const std::vector<double>& weights) {
  return std::discrete_distribution<int>(weights.begin(), weights.end())(
      engine_);
}

std::vector<int> Rng::SampleWithoutReplacement(int n, int k) {
  internal::Require(0 <= k && k <= n, "sample size exceeds population");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  return SampleFrom(pool, k);
}

std::vector<int> Rng::SampleFrom(const std::vector<int>& pool, int k) {
  internal::Require(0 <= k && k <= static_cast<int>(pool.size()),
                    "sample size exceeds population");
  std::vector<int> v = pool;
  // Partial Fisher-Yates.
  for (int i = 0; i < k; ++i) {
    int j = UniformInt(i, static_cast<int>(v.size()) - 1);
    std::swap(v[i], v[j]);
  }
  v.resize(k);
  return v;
}

}  // namespace crowdsdp
