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

#ifndef CROWDSDP_RNG_H_
#define CROWDSDP_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace crowdsdp {

// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t MixSeed(std::uint64_t x);

// Seed of the child stream `index` of a parent stream seeded with `seed`.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

// A seeded pseudo-random stream. Every random draw in the library goes
// through one of these; child streams are derived by hashing so that the
// outcome of a trial never depends on scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(MixSeed(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent child stream; does not advance this stream.
  Rng Derive(std::uint64_t index) const { return Rng(DeriveSeed(seed_, index)); }

  // Uniform on [lo, hi]. Returns lo when lo == hi.
  double Uniform(double lo, double hi);
  // Uniform integer on [lo, hi] inclusive.
  int UniformInt(int lo, int hi);
  bool Bernoulli(double p);
  // Index drawn from a discrete distribution with the given weights.
  int Categorical(const std::vector<double>& weights);
  // k distinct values of [0, n) in random order.
  std::vector<int> SampleWithoutReplacement(int n, int k);
  // k distinct elements of `pool` in random order.
  std::vector<int> SampleFrom(const std::vector<int>& pool, int k);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace crowdsdp

#endif  // CROWDSDP_RNG_H_
