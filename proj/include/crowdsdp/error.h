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

#ifndef CROWDSDP_ERROR_H_
#define CROWDSDP_ERROR_H_

#include <stdexcept>
#include <string>

namespace crowdsdp {

// Raised when an argument violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Raised when a task assignment cannot be built, e.g. an inferred cluster
// holds fewer than l workers.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

namespace internal {

inline void Require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace internal
}  // namespace crowdsdp

#endif  // CROWDSDP_ERROR_H_
