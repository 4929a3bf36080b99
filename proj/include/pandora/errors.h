// Copyright 2026 The Pandora Authors
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

#ifndef PANDORA_ERRORS_H_
#define PANDORA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pandora {

// Malformed or inconsistent problem data.
class InvalidInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The scenario's finite-volume boxes carry less than unit mass in X, so no
// threshold time exists.
class NoThreshold : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative routine hit its iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments outside the documented domain of a numeric evaluator.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pandora

#endif  // PANDORA_ERRORS_H_
