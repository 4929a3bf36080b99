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

#ifndef PANDORA_ORACLE_H_
#define PANDORA_ORACLE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "pandora/instance.h"

namespace pandora {

struct OrderingValue {
  std::vector<std::size_t> ordering;
  double value = 0.0;
};

inline constexpr std::size_t kMaxOracleBoxesPerOrder = 10;
inline constexpr std::size_t kMaxOracleBoxes = 7;

// Exact expected objective of the best adaptive stopping rule when boxes are
// opened in the given order. Backward induction over prefixes, grouping the
// scenarios by the volumes observed so far: a node is worth
// min(smallest observed volume, next cost + E[child]); stopping before any
// box is opened is not allowed. Throws InvalidInstance above 10 boxes.
double optimal_stopping_for_order(const PandoraInstance& instance,
                                  std::span<const std::size_t> ordering);

// Minimum over all orderings; ties go to the lexicographically smallest
// ordering. Orderings are evaluated in parallel. Throws above 7 boxes.
OrderingValue optimal_partially_adaptive(const PandoraInstance& instance);

// Serial reference for optimal_partially_adaptive.
OrderingValue optimal_partially_adaptive_serial(const PandoraInstance& instance);

}  // namespace pandora

#endif  // PANDORA_ORACLE_H_
