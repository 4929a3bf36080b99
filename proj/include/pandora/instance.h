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

#ifndef PANDORA_INSTANCE_H_
#define PANDORA_INSTANCE_H_

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pandora/rng.h"

namespace pandora {

// Volume of a box that can never be taken. Only ever compared, never used in
// arithmetic; see is_finite_volume().
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

inline bool is_finite_volume(double v) { return !std::isinf(v); }

struct ScenarioData {
  double probability = 0.0;
  std::vector<double> volumes;  // one entry per box, kInfinite allowed
};

// Opening costs plus an explicit finite-support distribution over volume
// vectors. Treated as immutable once built.
struct PandoraInstance {
  std::vector<double> costs;
  std::vector<ScenarioData> scenarios;

  std::size_t num_boxes() const { return costs.size(); }
  std::size_t num_scenarios() const { return scenarios.size(); }
};

// A realized scenario: which support point, and its volumes.
struct Scenario {
  std::size_t index = 0;
  std::vector<double> volumes;
};

struct SetCoverInstance {
  std::size_t universe_size = 0;
  std::vector<std::vector<std::size_t>> sets;
};

// Empty iff the instance satisfies every structural invariant.
std::vector<std::string> validate(const PandoraInstance& instance);
std::vector<std::string> validate(const SetCoverInstance& sc);

// One unit-cost box per set, one equiprobable scenario per element; a box has
// volume 0 in the scenarios of the elements it covers and kInfinite
// otherwise. Throws InvalidInstance if some element is uncovered.
PandoraInstance from_mssc(const SetCoverInstance& sc);

// Inverse of from_mssc for instances with unit costs, equiprobable scenarios
// and volumes in {0, kInfinite}. Throws InvalidInstance otherwise.
SetCoverInstance to_mssc(const PandoraInstance& instance);
bool is_mssc_like(const PandoraInstance& instance);
bool is_unit_cost(const PandoraInstance& instance);

// Index drawn with the scenario probabilities from one uniform variate.
std::size_t sample_scenario_index(const PandoraInstance& instance,
                                  RandomStream& rng);
Scenario sample_scenario(const PandoraInstance& instance, RandomStream& rng);

// Uniform costs and volumes in the given ranges; each volume is kInfinite
// with probability inf_prob. Scenarios without a finite volume are redrawn.
// Probabilities are normalized uniform weights.
PandoraInstance random_instance(std::size_t num_boxes,
                                std::size_t num_scenarios,
                                std::pair<double, double> cost_range,
                                std::pair<double, double> volume_range,
                                double inf_prob, RandomStream& rng);

// Cumulative distribution of scenario probabilities, last entry forced to 1.
std::vector<double> scenario_cdf(const PandoraInstance& instance);

}  // namespace pandora

#endif  // PANDORA_INSTANCE_H_
