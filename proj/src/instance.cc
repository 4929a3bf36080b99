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

#include "pandora/instance.h"

#include <algorithm>
#include <sstream>

#include "pandora/errors.h"

namespace pandora {

std::vector<std::string> validate(const PandoraInstance& instance) {
  std::vector<std::string> report;
  const std::size_t n = instance.num_boxes();
  if (n == 0) report.emplace_back("instance has no boxes");
  for (std::size_t i = 0; i < n; ++i) {
    const double c = instance.costs[i];
    if (!std::isfinite(c) || c < 0.0) {
      std::ostringstream os;
      os << "cost of box " << i << " is not a finite nonnegative number";
      report.push_back(os.str());
    }
  }
  if (instance.scenarios.empty()) report.emplace_back("no scenarios");
  double total = 0.0;
  for (std::size_t s = 0; s < instance.scenarios.size(); ++s) {
    const ScenarioData& sd = instance.scenarios[s];
    std::ostringstream where;
    where << "scenario " << s << ": ";
    if (!(sd.probability > 0.0 && sd.probability <= 1.0)) {
      report.push_back(where.str() + "probability outside (0,1]");
    }
    total += sd.probability;
    if (sd.volumes.size() != n) {
      report.push_back(where.str() + "volume count differs from box count");
      continue;
    }
    bool any_finite = false;
    for (double v : sd.volumes) {
      if (std::isnan(v) || v < 0.0) {
        report.push_back(where.str() + "volume is negative or NaN");
      }
      if (is_finite_volume(v)) any_finite = true;
    }
    if (!any_finite) report.push_back(where.str() + "no finite volume");
  }
  if (!instance.scenarios.empty() && std::abs(total - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "probabilities sum to " << total << " != 1";
    report.push_back(os.str());
  }
  return report;
}

std::vector<std::string> validate(const SetCoverInstance& sc) {
  std::vector<std::string> report;
  std::vector<bool> covered(sc.universe_size, false);
  for (std::size_t s = 0; s < sc.sets.size(); ++s) {
    for (std::size_t e : sc.sets[s]) {
      if (e >= sc.universe_size) {
        std::ostringstream os;
        os << "set " << s << " contains out-of-range element " << e;
        report.push_back(os.str());
      } else {
        covered[e] = true;
      }
    }
  }
  for (std::size_t e = 0; e < sc.universe_size; ++e) {
    if (!covered[e]) {
      std::ostringstream os;
      os << "element " << e << " is covered by no set";
      report.push_back(os.str());
    }
  }
  if (sc.universe_size == 0) report.emplace_back("empty universe");
  if (sc.sets.empty()) report.emplace_back("no sets");
  return report;
}

PandoraInstance from_mssc(const SetCoverInstance& sc) {
  const auto problems = validate(sc);
  if (!problems.empty()) throw InvalidInstance(problems.front());
  PandoraInstance out;
  out.costs.assign(sc.sets.size(), 1.0);
  const double p = 1.0 / static_cast<double>(sc.universe_size);
  out.scenarios.resize(sc.universe_size);
  for (auto& sd : out.scenarios) {
    sd.probability = p;
    sd.volumes.assign(sc.sets.size(), kInfinite);
  }
  for (std::size_t s = 0; s < sc.sets.size(); ++s) {
    for (std::size_t e : sc.sets[s]) out.scenarios[e].volumes[s] = 0.0;
  }
  return out;
}

bool is_unit_cost(const PandoraInstance& instance) {
  return std::all_of(instance.costs.begin(), instance.costs.end(),
                     [](double c) { return c == 1.0; });
}

bool is_mssc_like(const PandoraInstance& instance) {
  if (!is_unit_cost(instance)) return false;
  for (const auto& sd : instance.scenarios) {
    for (double v : sd.volumes) {
      if (v != 0.0 && is_finite_volume(v)) return false;
    }
  }
  return true;
}

SetCoverInstance to_mssc(const PandoraInstance& instance) {
  if (!is_mssc_like(instance)) {
    throw InvalidInstance("instance is not a min-sum set cover instance");
  }
  SetCoverInstance sc;
  sc.universe_size = instance.num_scenarios();
  sc.sets.resize(instance.num_boxes());
  for (std::size_t e = 0; e < instance.num_scenarios(); ++e) {
    for (std::size_t i = 0; i < instance.num_boxes(); ++i) {
      if (instance.scenarios[e].volumes[i] == 0.0) sc.sets[i].push_back(e);
    }
  }
  return sc;
}

std::vector<double> scenario_cdf(const PandoraInstance& instance) {
  std::vector<double> cdf(instance.num_scenarios());
  double acc = 0.0;
  for (std::size_t s = 0; s < cdf.size(); ++s) {
    acc += instance.scenarios[s].probability;
    cdf[s] = acc;
  }
  if (!cdf.empty()) cdf.back() = 1.0;
  return cdf;
}

std::size_t sample_scenario_index(const PandoraInstance& instance,
                                  RandomStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const std::size_t m = instance.num_scenarios();
  for (std::size_t s = 0; s + 1 < m; ++s) {
    acc += instance.scenarios[s].probability;
    if (u < acc) return s;
  }
  return m - 1;
}

Scenario sample_scenario(const PandoraInstance& instance, RandomStream& rng) {
  const std::size_t s = sample_scenario_index(instance, rng);
  return Scenario{s, instance.scenarios[s].volumes};
}

PandoraInstance random_instance(std::size_t num_boxes,
                                std::size_t num_scenarios,
                                std::pair<double, double> cost_range,
                                std::pair<double, double> volume_range,
                                double inf_prob, RandomStream& rng) {
  if (num_boxes == 0 || num_scenarios == 0) {
    throw InvalidInstance("random_instance needs at least one box and scenario");
  }
  if (cost_range.first < 0.0 || cost_range.second < cost_range.first ||
      volume_range.first < 0.0 || volume_range.second < volume_range.first ||
      inf_prob < 0.0 || inf_prob >= 1.0) {
    throw InvalidInstance("random_instance: bad ranges");
  }
  auto draw = [&rng](std::pair<double, double> r) {
    return r.first + (r.second - r.first) * rng.uniform();
  };
  PandoraInstance out;
  out.costs.resize(num_boxes);
  for (double& c : out.costs) c = draw(cost_range);
  out.scenarios.resize(num_scenarios);
  double total = 0.0;
  for (auto& sd : out.scenarios) {
    sd.volumes.resize(num_boxes);
    bool any_finite = false;
    while (!any_finite) {
      for (double& v : sd.volumes) {
        if (rng.uniform() < inf_prob) {
          v = kInfinite;
        } else {
          v = draw(volume_range);
          any_finite = true;
        }
      }
    }
    sd.probability = 0.05 + rng.uniform();
    total += sd.probability;
  }
  for (auto& sd : out.scenarios) sd.probability /= total;
  return out;
}

}  // namespace pandora
