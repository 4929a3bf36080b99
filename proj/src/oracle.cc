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

#include "pandora/oracle.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "pandora/errors.h"

namespace pandora {
namespace {

// Probability-weighted cost of the best continuation from a node in which
// the first `depth` boxes of the order are open and `members` are the
// scenarios consistent with what was seen. `observed` is the smallest volume
// revealed so far.
double weighted_value(const PandoraInstance& instance,
                      std::span<const std::size_t> order, std::size_t depth,
                      const std::vector<std::size_t>& members,
                      double observed) {
  double mass = 0.0;
  for (std::size_t s : members) mass += instance.scenarios[s].probability;

  double stop = kInfinite;
  if (depth > 0 && is_finite_volume(observed)) stop = observed * mass;
  if (depth == order.size()) return stop;

  const std::size_t box = order[depth];
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t s : members) {
    groups[instance.scenarios[s].volumes[box]].push_back(s);
  }
  double go = instance.costs[box] * mass;
  for (const auto& [volume, group] : groups) {
    go += weighted_value(instance, order, depth + 1, group,
                         std::min(observed, volume));
  }
  return std::min(stop, go);
}

void check_instance(const PandoraInstance& instance) {
  const auto problems = validate(instance);
  if (!problems.empty()) throw InvalidInstance(problems.front());
}

std::vector<std::vector<std::size_t>> all_orderings(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

OrderingValue pick_best(std::vector<std::vector<std::size_t>>& orders,
                        const std::vector<double>& values) {
  // Orders are generated lexicographically, so the first minimum wins ties.
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] < values[best]) best = k;
  }
  return OrderingValue{std::move(orders[best]), values[best]};
}

}  // namespace

double optimal_stopping_for_order(const PandoraInstance& instance,
                                  std::span<const std::size_t> ordering) {
  if (instance.num_boxes() > kMaxOracleBoxesPerOrder) {
    throw InvalidInstance("oracle supports at most 10 boxes");
  }
  if (ordering.size() != instance.num_boxes()) {
    throw InvalidInstance("ordering must list every box once");
  }
  std::vector<std::size_t> all(instance.num_scenarios());
  std::iota(all.begin(), all.end(), 0);
  return weighted_value(instance, ordering, 0, all, kInfinite);
}

OrderingValue optimal_partially_adaptive(const PandoraInstance& instance) {
  check_instance(instance);
  if (instance.num_boxes() > kMaxOracleBoxes) {
    throw InvalidInstance("oracle enumeration supports at most 7 boxes");
  }
  auto orders = all_orderings(instance.num_boxes());
  std::vector<double> values(orders.size());
  const auto count = static_cast<std::int64_t>(orders.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t k = 0; k < count; ++k) {
    values[static_cast<std::size_t>(k)] =
        optimal_stopping_for_order(instance, orders[static_cast<std::size_t>(k)]);
  }
  return pick_best(orders, values);
}

OrderingValue optimal_partially_adaptive_serial(const PandoraInstance& instance) {
  check_instance(instance);
  if (instance.num_boxes() > kMaxOracleBoxes) {
    throw InvalidInstance("oracle enumeration supports at most 7 boxes");
  }
  auto orders = all_orderings(instance.num_boxes());
  std::vector<double> values;
  values.reserve(orders.size());
  for (const auto& order : orders) {
    values.push_back(optimal_stopping_for_order(instance, order));
  }
  return pick_best(orders, values);
}

}  // namespace pandora
