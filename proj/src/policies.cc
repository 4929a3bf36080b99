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

#include "pandora/policies.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pandora/errors.h"

namespace pandora {

namespace {

// Opens every arrived box with alpha <= limit and keeps the smallest volume.
RunRecord finish(const ArrivalDraw& draw, std::span<const double> volumes,
                 std::span<const double> costs, double limit,
                 std::size_t stop_box) {
  RunRecord rec;
  rec.stop_time = limit;
  rec.stop_box = stop_box;
  for (std::size_t j = 0; j < draw.alpha.size(); ++j) {
    if (arrived(draw.alpha[j]) && draw.alpha[j] <= limit) rec.opened_order.push_back(j);
  }
  std::stable_sort(rec.opened_order.begin(), rec.opened_order.end(),
                   [&](std::size_t a, std::size_t b) { return draw.alpha[a] < draw.alpha[b]; });
  for (std::size_t j : rec.opened_order) {
    rec.opening_cost += costs[j];
    if (volumes[j] < rec.taken_volume ||
        (volumes[j] == rec.taken_volume && j < rec.taken_box)) {
      rec.taken_volume = volumes[j];
      rec.taken_box = j;
    }
  }
  rec.objective = rec.opening_cost + rec.taken_volume;
  return rec;
}

// No eligible box before the cap: open what arrived, then everything else
// by ascending cost.
RunRecord fallback(const ArrivalDraw& draw, std::span<const double> volumes,
                   std::span<const double> costs) {
  RunRecord rec = finish(draw, volumes, costs, kInfinite, kNoBox);
  std::vector<std::size_t> rest;
  for (std::size_t j = 0; j < costs.size(); ++j) {
    if (!arrived(draw.alpha[j])) rest.push_back(j);
  }
  std::stable_sort(rest.begin(), rest.end(),
                   [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  for (std::size_t j : rest) {
    rec.opened_order.push_back(j);
    rec.opening_cost += costs[j];
    if (volumes[j] < rec.taken_volume ||
        (volumes[j] == rec.taken_volume && j < rec.taken_box)) {
      rec.taken_volume = volumes[j];
      rec.taken_box = j;
    }
  }
  rec.objective = rec.opening_cost + rec.taken_volume;
  rec.stop_time = kNever;
  rec.cap_hit = true;
  return rec;
}

void check_sizes(const ArrivalDraw& draw, std::span<const double> volumes,
                 std::span<const double> costs) {
  if (draw.alpha.size() != volumes.size() || costs.size() != volumes.size()) {
    throw InvalidInstance("arrival draw does not match the instance");
  }
}

double plain_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

RunRecord clairvoyant_run(const ArrivalDraw& draw, std::span<const double> volumes,
                          std::span<const double> costs, double k) {
  check_sizes(draw, volumes, costs);
  std::size_t best = kNoBox;
  double best_key = kInfinite;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    if (!arrived(draw.alpha[i]) || !is_finite_volume(volumes[i])) continue;
    const double key = draw.alpha[i] + k * volumes[i];
    if (key < best_key) {
      best_key = key;
      best = i;
    }
  }
  if (best == kNoBox) return fallback(draw, volumes, costs);
  return finish(draw, volumes, costs, draw.alpha[best], best);
}

RunRecord balanced_run(const ArrivalDraw& draw, std::span<const double> volumes,
                       std::span<const double> costs) {
  check_sizes(draw, volumes, costs);
  std::size_t best = kNoBox;
  double tau_star = kInfinite;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    if (!arrived(draw.alpha[i]) || !is_finite_volume(volumes[i])) continue;
    const double tau = std::max(draw.alpha[i], costs[i] + volumes[i]);
    if (tau < tau_star) {
      tau_star = tau;
      best = i;
    }
  }
  if (best == kNoBox) return fallback(draw, volumes, costs);
  return finish(draw, volumes, costs, tau_star, best);
}

RunRecord delayed_activation_run(const ArrivalDraw& draw,
                                 std::span<const double> volumes,
                                 std::span<const double> costs, double k) {
  check_sizes(draw, volumes, costs);
  std::size_t best = kNoBox;
  double best_key = kInfinite;
  double stop = kInfinite;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    if (!arrived(draw.alpha[i]) || !is_finite_volume(volumes[i])) continue;
    const double key = draw.alpha[i] + k * volumes[i];
    if (key < best_key) {
      best_key = key;
      best = i;
    }
    stop = std::min(stop, draw.alpha[i] + std::floor(k * volumes[i]));
  }
  if (best == kNoBox) return fallback(draw, volumes, costs);
  return finish(draw, volumes, costs, stop, best);
}

RunRecord fixed_order_run(std::span<const std::size_t> order,
                          std::span<const double> volumes,
                          std::span<const double> costs) {
  RunRecord rec;
  for (std::size_t j : order) {
    rec.opened_order.push_back(j);
    rec.opening_cost += costs[j];
    if (volumes[j] < rec.taken_volume) {
      rec.taken_volume = volumes[j];
      rec.taken_box = j;
    }
    if (volumes[j] == 0.0) {
      rec.stop_box = j;
      break;
    }
  }
  rec.stop_time = rec.opening_cost;
  rec.objective = rec.opening_cost + rec.taken_volume;
  return rec;
}

double k_from_uniform(double u) {
  return std::log1p(u * std::expm1(4.0));
}

double sample_k(RandomStream& rng) { return k_from_uniform(rng.uniform()); }

MsscGreedyResult greedy_mssc(const SetCoverInstance& sc) {
  const auto problems = validate(sc);
  if (!problems.empty()) throw InvalidInstance("invalid set cover: " + problems.front());
  const std::size_t n = sc.sets.size();
  MsscGreedyResult out;
  out.cover_times.assign(sc.universe_size, 0);
  std::vector<bool> covered(sc.universe_size, false);
  std::vector<bool> used(n, false);
  std::size_t remaining = sc.universe_size;
  while (remaining > 0) {
    std::size_t pick = n;
    std::size_t gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      std::size_t g = 0;
      for (std::size_t e : sc.sets[i]) g += covered[e] ? 0 : 1;
      if (g > gain) {
        gain = g;
        pick = i;
      }
    }
    if (pick == n) break;
    used[pick] = true;
    out.ordering.push_back(pick);
    for (std::size_t e : sc.sets[pick]) {
      if (!covered[e]) {
        covered[e] = true;
        out.cover_times[e] = out.ordering.size();
        --remaining;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!used[i]) out.ordering.push_back(i);
  }
  out.sum_cover_time = std::accumulate(out.cover_times.begin(), out.cover_times.end(),
                                       std::size_t{0});
  return out;
}

std::optional<PolicyKind> parse_policy(const std::string& name) {
  if (name == "clairvoyant") return PolicyKind::kClairvoyant;
  if (name == "balanced") return PolicyKind::kBalanced;
  if (name == "da") return PolicyKind::kDelayedActivation;
  if (name == "da-random") return PolicyKind::kDelayedActivationRandom;
  if (name == "greedy-mssc") return PolicyKind::kGreedyMssc;
  return std::nullopt;
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kClairvoyant:
      return "clairvoyant";
    case PolicyKind::kBalanced:
      return "balanced";
    case PolicyKind::kDelayedActivation:
      return "da";
    case PolicyKind::kDelayedActivationRandom:
      return "da-random";
    case PolicyKind::kGreedyMssc:
      return "greedy-mssc";
  }
  return "unknown";
}

PolicyRunner::PolicyRunner(const PandoraInstance& instance,
                           const CpSolution& solution, const PolicySpec& spec)
    : instance_(instance), solution_(solution), spec_(spec) {
  const auto problems = validate(instance);
  if (!problems.empty()) throw InvalidInstance("invalid instance: " + problems.front());
  if (solution.num_boxes() != instance.num_boxes()) {
    throw InvalidInstance("solution does not match the instance");
  }
  if (!(spec.tau_max_mult > 0.0)) throw DomainError("tau-max multiplier must be positive");
  const bool unit_grid = std::abs(solution.grid.step - 1.0) <= 1e-12;
  const bool unit = is_unit_cost(instance) && unit_grid;
  switch (spec.kind) {
    case PolicyKind::kClairvoyant:
      if (!(spec.k > 0.0 && spec.k <= 4.0)) throw DomainError("k must lie in (0, 4]");
      discrete_ = unit;
      break;
    case PolicyKind::kBalanced:
      break;
    case PolicyKind::kDelayedActivation:
      if (!(spec.k >= 0.0 && spec.k <= 4.0)) throw DomainError("k must lie in [0, 4]");
      [[fallthrough]];
    case PolicyKind::kDelayedActivationRandom:
      if (!unit) {
        throw DomainError(
            "delayed activation needs a unit-cost instance solved on the unit grid");
      }
      discrete_ = true;
      break;
    case PolicyKind::kGreedyMssc:
      greedy_order_ = greedy_mssc(to_mssc(instance)).ordering;
      break;
  }
  tau_max_ = default_tau_max(instance, spec.tau_max_mult);
  if (discrete_) tau_max_ = std::ceil(tau_max_);
  if (!discrete_ && spec.kind != PolicyKind::kGreedyMssc) {
    std::vector<double> rate_costs(instance.num_boxes());
    for (std::size_t i = 0; i < rate_costs.size(); ++i) {
      rate_costs[i] = static_cast<double>(round_up_steps(instance.costs[i], solution.grid.step)) *
                      solution.grid.step;
    }
    model_ = make_rate_model(solution, rate_costs);
  }
}

ArrivalDraw PolicyRunner::arrivals(std::uint64_t seed,
                                   std::uint64_t replication) const {
  if (spec_.kind == PolicyKind::kGreedyMssc) {
    ArrivalDraw draw;
    draw.seed = seed;
    draw.replication = replication;
    draw.alpha.assign(instance_.num_boxes(), kNever);
    return draw;
  }
  if (discrete_) {
    return discrete_sample_arrivals(solution_, seed, replication,
                                    static_cast<std::int64_t>(tau_max_));
  }
  return sample_arrivals(model_, seed, replication, tau_max_);
}

double PolicyRunner::k_for(std::uint64_t seed, std::uint64_t replication) const {
  if (spec_.kind != PolicyKind::kDelayedActivationRandom) return spec_.k;
  RandomStream rng(seed, replication, kDelayStream);
  return sample_k(rng);
}

std::size_t PolicyRunner::scenario_for(std::uint64_t seed,
                                       std::uint64_t replication) const {
  RandomStream rng(seed, replication, kScenarioStream);
  return sample_scenario_index(instance_, rng);
}

RunRecord PolicyRunner::run(const ArrivalDraw& draw, std::size_t scenario,
                            double k) const {
  const auto& volumes = instance_.scenarios.at(scenario).volumes;
  switch (spec_.kind) {
    case PolicyKind::kClairvoyant:
      return clairvoyant_run(draw, volumes, instance_.costs, k);
    case PolicyKind::kBalanced:
      return balanced_run(draw, volumes, instance_.costs);
    case PolicyKind::kDelayedActivation:
    case PolicyKind::kDelayedActivationRandom:
      return delayed_activation_run(draw, volumes, instance_.costs, k);
    case PolicyKind::kGreedyMssc:
      return fixed_order_run(greedy_order_, volumes, instance_.costs);
  }
  return {};
}

RunRecord PolicyRunner::replicate(std::uint64_t seed,
                                  std::uint64_t replication) const {
  const std::size_t s = scenario_for(seed, replication);
  return run(arrivals(seed, replication), s, k_for(seed, replication));
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 64) return plain_sum(values);
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SampleStats summarize(std::span<const double> values) {
  SampleStats st;
  st.count = values.size();
  if (values.empty()) return st;
  const double n = static_cast<double>(values.size());
  st.mean = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - st.mean;
      sq[i] = d * d;
    }
    st.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  }
  return st;
}

SampleStats summarize_serial(std::span<const double> values) {
  SampleStats st;
  st.count = values.size();
  if (values.empty()) return st;
  auto neumaier = [](auto&& term, std::size_t n) {
    double sum = 0.0;
    double comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = term(i);
      const double t = sum + x;
      comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
    return sum + comp;
  };
  const double n = static_cast<double>(values.size());
  st.mean = neumaier([&](std::size_t i) { return values[i]; }, values.size()) / n;
  if (values.size() > 1) {
    const double ss = neumaier(
        [&](std::size_t i) {
          const double d = values[i] - st.mean;
          return d * d;
        },
        values.size());
    st.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return st;
}

namespace {

using Summarizer = SampleStats (*)(std::span<const double>);

PolicyStats collect(const PolicyRunner& runner, std::span<const double> values,
                    std::span<const std::size_t> scenarios, std::size_t caps,
                    Summarizer summary) {
  const auto& inst = runner.instance();
  PolicyStats out;
  out.replications = values.size();
  const SampleStats all = summary(values);
  out.mean = all.mean;
  out.std_error = all.std_error;
  out.cap_hits = caps;
  out.per_scenario.resize(inst.num_scenarios());
  std::vector<std::vector<double>> split(inst.num_scenarios());
  for (std::size_t r = 0; r < values.size(); ++r) split[scenarios[r]].push_back(values[r]);
  for (std::size_t s = 0; s < inst.num_scenarios(); ++s) {
    out.per_scenario[s].probability = inst.scenarios[s].probability;
    out.per_scenario[s].stats = summary(split[s]);
  }
  return out;
}

void check_reps(std::size_t replications) {
  if (replications < 1) throw DomainError("replications must be at least 1");
}

}  // namespace

PolicyStats evaluate_policy(const PolicyRunner& runner, std::size_t replications,
                            std::uint64_t seed) {
  check_reps(replications);
  std::vector<double> values(replications);
  std::vector<std::size_t> scenarios(replications);
  std::vector<unsigned char> caps(replications, 0);
  const auto count = static_cast<std::int64_t>(replications);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < count; ++r) {
    const auto rep = static_cast<std::uint64_t>(r);
    const std::size_t s = runner.scenario_for(seed, rep);
    const RunRecord rec = runner.run(runner.arrivals(seed, rep), s, runner.k_for(seed, rep));
    values[static_cast<std::size_t>(r)] = rec.objective;
    scenarios[static_cast<std::size_t>(r)] = s;
    caps[static_cast<std::size_t>(r)] = rec.cap_hit ? 1 : 0;
  }
  const std::size_t cap_hits = std::count(caps.begin(), caps.end(), 1);
  return collect(runner, values, scenarios, cap_hits, &summarize);
}

PolicyStats evaluate_policy_serial(const PolicyRunner& runner,
                                   std::size_t replications, std::uint64_t seed) {
  check_reps(replications);
  std::vector<double> values;
  std::vector<std::size_t> scenarios;
  std::size_t cap_hits = 0;
  for (std::uint64_t rep = 0; rep < replications; ++rep) {
    const std::size_t s = runner.scenario_for(seed, rep);
    const RunRecord rec = runner.run(runner.arrivals(seed, rep), s, runner.k_for(seed, rep));
    values.push_back(rec.objective);
    scenarios.push_back(s);
    cap_hits += rec.cap_hit ? 1 : 0;
  }
  return collect(runner, values, scenarios, cap_hits, &summarize_serial);
}

namespace {

PolicyStats per_scenario_result(const PolicyRunner& runner,
                                const std::vector<std::vector<double>>& by_scenario,
                                std::span<const double> weighted, std::size_t caps,
                                Summarizer summary) {
  PolicyStats out;
  out.replications = weighted.size();
  const SampleStats all = summary(weighted);
  out.mean = all.mean;
  out.std_error = all.std_error;
  out.cap_hits = caps;
  for (std::size_t s = 0; s < by_scenario.size(); ++s) {
    out.per_scenario.push_back(
        {runner.instance().scenarios[s].probability, summary(by_scenario[s])});
  }
  return out;
}

}  // namespace

PolicyStats evaluate_per_scenario(const PolicyRunner& runner,
                                  std::size_t replications, std::uint64_t seed) {
  check_reps(replications);
  const std::size_t m = runner.instance().num_scenarios();
  std::vector<std::vector<double>> values(m, std::vector<double>(replications));
  std::vector<double> weighted(replications);
  std::vector<std::size_t> caps(replications, 0);
  const auto count = static_cast<std::int64_t>(replications);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < count; ++r) {
    const auto rep = static_cast<std::uint64_t>(r);
    const auto idx = static_cast<std::size_t>(r);
    const ArrivalDraw draw = runner.arrivals(seed, rep);
    const double k = runner.k_for(seed, rep);
    double y = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const RunRecord rec = runner.run(draw, s, k);
      values[s][idx] = rec.objective;
      y += runner.instance().scenarios[s].probability * rec.objective;
      caps[idx] += rec.cap_hit ? 1 : 0;
    }
    weighted[idx] = y;
  }
  const std::size_t cap_hits = std::accumulate(caps.begin(), caps.end(), std::size_t{0});
  return per_scenario_result(runner, values, weighted, cap_hits, &summarize);
}

PolicyStats evaluate_per_scenario_serial(const PolicyRunner& runner,
                                         std::size_t replications,
                                         std::uint64_t seed) {
  check_reps(replications);
  const std::size_t m = runner.instance().num_scenarios();
  std::vector<std::vector<double>> values(m);
  std::vector<double> weighted;
  std::size_t cap_hits = 0;
  for (std::uint64_t rep = 0; rep < replications; ++rep) {
    const ArrivalDraw draw = runner.arrivals(seed, rep);
    const double k = runner.k_for(seed, rep);
    double y = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      const RunRecord rec = runner.run(draw, s, k);
      values[s].push_back(rec.objective);
      y += runner.instance().scenarios[s].probability * rec.objective;
      cap_hits += rec.cap_hit ? 1 : 0;
    }
    weighted.push_back(y);
  }
  return per_scenario_result(runner, values, weighted, cap_hits, &summarize_serial);
}

}  // namespace pandora
