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

#ifndef PANDORA_POLICIES_H_
#define PANDORA_POLICIES_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pandora/instance.h"
#include "pandora/poisson.h"
#include "pandora/relaxation.h"
#include "pandora/rng.h"

namespace pandora {

inline constexpr std::size_t kNoBox = std::numeric_limits<std::size_t>::max();

struct RunRecord {
  std::vector<std::size_t> opened_order;  // by ascending arrival, then index
  double stop_time = kNever;              // Poisson-horizon stop; kNever on cap
  std::size_t stop_box = kNoBox;          // the box the rule stopped for
  std::size_t taken_box = kNoBox;         // minimum-volume opened box
  double opening_cost = 0.0;
  double taken_volume = kInfinite;
  double objective = kInfinite;
  bool cap_hit = false;
};

// Stop at the arrival of argmin alpha_i + k v_i. Opens every box that
// arrived no later.
RunRecord clairvoyant_run(const ArrivalDraw& draw,
                          std::span<const double> volumes,
                          std::span<const double> costs, double k = 1.0);

// tau_i = max{alpha_i, c_i + v_i}, tau* = min_i tau_i; opens the boxes
// with alpha_j <= tau*.
RunRecord balanced_run(const ArrivalDraw& draw, std::span<const double> volumes,
                       std::span<const double> costs);

// Unit-cost discrete path: stop after step min_i alpha_i + floor(k v_i).
RunRecord delayed_activation_run(const ArrivalDraw& draw,
                                 std::span<const double> volumes,
                                 std::span<const double> costs, double k);

// Opens boxes in the given order until a zero volume is found (or all are
// open) and keeps the smallest volume.
RunRecord fixed_order_run(std::span<const std::size_t> order,
                          std::span<const double> volumes,
                          std::span<const double> costs);

// k = ln(1 + u (e^4 - 1)), density e^k / (e^4 - 1) on [0, 4].
double k_from_uniform(double u);
double sample_k(RandomStream& rng);

struct MsscGreedyResult {
  std::vector<std::size_t> ordering;
  std::vector<std::size_t> cover_times;  // 1-based position covering each element
  std::size_t sum_cover_time = 0;
};

// Most newly covered elements first, ties to the lower set index; sets that
// add nothing are appended in index order.
MsscGreedyResult greedy_mssc(const SetCoverInstance& sc);

enum class PolicyKind {
  kClairvoyant,
  kBalanced,
  kDelayedActivation,
  kDelayedActivationRandom,
  kGreedyMssc,
};

std::optional<PolicyKind> parse_policy(const std::string& name);
std::string policy_name(PolicyKind kind);

struct PolicySpec {
  PolicyKind kind = PolicyKind::kBalanced;
  double k = 1.0;
  double tau_max_mult = 64.0;
};

// Binds an instance, a CP solution and a policy. Clairvoyant stopping uses
// discrete rounding when the solution lives on the unit grid of a unit-cost
// instance and continuous rounding otherwise; Delayed Activation requires
// the discrete path. Throws DomainError on unsupported combinations.
class PolicyRunner {
 public:
  PolicyRunner(const PandoraInstance& instance, const CpSolution& solution,
               const PolicySpec& spec);

  bool discrete() const { return discrete_; }
  double tau_max() const { return tau_max_; }
  const PandoraInstance& instance() const { return instance_; }

  ArrivalDraw arrivals(std::uint64_t seed, std::uint64_t replication) const;
  // Policy parameter k of a replication (random for da-random).
  double k_for(std::uint64_t seed, std::uint64_t replication) const;
  std::size_t scenario_for(std::uint64_t seed, std::uint64_t replication) const;
  RunRecord run(const ArrivalDraw& draw, std::size_t scenario, double k) const;
  // Scenario, arrivals and k all drawn from the replication's streams.
  RunRecord replicate(std::uint64_t seed, std::uint64_t replication) const;

 private:
  PandoraInstance instance_;
  CpSolution solution_;
  PolicySpec spec_;
  RateModel model_;
  std::vector<std::size_t> greedy_order_;
  bool discrete_ = false;
  double tau_max_ = 0.0;
};

struct SampleStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct ScenarioStats {
  double probability = 0.0;
  SampleStats stats;
};

struct PolicyStats {
  std::size_t replications = 0;
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<ScenarioStats> per_scenario;
  std::size_t cap_hits = 0;
};

// Fixed-shape pairwise summation; the result does not depend on how the
// values were produced.
double pairwise_sum(std::span<const double> values);
SampleStats summarize(std::span<const double> values);
// Sequential compensated reference for summarize.
SampleStats summarize_serial(std::span<const double> values);

// Replication r draws its scenario, arrivals and k from independent streams
// keyed by (seed, r); results do not depend on the thread count.
PolicyStats evaluate_policy(const PolicyRunner& runner, std::size_t replications,
                            std::uint64_t seed);
PolicyStats evaluate_policy_serial(const PolicyRunner& runner,
                                   std::size_t replications, std::uint64_t seed);

// Coupled per-scenario evaluation: each replication draws one arrival
// realization and runs it against every scenario. The overall mean is the
// probability-weighted per-replication average.
PolicyStats evaluate_per_scenario(const PolicyRunner& runner,
                                  std::size_t replications, std::uint64_t seed);
PolicyStats evaluate_per_scenario_serial(const PolicyRunner& runner,
                                         std::size_t replications,
                                         std::uint64_t seed);

}  // namespace pandora

#endif  // PANDORA_POLICIES_H_
