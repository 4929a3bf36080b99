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

#ifndef PANDORA_RELAXATION_H_
#define PANDORA_RELAXATION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pandora/instance.h"

namespace pandora {

// Uniform time grid t_j = j * step, j = 0..points; points * step == horizon.
struct Grid {
  double step = 1.0;
  double horizon = 0.0;
  std::size_t points = 0;

  std::size_t size() const { return points + 1; }
};

// Instance with costs and finite volumes rounded up to multiples of the grid
// step, together with the integer step counts used by every grid kernel.
struct DiscretizedInstance {
  PandoraInstance rounded;
  Grid grid;
  std::vector<std::int64_t> cost_steps;
  // volume_steps[s][i] < 0 marks an infinite volume.
  std::vector<std::vector<std::int64_t>> volume_steps;
};

// Right-continuous step CDFs of box start times. X[i][j] is X_i(t) for
// t in [t_j, t_{j+1}); X_i(t) = 0 for t < 0 and X_i(t) = X[i][points] past
// the horizon. For unit costs on the integer grid, x_i(t) = X[i][t-1] -
// X[i][t-2] is the probability of being opened during step t.
struct CpSolution {
  Grid grid;
  std::vector<std::vector<double>> X;

  std::size_t num_boxes() const { return X.size(); }
  // X_i at grid index j, extended by 0 on the left and constant on the right.
  double at(std::size_t i, std::int64_t j) const;
  // X_i at real time t.
  double value(std::size_t i, double t) const;
};

// Optimal per-scenario split of X: Z_i = X_i strictly before the box's
// threshold start time, constant afterwards, total mass one.
struct ScenarioAllocation {
  double threshold = 0.0;
  std::int64_t threshold_index = 0;
  std::vector<std::vector<double>> Z;  // same layout as CpSolution::X
};

inline constexpr double kMassTolerance = 1e-12;

// Rounds up to multiples of step = eps * (smallest positive cost). Falls back
// to eps * (smallest positive finite volume) when every cost is zero, and to
// step = eps when there is no positive cost or volume at all.
DiscretizedInstance discretize(const PandoraInstance& instance, double eps);
DiscretizedInstance discretize_with_step(const PandoraInstance& instance,
                                         double step);

// ceil(value / step) with a relative tolerance so exact multiples are kept.
std::int64_t round_up_steps(double value, double step);

// cost_steps[i] + volume_steps[i] for finite volumes, -1 for infinite ones.
std::vector<std::int64_t> scenario_shifts(const DiscretizedInstance& d,
                                          std::span<const double> volumes);
std::vector<std::int64_t> scenario_shifts(const DiscretizedInstance& d,
                                          std::size_t scenario);

// Smallest grid time t with sum_i X_i(t - c_i - v_i) >= 1 over finite
// boxes. Throws NoThreshold if the finite boxes hold less than unit mass.
std::int64_t threshold_index(const CpSolution& X,
                             std::span<const std::int64_t> shifts);
double threshold_time(const CpSolution& X,
                      std::span<const std::int64_t> shifts);

// Residual mass at the threshold goes to boxes in ascending index order.
ScenarioAllocation derive_allocation(const CpSolution& X,
                                     std::span<const std::int64_t> shifts);

// Integral of (1 - sum_i X_i(t - c_i - v_i))_+ over t >= 0, exact for step
// functions. Returns kInfinite when the threshold is never reached.
double scenario_cp_objective(const CpSolution& X,
                             std::span<const std::int64_t> shifts);

// sum_i sum_t (t + c_i + v_i) dZ_i(t) over the jumps of an allocation.
double allocation_cost(const ScenarioAllocation& alloc, const Grid& grid,
                       std::span<const std::int64_t> shifts);

double cp_objective(const CpSolution& X, const DiscretizedInstance& d);

// Adds weight * (subgradient of scenario_cp_objective) into grad and
// returns the objective. At the hinge kink the zero subgradient is used.
// When the threshold is never reached the infinite tail is charged as
// tail_steps extra grid cells against X_i at the horizon.
double accumulate_subgradient(const CpSolution& X,
                              std::span<const std::int64_t> shifts,
                              double weight, std::int64_t tail_steps,
                              std::vector<std::vector<double>>& grad);

// Largest busy-ness sum_i (X_i(t) - X_i(t - c_i)) over grid times.
double max_busy(const CpSolution& X, std::span<const std::int64_t> cost_steps);

// Clamp to [0,1], running max, then scale the start-time increments inside
// every window whose busy-ness exceeds one. Throws NonConvergence if a
// violation above 1e-9 survives 50 sweeps.
CpSolution project_feasible(std::vector<std::vector<double>> raw,
                            const Grid& grid,
                            std::span<const std::int64_t> cost_steps);

// Deterministic schedule: boxes start back to back in the given order, each
// with unit mass. Zero-cost boxes start at time 0.
CpSolution schedule_solution(const DiscretizedInstance& d,
                             std::span<const std::size_t> order);

struct SolverOptions {
  double eps = 0.05;
  int iterations = 400;
  int batch = 16;
  int restarts = 5;
  std::uint64_t seed = 1;
};

struct SolveResult {
  DiscretizedInstance discretized;
  CpSolution solution;
  double objective = kInfinite;
  bool converged = false;
  int best_restart = -1;
};

// Projected stochastic subgradient descent on the start-time increments,
// step eta_k = (horizon / 4) / sqrt(k) on the gradient scaled by
// 1 / horizon^2, minibatches drawn by scenario probability. Each restart
// starts from a sequential schedule whose order is improved by insertion
// and swap moves: restart 0 from a greedy order, later ones from random
// orders. Keeps the best iterate over all restarts.
SolveResult solve_cp(const PandoraInstance& instance,
                     const SolverOptions& options);
SolveResult solve_cp(const DiscretizedInstance& d,
                     const SolverOptions& options);

}  // namespace pandora

#endif  // PANDORA_RELAXATION_H_
