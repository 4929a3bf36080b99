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

#include "pandora/relaxation.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "pandora/errors.h"
#include "pandora/rng.h"

namespace pandora {

double CpSolution::at(std::size_t i, std::int64_t j) const {
  if (j < 0) return 0.0;
  const auto& xi = X[i];
  const auto last = static_cast<std::int64_t>(xi.size()) - 1;
  return xi[static_cast<std::size_t>(std::min(j, last))];
}

double CpSolution::value(std::size_t i, double t) const {
  if (t < 0.0) return 0.0;
  // Guard against t = j * step landing just below the grid point.
  const double q = t / grid.step;
  auto j = static_cast<std::int64_t>(std::floor(q + 1e-9 * std::max(1.0, q)));
  return at(i, j);
}

std::int64_t round_up_steps(double value, double step) {
  if (value <= 0.0) return 0;
  const double q = value / step;
  const double k = std::ceil(q - 1e-9 * std::max(1.0, q));
  return std::max<std::int64_t>(0, static_cast<std::int64_t>(k));
}

DiscretizedInstance discretize_with_step(const PandoraInstance& instance,
                                         double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidInstance("grid step must be positive");
  }
  DiscretizedInstance d;
  d.rounded = instance;
  const std::size_t n = instance.num_boxes();
  d.cost_steps.resize(n);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d.cost_steps[i] = round_up_steps(instance.costs[i], step);
    d.rounded.costs[i] = static_cast<double>(d.cost_steps[i]) * step;
    total += d.cost_steps[i];
  }
  d.volume_steps.resize(instance.num_scenarios());
  for (std::size_t s = 0; s < instance.num_scenarios(); ++s) {
    auto& vs = d.volume_steps[s];
    auto& vr = d.rounded.scenarios[s].volumes;
    vs.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (is_finite_volume(vr[i])) {
        vs[i] = round_up_steps(vr[i], step);
        vr[i] = static_cast<double>(vs[i]) * step;
      } else {
        vs[i] = -1;
      }
    }
  }
  d.grid.step = step;
  d.grid.points = static_cast<std::size_t>(total);
  d.grid.horizon = static_cast<double>(total) * step;
  return d;
}

DiscretizedInstance discretize(const PandoraInstance& instance, double eps) {
  if (!(eps > 0.0)) throw InvalidInstance("eps must be positive");
  double base = kInfinite;
  for (double c : instance.costs) {
    if (c > 0.0) base = std::min(base, c);
  }
  if (std::isinf(base)) {
    for (const auto& sd : instance.scenarios) {
      for (double v : sd.volumes) {
        if (is_finite_volume(v) && v > 0.0) base = std::min(base, v);
      }
    }
  }
  const double step = std::isinf(base) ? eps : eps * base;
  return discretize_with_step(instance, step);
}

std::vector<std::int64_t> scenario_shifts(const DiscretizedInstance& d,
                                          std::span<const double> volumes) {
  std::vector<std::int64_t> shifts(d.cost_steps.size());
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    shifts[i] = is_finite_volume(volumes[i])
                    ? d.cost_steps[i] + round_up_steps(volumes[i], d.grid.step)
                    : -1;
  }
  return shifts;
}

std::vector<std::int64_t> scenario_shifts(const DiscretizedInstance& d,
                                          std::size_t scenario) {
  const auto& vs = d.volume_steps.at(scenario);
  std::vector<std::int64_t> shifts(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    shifts[i] = vs[i] < 0 ? -1 : d.cost_steps[i] + vs[i];
  }
  return shifts;
}

namespace {

// sum over finite boxes of X_i at grid index k - shift_i.
double coverage(const CpSolution& X, std::span<const std::int64_t> shifts,
                std::int64_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (shifts[i] >= 0) s += X.at(i, k - shifts[i]);
  }
  return s;
}

std::int64_t last_relevant_index(const CpSolution& X,
                                 std::span<const std::int64_t> shifts) {
  std::int64_t max_shift = 0;
  for (auto s : shifts) max_shift = std::max(max_shift, s);
  return static_cast<std::int64_t>(X.grid.points) + max_shift;
}

}  // namespace

std::int64_t threshold_index(const CpSolution& X,
                             std::span<const std::int64_t> shifts) {
  const std::int64_t kmax = last_relevant_index(X, shifts);
  if (coverage(X, shifts, kmax) < 1.0 - kMassTolerance) {
    throw NoThreshold("finite-volume boxes carry less than unit mass");
  }
  // Coverage is nondecreasing in k.
  std::int64_t lo = 0, hi = kmax;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (coverage(X, shifts, mid) >= 1.0 - kMassTolerance) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

double threshold_time(const CpSolution& X,
                      std::span<const std::int64_t> shifts) {
  return static_cast<double>(threshold_index(X, shifts)) * X.grid.step;
}

ScenarioAllocation derive_allocation(const CpSolution& X,
                                     std::span<const std::int64_t> shifts) {
  const std::int64_t kstar = threshold_index(X, shifts);
  const std::size_t n = X.num_boxes();
  const std::size_t len = X.grid.size();
  ScenarioAllocation alloc;
  alloc.threshold_index = kstar;
  alloc.threshold = static_cast<double>(kstar) * X.grid.step;
  alloc.Z.assign(n, std::vector<double>(len, 0.0));

  double remaining = 1.0 - coverage(X, shifts, kstar - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (shifts[i] < 0) continue;
    const std::int64_t cut = kstar - shifts[i];  // first start index at t(v)
    if (cut < 0) continue;
    auto& z = alloc.Z[i];
    for (std::int64_t j = 0; j < std::min<std::int64_t>(cut, len); ++j) {
      z[j] = X.X[i][j];
    }
    if (cut >= static_cast<std::int64_t>(len)) continue;
    const double base = X.at(i, cut - 1);
    const double share =
        std::clamp(std::min(X.at(i, cut) - base, remaining), 0.0, 1.0);
    remaining -= share;
    for (std::size_t j = static_cast<std::size_t>(cut); j < len; ++j) {
      z[j] = base + share;
    }
  }
  return alloc;
}

double scenario_cp_objective(const CpSolution& X,
                             std::span<const std::int64_t> shifts) {
  const std::int64_t kmax = last_relevant_index(X, shifts);
  double total = 0.0;
  for (std::int64_t k = 0; k <= kmax; ++k) {
    const double s = coverage(X, shifts, k);
    if (s >= 1.0 - kMassTolerance) return total * X.grid.step;
    total += 1.0 - s;
  }
  return kInfinite;
}

double allocation_cost(const ScenarioAllocation& alloc, const Grid& grid,
                       std::span<const std::int64_t> shifts) {
  double total = 0.0;
  for (std::size_t i = 0; i < alloc.Z.size(); ++i) {
    if (shifts[i] < 0) continue;
    double prev = 0.0;
    for (std::size_t j = 0; j < alloc.Z[i].size(); ++j) {
      const double dz = alloc.Z[i][j] - prev;
      prev = alloc.Z[i][j];
      if (dz != 0.0) {
        total += static_cast<double>(static_cast<std::int64_t>(j) + shifts[i]) *
                 grid.step * dz;
      }
    }
  }
  return total;
}

double cp_objective(const CpSolution& X, const DiscretizedInstance& d) {
  double total = 0.0;
  for (std::size_t s = 0; s < d.rounded.num_scenarios(); ++s) {
    const auto shifts = scenario_shifts(d, s);
    const double v = scenario_cp_objective(X, shifts);
    if (std::isinf(v)) return kInfinite;
    total += d.rounded.scenarios[s].probability * v;
  }
  return total;
}

double accumulate_subgradient(const CpSolution& X,
                              std::span<const std::int64_t> shifts,
                              double weight, std::int64_t tail_steps,
                              std::vector<std::vector<double>>& grad) {
  const std::int64_t kmax = last_relevant_index(X, shifts);
  const auto last = static_cast<std::int64_t>(X.grid.points);
  const double unit = weight * X.grid.step;
  double total = 0.0;
  for (std::int64_t k = 0; k <= kmax; ++k) {
    const double s = coverage(X, shifts, k);
    if (s >= 1.0 - kMassTolerance) return total * X.grid.step;
    total += 1.0 - s;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
      if (shifts[i] < 0) continue;
      const std::int64_t j = k - shifts[i];
      if (j >= 0) grad[i][static_cast<std::size_t>(std::min(j, last))] -= unit;
    }
  }
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    if (shifts[i] >= 0) {
      grad[i][static_cast<std::size_t>(last)] -=
          unit * static_cast<double>(tail_steps);
    }
  }
  return kInfinite;
}

double max_busy(const CpSolution& X, std::span<const std::int64_t> cost_steps) {
  double worst = 0.0;
  const auto len = static_cast<std::int64_t>(X.grid.size());
  for (std::int64_t j = 0; j < len; ++j) {
    double busy = 0.0;
    for (std::size_t i = 0; i < X.num_boxes(); ++i) {
      if (cost_steps[i] <= 0) continue;
      busy += X.at(i, j) - X.at(i, j - cost_steps[i]);
    }
    worst = std::max(worst, busy);
  }
  return worst;
}

CpSolution project_feasible(std::vector<std::vector<double>> raw,
                            const Grid& grid,
                            std::span<const std::int64_t> cost_steps) {
  const std::size_t n = raw.size();
  const std::size_t len = grid.size();
  for (auto& xi : raw) {
    if (xi.size() != len) throw InvalidInstance("X length does not match grid");
    double run = 0.0;
    for (double& x : xi) {
      x = std::clamp(std::isnan(x) ? 0.0 : x, 0.0, 1.0);
      run = std::max(run, x);
      x = run;
    }
  }

  std::vector<std::vector<double>> inc(n, std::vector<double>(len));
  for (std::size_t i = 0; i < n; ++i) {
    double prev = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      inc[i][j] = raw[i][j] - prev;
      prev = raw[i][j];
    }
  }

  CpSolution out{grid, std::move(raw)};
  std::vector<bool> dirty(n, false);
  std::vector<double> window(n);
  constexpr int kMaxSweeps = 50;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    std::fill(window.begin(), window.end(), 0.0);
    for (std::size_t j = 0; j < len; ++j) {
      double busy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t m = cost_steps[i];
        if (m <= 0) continue;
        window[i] += inc[i][j];
        const auto drop = static_cast<std::int64_t>(j) - m;
        if (drop >= 0) window[i] -= inc[i][static_cast<std::size_t>(drop)];
        busy += window[i];
      }
      if (busy <= 1.0 + kMassTolerance) continue;
      const double f = 1.0 / busy;
      for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t m = cost_steps[i];
        if (m <= 0) continue;
        const auto first = std::max<std::int64_t>(0, static_cast<std::int64_t>(j) - m + 1);
        bool touched = false;
        for (auto jj = static_cast<std::size_t>(first); jj <= j; ++jj) {
          if (inc[i][jj] != 0.0) {
            inc[i][jj] *= f;
            touched = true;
          }
        }
        window[i] *= f;
        if (touched) dirty[i] = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!dirty[i]) continue;
      double acc = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        acc += inc[i][j];
        out.X[i][j] = std::clamp(acc, 0.0, 1.0);
      }
      dirty[i] = false;
    }
    if (max_busy(out, cost_steps) <= 1.0 + 1e-9) return out;
  }
  throw NonConvergence("busy-ness violation persists after 50 sweeps");
}

CpSolution schedule_solution(const DiscretizedInstance& d,
                             std::span<const std::size_t> order) {
  CpSolution sol;
  sol.grid = d.grid;
  sol.X.assign(d.cost_steps.size(), std::vector<double>(d.grid.size(), 0.0));
  std::int64_t start = 0;
  for (std::size_t i : order) {
    const std::int64_t at = d.cost_steps[i] == 0 ? 0 : start;
    for (auto j = static_cast<std::size_t>(at); j < d.grid.size(); ++j) {
      sol.X[i][j] = 1.0;
    }
    start += d.cost_steps[i];
  }
  return sol;
}

namespace {

// Greedy order by benefit per cost: each step appends the box that most
// reduces E[min over scheduled boxes of completion + volume], with
// unscheduled scenarios charged a large constant.
std::vector<std::size_t> greedy_order(const DiscretizedInstance& d) {
  const std::size_t n = d.cost_steps.size();
  const std::size_t m = d.rounded.num_scenarios();
  std::int64_t worst = static_cast<std::int64_t>(d.grid.points);
  for (const auto& vs : d.volume_steps) {
    for (auto v : vs) worst = std::max(worst, v + static_cast<std::int64_t>(d.grid.points));
  }
  const double cap = 2.0 * static_cast<double>(worst + 1);
  std::vector<double> best(m, cap);
  std::vector<bool> used(n, false);
  std::vector<std::size_t> order;
  std::int64_t now = 0;
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t pick = n;
    double pick_score = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      double gain = 0.0;
      for (std::size_t s = 0; s < m; ++s) {
        const auto v = d.volume_steps[s][i];
        if (v < 0) continue;
        const double done = static_cast<double>(now + d.cost_steps[i] + v);
        gain += d.rounded.scenarios[s].probability * std::max(0.0, best[s] - done);
      }
      const double score = gain / static_cast<double>(std::max<std::int64_t>(d.cost_steps[i], 1));
      if (score > pick_score) {
        pick_score = score;
        pick = i;
      }
    }
    used[pick] = true;
    order.push_back(pick);
    for (std::size_t s = 0; s < m; ++s) {
      const auto v = d.volume_steps[s][pick];
      if (v < 0) continue;
      best[s] = std::min(best[s], static_cast<double>(now + d.cost_steps[pick] + v));
    }
    now += d.cost_steps[pick];
  }
  return order;
}

std::vector<std::size_t> random_order(std::size_t n, RandomStream& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

// Insertion and swap moves on the schedule order until no move improves the
// CP value of the resulting sequential schedule.
std::vector<std::size_t> improve_order(const DiscretizedInstance& d,
                                       std::vector<std::size_t> order,
                                       int max_rounds) {
  const std::size_t n = order.size();
  double value = cp_objective(schedule_solution(d, order), d);
  for (int round = 0; round < max_rounds; ++round) {
    bool improved = false;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        for (int kind = 0; kind < 2; ++kind) {
          std::vector<std::size_t> trial = order;
          if (kind == 0) {
            const std::size_t box = trial[a];
            trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(a));
            trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(b), box);
          } else {
            if (b < a) continue;
            std::swap(trial[a], trial[b]);
          }
          const double v = cp_objective(schedule_solution(d, trial), d);
          if (v < value - 1e-12) {
            value = v;
            order = std::move(trial);
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }
  return order;
}

// Euclidean projection onto {v >= 0, sum v <= 1}.
void project_capped_simplex(std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += std::max(0.0, x);
  if (total <= 1.0) {
    for (double& x : v) x = std::max(0.0, x);
    return;
  }
  std::vector<double> u;
  u.reserve(v.size());
  for (double x : v) {
    if (x > 0.0) u.push_back(x);
  }
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (k + 1 == u.size() || u[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (double& x : v) x = std::max(0.0, x - theta);
}

// Left-to-right repair of the busy-ness constraint that moves the excess of
// the newest increments one step later instead of discarding it. Windows
// ending earlier already hold at most unit busy-ness, so trimming the
// increments at j always suffices.
void push_excess_later(std::vector<std::vector<double>>& inc,
                       std::span<const std::int64_t> cost_steps) {
  const std::size_t n = inc.size();
  const std::size_t len = n == 0 ? 0 : inc[0].size();
  std::vector<double> window(n, 0.0);
  for (std::size_t j = 0; j < len; ++j) {
    double busy = 0.0;
    double fresh = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::int64_t m = cost_steps[i];
      if (m <= 0) continue;
      window[i] += inc[i][j];
      const auto drop = static_cast<std::int64_t>(j) - m;
      if (drop >= 0) window[i] -= inc[i][static_cast<std::size_t>(drop)];
      busy += window[i];
      fresh += inc[i][j];
    }
    if (busy <= 1.0 || fresh <= 0.0) continue;
    const double f = std::min(1.0, (busy - 1.0) / fresh);
    for (std::size_t i = 0; i < n; ++i) {
      if (cost_steps[i] <= 0) continue;
      const double moved = inc[i][j] * f;
      inc[i][j] -= moved;
      window[i] -= moved;
      if (j + 1 < len) inc[i][j + 1] += moved;
    }
  }
}

}  // namespace

SolveResult solve_cp(const PandoraInstance& instance,
                     const SolverOptions& options) {
  return solve_cp(discretize(instance, options.eps), options);
}

SolveResult solve_cp(const DiscretizedInstance& d,
                     const SolverOptions& options) {
  if (options.iterations < 1 || options.restarts < 1 || options.batch < 1) {
    throw InvalidInstance("solver needs iterations, restarts and batch >= 1");
  }
  const std::size_t n = d.cost_steps.size();
  const std::size_t m = d.rounded.num_scenarios();
  const std::size_t len = d.grid.size();
  std::vector<std::vector<std::int64_t>> shifts(m);
  std::int64_t tail = static_cast<std::int64_t>(d.grid.points) + 1;
  for (std::size_t s = 0; s < m; ++s) {
    shifts[s] = scenario_shifts(d, s);
    for (auto v : shifts[s]) tail = std::max(tail, v + 1);
  }
  const auto cdf = scenario_cdf(d.rounded);
  const bool full_batch = static_cast<std::size_t>(options.batch) >= m;
  const double horizon = std::max(d.grid.horizon, d.grid.step);
  const double eta0 = horizon / 4.0;
  // Increment gradients carry a time unit per grid cell summed over the
  // horizon; this scale turns eta * gradient into a mass.
  const double gscale = 1.0 / (horizon * horizon);

  SolveResult result;
  result.discretized = d;

  std::vector<std::vector<double>> grad(n, std::vector<double>(len));
  std::vector<std::vector<double>> inc(n, std::vector<double>(len));
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<std::size_t> order;
    if (r == 0) {
      order = greedy_order(d);
    } else {
      RandomStream rng(options.seed, static_cast<std::uint64_t>(r),
                       kRestartStream);
      order = random_order(n, rng);
    }
    CpSolution x = schedule_solution(d, improve_order(d, std::move(order), 8));
    double value = cp_objective(x, d);
    if (value < result.objective || result.best_restart < 0) {
      result.objective = value;
      result.solution = x;
      result.best_restart = r;
    }
    for (int it = 1; it <= options.iterations; ++it) {
      for (auto& g : grad) std::fill(g.begin(), g.end(), 0.0);
      if (full_batch) {
        for (std::size_t s = 0; s < m; ++s) {
          accumulate_subgradient(x, shifts[s], d.rounded.scenarios[s].probability,
                                 tail, grad);
        }
      } else {
        RandomStream rng(options.seed,
                         static_cast<std::uint64_t>(r) * 0x100000000ULL +
                             static_cast<std::uint64_t>(it),
                         kMinibatchStream);
        const double w = 1.0 / static_cast<double>(options.batch);
        for (int b = 0; b < options.batch; ++b) {
          const double u = rng.uniform();
          const auto s = static_cast<std::size_t>(
              std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
          accumulate_subgradient(x, shifts[std::min(s, m - 1)], w, tail, grad);
        }
      }
      const double eta = eta0 / std::sqrt(static_cast<double>(it)) * gscale;
      // Step on start-time increments; the gradient of an increment at j is
      // the suffix sum of the gradient of X from j on.
      for (std::size_t i = 0; i < n; ++i) {
        if (d.cost_steps[i] == 0) {
          std::fill(inc[i].begin(), inc[i].end(), 0.0);
          inc[i][0] = 1.0;
          continue;
        }
        double suffix = 0.0;
        for (std::size_t j = len; j-- > 0;) {
          suffix += grad[i][j];
          const double prev = j == 0 ? 0.0 : x.X[i][j - 1];
          inc[i][j] = (x.X[i][j] - prev) - eta * suffix;
        }
        project_capped_simplex(inc[i]);
      }
      push_excess_later(inc, d.cost_steps);
      std::vector<std::vector<double>> raw(n, std::vector<double>(len));
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
          acc += inc[i][j];
          raw[i][j] = acc;
        }
      }
      x = project_feasible(std::move(raw), d.grid, d.cost_steps);
      value = cp_objective(x, d);
      if (value < result.objective) {
        result.objective = value;
        result.solution = x;
        result.best_restart = r;
      }
    }
  }
  result.converged = std::isfinite(result.objective);
  return result;
}

}  // namespace pandora
