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

// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if
// any criterion fails. Tolerances and sample sizes are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "pandora/instance.h"
#include "pandora/io.h"
#include "pandora/oracle.h"
#include "pandora/poisson.h"
#include "pandora/policies.h"
#include "pandora/relaxation.h"
#include "pandora/verify.h"

namespace {

using namespace pandora;

// 1: relaxation bound
constexpr int kBoundInstances = 50;
constexpr double kBoundRatio = 1.01;
constexpr double kBoundSlack = 1e-6;
constexpr double kSolverEps = 0.05;
// 2: balanced stopping per scenario
constexpr int kBalancedInstances = 20;
constexpr std::size_t kBalancedReps = 100000;
constexpr double kBalancedFactor = 4.0;
// 3: delayed activation
constexpr std::size_t kFrlpN = 1000000;
constexpr double kFrlpViolation = 1e-9;
constexpr double kFrlpGap = 1e-4;
constexpr double kDaFactor = 4.075;
constexpr std::size_t kDaReps = 100000;
// 4: F scans and closed forms
constexpr std::size_t kScanSteps = 64;
constexpr double kScanFloor = -1e-6;
constexpr double kCornerMax = 1e-2;
constexpr int kClosedFormPoints = 10000;
constexpr double kClosedFormTol = 1e-8;
// 5, 6: Monte Carlo lemmas
constexpr std::size_t kRoundingReps = 100000;
constexpr std::size_t kGoodBadReps = 100000;
// all Monte Carlo comparisons
constexpr double kSigmas = 3.0;
constexpr std::uint64_t kSeed = 20260115;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

PandoraInstance random_case(std::uint64_t key, bool unit_cost) {
  RandomStream rng(kSeed, key, kGeneratorStream);
  const std::size_t n = 2 + rng.below(4);  // 2..5 boxes
  const std::size_t m = 2 + rng.below(5);  // 2..6 scenarios
  if (!unit_cost) return random_instance(n, m, {1.0, 2.0}, {0.0, 5.0}, 0.3, rng);
  auto inst = random_instance(n, m, {1.0, 1.0}, {0.0, 4.0}, 0.3, rng);
  for (auto& s : inst.scenarios) {
    for (auto& v : s.volumes) {
      if (is_finite_volume(v)) v = std::floor(v);
    }
  }
  return inst;
}

Outcome relaxation_bound() {
  double worst = 0.0;
  double worst_original = 0.0;
  int failures = 0;
  for (int k = 0; k < kBoundInstances; ++k) {
    const auto inst = random_case(static_cast<std::uint64_t>(k), false);
    const auto d = discretize(inst, kSolverEps);
    SolverOptions o;
    o.eps = kSolverEps;
    o.seed = static_cast<std::uint64_t>(k);
    const auto r = solve_cp(d, o);
    const double opt = optimal_partially_adaptive(d.rounded).value;
    const double opt_original = optimal_partially_adaptive(inst).value;
    if (!r.converged || r.objective > opt * kBoundRatio + kBoundSlack) ++failures;
    worst = std::max(worst, r.objective / opt);
    worst_original = std::max(worst_original, r.objective / opt_original);
  }
  return {failures == 0, "worst CP/OPT " + fmt(worst) + " (vs unrounded OPT " +
                             fmt(worst_original) + "), failures " + std::to_string(failures)};
}

Outcome balanced_per_scenario() {
  int checked = 0;
  int failures = 0;
  double worst = 0.0;
  for (int k = 0; k < kBalancedInstances; ++k) {
    const auto inst = random_case(1000 + static_cast<std::uint64_t>(k), false);
    SolverOptions o;
    o.eps = kSolverEps;
    o.seed = static_cast<std::uint64_t>(k);
    const auto r = solve_cp(inst, o);
    if (!r.converged) {
      ++failures;
      continue;
    }
    PolicySpec spec;
    spec.kind = PolicyKind::kBalanced;
    const PolicyRunner runner(r.discretized.rounded, r.solution, spec);
    const auto st = evaluate_per_scenario(runner, kBalancedReps, kSeed + k);
    for (std::size_t s = 0; s < inst.num_scenarios(); ++s) {
      const double cp = scenario_cp_objective(r.solution, scenario_shifts(r.discretized, s));
      const auto& ps = st.per_scenario[s].stats;
      ++checked;
      if (ps.mean > kBalancedFactor * cp + kSigmas * ps.std_error) ++failures;
      if (cp > 0.0) worst = std::max(worst, ps.mean / cp);
    }
  }
  return {failures == 0, std::to_string(checked) + " scenarios, worst mean/CP " + fmt(worst) +
                             ", failures " + std::to_string(failures)};
}

Outcome delayed_activation() {
  const auto cert = frlp_dual_certificate(kFrlpN);
  const double gap = std::abs(cert.dual_objective - frlp_limit());
  bool ok = cert.max_violation <= kFrlpViolation && gap <= kFrlpGap;
  std::vector<PandoraInstance> fixtures;
  fixtures.push_back(load_instance(std::string(PANDORA_TEST_DATA) + "/unit.json"));
  fixtures.push_back(from_mssc(load_set_cover(std::string(PANDORA_TEST_DATA) + "/triangle.json")));
  for (std::uint64_t k = 0; k < 4; ++k) fixtures.push_back(random_case(2000 + k, true));
  double worst = 0.0;
  int failures = 0;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    SolverOptions o;
    o.eps = 1.0;
    o.seed = f;
    const auto r = solve_cp(fixtures[f], o);
    if (!r.converged) {
      ++failures;
      continue;
    }
    PolicySpec spec;
    spec.kind = PolicyKind::kDelayedActivationRandom;
    const PolicyRunner runner(r.discretized.rounded, r.solution, spec);
    if (!runner.discrete()) {
      ++failures;
      continue;
    }
    const auto st = evaluate_policy(runner, kDaReps, kSeed + f);
    const double opt = optimal_partially_adaptive(r.discretized.rounded).value;
    if (st.mean > kDaFactor * opt + kSigmas * st.std_error) ++failures;
    worst = std::max(worst, st.mean / opt);
  }
  ok = ok && failures == 0;
  return {ok, "dual objective " + fmt(cert.dual_objective) + ", gap " + fmt(gap) +
                  ", violation " + fmt(cert.max_violation) + "; " +
                  std::to_string(fixtures.size()) + " fixtures, worst mean/OPT " + fmt(worst)};
}

Outcome f_nonnegativity() {
  bool ok = true;
  std::string detail;
  for (double hi : {1.0, 100.0}) {
    FScanSpec spec;
    spec.c_max = hi;
    spec.beta_max = hi;
    spec.steps = kScanSteps;
    const auto rep = scan_F(spec);
    const bool corner = rep.argmin_c == spec.c_min && rep.argmin_beta == spec.beta_min;
    ok = ok && rep.evaluations >= 2500 && rep.min_value >= kScanFloor && corner &&
         rep.min_value <= kCornerMax;
    detail += "[1e-3," + fmt(hi) + "]^2: " + std::to_string(rep.evaluations) + " points, min " +
              fmt(rep.min_value) + (corner ? " at corner; " : " off corner; ");
  }
  RandomStream rng(kSeed, 0, kGeneratorStream);
  double max_g = 0.0;
  double max_h = 0.0;
  for (int k = 0; k < kClosedFormPoints; ++k) {
    const double t = 0.01 + 3.0 * rng.uniform();
    const double c = 0.01 + 3.0 * rng.uniform();
    const double beta = 0.5 * c + 4.0 * rng.uniform();
    const double theta = 12.0 * rng.uniform();
    const double g = g_eval(t, c, beta, theta);
    max_g = std::max(max_g, std::abs(g - g_eval_quadrature(t, c, beta, theta)) /
                                std::max(1.0, std::abs(g)));
    max_h = std::max(max_h, std::abs(h_eval(t, c, beta) - h_eval_quadrature(t, c, beta)));
  }
  ok = ok && max_g <= kClosedFormTol && max_h <= kClosedFormTol;
  detail += "g/h closed-form deviation " + fmt(max_g) + "/" + fmt(max_h);
  return {ok, detail};
}

Outcome poisson_lemmas() {
  const auto inst = load_instance(std::string(PANDORA_TEST_DATA) + "/small.json");
  SolverOptions o;
  o.eps = kSolverEps;
  const auto r = solve_cp(inst, o);
  const auto& d = r.discretized;
  const auto model = make_rate_model(r.solution, d.rounded.costs);
  const double cap = default_tau_max(d.rounded);
  std::vector<ArrivalDraw> draws(kRoundingReps);
  for (std::size_t k = 0; k < kRoundingReps; ++k) draws[k] = sample_arrivals(model, kSeed, k, cap);

  bool ok = true;
  std::string detail;
  const std::vector<double> taus = {0.5, 1.5, 4.0};
  for (double tau : taus) {
    const std::vector<double> theta(d.rounded.num_boxes(), tau);
    const double p = no_arrival_prob(model, theta);
    std::vector<double> none(kRoundingReps), spent(kRoundingReps);
    for (std::size_t k = 0; k < kRoundingReps; ++k) {
      bool any = false;
      double cost = 0.0;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        if (draws[k].alpha[i] <= theta[i]) any = true;
        if (draws[k].alpha[i] < tau) cost += d.rounded.costs[i];
      }
      none[k] = any ? 0.0 : 1.0;
      spent[k] = cost;
    }
    const auto h = summarize(none);
    const auto s = summarize(spent);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(kRoundingReps));
    ok = ok && std::abs(h.mean - p) <= kSigmas * sigma + 1e-12;
    ok = ok && s.mean <= tau + kSigmas * s.std_error;
    detail += "tau " + fmt(tau) + ": P " + fmt(p) + " vs " + fmt(h.mean) + ", cost " +
              fmt(s.mean) + "; ";
  }
  return {ok, detail};
}

Outcome good_bad() {
  std::vector<PandoraInstance> fixtures;
  fixtures.push_back(load_instance(std::string(PANDORA_TEST_DATA) + "/small.json"));
  PandoraInstance two;
  two.costs = {1.0, 3.0};
  two.scenarios = {{0.6, {4.0, 0.0}}, {0.4, {0.0, kInfinite}}};
  fixtures.push_back(two);
  bool ok = true;
  std::string detail;
  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    SolverOptions o;
    o.eps = kSolverEps;
    const auto r = solve_cp(fixtures[f], o);
    const auto st = good_bad_experiment(r.discretized, r.solution, 0, kGoodBadReps, kSeed + f);
    ok = ok && st.difference.mean >= -kSigmas * st.difference.std_error;
    detail += "fixture " + std::to_string(f) + ": good " + fmt(st.good_only.mean) +
              " >= good+bad " + fmt(st.good_and_bad.mean) + "; ";
  }
  return {ok, detail};
}

Outcome set_cover_regression() {
  const auto sc = load_set_cover(std::string(PANDORA_TEST_DATA) + "/triangle.json");
  const auto greedy = greedy_mssc(sc);
  const auto inst = from_mssc(sc);
  const double opt_sum = optimal_partially_adaptive(inst).value * static_cast<double>(sc.universe_size);
  SolverOptions o;
  o.eps = kSolverEps;
  const auto r = solve_cp(inst, o);
  PolicySpec spec;
  const PolicyRunner runner(r.discretized.rounded, r.solution, spec);
  const auto st = evaluate_policy(runner, kBalancedReps, kSeed);
  const bool ok = greedy.sum_cover_time == 4 && std::abs(opt_sum - 4.0) <= 1e-9 &&
                  st.mean <= kBalancedFactor * r.objective + kSigmas * st.std_error;
  return {ok, "greedy " + std::to_string(greedy.sum_cover_time) + ", optimum " + fmt(opt_sum) +
                  ", balanced " + fmt(st.mean) + " vs CP " + fmt(r.objective)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "pandora_acceptance";
  std::filesystem::create_directories(dir);
  const std::string base = std::string(PANDORA_CLI) + " --threads %d simulate --instance " +
                           PANDORA_TEST_DATA + "/small.json --reps 20000 --seed 42 --out ";
  std::vector<std::string> outputs;
  int k = 0;
  for (int threads : {1, 1, 4}) {
    const auto path = dir / ("run" + std::to_string(k++) + ".csv");
    char cmd[2048];
    std::snprintf(cmd, sizeof cmd, base.c_str(), threads);
    const std::string full = std::string(cmd) + path.string() + " > /dev/null";
    if (std::system(full.c_str()) != 0) return {false, "simulate failed"};
    outputs.push_back(slurp(path));
  }
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
  std::filesystem::remove_all(dir);
  return {same, same ? std::to_string(outputs[0].size()) + " bytes identical across 3 runs"
                     : "outputs differ"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"relaxation bound", relaxation_bound},
      {"balanced stopping per scenario", balanced_per_scenario},
      {"delayed activation constant", delayed_activation},
      {"F nonnegativity", f_nonnegativity},
      {"Poisson rounding bounds", poisson_lemmas},
      {"good/bad arrival ordering", good_bad},
      {"set cover regression", set_cover_regression},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) {
      o.detail.pop_back();
    }
    std::printf("%s %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
