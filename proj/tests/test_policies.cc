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

#include <omp.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "pandora/errors.h"
#include "pandora/oracle.h"
#include "pandora/policies.h"
#include "pandora/relaxation.h"
#include "test_support.h"

using namespace pandora;
using pandora::testing::kInf;

namespace {

ArrivalDraw draw_of(std::vector<double> alpha) {
  ArrivalDraw d;
  d.alpha = std::move(alpha);
  return d;
}

}  // namespace

TEST_CASE("balanced stopping waits for the balanced time") {
  const std::vector<double> costs = {1.0, 1.0, 1.0};
  const std::vector<double> vol = {3.0, 0.0, kInf};
  // tau_0 = max(0.5, 4) = 4, tau_1 = max(2, 1) = 2; box 2 is never eligible
  const auto rec = balanced_run(draw_of({0.5, 2.0, 1.0}), vol, costs);
  CHECK(rec.stop_time == doctest::Approx(2.0));
  CHECK(rec.stop_box == 1);
  CHECK(rec.opened_order == std::vector<std::size_t>{0, 2, 1});
  CHECK(rec.taken_box == 1);
  CHECK(rec.objective == doctest::Approx(3.0));
  CHECK(!rec.cap_hit);
}

TEST_CASE("clairvoyant stopping keys on alpha plus k times volume") {
  const std::vector<double> costs = {1.0, 2.0};
  const std::vector<double> vol = {3.0, 0.0};
  const auto rec = clairvoyant_run(draw_of({0.5, 2.0}), vol, costs);
  CHECK(rec.stop_box == 1);
  CHECK(rec.objective == doctest::Approx(3.0));
  // with k = 0.25 box 0 wins: 0.5 + 0.75 < 2
  const auto early = clairvoyant_run(draw_of({0.5, 2.0}), vol, costs, 0.25);
  CHECK(early.stop_box == 0);
  CHECK(early.opened_order == std::vector<std::size_t>{0});
  CHECK(early.objective == doctest::Approx(4.0));
}

TEST_CASE("delayed activation stops after the floored delay") {
  const std::vector<double> costs = {1.0, 1.0, 1.0};
  const std::vector<double> vol = {1.7, 0.0, 2.0};
  // stops: 1 + floor(1.7) = 2, 3 + 0 = 3, 1 + 2 = 3
  const auto rec = delayed_activation_run(draw_of({1.0, 3.0, 1.0}), vol, costs, 1.0);
  CHECK(rec.stop_time == doctest::Approx(2.0));
  CHECK(rec.opened_order == std::vector<std::size_t>{0, 2});
  CHECK(rec.taken_box == 0);
  CHECK(rec.objective == doctest::Approx(2.0 + 1.7));
}

TEST_CASE("cap fallback opens arrivals then the cheapest boxes") {
  const std::vector<double> costs = {3.0, 1.0, 2.0};
  const std::vector<double> vol = {5.0, kInf, 4.0};
  const auto rec = balanced_run(draw_of({kNever, 1.0, kNever}), vol, costs);
  CHECK(rec.cap_hit);
  CHECK(rec.stop_time == kNever);
  CHECK(rec.opened_order == std::vector<std::size_t>{1, 2, 0});
  CHECK(rec.objective == doctest::Approx(6.0 + 4.0));
}

TEST_CASE("fixed order stops at the first zero volume") {
  const std::vector<double> costs = {1.0, 1.0, 1.0};
  const std::vector<double> vol = {2.0, 0.0, 0.0};
  const std::vector<std::size_t> order = {0, 1, 2};
  const auto rec = fixed_order_run(order, vol, costs);
  CHECK(rec.opened_order.size() == 2);
  CHECK(rec.objective == doctest::Approx(2.0));
}

TEST_CASE("random delay has the truncated exponential law") {
  CHECK(k_from_uniform(0.0) == 0.0);
  CHECK(k_from_uniform(1.0) == doctest::Approx(4.0));
  const double d = std::expm1(4.0);
  const double e4 = std::exp(4.0);
  const double mean = (3.0 * e4 + 1.0) / d;
  const double second = (10.0 * e4 - 2.0) / d;
  const double sd = std::sqrt(second - mean * mean);
  const int n = 200000;
  double s = 0.0;
  for (int r = 0; r < n; ++r) {
    RandomStream rng(9, static_cast<std::uint64_t>(r), kDelayStream);
    const double k = sample_k(rng);
    REQUIRE(k >= 0.0);
    REQUIRE(k <= 4.0);
    s += k;
  }
  CHECK(std::abs(s / n - mean) <= 4.0 * sd / std::sqrt(double(n)));
}

TEST_CASE("greedy set cover on the triangle") {
  const auto g = greedy_mssc(testing::triangle());
  CHECK(g.sum_cover_time == 4);
  CHECK(g.ordering.size() == 3);
  CHECK(g.ordering[0] == 0);
  CHECK(g.cover_times == std::vector<std::size_t>{1, 1, 2});
  // brute force: every order covers two elements at time 1 and one at time 2
  const auto opt = optimal_partially_adaptive(from_mssc(testing::triangle()));
  CHECK(opt.value * 3.0 == doctest::Approx(4.0));
}

TEST_CASE("policy names parse") {
  CHECK(parse_policy("balanced") == PolicyKind::kBalanced);
  CHECK(parse_policy("clairvoyant") == PolicyKind::kClairvoyant);
  CHECK(parse_policy("da") == PolicyKind::kDelayedActivation);
  CHECK(parse_policy("da-random") == PolicyKind::kDelayedActivationRandom);
  CHECK(parse_policy("greedy-mssc") == PolicyKind::kGreedyMssc);
  CHECK(!parse_policy("nonsense").has_value());
  CHECK(policy_name(PolicyKind::kDelayedActivationRandom) == "da-random");
}

TEST_CASE("pairwise summation is accurate and shape fixed") {
  std::vector<double> v(100003);
  RandomStream rng(4, 0, kGeneratorStream);
  long double exact = 0.0L;
  for (auto& x : v) {
    x = rng.uniform() * 1e3;
    exact += x;
  }
  CHECK(pairwise_sum(v) == doctest::Approx(static_cast<double>(exact)).epsilon(1e-14));
  const auto a = summarize(v);
  const auto b = summarize_serial(v);
  CHECK(a.count == b.count);
  CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-14));
  CHECK(a.std_error == doctest::Approx(b.std_error).epsilon(1e-10));
}

TEST_CASE("delayed activation needs a unit-cost instance") {
  const auto inst = testing::small_instance();
  SolverOptions o;
  o.iterations = 50;
  const auto r = solve_cp(inst, o);
  PolicySpec spec;
  spec.kind = PolicyKind::kDelayedActivation;
  CHECK_THROWS_AS(PolicyRunner(r.discretized.rounded, r.solution, spec), DomainError);
}

TEST_CASE("evaluation does not depend on the thread count") {
  const auto inst = testing::small_instance();
  SolverOptions o;
  o.iterations = 100;
  const auto r = solve_cp(inst, o);
  for (auto kind : {PolicyKind::kBalanced, PolicyKind::kClairvoyant}) {
    PolicySpec spec;
    spec.kind = kind;
    const PolicyRunner runner(r.discretized.rounded, r.solution, spec);
    const auto serial = evaluate_policy_serial(runner, 5000, 42);
    omp_set_num_threads(4);
    const auto par4 = evaluate_policy(runner, 5000, 42);
    omp_set_num_threads(1);
    const auto par1 = evaluate_policy(runner, 5000, 42);
    CHECK(par4.mean == par1.mean);
    CHECK(par4.std_error == par1.std_error);
    CHECK(serial.mean == doctest::Approx(par4.mean).epsilon(1e-13));
    CHECK(serial.replications == 5000);

    const auto ps = evaluate_per_scenario_serial(runner, 3000, 7);
    omp_set_num_threads(3);
    const auto pp = evaluate_per_scenario(runner, 3000, 7);
    omp_set_num_threads(1);
    REQUIRE(ps.per_scenario.size() == pp.per_scenario.size());
    for (std::size_t s = 0; s < ps.per_scenario.size(); ++s) {
      CHECK(ps.per_scenario[s].stats.mean ==
            doctest::Approx(pp.per_scenario[s].stats.mean).epsilon(1e-13));
    }
    CHECK(ps.mean == doctest::Approx(pp.mean).epsilon(1e-13));
  }
}

TEST_CASE("coupled per-scenario means stay within four times the scenario relaxation") {
  const auto inst = testing::small_instance();
  SolverOptions o;
  const auto r = solve_cp(inst, o);
  PolicySpec spec;
  const PolicyRunner runner(r.discretized.rounded, r.solution, spec);
  const auto st = evaluate_per_scenario(runner, 20000, 3);
  for (std::size_t s = 0; s < inst.num_scenarios(); ++s) {
    const double cp = scenario_cp_objective(r.solution, scenario_shifts(r.discretized, s));
    const auto& ps = st.per_scenario[s].stats;
    CHECK(ps.count == 20000);
    CHECK(ps.mean <= 4.0 * cp + 3.0 * ps.std_error);
  }
}

TEST_CASE("unit-cost instances use discrete rounding for delayed activation") {
  const auto inst = testing::unit_instance();
  SolverOptions o;
  o.eps = 1.0;
  const auto r = solve_cp(inst, o);
  PolicySpec spec;
  spec.kind = PolicyKind::kDelayedActivationRandom;
  const PolicyRunner runner(r.discretized.rounded, r.solution, spec);
  CHECK(runner.discrete());
  const auto st = evaluate_policy(runner, 20000, 11);
  const double opt = testing::brute_force_opt(inst);
  CHECK(st.mean <= 4.075 * opt + 3.0 * st.std_error);
  CHECK(st.mean >= opt - 3.0 * st.std_error);
}
