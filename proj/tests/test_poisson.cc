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

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "pandora/errors.h"
#include "pandora/poisson.h"
#include "pandora/relaxation.h"
#include "test_support.h"

using namespace pandora;
using boost::math::quadrature::gauss_kronrod;

namespace {

CpSolution single_box(double cost_steps_value, std::size_t points, double step,
                      std::vector<double> cdf) {
  CpSolution X;
  X.grid.step = step;
  X.grid.points = points;
  X.grid.horizon = step * static_cast<double>(points);
  X.X = {std::move(cdf)};
  (void)cost_steps_value;
  return X;
}

// P(w) = sum_s dX(s) min((w - s)_+, c), evaluated straight from the CDF.
double direct_P(const std::vector<double>& cdf, double step, double c, double w) {
  double p = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < cdf.size(); ++j) {
    const double dx = cdf[j] - prev;
    prev = cdf[j];
    const double s = static_cast<double>(j) * step;
    p += dx * std::min(std::max(w - s, 0.0), c);
  }
  return p;
}

}  // namespace

TEST_CASE("integrated rate of a box started at time zero") {
  // c = 1, all mass at 0: Lambda(tau) = tau up to 2, then 2 + 2 ln(tau / 2).
  const auto X = single_box(1, 1, 1.0, {1.0, 1.0});
  const RateProfile prof(X.X[0], X.grid, 1.0);
  CHECK(prof.total_mass() == doctest::Approx(1.0));
  CHECK(prof.integrated(0.0) == 0.0);
  CHECK(prof.integrated(1.0) == doctest::Approx(1.0));
  CHECK(prof.integrated(2.0) == doctest::Approx(2.0));
  CHECK(prof.integrated(8.0) == doctest::Approx(2.0 + 2.0 * std::log(4.0)));
  CHECK(prof.inverse(2.0 + 2.0 * std::log(4.0)) == doctest::Approx(8.0));
  CHECK(prof.inverse(0.5) == doctest::Approx(0.5));
  CHECK(prof.xbar(0.5) == doctest::Approx(1.0));
  CHECK(prof.xbar(4.0) == doctest::Approx(0.25));

  const auto model = make_rate_model(X, std::vector<double>{1.0});
  const std::vector<double> theta = {2.0};
  CHECK(no_arrival_prob(model, theta) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("closed-form integrated rates match quadrature of the definition") {
  RandomStream rng(8, 0, kGeneratorStream);
  for (int trial = 0; trial < 30; ++trial) {
    const double step = 0.25;
    const std::size_t points = 12;
    std::vector<double> cdf(points + 1);
    double v = 0.0;
    for (auto& x : cdf) {
      if (rng.uniform() < 0.4) v = std::min(1.0, v + 0.5 * rng.uniform());
      x = v;
    }
    const double c = 0.25 * static_cast<double>(1 + rng.below(6));
    const double floor = trial % 3 == 0 ? 0.0 : 0.5 * rng.uniform() * 4.0;
    Grid grid{step, step * points, points};
    const RateProfile prof(cdf, grid, c, floor);
    if (!prof.has_mass()) continue;
    for (double tau : {0.3, 1.1, 2.5, 5.0, 9.7, 40.0}) {
      const double w = 0.5 * tau;
      auto rate = [&](double u) {
        return direct_P(cdf, step, c, u) / std::max(u, floor);
      };
      double expected = 0.0;
      double a = 0.0;
      // integrate piecewise between kinks of P
      std::vector<double> cuts;
      for (std::size_t j = 0; j <= points; ++j) {
        cuts.push_back(j * step);
        cuts.push_back(j * step + c);
      }
      cuts.push_back(floor);
      cuts.push_back(w);
      std::sort(cuts.begin(), cuts.end());
      for (double b : cuts) {
        if (b <= a || b > w) continue;
        expected += gauss_kronrod<double, 31>::integrate(rate, a, b, 10, 1e-13);
        a = b;
      }
      expected *= 2.0 / c;
      CHECK(prof.integrated(tau) == doctest::Approx(expected).epsilon(1e-9));
      CHECK(prof.P(w) == doctest::Approx(direct_P(cdf, step, c, w)).epsilon(1e-12));
      const double back = prof.inverse(prof.integrated(tau));
      CHECK(prof.integrated(back) == doctest::Approx(prof.integrated(tau)).epsilon(1e-9));
    }
    CHECK(prof.inverse(1e9) == kNever);
  }
}

TEST_CASE("arrival sampling is reproducible per replication") {
  const auto inst = testing::small_instance();
  SolverOptions o;
  o.iterations = 100;
  const auto r = solve_cp(inst, o);
  const auto model = make_rate_model(r.solution, r.discretized.rounded.costs);
  const double cap = default_tau_max(r.discretized.rounded);
  const auto a = sample_arrivals(model, 42, 7, cap);
  const auto other = sample_arrivals(model, 42, 8, cap);
  const auto b = sample_arrivals(model, 42, 7, cap);
  CHECK(a.alpha == b.alpha);
  CHECK(a.alpha != other.alpha);
  CHECK(a.replication == 7);
  for (double x : a.alpha) CHECK((x == kNever || (x >= 0.0 && x <= cap)));

  std::vector<ArrivalDraw> draws = {a, other};
  std::ostringstream csv;
  write_arrivals_csv(csv, draws);
  CHECK(csv.str().rfind("rep,box,alpha\n", 0) == 0);
}

TEST_CASE("no-arrival probability matches Monte Carlo") {
  const auto inst = testing::small_instance();
  SolverOptions o;
  o.iterations = 100;
  const auto r = solve_cp(inst, o);
  const auto model = make_rate_model(r.solution, r.discretized.rounded.costs);
  const double cap = default_tau_max(r.discretized.rounded);
  const std::vector<double> theta = {1.5, 0.7, 2.2};
  const double p = no_arrival_prob(model, theta);
  const int n = 100000;
  int none = 0;
  for (int k = 0; k < n; ++k) {
    const auto d = sample_arrivals(model, 3, static_cast<std::uint64_t>(k), cap);
    bool any = false;
    for (std::size_t i = 0; i < theta.size(); ++i) any |= d.alpha[i] <= theta[i];
    none += any ? 0 : 1;
  }
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(none / double(n) - p) <= 3 * sigma);
}

TEST_CASE("free boxes take no part in the arrival process") {
  const auto inst = testing::make_instance({0.0, 1.0}, {{0.5, {2.0, 0.0}}, {0.5, {0.0, 1.0}}});
  SolverOptions o;
  const auto r = solve_cp(inst, o);
  const auto model = make_rate_model(r.solution, r.discretized.rounded.costs);
  CHECK(model.free_box[0]);
  CHECK(!model.free_box[1]);
  CHECK(std::isinf(integrated_rate(model, 0, 10.0)));  // arrives at 0 surely
  CHECK(integrated_rate(model, 0, 0.0) == 0.0);
  const std::vector<double> theta = {100.0, 0.0};
  CHECK(no_arrival_prob(model, theta) == doctest::Approx(1.0));
}

TEST_CASE("discrete averages on the unit grid") {
  CpSolution X;
  X.grid = {1.0, 3.0, 3};
  X.X = {{0.0, 0.5, 1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}};
  CHECK(discrete_xbar(X, 0, 1) == doctest::Approx(0.0));
  CHECK(discrete_xbar(X, 0, 2) == doctest::Approx(0.25));
  CHECK(discrete_xbar(X, 0, 4) == doctest::Approx(0.25));
  CHECK(discrete_xbar(X, 0, 10) == doctest::Approx(0.1));
  CHECK(discrete_xbar(X, 1, 1) == doctest::Approx(1.0));
  const std::vector<std::int64_t> theta = {2, 1};
  CHECK(discrete_no_arrival_bound(X, theta) ==
        doctest::Approx(std::exp(-2.0 * (0.0 + 0.25 + 1.0))));

  const auto a = discrete_sample_arrivals(X, 1, 0, 1000);
  const auto b = discrete_sample_arrivals(X, 1, 0, 1000);
  CHECK(a.alpha == b.alpha);
  for (double x : a.alpha) CHECK(x == std::floor(x));

  CpSolution off = X;
  off.grid.step = 0.5;
  CHECK_THROWS_AS(discrete_sample_arrivals(off, 1, 0, 10), DomainError);
}

TEST_CASE("default horizon cap") {
  const auto inst = testing::small_instance();
  CHECK(default_tau_max(inst) == doctest::Approx(64.0 * (3.5 + 3.0)));
  CHECK(default_tau_max(inst, 2.0) == doctest::Approx(2.0 * 6.5));
}
