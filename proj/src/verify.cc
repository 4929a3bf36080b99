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

#include "pandora/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pandora/errors.h"
#include "pandora/poisson.h"
#include "pandora/rng.h"

namespace pandora {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kFloor = 1e-8;

void check_domain(double t, double c, double beta, double theta) {
  if (!(t > 0.0) || !(c > 0.0) || !(theta >= 0.0) || !(beta >= 0.5 * c) ||
      !std::isfinite(t + c + beta)) {
    throw DomainError("g needs t, c > 0, theta >= 0 and beta >= c / 2");
  }
}

// int_a^b f with breakpoints where f has kinks.
template <class Fn>
double integrate_pieces(Fn f, double a, double b, std::vector<double> cuts,
                        double tol) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  double prev = a;
  for (double x : cuts) {
    if (x <= prev) continue;
    if (x > b) break;
    total += gauss_kronrod<double, 31>::integrate(f, prev, x, 15, tol);
    prev = x;
  }
  return total;
}

}  // namespace

double g_eval(double t, double c, double beta, double theta) {
  check_domain(t, c, beta, theta);
  if (theta < std::max(t, beta)) return 0.0;
  const double tc = t + c;
  if (tc < beta) {
    return 2.0 * beta / theta + (2.0 * t + c) / beta - 2.0 * std::log(theta / beta) - 2.0;
  }
  if (beta <= t) {
    if (theta <= tc) {
      return 2.0 * beta * (theta - t) / (c * theta) - 2.0 * (theta - t) / c +
             (2.0 * t / c) * std::log1p((theta - t) / t);
    }
    return 2.0 * beta / theta + (2.0 * t / c) * std::log1p(c / t) -
           2.0 * std::log(theta / tc) - 2.0;
  }
  if (theta <= tc) {
    return 2.0 * beta * (theta - t) / (c * theta) - (beta - t) * (beta - t) / (c * beta) -
           2.0 * (theta - beta) / c + (2.0 * t / c) * std::log(theta / beta);
  }
  return 2.0 * beta / theta + (beta * beta - t * t) / (c * beta) +
         (2.0 * t / c) * std::log(tc / beta) - 2.0 * std::log(theta / tc) - 2.0;
}

double g_eval_quadrature(double t, double c, double beta, double theta) {
  check_domain(t, c, beta, theta);
  if (theta < std::max(t, beta)) return 0.0;
  const double lead = (2.0 * beta / theta) * std::min(theta - t, c) / c;
  auto f = [&](double u) {
    return 2.0 * std::min(u - t, c) / (c * std::max(u, beta));
  };
  return lead - integrate_pieces(f, t, theta, {t + c, beta}, 1e-14);
}

double h_eval(double t, double c, double beta) {
  if (!(c > 0.0)) throw DomainError("h needs c > 0");
  if (beta <= t) return 0.0;
  if (beta <= t + c) return 2.0 * (beta - t) * (beta - t) / c;
  return 4.0 * beta - 4.0 * t - 2.0 * c;
}

double h_eval_quadrature(double t, double c, double beta) {
  if (!(c > 0.0)) throw DomainError("h needs c > 0");
  const double lo = std::min(t, beta);
  if (beta <= lo) return 0.0;
  auto f = [&](double u) { return std::min(u - t, c) / c; };
  return 4.0 * integrate_pieces(f, lo, beta, {t + c}, 1e-14);
}

double F_eval(double t, double c, double beta, bool* floored) {
  bool fl = false;
  if (!(t > 0.0)) {
    t = kFloor;
    fl = true;
  }
  if (!(c > 0.0)) {
    c = kFloor;
    beta = std::max(beta, 0.5 * c);
    fl = true;
  }
  if (floored) *floored = fl;
  if (!(beta >= 0.5 * c) || !std::isfinite(t + c + beta)) {
    throw DomainError("F needs beta >= c / 2");
  }
  const double tc = t + c;
  if (tc < beta) {
    return 8.0 * t + 2.0 * c + 2.0 * beta -
           beta * (-std::expm1(-2.0)) * std::exp((2.0 * t + c) / beta);
  }
  // int_{t+c}^inf exp(2 beta / theta) ((t+c)/theta)^2 dtheta.
  const double x = 2.0 * beta / tc;
  const double tail_base = x > 1e-300 ? tc * tc / (2.0 * beta) * std::expm1(x) : tc;
  double exponent;
  double lo;
  if (beta <= t) {
    exponent = (2.0 * t / c) * std::log1p(c / t) - 2.0;
    lo = t;
  } else {
    exponent = (beta * beta - t * t) / (c * beta) + (2.0 * t / c) * std::log(tc / beta) - 2.0;
    lo = beta;
  }
  double middle = 0.0;
  if (tc > lo) {
    auto f = [&](double theta) { return std::exp(g_eval(t, c, beta, theta)); };
    middle = gauss_kronrod<double, 61>::integrate(f, lo, tc, 10, 1e-11);
  }
  const double integral = std::max(t, beta) + middle + std::exp(exponent) * tail_base;
  return 4.0 * t + 8.0 * beta - 2.0 * integral - h_eval(t, c, beta);
}

namespace {

std::vector<FScanPoint> scan_points(const FScanSpec& spec) {
  if (spec.steps < 2) throw DomainError("scan needs at least 2 steps");
  if (!(spec.c_max >= spec.c_min) || !(spec.beta_max >= spec.beta_min)) {
    throw DomainError("scan ranges must be nondecreasing");
  }
  std::vector<FScanPoint> points;
  const double last = static_cast<double>(spec.steps - 1);
  for (std::size_t a = 0; a < spec.steps; ++a) {
    const double c = spec.c_min + (spec.c_max - spec.c_min) * static_cast<double>(a) / last;
    const double lo = std::max(spec.beta_min, 0.5 * c);
    if (lo > spec.beta_max) continue;
    for (std::size_t b = 0; b < spec.steps; ++b) {
      FScanPoint p;
      p.c = c;
      p.beta = lo + (spec.beta_max - lo) * static_cast<double>(b) / last;
      points.push_back(p);
    }
  }
  return points;
}

FScanReport finish_scan(const FScanSpec& spec, std::vector<FScanPoint> points) {
  FScanReport rep;
  rep.spec = spec;
  rep.evaluations = points.size();
  rep.min_value = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.value < rep.min_value) {
      rep.min_value = p.value;
      rep.argmin_c = p.c;
      rep.argmin_beta = p.beta;
    }
    if (p.value < -spec.tolerance) rep.violations.push_back(p);
  }
  rep.points = std::move(points);
  return rep;
}

}  // namespace

FScanReport scan_F(const FScanSpec& spec) {
  auto points = scan_points(spec);
  const auto count = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t k = 0; k < count; ++k) {
    auto& p = points[static_cast<std::size_t>(k)];
    p.value = F_eval(spec.t, p.c, p.beta, &p.floored);
  }
  return finish_scan(spec, std::move(points));
}

FScanReport scan_F_serial(const FScanSpec& spec) {
  auto points = scan_points(spec);
  for (auto& p : points) p.value = F_eval(spec.t, p.c, p.beta, &p.floored);
  return finish_scan(spec, std::move(points));
}

double frlp_limit() {
  const double e4 = std::exp(4.0);
  return 4.0 * e4 / std::expm1(4.0);
}

FrlpCertificate frlp_dual_certificate(std::size_t N) {
  if (N < 2) throw DomainError("factor-revealing LP needs N >= 2");
  const double n = static_cast<double>(N);
  const double denom = std::expm1(4.0);
  const double e4 = std::exp(4.0);
  auto k_of = [&](std::size_t i) { return 4.0 * static_cast<double>(i) / n; };
  // a_i = (4/N) e^{4i/N} / (e^4 - 1), the primal objective weights.
  auto a = [&](std::size_t i) { return 4.0 / n * std::exp(k_of(i)) / denom; };

  // Q_i = S_i / (i (e^4 - 1)) with S_i compensated prefix sums.
  std::vector<double> q(N + 1, 0.0);
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t j = 1; j <= N; ++j) {
    const double b = std::exp(k_of(j)) * (k_of(j) + 1.0);
    const double t = sum + b;
    comp += std::abs(sum) >= std::abs(b) ? (sum - t) + b : (b - t) + sum;
    sum = t;
    q[j] = (sum + comp) / (static_cast<double>(j) * denom);
  }
  FrlpCertificate cert;
  cert.N = N;
  cert.P = (sum + comp) / (n * denom);
  cert.dual_objective = 4.0 * cert.P;
  cert.limit_gap = std::abs(cert.dual_objective - frlp_limit());
  cert.min_slack = std::numeric_limits<double>::infinity();

  auto record = [&](int family, std::size_t index, double slack) {
    cert.min_slack = std::min(cert.min_slack, slack);
    if (slack < 0.0) {
      cert.max_violation = std::max(cert.max_violation, -slack);
      if (slack < -1e-9 && cert.violations.size() < 16) {
        cert.violations.push_back({family, index, slack});
      }
    }
  };
  record(1, 1, q[1] - a(1));
  for (std::size_t i = 2; i + 1 <= N; ++i) record(2, i, q[i] - q[i - 1] - a(i));
  record(3, N, cert.P - q[N - 1] - a(N));
  record(4, 1, k_of(1) * q[1] - a(1) * (k_of(1) + 1.0));
  for (std::size_t i = 2; i + 1 <= N; ++i) {
    record(5, i, k_of(i) * q[i] - k_of(i - 1) * q[i - 1] - a(i) * (k_of(i) + 1.0));
  }
  record(6, N, 4.0 * cert.P - k_of(N - 1) * q[N - 1] - 20.0 / n * e4 / denom);
  record(7, 0, cert.P);
  for (std::size_t i = 1; i <= N; ++i) record(7, i, q[i]);
  cert.feasible = cert.max_violation <= 1e-9;
  return cert;
}

std::vector<double> good_rates(const ScenarioAllocation& alloc, const Grid& grid,
                               std::span<const double> costs,
                               std::span<const double> volumes, double tau) {
  std::vector<double> rates(costs.size(), 0.0);
  if (!(tau > 0.0)) return rates;
  const double half = 0.5 * tau;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const double c = costs[i];
    if (!(c > 0.0) || !is_finite_volume(volumes[i])) continue;
    const double beta = c + volumes[i];
    double p = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < alloc.Z[i].size(); ++j) {
      const double dz = alloc.Z[i][j] - prev;
      prev = alloc.Z[i][j];
      if (dz == 0.0) continue;
      const double s = static_cast<double>(j) * grid.step;
      if (s >= half) break;
      p += dz * std::min(half - s, c);
    }
    rates[i] = 2.0 * p / (c * std::max(tau, beta));
  }
  return rates;
}

std::vector<double> total_rates(const CpSolution& X, std::span<const double> costs,
                                double tau) {
  std::vector<double> rates(costs.size(), 0.0);
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i] > 0.0) rates[i] = xbar(X, i, costs[i], 0.5 * tau) / costs[i];
  }
  return rates;
}

namespace {

struct GoodBadBox {
  bool free = false;
  bool finite = false;
  double beta = 0.0;
  RateProfile total;
  RateProfile good;
  bool has_total = false;
  bool has_good = false;
};

// Smallest tau with Lambda(tau) - Lambda^g(tau) >= e, by bisection.
double bad_inverse(const GoodBadBox& box, double e, double tau_max) {
  auto bad = [&](double tau) {
    const double g = box.has_good ? box.good.integrated(tau) : 0.0;
    return std::max(0.0, box.total.integrated(tau) - g);
  };
  if (bad(tau_max) < e) return kNever;
  double lo = 0.0;
  double hi = tau_max;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (bad(mid) >= e) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

void check_rates(const std::vector<GoodBadBox>& boxes, const ScenarioAllocation& alloc,
                 const CpSolution& X, std::span<const double> costs,
                 std::span<const double> volumes, double tau_max, GoodBadStats& out) {
  std::vector<double> taus;
  for (const auto& b : boxes) {
    for (const auto* prof : {&b.total, &b.good}) {
      for (double w : prof->knots()) {
        if (w <= 0.0) continue;
        taus.push_back(2.0 * w);
        taus.push_back(2.0 * w * (1.0 - 1e-9));
      }
    }
  }
  for (double tau = 1e-3 * X.grid.step; tau < tau_max; tau *= 1.05) taus.push_back(tau);
  for (std::size_t j = 1; j <= 4 * X.grid.size(); ++j) {
    taus.push_back(0.5 * static_cast<double>(j) * X.grid.step);
  }
  out.max_rate_excess = -std::numeric_limits<double>::infinity();
  for (double tau : taus) {
    if (!(tau > 0.0)) continue;
    const auto g = good_rates(alloc, X.grid, costs, volumes, tau);
    const auto all = total_rates(X, costs, tau);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      sum += g[i];
      if (g[i] > all[i] + 1e-9 * std::max(1.0, all[i])) {
        throw DomainError("good rate of box " + std::to_string(i) +
                          " exceeds its total rate at tau=" + std::to_string(tau));
      }
    }
    const double excess = sum - 2.0 / tau;
    out.max_rate_excess = std::max(out.max_rate_excess, excess);
    if (excess > 1e-9 * std::max(1.0, 2.0 / tau)) {
      throw DomainError("good rates sum above 2/tau at tau=" + std::to_string(tau));
    }
  }
}

// tau* + beta_{i*} for Balanced Stopping, or the cap fallback.
double balanced_bound(const std::vector<GoodBadBox>& boxes,
                      std::span<const double> alpha, double tau_max, bool& cap) {
  double best = kInfinite;
  double best_beta = 0.0;
  double min_beta = kInfinite;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (!boxes[i].finite) continue;
    min_beta = std::min(min_beta, boxes[i].beta);
    if (!arrived(alpha[i])) continue;
    const double tau = std::max(alpha[i], boxes[i].beta);
    if (tau < best) {
      best = tau;
      best_beta = boxes[i].beta;
    }
  }
  cap = !std::isfinite(best);
  return cap ? tau_max + min_beta : best + best_beta;
}

}  // namespace

namespace {

GoodBadStats good_bad_impl(const DiscretizedInstance& d, const CpSolution& X,
                           const ScenarioAllocation& alloc, std::size_t scenario,
                           std::size_t replications, std::uint64_t seed, double tau_max,
                           bool parallel) {
  if (replications < 1) throw DomainError("replications must be at least 1");
  const auto& costs = d.rounded.costs;
  const auto& volumes = d.rounded.scenarios.at(scenario).volumes;
  const std::size_t n = costs.size();
  if (X.num_boxes() != n || alloc.Z.size() != n) {
    throw InvalidInstance("solution or allocation does not match the instance");
  }
  if (!(tau_max > 0.0)) tau_max = default_tau_max(d.rounded);

  std::vector<GoodBadBox> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& b = boxes[i];
    b.finite = is_finite_volume(volumes[i]);
    b.beta = b.finite ? costs[i] + volumes[i] : kInfinite;
    if (!(costs[i] > 0.0)) {
      b.free = true;
      continue;
    }
    b.total = RateProfile(X.X[i], X.grid, costs[i]);
    b.has_total = b.total.has_mass();
    if (b.finite) {
      b.good = RateProfile(alloc.Z[i], X.grid, costs[i], 0.5 * b.beta);
      b.has_good = b.good.has_mass();
    }
  }
  GoodBadStats out;
  check_rates(boxes, alloc, X, costs, volumes, tau_max, out);

  std::vector<double> good_only(replications);
  std::vector<double> both(replications);
  std::vector<double> diff(replications);
  std::vector<unsigned char> caps(replications, 0);
  const auto count = static_cast<std::int64_t>(replications);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t r = 0; r < count; ++r) {
    const auto rep = static_cast<std::uint64_t>(r);
    std::vector<double> ag(n, kNever);
    std::vector<double> agb(n, kNever);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& b = boxes[i];
      if (b.free) {
        ag[i] = agb[i] = 0.0;
        continue;
      }
      RandomStream good_rng(seed, rep, kBoxStreamBase + i);
      const double eg = good_rng.exponential();
      if (b.has_good) {
        const double a = b.good.inverse(eg);
        if (a <= tau_max) ag[i] = a;
      }
      RandomStream bad_rng(seed, rep, kBadArrivalStream + (static_cast<std::uint64_t>(i) << 32));
      const double eb = bad_rng.exponential();
      agb[i] = ag[i];
      if (b.has_total) agb[i] = std::min(agb[i], bad_inverse(b, eb, tau_max));
    }
    bool cap_g = false;
    bool cap_b = false;
    const auto idx = static_cast<std::size_t>(r);
    good_only[idx] = balanced_bound(boxes, ag, tau_max, cap_g);
    both[idx] = balanced_bound(boxes, agb, tau_max, cap_b);
    diff[idx] = good_only[idx] - both[idx];
    caps[idx] = (cap_g || cap_b) ? 1 : 0;
  }
  out.good_only = summarize(good_only);
  out.good_and_bad = summarize(both);
  out.difference = summarize(diff);
  out.cap_hits = static_cast<std::size_t>(std::count(caps.begin(), caps.end(), 1));
  out.ordered = out.difference.mean >= -3.0 * out.difference.std_error;
  return out;
}

}  // namespace

GoodBadStats good_bad_experiment(const DiscretizedInstance& d, const CpSolution& X,
                                 const ScenarioAllocation& alloc,
                                 std::size_t scenario, std::size_t replications,
                                 std::uint64_t seed, double tau_max) {
  return good_bad_impl(d, X, alloc, scenario, replications, seed, tau_max, true);
}

GoodBadStats good_bad_experiment_serial(const DiscretizedInstance& d, const CpSolution& X,
                                        const ScenarioAllocation& alloc,
                                        std::size_t scenario, std::size_t replications,
                                        std::uint64_t seed, double tau_max) {
  return good_bad_impl(d, X, alloc, scenario, replications, seed, tau_max, false);
}

GoodBadStats good_bad_experiment(const DiscretizedInstance& d, const CpSolution& X,
                                 std::size_t scenario, std::size_t replications,
                                 std::uint64_t seed, double tau_max) {
  const auto alloc = derive_allocation(X, scenario_shifts(d, scenario));
  return good_bad_experiment(d, X, alloc, scenario, replications, seed, tau_max);
}

}  // namespace pandora
