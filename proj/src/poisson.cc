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

#include "pandora/poisson.h"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

#include "pandora/errors.h"
#include "pandora/io.h"
#include "pandora/rng.h"

namespace pandora {

namespace {

constexpr int kMaxInversionSteps = 200;

bool same_time(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

RateProfile::RateProfile(std::span<const double> cdf, const Grid& grid,
                         double cost, double floor)
    : cost_(cost), floor_(std::max(0.0, floor)) {
  if (!(cost > 0.0)) throw DomainError("rate profile needs a positive cost");
  // Slope events: +dX at the start time s, -dX once the box is done at s + c.
  std::vector<std::pair<double, double>> events;
  double prev = 0.0;
  for (std::size_t j = 0; j < cdf.size(); ++j) {
    const double dx = cdf[j] - prev;
    prev = std::max(prev, cdf[j]);
    if (!(dx > 0.0)) continue;
    const double s = static_cast<double>(j) * grid.step;
    events.emplace_back(s, dx);
    events.emplace_back(s + cost, -dx);
  }
  events.emplace_back(0.0, 0.0);
  if (floor_ > 0.0) events.emplace_back(floor_, 0.0);
  std::sort(events.begin(), events.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double slope = 0.0;
  for (std::size_t e = 0; e < events.size();) {
    const double w = events[e].first;
    while (e < events.size() && same_time(events[e].first, w)) {
      slope += events[e].second;
      ++e;
    }
    if (!knots_.empty()) {
      const std::size_t k = knots_.size() - 1;
      p_.push_back(p_[k] + slope_[k] * (w - knots_[k]));
    } else {
      p_.push_back(0.0);
    }
    knots_.push_back(w);
    // Cancelling events leave rounding noise in the running slope.
    slope_.push_back(std::abs(slope) < 1e-13 ? 0.0 : slope);
    if (std::abs(slope) < 1e-13) slope = 0.0;
  }
  slope_.back() = 0.0;
  for (double& p : p_) p = std::max(0.0, p);
  total_mass_ = p_.back();

  l_.assign(knots_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    l_[k + 1] = l_[k] + segment_integral(k, knots_[k + 1]);
  }
}

double RateProfile::segment_integral(std::size_t k, double w) const {
  const double w0 = knots_[k];
  const double d = w - w0;
  if (d <= 0.0) return 0.0;
  const double p0 = p_[k];
  const double s = slope_[k];
  double value;
  if (w0 < floor_) {
    value = (p0 * d + 0.5 * s * d * d) / floor_;
  } else {
    // P(u) = A + s u on the segment.
    const double a = w0 > 0.0 ? p0 - s * w0 : 0.0;
    value = s * d;
    if (a != 0.0) value += a * std::log(w / w0);
  }
  return 2.0 * value / cost_;
}

double RateProfile::P(double w) const {
  if (w <= 0.0) return 0.0;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), w);
  const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return p_[k] + slope_[k] * (w - knots_[k]);
}

double RateProfile::xbar(double t) const { return t > 0.0 ? P(t) / t : 0.0; }

double RateProfile::integrated(double tau) const {
  if (!(tau > 0.0)) return 0.0;
  const double w = 0.5 * tau;
  if (std::isinf(w)) return has_mass() ? kInfinite : l_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), w);
  const auto k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  return l_[k] + segment_integral(k, w);
}

double RateProfile::invert_segment(std::size_t k, double target) const {
  const double w0 = knots_[k];
  const double p0 = p_[k];
  const double s = slope_[k];
  const double q = 0.5 * target * cost_;
  if (w0 < floor_) {
    // (p0 d + s d^2 / 2) / floor = q, stable root.
    const double qb = q * floor_;
    const double root = std::sqrt(p0 * p0 + 2.0 * s * qb);
    return w0 + 2.0 * qb / (p0 + root);
  }
  const bool last = k + 1 == knots_.size();
  const double a = w0 > 0.0 ? p0 - s * w0 : 0.0;
  if (s == 0.0) return a > 0.0 ? w0 * std::exp(q / a) : w0;
  if (a == 0.0 || std::abs(a) <= 1e-15 * std::abs(s * w0)) return w0 + q / s;
  // Both terms present: safeguarded Newton on f(w) = a ln(w/w0) + s (w - w0) - q.
  double lo = w0;
  double hi = last ? kInfinite : knots_[k + 1];
  double w = std::isfinite(hi) ? 0.5 * (lo + hi) : w0 + q / std::max(s, 1e-300);
  for (int it = 0; it < kMaxInversionSteps; ++it) {
    const double f = a * std::log(w / w0) + s * (w - w0) - q;
    if (f > 0.0) {
      hi = w;
    } else {
      lo = w;
    }
    const double df = a / w + s;
    double next = df > 0.0 ? w - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - w) <= 1e-14 * std::max(1.0, w)) return next;
    w = next;
    if (std::isfinite(hi) && hi - lo <= 1e-13 * std::max(1.0, hi)) break;
  }
  return w;
}

double RateProfile::inverse(double e) const {
  if (!(e > 0.0)) return 0.0;
  const auto it = std::upper_bound(l_.begin(), l_.end(), e);
  const auto k = static_cast<std::size_t>(it - l_.begin()) - 1;
  if (k + 1 == l_.size()) {
    if (!has_mass()) return kNever;
    // Tail: L = l_K + (2/c) P_K ln(w / w_K).
    const double w = knots_[k] * std::exp((e - l_[k]) * cost_ / (2.0 * total_mass_));
    return std::isfinite(w) ? 2.0 * w : kNever;
  }
  return 2.0 * invert_segment(k, e - l_[k]);
}

RateModel make_rate_model(const CpSolution& X, std::span<const double> costs) {
  if (costs.size() != X.num_boxes()) {
    throw InvalidInstance("cost vector does not match the solution");
  }
  RateModel model;
  model.boxes.resize(costs.size());
  model.free_box.assign(costs.size(), false);
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i] > 0.0) {
      model.boxes[i] = RateProfile(X.X[i], X.grid, costs[i]);
    } else {
      model.free_box[i] = true;
    }
  }
  return model;
}

double xbar(const CpSolution& X, std::size_t i, double cost, double t) {
  if (!(t > 0.0)) return 0.0;
  double p = 0.0;
  double prev = 0.0;
  const auto& xi = X.X[i];
  for (std::size_t j = 0; j < xi.size(); ++j) {
    const double dx = xi[j] - prev;
    prev = xi[j];
    if (dx == 0.0) continue;
    const double s = static_cast<double>(j) * X.grid.step;
    if (s >= t) break;
    p += dx * std::min(t - s, cost);
  }
  return p / t;
}

double discrete_xbar(const CpSolution& X, std::size_t i, std::int64_t t) {
  if (t <= 0) return 0.0;
  const auto n = static_cast<std::int64_t>(X.grid.points);
  return X.at(i, std::min(t, n) - 1) / static_cast<double>(t);
}

double integrated_rate(const RateModel& model, std::size_t i, double tau) {
  if (model.free_box[i]) return tau > 0.0 ? kInfinite : 0.0;
  return model.boxes[i].integrated(tau);
}

ArrivalDraw sample_arrivals(const RateModel& model, std::uint64_t seed,
                            std::uint64_t replication, double tau_max) {
  if (!(tau_max > 0.0)) throw DomainError("tau_max must be positive");
  ArrivalDraw draw;
  draw.seed = seed;
  draw.replication = replication;
  draw.alpha.assign(model.num_boxes(), kNever);
  for (std::size_t i = 0; i < model.num_boxes(); ++i) {
    if (model.free_box[i]) {
      draw.alpha[i] = 0.0;
      continue;
    }
    RandomStream rng(seed, replication, kBoxStreamBase + i);
    const double e = rng.exponential();
    const RateProfile& box = model.boxes[i];
    if (!box.has_mass()) continue;
    const double a = box.inverse(e);
    if (a <= tau_max) {
      draw.alpha[i] = a;
    } else {
      draw.truncated = true;
    }
  }
  return draw;
}

ArrivalDraw discrete_sample_arrivals(const CpSolution& X, std::uint64_t seed,
                                     std::uint64_t replication,
                                     std::int64_t tau_max) {
  if (std::abs(X.grid.step - 1.0) > 1e-12) {
    throw DomainError("discrete rounding needs a solution on the unit grid");
  }
  const std::size_t n = X.num_boxes();
  ArrivalDraw draw;
  draw.seed = seed;
  draw.replication = replication;
  draw.alpha.assign(n, kNever);
  std::size_t pending = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (X.at(i, static_cast<std::int64_t>(X.grid.points)) > 0.0) ++pending;
  }
  RandomStream rng(seed, replication, kDiscreteArrivalStream);
  std::vector<double> p(n);
  std::int64_t cached_t = -1;
  for (std::int64_t tau = 1; tau <= tau_max && pending > 0; ++tau) {
    const std::int64_t t = (tau + 1) / 2;
    double total = 0.0;
    if (t != cached_t) {
      for (std::size_t i = 0; i < n; ++i) p[i] = discrete_xbar(X, i, t);
      cached_t = t;
    }
    for (double v : p) total += v;
    double u = rng.uniform() * std::max(1.0, total);
    for (std::size_t i = 0; i < n; ++i) {
      if (u < p[i]) {
        if (!arrived(draw.alpha[i])) {
          draw.alpha[i] = static_cast<double>(tau);
          --pending;
        }
        break;
      }
      u -= p[i];
    }
  }
  draw.truncated = pending > 0;
  return draw;
}

double no_arrival_prob(const RateModel& model, std::span<const double> theta) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.num_boxes(); ++i) {
    if (model.free_box[i]) continue;
    total += model.boxes[i].integrated(theta[i]);
  }
  return std::exp(-total);
}

double discrete_no_arrival_bound(const CpSolution& X,
                                 std::span<const std::int64_t> theta) {
  double total = 0.0;
  for (std::size_t i = 0; i < X.num_boxes(); ++i) {
    for (std::int64_t t = 1; t <= theta[i]; ++t) total += discrete_xbar(X, i, t);
  }
  return std::exp(-2.0 * total);
}

double default_tau_max(const PandoraInstance& instance, double multiplier) {
  double cost = 0.0;
  for (double c : instance.costs) cost += c;
  double vmax = 0.0;
  for (const auto& sd : instance.scenarios) {
    for (double v : sd.volumes) {
      if (is_finite_volume(v)) vmax = std::max(vmax, v);
    }
  }
  const double tau = multiplier * (cost + vmax);
  return tau > 0.0 ? tau : multiplier;
}

void write_arrivals_csv(std::ostream& out, std::span<const ArrivalDraw> draws) {
  out << "rep,box,alpha\n";
  for (const auto& d : draws) {
    for (std::size_t i = 0; i < d.alpha.size(); ++i) {
      out << d.replication << ',' << i << ',' << format_double(d.alpha[i]) << '\n';
    }
  }
}

}  // namespace pandora
