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

#ifndef PANDORA_POISSON_H_
#define PANDORA_POISSON_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "pandora/instance.h"
#include "pandora/relaxation.h"

namespace pandora {

// Arrival time of a box that never arrives before the horizon cap.
inline constexpr double kNever = std::numeric_limits<double>::infinity();

inline bool arrived(double alpha) { return alpha != kNever; }

// Piecewise linear P(w) = sum_s dX(s) * min((w - s)_+, c) for one box, and
// its integrated arrival rate
//
//   L(w) = (2 / c) * int_0^w P(u) / max(u, floor) du,   Lambda(tau) = L(tau/2).
//
// With floor = 0 this is the Poisson Rounding rate (1/c) xbar(tau/2). A
// positive floor gives the good-arrival rate, whose denominator is
// max{tau, beta}.
class RateProfile {
 public:
  RateProfile() = default;
  // cdf holds step-CDF values at the grid points of `grid`; start-time mass
  // is the sequence of increments, with cdf[-1] = 0.
  RateProfile(std::span<const double> cdf, const Grid& grid, double cost,
              double floor = 0.0);

  double cost() const { return cost_; }
  // c * X(infinity).
  double total_mass() const { return total_mass_; }
  bool has_mass() const { return total_mass_ > 0.0; }

  double P(double w) const;
  // P(t) / t; 0 for t <= 0.
  double xbar(double t) const;
  // Lambda(tau), nondecreasing, Lambda(0) = 0.
  double integrated(double tau) const;
  // Smallest tau with Lambda(tau) = e, kNever if Lambda stays below e.
  double inverse(double e) const;

  std::span<const double> knots() const { return knots_; }

 private:
  double segment_integral(std::size_t k, double w) const;
  double invert_segment(std::size_t k, double target) const;

  double cost_ = 0.0;
  double floor_ = 0.0;
  double total_mass_ = 0.0;
  std::vector<double> knots_;  // w_0 = 0 < w_1 < ... ; P is constant past the last
  std::vector<double> p_;      // P at the knots
  std::vector<double> slope_;  // slope of P on [w_k, w_{k+1})
  std::vector<double> l_;      // L at the knots
};

// Rate profiles of every box of a CP solution. Zero-cost boxes are free:
// they are opened at time 0 and take no part in the arrival process.
struct RateModel {
  std::vector<RateProfile> boxes;
  std::vector<bool> free_box;

  std::size_t num_boxes() const { return boxes.size(); }
};

RateModel make_rate_model(const CpSolution& X, std::span<const double> costs);

struct ArrivalDraw {
  std::vector<double> alpha;  // kNever if no arrival up to the cap
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  bool truncated = false;  // some box with positive mass hit the cap
};

// Continuous average opening rate of box i at real time t > 0.
double xbar(const CpSolution& X, std::size_t i, double cost, double t);

// Unit-cost average (1/t) sum_{t' <= min(t, n)} x_i(t') on the integer grid.
double discrete_xbar(const CpSolution& X, std::size_t i, std::int64_t t);

// Infinite for free boxes at any tau > 0.
double integrated_rate(const RateModel& model, std::size_t i, double tau);

// First arrivals by inversion alpha_i = Lambda_i^{-1}(E_i), E_i ~ Exp(1)
// drawn from the stream (seed, replication, kBoxStreamBase + i).
ArrivalDraw sample_arrivals(const RateModel& model, std::uint64_t seed,
                            std::uint64_t replication, double tau_max);

// Discrete-time rounding: at every step tau = 1, 2, ... one box (or a dummy)
// is sampled with probability discrete_xbar(i, ceil(tau / 2)). Requires a
// solution on the unit grid of a unit-cost instance.
ArrivalDraw discrete_sample_arrivals(const CpSolution& X, std::uint64_t seed,
                                     std::uint64_t replication,
                                     std::int64_t tau_max);

// exp(-sum_i Lambda_i(theta_i)) over the boxes in the arrival process.
double no_arrival_prob(const RateModel& model, std::span<const double> theta);

// Discrete analogue: exp(-2 sum_i sum_{tau <= theta_i} discrete_xbar(i, tau)).
double discrete_no_arrival_bound(const CpSolution& X,
                                 std::span<const std::int64_t> theta);

// 64 * (sum of costs + largest finite volume) by default.
double default_tau_max(const PandoraInstance& instance, double multiplier = 64.0);

// CSV rows rep,box,alpha; never-arrived boxes print as inf.
void write_arrivals_csv(std::ostream& out, std::span<const ArrivalDraw> draws);

}  // namespace pandora

#endif  // PANDORA_POISSON_H_
