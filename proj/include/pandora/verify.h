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

#ifndef PANDORA_VERIFY_H_
#define PANDORA_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pandora/instance.h"
#include "pandora/policies.h"
#include "pandora/relaxation.h"

namespace pandora {

// Exponent of the Balanced Stopping cost bound for one unit of allocation
// mass starting at t:
//
//   g = 0                                                  theta < max{t, beta}
//   g = (2 beta / theta) min{theta - t, c} / c
//       - int_t^theta 2 min{u - t, c} / (c max{u, beta}) du   otherwise.
//
// g_eval uses the explicit six-branch form, g_eval_quadrature integrates the
// definition numerically. Both require t, c > 0, theta >= 0, beta >= c / 2.
double g_eval(double t, double c, double beta, double theta);
double g_eval_quadrature(double t, double c, double beta, double theta);

// h = 4 int_{min{t, beta}}^{beta} min{u - t, c} / c du.
double h_eval(double t, double c, double beta);
double h_eval_quadrature(double t, double c, double beta);

// F = 4t + 8 beta - 2 int_0^inf e^g dtheta - h. The integral is exact on
// [0, max{t, beta}), adaptive Gauss-Kronrod in the middle and closed form in
// the tail. t or c at or below zero are replaced by 1e-8 (and beta raised to
// c / 2 when c was replaced); *floored reports that.
double F_eval(double t, double c, double beta, bool* floored = nullptr);

struct FScanSpec {
  double t = 1.0;
  double c_min = 1e-3;
  double c_max = 1.0;
  double beta_min = 1e-3;
  double beta_max = 1.0;
  std::size_t steps = 50;
  double tolerance = 1e-6;
};

struct FScanPoint {
  double c = 0.0;
  double beta = 0.0;
  double value = 0.0;
  bool floored = false;
};

struct FScanReport {
  FScanSpec spec;
  std::size_t evaluations = 0;
  double min_value = 0.0;
  double argmin_c = 0.0;
  double argmin_beta = 0.0;
  std::vector<FScanPoint> points;
  std::vector<FScanPoint> violations;  // F < -tolerance
};

// steps values of c evenly spaced in [c_min, c_max]; for each, steps values
// of beta evenly spaced in [max{beta_min, c / 2}, beta_max].
FScanReport scan_F(const FScanSpec& spec);
FScanReport scan_F_serial(const FScanSpec& spec);

struct FrlpViolation {
  int family = 0;  // 1..6 in the order the dual constraints are listed, 7 = sign
  std::size_t index = 0;
  double slack = 0.0;
};

struct FrlpCertificate {
  std::size_t N = 0;
  double P = 0.0;
  double dual_objective = 0.0;  // 4 P
  double max_violation = 0.0;
  double min_slack = 0.0;
  double limit_gap = 0.0;  // |dual_objective - 4 e^4 / (e^4 - 1)|
  bool feasible = false;   // max_violation <= 1e-9
  std::vector<FrlpViolation> violations;  // first few, if any
};

double frlp_limit();

// Dual assignment P = (1/(N(e^4-1))) sum_j e^{4j/N}(4j/N + 1) and Q_i the
// running averages of the same terms, checked against every dual constraint
// of the discretized factor-revealing LP.
FrlpCertificate frlp_dual_certificate(std::size_t N);

// lambda^g_i(tau) = 2 / (c_i max{tau, beta_i}) sum_s dZ_i(s) min{(tau/2 - s)_+, c_i}
// with beta_i = c_i + v_i. Zero-cost boxes get rate 0.
std::vector<double> good_rates(const ScenarioAllocation& alloc, const Grid& grid,
                               std::span<const double> costs,
                               std::span<const double> volumes, double tau);
// (1/c_i) xbar_i(tau/2) for every box.
std::vector<double> total_rates(const CpSolution& X, std::span<const double> costs,
                                double tau);

struct GoodBadStats {
  SampleStats good_only;
  SampleStats good_and_bad;
  SampleStats difference;  // good_only - good_and_bad per coupled replication
  double max_rate_excess = 0.0;  // max over the check grid of sum lambda^g - 2/tau
  std::size_t cap_hits = 0;
  bool ordered = false;  // difference.mean >= -3 difference.std_error
};

// Balanced Stopping bound tau* + beta_{i*} under the good arrival process
// alone and under good plus bad arrivals, with the good first arrivals
// shared between the two. Throws DomainError if the good rates violate
// sum_i lambda^g_i(tau) <= 2 / tau (tolerance 1e-9) or exceed the total
// rates anywhere on the check grid.
GoodBadStats good_bad_experiment(const DiscretizedInstance& d, const CpSolution& X,
                                 const ScenarioAllocation& alloc,
                                 std::size_t scenario, std::size_t replications,
                                 std::uint64_t seed, double tau_max = 0.0);
GoodBadStats good_bad_experiment(const DiscretizedInstance& d, const CpSolution& X,
                                 std::size_t scenario, std::size_t replications,
                                 std::uint64_t seed, double tau_max = 0.0);
// Single-threaded reference.
GoodBadStats good_bad_experiment_serial(const DiscretizedInstance& d, const CpSolution& X,
                                        const ScenarioAllocation& alloc,
                                        std::size_t scenario, std::size_t replications,
                                        std::uint64_t seed, double tau_max = 0.0);

}  // namespace pandora

#endif  // PANDORA_VERIFY_H_
