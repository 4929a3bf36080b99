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

// pandora: solve, simulate, oracle, verify and report from the command line.
// Exit codes: 0 success, 1 usage, 2 input, 3 convergence or failed check.

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pandora/errors.h"
#include "pandora/instance.h"
#include "pandora/io.h"
#include "pandora/oracle.h"
#include "pandora/poisson.h"
#include "pandora/policies.h"
#include "pandora/relaxation.h"
#include "pandora/verify.h"

namespace {

using namespace pandora;

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;

struct ExitError {
  int code;
  std::string message;
};

struct InstanceArgs {
  std::string instance;
  std::string set_cover;
};

struct SolverArgs {
  double eps = 0.05;
  int iters = 400;
  int batch = 16;
  int restarts = 5;
};

struct Common {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
};

void add_instance_options(CLI::App* app, InstanceArgs& a) {
  auto* inst = app->add_option("--instance", a.instance, "instance JSON file");
  auto* sc = app->add_option("--set-cover", a.set_cover, "set cover JSON file");
  inst->excludes(sc);
}

void add_solver_options(CLI::App* app, SolverArgs& s) {
  app->add_option("--eps", s.eps, "grid step as a fraction of the smallest cost")
      ->check(CLI::PositiveNumber);
  app->add_option("--iters", s.iters, "subgradient iterations per restart")
      ->check(CLI::Range(1, 1 << 30));
  app->add_option("--batch", s.batch, "scenario minibatch size")->check(CLI::Range(1, 1 << 30));
  app->add_option("--restarts", s.restarts, "solver restarts")->check(CLI::Range(1, 1 << 20));
}

PandoraInstance load(const InstanceArgs& a) {
  if (!a.set_cover.empty()) return from_mssc(load_set_cover(a.set_cover));
  if (a.instance.empty()) throw ExitError{kExitUsage, "--instance or --set-cover is required"};
  return load_instance(a.instance);
}

SolverOptions solver_options(const SolverArgs& s, std::uint64_t seed) {
  SolverOptions o;
  o.eps = s.eps;
  o.iterations = s.iters;
  o.batch = s.batch;
  o.restarts = s.restarts;
  o.seed = seed;
  return o;
}

void set_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("PANDORA_THREADS")) n = std::atoi(env);
  }
  if (n > 0) omp_set_num_threads(n);
}

// Data goes to --out or stdout; summary lines go to stdout when data went
// to a file and to stderr otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ExitError{kExitInput, "cannot write " + path};
    }
  }
  std::ostream& data() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  std::ostream& summary() { return file_.is_open() ? std::cout : std::cerr; }

 private:
  std::ofstream file_;
};

double ratio(double value, double benchmark) {
  if (benchmark == 0.0) return value == 0.0 ? 1.0 : kInfinite;
  return value / benchmark;
}

int cmd_solve(const InstanceArgs& ia, const SolverArgs& sa, const Common& c) {
  const PandoraInstance inst = load(ia);
  const SolveResult r = solve_cp(inst, solver_options(sa, c.seed));
  Output out(c.out);
  if (!c.out.empty()) write_solution(out.data(), r.solution);
  std::cout << "cp_objective=" << format_double(r.objective) << '\n';
  std::cout << "grid_step=" << format_double(r.discretized.grid.step) << '\n';
  std::cout << "best_restart=" << r.best_restart << '\n';
  if (!r.converged) {
    std::cerr << "solver did not reach a finite objective\n";
    return kExitConvergence;
  }
  return 0;
}

struct SimulateArgs {
  std::string solution;
  std::string policy = "balanced";
  double k = 1.0;
  long long reps = 10000;
  double tau_max_mult = 64.0;
  bool per_scenario = false;
  bool solve = false;
};

int cmd_simulate(const InstanceArgs& ia, const SolverArgs& sa, const SimulateArgs& s,
                 const Common& c) {
  const auto kind = parse_policy(s.policy);
  if (!kind) throw ExitError{kExitUsage, "unknown policy " + s.policy};
  if (s.reps < 1) throw ExitError{kExitUsage, "--reps must be at least 1"};
  if (s.solve && !s.solution.empty()) {
    throw ExitError{kExitUsage, "--solve and --solution are exclusive"};
  }
  const PandoraInstance inst = load(ia);

  DiscretizedInstance d;
  CpSolution sol;
  if (!s.solution.empty()) {
    sol = load_solution(s.solution);
    d = discretize_with_step(inst, sol.grid.step);
    if (sol.num_boxes() != inst.num_boxes() || sol.grid.points != d.grid.points) {
      throw ExitError{kExitInput, "solution does not match the instance grid"};
    }
  } else {
    SolverOptions o = solver_options(sa, c.seed);
    // Delayed Activation runs on the unit grid of a unit-cost instance.
    if (*kind == PolicyKind::kDelayedActivation ||
        *kind == PolicyKind::kDelayedActivationRandom) {
      o.eps = 1.0;
    }
    const SolveResult r = solve_cp(inst, o);
    if (!r.converged) throw ExitError{kExitConvergence, "solver did not converge"};
    d = r.discretized;
    sol = r.solution;
  }

  PolicySpec spec;
  spec.kind = *kind;
  spec.k = s.k;
  spec.tau_max_mult = s.tau_max_mult;
  const PolicyRunner runner(d.rounded, sol, spec);
  const auto reps = static_cast<std::size_t>(s.reps);
  const PolicyStats st = s.per_scenario ? evaluate_per_scenario(runner, reps, c.seed)
                                        : evaluate_policy(runner, reps, c.seed);

  Output out(c.out);
  auto& csv = out.data();
  csv << "scenario,mean,stderr,cp,ratio\n";
  bool degenerate = false;
  for (std::size_t i = 0; i < st.per_scenario.size(); ++i) {
    const auto& ps = st.per_scenario[i].stats;
    const double cp = scenario_cp_objective(sol, scenario_shifts(d, i));
    if (ps.count == 0) {
      csv << i << ",nan,nan," << format_double(cp) << ",nan\n";
      continue;
    }
    degenerate |= cp == 0.0 && ps.mean == 0.0;
    csv << i << ',' << format_double(ps.mean) << ',' << format_double(ps.std_error) << ','
        << format_double(cp) << ',' << format_double(ratio(ps.mean, cp)) << '\n';
  }
  const double cp = cp_objective(sol, d);
  degenerate |= cp == 0.0 && st.mean == 0.0;
  csv << "all," << format_double(st.mean) << ',' << format_double(st.std_error) << ','
      << format_double(cp) << ',' << format_double(ratio(st.mean, cp)) << '\n';

  auto& sum = out.summary();
  sum << "policy=" << policy_name(*kind) << '\n';
  sum << "cp_objective=" << format_double(cp) << '\n';
  sum << "ratio_vs_cp=" << format_double(ratio(st.mean, cp)) << '\n';
  sum << "cap_hits=" << st.cap_hits << '\n';
  if (degenerate) sum << "note=zero benchmark and zero cost reported as ratio 1\n";
  return 0;
}

int cmd_oracle(const InstanceArgs& ia, const Common& c) {
  const PandoraInstance inst = load(ia);
  const OrderingValue best = optimal_partially_adaptive(inst);
  Output out(c.out);
  auto& o = out.data();
  o << "{\"opt\": " << format_double(best.value) << ", \"ordering\": [";
  for (std::size_t i = 0; i < best.ordering.size(); ++i) {
    if (i) o << ", ";
    o << best.ordering[i];
  }
  o << "]}\n";
  return 0;
}

int cmd_fscan(const FScanSpec& spec, const Common& c) {
  const FScanReport rep = scan_F(spec);
  Output out(c.out);
  auto& csv = out.data();
  csv << "c,beta,F\n";
  for (const auto& p : rep.points) {
    csv << format_double(p.c) << ',' << format_double(p.beta) << ',' << format_double(p.value)
        << '\n';
  }
  auto& sum = out.summary();
  sum << "evaluations=" << rep.evaluations << '\n';
  sum << "min=" << format_double(rep.min_value) << " at c=" << format_double(rep.argmin_c)
      << " beta=" << format_double(rep.argmin_beta) << '\n';
  sum << "violations=" << rep.violations.size() << '\n';
  return rep.violations.empty() ? 0 : kExitConvergence;
}

int cmd_frlp(long long n) {
  if (n < 2) throw ExitError{kExitUsage, "--N must be at least 2"};
  const FrlpCertificate cert = frlp_dual_certificate(static_cast<std::size_t>(n));
  std::cout << "N=" << cert.N << '\n';
  std::cout << "dual_objective=" << format_double(cert.dual_objective) << '\n';
  std::cout << "limit=" << format_double(frlp_limit()) << '\n';
  std::cout << "limit_gap=" << format_double(cert.limit_gap) << '\n';
  std::cout << "max_violation=" << format_double(cert.max_violation) << '\n';
  std::cout << "min_slack=" << format_double(cert.min_slack) << '\n';
  for (const auto& v : cert.violations) {
    std::cout << "violated family=" << v.family << " index=" << v.index
              << " slack=" << format_double(v.slack) << '\n';
  }
  std::cout << "feasible=" << (cert.feasible ? "yes" : "no") << '\n';
  return cert.feasible ? 0 : kExitConvergence;
}

int cmd_good_bad(const InstanceArgs& ia, const SolverArgs& sa, long long scenario,
                 long long reps, const Common& c) {
  if (reps < 1) throw ExitError{kExitUsage, "--reps must be at least 1"};
  const PandoraInstance inst = load(ia);
  const SolveResult r = solve_cp(inst, solver_options(sa, c.seed));
  if (!r.converged) throw ExitError{kExitConvergence, "solver did not converge"};
  if (scenario < 0 || static_cast<std::size_t>(scenario) >= inst.num_scenarios()) {
    throw ExitError{kExitUsage, "--scenario out of range"};
  }
  const GoodBadStats st =
      good_bad_experiment(r.discretized, r.solution, static_cast<std::size_t>(scenario),
                          static_cast<std::size_t>(reps), c.seed);
  std::cout << "good_only_mean=" << format_double(st.good_only.mean)
            << " stderr=" << format_double(st.good_only.std_error) << '\n';
  std::cout << "good_and_bad_mean=" << format_double(st.good_and_bad.mean)
            << " stderr=" << format_double(st.good_and_bad.std_error) << '\n';
  std::cout << "difference_mean=" << format_double(st.difference.mean)
            << " stderr=" << format_double(st.difference.std_error) << '\n';
  std::cout << "max_rate_excess=" << format_double(st.max_rate_excess) << '\n';
  std::cout << "ordered=" << (st.ordered ? "yes" : "no") << '\n';
  return st.ordered ? 0 : kExitConvergence;
}

// Monte Carlo checks of the no-arrival probability and of the expected
// opening time spent by Poisson time tau.
int cmd_lemmas(const InstanceArgs& ia, const SolverArgs& sa, long long reps,
               const Common& c) {
  if (reps < 1) throw ExitError{kExitUsage, "--reps must be at least 1"};
  const PandoraInstance inst = load(ia);
  const SolveResult r = solve_cp(inst, solver_options(sa, c.seed));
  if (!r.converged) throw ExitError{kExitConvergence, "solver did not converge"};
  const auto& d = r.discretized;
  const RateModel model = make_rate_model(r.solution, d.rounded.costs);
  const double horizon = std::max(d.grid.horizon, d.grid.step);
  const double tau_max = default_tau_max(d.rounded);
  const auto n = static_cast<std::size_t>(reps);
  std::vector<ArrivalDraw> draws(n);
  for (std::size_t k = 0; k < n; ++k) draws[k] = sample_arrivals(model, c.seed, k, tau_max);

  bool ok = true;
  const std::vector<double> taus = {1.0, horizon / 2.0, horizon};
  for (double tau : taus) {
    std::vector<double> theta(d.rounded.num_boxes(), tau);
    const double p = no_arrival_prob(model, theta);
    std::vector<double> hits(n, 0.0);
    std::vector<double> spent(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      bool none = true;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        if (model.free_box[i]) continue;
        if (draws[k].alpha[i] <= theta[i]) none = false;
        if (draws[k].alpha[i] < tau) spent[k] += d.rounded.costs[i];
      }
      hits[k] = none ? 1.0 : 0.0;
    }
    const SampleStats h = summarize(hits);
    const SampleStats s = summarize(spent);
    const double sigma = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
    const bool prob_ok = std::abs(h.mean - p) <= 3.0 * sigma + 1e-12;
    const bool budget_ok = s.mean <= tau + 3.0 * s.std_error;
    ok = ok && prob_ok && budget_ok;
    std::cout << "tau=" << format_double(tau) << " no_arrival_formula=" << format_double(p)
              << " monte_carlo=" << format_double(h.mean) << (prob_ok ? " ok" : " FAIL")
              << " opening_time=" << format_double(s.mean) << " stderr="
              << format_double(s.std_error) << (budget_ok ? " ok" : " FAIL") << '\n';
  }
  return ok ? 0 : kExitConvergence;
}

struct ReportRow {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  double cp = 0.0;
};

ReportRow read_stats(const std::string& spec) {
  ReportRow row;
  std::string path = spec;
  const auto eq = spec.find('=');
  if (eq != std::string::npos) {
    row.name = spec.substr(0, eq);
    path = spec.substr(eq + 1);
  } else {
    const auto slash = spec.find_last_of('/');
    row.name = spec.substr(slash == std::string::npos ? 0 : slash + 1);
    const auto dot = row.name.find_last_of('.');
    if (dot != std::string::npos) row.name = row.name.substr(0, dot);
  }
  std::ifstream in(path);
  if (!in) throw ExitError{kExitInput, "cannot open " + path};
  std::string line;
  if (!std::getline(in, line) || line != "scenario,mean,stderr,cp,ratio") {
    throw ExitError{kExitInput, "not a stats file: " + path};
  }
  bool found = false;
  while (std::getline(in, line)) {
    if (line.rfind("all,", 0) != 0) continue;
    std::stringstream ss(line.substr(4));
    std::string mean, se, cp;
    std::getline(ss, mean, ',');
    std::getline(ss, se, ',');
    std::getline(ss, cp, ',');
    try {
      row.mean = std::stod(mean);
      row.std_error = std::stod(se);
      row.cp = std::stod(cp);
    } catch (const std::exception&) {
      throw ExitError{kExitInput, "malformed stats row in " + path};
    }
    found = true;
  }
  if (!found) throw ExitError{kExitInput, "no aggregate row in " + path};
  return row;
}

int cmd_report(const std::vector<std::string>& stats, const std::string& oracle_path,
               const Common& c) {
  if (stats.empty()) throw ExitError{kExitUsage, "--stats is required"};
  std::optional<double> opt;
  if (!oracle_path.empty()) {
    std::ifstream in(oracle_path);
    if (!in) throw ExitError{kExitInput, "cannot open " + oracle_path};
    try {
      opt = nlohmann::json::parse(in).at("opt").get<double>();
    } catch (const nlohmann::json::exception&) {
      throw ExitError{kExitInput, "malformed oracle file " + oracle_path};
    }
  }
  std::vector<ReportRow> rows;
  for (const auto& s : stats) rows.push_back(read_stats(s));
  Output out(c.out);
  auto& md = out.data();
  md << "| policy | mean | stderr | CP | OPT | mean/CP | mean/OPT |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    md << "| " << r.name << " | " << format_double(r.mean) << " | " << format_double(r.std_error)
       << " | " << format_double(r.cp) << " | " << (opt ? format_double(*opt) : "n/a") << " | "
       << format_double(ratio(r.mean, r.cp)) << " | "
       << (opt ? format_double(ratio(r.mean, *opt)) : "n/a") << " |\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated Pandora's problem: relaxation, rounding, stopping rules"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "worker threads (PANDORA_THREADS)")
      ->check(CLI::NonNegativeNumber);

  InstanceArgs ia;
  SolverArgs sa;

  auto* solve = app.add_subcommand("solve", "solve the convex relaxation");
  add_instance_options(solve, ia);
  add_solver_options(solve, sa);
  solve->add_option("--seed", common.seed, "random seed");
  solve->add_option("--out", common.out, "solution JSON output");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation of a policy");
  add_instance_options(simulate, ia);
  add_solver_options(simulate, sa);
  simulate->add_option("--solution", sim.solution, "solution JSON (solved inline if absent)");
  simulate->add_flag("--solve", sim.solve, "solve the relaxation inline");
  simulate->add_option("--policy", sim.policy, "clairvoyant|balanced|da|da-random|greedy-mssc");
  simulate->add_option("--k", sim.k, "volume multiplier k");
  simulate->add_option("--reps", sim.reps, "replications");
  simulate->add_option("--seed", common.seed, "random seed");
  simulate->add_option("--tau-max-mult", sim.tau_max_mult, "Poisson horizon cap multiplier");
  simulate->add_flag("--per-scenario", sim.per_scenario,
                     "run every replication against every scenario");
  simulate->add_option("--out", common.out, "CSV output");

  auto* oracle = app.add_subcommand("oracle", "brute-force optimal partially adaptive policy");
  add_instance_options(oracle, ia);
  oracle->add_option("--out", common.out, "JSON output");

  auto* verify = app.add_subcommand("verify", "numerical certificates");
  verify->require_subcommand(1);
  FScanSpec fspec;
  auto* fscan = verify->add_subcommand("f-scan", "scan F(t, c, beta) over a grid");
  fscan->add_option("--t", fspec.t, "t")->check(CLI::PositiveNumber);
  fscan->add_option("--c-min", fspec.c_min, "smallest c");
  fscan->add_option("--c-max", fspec.c_max, "largest c");
  fscan->add_option("--beta-min", fspec.beta_min, "smallest beta");
  fscan->add_option("--beta-max", fspec.beta_max, "largest beta");
  fscan->add_option("--steps", fspec.steps, "grid steps per axis")->check(CLI::Range(2, 100000));
  fscan->add_option("--out", common.out, "CSV output");
  long long frlp_n = 1000000;
  auto* frlp = verify->add_subcommand("frlp", "dual certificate of the factor-revealing LP");
  frlp->add_option("--N", frlp_n, "discretization count");
  long long gb_scenario = 0;
  long long gb_reps = 100000;
  auto* goodbad = verify->add_subcommand("good-bad", "good versus good+bad arrivals");
  add_instance_options(goodbad, ia);
  add_solver_options(goodbad, sa);
  goodbad->add_option("--scenario", gb_scenario, "scenario index");
  goodbad->add_option("--reps", gb_reps, "replications");
  goodbad->add_option("--seed", common.seed, "random seed");
  long long lemma_reps = 100000;
  auto* lemmas = verify->add_subcommand("lemmas", "Poisson rounding Monte Carlo checks");
  add_instance_options(lemmas, ia);
  add_solver_options(lemmas, sa);
  lemmas->add_option("--reps", lemma_reps, "replications");
  lemmas->add_option("--seed", common.seed, "random seed");

  std::vector<std::string> stats;
  std::string oracle_path;
  auto* report = app.add_subcommand("report", "markdown table of simulation results");
  report->add_option("--stats", stats, "name=stats.csv from simulate (repeatable)");
  report->add_option("--oracle", oracle_path, "oracle JSON");
  report->add_option("--out", common.out, "markdown output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    set_threads(common.threads);
    if (*solve) return cmd_solve(ia, sa, common);
    if (*simulate) return cmd_simulate(ia, sa, sim, common);
    if (*oracle) return cmd_oracle(ia, common);
    if (*fscan) return cmd_fscan(fspec, common);
    if (*frlp) return cmd_frlp(frlp_n);
    if (*goodbad) return cmd_good_bad(ia, sa, gb_scenario, gb_reps, common);
    if (*lemmas) return cmd_lemmas(ia, sa, lemma_reps, common);
    if (*report) return cmd_report(stats, oracle_path, common);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const InvalidInstance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const NoThreshold& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  }
  return kExitUsage;
}
