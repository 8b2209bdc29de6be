// Copyright 2026 The blindlattice authors
//
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

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "blindlattice/protocol.hpp"
#include "blindlattice/qsim.hpp"

// Closed-form acceptance bounds for the trap-tested protocol, the mixing
// identity behind its blindness, and Monte Carlo estimators that tie the two
// to actual runs. The bound formulas are kept verbatim, including two spots
// where they disagree with themselves; consistency_report demonstrates those
// numerically instead of silently correcting them.

namespace blindlattice::analysis {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Average projector of the listed preparations.
qsim::DensityMatrix average_density(const std::vector<qsim::PrepSpec>& states);

// Average over the 18-state preparation set: |0>, |1>, |+_k>, |-_k> for the
// eight grid angles. Equals I/2, which is the whole blindness story: a qubit
// drawn this way carries no information about which one it is.
qsim::DensityMatrix average_input_density();

// Acceptance probability of an honest server: 1 - q/3, at least 2/3.
double completeness_bound(double q);

// Acceptance ceilings for a deviating server whose test-branch pass
// probability is eroded by epsilon.
struct SoundnessBounds {
  double xi1 = 0.0;  // 1 - (1-q) e
  double xi2 = 0.0;  // 1 - e/2 + (e/2 - 2/3) q
  double xi3 = 0.0;  // 1 - (1/3 - 2 sqrt(e)) q
};
SoundnessBounds soundness_bounds(double q, double epsilon);

// Lower bounds on the evaluate-branch weight needed to keep xi1 dominant:
// primary = 3e / (1 + 3e - 6 sqrt(e)) from xi1 >= xi3,
// companion = 3e / (4 + 3e) from xi1 >= xi2.
struct QLowerBound {
  double primary = 0.0;
  double companion = 0.0;
};
QLowerBound q_lower_bound(double epsilon);

// The feasibility curve f and its slope, plus the q-bound curve g.
double f_curve(double x);   // 18 x sqrt(x) + 3 x - 12 sqrt(x) + 2
double f_slope(double x);   // 27 sqrt(x) + 3 - 6 / sqrt(x)
double g_curve(double y);   // 3 y / (1 + 3 y - 6 sqrt(y))

// Interval where f <= 0, found by sign-bracketed bisection to 1e-6, split at
// the unique slope root.
struct FeasibleRange {
  double lo = 0.0;
  double hi = 0.0;
  double stationary = 0.0;     // where f_slope crosses zero
  double minimum_value = 0.0;  // f at the stationary point
};
FeasibleRange epsilon_feasible_range();

// True iff trace_distance(rho, sigma) <= 2 sqrt(epsilon): passing the tests
// with probability 1 - epsilon pins the held state this close to the ideal.
bool gentle_check(const qsim::DensityMatrix& rho, const qsim::DensityMatrix& sigma,
                  double epsilon);

// One row of the bound table, ready for serialization.
struct BoundReport {
  double q = 0.0;
  double epsilon = 0.0;
  double xi1 = 0.0, xi2 = 0.0, xi3 = 0.0;
  double completeness = 0.0;
  double q_lower = 0.0;  // primary form; may be negative (see consistency_report)
  double feasible_lo = 0.0, feasible_hi = 0.0;
};
BoundReport make_bound_report(double q, double epsilon);

// ---- Monte Carlo ----

using StrategyFactory = std::function<std::unique_ptr<protocol::ServerStrategy>()>;

struct AcceptanceEstimate {
  int trials = 0;
  int accepts = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // Wilson 95%
  double ci_high = 0.0;
};

// Runs the protocol `trials` times with per-trial seeds seed+i, a fresh
// strategy instance per trial. threads = 0 picks a sensible worker count;
// results do not depend on the thread count.
AcceptanceEstimate estimate_acceptance(const protocol::Config& config,
                                       const StrategyFactory& make_strategy, int trials,
                                       std::uint64_t seed, int threads = 0);

// Wilson 95% score interval for `hits` successes out of `n`.
std::pair<double, double> wilson_interval(int hits, int n);

// ---- histogram tests ----

// Counts of each grid angle across every angle message of the transcript.
std::array<long long, 8> sent_angle_counts(const protocol::Transcript& transcript);

double chi_square_p_value(double statistic, int dof);
// Goodness of fit against the uniform distribution over the bins.
double uniform_fit_p_value(const std::vector<long long>& counts);
// Homogeneity of two histograms over the same bins (pooled-expectation
// chi-square); bins empty in both samples are dropped.
double two_sample_p_value(const std::vector<long long>& a, const std::vector<long long>& b);

// ---- internal consistency of the bound set ----

struct ConsistencyFinding {
  std::string id;
  std::string detail;
  double magnitude = 0.0;
};

// Numerically demonstrates the two places the bound set disagrees with
// itself: the quoted expansion of xi1 - xi3 does not match the defining
// closed forms, and the primary q lower bound is negative across the entire
// feasible epsilon range, so it never binds for q in [0, 1].
std::vector<ConsistencyFinding> consistency_report();

}  // namespace blindlattice::analysis
