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

#include "blindlattice/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace blindlattice::analysis {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(what) + " outside [0, 1]");
}

double bisect(double (*fn)(double), double lo, double hi, double tol) {
  double flo = fn(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = fn(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

qsim::DensityMatrix average_density(const std::vector<qsim::PrepSpec>& states) {
  if (states.empty()) throw DomainError("average_density: empty state list");
  qsim::DensityMatrix avg;
  avg.dim = 2;
  avg.elems.assign(4, {0.0, 0.0});
  for (const auto& spec : states) {
    auto rho = qsim::pure_density(qsim::prepare_state({spec}));
    for (std::size_t i = 0; i < 4; ++i) avg.elems[i] += rho.elems[i];
  }
  for (auto& e : avg.elems) e /= static_cast<double>(states.size());
  return avg;
}

qsim::DensityMatrix average_input_density() {
  std::vector<qsim::PrepSpec> pool;
  pool.push_back({qsim::PrepKind::Zero, Angle8(0)});
  pool.push_back({qsim::PrepKind::One, Angle8(0)});
  for (int k = 0; k < 8; ++k) pool.push_back({qsim::PrepKind::Plus, Angle8(k)});
  for (int k = 0; k < 8; ++k) pool.push_back({qsim::PrepKind::Minus, Angle8(k)});
  return average_density(pool);
}

double completeness_bound(double q) {
  require_unit(q, "q");
  return 1.0 - q / 3.0;
}

SoundnessBounds soundness_bounds(double q, double epsilon) {
  require_unit(q, "q");
  require_unit(epsilon, "epsilon");
  SoundnessBounds b;
  b.xi1 = 1.0 - (1.0 - q) * epsilon;
  b.xi2 = 1.0 - epsilon / 2.0 + (epsilon / 2.0 - 2.0 / 3.0) * q;
  b.xi3 = 1.0 - (1.0 / 3.0 - 2.0 * std::sqrt(epsilon)) * q;
  return b;
}

QLowerBound q_lower_bound(double epsilon) {
  if (epsilon < 0.0) throw DomainError("epsilon negative");
  const double den = 1.0 + 3.0 * epsilon - 6.0 * std::sqrt(epsilon);
  if (std::abs(den) < 1e-12) throw SingularDenominator("1 + 3e - 6 sqrt(e) vanishes");
  QLowerBound b;
  b.primary = 3.0 * epsilon / den;
  b.companion = 3.0 * epsilon / (4.0 + 3.0 * epsilon);
  return b;
}

double f_curve(double x) { return 18.0 * x * std::sqrt(x) + 3.0 * x - 12.0 * std::sqrt(x) + 2.0; }

double f_slope(double x) { return 27.0 * std::sqrt(x) + 3.0 - 6.0 / std::sqrt(x); }

double g_curve(double y) { return 3.0 * y / (1.0 + 3.0 * y - 6.0 * std::sqrt(y)); }

FeasibleRange epsilon_feasible_range() {
  FeasibleRange r;
  // the slope is strictly increasing, runs to -inf at 0+ and is 24 at 1, so
  // one crossing splits [0, 1] into a falling and a rising piece of f
  r.stationary = bisect(&f_slope, 1e-12, 1.0, 1e-9);
  r.minimum_value = f_curve(r.stationary);
  r.lo = bisect(&f_curve, 0.0, r.stationary, 1e-7);
  r.hi = bisect(&f_curve, r.stationary, 1.0, 1e-7);
  return r;
}

bool gentle_check(const qsim::DensityMatrix& rho, const qsim::DensityMatrix& sigma,
                  double epsilon) {
  if (rho.dim != sigma.dim) throw DimMismatch("density matrix dimensions differ");
  if (epsilon < 0.0) throw DomainError("epsilon negative");
  return qsim::trace_distance(rho, sigma) <= 2.0 * std::sqrt(epsilon);
}

BoundReport make_bound_report(double q, double epsilon) {
  static const FeasibleRange range = epsilon_feasible_range();
  BoundReport r;
  r.q = q;
  r.epsilon = epsilon;
  const SoundnessBounds b = soundness_bounds(q, epsilon);
  r.xi1 = b.xi1;
  r.xi2 = b.xi2;
  r.xi3 = b.xi3;
  r.completeness = completeness_bound(q);
  r.q_lower = q_lower_bound(epsilon).primary;
  r.feasible_lo = range.lo;
  r.feasible_hi = range.hi;
  return r;
}

AcceptanceEstimate estimate_acceptance(const protocol::Config& config,
                                       const StrategyFactory& make_strategy, int trials,
                                       std::uint64_t seed, int threads) {
  if (trials < 1) throw DomainError("trials must be positive");
  int workers = threads;
  if (workers <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    workers = static_cast<int>(std::clamp(hw, 1u, 8u));
  }
  workers = std::min(workers, trials);

  std::atomic<int> accepts{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&](int first) {
    int local = 0;
    try {
      for (int i = first; i < trials; i += workers) {
        auto strategy = make_strategy();
        protocol::Transcript t =
            protocol::run_protocol(config, *strategy, seed + static_cast<std::uint64_t>(i));
        if (t.decision.accept) ++local;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
    accepts += local;
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  AcceptanceEstimate est;
  est.trials = trials;
  est.accepts = accepts.load();
  est.rate = static_cast<double>(est.accepts) / trials;
  std::tie(est.ci_low, est.ci_high) = wilson_interval(est.accepts, trials);
  return est;
}

std::pair<double, double> wilson_interval(int hits, int n) {
  if (n < 1 || hits < 0 || hits > n) throw DomainError("wilson_interval: bad counts");
  const boost::math::normal_distribution<double> gauss;
  const double z = boost::math::quantile(gauss, 0.975);
  const double nn = n;
  const double phat = hits / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (phat + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

std::array<long long, 8> sent_angle_counts(const protocol::Transcript& transcript) {
  std::array<long long, 8> counts{};
  for (const auto& m : transcript.messages) {
    if (m.kind != protocol::Message::Kind::AngleList) continue;
    for (const auto& [id, angle] : std::get<protocol::AngleList>(m.payload).entries)
      counts[static_cast<std::size_t>(angle.k)]++;
  }
  return counts;
}

double chi_square_p_value(double statistic, int dof) {
  if (dof < 1) throw DomainError("chi_square_p_value: dof < 1");
  if (statistic < 0.0) throw DomainError("chi_square_p_value: negative statistic");
  const boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

double uniform_fit_p_value(const std::vector<long long>& counts) {
  if (counts.size() < 2) throw DomainError("uniform_fit_p_value: need at least two bins");
  long long total = 0;
  for (long long c : counts) total += c;
  if (total <= 0) throw DomainError("uniform_fit_p_value: empty histogram");
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (long long c : counts) {
    const double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  return chi_square_p_value(chi2, static_cast<int>(counts.size()) - 1);
}

double two_sample_p_value(const std::vector<long long>& a, const std::vector<long long>& b) {
  if (a.size() != b.size()) throw DimMismatch("two_sample_p_value: bin counts differ");
  long long na = 0, nb = 0;
  for (long long c : a) na += c;
  for (long long c : b) nb += c;
  if (na <= 0 || nb <= 0) throw DomainError("two_sample_p_value: empty sample");
  double chi2 = 0.0;
  int kept = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long long pooled = a[i] + b[i];
    if (pooled == 0) continue;  // bin unused by both samples
    ++kept;
    const double share = static_cast<double>(pooled) / static_cast<double>(na + nb);
    const double ea = na * share;
    const double eb = nb * share;
    chi2 += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
  }
  if (kept < 2) throw DomainError("two_sample_p_value: fewer than two occupied bins");
  return chi_square_p_value(chi2, kept - 1);
}

std::vector<ConsistencyFinding> consistency_report() {
  std::vector<ConsistencyFinding> findings;
  const FeasibleRange range = epsilon_feasible_range();

  // 1) The quoted expansion of xi1 - xi3 carries the coefficient
  //    (2/3 - 2 sqrt(e)) q, but subtracting the defining closed forms gives
  //    (1/3 - 2 sqrt(e)) q. The gap is exactly q/3; the final bound
  //    3e / (1 + 3e - 6 sqrt(e)) is the one that follows from the
  //    definitions, so only the intermediate line is off.
  double worst = 0.0, worst_q = 0.0, worst_e = 0.0;
  for (int iq = 0; iq <= 50; ++iq) {
    const double q = iq / 50.0;
    for (int ie = 0; ie <= 50; ++ie) {
      const double e = range.lo + (range.hi - range.lo) * ie / 50.0;
      const SoundnessBounds b = soundness_bounds(q, e);
      const double from_definitions = b.xi1 - b.xi3;
      const double quoted = -(1.0 - q) * e + (2.0 / 3.0 - 2.0 * std::sqrt(e)) * q;
      const double gap = std::abs(from_definitions - quoted);
      if (gap > worst) {
        worst = gap;
        worst_q = q;
        worst_e = e;
      }
    }
  }
  {
    std::ostringstream detail;
    detail << "expanding xi1 - xi3 from the defining forms gives the coefficient "
              "(1/3 - 2 sqrt(e)) q, not the quoted (2/3 - 2 sqrt(e)) q; the gap is q/3, "
              "largest at q = "
           << worst_q << ", e = " << worst_e
           << " where it reaches " << worst
           << "; the final bound 3e/(1 + 3e - 6 sqrt(e)) matches the defining forms";
    findings.push_back({"xi3_expansion_mismatch", detail.str(), worst});
  }

  // 2) Across the whole feasible range the denominator 1 + 3e - 6 sqrt(e) is
  //    negative, so the primary q bound is negative (its maximum is
  //    g(1/9) = -1/2) and can never bind a probability. The feasibility
  //    derivation also multiplies through by (1 - 6 sqrt(e)), negative on the
  //    same range, which reverses the inequality it is meant to preserve.
  double max_den = -1e9;
  bool flips_sign = false;
  for (int ie = 0; ie <= 400; ++ie) {
    const double e = range.lo + (range.hi - range.lo) * ie / 400.0;
    const double den = 1.0 + 3.0 * e - 6.0 * std::sqrt(e);
    max_den = std::max(max_den, den);
    if (1.0 - 6.0 * std::sqrt(e) >= 0.0) flips_sign = true;
  }
  {
    const double peak = g_curve(1.0 / 9.0);
    std::ostringstream detail;
    detail << "1 + 3e - 6 sqrt(e) stays below " << max_den << " on ["
           << range.lo << ", " << range.hi
           << "], so the primary q bound is negative everywhere (peak g(1/9) = " << peak
           << ") and is vacuous for q in [0, 1]; the factor (1 - 6 sqrt(e)) is "
           << (flips_sign ? "not always negative" : "negative across the range")
           << ", so multiplying the bound chain by it reverses the inequality";
    findings.push_back({"q_bound_negative_on_feasible_range", detail.str(), peak});
  }

  return findings;
}

}  // namespace blindlattice::analysis
