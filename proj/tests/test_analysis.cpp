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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "blindlattice/adversary.hpp"
#include "blindlattice/analysis.hpp"

using namespace blindlattice;
using namespace blindlattice::analysis;

namespace {

qsim::DensityMatrix half_identity() {
  qsim::DensityMatrix rho;
  rho.dim = 2;
  rho.elems = {{0.5, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.5, 0.0}};
  return rho;
}

qsim::DensityMatrix basis_projector(int bit) {
  qsim::DensityMatrix rho;
  rho.dim = 2;
  rho.elems.assign(4, {0.0, 0.0});
  rho.at(static_cast<std::size_t>(bit), static_cast<std::size_t>(bit)) = {1.0, 0.0};
  return rho;
}

double max_entry_gap(const qsim::DensityMatrix& a, const qsim::DensityMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.elems.size(); ++i)
    worst = std::max(worst, std::abs(a.elems[i] - b.elems[i]));
  return worst;
}

protocol::Config basic_config(std::vector<mbqc::GateLabel> circuit, double q) {
  protocol::Config cfg;
  cfg.circuit = std::move(circuit);
  cfg.input = {qsim::PrepSpec{qsim::PrepKind::Zero, Angle8(0)},
               qsim::PrepSpec{qsim::PrepKind::Zero, Angle8(0)}};
  cfg.q = q;
  cfg.expected_bit = 0;
  return cfg;
}

}  // namespace

TEST_CASE("preparation averages collapse to the maximally mixed state") {
  CHECK(max_entry_gap(average_input_density(), half_identity()) < 1e-12);

  // the two computational states alone average the same way
  std::vector<qsim::PrepSpec> basis = {{qsim::PrepKind::Zero, Angle8(0)},
                                       {qsim::PrepKind::One, Angle8(0)}};
  CHECK(max_entry_gap(average_density(basis), half_identity()) < 1e-15);

  // independent 16-term oracle for the planar subset, scalar arithmetic only:
  // |+-_t> contributes [[1, +-e^{-it}], [+-e^{it}, 1]] / 2
  std::vector<qsim::PrepSpec> planar;
  std::complex<double> offdiag{0.0, 0.0};
  for (int k = 0; k < 8; ++k) {
    for (int sign : {+1, -1}) {
      planar.push_back({sign > 0 ? qsim::PrepKind::Plus : qsim::PrepKind::Minus, Angle8(k)});
      offdiag += static_cast<double>(sign) * std::polar(1.0, -k * std::numbers::pi / 4.0) / 2.0;
    }
  }
  CHECK(std::abs(offdiag) < 1e-15);  // the +/- pair at each angle cancels
  CHECK(max_entry_gap(average_density(planar), half_identity()) < 1e-12);

  // pairwise version of the same cancellation
  for (int k = 0; k < 8; ++k) {
    std::vector<qsim::PrepSpec> pair = {{qsim::PrepKind::Plus, Angle8(k)},
                                        {qsim::PrepKind::Minus, Angle8(k)}};
    CHECK(max_entry_gap(average_density(pair), half_identity()) < 1e-14);
  }

  CHECK_THROWS_AS(average_density({}), DomainError);
}

TEST_CASE("completeness bound values and shape") {
  CHECK(completeness_bound(0.0) == doctest::Approx(1.0));
  CHECK(completeness_bound(1.0) == doctest::Approx(2.0 / 3.0));
  double prev = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double q = i / 100.0;
    const double v = completeness_bound(q);
    CHECK(v >= 2.0 / 3.0 - 1e-15);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(completeness_bound(-0.01), DomainError);
  CHECK_THROWS_AS(completeness_bound(1.01), DomainError);
}

TEST_CASE("soundness bound closed forms") {
  CHECK(soundness_bounds(0.0, 0.384).xi1 == doctest::Approx(0.616).epsilon(1e-12));
  for (double e : {0.0, 0.1, 0.384, 1.0}) {
    CHECK(soundness_bounds(1.0, e).xi1 == doctest::Approx(1.0));
    const SoundnessBounds at0 = soundness_bounds(0.0, e);
    CHECK(at0.xi2 == doctest::Approx(1.0 - e / 2.0));
    CHECK(at0.xi3 == doctest::Approx(1.0));
  }

  // xi1 rises with q whenever the erosion is real
  for (double e : {0.05, 0.384, 0.9}) {
    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
      const double v = soundness_bounds(i / 50.0, e).xi1;
      CHECK(v > prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(soundness_bounds(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(soundness_bounds(0.5, 1.1), DomainError);
}

TEST_CASE("q lower bound values, sign, and singularity") {
  CHECK(q_lower_bound(0.0).primary == doctest::Approx(0.0));
  CHECK(q_lower_bound(0.0).companion == doctest::Approx(0.0));
  CHECK(q_lower_bound(1.0 / 9.0).primary == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(g_curve(1.0 / 9.0) == doctest::Approx(-0.5).epsilon(1e-9));

  // at e = 0.2 the primary form goes negative while the companion stays a
  // genuine probability bound
  const QLowerBound b = q_lower_bound(0.2);
  CHECK(b.primary < 0.0);
  CHECK(b.primary == doctest::Approx(0.6 / (1.6 - 6.0 * std::sqrt(0.2))).epsilon(1e-12));
  CHECK(b.companion == doctest::Approx(0.6 / 4.6).epsilon(1e-12));
  CHECK(b.companion > 0.0);

  // the denominator 3u^2 - 6u + 1 in u = sqrt(e) vanishes at u = 1 - sqrt(6)/3
  const double u0 = 1.0 - std::sqrt(6.0) / 3.0;
  CHECK_THROWS_AS(q_lower_bound(u0 * u0), SingularDenominator);
  CHECK_THROWS_AS(q_lower_bound(-0.1), DomainError);
}

TEST_CASE("feasibility curve roots and minimum") {
  const FeasibleRange r = epsilon_feasible_range();
  CHECK(r.lo == doctest::Approx(0.035).epsilon(1e-3));
  CHECK(r.hi == doctest::Approx(0.384).epsilon(1e-3));
  CHECK(r.stationary == doctest::Approx(0.175).epsilon(1e-2));
  CHECK(r.minimum_value == doctest::Approx(-1.1772).epsilon(1e-3));

  CHECK(std::abs(f_curve(r.lo)) <= 1e-5);
  CHECK(std::abs(f_curve(r.hi)) <= 1e-5);
  CHECK(std::abs(f_slope(r.stationary)) <= 1e-6);
  CHECK(f_curve(0.01) > 0.0);
  CHECK(f_curve(0.9) > 0.0);
  CHECK(f_curve(r.stationary) < 0.0);

  // closed-form cross-check: the slope root solves 27u^2 + 3u - 6 = 0 in
  // u = sqrt(x)
  const double u = (-3.0 + std::sqrt(9.0 + 4.0 * 27.0 * 6.0)) / (2.0 * 27.0);
  CHECK(r.stationary == doctest::Approx(u * u).epsilon(1e-7));
}

TEST_CASE("gentle closeness check") {
  const auto mixed = half_identity();
  CHECK(gentle_check(mixed, mixed, 0.01));
  CHECK_FALSE(gentle_check(basis_projector(0), basis_projector(1), 0.04));  // 1 > 0.4
  CHECK(gentle_check(mixed, basis_projector(0), 0.0625));                   // 0.5 <= 0.5

  qsim::DensityMatrix wide;
  wide.dim = 4;
  wide.elems.assign(16, {0.0, 0.0});
  CHECK_THROWS_AS(gentle_check(mixed, wide, 0.1), DimMismatch);
  CHECK_THROWS_AS(gentle_check(mixed, mixed, -0.1), DomainError);
}

TEST_CASE("dominance conditional holds exactly where its premise does") {
  const FeasibleRange r = epsilon_feasible_range();

  // on the feasible strip the premise e >= 2 / (3 (1-q)) never fires, because
  // its right side is at least 2/3 while the strip tops out near 0.384; the
  // primary q bound is negative there, so the q >= bound filter keeps every
  // point. Both facts are part of the recorded sign anomaly.
  int premise_holds = 0;
  for (int iq = 0; iq <= 50; ++iq) {
    const double q = iq / 50.0;
    for (int ie = 0; ie <= 50; ++ie) {
      const double e = r.lo + (r.hi - r.lo) * ie / 50.0;
      CHECK(q >= q_lower_bound(e).primary);
      if (q < 1.0 && e >= 2.0 / (3.0 * (1.0 - q))) ++premise_holds;
    }
  }
  CHECK(premise_holds == 0);

  // widening epsilon past the strip makes the premise satisfiable, and there
  // the implication xi1 <= 1/3 holds with equality structure intact
  int checked = 0;
  for (int iq = 0; iq <= 50; ++iq) {
    const double q = iq / 50.0;
    for (int ie = 0; ie <= 50; ++ie) {
      const double e = ie / 50.0;
      if (q >= 1.0 || e < 2.0 / (3.0 * (1.0 - q))) continue;
      ++checked;
      CHECK(soundness_bounds(q, e).xi1 <= 1.0 / 3.0 + 1e-12);
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("bound report rows are self-consistent") {
  const BoundReport r = make_bound_report(0.5, 0.2);
  const SoundnessBounds b = soundness_bounds(0.5, 0.2);
  CHECK(r.xi1 == doctest::Approx(b.xi1));
  CHECK(r.xi2 == doctest::Approx(b.xi2));
  CHECK(r.xi3 == doctest::Approx(b.xi3));
  CHECK(r.completeness == doctest::Approx(completeness_bound(0.5)));
  CHECK(r.q_lower == doctest::Approx(q_lower_bound(0.2).primary));
  const FeasibleRange fr = epsilon_feasible_range();
  CHECK(r.feasible_lo == doctest::Approx(fr.lo));
  CHECK(r.feasible_hi == doctest::Approx(fr.hi));
}

TEST_CASE("wilson interval endpoints and reference values") {
  auto [lo0, hi0] = wilson_interval(0, 50);
  CHECK(lo0 == doctest::Approx(0.0));
  CHECK(hi0 > 0.0);
  auto [lon, hin] = wilson_interval(50, 50);
  CHECK(hin == doctest::Approx(1.0));
  CHECK(lon < 1.0);

  // textbook value at 50/100
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.40383176).epsilon(1e-6));
  CHECK(hi == doctest::Approx(0.59616824).epsilon(1e-6));
  CHECK_THROWS_AS(wilson_interval(5, 0), DomainError);
  CHECK_THROWS_AS(wilson_interval(7, 5), DomainError);
}

TEST_CASE("chi-square p-values against table points") {
  CHECK(chi_square_p_value(0.0, 5) == doctest::Approx(1.0));
  CHECK(chi_square_p_value(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(chi_square_p_value(14.0671, 7) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_p_value(20.0, 7) < chi_square_p_value(10.0, 7));
  CHECK_THROWS_AS(chi_square_p_value(-1.0, 3), DomainError);
  CHECK_THROWS_AS(chi_square_p_value(1.0, 0), DomainError);

  CHECK(uniform_fit_p_value({100, 100, 100, 100}) == doctest::Approx(1.0));
  CHECK(uniform_fit_p_value({400, 10, 10, 10}) < 1e-10);
  CHECK_THROWS_AS(uniform_fit_p_value({5}), DomainError);
  CHECK_THROWS_AS(uniform_fit_p_value({0, 0}), DomainError);

  CHECK(two_sample_p_value({50, 50, 50}, {70, 70, 70}) == doctest::Approx(1.0));
  CHECK(two_sample_p_value({100, 0}, {0, 100}) < 1e-10);
  CHECK(two_sample_p_value({10, 0, 10}, {12, 0, 8}) > 0.0);  // dead bin dropped
  CHECK_THROWS_AS(two_sample_p_value({1, 2}, {1, 2, 3}), DimMismatch);
  CHECK_THROWS_AS(two_sample_p_value({0, 0}, {1, 2}), DomainError);
}

TEST_CASE("sent angles pool to the uniform grid distribution") {
  auto collect = [](std::vector<mbqc::GateLabel> circuit, std::uint64_t seed0, int runs) {
    std::vector<long long> counts(8, 0);
    auto cfg = basic_config(std::move(circuit), 0.5);
    for (int i = 0; i < runs; ++i) {
      auto s = adversary::honest();
      auto t = protocol::run_protocol(cfg, *s, seed0 + static_cast<std::uint64_t>(i));
      auto c = sent_angle_counts(t);
      for (int k = 0; k < 8; ++k) counts[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(k)];
    }
    return counts;
  };

  auto st = collect({mbqc::GateLabel::S, mbqc::GateLabel::T}, 11000, 600);
  auto xi = collect({mbqc::GateLabel::X, mbqc::GateLabel::I}, 12000, 600);

  long long total_st = 0;
  for (long long c : st) total_st += c;
  CHECK(total_st > 8 * 600);  // every run contributes a full angle sequence

  CHECK(uniform_fit_p_value(st) > 0.001);
  CHECK(uniform_fit_p_value(xi) > 0.001);
  CHECK(two_sample_p_value(st, xi) > 0.001);
}

TEST_CASE("acceptance estimator matches protocol behavior") {
  auto cfg = basic_config({mbqc::GateLabel::I}, 1.0);
  auto honest_factory = [] { return adversary::honest(); };

  const AcceptanceEstimate full = estimate_acceptance(cfg, honest_factory, 400, 900);
  CHECK(full.trials == 400);
  CHECK(full.rate == doctest::Approx(1.0));
  CHECK(full.ci_low >= 2.0 / 3.0);

  auto cfg0 = basic_config({mbqc::GateLabel::I}, 0.0);
  const AcceptanceEstimate tests_only = estimate_acceptance(cfg0, honest_factory, 300, 901);
  CHECK(tests_only.rate == doctest::Approx(1.0));

  const AcceptanceEstimate rejected =
      estimate_acceptance(cfg0, [] { return adversary::flip_outcomes(1.0); }, 300, 902);
  CHECK(rejected.accepts == 0);

  // per-trial seeding makes the tally independent of the worker count
  const AcceptanceEstimate serial =
      estimate_acceptance(cfg, [] { return adversary::fake_graph(); }, 200, 903, 1);
  const AcceptanceEstimate parallel =
      estimate_acceptance(cfg, [] { return adversary::fake_graph(); }, 200, 903, 4);
  CHECK(serial.accepts == parallel.accepts);

  CHECK_THROWS_AS(estimate_acceptance(cfg, honest_factory, 0, 1), DomainError);
  CHECK_THROWS_AS(
      estimate_acceptance(cfg, [] { return adversary::flip_outcomes(2.0); }, 10, 1),
      protocol::BadConfig);
}

TEST_CASE("consistency report demonstrates both discrepancies") {
  const auto findings = consistency_report();
  REQUIRE(findings.size() == 2);

  CHECK(findings[0].id == "xi3_expansion_mismatch");
  CHECK(findings[0].magnitude == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(findings[0].detail.find("1/3") != std::string::npos);

  CHECK(findings[1].id == "q_bound_negative_on_feasible_range");
  CHECK(findings[1].magnitude == doctest::Approx(-0.5).epsilon(1e-9));

  // the sign facts the second finding reports, re-derived here
  const FeasibleRange r = epsilon_feasible_range();
  for (int i = 0; i <= 100; ++i) {
    const double e = r.lo + (r.hi - r.lo) * i / 100.0;
    CHECK(1.0 + 3.0 * e - 6.0 * std::sqrt(e) < 0.0);
    CHECK(1.0 - 6.0 * std::sqrt(e) < 0.0);
    CHECK(q_lower_bound(e).primary < 0.0);
  }
}
