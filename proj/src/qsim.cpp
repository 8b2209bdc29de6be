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

#include "blindlattice/qsim.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace blindlattice {

Angle8 angle8_from_radians(double theta) {
  const double step = std::numbers::pi / 4.0;
  double kf = theta / step;
  long k = std::lround(kf);
  if (std::abs(kf - static_cast<double>(k)) > 1e-9) {
    throw BadAngle("angle is not a multiple of pi/4");
  }
  return Angle8(static_cast<int>(((k % 8) + 8) % 8));
}

namespace qsim {

namespace {

constexpr double kPi = std::numbers::pi;

using Mat2 = std::array<Amplitude, 4>;  // row-major 2x2

Mat2 gate_matrix(const GateSpec& g) {
  const Amplitude i01(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::I: return {1, 0, 0, 1};
    case GateKind::X: return {0, 1, 1, 0};
    case GateKind::Y: return {0, -i01, i01, 0};
    case GateKind::Z: return {1, 0, 0, -1};
    case GateKind::H: return {s, s, s, -s};
    case GateKind::S: return {1, 0, 0, i01};
    case GateKind::T: return {1, 0, 0, std::polar(1.0, kPi / 4.0)};
    case GateKind::Rz:
      return {std::polar(1.0, -g.theta / 2.0), 0, 0, std::polar(1.0, g.theta / 2.0)};
    case GateKind::Rx: {
      const Amplitude c = std::cos(g.theta / 2.0);
      const Amplitude ms = Amplitude(0.0, -std::sin(g.theta / 2.0));
      return {c, ms, ms, c};
    }
    default:
      throw ArityMismatch("two-qubit gate used where a single-qubit gate was expected");
  }
}

std::size_t bit_of(int num_qubits, int qubit) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

void check_target(const StateVector& state, int qubit) {
  if (qubit < 0 || qubit >= state.num_qubits) {
    throw IndexOutOfRange("qubit index out of range");
  }
}

void apply_single(StateVector& state, const Mat2& m, int qubit) {
  const std::size_t mask = bit_of(state.num_qubits, qubit);
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    if (idx & mask) continue;
    const Amplitude a0 = state.amps[idx];
    const Amplitude a1 = state.amps[idx | mask];
    state.amps[idx] = m[0] * a0 + m[1] * a1;
    state.amps[idx | mask] = m[2] * a0 + m[3] * a1;
  }
}

// Bra components (acting on the |0>/|1> amplitudes of one qubit) for the two
// measurement outcomes; the kets they conjugate must be orthonormal.
struct MeasureBasis {
  Amplitude bra0[2];
  Amplitude bra1[2];
};

// Collapses `qubit` with the given basis and removes it from the register.
MeasureResult project_out(const StateVector& state, int qubit, const MeasureBasis& basis,
                          int outcome, bool forced, std::mt19937_64* rng) {
  check_target(state, qubit);
  const std::size_t mask = bit_of(state.num_qubits, qubit);

  auto branch_prob = [&](const Amplitude* bra) {
    double p = 0.0;
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
      if (idx & mask) continue;
      p += std::norm(bra[0] * state.amps[idx] + bra[1] * state.amps[idx | mask]);
    }
    return p;
  };

  const double p0 = branch_prob(basis.bra0);

  int out = outcome;
  if (!forced) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    out = (u(*rng) < p0) ? 0 : 1;
  }
  const double p = (out == 0) ? p0 : 1.0 - p0;
  if (p < 1e-14) {
    if (forced) throw ZeroProbabilityForcedBranch("forced outcome has zero probability");
  }

  const Amplitude* bra = (out == 0) ? basis.bra0 : basis.bra1;

  MeasureResult r;
  r.outcome = out;
  r.prob = p;
  r.post.num_qubits = state.num_qubits - 1;
  r.post.amps.assign(state.dim() >> 1, Amplitude(0.0, 0.0));

  const double scale = 1.0 / std::sqrt(std::max(p, 1e-300));
  std::size_t w = 0;
  for (std::size_t idx = 0; idx < state.dim(); ++idx) {
    if (idx & mask) continue;
    const Amplitude v = bra[0] * state.amps[idx] + bra[1] * state.amps[idx | mask];
    r.post.amps[w++] = v * scale;
  }
  return r;
}

MeasureBasis planar_basis(double eta) {
  const double s = 1.0 / std::sqrt(2.0);
  const Amplitude e = std::polar(s, -eta);  // conjugate of the ket component
  return MeasureBasis{{Amplitude(s, 0.0), e}, {Amplitude(s, 0.0), -e}};
}

MeasureBasis computational_basis() {
  return MeasureBasis{{Amplitude(1.0, 0.0), Amplitude(0.0, 0.0)},
                      {Amplitude(0.0, 0.0), Amplitude(1.0, 0.0)}};
}

}  // namespace

StateVector prepare_state(const std::vector<PrepSpec>& specs) {
  if (specs.empty()) throw EmptyPrepList("prepare_state needs at least one qubit");
  if (specs.size() > kMaxQubits) throw TooManyQubits("register exceeds the dense-simulation limit");

  StateVector s;
  s.num_qubits = static_cast<int>(specs.size());
  s.amps.assign(std::size_t{1} << specs.size(), Amplitude(0.0, 0.0));
  s.amps[0] = 1.0;

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int q = 0; q < s.num_qubits; ++q) {
    const PrepSpec& ps = specs[static_cast<std::size_t>(q)];
    Mat2 m;
    switch (ps.kind) {
      case PrepKind::Zero: m = {1, 0, 0, 1}; break;
      case PrepKind::One: m = {0, 1, 1, 0}; break;  // acts on |0>, so column 0 matters
      case PrepKind::Plus:
        m = {inv_sqrt2, 0, std::polar(inv_sqrt2, ps.angle.radians()), 0};
        break;
      case PrepKind::Minus:
        m = {inv_sqrt2, 0, -std::polar(inv_sqrt2, ps.angle.radians()), 0};
        break;
    }
    apply_single(s, m, q);
  }
  return s;
}

void apply_gate(StateVector& state, const GateSpec& gate, const std::vector<int>& targets) {
  const bool two_qubit = gate.kind == GateKind::CZ || gate.kind == GateKind::CNOT;
  if (two_qubit) {
    if (targets.size() != 2) throw ArityMismatch("two-qubit gate needs exactly two targets");
    if (targets[0] == targets[1]) throw DuplicateTarget("gate targets must be distinct");
    check_target(state, targets[0]);
    check_target(state, targets[1]);
    const std::size_t m0 = bit_of(state.num_qubits, targets[0]);
    const std::size_t m1 = bit_of(state.num_qubits, targets[1]);
    if (gate.kind == GateKind::CZ) {
      for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        if ((idx & m0) && (idx & m1)) state.amps[idx] = -state.amps[idx];
      }
    } else {
      for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        if ((idx & m0) && !(idx & m1)) std::swap(state.amps[idx], state.amps[idx | m1]);
      }
    }
    return;
  }
  if (targets.size() != 1) throw ArityMismatch("single-qubit gate needs exactly one target");
  check_target(state, targets[0]);
  apply_single(state, gate_matrix(gate), targets[0]);
}

MeasureResult measure_planar(const StateVector& state, int qubit, double eta, std::mt19937_64& rng) {
  return project_out(state, qubit, planar_basis(eta), 0, false, &rng);
}

MeasureResult measure_planar_forced(const StateVector& state, int qubit, double eta, int outcome) {
  return project_out(state, qubit, planar_basis(eta), outcome, true, nullptr);
}

MeasureResult measure_computational(const StateVector& state, int qubit, std::mt19937_64& rng) {
  return project_out(state, qubit, computational_basis(), 0, false, &rng);
}

MeasureResult measure_computational_forced(const StateVector& state, int qubit, int outcome) {
  return project_out(state, qubit, computational_basis(), outcome, true, nullptr);
}

DensityMatrix pure_density(const StateVector& state) {
  DensityMatrix d;
  d.dim = state.dim();
  d.elems.resize(d.dim * d.dim);
  for (std::size_t r = 0; r < d.dim; ++r) {
    for (std::size_t c = 0; c < d.dim; ++c) {
      d.at(r, c) = state.amps[r] * std::conj(state.amps[c]);
    }
  }
  return d;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim != b.dim) throw DimMismatch("density matrices differ in dimension");
  const auto n = static_cast<Eigen::Index>(a.dim);
  Eigen::MatrixXcd diff(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      diff(r, c) = a.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) -
                   b.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }
  // Hermitize to wash out representation noise before the eigensolve.
  Eigen::MatrixXcd herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

Amplitude inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DimMismatch("statevectors differ in dimension");
  Amplitude acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amps[i]) * b.amps[i];
  return acc;
}

double norm(const StateVector& a) {
  double acc = 0.0;
  for (const auto& v : a.amps) acc += std::norm(v);
  return std::sqrt(acc);
}

bool equal_up_to_global_phase(const StateVector& a, const StateVector& b, double tol) {
  if (a.dim() != b.dim()) return false;
  return std::abs(inner_product(a, b)) >= 1.0 - tol;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out;
  out.num_qubits = a.num_qubits + b.num_qubits;
  if (out.num_qubits > kMaxQubits) throw TooManyQubits("tensor product exceeds the qubit limit");
  out.amps.resize(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) {
      out.amps[i * b.dim() + j] = a.amps[i] * b.amps[j];
    }
  }
  return out;
}

}  // namespace qsim
}  // namespace blindlattice
