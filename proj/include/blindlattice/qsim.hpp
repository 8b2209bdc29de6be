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

#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "blindlattice/angle8.hpp"

namespace blindlattice::qsim {

using Amplitude = std::complex<double>;

struct EmptyPrepList : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooManyQubits : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DuplicateTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArityMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroProbabilityForcedBranch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxQubits = 24;

// Dense statevector. Qubit 0 is the most significant bit of the amplitude
// index, so for n qubits amplitude index b0 b1 ... b_{n-1} (b0 for qubit 0)
// sits at position sum_q b_q << (n-1-q).
struct StateVector {
  int num_qubits = 0;
  std::vector<Amplitude> amps;

  [[nodiscard]] std::size_t dim() const { return amps.size(); }
};

enum class PrepKind { Zero, One, Plus, Minus };

// Plus/Minus carry an equatorial angle: (|0> + e^{i eta}|1>)/sqrt(2) and
// (|0> - e^{i eta}|1>)/sqrt(2). Zero/One ignore the angle.
struct PrepSpec {
  PrepKind kind = PrepKind::Plus;
  Angle8 angle{};
};

StateVector prepare_state(const std::vector<PrepSpec>& specs);

enum class GateKind { I, X, Y, Z, H, S, T, Rz, Rx, CZ, CNOT };

struct GateSpec {
  GateKind kind = GateKind::I;
  double theta = 0.0;  // used by Rz / Rx only
};

// Applies the gate to the listed target qubits (1 target, or 2 for CZ/CNOT;
// CNOT targets are {control, target}).
void apply_gate(StateVector& state, const GateSpec& gate, const std::vector<int>& targets);

struct MeasureResult {
  int outcome = 0;
  StateVector post;    // renormalized, measured qubit removed
  double prob = 0.0;   // probability of the reported outcome
};

// Destructive measurement in the basis {|+_eta>, |-_eta>}; outcome 0 is the
// |+_eta> projector.
MeasureResult measure_planar(const StateVector& state, int qubit, double eta, std::mt19937_64& rng);
MeasureResult measure_planar_forced(const StateVector& state, int qubit, double eta, int outcome);

// Destructive measurement in the computational basis.
MeasureResult measure_computational(const StateVector& state, int qubit, std::mt19937_64& rng);
MeasureResult measure_computational_forced(const StateVector& state, int qubit, int outcome);

struct DensityMatrix {
  std::size_t dim = 0;
  std::vector<Amplitude> elems;  // row-major dim x dim

  Amplitude& at(std::size_t r, std::size_t c) { return elems[r * dim + c]; }
  [[nodiscard]] const Amplitude& at(std::size_t r, std::size_t c) const { return elems[r * dim + c]; }
};

DensityMatrix pure_density(const StateVector& state);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

Amplitude inner_product(const StateVector& a, const StateVector& b);
double norm(const StateVector& a);
bool equal_up_to_global_phase(const StateVector& a, const StateVector& b, double tol = 1e-10);

StateVector tensor(const StateVector& a, const StateVector& b);

}  // namespace blindlattice::qsim
