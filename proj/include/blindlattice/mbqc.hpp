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
#include <string>
#include <vector>

#include "blindlattice/angle8.hpp"
#include "blindlattice/qsim.hpp"

namespace blindlattice::mbqc {

struct BadLattice : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownGate : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadBranch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- brickwork-style lattice ----

struct LatticeVertex {
  int row = 0;  // 1-based
  int col = 0;
  friend bool operator==(const LatticeVertex&, const LatticeVertex&) = default;
};

enum class EdgeRule { Horizontal, VerticalOddRow, VerticalEvenRow };

struct LatticeEdge {
  LatticeVertex a, b;
  EdgeRule rule = EdgeRule::Horizontal;
};

struct LatticeSpec {
  int rows = 0;
  int cols = 0;
  std::vector<LatticeEdge> edges;
};

// Horizontal edges join column-adjacent vertices on every row. Vertical edges
// join row r to r+1 in column pairs {y, y+2}: for odd r the pairs are anchored
// at y = 1 (mod 5), for even r at y = 3 (mod 5); columns beyond the grid are
// dropped.
LatticeSpec build_lattice(int rows, int cols);

// ---- two-wire cluster units ----

enum class GateLabel { I, S, T, Z, X, Y, H, CNOT };
enum class UnitKind { Six, Eight };

GateLabel gate_label_from_name(const std::string& name);
std::string gate_name(GateLabel g);
UnitKind unit_kind(GateLabel g);
int wire_length(UnitKind kind);  // vertices per wire: 3 (Six) or 4 (Eight)

// Vertex index inside a unit: wire * wire_len + col, wire 0 = top.
struct ClusterUnit {
  UnitKind kind = UnitKind::Six;
  int wire_len = 3;
  std::vector<std::pair<int, int>> edges;
};

ClusterUnit make_unit(UnitKind kind);

struct Correction {
  enum class Kind { Hadamard, RzAbsorb };
  Kind kind = Kind::Hadamard;
  int wire = 0;
};

struct Command {
  int vertex = 0;
  Angle8 base{};
  std::vector<int> x_deps;  // vertices whose outcomes XOR into the sign flip
  std::vector<int> z_deps;  // vertices whose outcomes XOR into the pi shift
};

struct MeasurementPattern {
  GateLabel gate = GateLabel::I;
  UnitKind kind = UnitKind::Six;
  int wire_len = 3;
  std::vector<Command> commands;  // in measurement order
  std::array<std::vector<int>, 2> out_x_deps;
  std::array<std::vector<int>, 2> out_z_deps;
  std::vector<Correction> corrections;
};

MeasurementPattern gate_pattern(GateLabel g);

// Measurement angle after dressing: (-1)^sx * base + sz*pi + kappa + r*pi.
Angle8 adaptive_angle(Angle8 base, int sx, int sz, Angle8 kappa, int r);

// Shift that soaks up the Rz(-pi/2) residual a CNOT unit leaves on the
// target-wire output: the next measurement of that wire uses eta - pi/2.
Angle8 absorb_cnot_correction(Angle8 eta);

struct BranchResult {
  qsim::StateVector output;  // 2 qubits: top wire out, bottom wire out
  double prob = 0.0;         // probability of this outcome branch
};

// Runs one forced-outcome branch of a unit on a 2-qubit input, strips the
// outcome-dependent byproducts and applies the pattern corrections, so the
// result should match the plain gate on every branch. A branch that cannot
// occur comes back with prob 0 and a placeholder state.
BranchResult simulate_unit_branch(const MeasurementPattern& pattern,
                                  const qsim::StateVector& input,
                                  const std::vector<int>& outcomes);

struct VerifyReport {
  GateLabel gate = GateLabel::I;
  int branches = 0;
  int states_checked = 0;
  double max_deviation = 0.0;   // worst-case distance from the target, any branch
  double prob_sum_error = 0.0;  // worst |sum of branch probs - 1|
  bool ok = false;
};

VerifyReport verify_unit_implements_gate(GateLabel g, double tol = 1e-9);

}  // namespace blindlattice::mbqc
