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

#include "blindlattice/mbqc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace blindlattice::mbqc {

namespace {
constexpr double kPi = std::numbers::pi;
}

LatticeSpec build_lattice(int rows, int cols) {
  if (rows < 1 || cols < 1) throw BadLattice("lattice needs at least one row and one column");
  LatticeSpec spec;
  spec.rows = rows;
  spec.cols = cols;

  for (int x = 1; x <= rows; ++x) {
    for (int y = 1; y + 1 <= cols; ++y) {
      spec.edges.push_back({{x, y}, {x, y + 1}, EdgeRule::Horizontal});
    }
  }
  for (int x = 1; x + 1 <= rows; ++x) {
    const bool odd = (x % 2) == 1;
    const EdgeRule rule = odd ? EdgeRule::VerticalOddRow : EdgeRule::VerticalEvenRow;
    const int anchor = odd ? 1 : 3;
    for (int y = anchor; y <= cols; y += 5) {
      spec.edges.push_back({{x, y}, {x + 1, y}, rule});
      if (y + 2 <= cols) spec.edges.push_back({{x, y + 2}, {x + 1, y + 2}, rule});
    }
  }
  return spec;
}

GateLabel gate_label_from_name(const std::string& name) {
  if (name == "I") return GateLabel::I;
  if (name == "S") return GateLabel::S;
  if (name == "T") return GateLabel::T;
  if (name == "Z") return GateLabel::Z;
  if (name == "X") return GateLabel::X;
  if (name == "Y") return GateLabel::Y;
  if (name == "H") return GateLabel::H;
  if (name == "CNOT") return GateLabel::CNOT;
  throw UnknownGate("unknown gate name: " + name);
}

std::string gate_name(GateLabel g) {
  switch (g) {
    case GateLabel::I: return "I";
    case GateLabel::S: return "S";
    case GateLabel::T: return "T";
    case GateLabel::Z: return "Z";
    case GateLabel::X: return "X";
    case GateLabel::Y: return "Y";
    case GateLabel::H: return "H";
    case GateLabel::CNOT: return "CNOT";
  }
  throw UnknownGate("bad gate label");
}

UnitKind unit_kind(GateLabel g) {
  return (g == GateLabel::H || g == GateLabel::CNOT) ? UnitKind::Eight : UnitKind::Six;
}

int wire_length(UnitKind kind) { return kind == UnitKind::Six ? 3 : 4; }

ClusterUnit make_unit(UnitKind kind) {
  ClusterUnit u;
  u.kind = kind;
  u.wire_len = wire_length(kind);
  for (int w = 0; w < 2; ++w) {
    for (int c = 0; c + 1 < u.wire_len; ++c) {
      u.edges.emplace_back(w * u.wire_len + c, w * u.wire_len + c + 1);
    }
  }
  // vertical pairs at the first and third unit columns
  u.edges.emplace_back(0, u.wire_len);
  u.edges.emplace_back(2, u.wire_len + 2);
  return u;
}

MeasurementPattern gate_pattern(GateLabel g) {
  MeasurementPattern p;
  p.gate = g;
  p.kind = unit_kind(g);
  p.wire_len = wire_length(p.kind);
  const int L = p.wire_len;

  // Base angles per wire, one per measured column. A wire measured at
  // (a1, a2, ...) implements ... HRz(-a2) HRz(-a1), so entries are the
  // negated rotation arguments of the gate's HRz decomposition.
  std::array<std::vector<int>, 2> ks;
  switch (g) {
    case GateLabel::I: ks = {{{0, 0}, {0, 0}}}; break;
    case GateLabel::S: ks = {{{6, 0}, {0, 0}}}; break;
    case GateLabel::T: ks = {{{7, 0}, {0, 0}}}; break;
    case GateLabel::Z: ks = {{{4, 0}, {0, 0}}}; break;
    case GateLabel::X: ks = {{{0, 4}, {4, 0}}}; break;
    case GateLabel::Y: ks = {{{4, 4}, {4, 0}}}; break;
    case GateLabel::H: ks = {{{0, 0, 0}, {0, 0, 0}}}; break;
    case GateLabel::CNOT:
      ks = {{{0, 0, 2}, {0, 6, 6}}};
      p.corrections.push_back({Correction::Kind::Hadamard, 0});
      p.corrections.push_back({Correction::Kind::RzAbsorb, 1});
      break;
  }
  if (g == GateLabel::H) p.corrections.push_back({Correction::Kind::Hadamard, 1});

  auto vert = [L](int wire, int col) { return wire * L + col; };

  // Measurement order walks columns, top wire first. x deps chain along the
  // wire; z deps pick up the previous x dep plus hops across the verticals
  // at columns 0 and 2.
  for (int col = 0; col + 1 < L; ++col) {
    for (int wire = 0; wire < 2; ++wire) {
      Command c;
      c.vertex = vert(wire, col);
      c.base = Angle8(ks[static_cast<std::size_t>(wire)][static_cast<std::size_t>(col)]);
      if (col >= 1) c.x_deps = {vert(wire, col - 1)};
      if (col == 2) c.z_deps = {vert(wire, 0), vert(1 - wire, 1)};
      p.commands.push_back(std::move(c));
    }
  }

  if (p.kind == UnitKind::Six) {
    // output column carries a vertical, so the opposite wire's x hops in as z
    for (int wire = 0; wire < 2; ++wire) {
      p.out_x_deps[static_cast<std::size_t>(wire)] = {vert(wire, 1)};
      p.out_z_deps[static_cast<std::size_t>(wire)] = {vert(wire, 0), vert(1 - wire, 1)};
    }
  } else {
    for (int wire = 0; wire < 2; ++wire) {
      p.out_x_deps[static_cast<std::size_t>(wire)] = {vert(wire, 2)};
      p.out_z_deps[static_cast<std::size_t>(wire)] = {vert(wire, 1)};
    }
  }
  return p;
}

Angle8 adaptive_angle(Angle8 base, int sx, int sz, Angle8 kappa, int r) {
  const int signed_base = (sx & 1) ? -base.k : base.k;
  return Angle8(signed_base + 4 * (sz & 1) + kappa.k + 4 * (r & 1));
}

Angle8 absorb_cnot_correction(Angle8 eta) { return Angle8(eta.k - 2); }

BranchResult simulate_unit_branch(const MeasurementPattern& pattern,
                                  const qsim::StateVector& input,
                                  const std::vector<int>& outcomes) {
  const int L = pattern.wire_len;
  const int total = 2 * L;
  if (input.num_qubits != 2) throw BadBranch("unit input must be a 2-qubit state");
  if (outcomes.size() != pattern.commands.size()) {
    throw BadBranch("one forced outcome per measured vertex is required");
  }

  // Register in vertex order: top wire then bottom wire. Input state sits on
  // the two column-0 vertices, everything else starts as |+>.
  qsim::StateVector reg;
  reg.num_qubits = total;
  reg.amps.assign(std::size_t{1} << total, {0.0, 0.0});
  const double anc = std::pow(1.0 / std::sqrt(2.0), 2 * (L - 1));
  for (std::size_t idx = 0; idx < reg.amps.size(); ++idx) {
    const int top_bit = static_cast<int>((idx >> (total - 1)) & 1);
    const int bot_bit = static_cast<int>((idx >> (L - 1)) & 1);
    reg.amps[idx] = input.amps[static_cast<std::size_t>(2 * top_bit + bot_bit)] * anc;
  }

  const ClusterUnit unit = make_unit(pattern.kind);
  for (const auto& [a, b] : unit.edges) {
    qsim::apply_gate(reg, {qsim::GateKind::CZ, 0}, {a, b});
  }

  // Destructive measurements shift later register indices down.
  std::vector<int> reg_index(static_cast<std::size_t>(total));
  for (int v = 0; v < total; ++v) reg_index[static_cast<std::size_t>(v)] = v;
  std::vector<int> outcome_of(static_cast<std::size_t>(total), 0);

  double prob = 1.0;
  for (std::size_t i = 0; i < pattern.commands.size(); ++i) {
    const Command& cmd = pattern.commands[i];
    int sx = 0, sz = 0;
    for (int v : cmd.x_deps) sx ^= outcome_of[static_cast<std::size_t>(v)];
    for (int v : cmd.z_deps) sz ^= outcome_of[static_cast<std::size_t>(v)];
    const Angle8 eta = adaptive_angle(cmd.base, sx, sz, Angle8(0), 0);

    qsim::MeasureResult r;
    try {
      r = qsim::measure_planar_forced(reg, reg_index[static_cast<std::size_t>(cmd.vertex)],
                                      eta.radians(), outcomes[i]);
    } catch (const qsim::ZeroProbabilityForcedBranch&) {
      // the branch never occurs; report it with zero weight
      return {qsim::prepare_state({{qsim::PrepKind::Zero, Angle8(0)}, {qsim::PrepKind::Zero, Angle8(0)}}),
              0.0};
    }
    prob *= r.prob;
    outcome_of[static_cast<std::size_t>(cmd.vertex)] = r.outcome;
    for (int v = 0; v < total; ++v) {
      if (reg_index[static_cast<std::size_t>(v)] > reg_index[static_cast<std::size_t>(cmd.vertex)])
        --reg_index[static_cast<std::size_t>(v)];
    }
    reg = std::move(r.post);
  }

  // Two output vertices remain; top wire output is register qubit 0.
  for (int wire = 0; wire < 2; ++wire) {
    int x = 0, z = 0;
    for (int v : pattern.out_x_deps[static_cast<std::size_t>(wire)])
      x ^= outcome_of[static_cast<std::size_t>(v)];
    for (int v : pattern.out_z_deps[static_cast<std::size_t>(wire)])
      z ^= outcome_of[static_cast<std::size_t>(v)];
    if (x) qsim::apply_gate(reg, {qsim::GateKind::X, 0}, {wire});
    if (z) qsim::apply_gate(reg, {qsim::GateKind::Z, 0}, {wire});
  }
  for (const Correction& c : pattern.corrections) {
    if (c.kind == Correction::Kind::Hadamard) {
      qsim::apply_gate(reg, {qsim::GateKind::H, 0}, {c.wire});
    } else {
      // undo the Rz(-pi/2) residual left on this wire
      qsim::apply_gate(reg, {qsim::GateKind::Rz, kPi / 2}, {c.wire});
    }
  }

  return {std::move(reg), prob};
}

namespace {

qsim::StateVector target_output(GateLabel g, const qsim::StateVector& input) {
  qsim::StateVector out = input;
  using qsim::GateKind;
  switch (g) {
    case GateLabel::I: break;
    case GateLabel::S: qsim::apply_gate(out, {GateKind::S, 0}, {0}); break;
    case GateLabel::T: qsim::apply_gate(out, {GateKind::T, 0}, {0}); break;
    case GateLabel::Z: qsim::apply_gate(out, {GateKind::Z, 0}, {0}); break;
    case GateLabel::X: qsim::apply_gate(out, {GateKind::X, 0}, {0}); break;
    case GateLabel::Y: qsim::apply_gate(out, {GateKind::Y, 0}, {0}); break;
    case GateLabel::H: qsim::apply_gate(out, {GateKind::H, 0}, {0}); break;
    case GateLabel::CNOT: qsim::apply_gate(out, {GateKind::CNOT, 0}, {0, 1}); break;
  }
  return out;
}

std::vector<qsim::StateVector> spanning_inputs() {
  using qsim::PrepKind;
  std::vector<qsim::StateVector> inputs;
  for (int b = 0; b < 4; ++b) {
    inputs.push_back(qsim::prepare_state({{(b & 2) ? PrepKind::One : PrepKind::Zero, Angle8(0)},
                                          {(b & 1) ? PrepKind::One : PrepKind::Zero, Angle8(0)}}));
  }
  inputs.push_back(qsim::prepare_state({{PrepKind::Plus, Angle8(1)}, {PrepKind::Plus, Angle8(3)}}));
  // entangled input with four distinct component phases
  qsim::StateVector ent;
  ent.num_qubits = 2;
  ent.amps = {std::polar(0.5, 0.0), std::polar(0.5, kPi / 4), std::polar(0.5, -kPi / 3),
              std::polar(0.5, 2 * kPi / 5)};
  inputs.push_back(std::move(ent));
  return inputs;
}

}  // namespace

VerifyReport verify_unit_implements_gate(GateLabel g, double tol) {
  const MeasurementPattern pattern = gate_pattern(g);
  const int nmeas = static_cast<int>(pattern.commands.size());
  const int nbranches = 1 << nmeas;

  VerifyReport report;
  report.gate = g;
  report.branches = nbranches;

  for (const auto& input : spanning_inputs()) {
    const qsim::StateVector want = target_output(g, input);
    double prob_sum = 0.0;
    for (int branch = 0; branch < nbranches; ++branch) {
      std::vector<int> outcomes(static_cast<std::size_t>(nmeas));
      for (int i = 0; i < nmeas; ++i) outcomes[static_cast<std::size_t>(i)] = (branch >> i) & 1;
      BranchResult r = simulate_unit_branch(pattern, input, outcomes);
      prob_sum += r.prob;
      if (r.prob < 1e-12) continue;
      const double overlap = std::abs(qsim::inner_product(r.output, want));
      report.max_deviation = std::max(report.max_deviation, 1.0 - overlap);
    }
    report.prob_sum_error = std::max(report.prob_sum_error, std::abs(prob_sum - 1.0));
    ++report.states_checked;
  }
  report.ok = report.max_deviation <= tol && report.prob_sum_error <= tol;
  return report;
}

}  // namespace blindlattice::mbqc
