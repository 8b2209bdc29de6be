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

#include "blindlattice/serialize.hpp"

#include <iomanip>
#include <sstream>

namespace blindlattice::serialize {

namespace {

const char* prep_kind_name(qsim::PrepKind kind) {
  switch (kind) {
    case qsim::PrepKind::Zero: return "zero";
    case qsim::PrepKind::One: return "one";
    case qsim::PrepKind::Plus: return "plus";
    case qsim::PrepKind::Minus: return "minus";
  }
  return "?";
}

const char* unit_kind_name(mbqc::UnitKind kind) {
  return kind == mbqc::UnitKind::Six ? "six" : "eight";
}

const char* correction_kind_name(mbqc::Correction::Kind kind) {
  return kind == mbqc::Correction::Kind::Hadamard ? "hadamard" : "rz_absorb";
}

const char* branch_name(protocol::Decision::Branch branch) {
  switch (branch) {
    case protocol::Decision::Branch::EvaluateComputation: return "evaluate";
    case protocol::Decision::Branch::TestR1: return "test_r1";
    case protocol::Decision::Branch::TestR2: return "test_r2";
  }
  return "?";
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ordered_json lattice_json(const mbqc::LatticeSpec& lattice) {
  ordered_json j;
  j["m"] = lattice.rows;
  j["n"] = lattice.cols;
  ordered_json edges = ordered_json::array();
  for (const auto& e : lattice.edges)
    edges.push_back({{e.a.row, e.a.col}, {e.b.row, e.b.col}});
  j["edges"] = edges;
  return j;
}

ordered_json pattern_json(const mbqc::MeasurementPattern& pattern) {
  ordered_json j;
  j["kind"] = unit_kind_name(pattern.kind);
  j["gate"] = mbqc::gate_name(pattern.gate);
  ordered_json angles = ordered_json::array();
  for (const auto& cmd : pattern.commands) angles.push_back(cmd.base.k);
  j["angles_k"] = angles;
  ordered_json corrections = ordered_json::array();
  for (const auto& c : pattern.corrections)
    corrections.push_back({{"kind", correction_kind_name(c.kind)}, {"wire", c.wire}});
  j["corrections"] = corrections;
  return j;
}

ordered_json lattice_bundle_json(const mbqc::LatticeSpec& lattice,
                                 const std::vector<mbqc::GateLabel>& circuit) {
  ordered_json j = lattice_json(lattice);
  ordered_json units = ordered_json::array();
  for (mbqc::GateLabel g : circuit) units.push_back(pattern_json(mbqc::gate_pattern(g)));
  j["units"] = units;
  return j;
}

ordered_json prep_spec_json(const qsim::PrepSpec& spec) {
  return ordered_json{{"kind", prep_kind_name(spec.kind)}, {"k", spec.angle.k}};
}

ordered_json config_json(const protocol::Config& config) {
  ordered_json j;
  ordered_json circuit = ordered_json::array();
  for (mbqc::GateLabel g : config.circuit) circuit.push_back(mbqc::gate_name(g));
  j["circuit"] = circuit;
  j["input"] = {prep_spec_json(config.input[0]), prep_spec_json(config.input[1])};
  j["m1"] = config.m1;
  j["q"] = config.q;
  j["expected_bit"] = config.expected_bit;
  return j;
}

ordered_json message_json(const protocol::Message& message) {
  ordered_json j;
  switch (message.kind) {
    case protocol::Message::Kind::QubitBatch: {
      const auto& m = std::get<protocol::QubitBatch>(message.payload);
      j["type"] = "qubit_batch";
      j["round"] = m.round;
      ordered_json qs = ordered_json::array();
      for (const auto& q : m.qubits) qs.push_back({{"id", q.id}, {"prep", prep_spec_json(q.spec)}});
      j["qubits"] = qs;
      break;
    }
    case protocol::Message::Kind::EntangleOrder: {
      const auto& m = std::get<protocol::EntangleOrder>(message.payload);
      j["type"] = "entangle_order";
      j["round"] = m.round;
      j["vertices"] = m.vertices;
      ordered_json edges = ordered_json::array();
      for (const auto& [a, b] : m.edges) edges.push_back({a, b});
      j["edges"] = edges;
      break;
    }
    case protocol::Message::Kind::ReturnBatch: {
      const auto& m = std::get<protocol::ReturnBatch>(message.payload);
      j["type"] = "return_batch";
      j["round"] = m.round;
      j["held"] = m.held;
      break;
    }
    case protocol::Message::Kind::AngleList: {
      const auto& m = std::get<protocol::AngleList>(message.payload);
      j["type"] = "angle_list";
      ordered_json entries = ordered_json::array();
      for (const auto& [id, angle] : m.entries) entries.push_back({id, angle.k});
      j["entries"] = entries;
      break;
    }
    case protocol::Message::Kind::HOrder: {
      const auto& m = std::get<protocol::HOrder>(message.payload);
      j["type"] = "h_order";
      j["round"] = m.round;
      j["positions"] = m.positions;
      break;
    }
    case protocol::Message::Kind::OutcomeList: {
      const auto& m = std::get<protocol::OutcomeList>(message.payload);
      j["type"] = "outcome_list";
      j["bits"] = m.bits;
      break;
    }
  }
  return j;
}

ordered_json decision_json(const protocol::Decision& decision) {
  ordered_json j;
  j["type"] = "decision";
  j["branch"] = branch_name(decision.branch);
  j["accept"] = decision.accept;
  j["decoded_bits"] = decision.decoded_bits;
  j["flip_applied"] = decision.flip_applied;
  return j;
}

std::string transcript_jsonl(const protocol::Transcript& transcript) {
  std::ostringstream out;
  ordered_json meta;
  meta["type"] = "meta";
  meta["seed"] = transcript.seed;
  meta["config"] = config_json(transcript.config);
  out << meta.dump() << '\n';
  for (const auto& m : transcript.messages) out << message_json(m).dump() << '\n';
  out << decision_json(transcript.decision).dump() << '\n';
  return out.str();
}

ordered_json bound_report_json(const analysis::BoundReport& report) {
  ordered_json j;
  j["q"] = report.q;
  j["epsilon"] = report.epsilon;
  j["xi1"] = report.xi1;
  j["xi2"] = report.xi2;
  j["xi3"] = report.xi3;
  j["completeness"] = report.completeness;
  j["q_lower_bound"] = report.q_lower;
  j["feasible_epsilon"] = {report.feasible_lo, report.feasible_hi};
  return j;
}

ordered_json acceptance_json(const analysis::AcceptanceEstimate& estimate) {
  ordered_json j;
  j["trials"] = estimate.trials;
  j["accepts"] = estimate.accepts;
  j["rate"] = estimate.rate;
  j["ci95"] = {estimate.ci_low, estimate.ci_high};
  return j;
}

std::string bounds_sweep_csv(const std::vector<double>& qs, const std::vector<double>& epsilons) {
  const analysis::FeasibleRange range = analysis::epsilon_feasible_range();
  std::ostringstream out;
  out << std::setprecision(12);
  out << "q,epsilon,xi1,xi2,xi3,q_lb,feasible\n";
  for (double q : qs) {
    for (double e : epsilons) {
      const analysis::SoundnessBounds b = analysis::soundness_bounds(q, e);
      out << q << ',' << e << ',' << b.xi1 << ',' << b.xi2 << ',' << b.xi3 << ',';
      try {
        out << analysis::q_lower_bound(e).primary;
      } catch (const analysis::SingularDenominator&) {
        out << "nan";
      }
      const bool feasible = e >= range.lo && e <= range.hi;
      out << ',' << (feasible ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw protocol::BadConfig("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw protocol::BadConfig("config line " + std::to_string(lineno) + ": empty key");
    out[key] = value;
  }
  return out;
}

}  // namespace blindlattice::serialize
