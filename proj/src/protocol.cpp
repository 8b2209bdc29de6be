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

#include "blindlattice/protocol.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

namespace blindlattice::protocol {

namespace {

int draw_bit(std::mt19937_64& rng) { return static_cast<int>(rng() & 1u); }

// 2^64 is divisible by 8, so the modulus is exactly uniform.
int draw_k8(std::mt19937_64& rng) { return static_cast<int>(rng() % 8u); }

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

int measured_columns(const UnitPlan& unit) {
  return unit.readout ? unit.wire_len : unit.wire_len - 1;
}

// Column 0 carries its own vertical CZ only when nothing upstream supplied
// one: the first unit, or a predecessor whose verticals stop before its
// output column (Eight units).
bool has_col0_vertical(const CircuitPlan& plan, int u) {
  if (plan.units[u].fresh_inputs) return true;
  return plan.units[u - 1].kind == mbqc::UnitKind::Eight;
}

std::vector<QubitId> unit_vertices(const UnitPlan& unit) {
  std::vector<QubitId> out;
  for (const auto& w : unit.wire) out.insert(out.end(), w.begin(), w.end());
  return out;
}

int trap_pairs_for_round(const Config& config, const UnitPlan& unit) {
  int fresh_cols = unit.fresh_inputs ? unit.wire_len : unit.wire_len - 1;
  return config.m1 * fresh_cols;
}

QubitBatch prepare_round_batch(const ClientSecret& secret, int round, std::mt19937_64& rng) {
  const UnitPlan& unit = secret.plan.units[static_cast<std::size_t>(round)];
  QubitBatch batch;
  batch.round = round;
  for (const auto& w : unit.wire)
    for (std::size_t c = 1; c < w.size(); ++c)
      batch.qubits.push_back({w[c], secret.prep.at(w[c])});
  for (const auto& trap : secret.r1)
    if (trap.round == round) batch.qubits.push_back({trap.id, secret.prep.at(trap.id)});
  std::shuffle(batch.qubits.begin(), batch.qubits.end(), rng);
  return batch;
}

bool spec_equal(const qsim::PrepSpec& a, const qsim::PrepSpec& b) {
  return a.kind == b.kind && a.angle == b.angle;
}

bool message_equal(const Message& a, const Message& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Message::Kind::QubitBatch: {
      const auto& x = std::get<QubitBatch>(a.payload);
      const auto& y = std::get<QubitBatch>(b.payload);
      if (x.round != y.round || x.qubits.size() != y.qubits.size()) return false;
      for (std::size_t i = 0; i < x.qubits.size(); ++i)
        if (x.qubits[i].id != y.qubits[i].id || !spec_equal(x.qubits[i].spec, y.qubits[i].spec))
          return false;
      return true;
    }
    case Message::Kind::EntangleOrder: {
      const auto& x = std::get<EntangleOrder>(a.payload);
      const auto& y = std::get<EntangleOrder>(b.payload);
      return x.round == y.round && x.vertices == y.vertices && x.edges == y.edges;
    }
    case Message::Kind::ReturnBatch: {
      const auto& x = std::get<ReturnBatch>(a.payload);
      const auto& y = std::get<ReturnBatch>(b.payload);
      return x.round == y.round && x.held == y.held;
    }
    case Message::Kind::AngleList: {
      const auto& x = std::get<AngleList>(a.payload);
      const auto& y = std::get<AngleList>(b.payload);
      if (x.entries.size() != y.entries.size()) return false;
      for (std::size_t i = 0; i < x.entries.size(); ++i)
        if (x.entries[i].first != y.entries[i].first || !(x.entries[i].second == y.entries[i].second))
          return false;
      return true;
    }
    case Message::Kind::HOrder: {
      const auto& x = std::get<HOrder>(a.payload);
      const auto& y = std::get<HOrder>(b.payload);
      return x.round == y.round && x.positions == y.positions;
    }
    case Message::Kind::OutcomeList: {
      const auto& x = std::get<OutcomeList>(a.payload);
      const auto& y = std::get<OutcomeList>(b.payload);
      return x.bits == y.bits;
    }
  }
  return false;
}

}  // namespace

std::size_t TrapPolicy::draw_position(std::mt19937_64& rng, std::size_t sequence_len) {
  std::uniform_int_distribution<std::size_t> d(0, sequence_len);
  return d(rng);
}

void Config::validate() const {
  if (circuit.empty()) throw BadConfig("circuit must contain at least one gate");
  if (m1 < 1 || 2 * m1 > rows) throw BadConfig("m1 must satisfy 1 <= 2*m1 <= rows");
  if (!(q >= 0.0 && q <= 1.0)) throw BadConfig("q must lie in [0, 1]");
  if (expected_bit < -1 || expected_bit > 1) throw BadConfig("expected_bit must be -1, 0 or 1");
}

CircuitPlan compile_circuit(const std::vector<mbqc::GateLabel>& circuit, bool with_readout) {
  if (circuit.empty()) throw BadConfig("circuit must contain at least one gate");
  CircuitPlan plan;
  std::vector<mbqc::GateLabel> gates = circuit;
  if (with_readout) gates.push_back(mbqc::GateLabel::H);  // structural slot for the readout unit
  for (std::size_t i = 0; i < gates.size(); ++i) {
    UnitPlan unit;
    unit.gate = gates[i];
    unit.kind = mbqc::unit_kind(gates[i]);
    unit.wire_len = mbqc::wire_length(unit.kind);
    unit.round = static_cast<int>(i);
    unit.fresh_inputs = (i == 0);
    unit.readout = with_readout && i + 1 == gates.size();
    if (unit.readout) {
      unit.kind = mbqc::UnitKind::Eight;
      unit.wire_len = mbqc::wire_length(unit.kind);
    }
    for (int w = 0; w < 2; ++w) {
      if (unit.fresh_inputs) {
        unit.wire[w].push_back(plan.next_id++);
      } else {
        unit.wire[w].push_back(plan.units.back().wire[w].back());
      }
      for (int c = 1; c < unit.wire_len; ++c) unit.wire[w].push_back(plan.next_id++);
    }
    for (int w = 0; w < 2; ++w)
      for (int c = 0; c + 1 < unit.wire_len; ++c)
        unit.edges.emplace_back(unit.wire[w][c], unit.wire[w][c + 1]);
    plan.units.push_back(unit);
    if (has_col0_vertical(plan, static_cast<int>(i)))
      plan.units.back().edges.emplace_back(unit.wire[0][0], unit.wire[1][0]);
    plan.units.back().edges.emplace_back(unit.wire[0][2], unit.wire[1][2]);
    plan.total_columns += unit.fresh_inputs ? unit.wire_len : unit.wire_len - 1;
  }
  return plan;
}

// ---- server quantum memory ----

BatchState::Slot& BatchState::slot_of(QubitId id) {
  for (auto& s : slots_)
    if (s.id == id) return s;
  throw ProtocolViolation("unknown qubit id " + std::to_string(id));
}

const BatchState::Slot& BatchState::slot_of(QubitId id) const {
  for (const auto& s : slots_)
    if (s.id == id) return s;
  throw ProtocolViolation("unknown qubit id " + std::to_string(id));
}

void BatchState::add_qubit(QubitId id, const qsim::PrepSpec& spec) {
  for (const auto& s : slots_)
    if (s.id == id) throw ProtocolViolation("duplicate qubit id " + std::to_string(id));
  Slot slot;
  slot.id = id;
  slot.solo = qsim::prepare_state({spec});
  slots_.push_back(std::move(slot));
}

void BatchState::replace_qubit(QubitId id, const qsim::PrepSpec& spec) {
  Slot& slot = slot_of(id);
  if (slot.measured) throw ProtocolViolation("cannot replace a measured qubit");
  if (slot.in_register) throw ProtocolViolation("cannot replace an entangled qubit");
  slot.solo = qsim::prepare_state({spec});
}

void BatchState::promote(QubitId id) {
  Slot& slot = slot_of(id);
  if (slot.in_register) return;
  if (slot.measured) throw ProtocolViolation("cannot entangle a measured qubit");
  if (reg_members_.empty()) {
    register_ = slot.solo;
  } else {
    register_ = qsim::tensor(register_, slot.solo);
  }
  reg_members_.push_back(id);
  slot.in_register = true;
  slot.solo = qsim::StateVector{};
}

void BatchState::apply_cz(QubitId a, QubitId b) {
  if (a == b) throw ProtocolViolation("CZ needs two distinct qubits");
  promote(a);
  promote(b);
  auto index_of = [&](QubitId id) {
    auto it = std::find(reg_members_.begin(), reg_members_.end(), id);
    return static_cast<int>(it - reg_members_.begin());
  };
  qsim::apply_gate(register_, {qsim::GateKind::CZ, 0.0}, {index_of(a), index_of(b)});
}

void BatchState::apply_h(QubitId id) {
  Slot& slot = slot_of(id);
  if (slot.measured) throw ProtocolViolation("cannot apply H to a measured qubit");
  if (slot.in_register) {
    auto it = std::find(reg_members_.begin(), reg_members_.end(), id);
    qsim::apply_gate(register_, {qsim::GateKind::H, 0.0},
                     {static_cast<int>(it - reg_members_.begin())});
  } else {
    qsim::apply_gate(slot.solo, {qsim::GateKind::H, 0.0}, {0});
  }
}

int BatchState::measure(QubitId id, double eta, std::mt19937_64& rng) {
  Slot& slot = slot_of(id);
  if (slot.measured) throw ProtocolViolation("qubit already measured");
  if (slot.in_register) {
    auto it = std::find(reg_members_.begin(), reg_members_.end(), id);
    int idx = static_cast<int>(it - reg_members_.begin());
    auto res = qsim::measure_planar(register_, idx, eta, rng);
    register_ = std::move(res.post);
    reg_members_.erase(it);
    slot.measured = true;
    return res.outcome;
  }
  auto res = qsim::measure_planar(slot.solo, 0, eta, rng);
  slot.solo = std::move(res.post);
  slot.measured = true;
  return res.outcome;
}

bool BatchState::holds(QubitId id) const {
  for (const auto& s : slots_)
    if (s.id == id) return true;
  return false;
}

bool BatchState::is_measured(QubitId id) const { return slot_of(id).measured; }

std::vector<QubitId> BatchState::held_unmeasured() const {
  std::vector<QubitId> out;
  for (const auto& s : slots_)
    if (!s.measured) out.push_back(s.id);
  return out;
}

qsim::StateVector BatchState::solo_state(QubitId id) const {
  const Slot& slot = slot_of(id);
  if (slot.in_register) throw ProtocolViolation("qubit is entangled, no solo state");
  if (slot.measured) throw ProtocolViolation("qubit already measured");
  return slot.solo;
}

// ---- server strategy defaults ----

void ServerStrategy::on_entangle(BatchState& batch, const EntangleOrder& order) {
  for (const auto& e : order.edges) batch.apply_cz(e.first, e.second);
}

void ServerStrategy::on_h_order(BatchState& batch, const std::vector<QubitId>& positions) {
  for (QubitId id : positions) batch.apply_h(id);
}

OutcomeList ServerStrategy::on_measure(BatchState& batch, const AngleList& angles) {
  OutcomeList out;
  for (const auto& [id, angle] : angles.entries)
    out.bits.push_back(batch.measure(id, angle.radians(), measure_rng_));
  return out;
}

void ServerStrategy::seed_rng(std::uint64_t seed, std::uint64_t measure_seed) {
  rng_.seed(seed);
  measure_rng_.seed(measure_seed);
}

// ---- client operations ----

ClientPrepared client_prepare(const std::vector<mbqc::GateLabel>& circuit, const Config& config,
                              std::mt19937_64& rng) {
  Config cfg = config;
  cfg.circuit = circuit;
  cfg.validate();

  ClientPrepared out;
  ClientSecret& secret = out.secret;
  secret.config = cfg;
  secret.plan = compile_circuit(circuit, /*with_readout=*/true);
  const CircuitPlan& plan = secret.plan;

  for (const auto& unit : plan.units) {
    if (unit.readout) continue;
    for (const auto& corr : mbqc::gate_pattern(unit.gate).corrections)
      if (corr.kind == mbqc::Correction::Kind::Hadamard)
        secret.h_corrected.insert(unit.wire[corr.wire].back());
  }

  // Per-qubit secrets in allocation order: kappa then r for each new vertex.
  for (const auto& unit : plan.units) {
    for (int w = 0; w < 2; ++w) {
      std::size_t first = unit.fresh_inputs ? 0 : 1;
      for (std::size_t c = first; c < unit.wire[w].size(); ++c) {
        QubitId id = unit.wire[w][c];
        Angle8 kappa = secret.h_corrected.count(id) ? Angle8(4 * draw_bit(rng))
                                                    : Angle8(draw_k8(rng));
        secret.kappa.emplace(id, kappa);
        secret.r_bits.emplace(id, draw_bit(rng));
      }
    }
  }

  // Physical preparations. Inputs keep their kind; equatorial kinds fold the
  // kappa rotation into the prepared angle, Z-basis kinds carry it only in
  // the later measurement angle (Rz is a global phase on them).
  for (int w = 0; w < 2; ++w) {
    QubitId id = plan.units.front().wire[w][0];
    qsim::PrepSpec spec = cfg.input[w];
    if (spec.kind == qsim::PrepKind::Plus || spec.kind == qsim::PrepKind::Minus)
      spec.angle = spec.angle + secret.kappa.at(id);
    secret.prep.emplace(id, spec);
  }
  for (const auto& unit : plan.units) {
    for (int w = 0; w < 2; ++w) {
      // column 0 is either the logical input or the predecessor's output
      for (std::size_t c = 1; c < unit.wire[w].size(); ++c) {
        QubitId id = unit.wire[w][c];
        secret.prep.emplace(id, qsim::PrepSpec{qsim::PrepKind::Plus, secret.kappa.at(id)});
      }
    }
  }

  // R1 trap pairs, with a stratified-uniform testable subset per round: the
  // subset size is K/4 in expectation and never empty, so a round always
  // holds at least one deterministic trap.
  for (const auto& unit : plan.units) {
    int pairs = trap_pairs_for_round(cfg, unit);
    std::size_t start = secret.r1.size();
    for (int p = 0; p < pairs; ++p) {
      for (int origin = 0; origin < 2; ++origin) {
        R1Trap trap;
        trap.id = secret.plan.next_id++;
        trap.round = unit.round;
        trap.origin_bit = origin;
        trap.r = draw_bit(rng);
        secret.r1.push_back(trap);
        secret.prep.emplace(trap.id,
                            qsim::PrepSpec{origin ? qsim::PrepKind::One : qsim::PrepKind::Zero,
                                           Angle8(0)});
      }
    }
    int count = 2 * pairs;
    int subset = count / 4;
    double frac = (count % 4) / 4.0;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (u01(rng) < frac) ++subset;
    if (subset < 1) subset = 1;
    std::vector<std::size_t> order(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = start + i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < subset; ++i) secret.r1[order[static_cast<std::size_t>(i)]].testable = true;
    for (std::size_t i = start; i < secret.r1.size(); ++i) {
      R1Trap& trap = secret.r1[i];
      if (trap.testable) {
        trap.sent_angle = Angle8(4 * trap.r);
      } else {
        trap.delta = 1 + static_cast<int>(rng() % 3u);
        trap.sent_angle = Angle8(trap.delta + 4 * trap.r);
      }
      trap.predicted = trap.origin_bit ^ trap.r;
    }
  }

  secret.round_sequence.resize(plan.units.size());
  secret.round_h_order.resize(plan.units.size());

  out.batch.round = 0;
  for (QubitId id : unit_vertices(plan.units.front()))
    out.batch.qubits.push_back({id, secret.prep.at(id)});
  for (const auto& trap : secret.r1)
    if (trap.round == 0) out.batch.qubits.push_back({trap.id, secret.prep.at(trap.id)});
  std::shuffle(out.batch.qubits.begin(), out.batch.qubits.end(), rng);
  return out;
}

ReturnBatch server_entangle(BatchState& batch, const EntangleOrder& order) {
  for (const auto& e : order.edges) batch.apply_cz(e.first, e.second);
  return ReturnBatch{order.round, batch.held_unmeasured()};
}

InsertResult client_insert_r2(const ReturnBatch& returned, ClientSecret& secret, int round,
                              std::mt19937_64& rng) {
  if (round < 0 || static_cast<std::size_t>(round) >= secret.plan.units.size())
    throw ProtocolViolation("round out of range");
  const UnitPlan& unit = secret.plan.units[static_cast<std::size_t>(round)];

  std::set<QubitId> held(returned.held.begin(), returned.held.end());
  for (QubitId id : unit_vertices(unit))
    if (!held.count(id)) throw ProtocolViolation("server did not return unit qubit");
  for (const auto& trap : secret.r1)
    if (trap.round == round && !held.count(trap.id))
      throw ProtocolViolation("server did not return trap qubit");

  TrapPolicy fallback;
  TrapPolicy* policy = secret.config.trap_policy ? secret.config.trap_policy.get() : &fallback;

  std::vector<QubitId> sequence;
  for (int c = 0; c < measured_columns(unit); ++c)
    for (int w = 0; w < 2; ++w) sequence.push_back(unit.wire[w][c]);

  for (const auto& trap : secret.r1) {
    if (trap.round != round) continue;
    std::size_t pos = policy->draw_position(rng, sequence.size());
    if (pos > sequence.size()) throw ProtocolViolation("trap position out of range");
    sequence.insert(sequence.begin() + static_cast<std::ptrdiff_t>(pos), trap.id);
  }

  int pairs = trap_pairs_for_round(secret.config, unit);
  int budget = unit.kind == mbqc::UnitKind::Six ? 6 : 8;
  if (pairs > budget) throw TrapBudgetExceeded("second-stage trap count exceeds the unit budget");

  InsertResult out;
  out.r2_batch.round = round;
  std::size_t start = secret.r2.size();
  for (int i = 0; i < pairs; ++i) {
    R2Trap trap;
    trap.id = secret.plan.next_id++;
    trap.round = round;
    trap.phi = Angle8(draw_k8(rng));
    trap.minus = draw_bit(rng);
    trap.r = draw_bit(rng);
    int coin = draw_bit(rng);
    bool eligible = trap.phi.k == 2 || trap.phi.k == 6;
    trap.h_order = eligible && coin == 1;
    int sent_k = trap.h_order ? 8 - trap.phi.k : trap.phi.k;
    trap.sent_angle = Angle8(sent_k + 4 * trap.r);
    trap.predicted = trap.minus ^ trap.r;
    secret.r2.push_back(trap);
    secret.prep.emplace(trap.id, qsim::PrepSpec{trap.minus ? qsim::PrepKind::Minus
                                                           : qsim::PrepKind::Plus,
                                                trap.phi});
    out.r2_batch.qubits.push_back({trap.id, secret.prep.at(trap.id)});
  }
  for (std::size_t i = start; i < secret.r2.size(); ++i) {
    std::size_t pos = policy->draw_position(rng, sequence.size());
    if (pos > sequence.size()) throw ProtocolViolation("trap position out of range");
    sequence.insert(sequence.begin() + static_cast<std::ptrdiff_t>(pos), secret.r2[i].id);
  }

  std::vector<QubitId> h_order;
  for (const auto& trap : secret.r1)
    if (trap.round == round) h_order.push_back(trap.id);
  for (std::size_t i = start; i < secret.r2.size(); ++i)
    if (secret.r2[i].h_order) h_order.push_back(secret.r2[i].id);
  if (!unit.readout)
    for (const auto& corr : mbqc::gate_pattern(unit.gate).corrections)
      if (corr.kind == mbqc::Correction::Kind::Hadamard)
        h_order.push_back(unit.wire[corr.wire].back());
  std::shuffle(h_order.begin(), h_order.end(), rng);

  secret.round_sequence[static_cast<std::size_t>(round)] = sequence;
  secret.round_h_order[static_cast<std::size_t>(round)] = h_order;
  out.sequence = sequence;
  return out;
}

Angle8 client_angle(const ClientSecret& secret, int round, QubitId id,
                    const std::map<QubitId, int>& outcomes) {
  const CircuitPlan& plan = secret.plan;
  if (round < 0 || static_cast<std::size_t>(round) >= plan.units.size())
    throw ProtocolViolation("round out of range");

  for (const auto& trap : secret.r1)
    if (trap.id == id) {
      if (trap.round != round) throw ProtocolViolation("trap measured in the wrong round");
      return trap.sent_angle;
    }
  for (const auto& trap : secret.r2)
    if (trap.id == id) {
      if (trap.round != round) throw ProtocolViolation("trap measured in the wrong round");
      return trap.sent_angle;
    }

  int sx[2] = {0, 0};
  int sz[2] = {0, 0};
  bool absorb = false;
  auto hop = [&] {
    int a = sx[0];
    int b = sx[1];
    sz[0] ^= b;
    sz[1] ^= a;
  };

  for (int u = 0; u <= round; ++u) {
    const UnitPlan& unit = plan.units[static_cast<std::size_t>(u)];
    mbqc::MeasurementPattern pat;
    if (!unit.readout) pat = mbqc::gate_pattern(unit.gate);
    if (has_col0_vertical(plan, u)) hop();
    for (int c = 0; c < measured_columns(unit); ++c) {
      if (unit.kind == mbqc::UnitKind::Eight && c == 2) hop();
      for (int w = 0; w < 2; ++w) {
        QubitId v = unit.wire[w][static_cast<std::size_t>(c)];
        Angle8 base = unit.readout ? Angle8(0) : pat.commands[static_cast<std::size_t>(2 * c + w)].base;
        bool absorbed_here = absorb && w == 1 && c == 0;
        if (absorbed_here) base = mbqc::absorb_cnot_correction(base);
        if (v == id) {
          if (u != round) throw ProtocolViolation("qubit already measured in an earlier round");
          Angle8 kappa = secret.h_corrected.count(v) ? Angle8(0) : secret.kappa.at(v);
          return mbqc::adaptive_angle(base, sx[w], sz[w], kappa, secret.r_bits.at(v));
        }
        auto it = outcomes.find(v);
        if (it == outcomes.end())
          throw MissingDependency("outcome of qubit " + std::to_string(v) + " not reported yet");
        // the r*pi term relabels the +/- outcomes, so the byproduct carries
        // the unflipped bit
        sz[w] = sx[w];
        sx[w] = it->second ^ secret.r_bits.at(v);
        if (absorbed_here) absorb = false;
      }
    }
    if (u == round) break;
    if (unit.kind == mbqc::UnitKind::Six) hop();
    if (!unit.readout) {
      for (const auto& corr : pat.corrections) {
        if (corr.kind == mbqc::Correction::Kind::Hadamard) {
          QubitId ov = unit.wire[corr.wire].back();
          int cbit = secret.kappa.at(ov).k == 4 ? 1 : 0;
          int t = sx[corr.wire];
          sx[corr.wire] = sz[corr.wire] ^ cbit;
          sz[corr.wire] = t;
        } else {
          absorb = true;
        }
      }
    }
  }
  throw ProtocolViolation("qubit " + std::to_string(id) + " is not measured in round " +
                          std::to_string(round));
}

AngleList client_angles(const ClientSecret& secret, int round,
                        const std::map<QubitId, int>& outcomes) {
  if (round < 0 || static_cast<std::size_t>(round) >= secret.round_sequence.size() ||
      secret.round_sequence[static_cast<std::size_t>(round)].empty())
    throw ProtocolViolation("round sequence not planned yet");
  AngleList out;
  for (QubitId id : secret.round_sequence[static_cast<std::size_t>(round)])
    out.entries.emplace_back(id, client_angle(secret, round, id, outcomes));
  return out;
}

OutcomeList server_measure(BatchState& batch, const AngleList& angles, std::mt19937_64& rng) {
  OutcomeList out;
  for (const auto& [id, angle] : angles.entries)
    out.bits.push_back(batch.measure(id, angle.radians(), rng));
  return out;
}

Decision client_decide(const ClientSecret& secret, const std::map<QubitId, int>& outcomes,
                       double q, std::mt19937_64& rng) {
  const UnitPlan& readout = secret.plan.units.back();
  if (!readout.readout) throw ProtocolViolation("plan carries no readout unit");

  Decision decision;
  for (int w = 0; w < 2; ++w) {
    QubitId id = readout.wire[w].back();
    auto it = outcomes.find(id);
    if (it == outcomes.end()) throw MissingDependency("readout outcome missing");
    decision.flip_applied[static_cast<std::size_t>(w)] = secret.r_bits.at(id);
    decision.decoded_bits[static_cast<std::size_t>(w)] = it->second ^ secret.r_bits.at(id);
  }

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double u = u01(rng);
  if (u < q) {
    decision.branch = Decision::Branch::EvaluateComputation;
  } else if (u < q + (1.0 - q) / 2.0) {
    decision.branch = Decision::Branch::TestR1;
  } else {
    decision.branch = Decision::Branch::TestR2;
  }

  switch (decision.branch) {
    case Decision::Branch::EvaluateComputation: {
      int expected = secret.config.expected_bit;
      if (expected < 0) {
        auto dist = direct_top_bit_distribution(secret.config);
        expected = dist[1] > dist[0] ? 1 : 0;
      }
      decision.accept = decision.decoded_bits[0] == expected;
      break;
    }
    case Decision::Branch::TestR1: {
      decision.accept = true;
      for (const auto& trap : secret.r1) {
        if (!trap.testable) continue;
        auto it = outcomes.find(trap.id);
        if (it == outcomes.end()) throw MissingDependency("trap outcome missing");
        if (it->second != trap.predicted) decision.accept = false;
      }
      break;
    }
    case Decision::Branch::TestR2: {
      decision.accept = true;
      for (const auto& trap : secret.r2) {
        auto it = outcomes.find(trap.id);
        if (it == outcomes.end()) throw MissingDependency("trap outcome missing");
        if (it->second != trap.predicted) decision.accept = false;
      }
      break;
    }
  }
  return decision;
}

Transcript run_protocol(const Config& config, ServerStrategy& strategy, std::uint64_t seed) {
  config.validate();
  Transcript transcript;
  transcript.seed = seed;
  transcript.config = config;

  std::mt19937_64 alice = make_stream(seed, 0xA11CEull);
  {
    std::mt19937_64 s = make_stream(seed, 0x0B0Bull);
    std::uint64_t a = s();
    std::uint64_t b = s();
    strategy.seed_rng(a, b);
  }

  ClientPrepared prepared = client_prepare(config.circuit, config, alice);
  ClientSecret& secret = prepared.secret;
  BatchState batch;
  std::map<QubitId, int> outcomes;

  for (std::size_t round = 0; round < secret.plan.units.size(); ++round) {
    const UnitPlan& unit = secret.plan.units[round];
    int r = static_cast<int>(round);

    QubitBatch qb = round == 0 ? prepared.batch : prepare_round_batch(secret, r, alice);
    transcript.messages.push_back({Message::Kind::QubitBatch, qb});
    for (const auto& q : qb.qubits) batch.add_qubit(q.id, q.spec);

    EntangleOrder order{r, unit_vertices(unit), unit.edges};
    transcript.messages.push_back({Message::Kind::EntangleOrder, order});
    strategy.on_entangle(batch, order);

    ReturnBatch returned{r, batch.held_unmeasured()};
    transcript.messages.push_back({Message::Kind::ReturnBatch, returned});

    InsertResult inserted = client_insert_r2(returned, secret, r, alice);
    transcript.messages.push_back({Message::Kind::QubitBatch, inserted.r2_batch});
    for (const auto& q : inserted.r2_batch.qubits) batch.add_qubit(q.id, q.spec);

    HOrder h_order{r, secret.round_h_order[round]};
    transcript.messages.push_back({Message::Kind::HOrder, h_order});
    strategy.on_h_order(batch, h_order.positions);

    std::set<QubitId> trap_ids;
    for (const auto& trap : secret.r1)
      if (trap.round == r) trap_ids.insert(trap.id);
    for (const auto& trap : secret.r2)
      if (trap.round == r) trap_ids.insert(trap.id);

    UnitRecord record;
    record.gate = unit.gate;
    record.kind = unit.kind;
    for (QubitId id : inserted.sequence) {
      AngleList angles;
      angles.entries.emplace_back(id, client_angle(secret, r, id, outcomes));
      transcript.messages.push_back({Message::Kind::AngleList, angles});
      OutcomeList reported = strategy.on_measure(batch, angles);
      if (reported.bits.size() != 1 || (reported.bits[0] != 0 && reported.bits[0] != 1))
        throw ProtocolViolation("malformed outcome list from server");
      transcript.messages.push_back({Message::Kind::OutcomeList, reported});
      outcomes[id] = reported.bits[0];
      if (trap_ids.count(id)) {
        record.trap_outcomes[id] = reported.bits[0];
      } else {
        record.outcomes[id] = reported.bits[0];
      }
    }
    transcript.units.push_back(std::move(record));
  }

  transcript.decision = client_decide(secret, outcomes, config.q, alice);
  return transcript;
}

bool replay(const Transcript& transcript) {
  ServerStrategy honest;
  return replay(transcript, honest);
}

bool replay(const Transcript& transcript, ServerStrategy& strategy) {
  Transcript again = run_protocol(transcript.config, strategy, transcript.seed);
  if (again.messages.size() != transcript.messages.size()) return false;
  for (std::size_t i = 0; i < again.messages.size(); ++i)
    if (!message_equal(again.messages[i], transcript.messages[i])) return false;
  return again.decision.branch == transcript.decision.branch &&
         again.decision.accept == transcript.decision.accept &&
         again.decision.decoded_bits == transcript.decision.decoded_bits;
}

qsim::StateVector simulate_circuit(const std::vector<mbqc::GateLabel>& circuit,
                                   const std::array<qsim::PrepSpec, 2>& input) {
  qsim::StateVector state = qsim::prepare_state({input[0], input[1]});
  for (mbqc::GateLabel g : circuit) {
    switch (g) {
      case mbqc::GateLabel::I:
        break;
      case mbqc::GateLabel::S:
        qsim::apply_gate(state, {qsim::GateKind::S, 0.0}, {0});
        break;
      case mbqc::GateLabel::T:
        qsim::apply_gate(state, {qsim::GateKind::T, 0.0}, {0});
        break;
      case mbqc::GateLabel::Z:
        qsim::apply_gate(state, {qsim::GateKind::Z, 0.0}, {0});
        break;
      case mbqc::GateLabel::X:
        qsim::apply_gate(state, {qsim::GateKind::X, 0.0}, {0});
        break;
      case mbqc::GateLabel::Y:
        qsim::apply_gate(state, {qsim::GateKind::Y, 0.0}, {0});
        break;
      case mbqc::GateLabel::H:
        qsim::apply_gate(state, {qsim::GateKind::H, 0.0}, {0});
        break;
      case mbqc::GateLabel::CNOT:
        qsim::apply_gate(state, {qsim::GateKind::CNOT, 0.0}, {0, 1});
        break;
    }
  }
  return state;
}

std::array<double, 2> direct_top_bit_distribution(const Config& config) {
  qsim::StateVector state = simulate_circuit(config.circuit, config.input);
  std::array<double, 2> dist{0.0, 0.0};
  for (std::size_t idx = 0; idx < state.amps.size(); ++idx) {
    int top = static_cast<int>((idx >> (state.num_qubits - 1)) & 1u);
    dist[static_cast<std::size_t>(top)] += std::norm(state.amps[idx]);
  }
  return dist;
}

}  // namespace blindlattice::protocol
