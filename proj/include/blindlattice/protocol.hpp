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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "blindlattice/mbqc.hpp"
#include "blindlattice/qsim.hpp"

namespace blindlattice::protocol {

using QubitId = int;

struct BadConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TrapBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingDependency : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How trap qubits pick their slot in a measurement sequence. The default is
// uniform over all gap positions; tests can substitute other readings.
struct TrapPolicy {
  virtual ~TrapPolicy() = default;
  virtual std::size_t draw_position(std::mt19937_64& rng, std::size_t sequence_len);
};

struct Config {
  std::vector<mbqc::GateLabel> circuit;
  std::array<qsim::PrepSpec, 2> input{qsim::PrepSpec{qsim::PrepKind::Zero, Angle8(0)},
                                      qsim::PrepSpec{qsim::PrepKind::Zero, Angle8(0)}};
  int m1 = 1;      // trap-pair rows; the wire pair has 2 rows, so 1 <= m1 <= 1
  double q = 0.5;  // probability of the evaluate branch
  int expected_bit = -1;  // decision bit; -1 derives it from direct simulation
  std::shared_ptr<TrapPolicy> trap_policy;  // null = uniform

  static constexpr int rows = 2;
  void validate() const;
};

// ---- messages ----

struct PreparedQubit {
  QubitId id = 0;
  qsim::PrepSpec spec;
};

struct QubitBatch {
  int round = 0;
  std::vector<PreparedQubit> qubits;
};

struct EntangleOrder {
  int round = 0;
  std::vector<QubitId> vertices;
  std::vector<std::pair<QubitId, QubitId>> edges;
};

struct ReturnBatch {
  int round = 0;
  std::vector<QubitId> held;  // unmeasured qubits on the server, arrival order
};

struct AngleList {
  std::vector<std::pair<QubitId, Angle8>> entries;
};

struct HOrder {
  int round = 0;
  std::vector<QubitId> positions;
};

struct OutcomeList {
  std::vector<int> bits;
};

struct Message {
  enum class Kind { QubitBatch, EntangleOrder, ReturnBatch, AngleList, HOrder, OutcomeList };
  Kind kind = Kind::QubitBatch;
  std::variant<QubitBatch, EntangleOrder, ReturnBatch, AngleList, HOrder, OutcomeList> payload;
};

// ---- compiled plan and client secret ----

struct UnitPlan {
  mbqc::GateLabel gate = mbqc::GateLabel::I;
  mbqc::UnitKind kind = mbqc::UnitKind::Six;
  int wire_len = 3;
  int round = 0;
  bool fresh_inputs = false;  // first unit: column 0 arrives in the batch
  // Readout unit: appended after the user circuit, all-zero base angles (the
  // raw wire action H on each wire), no corrections, and every column is
  // measured; the output-column outcomes carry the decision bits.
  bool readout = false;
  std::array<std::vector<QubitId>, 2> wire;  // [wire][col]
  std::vector<std::pair<QubitId, QubitId>> edges;
};

struct CircuitPlan {
  std::vector<UnitPlan> units;
  int total_columns = 0;  // lattice columns spanned by the chained units
  QubitId next_id = 0;
};

// Chains one unit per gate; consecutive units share their boundary column.
// A Six unit's output-column vertical CZ doubles as its successor's input
// vertical, so the successor's column-0 vertical is emitted only after an
// Eight unit (whose verticals sit at columns 0 and 2, not the output).
// With `with_readout` an Eight-kind readout unit is chained after the last
// gate; client_prepare always plans with it.
CircuitPlan compile_circuit(const std::vector<mbqc::GateLabel>& circuit, bool with_readout = false);

struct R1Trap {
  QubitId id = 0;
  int round = 0;
  int origin_bit = 0;  // |0> or |1> as prepared
  int r = 0;
  bool testable = false;  // angle r*pi (testable) vs delta*pi/4 + r*pi
  int delta = 0;          // 1..3 when untestable
  Angle8 sent_angle{};
  int predicted = 0;  // origin_bit xor r, meaningful when testable
};

struct R2Trap {
  QubitId id = 0;
  int round = 0;
  Angle8 phi{};
  int minus = 0;  // sign bit of |±_phi>
  int r = 0;
  bool h_order = false;  // camouflage H; only when phi is ±pi/2
  Angle8 sent_angle{};
  int predicted = 0;  // minus xor r
};

struct ClientSecret {
  Config config;
  CircuitPlan plan;
  std::map<QubitId, Angle8> kappa;         // per computation qubit
  std::map<QubitId, int> r_bits;           // per measured computation qubit
  std::map<QubitId, qsim::PrepSpec> prep;  // what was physically sent, per qubit
  // Outputs that receive a Hadamard correction. Their kappa is drawn from
  // {0, pi} (H keeps only that meridian on the equator) and is consumed as a
  // known X flip, not as an additive shift of the later measurement angle.
  std::set<QubitId> h_corrected;
  std::vector<R1Trap> r1;
  std::vector<R2Trap> r2;
  std::vector<std::vector<QubitId>> round_sequence;  // measurement order per round
  std::vector<std::vector<QubitId>> round_h_order;
};

// ---- decision and transcript ----

struct Decision {
  enum class Branch { EvaluateComputation, TestR1, TestR2 };
  Branch branch = Branch::EvaluateComputation;
  bool accept = false;
  std::array<int, 2> decoded_bits{0, 0};
  std::array<int, 2> flip_applied{0, 0};  // r bits removed from the readout outcomes
};

struct UnitRecord {
  mbqc::GateLabel gate = mbqc::GateLabel::I;
  mbqc::UnitKind kind = mbqc::UnitKind::Six;
  std::map<QubitId, int> outcomes;       // unit vertices measured this round
  std::map<QubitId, int> trap_outcomes;  // traps measured this round
};

struct Transcript {
  std::uint64_t seed = 0;
  Config config;
  std::vector<Message> messages;
  std::vector<UnitRecord> units;
  Decision decision;
};

// ---- server quantum memory ----

class BatchState {
 public:
  void add_qubit(QubitId id, const qsim::PrepSpec& spec);
  void replace_qubit(QubitId id, const qsim::PrepSpec& spec);  // fresh state, same slot
  void apply_cz(QubitId a, QubitId b);
  void apply_h(QubitId id);
  int measure(QubitId id, double eta, std::mt19937_64& rng);

  [[nodiscard]] bool holds(QubitId id) const;
  [[nodiscard]] bool is_measured(QubitId id) const;
  [[nodiscard]] std::vector<QubitId> held_unmeasured() const;  // arrival order

  // single-qubit state of an unentangled qubit (traps); throws otherwise
  [[nodiscard]] qsim::StateVector solo_state(QubitId id) const;
  // the joint register of every qubit that went through a CZ
  [[nodiscard]] const qsim::StateVector& register_state() const { return register_; }
  [[nodiscard]] const std::vector<QubitId>& register_members() const { return reg_members_; }

 private:
  struct Slot {
    QubitId id;
    bool in_register = false;
    bool measured = false;
    qsim::StateVector solo;
  };
  Slot& slot_of(QubitId id);
  const Slot& slot_of(QubitId id) const;
  void promote(QubitId id);  // move a solo qubit into the register

  std::vector<Slot> slots_;  // arrival order
  qsim::StateVector register_;
  std::vector<QubitId> reg_members_;  // register qubit order
};

// ---- server strategy boundary ----

// Override points see exactly what the server sees: its own quantum memory
// and the client's messages. The client secret never crosses this boundary.
class ServerStrategy {
 public:
  virtual ~ServerStrategy() = default;
  [[nodiscard]] virtual std::string name() const { return "honest"; }
  virtual void on_entangle(BatchState& batch, const EntangleOrder& order);
  virtual void on_h_order(BatchState& batch, const std::vector<QubitId>& positions);
  virtual OutcomeList on_measure(BatchState& batch, const AngleList& angles);
  void seed_rng(std::uint64_t seed, std::uint64_t measure_seed);

 protected:
  std::mt19937_64 rng_{0};          // strategy-owned randomness
  std::mt19937_64 measure_rng_{0};  // outcome randomness (quantum)
};

// ---- client-side operations ----

struct ClientPrepared {
  ClientSecret secret;
  QubitBatch batch;  // round 0
};

ClientPrepared client_prepare(const std::vector<mbqc::GateLabel>& circuit, const Config& config,
                              std::mt19937_64& rng);

// Honest entangle: applies exactly the ordered unit edges.
ReturnBatch server_entangle(BatchState& batch, const EntangleOrder& order);

struct InsertResult {
  QubitBatch r2_batch;                // the spliced trap qubits
  std::vector<QubitId> sequence;      // full measurement order for the round
};

InsertResult client_insert_r2(const ReturnBatch& returned, ClientSecret& secret, int round,
                              std::mt19937_64& rng);

// Angle for one position of one round, given every outcome already reported.
// Carried byproduct bits and the pending absorb shift are taken from
// `outcomes` via the plan, so the call is pure.
Angle8 client_angle(const ClientSecret& secret, int round, QubitId id,
                    const std::map<QubitId, int>& outcomes);

// Full per-round list in sequence order; requires all outcomes the round's
// dependencies reference (throws MissingDependency otherwise).
AngleList client_angles(const ClientSecret& secret, int round, const std::map<QubitId, int>& outcomes);

// Honest measurement of a batch of positions at sent angles, in order.
OutcomeList server_measure(BatchState& batch, const AngleList& angles, std::mt19937_64& rng);

Decision client_decide(const ClientSecret& secret, const std::map<QubitId, int>& outcomes, double q,
                       std::mt19937_64& rng);

Transcript run_protocol(const Config& config, ServerStrategy& strategy, std::uint64_t seed);

// Feeds the logged client messages to a fresh server with the same seed and
// checks the reported outcomes match the log.
bool replay(const Transcript& transcript);
bool replay(const Transcript& transcript, ServerStrategy& strategy);

// Plain circuit simulation on the logical wire pair (oracle for decoding).
qsim::StateVector simulate_circuit(const std::vector<mbqc::GateLabel>& circuit,
                                   const std::array<qsim::PrepSpec, 2>& input);

// Z-readout distribution of the top wire under direct simulation.
std::array<double, 2> direct_top_bit_distribution(const Config& config);

}  // namespace blindlattice::protocol
