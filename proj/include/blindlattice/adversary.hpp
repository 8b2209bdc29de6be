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

#include <memory>
#include <string>
#include <vector>

#include "blindlattice/protocol.hpp"
#include "blindlattice/qsim.hpp"

// Catalog of server strategies for run_protocol. Every strategy sees only
// what an honest server sees: its own quantum memory plus the client's
// messages. None of them take a ClientSecret, so the blindness boundary is
// enforced by construction. Each strategy is a deterministic function of the
// messages and its own seed, which keeps transcripts replayable.

namespace blindlattice::adversary {

// The 18 single-qubit states the client draws preparations from: |0>, |1>,
// and |+_k>, |-_k> at the eight grid angles. Averaging their densities gives
// the maximally mixed state, which is what makes the default substitution
// attack below score exactly 1/2 per trap.
std::vector<qsim::PrepSpec> uniform_state_pool();

// Follows the protocol exactly.
std::unique_ptr<protocol::ServerStrategy> honest();

// Substitution attack: every received qubit is replaced at first sight with a
// fresh sample from `pool`, then the honest operations run on the substituted
// states. The one-argument form uses the 18-state pool above.
std::unique_ptr<protocol::ServerStrategy> fake_graph();
std::unique_ptr<protocol::ServerStrategy> fake_graph(std::vector<qsim::PrepSpec> pool);

// Classical tampering: honest execution, then each reported bit is flipped
// independently with probability p (0 <= p <= 1).
std::unique_ptr<protocol::ServerStrategy> flip_outcomes(double p);

// Applies no CZ at all; receives, Hadamards and measures honestly. Trap tests
// cannot catch this (traps are never entangled), so only the decoded
// computation degrades. Identity-like circuits on product inputs can still
// come out right; that is a documented limitation of trap-only testing.
std::unique_ptr<protocol::ServerStrategy> skip_entangle();

// Lookup by name for config files and the command line: "honest",
// "fake_graph", "fake_graph_zero" (all-|0> pool), "flip_outcomes" (param = p),
// "skip_entangle". Unknown names throw BadConfig.
std::unique_ptr<protocol::ServerStrategy> by_name(const std::string& name, double param = 0.0);

}  // namespace blindlattice::adversary
