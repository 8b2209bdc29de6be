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

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "blindlattice/analysis.hpp"
#include "blindlattice/mbqc.hpp"
#include "blindlattice/protocol.hpp"

// JSON/CSV views of the library types, used by the command line and test
// fixtures. Key order is fixed (ordered_json) and doubles use the shortest
// round-trip form, so equal inputs serialize to identical bytes.
//
// Schemas:
//   lattice bundle   {"m", "n", "edges": [[[row,col],[row,col]], ...],
//                     "units": [{"kind", "gate", "angles_k": [k...],
//                                "corrections": [{"kind", "wire"}]}]}
//   transcript jsonl one record per line: a {"type":"meta"} line carrying
//                    seed and config, one {"type": <message kind>} line per
//                    exchanged message, and a closing {"type":"decision"}.
//   bounds sweep csv header q,epsilon,xi1,xi2,xi3,q_lb,feasible.

namespace blindlattice::serialize {

using nlohmann::ordered_json;

// ---- lattice and patterns ----

ordered_json lattice_json(const mbqc::LatticeSpec& lattice);
ordered_json pattern_json(const mbqc::MeasurementPattern& pattern);
// The combined {m, n, edges, units} document.
ordered_json lattice_bundle_json(const mbqc::LatticeSpec& lattice,
                                 const std::vector<mbqc::GateLabel>& circuit);

// ---- protocol ----

ordered_json prep_spec_json(const qsim::PrepSpec& spec);
ordered_json config_json(const protocol::Config& config);
ordered_json message_json(const protocol::Message& message);
ordered_json decision_json(const protocol::Decision& decision);
std::string transcript_jsonl(const protocol::Transcript& transcript);

// ---- analysis ----

ordered_json bound_report_json(const analysis::BoundReport& report);
ordered_json acceptance_json(const analysis::AcceptanceEstimate& estimate);
std::string bounds_sweep_csv(const std::vector<double>& qs, const std::vector<double>& epsilons);

// ---- key=value config text ----

// Parses "key = value" lines; '#' starts a comment, blank lines are skipped,
// keys and values are trimmed. Malformed lines throw protocol::BadConfig.
std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace blindlattice::serialize
