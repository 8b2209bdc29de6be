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

#include <string>
#include <vector>

// Command-line front end. Subcommands: run (one protocol execution),
// verify-gates (unit/gate branch verification), blindness (mixing identity
// plus sent-angle uniformity), bounds (closed-form bound report or CSV
// sweep), attack (acceptance table for honest plus listed strategies),
// lattice (geometry and pattern export).
//
// Exit codes: 0 success, 1 verification/bound-check failure or unwritable
// report, 2 usage error.

namespace blindlattice::cli {

// `args` excludes the program name. Writes summaries to stdout and, with
// --out, a json/csv/jsonl report file.
int dispatch(const std::vector<std::string>& args);

// argv form, argv[0] being the program name.
int dispatch(int argc, const char* const* argv);

}  // namespace blindlattice::cli
