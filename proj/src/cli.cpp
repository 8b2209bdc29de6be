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

#include "blindlattice/cli.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "blindlattice/adversary.hpp"
#include "blindlattice/analysis.hpp"
#include "blindlattice/serialize.hpp"

namespace blindlattice::cli {

namespace {

struct ReportWriteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StrategyChoice {
  std::string name;
  double param = 0.0;
};

// "honest", "flip:p=0.5", "flip_outcomes:p=0.25", "fake_graph", ...
StrategyChoice parse_strategy(const std::string& text) {
  StrategyChoice choice;
  const auto colon = text.find(':');
  choice.name = text.substr(0, colon);
  if (choice.name == "flip") choice.name = "flip_outcomes";
  if (colon != std::string::npos) {
    const std::string rest = text.substr(colon + 1);
    if (rest.rfind("p=", 0) != 0)
      throw protocol::BadConfig("strategy parameter must look like p=VALUE: " + text);
    try {
      std::size_t used = 0;
      choice.param = std::stod(rest.substr(2), &used);
      if (used != rest.size() - 2) throw std::invalid_argument(rest);
    } catch (const std::logic_error&) {
      throw protocol::BadConfig("bad strategy parameter: " + text);
    }
  }
  adversary::by_name(choice.name, choice.param);  // validates name and param
  return choice;
}

std::vector<mbqc::GateLabel> parse_circuit(const std::string& text) {
  std::vector<mbqc::GateLabel> circuit;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw mbqc::UnknownGate("empty gate label in: " + text);
    const auto last = item.find_last_not_of(" \t");
    circuit.push_back(mbqc::gate_label_from_name(item.substr(first, last - first + 1)));
  }
  if (circuit.empty()) throw mbqc::UnknownGate("empty circuit");
  return circuit;
}

std::array<qsim::PrepSpec, 2> parse_input(const std::string& text) {
  if (text.size() != 2)
    throw protocol::BadConfig("--input wants one of 0/1/+/- per wire, e.g. 10 or 0+");
  std::array<qsim::PrepSpec, 2> specs;
  for (int w = 0; w < 2; ++w) {
    switch (text[static_cast<std::size_t>(w)]) {
      case '0': specs[static_cast<std::size_t>(w)] = {qsim::PrepKind::Zero, Angle8(0)}; break;
      case '1': specs[static_cast<std::size_t>(w)] = {qsim::PrepKind::One, Angle8(0)}; break;
      case '+': specs[static_cast<std::size_t>(w)] = {qsim::PrepKind::Plus, Angle8(0)}; break;
      case '-': specs[static_cast<std::size_t>(w)] = {qsim::PrepKind::Minus, Angle8(0)}; break;
      default: throw protocol::BadConfig("bad input character in --input " + text);
    }
  }
  return specs;
}

void write_report(const std::string& path, const std::string& contents) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportWriteError("cannot open report file: " + path);
  out << contents;
  out.flush();
  if (!out) throw ReportWriteError("failed writing report file: " + path);
}

std::string json_text(const serialize::ordered_json& j) { return j.dump(2) + "\n"; }

struct Options {
  std::string circuit_text = "I";
  std::string input_text = "00";
  std::vector<std::string> strategy_texts;
  double q = 0.5;
  int m1 = 1;
  int trials = 400;
  std::uint64_t seed = 1;
  int expect = -1;
  double epsilon = 0.2;
  int rows = 2;
  int cols = 5;
  std::string out_path;
  std::string format = "json";

  [[nodiscard]] protocol::Config to_config() const {
    protocol::Config cfg;
    cfg.circuit = parse_circuit(circuit_text);
    cfg.input = parse_input(input_text);
    cfg.m1 = m1;
    cfg.q = q;
    cfg.expected_bit = expect;
    cfg.validate();
    return cfg;
  }
};

int cmd_run(const Options& opt) {
  const protocol::Config cfg = opt.to_config();
  const StrategyChoice choice =
      parse_strategy(opt.strategy_texts.empty() ? "honest" : opt.strategy_texts.front());

  auto strategy = adversary::by_name(choice.name, choice.param);
  const protocol::Transcript t = protocol::run_protocol(cfg, *strategy, opt.seed);
  auto fresh = adversary::by_name(choice.name, choice.param);
  const bool replay_ok = protocol::replay(t, *fresh);

  serialize::ordered_json rep;
  rep["command"] = "run";
  rep["seed"] = opt.seed;
  rep["config"] = serialize::config_json(cfg);
  rep["strategy"] = {{"name", choice.name}, {"param", choice.param}};
  rep["messages"] = t.messages.size();
  rep["decision"] = serialize::decision_json(t.decision);
  rep["replay_ok"] = replay_ok;

  std::cout << "run: strategy=" << choice.name << " seed=" << opt.seed << " branch="
            << rep["decision"]["branch"].get<std::string>()
            << " accept=" << (t.decision.accept ? "yes" : "no") << " bits="
            << t.decision.decoded_bits[0] << t.decision.decoded_bits[1]
            << " replay=" << (replay_ok ? "ok" : "MISMATCH") << "\n";

  write_report(opt.out_path,
               opt.format == "jsonl" ? serialize::transcript_jsonl(t) : json_text(rep));
  return 0;
}

int cmd_verify_gates(const Options& opt) {
  const std::array<mbqc::GateLabel, 8> labels = {
      mbqc::GateLabel::I, mbqc::GateLabel::S, mbqc::GateLabel::T, mbqc::GateLabel::Z,
      mbqc::GateLabel::X, mbqc::GateLabel::Y, mbqc::GateLabel::H, mbqc::GateLabel::CNOT};
  bool all_ok = true;
  serialize::ordered_json rows = serialize::ordered_json::array();
  for (mbqc::GateLabel g : labels) {
    const mbqc::VerifyReport r = mbqc::verify_unit_implements_gate(g);
    all_ok = all_ok && r.ok;
    rows.push_back({{"gate", mbqc::gate_name(g)},
                    {"branches", r.branches},
                    {"states_checked", r.states_checked},
                    {"max_deviation", r.max_deviation},
                    {"prob_sum_error", r.prob_sum_error},
                    {"ok", r.ok}});
    std::cout << "verify " << mbqc::gate_name(g) << ": branches=" << r.branches
              << " max_deviation=" << r.max_deviation << (r.ok ? " ok" : " FAIL") << "\n";
  }
  serialize::ordered_json rep;
  rep["command"] = "verify-gates";
  rep["rows"] = rows;
  rep["all_ok"] = all_ok;
  write_report(opt.out_path, json_text(rep));
  return all_ok ? 0 : 1;
}

int cmd_blindness(const Options& opt) {
  const qsim::DensityMatrix avg = analysis::average_input_density();
  double deviation = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const qsim::Amplitude ideal = r == c ? qsim::Amplitude{0.5, 0.0} : qsim::Amplitude{0.0, 0.0};
      deviation = std::max(deviation, std::abs(avg.at(r, c) - ideal));
    }
  }

  const protocol::Config cfg = opt.to_config();
  std::vector<long long> counts(8, 0);
  for (int i = 0; i < opt.trials; ++i) {
    auto strategy = adversary::honest();
    const protocol::Transcript t =
        protocol::run_protocol(cfg, *strategy, opt.seed + static_cast<std::uint64_t>(i));
    const auto c = analysis::sent_angle_counts(t);
    for (std::size_t k = 0; k < 8; ++k) counts[k] += c[k];
  }
  const double p = analysis::uniform_fit_p_value(counts);

  serialize::ordered_json rep;
  rep["command"] = "blindness";
  rep["seed"] = opt.seed;
  rep["config"] = serialize::config_json(cfg);
  rep["max_abs_deviation"] = deviation;
  rep["trials"] = opt.trials;
  rep["angle_counts"] = counts;
  rep["angle_uniform_p"] = p;

  const bool ok = deviation <= 1e-12 && p > 0.01;
  std::cout << "blindness: deviation=" << deviation << " angle_p=" << p
            << (ok ? " ok" : " FAIL") << "\n";
  write_report(opt.out_path, json_text(rep));
  return ok ? 0 : 1;
}

int cmd_bounds(const Options& opt) {
  const analysis::FeasibleRange range = analysis::epsilon_feasible_range();
  const bool endpoints_ok =
      std::abs(analysis::f_curve(range.lo)) <= 1e-5 && std::abs(analysis::f_curve(range.hi)) <= 1e-5;

  std::string contents;
  if (opt.format == "csv") {
    std::vector<double> qs, es;
    for (int i = 0; i <= 20; ++i) qs.push_back(i / 20.0);
    for (int i = 1; i <= 49; ++i) es.push_back(i / 50.0);
    contents = serialize::bounds_sweep_csv(qs, es);
  } else {
    serialize::ordered_json rep;
    rep["command"] = "bounds";
    rep["report"] = serialize::bound_report_json(analysis::make_bound_report(opt.q, opt.epsilon));
    rep["stationary"] = range.stationary;
    rep["minimum_value"] = range.minimum_value;
    serialize::ordered_json findings = serialize::ordered_json::array();
    for (const auto& f : analysis::consistency_report())
      findings.push_back({{"id", f.id}, {"magnitude", f.magnitude}, {"detail", f.detail}});
    rep["consistency"] = findings;
    contents = json_text(rep);
  }

  std::cout << "bounds: feasible_epsilon=[" << range.lo << ", " << range.hi
            << "] completeness(q=" << opt.q << ")=" << analysis::completeness_bound(opt.q)
            << (endpoints_ok ? " ok" : " FAIL") << "\n";
  write_report(opt.out_path, contents);
  return endpoints_ok ? 0 : 1;
}

int cmd_attack(const Options& opt) {
  const protocol::Config cfg = opt.to_config();

  std::vector<StrategyChoice> choices;
  choices.push_back({"honest", 0.0});
  for (const auto& text : opt.strategy_texts) {
    const StrategyChoice c = parse_strategy(text);
    if (c.name == "honest") continue;  // already first
    choices.push_back(c);
  }

  serialize::ordered_json rows = serialize::ordered_json::array();
  std::ostringstream csv;
  csv << std::setprecision(12);
  csv << "strategy,param,q,trials,accepts,rate,ci_low,ci_high\n";
  for (const auto& c : choices) {
    const analysis::AcceptanceEstimate est = analysis::estimate_acceptance(
        cfg, [&c] { return adversary::by_name(c.name, c.param); }, opt.trials, opt.seed);
    serialize::ordered_json row;
    row["strategy"] = c.name;
    row["param"] = c.param;
    row["q"] = cfg.q;
    row["estimate"] = serialize::acceptance_json(est);
    rows.push_back(row);
    csv << c.name << ',' << c.param << ',' << cfg.q << ',' << est.trials << ','
        << est.accepts << ',' << est.rate << ',' << est.ci_low << ',' << est.ci_high << '\n';
    std::cout << "attack " << c.name << (c.name == "flip_outcomes" ? "(p=" + std::to_string(c.param) + ")" : "")
              << ": rate=" << est.rate << " ci95=[" << est.ci_low << ", " << est.ci_high << "]\n";
  }

  if (opt.format == "csv") {
    write_report(opt.out_path, csv.str());
  } else {
    serialize::ordered_json rep;
    rep["command"] = "attack";
    rep["seed"] = opt.seed;
    rep["trials"] = opt.trials;
    rep["config"] = serialize::config_json(cfg);
    rep["rows"] = rows;
    write_report(opt.out_path, json_text(rep));
  }
  return 0;
}

int cmd_lattice(const Options& opt, bool circuit_given) {
  const mbqc::LatticeSpec spec = mbqc::build_lattice(opt.rows, opt.cols);
  const std::vector<mbqc::GateLabel> circuit =
      circuit_given ? parse_circuit(opt.circuit_text) : std::vector<mbqc::GateLabel>{};
  const serialize::ordered_json bundle = serialize::lattice_bundle_json(spec, circuit);
  std::cout << "lattice: " << opt.rows << "x" << opt.cols << " edges=" << spec.edges.size()
            << " units=" << circuit.size() << "\n";
  if (opt.out_path.empty())
    std::cout << bundle.dump(2) << "\n";
  else
    write_report(opt.out_path, json_text(bundle));
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"latticed-cluster blind computation workbench"};
  app.name("blindlattice");
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file supplying defaults for the flags below");

  Options opt;
  app.add_option("--circuit", opt.circuit_text, "comma-separated gate labels, e.g. H,T,CNOT");
  app.add_option("--input", opt.input_text, "two prep characters from 0/1/+/-");
  app.add_option("--strategy", opt.strategy_texts, "server strategy, name[:p=VALUE]; repeatable");
  app.add_option("--q", opt.q, "evaluate-branch probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--m1", opt.m1, "trap pair rows per round")->check(CLI::Range(1, 8));
  app.add_option("--trials", opt.trials, "Monte Carlo trials")->check(CLI::Range(1, 10000000));
  app.add_option("--seed", opt.seed, "root RNG seed")->envname("BLINDLATTICE_SEED");
  app.add_option("--expect", opt.expect, "expected top decision bit, -1 = derive")
      ->check(CLI::Range(-1, 1));
  app.add_option("--epsilon", opt.epsilon, "test-erosion parameter for bounds");
  app.add_option("--rows", opt.rows, "lattice rows");
  app.add_option("--cols", opt.cols, "lattice columns");
  app.add_option("--out", opt.out_path, "report file path");
  app.add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"json", "csv", "jsonl"}));

  // The flags above live on the root app so one --config file covers every
  // subcommand; fallthrough lets them appear after the subcommand name too.
  CLI::App* sub_run = app.add_subcommand("run", "execute one protocol instance");
  CLI::App* sub_verify = app.add_subcommand("verify-gates", "branch-verify all gate units");
  CLI::App* sub_blind = app.add_subcommand("blindness", "mixing identity and angle uniformity");
  CLI::App* sub_bounds = app.add_subcommand("bounds", "closed-form bound report or csv sweep");
  CLI::App* sub_attack = app.add_subcommand("attack", "acceptance table, honest vs strategies");
  CLI::App* sub_lattice = app.add_subcommand("lattice", "export lattice geometry and patterns");
  for (CLI::App* sub : {sub_run, sub_verify, sub_blind, sub_bounds, sub_attack, sub_lattice})
    sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e) == 0 ? 0 : 0;  // help/version print and leave
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (opt.format == "jsonl" && !sub_run->parsed())
      throw protocol::BadConfig("--format jsonl is only available for run");
    if (sub_run->parsed()) return cmd_run(opt);
    if (sub_verify->parsed()) return cmd_verify_gates(opt);
    if (sub_blind->parsed()) return cmd_blindness(opt);
    if (sub_bounds->parsed()) return cmd_bounds(opt);
    if (sub_attack->parsed()) return cmd_attack(opt);
    if (sub_lattice->parsed()) return cmd_lattice(opt, app.count("--circuit") > 0);
    std::cerr << "blindlattice: no subcommand selected\n";
    return 2;
  } catch (const ReportWriteError& e) {
    std::cerr << "blindlattice: " << e.what() << "\n";
    return 1;
  } catch (const protocol::BadConfig& e) {
    std::cerr << "blindlattice: " << e.what() << "\n";
    return 2;
  } catch (const mbqc::UnknownGate& e) {
    std::cerr << "blindlattice: " << e.what() << "\n";
    return 2;
  } catch (const mbqc::BadLattice& e) {
    std::cerr << "blindlattice: " << e.what() << "\n";
    return 2;
  } catch (const BadAngle& e) {
    std::cerr << "blindlattice: " << e.what() << "\n";
    return 2;
  } catch (const analysis::DomainError& e) {
    std::cerr << "blindlattice: " << e.what() << "\n";
    return 2;
  } catch (const analysis::SingularDenominator& e) {
    std::cerr << "blindlattice: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "blindlattice: internal error: " << e.what() << "\n";
    return 1;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args);
}

}  // namespace blindlattice::cli
