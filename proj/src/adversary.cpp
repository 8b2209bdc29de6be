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

#include "blindlattice/adversary.hpp"

#include <random>
#include <set>
#include <utility>

namespace blindlattice::adversary {

using protocol::AngleList;
using protocol::BatchState;
using protocol::EntangleOrder;
using protocol::OutcomeList;
using protocol::QubitId;
using protocol::ServerStrategy;

std::vector<qsim::PrepSpec> uniform_state_pool() {
  std::vector<qsim::PrepSpec> pool;
  pool.push_back({qsim::PrepKind::Zero, Angle8(0)});
  pool.push_back({qsim::PrepKind::One, Angle8(0)});
  for (int k = 0; k < 8; ++k) pool.push_back({qsim::PrepKind::Plus, Angle8(k)});
  for (int k = 0; k < 8; ++k) pool.push_back({qsim::PrepKind::Minus, Angle8(k)});
  return pool;
}

namespace {

class FakeGraphStrategy final : public ServerStrategy {
 public:
  explicit FakeGraphStrategy(std::vector<qsim::PrepSpec> pool) : pool_(std::move(pool)) {
    if (pool_.empty()) throw protocol::BadConfig("fake_graph: empty replacement pool");
  }

  [[nodiscard]] std::string name() const override { return "fake_graph"; }

  void on_entangle(BatchState& batch, const EntangleOrder& order) override {
    substitute_new(batch);
    ServerStrategy::on_entangle(batch, order);
  }

  void on_h_order(BatchState& batch, const std::vector<QubitId>& positions) override {
    substitute_new(batch);
    ServerStrategy::on_h_order(batch, positions);
  }

  OutcomeList on_measure(BatchState& batch, const AngleList& angles) override {
    substitute_new(batch);
    return ServerStrategy::on_measure(batch, angles);
  }

 private:
  // Swap in a fresh sample for every qubit we have not touched yet. Later
  // arrivals (the second trap wave lands after entangling) get caught by
  // whichever hook fires next, before any gate or measurement reaches them.
  void substitute_new(BatchState& batch) {
    for (QubitId id : batch.held_unmeasured()) {
      if (seen_.count(id) != 0) continue;
      seen_.insert(id);
      batch.replace_qubit(id, draw());
    }
  }

  qsim::PrepSpec draw() {
    std::uniform_int_distribution<std::size_t> pick(0, pool_.size() - 1);
    return pool_[pick(rng_)];
  }

  std::vector<qsim::PrepSpec> pool_;
  std::set<QubitId> seen_;
};

class FlipOutcomesStrategy final : public ServerStrategy {
 public:
  explicit FlipOutcomesStrategy(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw protocol::BadConfig("flip_outcomes: p outside [0, 1]");
  }

  [[nodiscard]] std::string name() const override { return "flip_outcomes"; }

  OutcomeList on_measure(BatchState& batch, const AngleList& angles) override {
    OutcomeList out = ServerStrategy::on_measure(batch, angles);
    if (p_ > 0.0) {
      std::bernoulli_distribution flip(p_);
      for (int& bit : out.bits)
        if (flip(rng_)) bit ^= 1;
    }
    return out;
  }

 private:
  double p_;
};

class SkipEntangleStrategy final : public ServerStrategy {
 public:
  [[nodiscard]] std::string name() const override { return "skip_entangle"; }

  void on_entangle(BatchState&, const EntangleOrder&) override {}
};

}  // namespace

std::unique_ptr<ServerStrategy> honest() { return std::make_unique<ServerStrategy>(); }

std::unique_ptr<ServerStrategy> fake_graph() { return fake_graph(uniform_state_pool()); }

std::unique_ptr<ServerStrategy> fake_graph(std::vector<qsim::PrepSpec> pool) {
  return std::make_unique<FakeGraphStrategy>(std::move(pool));
}

std::unique_ptr<ServerStrategy> flip_outcomes(double p) {
  return std::make_unique<FlipOutcomesStrategy>(p);
}

std::unique_ptr<ServerStrategy> skip_entangle() { return std::make_unique<SkipEntangleStrategy>(); }

std::unique_ptr<ServerStrategy> by_name(const std::string& name, double param) {
  if (name == "honest") return honest();
  if (name == "fake_graph") return fake_graph();
  if (name == "fake_graph_zero")
    return fake_graph({qsim::PrepSpec{qsim::PrepKind::Zero, Angle8(0)}});
  if (name == "flip_outcomes") return flip_outcomes(param);
  if (name == "skip_entangle") return skip_entangle();
  throw protocol::BadConfig("unknown strategy: " + name);
}

}  // namespace blindlattice::adversary
