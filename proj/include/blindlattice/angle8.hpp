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

#include <numbers>
#include <stdexcept>

namespace blindlattice {

struct BadAngle : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Angle on the discrete eight-point grid {k * pi/4 : k = 0..7}.
// All protocol-level angle arithmetic happens mod 2*pi on this grid.
struct Angle8 {
  int k = 0;

  constexpr Angle8() = default;
  constexpr explicit Angle8(int kk) : k(((kk % 8) + 8) % 8) {}

  [[nodiscard]] double radians() const { return k * std::numbers::pi / 4.0; }

  friend constexpr Angle8 operator+(Angle8 a, Angle8 b) { return Angle8(a.k + b.k); }
  friend constexpr Angle8 operator-(Angle8 a, Angle8 b) { return Angle8(a.k - b.k); }
  friend constexpr bool operator==(Angle8 a, Angle8 b) { return a.k == b.k; }

  [[nodiscard]] constexpr Angle8 negated() const { return Angle8(-k); }
};

// Parses a multiple of pi/4 given in radians; rejects off-grid values.
Angle8 angle8_from_radians(double theta);

}  // namespace blindlattice
