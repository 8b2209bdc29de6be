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

// Reference linear algebra for the tests. Deliberately naive and written
// against matrices directly so it shares no code paths with the library.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracles {

using C = std::complex<double>;
using Mat = std::vector<C>;  // row-major n x n
using Vec = std::vector<C>;

inline constexpr double kPi = std::numbers::pi;

inline Mat mat_mul(const Mat& a, const Mat& b, std::size_t n) {
  Mat out(n * n, C(0, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a[i * n + k] * b[k * n + j];
  return out;
}

inline Mat kron(const Mat& a, std::size_t na, const Mat& b, std::size_t nb) {
  const std::size_t n = na * nb;
  Mat out(n * n);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l)
          out[(i * nb + k) * n + (j * nb + l)] = a[i * na + j] * b[k * nb + l];
  return out;
}

inline Mat scaled(C s, Mat m) {
  for (auto& v : m) v *= s;
  return m;
}

inline Vec mat_vec(const Mat& m, const Vec& v) {
  const std::size_t n = v.size();
  Vec out(n, C(0, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += m[i * n + j] * v[j];
  return out;
}

inline double mat_dist(const Mat& a, const Mat& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// max |a - e^{i phi} b| minimized over the global phase phi.
inline double mat_dist_phase(const Mat& a, const Mat& b) {
  C ip(0, 0);
  double bn = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ip += std::conj(b[i]) * a[i];
    bn += std::norm(b[i]);
  }
  if (std::abs(ip) < 1e-300) return mat_dist(a, b);
  const C phase = ip / std::abs(ip);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - phase * b[i]));
  (void)bn;
  return d;
}

inline Mat eye2() { return {1, 0, 0, 1}; }
inline Mat pauli_x() { return {0, 1, 1, 0}; }
inline Mat pauli_y() { return {0, C(0, -1), C(0, 1), 0}; }
inline Mat pauli_z() { return {1, 0, 0, -1}; }
inline Mat hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  return {s, s, s, -s};
}
inline Mat phase_s() { return {1, 0, 0, C(0, 1)}; }
inline Mat phase_t() { return {1, 0, 0, std::polar(1.0, kPi / 4)}; }
inline Mat rz(double th) { return {std::polar(1.0, -th / 2), 0, 0, std::polar(1.0, th / 2)}; }
inline Mat rx(double th) {
  const C c = std::cos(th / 2);
  const C s = C(0, -std::sin(th / 2));
  return {c, s, s, c};
}
inline Mat cz4() {
  Mat m(16, C(0, 0));
  m[0] = m[5] = m[10] = 1;
  m[15] = -1;
  return m;
}
inline Mat cnot4() {
  Mat m(16, C(0, 0));
  m[0] = m[5] = 1;
  m[2 * 4 + 3] = 1;
  m[3 * 4 + 2] = 1;
  return m;
}

inline Vec random_state(int num_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(std::size_t{1} << num_qubits);
  double n2 = 0.0;
  for (auto& a : v) {
    a = C(g(rng), g(rng));
    n2 += std::norm(a);
  }
  const double s = 1.0 / std::sqrt(n2);
  for (auto& a : v) a *= s;
  return v;
}

inline double vec_dist_phase(const Vec& a, const Vec& b) {
  C ip(0, 0);
  for (std::size_t i = 0; i < a.size(); ++i) ip += std::conj(b[i]) * a[i];
  if (std::abs(ip) < 1e-300) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  }
  const C phase = ip / std::abs(ip);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - phase * b[i]));
  return d;
}

// Eigenvalues of a Hermitian 2x2 matrix, closed form.
inline std::pair<double, double> herm2_eigs(const Mat& m) {
  const double a = m[0].real();
  const double d = m[3].real();
  const double tr = a + d;
  const double det = (m[0] * m[3] - m[1] * m[2]).real();
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  return {tr / 2 - disc, tr / 2 + disc};
}

}  // namespace oracles
