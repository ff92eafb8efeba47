// Copyright 2026 The qudit2t Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUDIT2T_QUATERNION_H
#define QUDIT2T_QUATERNION_H

#include <cstdint>
#include <stdexcept>
#include <string>

namespace q2t {

// Quaternion with all four coefficients integer multiples of 1/2, stored as
// numerators over a fixed denominator of 2. This covers the 24 unit
// quaternions of the binary tetrahedral group exactly, so group arithmetic
// never touches floating point.
struct DyadicQuat {
  int a2 = 0;  // scalar part * 2
  int b2 = 0;  // i part * 2
  int c2 = 0;  // j part * 2
  int d2 = 0;  // k part * 2

  constexpr DyadicQuat() = default;
  constexpr DyadicQuat(int a2_, int b2_, int c2_, int d2_)
      : a2(a2_), b2(b2_), c2(c2_), d2(d2_) {}

  static constexpr DyadicQuat one() { return {2, 0, 0, 0}; }
  static constexpr DyadicQuat i() { return {0, 2, 0, 0}; }
  static constexpr DyadicQuat j() { return {0, 0, 2, 0}; }
  static constexpr DyadicQuat k() { return {0, 0, 0, 2}; }
  // Order-3 generator l = -(1 + i + j + k) / 2.
  static constexpr DyadicQuat l() { return {-1, -1, -1, -1}; }

  friend constexpr auto operator<=>(const DyadicQuat&, const DyadicQuat&) = default;

  constexpr DyadicQuat operator-() const { return {-a2, -b2, -c2, -d2}; }

  constexpr DyadicQuat conjugate() const { return {a2, -b2, -c2, -d2}; }

  // 4 * |q|^2; unit quaternions have norm4() == 4.
  constexpr int norm4() const { return a2 * a2 + b2 * b2 + c2 * c2 + d2 * d2; }
  constexpr bool is_unit() const { return norm4() == 4; }

  // Hamilton product. The numerators of the product are over 4; products of
  // group elements always land back on half-integers, which is enforced here.
  DyadicQuat operator*(const DyadicQuat& y) const {
    const int ra4 = a2 * y.a2 - b2 * y.b2 - c2 * y.c2 - d2 * y.d2;
    const int rb4 = a2 * y.b2 + b2 * y.a2 + c2 * y.d2 - d2 * y.c2;
    const int rc4 = a2 * y.c2 - b2 * y.d2 + c2 * y.a2 + d2 * y.b2;
    const int rd4 = a2 * y.d2 + b2 * y.c2 - c2 * y.b2 + d2 * y.a2;
    if ((ra4 | rb4 | rc4 | rd4) & 1) {
      throw std::domain_error("DyadicQuat product left the half-integer lattice");
    }
    return {ra4 / 2, rb4 / 2, rc4 / 2, rd4 / 2};
  }

  constexpr double a() const { return a2 / 2.0; }
  constexpr double b() const { return b2 / 2.0; }
  constexpr double c() const { return c2 / 2.0; }
  constexpr double d() const { return d2 / 2.0; }

  std::string str() const;
};

}  // namespace q2t

#endif
