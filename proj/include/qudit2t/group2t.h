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

#ifndef QUDIT2T_GROUP2T_H
#define QUDIT2T_GROUP2T_H

#include <array>
#include <complex>
#include <cstdint>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "qudit2t/quaternion.h"

namespace q2t {

// Element of the binary tetrahedral group 2T = Z3 x| Q8, 24 unit quaternions.
// `index` is the canonical position 0..23; (m, n, p, q) is the generator
// decomposition (-1)^m i^n j^p l^q with m, n, p in {0,1} and q in {0,1,2}.
struct GroupElement {
  int index = 0;
  int m = 0, n = 0, p = 0, q = 0;
  DyadicQuat quat;
};

// Precomputed tables for 2T. Canonical element order: the quaternion group
// Q8 as {+1, +j, +i, +k, -1, -j, -i, -k} (indices 0..7), then the left
// cosets l*Q8 (8..15) and l^2*Q8 (16..23) in the same Q8 order.
class Group2T {
 public:
  static constexpr int kOrder = 24;
  static constexpr int kQ8Order = 8;

  static const Group2T& instance();

  const DyadicQuat& quat(int idx) const { return quats_[idx]; }
  const GroupElement& element(int idx) const { return elements_[idx]; }
  int index_of(const DyadicQuat& q) const;
  int multiply(int a, int b) const { return mult_[a][b]; }
  int inverse(int a) const { return inv_[a]; }
  int from_decomposition(int m, int n, int p, int q) const;
  std::string label(int idx) const;

  // 2x2 unitary representation a+bi+cj+dk -> [[a+bi, -c-di], [c-di, a-bi]].
  Eigen::Matrix2cd matrix_rep(int idx) const;

  // Left cosets l^s * Q8, each row in canonical Q8 order. Row s holds
  // indices 8*s..8*s+7 by construction.
  const std::array<std::array<int, 8>, 3>& left_cosets_q8() const { return left_cosets_; }
  // Right cosets q * {1, l, l^2} of the Z3 subgroup, one per Q8 element,
  // rows in canonical Q8 order.
  const std::array<std::array<int, 3>, 8>& right_cosets_z3() const { return right_cosets_; }

  // Conjugation by l restricted to Q8: the 3-cycle i -> j -> k -> i (and the
  // negatives), fixing +-1. Returned as canonical indices.
  int conj_by_l(int q8_idx) const { return conj_l_[q8_idx]; }

  void write_mult_table_csv(std::ostream& out) const;
  void write_cosets_csv(std::ostream& out) const;

 private:
  Group2T();
  std::array<DyadicQuat, 24> quats_;
  std::array<GroupElement, 24> elements_;
  std::array<std::array<int, 24>, 24> mult_;
  std::array<int, 24> inv_;
  std::array<std::array<int, 8>, 3> left_cosets_;
  std::array<std::array<int, 3>, 8> right_cosets_;
  std::array<int, 8> conj_l_;
  int decomp_lookup_[2][2][2][3];
};

}  // namespace q2t

#endif
