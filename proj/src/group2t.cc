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

#include "qudit2t/group2t.h"

#include <sstream>

namespace q2t {

std::string DyadicQuat::str() const {
  static const char* units[4] = {"1", "i", "j", "k"};
  const int num[4] = {a2, b2, c2, d2};
  std::ostringstream out;
  bool first = true;
  for (int t = 0; t < 4; t++) {
    if (num[t] == 0) continue;
    if (!first) {
      out << (num[t] > 0 ? "+" : "-");
    } else if (num[t] < 0) {
      out << "-";
    }
    const int mag = num[t] > 0 ? num[t] : -num[t];
    out << units[t];
    if (mag == 1) out << "/2";
    first = false;
  }
  if (first) out << "0";
  return out.str();
}

const Group2T& Group2T::instance() {
  static const Group2T g;
  return g;
}

Group2T::Group2T() {
  const DyadicQuat one = DyadicQuat::one();
  const DyadicQuat i = DyadicQuat::i();
  const DyadicQuat j = DyadicQuat::j();
  const DyadicQuat k = DyadicQuat::k();
  const DyadicQuat l = DyadicQuat::l();

  const std::array<DyadicQuat, 8> q8 = {one, j, i, k, -one, -j, -i, -k};
  DyadicQuat lp = one;  // l^s
  for (int s = 0; s < 3; s++) {
    for (int t = 0; t < 8; t++) {
      quats_[8 * s + t] = lp * q8[t];
      left_cosets_[s][t] = 8 * s + t;
    }
    lp = lp * l;
  }

  for (int a = 0; a < 24; a++) {
    for (int b = 0; b < 24; b++) {
      mult_[a][b] = index_of(quats_[a] * quats_[b]);
    }
  }
  for (int a = 0; a < 24; a++) {
    inv_[a] = index_of(quats_[a].conjugate());
  }

  // (-1)^m i^n j^p l^q
  for (int m = 0; m < 2; m++) {
    for (int n = 0; n < 2; n++) {
      for (int p = 0; p < 2; p++) {
        DyadicQuat base = one;
        if (m) base = -base;
        if (n) base = base * i;
        if (p) base = base * j;
        DyadicQuat v = base;
        for (int q = 0; q < 3; q++) {
          const int idx = index_of(v);
          decomp_lookup_[m][n][p][q] = idx;
          elements_[idx] = GroupElement{idx, m, n, p, q, v};
          v = v * l;
        }
      }
    }
  }

  const int l_idx = index_of(l);
  const int l2_idx = multiply(l_idx, l_idx);
  for (int t = 0; t < 8; t++) {
    right_cosets_[t] = {t, multiply(t, l_idx), multiply(t, l2_idx)};
    conj_l_[t] = multiply(multiply(l_idx, t), inverse(l_idx));
  }
}

int Group2T::index_of(const DyadicQuat& q) const {
  for (int idx = 0; idx < 24; idx++) {
    if (quats_[idx] == q) return idx;
  }
  throw std::domain_error("quaternion is not a 2T element");
}

int Group2T::from_decomposition(int m, int n, int p, int q) const {
  return decomp_lookup_[m][n][p][q];
}

std::string Group2T::label(int idx) const {
  static const char* q8_names[8] = {"+1", "+j", "+i", "+k", "-1", "-j", "-i", "-k"};
  const int s = idx / 8, t = idx % 8;
  std::string tag = q8_names[t];
  if (s == 1) return std::string("l*") + tag;
  if (s == 2) return std::string("l2*") + tag;
  return tag;
}

Eigen::Matrix2cd Group2T::matrix_rep(int idx) const {
  using cx = std::complex<double>;
  const DyadicQuat& v = quats_[idx];
  Eigen::Matrix2cd u;
  u << cx(v.a(), v.b()), cx(-v.c(), -v.d()),
       cx(v.c(), -v.d()), cx(v.a(), -v.b());
  return u;
}

void Group2T::write_mult_table_csv(std::ostream& out) const {
  out << "row,col,product\n";
  for (int a = 0; a < 24; a++) {
    for (int b = 0; b < 24; b++) {
      out << a << "," << b << "," << mult_[a][b] << "\n";
    }
  }
}

void Group2T::write_cosets_csv(std::ostream& out) const {
  out << "subgroup,coset,member,element,label\n";
  for (int s = 0; s < 3; s++) {
    for (int t = 0; t < 8; t++) {
      out << "Q8," << s << "," << t << "," << left_cosets_[s][t] << ","
          << label(left_cosets_[s][t]) << "\n";
    }
  }
  for (int t = 0; t < 8; t++) {
    for (int s = 0; s < 3; s++) {
      out << "Z3," << t << "," << s << "," << right_cosets_[t][s] << ","
          << label(right_cosets_[t][s]) << "\n";
    }
  }
}

}  // namespace q2t
