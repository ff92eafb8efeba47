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

#ifndef QUDIT2T_CONSTELLATION_H
#define QUDIT2T_CONSTELLATION_H

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace q2t {

using cxd = std::complex<double>;

// Two-mode coherent product state |alpha1>|alpha2>.
struct ConstellationState {
  cxd alpha1{0.0, 0.0};
  cxd alpha2{0.0, 0.0};
  std::string tag;
};

// <a|b> for single-mode coherent states.
cxd coherent_overlap(cxd a, cxd b);
cxd two_mode_overlap(const ConstellationState& x, const ConstellationState& y);

// Finite set of two-mode coherent states together with its Gram matrix.
struct StateBasis {
  std::vector<ConstellationState> states;
  Eigen::MatrixXcd gram;

  int size() const { return static_cast<int>(states.size()); }
  // Same states with all amplitudes scaled by `factor` (e.g. sqrt(1-gamma)).
  StateBasis damped(double factor) const;
};

StateBasis make_basis(std::vector<ConstellationState> states);

// The 24-state constellation of the binary tetrahedral group at amplitude
// alpha: element a+bi+cj+dk maps to |(a+bi)alpha>|(c-di)alpha>, listed in the
// canonical group order.
StateBasis group2t_constellation(double alpha);

// d*n coherent states on the circle of radius alpha (single mode, second
// mode in vacuum), state t at phase 2*pi*t/(d*n).
StateBasis psk_constellation(int d, int n, double alpha);

// Orthonormal frame for the span of a possibly linearly dependent,
// non-orthogonal state set, from the Gram eigendecomposition. Directions with
// eigenvalue below rel_tol * lambda_max are dropped.
//
//   to_frame   (rank x n): coefficient vector -> orthonormal components
//   from_frame (n x rank): orthonormal components -> min-norm coefficients
//
// Column i of to_frame holds the frame components of basis state i, and
// from_frame is also the pseudo-inverse of that state-column matrix.
struct OrthoFrame {
  Eigen::MatrixXcd to_frame;
  Eigen::MatrixXcd from_frame;
  Eigen::VectorXd kept_eigenvalues;
  int rank = 0;
  double rel_tol = 0.0;
};

OrthoFrame orthonormalize(const Eigen::MatrixXcd& gram, double rel_tol = 1e-12);
OrthoFrame orthonormalize(const StateBasis& basis, double rel_tol = 1e-12);

// Two-mode Fock index set {(n1,n2): n1+n2 <= n_total, n1 <= cap1, n2 <= cap2}.
struct FockBasis {
  int n_total = 0;
  int cap1 = 0;
  int cap2 = 0;
  std::vector<std::pair<int, int>> levels;

  static FockBasis total_photon(int n_total);           // caps = n_total
  static FockBasis per_mode_capped(int n_total);        // caps = n_total / 2
  static FockBasis single_mode(int n_max);              // cap2 = 0
  int size() const { return static_cast<int>(levels.size()); }
  int index_of(int n1, int n2) const;  // -1 when outside the set
};

struct FockVector {
  Eigen::VectorXcd coeff;
  // Norm^2 retained inside the truncated index set (exact state has norm 1).
  double captured_norm = 0.0;
};

FockVector to_fock(const ConstellationState& s, const FockBasis& basis);

}  // namespace q2t

#endif
