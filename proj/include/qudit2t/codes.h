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

#ifndef QUDIT2T_CODES_H
#define QUDIT2T_CODES_H

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qudit2t/constellation.h"

namespace q2t {

// d orthonormal logical states written as coefficient columns over a
// (generally non-orthogonal) constellation basis. The defining invariant is
// coeffs^dag * basis.gram * coeffs = I_d.
struct Encoding {
  int d = 0;
  StateBasis basis;
  Eigen::MatrixXcd coeffs;  // basis.size() x d
  std::string label;
  double alpha = 0.0;
  // Basis-state permutation of the code's cyclic gate (state s maps to state
  // gate_perm[s]); empty for codes without one.
  std::vector<int> gate_perm;

  bool has_gate() const { return !gate_perm.empty(); }
  // coeffs^dag * gram * coeffs, identity up to numerical error.
  Eigen::MatrixXcd logical_gram() const;
};

// Closed-form data for the eight-codeword Gram of the 2T code: the three
// distinct entries, the four eigenvalues with multiplicities (1,2,2,3), and
// the logical-state normalizations.
struct QuoctitSpectrum {
  cxd rho{0.0, 0.0};
  cxd tau{0.0, 0.0};
  cxd chi{0.0, 0.0};
  double lambda1 = 0.0;  // multiplicity 1
  double lambda2 = 0.0;  // multiplicity 2
  double lambda3 = 0.0;  // multiplicity 2
  double lambda4 = 0.0;  // multiplicity 3
  // Gram eigenvalue of logical state n. Entries 1..4 carry the signed
  // (not magnitude-sorted) eigenvalues of the two twofold sectors, so the
  // array stays continuous in alpha even where lambda2/lambda3 cross.
  std::array<double, 8> logical_eigenvalue{};
  // nu[n]^2 = eta-norm squared of the unnormalized logical vector n.
  std::array<double, 8> nu{};
};

QuoctitSpectrum quoctit_spectrum(double alpha);

// The 8x8 codeword Gram assembled from the closed-form rho/tau/chi pattern.
Eigen::MatrixXcd quoctit_gram_analytic(double alpha);

// Closed form for the norms of the four twofold-sector logical vectors;
// sa, sb, sc in {-1,+1} pick the three sign slots (sa on the 1, sb on the
// sqrt(3) multiplying sin, sc on the sqrt(3) inside the sinh bracket).
double quoctit_nu_abc(double alpha, int sa, int sb, int sc);

// 0/1 indicator columns over the canonical 24-state basis. Qutrit codewords
// are the three left-coset blocks l^n * Q8; quoctit codewords are the eight
// right cosets q * {1, l, l^2} in canonical Q8 order.
Eigen::MatrixXcd qutrit_codewords();
Eigen::MatrixXcd quoctit_codewords();

// d=3 code: Fourier combinations of the left-coset codewords, normalized
// from the numeric codeword Gram.
Encoding qutrit_logical(double alpha);

// d=8 code: eigenbasis of the codeword Gram, with degenerate-eigenspace
// directions fixed by fixed seed vectors (projected and re-orthonormalized).
Encoding quoctit_logical(double alpha);

// The unnormalized seed vectors over the eight codewords, columns 0..7.
// Exact Gram eigenvectors for every alpha.
Eigen::MatrixXcd quoctit_seed_vectors();

// d-dimensional code on the d*n-point circle constellation: logical k is the
// Fourier-weighted sum over all d*n states with weight exp(2*pi*i*l*k/d),
// an exact eigenstate of the 2*pi/(d*n) rotation.
Encoding psk_encoding(int d, int n, double alpha);

// d Gram-orthonormal states drawn isotropically from the span of the basis,
// deterministic in the seed. Throws when d exceeds the numerical rank.
Encoding random_encoding(int d, const StateBasis& basis, std::uint64_t seed);

// Permutation of the 24 canonical states under left multiplication by l
// (the passive two-mode gate): state s maps to state perm[s].
std::vector<int> gate_perm_2t();

// Apply the gate to a coefficient vector over the encoding's basis.
Eigen::VectorXcd apply_gate(const Encoding& enc, const Eigen::VectorXcd& x);

// d x d matrix of the gate in the logical basis, entries <m|U|n>.
Eigen::MatrixXcd logical_gate(const Encoding& enc);

// Shorthand: logical_gate(quoctit_logical(alpha)). Unitary, block-diagonal
// with blocks (1,2,2,3), and cubes to the identity.
Eigen::MatrixXcd logical_U8(double alpha);

// JSON dump (states, coefficient matrix, label, alpha) for harness reuse.
void write_encoding_json(const Encoding& enc, std::ostream& out);

}  // namespace q2t

#endif
