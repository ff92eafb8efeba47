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

#ifndef QUDIT2T_CHANNELS_H
#define QUDIT2T_CHANNELS_H

#include <vector>

#include <Eigen/Dense>

#include "qudit2t/constellation.h"

namespace q2t {

enum class ChannelKind { kPureLoss, kDephasing, kComposed };

// Noise channel in one of two concrete representations.
//
// Pure loss acts exactly on the span of a coherent-state basis: the dyad
// |b_i><b_j| picks up the closed-form weight
//   c_ij = exp(gamma * (<b_j, b_i> - (E_i + E_j) / 2))
// and maps to the damped dyad (amplitudes scaled by sqrt(1-gamma)). The
// superoperator is carried between the orthonormal frames of the input span
// and of the damped span.
//
// Dephasing acts on a truncated Fock index set as a Schur multiplier:
// density-matrix entry (I, J) is scaled by schur(I, J), the product over
// modes of exp(-delta * (m - n)^2 / 2).
struct ChannelRep {
  ChannelKind kind = ChannelKind::kPureLoss;
  double gamma = 0.0;
  double delta = 0.0;
  int n_modes = 2;

  // Pure loss.
  StateBasis in_basis;
  StateBasis out_basis;
  OrthoFrame in_frame;
  OrthoFrame out_frame;
  Eigen::MatrixXcd dyad_weights;

  // Dephasing.
  FockBasis fock;
  Eigen::MatrixXd schur;
};

// Per-photon-number action of single-mode loss on |beta>:
// K_l |beta> = weights(l) * |sqrt(1-gamma) beta>.
struct CoherentLossAction {
  cxd damped{0.0, 0.0};
  Eigen::VectorXcd weights;
};

CoherentLossAction loss_on_coherent(cxd beta, double gamma, int lmax = 40);

// Exact two-mode pure-loss superoperator on span(basis) -> span(damped).
ChannelRep loss_superop(const StateBasis& basis, double gamma);

// Two-mode dephasing on the per-mode-capped index set of n_total photons.
ChannelRep dephasing_fock(int n_total, double delta);

// Single-mode dephasing on levels 0..n_max.
ChannelRep dephasing_single_mode(int n_max, double delta);

// Product channel N (x) N on both modes. A single-mode dephasing multiplier
// becomes the two-mode product multiplier; span-based loss already encodes
// the two-mode product in its closed form and passes through unchanged.
ChannelRep compose_two_mode(const ChannelRep& ch);

struct NoiseRates {
  double gamma = 0.0;
  double delta = 0.0;
};

// gamma = 1 - exp(-T/T1), delta = T/Tphi.
NoiseRates lifetimes_to_rates(double T, double T1, double Tphi);

// Apply the channel to an operator: frame coordinates (r_in x r_in ->
// r_out x r_out) for loss, Fock-level coordinates for dephasing.
Eigen::MatrixXcd apply_channel(const ChannelRep& ch, const Eigen::MatrixXcd& x);

// Column-stacked superoperator matrix (r_out^2 x r_in^2) of a loss channel.
Eigen::MatrixXcd loss_liouville(const ChannelRep& ch);

// Kraus operators of a loss channel between the two frames, from the
// eigendecomposition of the dyad-weight matrix.
std::vector<Eigen::MatrixXcd> loss_kraus_frame(const ChannelRep& ch);

}  // namespace q2t

#endif
