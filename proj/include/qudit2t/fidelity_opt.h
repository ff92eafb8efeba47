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

#ifndef QUDIT2T_FIDELITY_OPT_H
#define QUDIT2T_FIDELITY_OPT_H

#include <vector>

#include <Eigen/Dense>

#include "qudit2t/channels.h"
#include "qudit2t/codes.h"
#include "qudit2t/conic_solver.h"

namespace q2t {

// Index conventions: Choi matrices carry (input slow, output fast); the
// superoperator (Liouville) form acts on column-stacked operators.

Eigen::MatrixXcd choi_to_liouville(const Eigen::MatrixXcd& choi, int dim_in, int dim_out);
Eigen::MatrixXcd liouville_to_choi(const Eigen::MatrixXcd& l, int dim_in, int dim_out);

// Conjugate and exchange the two tensor factors: maps a Choi over
// (in slow, out fast) to a matrix over (out slow, in fast). Involution.
Eigen::MatrixXcd swapconj(const Eigen::MatrixXcd& choi, int dim_in, int dim_out);

// Choi matrix of rho -> V rho V^dag for an isometry V (columns orthonormal).
ChoiMatrix isometry_choi(const Eigen::MatrixXcd& v);

// Isometry Choi of a code: logical basis vectors carried into the given
// orthonormal frame of the code's constellation span.
ChoiMatrix encoding_choi(const Encoding& enc, const OrthoFrame& frame);

// Kraus operators (dim_out x dim_in) from the Choi eigendecomposition.
std::vector<Eigen::MatrixXcd> choi_kraus(const ChoiMatrix& c, double rel_tol = 1e-12);

// Superoperator / Kraus forms for either channel kind.
Eigen::MatrixXcd channel_liouville(const ChannelRep& ch);
std::vector<Eigen::MatrixXcd> channel_kraus(const ChannelRep& ch);
int channel_dim_in(const ChannelRep& ch);
int channel_dim_out(const ChannelRep& ch);

// Entanglement fidelity of a logical d -> d channel given its Choi matrix:
// overlap of the maximally entangled pair with its image, (1/d^2) sum over
// Kraus traces squared.
double fidelity_from_choi(const Eigen::MatrixXcd& logical_choi, int d);

struct FidelityInstance {
  ChoiMatrix encode;   // d -> channel input space
  ChannelRep noise;
  ChoiMatrix recover;  // channel output space -> d
  int d = 0;
};

// Two independent evaluation routes (superoperator composition vs explicit
// Kraus triple products); they agree to 1e-10 and are cross-checked in tests.
double entanglement_fidelity(const FidelityInstance& inst);
double entanglement_fidelity_kraus(const FidelityInstance& inst);

struct MapOptimum {
  ChoiMatrix map;
  double fidelity = 0.0;
  SolveDiagnostics diag;
  SolverState state;
};

// Best recovery (resp. encoding) for the other two maps held fixed: a single
// SDP, maximize Re Tr(M X) over CPTP Choi matrices, where M is the
// swapconj of the fixed composition's Choi scaled by 1/d^2.
MapOptimum optimal_recovery(const ChoiMatrix& encode, const ChannelRep& noise, int d,
                            const SolverSettings& settings = {},
                            const SolverState* warm = nullptr);
MapOptimum optimal_encoding(const ChoiMatrix& recover, const ChannelRep& noise, int d,
                            const SolverSettings& settings = {},
                            const SolverState* warm = nullptr);

struct AlternationResult {
  std::vector<double> trajectory;  // fidelity after each half-step (R, E, R, E, ...)
  ChoiMatrix encode;
  ChoiMatrix recover;
  int double_steps = 0;
  bool all_converged = true;
};

// Alternate recovery-then-encoding SDPs from a code seed, with warm starts
// and early stop once a double-step improves fidelity by less than
// `early_stop`.
AlternationResult alternate_optimize(const Encoding& seed, const ChannelRep& noise,
                                     int n_sdp = 20, const SolverSettings& settings = {},
                                     double early_stop = 1e-8);

struct DephasingFidelity {
  double fidelity = 0.0;
  double captured = 1.0;  // smallest codeword norm retained by the truncation
  int support_dim = 0;    // recovery input dimension after support restriction
  SolveDiagnostics diag;
};

// Fidelity of a code under dephasing at Fock truncation n_total: embeds the
// codewords without renormalizing (the dropped tail counts as error, so F is
// a lower bound that grows with n_total; at delta = 0 it equals the mean
// captured norm), restricts the recovery input to the numerically significant
// support of the noisy code, and optimizes the recovery map. Codes that never
// populate mode 2 are simulated on mode 1 alone (exact, the vacuum factor is
// dephasing-invariant); others use the two-mode rep with per-mode cap
// n_total/2. support_tol <= 0 disables the restriction.
DephasingFidelity fidelity_dephasing(const Encoding& enc, double delta, int n_total,
                                     const SolverSettings& settings = {},
                                     double min_captured = 0.99, double support_tol = 1e-10);

}  // namespace q2t

#endif
