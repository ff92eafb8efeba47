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

#ifndef QUDIT2T_CONIC_SOLVER_H
#define QUDIT2T_CONIC_SOLVER_H

#include <vector>

#include <Eigen/Dense>

namespace q2t {

// Composite indices throughout follow i = fast + dim_fast * slow.

// Trace out one tensor factor of an (dim_slow*dim_fast) square matrix:
// subsystem 0 removes the slow (first) factor, 1 the fast (second).
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& x, int traced_subsystem, int dim_slow,
                               int dim_fast);

// Frobenius-nearest positive semidefinite matrix (Hermitian part, eigenvalues
// clipped at zero). Idempotent.
Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& m);

// Channel in state-operator correspondence form: m is PSD over
// (input (x) output) with the output index fast, and trace preservation reads
// partial_trace(m, 1) = identity on the input.
struct ChoiMatrix {
  Eigen::MatrixXcd m;
  int dim_in = 0;
  int dim_out = 0;
};

// maximize Re Tr(objective * X)  over  X >= 0,
// partial_trace(X, traced_subsystem) = identity on the other factor.
struct SdpProblem {
  Eigen::MatrixXcd objective;  // Hermitian, (dim_slow*dim_fast) square
  int dim_slow = 0;
  int dim_fast = 0;
  int traced_subsystem = 0;
};

struct SolverSettings {
  double sigma = 1.0;  // splitting penalty parameter
  double tol = 1e-7;   // primal and dual residual tolerance
  int max_iter = 50000;
  double over_relax = 1.5;
  int sigma_update_every = 50;
  int trajectory_stride = 50;
};

struct SolveDiagnostics {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  std::vector<double> objective_trajectory;
};

// Full splitting state; feed a previous solve's state back in to resume or to
// chase a slightly perturbed objective (alternating optimization).
struct SolverState {
  Eigen::MatrixXcd z;
  Eigen::MatrixXcd u;
  double sigma = 1.0;
};

struct SdpSolution {
  Eigen::MatrixXcd x;  // affine constraint holds exactly, PSD within tol
  double objective = 0.0;
  SolveDiagnostics diag;
  SolverState state;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SolverSettings& settings = {},
                      const SolverState* warm_start = nullptr);

// Feasible starting state for the channel problems above (traced_subsystem
// = 1), built from the objective alone: the transpose channel of the CP map
// the objective is the Choi matrix of. For weak noise this sits within
// O(infidelity) of the optimum (Barnum-Knill), which cuts the iteration count
// of near-identity solves by an order of magnitude versus the maximally-mixed
// cold start.
SolverState transpose_channel_state(const SdpProblem& problem, double sigma);

}  // namespace q2t

#endif
