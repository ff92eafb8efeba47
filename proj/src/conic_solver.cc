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

#include "qudit2t/conic_solver.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace q2t {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

MatrixXcd partial_trace(const MatrixXcd& x, int traced_subsystem, int dim_slow, int dim_fast) {
  if (dim_slow < 1 || dim_fast < 1 || x.rows() != dim_slow * dim_fast || x.rows() != x.cols()) {
    throw std::invalid_argument("partial_trace: dims do not factor the matrix");
  }
  if (traced_subsystem == 0) {
    MatrixXcd r = MatrixXcd::Zero(dim_fast, dim_fast);
    for (int a = 0; a < dim_slow; a++) {
      r += x.block(a * dim_fast, a * dim_fast, dim_fast, dim_fast);
    }
    return r;
  }
  if (traced_subsystem == 1) {
    MatrixXcd r(dim_slow, dim_slow);
    for (int a = 0; a < dim_slow; a++) {
      for (int b = 0; b < dim_slow; b++) {
        r(a, b) = x.block(a * dim_fast, b * dim_fast, dim_fast, dim_fast).trace();
      }
    }
    return r;
  }
  throw std::invalid_argument("partial_trace: subsystem must be 0 or 1");
}

MatrixXcd project_psd(const MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("project_psd: not square");
  const MatrixXcd herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(herm);
  const VectorXd& evals = es.eigenvalues();  // ascending
  const int n = int(evals.size());
  int n_neg = 0;
  while (n_neg < n && evals(n_neg) < 0.0) n_neg++;
  // Rebuild from whichever spectral side is smaller.
  if (n_neg <= n - n_neg) {
    if (n_neg == 0) return herm;
    const MatrixXcd vneg = es.eigenvectors().leftCols(n_neg);
    return herm - vneg * evals.head(n_neg).asDiagonal() * vneg.adjoint();
  }
  const MatrixXcd vpos = es.eigenvectors().rightCols(n - n_neg);
  return vpos * evals.tail(n - n_neg).asDiagonal() * vpos.adjoint();
}

namespace {

// Orthogonal projection onto {X : Tr_traced X = I}; the correction lives in
// the range of the partial-trace adjoint (identity on the traced factor).
MatrixXcd project_affine(const MatrixXcd& x, const SdpProblem& p) {
  const int kept = p.traced_subsystem == 0 ? p.dim_fast : p.dim_slow;
  const int traced = p.traced_subsystem == 0 ? p.dim_slow : p.dim_fast;
  MatrixXcd dev = partial_trace(x, p.traced_subsystem, p.dim_slow, p.dim_fast);
  dev.diagonal().array() -= 1.0;
  dev /= double(traced);
  MatrixXcd out = x;
  if (p.traced_subsystem == 0) {
    for (int a = 0; a < p.dim_slow; a++) {
      out.block(a * p.dim_fast, a * p.dim_fast, p.dim_fast, p.dim_fast) -= dev;
    }
  } else {
    for (int a = 0; a < kept; a++) {
      for (int b = 0; b < kept; b++) {
        out.block(a * p.dim_fast, b * p.dim_fast, p.dim_fast, p.dim_fast)
            .diagonal()
            .array() -= dev(a, b);
      }
    }
  }
  return out;
}

double re_tr_prod(const MatrixXcd& c, const MatrixXcd& x) {
  return c.cwiseProduct(x.transpose()).sum().real();
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SolverSettings& s, const SolverState* warm_start) {
  const int n = p.dim_slow * p.dim_fast;
  if (n < 1 || p.objective.rows() != n || p.objective.cols() != n) {
    throw std::invalid_argument("solve_sdp: objective does not match dims");
  }
  if (s.tol <= 0.0 || s.max_iter < 1 || s.sigma <= 0.0) {
    throw std::invalid_argument("solve_sdp: bad settings");
  }
  const MatrixXcd c = 0.5 * (p.objective + p.objective.adjoint());
  const int traced = p.traced_subsystem == 0 ? p.dim_slow : p.dim_fast;

  const bool warm = warm_start && warm_start->z.rows() == n && warm_start->u.rows() == n;
  double sigma = warm ? std::clamp(warm_start->sigma, 1e-6, 1e6) : s.sigma;
  MatrixXcd z = warm ? MatrixXcd(0.5 * (warm_start->z + warm_start->z.adjoint()))
                     : MatrixXcd(MatrixXcd::Identity(n, n) / double(traced));
  MatrixXcd u = warm ? MatrixXcd(0.5 * (warm_start->u + warm_start->u.adjoint()))
                     : MatrixXcd(MatrixXcd::Zero(n, n));
  MatrixXcd x = z;

  SdpSolution sol;
  double r_norm = 0.0, s_norm = 0.0;
  int it = 0;
  for (it = 1; it <= s.max_iter; it++) {
    x = project_affine(z - u + c / sigma, p);
    const MatrixXcd x_relaxed = s.over_relax * x + (1.0 - s.over_relax) * z;
    const MatrixXcd z_prev = z;
    z = project_psd(x_relaxed + u);
    u += x_relaxed - z;

    r_norm = (x - z).norm();
    s_norm = sigma * (z - z_prev).norm();
    if (it % s.trajectory_stride == 0) {
      sol.diag.objective_trajectory.push_back(re_tr_prod(c, z));
    }
    const double r_scale = std::max({1.0, x.norm(), z.norm()});
    const double s_scale = std::max(1.0, sigma * u.norm());
    if (r_norm <= s.tol * r_scale && s_norm <= s.tol * s_scale) {
      sol.diag.converged = true;
      break;
    }
    if (s.sigma_update_every > 0 && it % s.sigma_update_every == 0) {
      if (r_norm > 10.0 * s_norm && sigma < 1e6) {
        sigma *= 2.0;
        u *= 0.5;
      } else if (s_norm > 10.0 * r_norm && sigma > 1e-6) {
        sigma *= 0.5;
        u *= 2.0;
      }
    }
  }
  sol.diag.iterations = std::min(it, s.max_iter);
  sol.diag.primal_residual = r_norm;
  sol.diag.dual_residual = s_norm;
  sol.x = project_affine(z, p);
  sol.objective = re_tr_prod(c, sol.x);
  sol.state = {std::move(z), std::move(u), sigma};
  return sol;
}

SolverState transpose_channel_state(const SdpProblem& p, double sigma) {
  const int slow = p.dim_slow, fast = p.dim_fast;
  const int n = slow * fast;
  if (n < 1 || p.objective.rows() != n || p.objective.cols() != n || p.traced_subsystem != 1 ||
      sigma <= 0.0) {
    throw std::invalid_argument("transpose_channel_state: unsupported problem shape");
  }
  const MatrixXcd c = 0.5 * (p.objective + p.objective.adjoint());
  // The objective is (a positive multiple of) the Choi matrix of a CP map G
  // from the slow to the fast factor; nu = G^dag(identity) is its partial
  // trace. The scale drops out of the whole construction.
  const MatrixXcd nu = partial_trace(c, 1, slow, fast);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (nu + nu.adjoint()));
  const double cut = 1e-12 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  MatrixXcd w = MatrixXcd::Zero(slow, slow);   // nu^{-1/2} on the support
  MatrixXcd pi = MatrixXcd::Zero(slow, slow);  // support projector
  for (int k = 0; k < slow; k++) {
    if (es.eigenvalues()(k) <= cut) continue;
    const Eigen::VectorXcd v = es.eigenvectors().col(k);
    w += v * v.adjoint() / std::sqrt(es.eigenvalues()(k));
    pi += v * v.adjoint();
  }
  // z = Choi of x -> G(nu^{-1/2} x nu^{-1/2}), trace preserving by the choice
  // of nu, plus a depolarizing completion for inputs off the support of nu.
  MatrixXcd k1 = MatrixXcd::Zero(n, n);  // kron(conj(w), identity_fast)
  for (int al = 0; al < slow; al++) {
    for (int a = 0; a < slow; a++) {
      const std::complex<double> wc = std::conj(w(al, a));
      if (wc == std::complex<double>(0.0, 0.0)) continue;
      for (int b = 0; b < fast; b++) k1(b + fast * al, b + fast * a) = wc;
    }
  }
  MatrixXcd z = k1.adjoint() * c * k1;
  const MatrixXcd hole = MatrixXcd::Identity(slow, slow) - pi;
  for (int a = 0; a < slow; a++) {
    for (int ap = 0; ap < slow; ap++) {
      const std::complex<double> q = std::conj(hole(a, ap)) / double(fast);
      if (q == std::complex<double>(0.0, 0.0)) continue;
      for (int b = 0; b < fast; b++) z(b + fast * a, b + fast * ap) += q;
    }
  }
  z = 0.5 * (z + z.adjoint()).eval();
  // u = the affine-tangent part of c/sigma, so the first half-step holds the
  // starting point instead of kicking off along the objective.
  MatrixXcd u = c;
  for (int a = 0; a < slow; a++) {
    for (int ap = 0; ap < slow; ap++) {
      const std::complex<double> s = nu(a, ap) / double(fast);
      for (int b = 0; b < fast; b++) u(b + fast * a, b + fast * ap) -= s;
    }
  }
  u /= sigma;
  return {std::move(z), std::move(u), sigma};
}

}  // namespace q2t
