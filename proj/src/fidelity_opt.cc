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

#include "qudit2t/fidelity_opt.h"

#include <cmath>
#include <stdexcept>

namespace q2t {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

MatrixXcd choi_to_liouville(const MatrixXcd& choi, int dim_in, int dim_out) {
  if (choi.rows() != dim_in * dim_out || choi.rows() != choi.cols()) {
    throw std::invalid_argument("choi_to_liouville: dims do not factor the matrix");
  }
  MatrixXcd l(dim_out * dim_out, dim_in * dim_in);
  for (int a = 0; a < dim_in; a++) {
    for (int ap = 0; ap < dim_in; ap++) {
      for (int b = 0; b < dim_out; b++) {
        for (int bp = 0; bp < dim_out; bp++) {
          l(b + dim_out * bp, a + dim_in * ap) = choi(b + dim_out * a, bp + dim_out * ap);
        }
      }
    }
  }
  return l;
}

MatrixXcd liouville_to_choi(const MatrixXcd& l, int dim_in, int dim_out) {
  if (l.rows() != dim_out * dim_out || l.cols() != dim_in * dim_in) {
    throw std::invalid_argument("liouville_to_choi: dims do not factor the matrix");
  }
  MatrixXcd choi(dim_in * dim_out, dim_in * dim_out);
  for (int a = 0; a < dim_in; a++) {
    for (int ap = 0; ap < dim_in; ap++) {
      for (int b = 0; b < dim_out; b++) {
        for (int bp = 0; bp < dim_out; bp++) {
          choi(b + dim_out * a, bp + dim_out * ap) = l(b + dim_out * bp, a + dim_in * ap);
        }
      }
    }
  }
  return choi;
}

MatrixXcd swapconj(const MatrixXcd& choi, int dim_in, int dim_out) {
  if (choi.rows() != dim_in * dim_out || choi.rows() != choi.cols()) {
    throw std::invalid_argument("swapconj: dims do not factor the matrix");
  }
  MatrixXcd y(choi.rows(), choi.cols());
  for (int a = 0; a < dim_in; a++) {
    for (int ap = 0; ap < dim_in; ap++) {
      for (int b = 0; b < dim_out; b++) {
        for (int bp = 0; bp < dim_out; bp++) {
          y(a + dim_in * b, ap + dim_in * bp) = std::conj(choi(b + dim_out * a, bp + dim_out * ap));
        }
      }
    }
  }
  return y;
}

ChoiMatrix isometry_choi(const MatrixXcd& v) {
  const int rows = int(v.rows()), cols = int(v.cols());
  if ((v.adjoint() * v - MatrixXcd::Identity(cols, cols)).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("isometry_choi: columns are not orthonormal");
  }
  const VectorXcd vec = Eigen::Map<const VectorXcd>(v.data(), v.size());
  return {vec * vec.adjoint(), cols, rows};
}

ChoiMatrix encoding_choi(const Encoding& enc, const OrthoFrame& frame) {
  if (frame.to_frame.cols() != enc.coeffs.rows()) {
    throw std::invalid_argument("encoding_choi: frame does not cover the code's states");
  }
  return isometry_choi(frame.to_frame * enc.coeffs);
}

std::vector<MatrixXcd> choi_kraus(const ChoiMatrix& c, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(c.m);
  const VectorXd& evals = es.eigenvalues();
  const double cut = rel_tol * std::max(evals.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<MatrixXcd> kraus;
  for (int s = 0; s < evals.size(); s++) {
    if (evals(s) <= cut) continue;
    const VectorXcd v = std::sqrt(evals(s)) * es.eigenvectors().col(s);
    kraus.push_back(Eigen::Map<const MatrixXcd>(v.data(), c.dim_out, c.dim_in));
  }
  return kraus;
}

MatrixXcd channel_liouville(const ChannelRep& ch) {
  if (ch.kind == ChannelKind::kDephasing) {
    const VectorXd w = Eigen::Map<const VectorXd>(ch.schur.data(), ch.schur.size());
    return w.cast<cxd>().asDiagonal();
  }
  return loss_liouville(ch);
}

std::vector<MatrixXcd> channel_kraus(const ChannelRep& ch) {
  if (ch.kind != ChannelKind::kDephasing) return loss_kraus_frame(ch);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(ch.schur);
  const VectorXd& evals = es.eigenvalues();
  const double cut = 1e-14 * evals.cwiseAbs().maxCoeff();
  std::vector<MatrixXcd> kraus;
  for (int s = 0; s < evals.size(); s++) {
    if (evals(s) <= cut) continue;
    const VectorXd u = std::sqrt(evals(s)) * es.eigenvectors().col(s);
    kraus.push_back(u.cast<cxd>().asDiagonal());
  }
  return kraus;
}

int channel_dim_in(const ChannelRep& ch) {
  return ch.kind == ChannelKind::kDephasing ? ch.fock.size() : ch.in_frame.rank;
}

int channel_dim_out(const ChannelRep& ch) {
  return ch.kind == ChannelKind::kDephasing ? ch.fock.size() : ch.out_frame.rank;
}

double fidelity_from_choi(const MatrixXcd& logical_choi, int d) {
  if (logical_choi.rows() != d * d || logical_choi.rows() != logical_choi.cols()) {
    throw std::invalid_argument("fidelity_from_choi: not a d*d Choi matrix");
  }
  VectorXcd vec_id = VectorXcd::Zero(d * d);
  for (int a = 0; a < d; a++) vec_id(a + d * a) = 1.0;
  return (vec_id.adjoint() * logical_choi * vec_id)(0, 0).real() / double(d * d);
}

namespace {

void check_instance(const FidelityInstance& inst) {
  if (inst.d < 1 || inst.encode.dim_in != inst.d || inst.recover.dim_out != inst.d ||
      inst.encode.dim_out != channel_dim_in(inst.noise) ||
      inst.recover.dim_in != channel_dim_out(inst.noise)) {
    throw std::invalid_argument("fidelity instance: frame dimensions do not compose");
  }
}

}  // namespace

double entanglement_fidelity(const FidelityInstance& inst) {
  check_instance(inst);
  const int d = inst.d;
  const MatrixXcd le = choi_to_liouville(inst.encode.m, d, inst.encode.dim_out);
  const MatrixXcd lr = choi_to_liouville(inst.recover.m, inst.recover.dim_in, d);
  const MatrixXcd total = lr * (channel_liouville(inst.noise) * le);
  return fidelity_from_choi(liouville_to_choi(total, d, d), d);
}

double entanglement_fidelity_kraus(const FidelityInstance& inst) {
  check_instance(inst);
  const auto es = choi_kraus(inst.encode);
  const auto ns = channel_kraus(inst.noise);
  const auto rs = choi_kraus(inst.recover);
  double f = 0.0;
  for (const auto& n : ns) {
    for (const auto& e : es) {
      const MatrixXcd ne = n * e;
      for (const auto& r : rs) f += std::norm((r * ne).trace());
    }
  }
  return f / double(inst.d * inst.d);
}

namespace {

// Objective matrix for the recovery SDP: swapconj of Choi(noise o encode),
// scaled so that Re Tr(M X) is the entanglement fidelity.
MatrixXcd recovery_objective(const ChoiMatrix& encode, const ChannelRep& noise, int d) {
  const int r_in = channel_dim_in(noise);
  const int r_out = channel_dim_out(noise);
  if (encode.dim_in != d || encode.dim_out != r_in) {
    throw std::invalid_argument("optimal_recovery: encoding does not match the channel frame");
  }
  const MatrixXcd le = choi_to_liouville(encode.m, d, r_in);
  const MatrixXcd lm = channel_liouville(noise) * le;
  return swapconj(liouville_to_choi(lm, d, r_out), d, r_out) / double(d * d);
}

MatrixXcd encoding_objective(const ChoiMatrix& recover, const ChannelRep& noise, int d) {
  const int r_in = channel_dim_in(noise);
  const int r_out = channel_dim_out(noise);
  if (recover.dim_out != d || recover.dim_in != r_out) {
    throw std::invalid_argument("optimal_encoding: recovery does not match the channel frame");
  }
  const MatrixXcd lr = choi_to_liouville(recover.m, r_out, d);
  const MatrixXcd ll = lr * channel_liouville(noise);
  return swapconj(liouville_to_choi(ll, r_in, d), r_in, d) / double(d * d);
}

// The solver's final iterate satisfies the trace constraint exactly but can
// retain a slightly negative eigenvalue, which would let the reported
// objective overshoot the optimum. Project back to the cone and evaluate the
// objective there: the returned map is feasible (up to the tiny trace defect
// of the clipped mass) and its fidelity is a lower bound at solver accuracy.
MapOptimum finish(SdpSolution sol, const SdpProblem& p, int dim_in, int dim_out) {
  MapOptimum opt;
  MatrixXcd x = project_psd(sol.x);
  opt.fidelity = p.objective.cwiseProduct(x.transpose()).sum().real();
  opt.map = {std::move(x), dim_in, dim_out};
  opt.diag = std::move(sol.diag);
  opt.state = std::move(sol.state);
  return opt;
}

}  // namespace

MapOptimum optimal_recovery(const ChoiMatrix& encode, const ChannelRep& noise, int d,
                            const SolverSettings& settings, const SolverState* warm) {
  const int r_out = channel_dim_out(noise);
  SdpProblem p;
  p.objective = recovery_objective(encode, noise, d);
  p.dim_slow = r_out;
  p.dim_fast = d;
  p.traced_subsystem = 1;
  return finish(solve_sdp(p, settings, warm), p, r_out, d);
}

MapOptimum optimal_encoding(const ChoiMatrix& recover, const ChannelRep& noise, int d,
                            const SolverSettings& settings, const SolverState* warm) {
  const int r_in = channel_dim_in(noise);
  SdpProblem p;
  p.objective = encoding_objective(recover, noise, d);
  p.dim_slow = d;
  p.dim_fast = r_in;
  p.traced_subsystem = 1;
  return finish(solve_sdp(p, settings, warm), p, d, r_in);
}

AlternationResult alternate_optimize(const Encoding& seed, const ChannelRep& noise, int n_sdp,
                                     const SolverSettings& settings, double early_stop) {
  if (n_sdp < 1) throw std::invalid_argument("alternate_optimize: need at least one step");
  if (noise.kind == ChannelKind::kDephasing) {
    throw std::invalid_argument("alternate_optimize: expects a span-based loss rep");
  }
  if (noise.in_basis.size() != seed.coeffs.rows() ||
      (noise.in_basis.gram - seed.basis.gram).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("alternate_optimize: seed and channel constellations differ");
  }

  AlternationResult res;
  ChoiMatrix encode = encoding_choi(seed, noise.in_frame);
  SolverState r_state, e_state;
  bool have_r = false, have_e = false;
  double prev = -1.0;
  double cur = -1.0;
  ChoiMatrix recover;
  // Best-iterate retention: a half-step whose evaluated fidelity lands below
  // the current pair (possible within solver accuracy) is discarded, so the
  // trajectory is nondecreasing and always quotes the fidelity of the maps
  // actually held.
  for (int step = 0; step < n_sdp; step++) {
    MapOptimum rec = optimal_recovery(encode, noise, seed.d, settings, have_r ? &r_state : nullptr);
    r_state = rec.state;
    have_r = true;
    res.all_converged = res.all_converged && rec.diag.converged;
    if (step == 0 || rec.fidelity >= cur) {
      recover = std::move(rec.map);
      cur = rec.fidelity;
    }
    res.trajectory.push_back(cur);

    MapOptimum enc = optimal_encoding(recover, noise, seed.d, settings, have_e ? &e_state : nullptr);
    e_state = enc.state;
    have_e = true;
    res.all_converged = res.all_converged && enc.diag.converged;
    if (enc.fidelity >= cur) {
      encode = std::move(enc.map);
      cur = enc.fidelity;
    }
    res.trajectory.push_back(cur);
    res.double_steps = step + 1;

    if (prev >= 0.0 && std::abs(cur - prev) < early_stop) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  res.encode = std::move(encode);
  res.recover = std::move(recover);
  return res;
}

DephasingFidelity fidelity_dephasing(const Encoding& enc, double delta, int n_total,
                                     const SolverSettings& settings, double min_captured,
                                     double support_tol) {
  // A constellation that never populates the second mode (the circle codes)
  // dephases mode 1 only: mode 2 stays in vacuum, which every dephasing Kraus
  // operator fixes. Simulating just that mode is exact and frees the whole
  // photon budget for it.
  bool single_mode = true;
  for (const auto& st : enc.basis.states) {
    if (std::abs(st.alpha2) != 0.0) single_mode = false;
  }
  const ChannelRep noise =
      single_mode ? dephasing_single_mode(n_total, delta) : dephasing_fock(n_total, delta);
  const int fock_n = noise.fock.size();
  const int d = enc.d;

  // Embed the codewords at the truncation. The dropped tail is NOT
  // renormalized away: the encoder stays trace-nonincreasing and the lost
  // norm counts against the fidelity, so the reported F is a lower bound
  // that improves as the truncation grows. (Renormalizing instead would make
  // small truncations look spuriously good: chopping the photon tail shrinks
  // the number spread that dephasing acts on.)
  MatrixXcd v = MatrixXcd::Zero(fock_n, d);
  for (int s = 0; s < enc.coeffs.rows(); s++) {
    const FockVector fv = to_fock(enc.basis.states[s], noise.fock);
    v += fv.coeff * enc.coeffs.row(s);
  }
  DephasingFidelity out;
  out.captured = v.colwise().squaredNorm().minCoeff();
  if (out.captured < min_captured) {
    throw std::domain_error("fidelity_dephasing: truncation keeps too little codeword norm");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> gram_es(v.adjoint() * v);
  if (gram_es.eigenvalues().minCoeff() <= 1e-12) {
    throw std::domain_error("fidelity_dephasing: embedded codewords are numerically dependent");
  }

  // Restrict the recovery input to where the noisy code actually lives:
  // support of sum_m B_m B_m^dag = (V V^dag) o W.
  MatrixXcd keep;
  if (support_tol > 0.0) {
    const MatrixXcd noisy = (v * v.adjoint()).cwiseProduct(noise.schur.cast<cxd>());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> sup_es(noisy);
    const double cut = support_tol * sup_es.eigenvalues().cwiseAbs().maxCoeff();
    int kept = 0;
    for (int i = 0; i < fock_n; i++) {
      if (sup_es.eigenvalues()(i) > cut) kept++;
    }
    keep = sup_es.eigenvectors().rightCols(kept);
  } else {
    keep = MatrixXcd::Identity(fock_n, fock_n);
  }
  const int s_dim = int(keep.cols());
  out.support_dim = s_dim;

  const VectorXcd vv = Eigen::Map<const VectorXcd>(v.data(), v.size());
  const MatrixXcd le = choi_to_liouville((vv * vv.adjoint()).eval(), d, fock_n);
  const MatrixXcd lm = channel_liouville(noise) * le;
  MatrixXcd choi_m = liouville_to_choi(lm, d, fock_n);
  if (s_dim < fock_n) {
    MatrixXcd k = MatrixXcd::Zero(d * fock_n, d * s_dim);
    for (int p = 0; p < d; p++) k.block(p * fock_n, p * s_dim, fock_n, s_dim) = keep;
    choi_m = (k.adjoint() * choi_m * k).eval();
  }

  SdpProblem p;
  p.objective = swapconj(choi_m, d, s_dim) / double(d * d);
  p.dim_slow = s_dim;
  p.dim_fast = d;
  p.traced_subsystem = 1;
  SdpSolution sol = solve_sdp(p, settings);
  const MatrixXcd xp = project_psd(sol.x);
  out.fidelity = p.objective.cwiseProduct(xp.transpose()).sum().real();
  out.diag = std::move(sol.diag);
  return out;
}

}  // namespace q2t
