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

#include "qudit2t/channels.h"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace q2t {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

CoherentLossAction loss_on_coherent(cxd beta, double gamma, int lmax) {
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("loss_on_coherent: gamma outside [0, 1)");
  if (lmax < 0) throw std::invalid_argument("loss_on_coherent: negative lmax");
  CoherentLossAction act;
  act.damped = std::sqrt(1.0 - gamma) * beta;
  act.weights = VectorXcd::Zero(lmax + 1);
  const double mag = std::abs(beta);
  act.weights(0) = std::exp(-0.5 * gamma * mag * mag);
  if (gamma == 0.0 || mag == 0.0) return act;
  // sqrt(gamma^l / l!) beta^l e^{-gamma |beta|^2 / 2}, via log magnitudes.
  for (int l = 1; l <= lmax; l++) {
    const double log_mag = 0.5 * l * std::log(gamma) + l * std::log(mag) -
                           0.5 * std::lgamma(l + 1.0) - 0.5 * gamma * mag * mag;
    act.weights(l) = std::polar(std::exp(log_mag), l * std::arg(beta));
  }
  return act;
}

ChannelRep loss_superop(const StateBasis& basis, double gamma) {
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("loss_superop: gamma outside [0, 1)");
  if (basis.size() == 0) throw std::invalid_argument("loss_superop: empty basis");
  ChannelRep ch;
  ch.kind = ChannelKind::kPureLoss;
  ch.gamma = gamma;
  ch.in_basis = basis;
  ch.out_basis = basis.damped(std::sqrt(1.0 - gamma));
  ch.in_frame = orthonormalize(ch.in_basis);
  ch.out_frame = orthonormalize(ch.out_basis);
  const int n = basis.size();
  ch.dyad_weights.resize(n, n);
  for (int i = 0; i < n; i++) {
    const ConstellationState& bi = basis.states[i];
    const double ei = std::norm(bi.alpha1) + std::norm(bi.alpha2);
    for (int j = 0; j < n; j++) {
      const ConstellationState& bj = basis.states[j];
      const double ej = std::norm(bj.alpha1) + std::norm(bj.alpha2);
      const cxd s = bi.alpha1 * std::conj(bj.alpha1) + bi.alpha2 * std::conj(bj.alpha2);
      ch.dyad_weights(i, j) = std::exp(gamma * (s - 0.5 * (ei + ej)));
    }
  }
  return ch;
}

namespace {

MatrixXd schur_for(const FockBasis& fock, double delta) {
  const int n = fock.size();
  MatrixXd w(n, n);
  for (int a = 0; a < n; a++) {
    for (int b = 0; b < n; b++) {
      const double d1 = fock.levels[a].first - fock.levels[b].first;
      const double d2 = fock.levels[a].second - fock.levels[b].second;
      w(a, b) = std::exp(-0.5 * delta * (d1 * d1 + d2 * d2));
    }
  }
  return w;
}

}  // namespace

ChannelRep dephasing_fock(int n_total, double delta) {
  if (delta < 0.0) throw std::invalid_argument("dephasing_fock: negative delta");
  if (n_total < 0) throw std::invalid_argument("dephasing_fock: negative photon cutoff");
  ChannelRep ch;
  ch.kind = ChannelKind::kDephasing;
  ch.delta = delta;
  ch.n_modes = 2;
  ch.fock = FockBasis::per_mode_capped(n_total);
  ch.schur = schur_for(ch.fock, delta);
  return ch;
}

ChannelRep dephasing_single_mode(int n_max, double delta) {
  if (delta < 0.0) throw std::invalid_argument("dephasing_single_mode: negative delta");
  if (n_max < 0) throw std::invalid_argument("dephasing_single_mode: negative level cutoff");
  ChannelRep ch;
  ch.kind = ChannelKind::kDephasing;
  ch.delta = delta;
  ch.n_modes = 1;
  ch.fock = FockBasis::single_mode(n_max);
  ch.schur = schur_for(ch.fock, delta);
  return ch;
}

ChannelRep compose_two_mode(const ChannelRep& ch) {
  if (ch.kind == ChannelKind::kDephasing) {
    if (ch.n_modes != 1 || ch.fock.cap2 != 0) {
      throw std::invalid_argument("compose_two_mode: expected a single-mode dephasing rep");
    }
    const int n_max = ch.fock.n_total;
    ChannelRep out;
    out.kind = ChannelKind::kDephasing;
    out.delta = ch.delta;
    out.n_modes = 2;
    out.fock = FockBasis::per_mode_capped(2 * n_max);
    const int n = out.fock.size();
    out.schur.resize(n, n);
    for (int a = 0; a < n; a++) {
      for (int b = 0; b < n; b++) {
        // Single-mode level m sits at index m in the single-mode rep.
        out.schur(a, b) = ch.schur(out.fock.levels[a].first, out.fock.levels[b].first) *
                          ch.schur(out.fock.levels[a].second, out.fock.levels[b].second);
      }
    }
    return out;
  }
  // The closed-form loss weights already factor per mode, so the span-level
  // rep is the two-mode product channel as built.
  ChannelRep out = ch;
  out.kind = ChannelKind::kComposed;
  return out;
}

NoiseRates lifetimes_to_rates(double T, double T1, double Tphi) {
  if (T < 0.0) throw std::invalid_argument("lifetimes_to_rates: negative cycle time");
  if (T1 <= 0.0 || Tphi <= 0.0) throw std::invalid_argument("lifetimes_to_rates: nonpositive lifetime");
  NoiseRates r;
  r.gamma = -std::expm1(-T / T1);
  r.delta = T / Tphi;
  return r;
}

MatrixXcd apply_channel(const ChannelRep& ch, const MatrixXcd& x) {
  if (ch.kind == ChannelKind::kDephasing) {
    if (x.rows() != ch.fock.size() || x.cols() != ch.fock.size()) {
      throw std::invalid_argument("apply_channel: operand does not match the Fock index set");
    }
    return x.cwiseProduct(ch.schur);
  }
  if (x.rows() != ch.in_frame.rank || x.cols() != ch.in_frame.rank) {
    throw std::invalid_argument("apply_channel: operand does not match the input frame");
  }
  const MatrixXcd coeffs = ch.in_frame.from_frame * x * ch.in_frame.from_frame.adjoint();
  const MatrixXcd weighted = coeffs.cwiseProduct(ch.dyad_weights);
  return ch.out_frame.to_frame * weighted * ch.out_frame.to_frame.adjoint();
}

MatrixXcd loss_liouville(const ChannelRep& ch) {
  if (ch.kind == ChannelKind::kDephasing) {
    throw std::invalid_argument("loss_liouville: not a loss rep");
  }
  const MatrixXcd& bp = ch.in_frame.from_frame;
  const MatrixXcd& bo = ch.out_frame.to_frame;
  const VectorXcd cv =
      Eigen::Map<const VectorXcd>(ch.dyad_weights.data(), ch.dyad_weights.size());
  const MatrixXcd lift = Eigen::kroneckerProduct(bp.conjugate(), bp);
  const MatrixXcd drop = Eigen::kroneckerProduct(bo.conjugate(), bo);
  return drop * cv.asDiagonal() * lift;
}

std::vector<MatrixXcd> loss_kraus_frame(const ChannelRep& ch) {
  if (ch.kind == ChannelKind::kDephasing) {
    throw std::invalid_argument("loss_kraus_frame: not a loss rep");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(ch.dyad_weights);
  const VectorXd& evals = es.eigenvalues();
  const double cut = 1e-14 * evals.cwiseAbs().maxCoeff();
  std::vector<MatrixXcd> kraus;
  for (int s = 0; s < evals.size(); s++) {
    if (evals(s) <= cut) continue;
    const VectorXcd u = std::sqrt(evals(s)) * es.eigenvectors().col(s);
    kraus.push_back(ch.out_frame.to_frame * u.asDiagonal() * ch.in_frame.from_frame);
  }
  return kraus;
}

}  // namespace q2t
