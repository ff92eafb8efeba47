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

#include "qudit2t/constellation.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qudit2t/group2t.h"

namespace q2t {

cxd coherent_overlap(cxd a, cxd b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

cxd two_mode_overlap(const ConstellationState& x, const ConstellationState& y) {
  return coherent_overlap(x.alpha1, y.alpha1) * coherent_overlap(x.alpha2, y.alpha2);
}

StateBasis make_basis(std::vector<ConstellationState> states) {
  StateBasis basis;
  basis.states = std::move(states);
  const int n = basis.size();
  basis.gram.resize(n, n);
  for (int r = 0; r < n; r++) {
    for (int c = 0; c < n; c++) {
      basis.gram(r, c) = two_mode_overlap(basis.states[r], basis.states[c]);
    }
  }
  return basis;
}

StateBasis StateBasis::damped(double factor) const {
  std::vector<ConstellationState> scaled = states;
  for (auto& s : scaled) {
    s.alpha1 *= factor;
    s.alpha2 *= factor;
  }
  return make_basis(std::move(scaled));
}

StateBasis group2t_constellation(double alpha) {
  const Group2T& g = Group2T::instance();
  std::vector<ConstellationState> states(Group2T::kOrder);
  for (int idx = 0; idx < Group2T::kOrder; idx++) {
    const DyadicQuat& v = g.quat(idx);
    states[idx] = {cxd(v.a(), v.b()) * alpha, cxd(v.c(), -v.d()) * alpha, g.label(idx)};
  }
  return make_basis(std::move(states));
}

StateBasis psk_constellation(int d, int n, double alpha) {
  if (d < 1 || n < 1) throw std::invalid_argument("psk_constellation: need d, n >= 1");
  const int m = d * n;
  std::vector<ConstellationState> states(m);
  for (int t = 0; t < m; t++) {
    const double phase = 2.0 * std::numbers::pi * t / m;
    states[t] = {alpha * cxd(std::cos(phase), std::sin(phase)), cxd(0, 0),
                 "psk" + std::to_string(t)};
  }
  return make_basis(std::move(states));
}

OrthoFrame orthonormalize(const Eigen::MatrixXcd& gram, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  if (es.info() != Eigen::Success) throw std::runtime_error("orthonormalize: eigensolver failed");
  const Eigen::VectorXd& evals = es.eigenvalues();  // ascending
  const double lambda_max = evals(evals.size() - 1);
  if (lambda_max <= 0.0) throw std::domain_error("orthonormalize: Gram has no positive direction");
  const double cut = rel_tol * lambda_max;
  int rank = 0;
  for (int idx = 0; idx < evals.size(); idx++) {
    if (evals(idx) > cut) rank++;
  }
  if (rank == 0) throw std::domain_error("orthonormalize: rank 0 at requested tolerance");

  OrthoFrame frame;
  frame.rank = rank;
  frame.rel_tol = rel_tol;
  frame.kept_eigenvalues.resize(rank);
  const int n = static_cast<int>(gram.rows());
  frame.to_frame.resize(rank, n);
  frame.from_frame.resize(n, rank);
  // kept directions in descending eigenvalue order
  for (int r = 0; r < rank; r++) {
    const int src = static_cast<int>(evals.size()) - 1 - r;
    const double lam = evals(src);
    frame.kept_eigenvalues(r) = lam;
    frame.to_frame.row(r) = std::sqrt(lam) * es.eigenvectors().col(src).adjoint();
    frame.from_frame.col(r) = es.eigenvectors().col(src) / std::sqrt(lam);
  }
  return frame;
}

OrthoFrame orthonormalize(const StateBasis& basis, double rel_tol) {
  return orthonormalize(basis.gram, rel_tol);
}

FockBasis FockBasis::total_photon(int n_total) {
  FockBasis b;
  b.n_total = n_total;
  b.cap1 = b.cap2 = n_total;
  for (int n1 = 0; n1 <= n_total; n1++) {
    for (int n2 = 0; n2 + n1 <= n_total; n2++) b.levels.emplace_back(n1, n2);
  }
  return b;
}

FockBasis FockBasis::per_mode_capped(int n_total) {
  FockBasis b;
  b.n_total = n_total;
  b.cap1 = b.cap2 = n_total / 2;
  for (int n1 = 0; n1 <= b.cap1; n1++) {
    for (int n2 = 0; n2 <= b.cap2 && n1 + n2 <= n_total; n2++) b.levels.emplace_back(n1, n2);
  }
  return b;
}

FockBasis FockBasis::single_mode(int n_max) {
  FockBasis b;
  b.n_total = n_max;
  b.cap1 = n_max;
  b.cap2 = 0;
  for (int n1 = 0; n1 <= n_max; n1++) b.levels.emplace_back(n1, 0);
  return b;
}

int FockBasis::index_of(int n1, int n2) const {
  for (int idx = 0; idx < size(); idx++) {
    if (levels[idx].first == n1 && levels[idx].second == n2) return idx;
  }
  return -1;
}

namespace {

// e^{-|b|^2/2} b^n / sqrt(n!), stable for large n via log magnitudes.
cxd fock_coeff(cxd b, int n) {
  const double mag = std::abs(b);
  if (mag == 0.0) return n == 0 ? cxd(1, 0) : cxd(0, 0);
  const double log_mag = -0.5 * mag * mag + n * std::log(mag) - 0.5 * std::lgamma(n + 1.0);
  const double phase = n * std::arg(b);
  return std::exp(log_mag) * cxd(std::cos(phase), std::sin(phase));
}

}  // namespace

FockVector to_fock(const ConstellationState& s, const FockBasis& basis) {
  FockVector v;
  v.coeff.resize(basis.size());
  for (int idx = 0; idx < basis.size(); idx++) {
    const auto [n1, n2] = basis.levels[idx];
    v.coeff(idx) = fock_coeff(s.alpha1, n1) * fock_coeff(s.alpha2, n2);
  }
  v.captured_norm = v.coeff.squaredNorm();
  return v;
}

}  // namespace q2t
