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

#include "qudit2t/codes.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "qudit2t/group2t.h"

namespace q2t {

namespace {

constexpr double kPi = std::numbers::pi;
const cxd kI{0.0, 1.0};

Eigen::MatrixXcd gram_contract(const Eigen::MatrixXcd& gram,
                               const Eigen::MatrixXcd& cols) {
  return cols.adjoint() * gram * cols;
}

}  // namespace

Eigen::MatrixXcd Encoding::logical_gram() const {
  return gram_contract(basis.gram, coeffs);
}

QuoctitSpectrum quoctit_spectrum(double alpha) {
  const double A = alpha * alpha;
  QuoctitSpectrum s;
  const cxd eA = std::exp(cxd{A, 0.0});
  const cxd eiA = std::exp(kI * A);
  const cxd e3i = std::exp(-0.5 * cxd{3.0, 1.0} * A);
  s.rho = 3.0 + 3.0 * e3i * (1.0 + eiA);
  s.tau = e3i * (2.0 + eiA) * (1.0 + eA + std::exp(0.5 * cxd{1.0, 1.0} * A));
  s.chi = 3.0 * std::exp(cxd{-2.0 * A, 0.0}) *
          (1.0 + std::exp(0.5 * cxd{3.0, -1.0} * A) * (1.0 + eiA));

  const double sum = std::real(s.rho + s.chi);
  const double dif = std::real(s.rho - s.chi);
  const double im = std::imag(s.tau);
  const double s3 = std::sqrt(3.0);
  s.lambda1 = sum + 6.0 * std::real(s.tau);
  s.lambda2 = dif + 2.0 * s3 * std::abs(im);
  s.lambda3 = dif - 2.0 * s3 * std::abs(im);
  s.lambda4 = sum - 2.0 * std::real(s.tau);
  const double lam_minus = dif - 2.0 * s3 * im;  // sector of logicals 1, 2
  const double lam_plus = dif + 2.0 * s3 * im;   // sector of logicals 3, 4
  s.logical_eigenvalue = {s.lambda1, lam_minus, lam_minus, lam_plus,
                          lam_plus,  s.lambda4, s.lambda4, s.lambda4};

  const double ex = std::exp(-A);
  s.nu[0] = std::sqrt(std::max(
      0.0, 48.0 * ex *
               (2.0 + 8.0 * std::cos(0.5 * A) * std::cosh(0.5 * A) +
                std::cos(A) + std::cosh(A))));
  s.nu[1] = quoctit_nu_abc(alpha, +1, -1, -1);
  s.nu[2] = quoctit_nu_abc(alpha, -1, -1, +1);
  s.nu[3] = quoctit_nu_abc(alpha, -1, +1, -1);
  s.nu[4] = quoctit_nu_abc(alpha, +1, +1, +1);
  const double nu567 =
      4.0 * std::sqrt(std::max(0.0, ex * (3.0 * std::cosh(A) - 2.0 - std::cos(A))));
  s.nu[5] = s.nu[6] = s.nu[7] = nu567;
  return s;
}

double quoctit_nu_abc(double alpha, int sa, int sb, int sc) {
  const double A = alpha * alpha;
  const double s3 = std::sqrt(3.0);
  const double v = 48.0 * std::exp(-A) *
                   (std::cos(0.5 * A) - std::cosh(0.5 * A)) *
                   ((sa + sb * s3) * std::sin(0.5 * A) -
                    (3.0 + sc * s3) * std::sinh(0.5 * A));
  return std::sqrt(std::max(0.0, v));
}

Eigen::MatrixXcd quoctit_gram_analytic(double alpha) {
  const QuoctitSpectrum s = quoctit_spectrum(alpha);
  const cxd p = s.rho, t = s.tau, c = s.chi, T = std::conj(s.tau);
  Eigen::MatrixXcd eta(8, 8);
  eta << p, t, t, t, c, T, T, T,
         T, p, t, T, t, c, T, t,
         T, T, p, t, t, t, c, T,
         T, t, T, p, t, T, t, c,
         c, T, T, T, p, t, t, t,
         t, c, T, t, T, p, t, T,
         t, t, c, T, T, T, p, t,
         t, T, t, c, T, t, T, p;
  return eta;
}

Eigen::MatrixXcd qutrit_codewords() {
  const auto& g = Group2T::instance();
  Eigen::MatrixXcd ind = Eigen::MatrixXcd::Zero(24, 3);
  for (int s = 0; s < 3; ++s) {
    for (int idx : g.left_cosets_q8()[s]) ind(idx, s) = 1.0;
  }
  return ind;
}

Eigen::MatrixXcd quoctit_codewords() {
  const auto& g = Group2T::instance();
  Eigen::MatrixXcd ind = Eigen::MatrixXcd::Zero(24, 8);
  for (int q = 0; q < 8; ++q) {
    for (int idx : g.right_cosets_z3()[q]) ind(idx, q) = 1.0;
  }
  return ind;
}

Encoding qutrit_logical(double alpha) {
  Encoding enc;
  enc.d = 3;
  enc.alpha = alpha;
  enc.label = "2T-qutrit";
  enc.basis = group2t_constellation(alpha);
  enc.gate_perm = gate_perm_2t();

  const Eigen::MatrixXcd ind = qutrit_codewords();
  const Eigen::MatrixXcd eta = gram_contract(enc.basis.gram, ind);
  Eigen::MatrixXcd w(3, 3);
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXcd u(3);
    for (int n = 0; n < 3; ++n) u(n) = std::polar(1.0, 2.0 * kPi * k * n / 3.0);
    const double norm2 = std::real(u.dot(eta * u));
    if (!(norm2 > 1e-12 * std::abs(eta(0, 0)))) {
      throw std::domain_error("qutrit_logical: degenerate codeword Gram");
    }
    w.col(k) = u / std::sqrt(norm2);
  }
  enc.coeffs = ind * w;
  return enc;
}

Eigen::MatrixXcd quoctit_seed_vectors() {
  const double s3 = std::sqrt(3.0);
  const cxd kmm = 0.5 * (kI - 1.0) * (s3 - 1.0);
  const cxd kpm = 0.5 * (kI + 1.0) * (s3 - 1.0);
  const cxd kpp = 0.5 * (kI + 1.0) * (s3 + 1.0);
  const cxd kmp = 0.5 * (kI - 1.0) * (s3 + 1.0);
  Eigen::MatrixXcd v(8, 8);
  auto anti = [&v](int col, cxd a, cxd b, cxd c, cxd d) {
    v.col(col) << a, b, c, d, -a, -b, -c, -d;
  };
  v.col(0) = Eigen::VectorXcd::Ones(8);
  anti(1, -kmm, -kpm, 1.0, kI);
  anti(2, -kpp, -kmp, 1.0, -kI);
  anti(3, kpm, kmm, 1.0, -kI);
  anti(4, kmp, kpp, 1.0, kI);
  v.col(5) << 1.0, kI, -1.0, -kI, 1.0, kI, -1.0, -kI;
  v.col(6) << 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0;
  v.col(7) << 1.0, -kI, -1.0, kI, 1.0, -kI, -1.0, kI;
  return v;
}

Encoding quoctit_logical(double alpha) {
  Encoding enc;
  enc.d = 8;
  enc.alpha = alpha;
  enc.label = "2T-quoctit";
  enc.basis = group2t_constellation(alpha);
  enc.gate_perm = gate_perm_2t();

  const Eigen::MatrixXcd ind = quoctit_codewords();
  const Eigen::MatrixXcd eta = gram_contract(enc.basis.gram, ind);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(eta);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("quoctit_logical: eigensolver failed");
  }
  const Eigen::VectorXd evals = es.eigenvalues();
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());

  // Cluster the (ascending) eigenvalues into degenerate groups.
  std::vector<std::pair<int, int>> clusters;  // [first, last] index ranges
  for (int i = 0; i < 8; ++i) {
    if (!clusters.empty() && evals(i) - evals(clusters.back().second) <
                                 1e-8 * scale) {
      clusters.back().second = i;
    } else {
      clusters.emplace_back(i, i);
    }
  }

  const QuoctitSpectrum spec = quoctit_spectrum(alpha);
  const Eigen::MatrixXcd seeds = quoctit_seed_vectors();
  Eigen::MatrixXcd w(8, 8);
  for (int n = 0; n < 8; ++n) {
    const double target = spec.logical_eigenvalue[n];
    int best = 0;
    double best_dist = std::abs(0.5 * (evals(clusters[0].first) +
                                       evals(clusters[0].second)) -
                                target);
    for (int c = 1; c < static_cast<int>(clusters.size()); ++c) {
      const double mid =
          0.5 * (evals(clusters[c].first) + evals(clusters[c].second));
      if (std::abs(mid - target) < best_dist) {
        best = c;
        best_dist = std::abs(mid - target);
      }
    }
    const auto [lo, hi] = clusters[best];
    const Eigen::MatrixXcd sub = es.eigenvectors().middleCols(lo, hi - lo + 1);
    Eigen::VectorXcd u = sub * (sub.adjoint() * seeds.col(n));
    for (int m = 0; m < n; ++m) u -= w.col(m) * w.col(m).dot(eta * u);
    const double norm2 = std::real(u.dot(eta * u));
    if (!(norm2 > 1e-10 * scale)) {
      throw std::domain_error("quoctit_logical: degenerate codeword Gram");
    }
    w.col(n) = u / std::sqrt(norm2);
  }
  enc.coeffs = ind * w;
  return enc;
}

Encoding psk_encoding(int d, int n, double alpha) {
  if (d < 1 || n < 1) throw std::invalid_argument("psk_encoding: d, n >= 1");
  Encoding enc;
  enc.d = d;
  enc.alpha = alpha;
  const int m = d * n;
  enc.label = "psk[" + std::to_string(d) + "," + std::to_string(m) + "]";
  enc.basis = psk_constellation(d, n, alpha);
  enc.gate_perm.resize(m);
  for (int t = 0; t < m; ++t) enc.gate_perm[t] = (t + 1) % m;

  const Eigen::MatrixXcd& g = enc.basis.gram;
  Eigen::MatrixXcd w(m, d);
  std::vector<double> norms(d);
  double max_norm = 0.0;
  for (int k = 0; k < d; ++k) {
    Eigen::VectorXcd u(m);
    for (int t = 0; t < m; ++t) {
      u(t) = std::polar(1.0, 2.0 * kPi * t * k / d);
    }
    norms[k] = std::real(u.dot(g * u));
    max_norm = std::max(max_norm, norms[k]);
    w.col(k) = u;
  }
  for (int k = 0; k < d; ++k) {
    if (!(norms[k] > 1e-12 * std::max(1.0, max_norm))) {
      throw std::domain_error(
          "psk_encoding: circle span cannot support d orthonormal states");
    }
    w.col(k) /= std::sqrt(norms[k]);
  }
  enc.coeffs = std::move(w);
  return enc;
}

Encoding random_encoding(int d, const StateBasis& basis, std::uint64_t seed) {
  const OrthoFrame frame = orthonormalize(basis);
  if (d > frame.rank) {
    throw std::domain_error("random_encoding: d exceeds numerical rank");
  }
  Encoding enc;
  enc.d = d;
  enc.basis = basis;
  enc.label = "random-d" + std::to_string(d) + "-s" + std::to_string(seed);

  // Box-Muller over mt19937_64 keeps draws identical run to run.
  std::mt19937_64 rng(seed);
  auto gauss = [&rng]() {
    const double u1 =
        (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;  // (0,1)
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  };
  Eigen::MatrixXcd m(frame.rank, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < frame.rank; ++i) m(i, j) = cxd{gauss(), gauss()};
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  Eigen::MatrixXcd q = qr.householderQ() *
                       Eigen::MatrixXcd::Identity(frame.rank, d);
  const Eigen::MatrixXcd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cxd rj = r(j, j);
    if (std::abs(rj) > 0.0) q.col(j) *= rj / std::abs(rj);
  }
  enc.coeffs = frame.from_frame * q;
  return enc;
}

std::vector<int> gate_perm_2t() {
  const auto& g = Group2T::instance();
  const int l_idx = g.from_decomposition(0, 0, 0, 1);
  std::vector<int> perm(Group2T::kOrder);
  for (int s = 0; s < Group2T::kOrder; ++s) perm[s] = g.multiply(l_idx, s);
  return perm;
}

Eigen::VectorXcd apply_gate(const Encoding& enc, const Eigen::VectorXcd& x) {
  if (!enc.has_gate()) {
    throw std::logic_error("apply_gate: encoding has no gate");
  }
  if (x.size() != static_cast<Eigen::Index>(enc.gate_perm.size())) {
    throw std::invalid_argument("apply_gate: size mismatch");
  }
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
  for (int s = 0; s < x.size(); ++s) y(enc.gate_perm[s]) = x(s);
  return y;
}

Eigen::MatrixXcd logical_gate(const Encoding& enc) {
  if (!enc.has_gate()) {
    throw std::logic_error("logical_gate: encoding has no gate");
  }
  Eigen::MatrixXcd permuted(enc.coeffs.rows(), enc.coeffs.cols());
  for (int s = 0; s < enc.coeffs.rows(); ++s) {
    permuted.row(enc.gate_perm[s]) = enc.coeffs.row(s);
  }
  return enc.coeffs.adjoint() * enc.basis.gram * permuted;
}

Eigen::MatrixXcd logical_U8(double alpha) {
  return logical_gate(quoctit_logical(alpha));
}

void write_encoding_json(const Encoding& enc, std::ostream& out) {
  nlohmann::json j;
  j["label"] = enc.label;
  j["alpha"] = enc.alpha;
  j["d"] = enc.d;
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : enc.basis.states) {
    states.push_back({{"re1", s.alpha1.real()},
                      {"im1", s.alpha1.imag()},
                      {"re2", s.alpha2.real()},
                      {"im2", s.alpha2.imag()},
                      {"tag", s.tag}});
  }
  j["states"] = std::move(states);
  nlohmann::json cols = nlohmann::json::array();
  for (int k = 0; k < enc.coeffs.cols(); ++k) {
    nlohmann::json col = nlohmann::json::array();
    for (int i = 0; i < enc.coeffs.rows(); ++i) {
      col.push_back({enc.coeffs(i, k).real(), enc.coeffs(i, k).imag()});
    }
    cols.push_back(std::move(col));
  }
  j["coeffs"] = std::move(cols);
  j["gate_perm"] = enc.gate_perm;
  out << j.dump(2) << "\n";
}

}  // namespace q2t
