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
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "qudit2t/constellation.h"
#include "qudit2t/group2t.h"

namespace q2t {
namespace {

constexpr double kPiTest = std::numbers::pi;
const std::vector<double> kAlphaGrid = {0.5, 1.0, 1.5, 2.0, 3.0};

Eigen::MatrixXcd numeric_eta8(double alpha) {
  const StateBasis basis = group2t_constellation(alpha);
  const Eigen::MatrixXcd ind = quoctit_codewords();
  return ind.adjoint() * basis.gram * ind;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

TEST_CASE("codeword indicators partition the 24 states") {
  const Eigen::MatrixXcd q3 = qutrit_codewords();
  const Eigen::MatrixXcd q8 = quoctit_codewords();
  REQUIRE(q3.rows() == 24);
  REQUIRE(q3.cols() == 3);
  REQUIRE(q8.rows() == 24);
  REQUIRE(q8.cols() == 8);
  for (int c = 0; c < 3; ++c) CHECK(q3.col(c).sum() == cxd{8.0, 0.0});
  for (int c = 0; c < 8; ++c) CHECK(q8.col(c).sum() == cxd{3.0, 0.0});
  // Row sums 1: every state belongs to exactly one codeword.
  for (int r = 0; r < 24; ++r) {
    CHECK(q3.row(r).sum() == cxd{1.0, 0.0});
    CHECK(q8.row(r).sum() == cxd{1.0, 0.0});
  }
}

TEST_CASE("analytic eight-codeword Gram matches the overlap-sum oracle") {
  for (double alpha : kAlphaGrid) {
    const Eigen::MatrixXcd eta = numeric_eta8(alpha);
    const Eigen::MatrixXcd ana = quoctit_gram_analytic(alpha);
    CAPTURE(alpha);
    CHECK(max_abs(eta - ana) < 1e-10);
    // Diagonal is the codeword norm.
    const QuoctitSpectrum s = quoctit_spectrum(alpha);
    CHECK(std::abs(eta(0, 0) - s.rho) < 1e-10);
  }
}

TEST_CASE("analytic Gram at alpha=0 collapses to the all-nines matrix") {
  const Eigen::MatrixXcd ana = quoctit_gram_analytic(0.0);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) CHECK(std::abs(ana(r, c) - 9.0) < 1e-12);
  }
  const QuoctitSpectrum s = quoctit_spectrum(0.0);
  CHECK(std::abs(s.lambda1 - 72.0) < 1e-10);
  CHECK(std::abs(s.lambda2) < 1e-10);
  CHECK(std::abs(s.lambda3) < 1e-10);
  CHECK(std::abs(s.lambda4) < 1e-10);
}

TEST_CASE("spectrum matches numeric eigenvalues with multiplicities 1,2,2,3") {
  for (double alpha : kAlphaGrid) {
    CAPTURE(alpha);
    const QuoctitSpectrum s = quoctit_spectrum(alpha);
    std::vector<double> expect = {s.lambda1, s.lambda2, s.lambda2, s.lambda3,
                                  s.lambda3, s.lambda4, s.lambda4, s.lambda4};
    std::sort(expect.begin(), expect.end());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(numeric_eta8(alpha));
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = 0; i < 8; ++i) {
      CHECK(std::abs(es.eigenvalues()(i) - expect[i]) < 1e-9 * scale);
      CHECK(es.eigenvalues()(i) > -1e-12 * scale);
    }
    // Trace identity.
    const double tr = s.lambda1 + 2 * s.lambda2 + 2 * s.lambda3 + 3 * s.lambda4;
    CHECK(std::abs(tr - 8.0 * std::real(s.rho)) < 1e-9 * scale);
  }
}

TEST_CASE("seed vectors are exact Gram eigenvectors at every alpha") {
  const Eigen::MatrixXcd seeds = quoctit_seed_vectors();
  // Grid includes points on both sides of the sector-eigenvalue crossing
  // near alpha ~ 2.507.
  for (double alpha : {0.5, 1.0, 1.7, 2.0, 2.4, 2.6, 3.0}) {
    CAPTURE(alpha);
    const Eigen::MatrixXcd eta = numeric_eta8(alpha);
    const QuoctitSpectrum s = quoctit_spectrum(alpha);
    const double scale = std::max(1.0, std::real(s.rho));
    for (int n = 0; n < 8; ++n) {
      const Eigen::VectorXcd v = seeds.col(n);
      const double lam = s.logical_eigenvalue[n];
      CHECK((eta * v - lam * v).cwiseAbs().maxCoeff() < 1e-9 * scale);
    }
  }
}

TEST_CASE("normalizations nu match the seed-vector Gram norms") {
  const Eigen::MatrixXcd seeds = quoctit_seed_vectors();
  const double s3 = std::sqrt(3.0);
  for (double alpha : kAlphaGrid) {
    CAPTURE(alpha);
    const Eigen::MatrixXcd eta = numeric_eta8(alpha);
    const QuoctitSpectrum s = quoctit_spectrum(alpha);
    for (int n = 0; n < 8; ++n) {
      const double norm2 = std::real(seeds.col(n).dot(eta * seeds.col(n)));
      CHECK(std::abs(s.nu[n] * s.nu[n] - norm2) <
            1e-9 * std::max(1.0, norm2));
    }
    // Closed-form cross-identities.
    CHECK(std::abs(s.nu[0] * s.nu[0] - 8.0 * s.lambda1) < 1e-9);
    CHECK(std::abs(s.nu[5] * s.nu[5] - 8.0 * s.lambda4) < 1e-9);
    CHECK(std::abs(s.nu[1] * s.nu[1] -
                   (12.0 - 4.0 * s3) * s.logical_eigenvalue[1]) < 1e-9);
    CHECK(std::abs(s.nu[2] * s.nu[2] -
                   (12.0 + 4.0 * s3) * s.logical_eigenvalue[2]) < 1e-9);
    CHECK(std::abs(s.nu[3] * s.nu[3] -
                   (12.0 - 4.0 * s3) * s.logical_eigenvalue[3]) < 1e-9);
    CHECK(std::abs(s.nu[4] * s.nu[4] -
                   (12.0 + 4.0 * s3) * s.logical_eigenvalue[4]) < 1e-9);
    // The sign-slot closed forms pair across sectors: slots (-,+,-) and
    // (+,+,+) are the norms of logicals 3 and 4, not 1 and 2.
    CHECK(std::abs(quoctit_nu_abc(alpha, -1, +1, -1) - s.nu[3]) < 1e-9);
    CHECK(std::abs(quoctit_nu_abc(alpha, +1, +1, +1) - s.nu[4]) < 1e-9);
    CHECK(std::abs(quoctit_nu_abc(alpha, +1, -1, -1) - s.nu[1]) < 1e-9);
    CHECK(std::abs(quoctit_nu_abc(alpha, -1, -1, +1) - s.nu[2]) < 1e-9);
  }
}

TEST_CASE("quoctit encoding is Gram-orthonormal and equals seeds over nu") {
  const Eigen::MatrixXcd seeds = quoctit_seed_vectors();
  for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.2, 2.6, 3.0}) {
    CAPTURE(alpha);
    const Encoding enc = quoctit_logical(alpha);
    REQUIRE(enc.d == 8);
    REQUIRE(enc.coeffs.rows() == 24);
    CHECK(max_abs(enc.logical_gram() - Eigen::MatrixXcd::Identity(8, 8)) <
          1e-10);
    // Recover codeword-space coefficients: indicators have disjoint support,
    // so ind^T ind = 3 I.
    const Eigen::MatrixXcd w = quoctit_codewords().transpose() * enc.coeffs / 3.0;
    const QuoctitSpectrum s = quoctit_spectrum(alpha);
    for (int n = 0; n < 8; ++n) {
      CHECK((w.col(n) - seeds.col(n) / s.nu[n]).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("degenerate Gram at alpha=0 is rejected") {
  CHECK_THROWS_AS(quoctit_logical(0.0), std::domain_error);
  CHECK_THROWS_AS(qutrit_logical(0.0), std::domain_error);
}

TEST_CASE("qutrit codeword Gram is a real circulant") {
  const double alpha = 1.5;
  const StateBasis basis = group2t_constellation(alpha);
  const Eigen::MatrixXcd ind = qutrit_codewords();
  const Eigen::MatrixXcd eta = ind.adjoint() * basis.gram * ind;
  CHECK(std::abs(eta(0, 0) - 10.4023029546825) < 1e-10);
  CHECK(std::abs(eta(0, 1) - 4.95157021154223) < 1e-10);
  CHECK(std::abs(std::imag(eta(0, 1))) < 1e-12);
  CHECK(std::abs(eta(0, 1) - eta(1, 2)) < 1e-12);
  CHECK(std::abs(eta(1, 2) - eta(2, 0)) < 1e-12);
  CHECK(std::abs(eta(0, 0) - eta(1, 1)) < 1e-12);
  CHECK(std::abs(eta(1, 1) - eta(2, 2)) < 1e-12);
}

TEST_CASE("qutrit encoding: orthonormal, gate-diagonal, printed norms") {
  for (double alpha : kAlphaGrid) {
    CAPTURE(alpha);
    const Encoding enc = qutrit_logical(alpha);
    REQUIRE(enc.d == 3);
    CHECK(max_abs(enc.logical_gram() - Eigen::MatrixXcd::Identity(3, 3)) <
          1e-10);
    const Eigen::MatrixXcd z = logical_gate(enc);
    for (int k = 0; k < 3; ++k) {
      for (int m = 0; m < 3; ++m) {
        const cxd want =
            (k == m) ? std::polar(1.0, -2.0 * kPiTest * k / 3.0) : cxd{0.0, 0.0};
        CHECK(std::abs(z(m, k) - want) < 1e-10);
      }
    }
    // Squared normalizers over unit-normalized codewords: 1/(3(1+2t)) for
    // k=0 and 1/(3(1-t)) for k=1,2, with t the normalized codeword overlap.
    const Eigen::MatrixXcd ind = qutrit_codewords();
    const Eigen::MatrixXcd eta = ind.adjoint() * enc.basis.gram * ind;
    const double t = std::real(eta(0, 1)) / std::real(eta(0, 0));
    const Eigen::MatrixXcd w = ind.transpose() * enc.coeffs / 8.0;
    const double c0 = std::norm(w(0, 0)) * std::real(eta(0, 0));
    const double c1 = std::norm(w(0, 1)) * std::real(eta(0, 0));
    const double c2 = std::norm(w(0, 2)) * std::real(eta(0, 0));
    const double n0 = 1.0 / (3.0 * (1.0 + 2.0 * t));
    const double n12 = 1.0 / (3.0 * (1.0 - t));  // large near alpha -> 0
    CHECK(std::abs(c0 - n0) < 1e-10 * std::max(1.0, n0));
    CHECK(std::abs(c1 - n12) < 1e-10 * std::max(1.0, n12));
    CHECK(std::abs(c2 - n12) < 1e-10 * std::max(1.0, n12));
  }
}

TEST_CASE("gate permutation: order three, cycles qutrit codewords, matches "
          "the two-mode matrix action") {
  const std::vector<int> perm = gate_perm_2t();
  REQUIRE(perm.size() == 24);
  // Order 3.
  for (int s = 0; s < 24; ++s) CHECK(perm[perm[perm[s]]] == s);
  // phi_n -> phi_{n+1}.
  const auto& g = Group2T::instance();
  for (int n = 0; n < 3; ++n) {
    for (int idx : g.left_cosets_q8()[n]) {
      const int block = perm[idx] / 8;
      CHECK(block == (n + 1) % 3);
    }
  }
  // Coherence parameters transform by the 2x2 representation of l.
  const Encoding enc = qutrit_logical(1.3);
  const Eigen::Matrix2cd rep_l =
      g.matrix_rep(g.from_decomposition(0, 0, 0, 1));
  for (int s = 0; s < 24; ++s) {
    const auto& src = enc.basis.states[s];
    const auto& dst = enc.basis.states[perm[s]];
    const Eigen::Vector2cd mapped =
        rep_l * Eigen::Vector2cd(src.alpha1, src.alpha2);
    CHECK(std::abs(mapped(0) - dst.alpha1) < 1e-13);
    CHECK(std::abs(mapped(1) - dst.alpha2) < 1e-13);
  }
  // apply_gate moves codeword indicators.
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(24);
  for (int idx : g.left_cosets_q8()[0]) e0(idx) = 1.0;
  const Eigen::VectorXcd e1 = apply_gate(enc, e0);
  for (int idx : g.left_cosets_q8()[1]) CHECK(e1(idx) == cxd{1.0, 0.0});
  CHECK(e1.cwiseAbs().sum() == doctest::Approx(8.0));
}

TEST_CASE("logical gate of the quoctit: unitary blocks, cube identity, "
          "alpha independent") {
  const Eigen::MatrixXcd u = logical_U8(1.0);
  const Eigen::MatrixXcd u2 = logical_U8(2.0);
  CHECK(max_abs(u - u2) < 1e-9);
  CHECK(max_abs(u.adjoint() * u - Eigen::MatrixXcd::Identity(8, 8)) < 1e-10);
  CHECK(max_abs(u * u * u - Eigen::MatrixXcd::Identity(8, 8)) < 1e-10);
  // Sector block structure: {0}, {1,2}, {3,4}, {5,6,7}.
  const std::vector<std::vector<int>> blocks = {{0}, {1, 2}, {3, 4}, {5, 6, 7}};
  std::vector<int> owner(8);
  for (int b = 0; b < 4; ++b) {
    for (int i : blocks[b]) owner[i] = b;
  }
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (owner[r] != owner[c]) CHECK(std::abs(u(r, c)) < 1e-10);
    }
  }
  CHECK(std::abs(u(0, 0) - 1.0) < 1e-10);

  // Exact entries. q = (1-sqrt3)/4, p = (1+sqrt3)/4, z = (1+sqrt3 i)/(2 sqrt2).
  const double s3 = std::sqrt(3.0);
  const double q = (1.0 - s3) / 4.0, p = (1.0 + s3) / 4.0;
  const cxd z = cxd{1.0, s3} / (2.0 * std::sqrt(2.0));
  Eigen::Matrix2cd first;
  first << cxd{q, p}, -z, z, cxd{p, -q};
  CHECK(max_abs(u.block(1, 1, 2, 2) - first) < 1e-10);
  // Second twofold block is the conjugate of the first.
  CHECK(max_abs(u.block(3, 3, 2, 2) - first.conjugate()) < 1e-10);
  Eigen::Matrix3cd lower;
  lower << cxd{0.0, 0.5}, cxd{0.5, -0.5}, 0.5,
           cxd{0.5, -0.5}, 0.0, cxd{0.5, 0.5},
           0.5, cxd{0.5, 0.5}, cxd{0.0, -0.5};
  CHECK(max_abs(u.block(5, 5, 3, 3) - lower) < 1e-10);

  // The inverse gate (= u^2 = u^dag) carries the reference table entries:
  // lower-block first row (-i/2, 1/2 + i/2, 1/2) and the first twofold block
  // [[q - p i, conj(z)], [-conj(z), p + q i]].
  const Eigen::MatrixXcd uinv = u.adjoint();
  CHECK(max_abs(u * u - uinv) < 1e-10);
  CHECK(std::abs(uinv(5, 5) - cxd{0.0, -0.5}) < 1e-10);
  CHECK(std::abs(uinv(5, 6) - cxd{0.5, 0.5}) < 1e-10);
  CHECK(std::abs(uinv(5, 7) - cxd{0.5, 0.0}) < 1e-10);
  Eigen::Matrix2cd first_inv;
  first_inv << cxd{q, -p}, std::conj(z), -std::conj(z), cxd{p, q};
  CHECK(max_abs(uinv.block(1, 1, 2, 2) - first_inv) < 1e-10);
  // And its second block is forced to be the conjugate of the first by
  // unitarity; the variant with unconjugated off-diagonals is not unitary.
  CHECK(max_abs(uinv.block(3, 3, 2, 2) - first_inv.conjugate()) < 1e-10);
  Eigen::Matrix2cd broken = first_inv.conjugate();
  broken(0, 1) = -std::conj(z);
  broken(1, 0) = std::conj(z);
  CHECK(max_abs(broken.adjoint() * broken - Eigen::Matrix2cd::Identity()) >
        0.5);
}

TEST_CASE("psk d=2 n=1 reduces to the even and odd cat states") {
  const double alpha = 1.2;
  const Encoding enc = psk_encoding(2, 1, alpha);
  REQUIRE(enc.d == 2);
  REQUIRE(enc.basis.size() == 2);
  CHECK(max_abs(enc.logical_gram() - Eigen::MatrixXcd::Identity(2, 2)) <
        1e-12);
  const double ov = std::exp(-2.0 * alpha * alpha);  // <alpha|-alpha>
  const double even = 1.0 / std::sqrt(2.0 * (1.0 + ov));
  const double odd = 1.0 / std::sqrt(2.0 * (1.0 - ov));
  CHECK(std::abs(enc.coeffs(0, 0) - even) < 1e-12);
  CHECK(std::abs(enc.coeffs(1, 0) - even) < 1e-12);
  CHECK(std::abs(enc.coeffs(0, 1) - odd) < 1e-12);
  CHECK(std::abs(enc.coeffs(1, 1) + odd) < 1e-12);
}

TEST_CASE("psk [8,16] at alpha=4: orthonormal, gate acts as a phase gate") {
  const Encoding enc = psk_encoding(8, 2, 4.0);
  REQUIRE(enc.basis.size() == 16);
  REQUIRE(enc.d == 8);
  CHECK(max_abs(enc.logical_gram() - Eigen::MatrixXcd::Identity(8, 8)) <
        1e-9);
  const Eigen::MatrixXcd z = logical_gate(enc);
  for (int k = 0; k < 8; ++k) {
    for (int m = 0; m < 8; ++m) {
      const cxd want =
          (k == m) ? std::polar(1.0, -2.0 * kPiTest * k / 8.0) : cxd{0.0, 0.0};
      CHECK(std::abs(z(m, k) - want) < 1e-9);
    }
  }
  // The rotation permutation maps the constellation onto itself.
  const cxd rot = std::polar(1.0, 2.0 * kPiTest / 16.0);
  for (int t = 0; t < 16; ++t) {
    const auto& src = enc.basis.states[t];
    const auto& dst = enc.basis.states[enc.gate_perm[t]];
    CHECK(std::abs(src.alpha1 * rot - dst.alpha1) < 1e-12);
  }
}

TEST_CASE("psk trivial and degenerate limits") {
  const Encoding triv = psk_encoding(1, 1, 0.7);
  REQUIRE(triv.d == 1);
  CHECK(std::abs(triv.coeffs(0, 0) - 1.0) < 1e-12);
  CHECK_THROWS_AS(psk_encoding(8, 2, 1e-3), std::domain_error);
}

TEST_CASE("random encodings are Gram-orthonormal and seed-deterministic") {
  const StateBasis basis = group2t_constellation(2.0);
  const Encoding a = random_encoding(8, basis, 42);
  const Encoding b = random_encoding(8, basis, 42);
  const Encoding c = random_encoding(8, basis, 43);
  CHECK(max_abs(a.logical_gram() - Eigen::MatrixXcd::Identity(8, 8)) < 1e-9);
  CHECK(max_abs(a.coeffs - b.coeffs) == 0.0);
  CHECK(max_abs(a.coeffs - c.coeffs) > 1e-3);
  CHECK_FALSE(a.has_gate());
  const Encoding d3 = random_encoding(3, basis, 7);
  CHECK(max_abs(d3.logical_gram() - Eigen::MatrixXcd::Identity(3, 3)) < 1e-9);
  CHECK_THROWS_AS(random_encoding(25, basis, 1), std::domain_error);
}

TEST_CASE("encoding json round-trip carries states and coefficients") {
  const Encoding enc = qutrit_logical(1.5);
  std::ostringstream out;
  write_encoding_json(enc, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["label"] == "2T-qutrit");
  CHECK(j["d"] == 3);
  CHECK(j["alpha"] == doctest::Approx(1.5));
  REQUIRE(j["states"].size() == 24);
  REQUIRE(j["coeffs"].size() == 3);
  REQUIRE(j["coeffs"][0].size() == 24);
  const double re00 = j["coeffs"][0][0][0].get<double>();
  CHECK(re00 == doctest::Approx(enc.coeffs(0, 0).real()).epsilon(1e-12));
  CHECK(j["gate_perm"].size() == 24);
}

}  // namespace
}  // namespace q2t
