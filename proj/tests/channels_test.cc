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
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "qudit2t/constellation.h"

using namespace q2t;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

namespace {

double unit_double(std::mt19937_64& rng) { return (double((rng)() >> 11) + 0.5) * 0x1.0p-53; }

MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  MatrixXcd a(n, n);
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n; j++) a(i, j) = cxd(unit_double(rng) - 0.5, unit_double(rng) - 0.5);
  }
  return 0.5 * (a + a.adjoint());
}

// Direct power-series Kraus weight sqrt(gamma^l / l!) beta^l e^{-gamma|beta|^2/2},
// no log rescues: independent of the implementation path.
cxd kraus_weight_direct(cxd beta, double gamma, int l) {
  double fact = 1.0;
  for (int t = 2; t <= l; t++) fact *= t;
  return std::sqrt(std::pow(gamma, l) / fact) * std::pow(beta, l) *
         std::exp(-0.5 * gamma * std::norm(beta));
}

// <b_i'|Y|b_j'> for Y in the frame of `fr`: frame-independent physical elements.
MatrixXcd physical_elements(const OrthoFrame& fr, const MatrixXcd& y) {
  return fr.to_frame.adjoint() * y * fr.to_frame;
}

}  // namespace

TEST_CASE("loss on a coherent state: limits and weight normalization") {
  auto id = loss_on_coherent(cxd(1.4, -0.3), 0.0);
  CHECK(std::abs(id.damped - cxd(1.4, -0.3)) < 1e-15);
  CHECK(std::abs(id.weights(0) - 1.0) < 1e-15);
  CHECK(id.weights.tail(id.weights.size() - 1).cwiseAbs().maxCoeff() == 0.0);

  auto vac = loss_on_coherent(cxd(0, 0), 0.37);
  CHECK(std::abs(vac.weights(0) - 1.0) < 1e-15);
  CHECK(vac.weights.tail(vac.weights.size() - 1).cwiseAbs().maxCoeff() == 0.0);

  cxd beta(1.7, 0.6);
  auto act = loss_on_coherent(beta, 0.23);
  CHECK(std::abs(act.damped - std::sqrt(0.77) * beta) < 1e-15);
  CHECK(std::abs(act.weights.squaredNorm() - 1.0) < 1e-12);
  for (int l = 0; l <= 12; l++) {
    CHECK(std::abs(act.weights(l) - kraus_weight_direct(beta, 0.23, l)) < 1e-14);
  }

  CHECK_THROWS_AS(loss_on_coherent(beta, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(loss_on_coherent(beta, 1.0), std::invalid_argument);
}

TEST_CASE("closed-form dyad weights match the truncated Kraus sum") {
  StateBasis basis = group2t_constellation(2.0);
  ChannelRep ch = loss_superop(basis, 0.1);
  double worst = 0.0;
  for (int i = 0; i < basis.size(); i++) {
    for (int j = 0; j < basis.size(); j++) {
      cxd s1(0, 0), s2(0, 0);
      for (int l = 0; l <= 40; l++) {
        s1 += kraus_weight_direct(basis.states[i].alpha1, 0.1, l) *
              std::conj(kraus_weight_direct(basis.states[j].alpha1, 0.1, l));
        s2 += kraus_weight_direct(basis.states[i].alpha2, 0.1, l) *
              std::conj(kraus_weight_direct(basis.states[j].alpha2, 0.1, l));
      }
      worst = std::max(worst, std::abs(s1 * s2 - ch.dyad_weights(i, j)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("diagonal dyads keep weight one and traces survive exactly") {
  StateBasis basis = group2t_constellation(2.0);
  for (double gamma : {0.1, 0.35}) {
    ChannelRep ch = loss_superop(basis, gamma);
    for (int i = 0; i < basis.size(); i++) {
      CHECK(std::abs(ch.dyad_weights(i, i) - 1.0) < 1e-15);
    }
    // Weighted dyad traces reproduce the input dyad traces entry by entry.
    const MatrixXcd& gin = basis.gram;
    const MatrixXcd& gout = ch.out_basis.gram;
    double worst = 0.0;
    for (int i = 0; i < basis.size(); i++) {
      for (int j = 0; j < basis.size(); j++) {
        worst = std::max(worst, std::abs(ch.dyad_weights(i, j) * gout(j, i) - gin(j, i)));
      }
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("apply_channel: identity at gamma=0, trace preservation, gamma->1 collapse") {
  StateBasis basis = group2t_constellation(1.5);

  ChannelRep id = loss_superop(basis, 0.0);
  MatrixXcd x0 = random_hermitian(id.in_frame.rank, 11);
  CHECK((apply_channel(id, x0) - x0).cwiseAbs().maxCoeff() < 1e-12);

  ChannelRep ch = loss_superop(basis, 0.12);
  MatrixXcd x = random_hermitian(ch.in_frame.rank, 12);
  MatrixXcd y = apply_channel(ch, x);
  CHECK(std::abs(y.trace() - x.trace()) < 1e-11);
  CHECK_THROWS_AS(apply_channel(ch, MatrixXcd::Identity(3, 3)), std::invalid_argument);

  // Near-total loss: everything lands on (a state indistinguishable from) vacuum.
  ChannelRep crush = loss_superop(basis, 1.0 - 1e-6);
  int r = crush.in_frame.rank;
  MatrixXcd mixed = MatrixXcd::Identity(r, r) / double(r);
  MatrixXcd out = apply_channel(crush, mixed);
  CHECK(std::abs(out.trace() - 1.0) < 1e-4);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(out);
  CHECK(es.eigenvalues().maxCoeff() > 1.0 - 1e-4);
}

TEST_CASE("frame Kraus operators: completeness and channel agreement") {
  StateBasis basis = group2t_constellation(1.5);
  ChannelRep ch = loss_superop(basis, 0.2);
  auto kraus = loss_kraus_frame(ch);
  REQUIRE(!kraus.empty());

  MatrixXcd comp = MatrixXcd::Zero(ch.in_frame.rank, ch.in_frame.rank);
  for (const auto& k : kraus) comp += k.adjoint() * k;
  CHECK((comp - MatrixXcd::Identity(ch.in_frame.rank, ch.in_frame.rank)).cwiseAbs().maxCoeff() <
        1e-9);

  MatrixXcd x = random_hermitian(ch.in_frame.rank, 5);
  MatrixXcd direct = apply_channel(ch, x);
  MatrixXcd viaKraus = MatrixXcd::Zero(direct.rows(), direct.cols());
  for (const auto& k : kraus) viaKraus += k * x * k.adjoint();
  CHECK((direct - viaKraus).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("liouville matrix reproduces apply_channel on vectorized operators") {
  StateBasis basis = group2t_constellation(1.5);
  ChannelRep ch = loss_superop(basis, 0.07);
  MatrixXcd lv = loss_liouville(ch);
  REQUIRE(lv.rows() == ch.out_frame.rank * ch.out_frame.rank);
  REQUIRE(lv.cols() == ch.in_frame.rank * ch.in_frame.rank);

  MatrixXcd x = random_hermitian(ch.in_frame.rank, 77);
  MatrixXcd y = apply_channel(ch, x);
  VectorXcd vx = Eigen::Map<const VectorXcd>(x.data(), x.size());
  VectorXcd vy = Eigen::Map<const VectorXcd>(y.data(), y.size());
  CHECK((lv * vx - vy).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("loss is a semigroup in gamma") {
  StateBasis basis = group2t_constellation(1.5);
  ChannelRep first = loss_superop(basis, 0.1);
  ChannelRep second = loss_superop(first.out_basis, 0.2);
  ChannelRep fused = loss_superop(basis, 1.0 - 0.9 * 0.8);

  MatrixXcd x = random_hermitian(first.in_frame.rank, 3);
  MatrixXcd chained = apply_channel(second, apply_channel(first, x));
  MatrixXcd direct = apply_channel(fused, x);
  // Compare physical matrix elements between the damped states; the two
  // output frames come from Grams differing only in rounding.
  MatrixXcd pa = physical_elements(second.out_frame, chained);
  MatrixXcd pb = physical_elements(fused.out_frame, direct);
  CHECK((pa - pb).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("single-mode constellations ride through with the vacuum mode inert") {
  StateBasis ring = psk_constellation(4, 1, 2.2);
  ChannelRep ch = compose_two_mode(loss_superop(ring, 0.2));
  CHECK(ch.kind == ChannelKind::kComposed);

  VectorXcd t0 = ch.in_frame.to_frame.col(0);
  MatrixXcd y = apply_channel(ch, t0 * t0.adjoint());
  CHECK(std::abs(y.trace() - 1.0) < 1e-10);
  // Output is exactly the damped first state.
  VectorXcd d0 = ch.out_frame.to_frame.col(0);
  CHECK(std::abs((d0.adjoint() * y * d0)(0, 0) - 1.0) < 1e-10);
}

TEST_CASE("dephasing multiplier: identity, populations, Kraus oracle") {
  ChannelRep none = dephasing_fock(6, 0.0);
  CHECK((none.schur - MatrixXd::Ones(none.fock.size(), none.fock.size())).cwiseAbs().maxCoeff() ==
        0.0);

  ChannelRep ch = dephasing_fock(8, 0.05);
  for (int a = 0; a < ch.fock.size(); a++) CHECK(ch.schur(a, a) == 1.0);

  // Truncated two-mode Kraus composition: K_{l1} (x) K_{l2}, l1, l2 <= 40.
  auto weight = [](double delta, int m, int l) {
    double fact = 1.0;
    for (int t = 2; t <= l; t++) fact *= t;
    return std::sqrt(std::pow(delta, l) / fact) * std::pow(double(m), l) *
           std::exp(-0.5 * delta * m * m);
  };
  double worst = 0.0;
  for (int a = 0; a < ch.fock.size(); a++) {
    for (int b = 0; b < ch.fock.size(); b++) {
      auto [m1, m2] = ch.fock.levels[a];
      auto [n1, n2] = ch.fock.levels[b];
      double sum = 0.0;
      for (int l1 = 0; l1 <= 40; l1++) {
        for (int l2 = 0; l2 <= 40; l2++) {
          sum += weight(0.05, m1, l1) * weight(0.05, n1, l1) * weight(0.05, m2, l2) *
                 weight(0.05, n2, l2);
        }
      }
      worst = std::max(worst, std::abs(sum - ch.schur(a, b)));
    }
  }
  CHECK(worst <= 1e-10);

  // Populations are untouched by apply_channel for any delta.
  MatrixXcd x = random_hermitian(ch.fock.size(), 9);
  MatrixXcd y = apply_channel(ch, x);
  CHECK((y.diagonal() - x.diagonal()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(y.trace() - x.trace()) == 0.0);
}

TEST_CASE("dephasing strengths add exactly") {
  ChannelRep a = dephasing_fock(8, 0.03);
  ChannelRep b = dephasing_fock(8, 0.04);
  ChannelRep c = dephasing_fock(8, 0.07);
  CHECK((a.schur.cwiseProduct(b.schur) - c.schur).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("two-mode composition of single-mode dephasing") {
  ChannelRep mode = dephasing_single_mode(4, 0.05);
  REQUIRE(mode.fock.size() == 5);
  ChannelRep both = compose_two_mode(mode);
  ChannelRep ref = dephasing_fock(8, 0.05);
  REQUIRE(both.fock.size() == ref.fock.size());
  for (int a = 0; a < both.fock.size(); a++) CHECK(both.fock.levels[a] == ref.fock.levels[a]);
  CHECK((both.schur - ref.schur).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(both.n_modes == 2);

  ChannelRep trivial = compose_two_mode(dephasing_single_mode(4, 0.0));
  CHECK((trivial.schur - MatrixXd::Ones(trivial.fock.size(), trivial.fock.size()))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  CHECK_THROWS_AS(compose_two_mode(ref), std::invalid_argument);
}

TEST_CASE("lifetimes map to per-cycle rates") {
  NoiseRates zero = lifetimes_to_rates(0.0, 15.6e-3, 43.2e-3);
  CHECK(zero.gamma == 0.0);
  CHECK(zero.delta == 0.0);

  NoiseRates r = lifetimes_to_rates(60e-6, 15.6e-3, 43.2e-3);
  CHECK(std::abs(r.gamma - (1.0 - std::exp(-60e-6 / 15.6e-3))) < 1e-12);
  CHECK(std::abs(r.gamma - 3.8387669e-3) < 1e-7);
  CHECK(std::abs(r.delta - 60e-6 / 43.2e-3) < 1e-18);
  CHECK(std::abs(r.delta - 1.3888889e-3) < 1e-9);

  CHECK_THROWS_AS(lifetimes_to_rates(-1e-6, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lifetimes_to_rates(1e-6, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lifetimes_to_rates(1e-6, 1.0, 0.0), std::invalid_argument);
}
