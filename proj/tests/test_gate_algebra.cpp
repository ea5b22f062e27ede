// Copyright 2026 The pswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pswap/gate_algebra.hpp"
#include "pswap/measurement.hpp"
#include "pswap/tomography.hpp"
#include "support.hpp"

using namespace pswap;
using testing::kI;

namespace {

constexpr double kPi = std::numbers::pi;

CVector basis4(int k) {
  CVector v = CVector::Zero(4);
  v[k] = 1.0;
  return v;
}

// SWAP written out by hand: |HV> <-> |VH>.
CMatrix hand_swap() {
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = s(3, 3) = 1.0;
  s(1, 2) = s(2, 1) = 1.0;
  return s;
}

}  // namespace

TEST_CASE("GatePhase reduces into [0, 2pi)") {
  CHECK(GatePhase(0.0).radians() == 0.0);
  CHECK(GatePhase(2.0 * kPi).radians() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(GatePhase(-kPi / 2).radians() == doctest::Approx(3 * kPi / 2).epsilon(1e-15));
  CHECK(GatePhase(7.0).radians() == doctest::Approx(7.0 - 2 * kPi).epsilon(1e-15));
  CHECK_THROWS(GatePhase(std::nan("")));
  CHECK_THROWS(GatePhase(INFINITY));
}

TEST_CASE("polarization states") {
  const double s = 1.0 / std::sqrt(2.0);
  auto amp = [](Polarization p) { return polarization_state(p).amplitudes(); };
  CHECK(amp(Polarization::kX)[0] == Complex(s, 0));
  CHECK(amp(Polarization::kY)[1] == Complex(-s, 0));
  CHECK(amp(Polarization::kR)[1] == Complex(0, s));
  CHECK(amp(Polarization::kL)[1] == Complex(0, -s));
  for (Polarization p : kAllPolarizations) {
    CHECK(parse_polarization(polarization_letter(p)) == p);
    CHECK(amp(p).norm() == doctest::Approx(1.0).epsilon(1e-16));
  }
  CHECK_FALSE(parse_polarization('Q').has_value());
}

TEST_CASE("Bell basis and symmetry projectors") {
  const auto& b = bell_basis();
  const CVector* states[] = {&b.psi_minus.amplitudes(), &b.psi_plus.amplitudes(),
                             &b.phi_plus.amplitudes(), &b.phi_minus.amplitudes()};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(states[i]->dot(*states[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);

  const auto& pr = symmetry_projectors();
  const CMatrix id = CMatrix::Identity(4, 4);
  CHECK((pr.pi_plus * pr.pi_plus - pr.pi_plus).norm() < 1e-12);
  CHECK((pr.pi_minus * pr.pi_minus - pr.pi_minus).norm() < 1e-12);
  CHECK((pr.pi_plus + pr.pi_minus - id).norm() < 1e-12);
  CHECK((pr.pi_plus * pr.pi_minus).norm() < 1e-12);
  CHECK(pr.pi_minus.trace().real() == doctest::Approx(1.0));
  CHECK(pr.pi_plus.trace().real() == doctest::Approx(3.0));

  // Pi_pm = (I +- SWAP) / 2
  CHECK((pr.pi_plus - 0.5 * (id + hand_swap())).norm() < 1e-15);
  CHECK((swap_operator() - hand_swap()).norm() == 0.0);
}

TEST_CASE("partial swap unitary") {
  SUBCASE("identity and SWAP endpoints") {
    CHECK((partial_swap_unitary(GatePhase(0.0)) - CMatrix::Identity(4, 4)).norm() < 1e-15);
    CHECK((partial_swap_unitary(GatePhase(kPi)) - hand_swap()).norm() < 1e-15);
  }
  SUBCASE("square root of SWAP on |VH>") {
    CVector out = partial_swap_unitary(GatePhase(kPi / 2)) * basis4(2);
    CVector expected = std::polar(1.0, kPi / 4) *
                       (std::cos(kPi / 4) * basis4(2) - kI * std::sin(kPi / 4) * basis4(1));
    CHECK((out - expected).norm() < 1e-15);
  }
  SUBCASE("spectrum and Bell action") {
    const auto& b = bell_basis();
    for (double phi : {0.1, 1.0, 2.5, 4.0, 6.0}) {
      CMatrix u = partial_swap_unitary(GatePhase(phi));
      CHECK((u.adjoint() * u - CMatrix::Identity(4, 4)).norm() < 1e-12);
      CVector s = u * b.psi_minus.amplitudes();
      CHECK((s - std::polar(1.0, phi) * b.psi_minus.amplitudes()).norm() < 1e-12);
      for (const auto* t : {&b.psi_plus, &b.phi_plus, &b.phi_minus}) {
        CVector o = u * t->amplitudes();
        CHECK((o - t->amplitudes()).norm() < 1e-12);
      }
    }
  }
  SUBCASE("one-parameter group") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
      double a = angle(rng), b = angle(rng);
      CMatrix ua = partial_swap_unitary(GatePhase(a));
      CHECK((ua * partial_swap_unitary(GatePhase(-a)) - CMatrix::Identity(4, 4)).norm() < 1e-12);
      CHECK((ua * partial_swap_unitary(GatePhase(b)) - partial_swap_unitary(GatePhase(a + b)))
                .norm() < 1e-12);
    }
  }
  SUBCASE("collective rotation covariance") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
      CMatrix v = testing::random_unitary(2, rng);
      CMatrix vv = testing::kron2(v, v);
      CMatrix u = partial_swap_unitary(GatePhase(0.37 * trial));
      CHECK((u * vv - vv * u).norm() < 1e-10);
    }
  }
}

TEST_CASE("partial symmetrizer") {
  const auto& pr = symmetry_projectors();
  CMatrix f = partial_symmetrizer(GatePhase(1.2), 0.5);
  CHECK((f - (pr.pi_plus + 0.5 * std::polar(1.0, 1.2) * pr.pi_minus)).norm() < 1e-15);
  CHECK((partial_symmetrizer(GatePhase(0.8), 1.0) - partial_swap_unitary(GatePhase(0.8))).norm() <
        1e-15);
  CHECK((partial_symmetrizer(GatePhase(0.8), 0.0) - pr.pi_plus).norm() < 1e-15);
}

TEST_CASE("ideal Choi matrix") {
  std::mt19937_64 rng(37);
  for (double phi : {0.0, kPi / 4, kPi / 2, kPi, 5.0}) {
    const ChoiMatrix chi = ideal_choi(GatePhase(phi));
    CHECK(chi.scale() == ChoiScale::kInputDimension);
    CHECK(chi.trace() == doctest::Approx(4.0).epsilon(1e-14));
    auto spectrum = qmath::psd_spectrum(chi.matrix());
    CHECK(spectrum[15] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(spectrum.head(15).cwiseAbs().maxCoeff() < 1e-12);

    const CMatrix u = partial_swap_unitary(GatePhase(phi));
    for (int trial = 0; trial < 20; ++trial) {
      CMatrix rho = testing::random_density(4, rng);
      CHECK((chi.apply(rho) - u * rho * u.adjoint()).norm() < 1e-12);
    }
    CHECK(tomography::process_fidelity(chi, chi) == doctest::Approx(1.0).epsilon(1e-14));
  }

  SUBCASE("identity Choi is the maximally entangled projector") {
    CVector omega = CVector::Zero(16);
    for (int i = 0; i < 4; ++i) omega[5 * i] = 1.0;
    CHECK((ideal_choi(GatePhase(0.0)).matrix() - omega * omega.adjoint()).norm() < 1e-15);
  }
  SUBCASE("identity versus SWAP") {
    const CMatrix a = ideal_choi(GatePhase(0.0)).matrix(), b = ideal_choi(GatePhase(kPi)).matrix();
    // |Tr(U^dagger V)|^2 with U = I, V = SWAP is |2|^2.
    const double overlap = std::norm(hand_swap().trace());
    CHECK((a * b).trace().real() == doctest::Approx(overlap).epsilon(1e-14));
    CHECK(tomography::process_fidelity(ideal_choi(GatePhase(0.0)), ideal_choi(GatePhase(kPi))) ==
          doctest::Approx(overlap / 16.0).epsilon(1e-14));
  }
  SUBCASE("Choi fidelity against the trace overlap formula") {
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    for (int trial = 0; trial < 50; ++trial) {
      double a = angle(rng), b = angle(rng);
      Complex tr = (partial_swap_unitary(GatePhase(a)).adjoint() * partial_swap_unitary(GatePhase(b)))
                       .trace();
      CHECK(tomography::process_fidelity(ideal_choi(GatePhase(a)), ideal_choi(GatePhase(b))) ==
            doctest::Approx(std::norm(tr) / 16.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("analytic output family") {
  std::mt19937_64 rng(41);
  SUBCASE("matches U_phi on random inputs") {
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    for (int trial = 0; trial < 200; ++trial) {
      qmath::PureState psi(testing::random_vector(2, rng));
      CVector ab = testing::random_vector(2, rng);
      EfInput in(ab[0], ab[1], GatePhase(angle(rng)));
      CVector second = in.alpha * psi.amplitudes() + in.beta * orthogonal_state(psi).amplitudes();
      CVector direct = partial_swap_unitary(in.phi) * qmath::kron(psi.amplitudes(), second);
      qmath::PureState out = analytic_output(in, psi);
      CHECK(qmath::phase_insensitive_overlap(out.amplitudes(), direct) ==
            doctest::Approx(1.0).epsilon(1e-12));
      // The display formula is exact, not just up to phase.
      CHECK((out.amplitudes() - direct).norm() < 1e-12);
    }
  }
  SUBCASE("orthogonal state") {
    for (int trial = 0; trial < 20; ++trial) {
      qmath::PureState psi(testing::random_vector(2, rng));
      CHECK(std::abs(psi.amplitudes().dot(orthogonal_state(psi).amplitudes())) < 1e-15);
    }
  }
  SUBCASE("alpha = 1 leaves |psi psi> unchanged") {
    qmath::PureState psi(testing::random_vector(2, rng));
    for (double phi : {0.3, 2.0, 4.4}) {
      auto out = analytic_output(EfInput(1.0, 0.0, GatePhase(phi)), psi);
      CVector pp = qmath::kron(psi.amplitudes(), psi.amplitudes());
      CHECK((out.amplitudes() - pp).norm() < 1e-14);
    }
  }
  SUBCASE("beta = 1 at pi is SWAP") {
    qmath::PureState psi(testing::random_vector(2, rng));
    auto perp = orthogonal_state(psi);
    auto out = analytic_output(EfInput(0.0, 1.0, GatePhase(kPi)), psi);
    CVector swapped = qmath::kron(perp.amplitudes(), psi.amplitudes());
    CHECK(qmath::phase_insensitive_overlap(out.amplitudes(), swapped) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("beta = 1 at pi/2 is balanced with ratio -i") {
    qmath::PureState psi(testing::random_vector(2, rng));
    auto perp = orthogonal_state(psi);
    CVector out = analytic_output(EfInput(0.0, 1.0, GatePhase(kPi / 2)), psi).amplitudes();
    Complex c1 = qmath::kron(psi.amplitudes(), perp.amplitudes()).dot(out);
    Complex c2 = qmath::kron(perp.amplitudes(), psi.amplitudes()).dot(out);
    CHECK(std::abs(c1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(c2 / c1 - Complex(0, -1)) < 1e-14);
  }
}

TEST_CASE("analytic entanglement of formation") {
  CHECK(analytic_ef(EfInput(0.0, 1.0, GatePhase(kPi / 2))) == doctest::Approx(1.0).epsilon(1e-12));
  for (double phi : measurement::phase_grid(8, 16)) {
    CHECK(analytic_ef(EfInput(1.0, 0.0, GatePhase(phi))) == 0.0);
  }
  const double s = 1.0 / std::sqrt(2.0);
  const double x = (1.0 + std::sqrt(3.0) / 2.0) / 2.0;
  CHECK(analytic_ef(EfInput(s, s, GatePhase(kPi / 2))) == doctest::Approx(testing::h2(x)).epsilon(1e-13));
  CHECK(analytic_ef(EfInput(s, s, GatePhase(kPi / 2))) == doctest::Approx(0.3546).epsilon(1e-4));

  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  SUBCASE("equals the Wootters formula on the output state") {
    for (int trial = 0; trial < 300; ++trial) {
      qmath::PureState psi(testing::random_vector(2, rng));
      CVector ab = testing::random_vector(2, rng);
      EfInput in(ab[0], ab[1], GatePhase(angle(rng)));
      auto out = analytic_output(in, psi);
      CHECK(analytic_ef(in) ==
            doctest::Approx(qmath::eof_two_qubit(qmath::DensityMatrix::from_pure(out))).epsilon(1e-9));
    }
  }
  SUBCASE("even about pi and dependent on |beta| only") {
    for (int trial = 0; trial < 100; ++trial) {
      CVector ab = testing::random_vector(2, rng);
      double d = angle(rng) / 2.0;
      double e1 = analytic_ef(EfInput(ab[0], ab[1], GatePhase(kPi + d)));
      double e2 = analytic_ef(EfInput(ab[0], ab[1], GatePhase(kPi - d)));
      CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
      Complex rotated_beta = std::polar(std::abs(ab[1]), angle(rng));
      Complex rotated_alpha = std::polar(std::abs(ab[0]), angle(rng));
      CHECK(analytic_ef(EfInput(rotated_alpha, rotated_beta, GatePhase(kPi + d))) ==
            doctest::Approx(e1).epsilon(1e-12));
    }
  }
  SUBCASE("maxima at pi/2 and 3pi/2") {
    for (double b2 : {0.2, 0.5, 0.9, 1.0}) {
      EfInput probe(std::sqrt(1 - b2), std::sqrt(b2), GatePhase(0.0));
      auto ef = [&](double phi) {
        return analytic_ef(EfInput(probe.alpha, probe.beta, GatePhase(phi)));
      };
      const double peak = ef(kPi / 2);
      CHECK(ef(3 * kPi / 2) == doctest::Approx(peak).epsilon(1e-12));
      for (int k = 0; k <= 64; ++k) CHECK(ef(2 * kPi * k / 64.0) <= peak + 1e-12);
    }
  }
  CHECK_THROWS(EfInput(1.0, 1.0, GatePhase(0.0)));
}
