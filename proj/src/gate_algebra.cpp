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

#include "pswap/gate_algebra.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pswap {

namespace {

using qmath::PureState;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
constexpr Complex kI(0.0, 1.0);

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

CVector vec4(Complex a, Complex b, Complex c, Complex d) {
  CVector v(4);
  v << a, b, c, d;
  return v;
}

}  // namespace

GatePhase::GatePhase(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("GatePhase: phase must be finite");
  }
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  radians_ = r;
}

const PureState& polarization_state(Polarization p) {
  static const std::array<PureState, 6> states = {
      PureState(vec2(1.0, 0.0)),
      PureState(vec2(0.0, 1.0)),
      PureState(vec2(kInvSqrt2, kInvSqrt2)),
      PureState(vec2(kInvSqrt2, -kInvSqrt2)),
      PureState(vec2(kInvSqrt2, kI * kInvSqrt2)),
      PureState(vec2(kInvSqrt2, -kI * kInvSqrt2)),
  };
  return states[static_cast<std::size_t>(p)];
}

char polarization_letter(Polarization p) {
  static constexpr std::array<char, 6> letters = {'H', 'V', 'X', 'Y', 'R', 'L'};
  return letters[static_cast<std::size_t>(p)];
}

std::optional<Polarization> parse_polarization(char letter) {
  for (Polarization p : kAllPolarizations) {
    if (polarization_letter(p) == letter) return p;
  }
  return std::nullopt;
}

PureState product_state(Polarization first, Polarization second) {
  return PureState::normalized(qmath::kron(polarization_state(first).amplitudes(),
                                           polarization_state(second).amplitudes()));
}

const BellBasis& bell_basis() {
  static const BellBasis basis{
      PureState(vec4(0.0, kInvSqrt2, -kInvSqrt2, 0.0)),
      PureState(vec4(0.0, kInvSqrt2, kInvSqrt2, 0.0)),
      PureState(vec4(kInvSqrt2, 0.0, 0.0, kInvSqrt2)),
      PureState(vec4(kInvSqrt2, 0.0, 0.0, -kInvSqrt2)),
  };
  return basis;
}

const ProjectorPair& symmetry_projectors() {
  static const ProjectorPair pair = [] {
    const CMatrix minus = bell_basis().psi_minus.projector();
    return ProjectorPair{minus, CMatrix::Identity(4, 4) - minus};
  }();
  return pair;
}

CMatrix swap_operator() {
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = 1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 3) = 1.0;
  return s;
}

CMatrix partial_swap_unitary(GatePhase phi) {
  return partial_symmetrizer(phi, 1.0);
}

CMatrix partial_symmetrizer(GatePhase phi, double epsilon) {
  const ProjectorPair& p = symmetry_projectors();
  return p.pi_plus + epsilon * std::polar(1.0, phi.radians()) * p.pi_minus;
}

ChoiMatrix ideal_choi(GatePhase phi) {
  const std::array<double, 1> weights = {1.0};
  const std::array<CMatrix, 1> ops = {partial_swap_unitary(phi)};
  return ChoiMatrix::from_operators(weights, ops, ChoiScale::kInputDimension);
}

EfInput::EfInput(Complex a, Complex b, GatePhase p) : alpha(a), beta(b), phi(p) {
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > qmath::kNormTolerance) {
    throw std::invalid_argument("EfInput: |alpha|^2 + |beta|^2 must equal 1");
  }
}

PureState orthogonal_state(const PureState& psi) {
  if (psi.dim() != 2) throw std::invalid_argument("orthogonal_state: need a qubit");
  return PureState(vec2(-std::conj(psi[1]), std::conj(psi[0])));
}

PureState analytic_output(const EfInput& input, const PureState& psi) {
  const CVector& s = psi.amplitudes();
  const CVector perp = orthogonal_state(psi).amplitudes();
  const double half = 0.5 * input.phi.radians();
  const Complex lead = input.beta * std::polar(1.0, half);
  const CVector out = input.alpha * qmath::kron(s, s) +
                      lead * std::cos(half) * qmath::kron(s, perp) -
                      lead * kI * std::sin(half) * qmath::kron(perp, s);
  return PureState::normalized(out);
}

double analytic_ef(const EfInput& input) {
  const double b2 = std::norm(input.beta);
  const double s = std::sin(input.phi.radians());
  const double x = 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - b2 * b2 * s * s)));
  return qmath::binary_entropy(x);
}

}  // namespace pswap
