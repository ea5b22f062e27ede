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

#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "pswap/choi.hpp"
#include "pswap/qmath.hpp"

namespace pswap {

/** Interferometer phase in radians, reduced to [0, 2pi). */
class GatePhase {
 public:
  explicit GatePhase(double radians);
  double radians() const { return radians_; }

 private:
  double radians_;
};

enum class Polarization { kH, kV, kX, kY, kR, kL };

inline constexpr std::array<Polarization, 6> kAllPolarizations = {
    Polarization::kH, Polarization::kV, Polarization::kX,
    Polarization::kY, Polarization::kR, Polarization::kL};

/** H, V, X=(H+V)/sqrt2, Y=(H-V)/sqrt2, R=(H+iV)/sqrt2, L=(H-iV)/sqrt2. */
const qmath::PureState& polarization_state(Polarization p);
char polarization_letter(Polarization p);
std::optional<Polarization> parse_polarization(char letter);

qmath::PureState product_state(Polarization first, Polarization second);

struct BellBasis {
  qmath::PureState psi_minus;
  qmath::PureState psi_plus;
  qmath::PureState phi_plus;
  qmath::PureState phi_minus;
};

const BellBasis& bell_basis();

struct ProjectorPair {
  CMatrix pi_minus;  // singlet, rank 1
  CMatrix pi_plus;   // symmetric subspace, rank 3
};

const ProjectorPair& symmetry_projectors();
CMatrix swap_operator();

/** U = Pi_+ + e^{i phi} Pi_-. */
CMatrix partial_swap_unitary(GatePhase phi);
/** Pi_+ + epsilon e^{i phi} Pi_-, the conditional filter with a damped singlet. */
CMatrix partial_symmetrizer(GatePhase phi, double epsilon);

ChoiMatrix ideal_choi(GatePhase phi);

/** Input |psi>(alpha|psi> + beta|psi_perp>) of the entangling-power family. */
struct EfInput {
  EfInput(Complex alpha, Complex beta, GatePhase phi);
  Complex alpha;
  Complex beta;
  GatePhase phi;
};

/** psi_perp = (-b^*, a^*) for psi = (a, b). */
qmath::PureState orthogonal_state(const qmath::PureState& psi);

/**
 * alpha|psi psi> + beta e^{i phi/2}(cos(phi/2)|psi psi_perp>
 *   - i sin(phi/2)|psi_perp psi>).
 */
qmath::PureState analytic_output(const EfInput& input, const qmath::PureState& psi);

/** Binary entropy at x = (1 + sqrt(1 - |beta|^4 sin^2 phi)) / 2. */
double analytic_ef(const EfInput& input);

}  // namespace pswap
