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

#include <span>
#include <string_view>

#include "pswap/qmath.hpp"

namespace pswap {

/** How the overall scale of a ChoiMatrix was fixed. */
enum class ChoiScale {
  /** Tr[chi] equals the input dimension (trace-preserving scale). */
  kInputDimension,
  /** Tr[rho_out] equals the absolute post-selection success probability. */
  kSuccessProbability,
  kUnspecified,
};

std::string_view to_string(ChoiScale scale);

/**
 * Choi operator of a two-qubit process on H_in (x) H_out, input factor
 * first. A map acts as rho_out = Tr_in[chi (rho_in^T (x) I)], with the
 * transpose taken in the fixed HH,HV,VH,VV basis.
 */
class ChoiMatrix {
 public:
  static constexpr Eigen::Index kSubsystemDim = 4;
  static constexpr Eigen::Index kDim = 16;

  explicit ChoiMatrix(CMatrix entries, ChoiScale scale = ChoiScale::kUnspecified);

  /** chi = sum_k w_k |A_k>><<A_k| for operators A_k acting on the input. */
  static ChoiMatrix from_operators(std::span<const double> weights,
                                   std::span<const CMatrix> operators,
                                   ChoiScale scale = ChoiScale::kUnspecified);

  const CMatrix& matrix() const { return entries_; }
  ChoiScale scale() const { return scale_; }
  double trace() const { return entries_.trace().real(); }
  ChoiMatrix rescaled(double factor, ChoiScale scale) const;

  /** Unnormalized Tr_in[chi (rho_in^T (x) I)]. */
  CMatrix apply(const CMatrix& rho_in) const;

 private:
  CMatrix entries_;
  ChoiScale scale_;
};

}  // namespace pswap
