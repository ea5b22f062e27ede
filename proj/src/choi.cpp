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

#include "pswap/choi.hpp"

#include <stdexcept>

namespace pswap {

std::string_view to_string(ChoiScale scale) {
  switch (scale) {
    case ChoiScale::kInputDimension:
      return "input-dimension";
    case ChoiScale::kSuccessProbability:
      return "success-probability";
    case ChoiScale::kUnspecified:
      break;
  }
  return "unspecified";
}

ChoiMatrix::ChoiMatrix(CMatrix entries, ChoiScale scale)
    : entries_(std::move(entries)), scale_(scale) {
  if (entries_.rows() != kDim || entries_.cols() != kDim) {
    throw std::invalid_argument("ChoiMatrix: expected a 16x16 operator");
  }
  if (!qmath::is_hermitian(entries_)) {
    throw std::invalid_argument("ChoiMatrix: operator is not Hermitian");
  }
  entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
  qmath::psd_spectrum(entries_);
}

ChoiMatrix ChoiMatrix::from_operators(std::span<const double> weights,
                                      std::span<const CMatrix> operators,
                                      ChoiScale scale) {
  if (weights.size() != operators.size()) {
    throw std::invalid_argument("ChoiMatrix: weight/operator count mismatch");
  }
  CMatrix chi = CMatrix::Zero(kDim, kDim);
  for (std::size_t k = 0; k < operators.size(); ++k) {
    const CMatrix& a = operators[k];
    if (a.rows() != kSubsystemDim || a.cols() != kSubsystemDim) {
      throw std::invalid_argument("ChoiMatrix: operators must be 4x4");
    }
    // |A>> = sum_i |i> (x) A|i>
    CVector vec(kDim);
    for (Eigen::Index i = 0; i < kSubsystemDim; ++i) {
      vec.segment(i * kSubsystemDim, kSubsystemDim) = a.col(i);
    }
    chi += weights[k] * vec * vec.adjoint();
  }
  return ChoiMatrix(std::move(chi), scale);
}

ChoiMatrix ChoiMatrix::rescaled(double factor, ChoiScale scale) const {
  if (!(factor > 0.0)) throw std::invalid_argument("ChoiMatrix: scale must be positive");
  return ChoiMatrix(entries_ * factor, scale);
}

CMatrix ChoiMatrix::apply(const CMatrix& rho_in) const {
  if (rho_in.rows() != kSubsystemDim || rho_in.cols() != kSubsystemDim) {
    throw std::invalid_argument("ChoiMatrix::apply: input must be 4x4");
  }
  // Tr_in[chi (rho^T (x) I)] = sum_ij rho_ij <i|chi|j>_in
  CMatrix out = CMatrix::Zero(kSubsystemDim, kSubsystemDim);
  for (Eigen::Index i = 0; i < kSubsystemDim; ++i) {
    for (Eigen::Index j = 0; j < kSubsystemDim; ++j) {
      out += rho_in(i, j) * entries_.block(i * kSubsystemDim, j * kSubsystemDim,
                                           kSubsystemDim, kSubsystemDim);
    }
  }
  return out;
}

}  // namespace pswap
