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

#include "pswap/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pswap::qmath {

namespace {

// Eigenvalues of a unit-trace 4x4 operator below this are indistinguishable
// from round-off; square roots of them would leak ~1e-8 into the concurrence.
constexpr double kRoundoffEigenvalue = 1e-14;

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
}

}  // namespace

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != 2 && amplitudes_.size() != 4) {
    throw std::invalid_argument("PureState: dimension must be 2 or 4");
  }
  if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("PureState: amplitudes are not normalized");
  }
}

PureState PureState::normalized(const CVector& amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("PureState: zero vector");
  return PureState(amplitudes / n);
}

CMatrix PureState::projector() const {
  return amplitudes_ * amplitudes_.adjoint();
}

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "DensityMatrix");
  if (!is_hermitian(entries_)) {
    throw std::invalid_argument("DensityMatrix: operator is not Hermitian");
  }
  // Exact Hermitian symmetrization removes the sub-tolerance residue.
  entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
  psd_spectrum(entries_);
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

bool DensityMatrix::is_normalized(double tolerance) const {
  return std::abs(trace() - 1.0) <= tolerance;
}

DensityMatrix DensityMatrix::normalized() const {
  const double t = trace();
  if (t <= 0.0) throw std::domain_error("DensityMatrix: zero trace");
  return DensityMatrix(entries_ / t);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxKronDimension || cols > kMaxKronDimension) {
    throw std::invalid_argument("kron: result dimension exceeds 256");
  }
  CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  if (a.size() * b.size() > kMaxKronDimension) {
    throw std::invalid_argument("kron: result dimension exceeds 256");
  }
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a[i] * b;
  }
  return out;
}

CMatrix partial_trace(const CMatrix& op, Subsystem traced,
                      std::pair<int, int> dims) {
  require_square(op, "partial_trace");
  const auto [d1, d2] = dims;
  if (d1 <= 0 || d2 <= 0 || static_cast<Eigen::Index>(d1) * d2 != op.rows()) {
    throw std::invalid_argument("partial_trace: dims do not match operator");
  }
  if (traced == Subsystem::kSecond) {
    CMatrix out = CMatrix::Zero(d1, d1);
    for (int i = 0; i < d1; ++i)
      for (int j = 0; j < d1; ++j)
        for (int k = 0; k < d2; ++k) out(i, j) += op(i * d2 + k, j * d2 + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(d2, d2);
  for (int k = 0; k < d1; ++k) out += op.block(k * d2, k * d2, d2, d2);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem traced,
                            std::pair<int, int> dims) {
  return DensityMatrix(partial_trace(rho.matrix(), traced, dims));
}

bool is_hermitian(const CMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

Eigensystem hermitian_eigen(const CMatrix& m) {
  require_square(m, "hermitian_eigen");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigen: decomposition failed");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd psd_spectrum(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  Eigen::VectorXd values = solver.eigenvalues();
  // Round-off grows with the operator's scale.
  const double floor =
      -kNegativeEigenTolerance * std::max(1.0, values.size() ? values.cwiseAbs().maxCoeff() : 0.0);
  for (double& v : values) {
    if (v < floor) {
      throw std::domain_error("operator is not positive semidefinite (eigenvalue " +
                              std::to_string(v) + ")");
    }
    v = std::max(v, 0.0);
  }
  return values;
}

double purity(const CMatrix& rho) {
  // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho.
  return rho.cwiseAbs2().sum();
}

double trace_norm(const CMatrix& m) {
  const Eigensystem es = hermitian_eigen(0.5 * (m + m.adjoint()));
  return es.values.cwiseAbs().sum();
}

StateMetrics state_metrics(const DensityMatrix& rho, const PureState& target) {
  if (rho.dim() != target.dim()) {
    throw std::invalid_argument("state_metrics: dimension mismatch");
  }
  if (!rho.is_normalized(1e-6)) {
    throw std::invalid_argument("state_metrics: density matrix is not normalized");
  }
  const CVector& t = target.amplitudes();
  const double f = (t.adjoint() * rho.matrix() * t)(0, 0).real();
  StateMetrics out;
  out.fidelity = std::clamp(f, 0.0, 1.0);
  out.purity = purity(rho.matrix());
  out.trace_distance = 0.5 * trace_norm(rho.matrix() - target.projector());
  return out;
}

double binary_entropy(double x) {
  double h = 0.0;
  if (x > 0.0 && x < 1.0) {
    h = -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
  }
  return h;
}

double vn_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double lambda : psd_spectrum(rho.matrix())) {
    if (lambda > 0.0) s -= lambda * std::log2(lambda);
  }
  return s;
}

double concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("concurrence: need a 4x4 state");
  // With rho = sum_i v_i v_i^dagger, the square roots of the eigenvalues of
  // rho * (sy sy) rho^* (sy sy) are the singular values of v^T (sy sy) v.
  const Eigensystem es = hermitian_eigen(rho.matrix());
  CMatrix weighted = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    const double lambda = es.values[i];
    if (lambda > kRoundoffEigenvalue) {
      weighted.col(i) = std::sqrt(lambda) * es.vectors.col(i);
    }
  }
  CMatrix flip = CMatrix::Zero(4, 4);
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const CMatrix tau = weighted.transpose() * flip * weighted;
  Eigen::JacobiSVD<CMatrix> svd(tau);
  const Eigen::VectorXd s = svd.singularValues();  // descending
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

double eof_two_qubit(const DensityMatrix& rho) {
  const double c = std::min(1.0, concurrence(rho));
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

double phase_insensitive_overlap(const CVector& u, const CVector& v) {
  return std::abs(u.dot(v));
}

double phase_aligned_distance(const CMatrix& a, const CMatrix& b) {
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase =
      std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (a - phase * b).norm();
}

}  // namespace pswap::qmath
