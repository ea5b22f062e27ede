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

// Random objects and small reference formulas shared by the test suites.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

namespace testing {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline const cd kI{0.0, 1.0};

inline Vec random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(dim);
  for (auto& c : v) c = cd(g(rng), g(rng));
  return v / v.norm();
}

/** Haar-distributed unitary from the QR of a Ginibre matrix. */
inline Mat random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat z(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) z(i, j) = cd(g(rng), g(rng)) / std::sqrt(2.0);
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) q.col(j) *= r(j, j) / std::abs(r(j, j));
  return q;
}

/** Full-rank random density matrix W W^dagger / Tr. */
inline Mat random_density(int dim, std::mt19937_64& rng, int rank = -1) {
  if (rank < 0) rank = dim;
  std::normal_distribution<double> g;
  Mat w(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) w(i, j) = cd(g(rng), g(rng));
  Mat rho = w * w.adjoint();
  return rho / rho.trace().real();
}

/** Binary entropy in bits, written out independently of the library. */
inline double h2(double x) {
  double s = 0.0;
  if (x > 0.0) s -= x * std::log2(x);
  if (x < 1.0) s -= (1.0 - x) * std::log2(1.0 - x);
  return s;
}

/** Entropy of a 2x2 Hermitian unit-trace matrix from its closed-form eigenvalues. */
inline double qubit_entropy(const Mat& rho) {
  const double tr = rho.trace().real();
  const double det = (rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0)).real();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return h2((tr + disc) / 2.0);
}

/** Reduced state of qubit 1 for a two-qubit vector in (HH, HV, VH, VV) order. */
inline Mat first_marginal(const Vec& psi) {
  Mat r(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = psi[2 * i] * std::conj(psi[2 * j]) + psi[2 * i + 1] * std::conj(psi[2 * j + 1]);
  return r;
}

/** Explicit two-qubit Kronecker product, first factor most significant. */
inline Mat kron2(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace testing
