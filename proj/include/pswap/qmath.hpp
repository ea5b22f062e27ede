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

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string_view>
#include <utility>

namespace pswap {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/**
 * Two-qubit computational basis order used by every module:
 * index 0 = HH, 1 = HV, 2 = VH, 3 = VV (first letter is qubit 1).
 * Kronecker products put qubit 1 (or the process input) in the
 * most significant position.
 */
inline constexpr std::array<std::string_view, 4> kTwoQubitBasis = {
    "HH", "HV", "VH", "VV"};

namespace qmath {

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
/** Eigenvalues in [-kNegativeEigenTolerance * max(1, largest |eigenvalue|), 0) are clipped to zero. */
inline constexpr double kNegativeEigenTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-9;
inline constexpr int kMaxKronDimension = 256;

/** Normalized state vector of dimension 2 or 4. */
class PureState {
 public:
  /** Throws std::invalid_argument unless the norm is 1 within 1e-12. */
  explicit PureState(CVector amplitudes);
  /** Normalizes first; rejects the zero vector. */
  static PureState normalized(const CVector& amplitudes);

  const CVector& amplitudes() const { return amplitudes_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  Complex operator[](Eigen::Index i) const { return amplitudes_[i]; }
  CMatrix projector() const;

 private:
  CVector amplitudes_;
};

/**
 * Hermitian positive-semidefinite operator. The trace is not forced to
 * one; callers that need a state check is_normalized().
 */
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  const CMatrix& matrix() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }
  double trace() const { return entries_.trace().real(); }
  bool is_normalized(double tolerance = kTraceTolerance) const;
  DensityMatrix normalized() const;

 private:
  CMatrix entries_;
};

struct StateMetrics {
  double fidelity = 0.0;
  double purity = 0.0;
  double trace_distance = 0.0;
};

struct Eigensystem {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;
};

enum class Subsystem { kFirst, kSecond };

CMatrix kron(const CMatrix& a, const CMatrix& b);
CVector kron(const CVector& a, const CVector& b);

/** Traces out `traced` from an operator on C^d1 (x) C^d2. */
CMatrix partial_trace(const CMatrix& op, Subsystem traced,
                      std::pair<int, int> dims);
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem traced,
                            std::pair<int, int> dims);

bool is_hermitian(const CMatrix& m, double tolerance = kHermitianTolerance);
Eigensystem hermitian_eigen(const CMatrix& m);

/**
 * Eigenvalues of a PSD operator with round-off negatives clipped to zero.
 * Throws std::domain_error for eigenvalues below -1e-10 (relative to the
 * largest eigenvalue when that exceeds one).
 */
Eigen::VectorXd psd_spectrum(const CMatrix& m);

StateMetrics state_metrics(const DensityMatrix& rho, const PureState& target);
double purity(const CMatrix& rho);
double trace_norm(const CMatrix& m);

double binary_entropy(double x);
/** Von Neumann entropy in bits. */
double vn_entropy(const DensityMatrix& rho);
double concurrence(const DensityMatrix& rho);
/** Entanglement of formation in ebits via the Wootters concurrence. */
double eof_two_qubit(const DensityMatrix& rho);

/** |<u|v>|, insensitive to global phase. */
double phase_insensitive_overlap(const CVector& u, const CVector& v);
/**
 * min over theta of ||a - e^{i theta} b||_F. The optimal phase aligns
 * Tr(b^dagger a).
 */
double phase_aligned_distance(const CMatrix& a, const CMatrix& b);

}  // namespace qmath
}  // namespace pswap
