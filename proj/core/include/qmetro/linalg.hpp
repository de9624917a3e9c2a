// Copyright 2026 The qmetro Authors
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

// Dense complex linear algebra used by every other module: Hermitian
// eigendecomposition, eigenvalue spread, unitary propagators and span
// projectors. Dimensions are desk scale (a few hundred at most, larger only
// for diagonal operators).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace qmetro {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
inline constexpr double hermitian = 1e-10;      // ‖M − M†‖_max
inline constexpr double unitary = 1e-10;        // ‖U†U − I‖_max of eigenvectors
inline constexpr double reconstruction = 1e-9;  // ‖U diag(λ) U† − M‖_max
inline constexpr double null_vector = 1e-12;    // all-null input to projector_onto
inline constexpr double dependent = 1e-10;      // Gram-Schmidt residual cut
}  // namespace tol

/// Largest absolute entry; the max-norm used by all tolerances here.
double max_abs(const Matrix& m);

bool is_finite(const Matrix& m);

/// Hermitian matrix, symmetrized on construction as (M + M†)/2.
///
/// Throws NotHermitian when ‖M − M†‖_max exceeds tol::hermitian (or the
/// caller-supplied tolerance), and InvalidArgument for non-square or
/// non-finite input.
class HermitianOperator {
public:
    HermitianOperator() = default;
    explicit HermitianOperator(const Matrix& m, double tolerance = tol::hermitian);

    const Matrix& matrix() const noexcept { return m_; }
    Index dim() const noexcept { return m_.rows(); }

    static HermitianOperator identity(Index d);
    static HermitianOperator diagonal(std::span<const double> values);

    HermitianOperator operator+(const HermitianOperator& other) const;
    HermitianOperator operator*(double scale) const;

private:
    Matrix m_;
};

struct EigenSystem {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns, unitary

    double min() const { return eigenvalues(0); }
    double max() const { return eigenvalues(eigenvalues.size() - 1); }
};

EigenSystem eig_hermitian(const HermitianOperator& h);

/// Checked overload: validates Hermiticity first (NotHermitian on failure).
EigenSystem eig_hermitian(const Matrix& m);

/// Λ − λ, the difference between the extreme eigenvalues.
double spectral_spread(const HermitianOperator& h);

/// e^{−iHt} built from the eigendecomposition of H.
Matrix propagator(const HermitianOperator& h, double t);
Matrix propagator(const EigenSystem& eig, double t);

/// Propagator and its directional derivative:
/// returns (e^{−iAt}, d/dε e^{−i(A+εD)t} at ε = 0).
///
/// Uses the divided-difference form of the derivative of the exponential
/// in the eigenbasis of A; exact to round-off.
std::pair<Matrix, Matrix> propagator_with_derivative(const HermitianOperator& a,
                                                     const Matrix& direction, double t);

/// Orthogonal projector onto span(vectors), built with modified Gram-Schmidt
/// and one re-orthogonalization pass. Vectors whose residual falls below
/// tol::dependent are dropped as linearly dependent.
Matrix projector_onto(std::span<const Vector> vectors);

/// Orthonormal basis (as columns) of span(vectors); same construction as
/// projector_onto.
Matrix orthonormal_basis(std::span<const Vector> vectors);

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

Matrix commutator(const Matrix& a, const Matrix& b);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
}  // namespace pauli

/// Computational basis vector |index⟩ in dimension d.
Vector basis_vector(Index d, Index index);

}  // namespace qmetro
