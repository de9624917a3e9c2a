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

#include "qmetro/linalg.hpp"

#include "qmetro/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qmetro {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NotHermitian: return "NotHermitian";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::ZeroVector: return "ZeroVector";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NegativeProbability: return "NegativeProbability";
        case ErrorCode::ScheduleMismatch: return "ScheduleMismatch";
        case ErrorCode::NotProjector: return "NotProjector";
        case ErrorCode::NonRegular: return "NonRegular";
        case ErrorCode::ZeroSpread: return "ZeroSpread";
        case ErrorCode::CrossCheckFailure: return "CrossCheckFailure";
        case ErrorCode::InsensitiveObservable: return "InsensitiveObservable";
        case ErrorCode::AllOutcomesRare: return "AllOutcomesRare";
        case ErrorCode::ZeroInformation: return "ZeroInformation";
        case ErrorCode::PolicyGap: return "PolicyGap";
        case ErrorCode::Blowup: return "Blowup";
        case ErrorCode::EigenstateInput: return "EigenstateInput";
        case ErrorCode::CapExceeded: return "CapExceeded";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_finite(const Matrix& m) {
    return m.allFinite();
}

HermitianOperator::HermitianOperator(const Matrix& m, double tolerance) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "operator must be square and non-empty, got " + std::to_string(m.rows()) +
                        "x" + std::to_string(m.cols()));
    }
    if (!is_finite(m)) {
        throw Error(ErrorCode::InvalidArgument, "operator has non-finite entries");
    }
    const double asym = max_abs(m - m.adjoint());
    if (asym > tolerance) {
        throw Error(ErrorCode::NotHermitian,
                    "max |M - M^dag| = " + std::to_string(asym) + " exceeds tolerance");
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::identity(Index d) {
    return HermitianOperator(Matrix::Identity(d, d));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
    Matrix m = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        m(static_cast<Index>(i), static_cast<Index>(i)) = values[i];
    }
    return HermitianOperator(m);
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
    if (dim() != other.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "cannot add operators of different dimension");
    }
    return HermitianOperator(m_ + other.m_);
}

HermitianOperator HermitianOperator::operator*(double scale) const {
    return HermitianOperator(scale * m_);
}

namespace {

bool is_diagonal(const Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
        for (Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) != Complex(0.0, 0.0)) {
                return false;
            }
        }
    }
    return true;
}

EigenSystem diagonal_eigensystem(const Matrix& m) {
    const Index d = m.rows();
    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return m(a, a).real() < m(b, b).real(); });
    EigenSystem out;
    out.eigenvalues.resize(d);
    out.eigenvectors = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = m(src, src).real();
        out.eigenvectors(src, k) = 1.0;
    }
    return out;
}

}  // namespace

EigenSystem eig_hermitian(const HermitianOperator& h) {
    const Matrix& m = h.matrix();
    if (is_diagonal(m)) {
        return diagonal_eigensystem(m);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::NoConvergence, "Hermitian eigensolver did not converge");
    }
    return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

EigenSystem eig_hermitian(const Matrix& m) {
    return eig_hermitian(HermitianOperator(m));
}

double spectral_spread(const HermitianOperator& h) {
    const EigenSystem eig = eig_hermitian(h);
    return std::max(0.0, eig.max() - eig.min());
}

Matrix propagator(const EigenSystem& eig, double t) {
    const Index d = eig.eigenvalues.size();
    Vector phases(d);
    for (Index k = 0; k < d; ++k) {
        phases(k) = std::polar(1.0, -eig.eigenvalues(k) * t);
    }
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

Matrix propagator(const HermitianOperator& h, double t) {
    if (!std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "propagation time must be finite");
    }
    if (t == 0.0) {
        return Matrix::Identity(h.dim(), h.dim());
    }
    return propagator(eig_hermitian(h), t);
}

std::pair<Matrix, Matrix> propagator_with_derivative(const HermitianOperator& a,
                                                     const Matrix& direction, double t) {
    const Index d = a.dim();
    if (direction.rows() != d || direction.cols() != d) {
        throw Error(ErrorCode::DimensionMismatch, "derivative direction has wrong shape");
    }
    if (t == 0.0) {
        return {Matrix::Identity(d, d), Matrix::Zero(d, d)};
    }
    const EigenSystem eig = eig_hermitian(a);
    const Matrix& v = eig.eigenvectors;
    const Matrix rotated = v.adjoint() * direction * v;
    Matrix weighted(d, d);
    for (Index k = 0; k < d; ++k) {
        for (Index j = 0; j < d; ++j) {
            const double mean = 0.5 * (eig.eigenvalues(j) + eig.eigenvalues(k));
            const double half_gap = 0.5 * (eig.eigenvalues(j) - eig.eigenvalues(k)) * t;
            const double sinc = std::abs(half_gap) < 1e-8 ? 1.0 - half_gap * half_gap / 6.0
                                                          : std::sin(half_gap) / half_gap;
            // Divided difference of x -> e^{-ixt} between eigenvalues j and k.
            const Complex dd = Complex(0.0, -t) * std::polar(1.0, -mean * t) * sinc;
            weighted(j, k) = rotated(j, k) * dd;
        }
    }
    return {propagator(eig, t), v * weighted * v.adjoint()};
}

Matrix orthonormal_basis(std::span<const Vector> vectors) {
    if (vectors.empty()) {
        throw Error(ErrorCode::ZeroVector, "no vectors given");
    }
    const Index d = vectors.front().size();
    std::vector<Vector> basis;
    bool any_nonnull = false;
    for (const Vector& raw : vectors) {
        if (raw.size() != d) {
            throw Error(ErrorCode::DimensionMismatch, "vectors of different dimension");
        }
        const double norm = raw.norm();
        if (norm < tol::null_vector) {
            continue;
        }
        any_nonnull = true;
        Vector v = raw / norm;
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vector& q : basis) {
                v -= q.dot(v) * q;  // dot() conjugates the left operand
            }
        }
        const double residual = v.norm();
        if (residual < tol::dependent) {
            continue;
        }
        basis.push_back(v / residual);
    }
    if (!any_nonnull) {
        throw Error(ErrorCode::ZeroVector, "all vectors are numerically null");
    }
    Matrix out(d, static_cast<Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        out.col(static_cast<Index>(k)) = basis[k];
    }
    return out;
}

Matrix projector_onto(std::span<const Vector> vectors) {
    const Matrix q = orthonormal_basis(vectors);
    return q * q.adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Vector kron(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
    return a * b - b * a;
}

namespace pauli {
Matrix identity() {
    return Matrix::Identity(2, 2);
}
Matrix x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}
Matrix y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}
Matrix z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}
}  // namespace pauli

Vector basis_vector(Index d, Index index) {
    if (index < 0 || index >= d) {
        throw Error(ErrorCode::InvalidArgument, "basis index out of range");
    }
    Vector v = Vector::Zero(d);
    v(index) = 1.0;
    return v;
}

}  // namespace qmetro
