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

#include "qmetro/model.hpp"

#include "qmetro/error.hpp"

#include <cmath>
#include <string>

namespace qmetro {

namespace {

void require_dim(Index expected, Index got, const char* what) {
    if (expected != got) {
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                      std::to_string(expected) + ", got " +
                                                      std::to_string(got));
    }
}

double clamp_probability(double p) {
    if (p < -tol::clamp) {
        throw Error(ErrorCode::NegativeProbability,
                    "outcome probability " + std::to_string(p) + " is below round-off");
    }
    return p < 0.0 ? 0.0 : p;
}

}  // namespace

// ---------------------------------------------------------------- QuantumState

QuantumState QuantumState::pure(const Vector& psi) {
    if (psi.size() == 0 || !psi.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "state vector must be non-empty and finite");
    }
    if (std::abs(psi.norm() - 1.0) > tol::norm) {
        throw Error(ErrorCode::InvalidArgument,
                    "state vector norm " + std::to_string(psi.norm()) + " is not 1");
    }
    QuantumState s;
    s.pure_ = true;
    s.psi_ = psi;
    return s;
}

QuantumState QuantumState::pure_normalized(const Vector& psi) {
    const double n = psi.norm();
    if (n < tol::null_vector) {
        throw Error(ErrorCode::ZeroVector, "cannot normalize a null state vector");
    }
    return pure(psi / n);
}

QuantumState QuantumState::mixed(const Matrix& rho) {
    const HermitianOperator h(rho);
    if (std::abs(h.matrix().trace().real() - 1.0) > tol::norm) {
        throw Error(ErrorCode::InvalidArgument, "density matrix trace is not 1");
    }
    if (eig_hermitian(h).min() < -tol::positivity) {
        throw Error(ErrorCode::InvalidArgument, "density matrix has a negative eigenvalue");
    }
    QuantumState s;
    s.pure_ = false;
    s.rho_ = h.matrix();
    return s;
}

QuantumState QuantumState::mixture(std::vector<PureComponent> components) {
    if (components.empty()) {
        throw Error(ErrorCode::InvalidArgument, "mixture needs at least one component");
    }
    const Index d = components.front().vector.size();
    double total = 0.0;
    Matrix rho = Matrix::Zero(d, d);
    for (PureComponent& c : components) {
        require_dim(d, c.vector.size(), "mixture component");
        if (c.weight < 0.0 || !std::isfinite(c.weight)) {
            throw Error(ErrorCode::InvalidArgument, "mixture weights must be non-negative");
        }
        if (std::abs(c.vector.norm() - 1.0) > tol::norm) {
            throw Error(ErrorCode::InvalidArgument, "mixture component is not normalized");
        }
        total += c.weight;
        rho += c.weight * c.vector * c.vector.adjoint();
    }
    if (std::abs(total - 1.0) > tol::norm) {
        throw Error(ErrorCode::InvalidArgument, "mixture weights do not sum to 1");
    }
    QuantumState s;
    s.pure_ = false;
    s.rho_ = 0.5 * (rho + rho.adjoint());
    s.components_ = std::move(components);
    return s;
}

QuantumState QuantumState::maximally_mixed(Index d) {
    return mixed(Matrix::Identity(d, d) / static_cast<double>(d));
}

const Vector& QuantumState::vector() const {
    if (!pure_) {
        throw Error(ErrorCode::InvalidArgument, "state is mixed; no state vector");
    }
    return psi_;
}

Matrix QuantumState::density() const {
    return pure_ ? Matrix(psi_ * psi_.adjoint()) : rho_;
}

std::vector<PureComponent> QuantumState::decomposition() const {
    if (pure_) {
        return {PureComponent{1.0, psi_}};
    }
    if (!components_.empty()) {
        return components_;
    }
    const EigenSystem eig = eig_hermitian(HermitianOperator(rho_));
    std::vector<PureComponent> out;
    for (Index k = eig.eigenvalues.size() - 1; k >= 0; --k) {
        const double w = eig.eigenvalues(k);
        if (w > tol::clamp) {
            out.push_back({w, eig.eigenvectors.col(k)});
        }
    }
    double total = 0.0;
    for (const auto& c : out) total += c.weight;
    for (auto& c : out) c.weight /= total;
    return out;
}

double QuantumState::purity() const {
    if (pure_) {
        return 1.0;
    }
    return (rho_ * rho_).trace().real();
}

// ------------------------------------------------------------------------ Povm

// Elements built as M†M are positive by construction; only explicitly given
// elements pay for the eigenvalue check.
void Povm::validate() const {
    if (elements_.empty()) {
        throw Error(ErrorCode::InvalidArgument, "POVM needs at least one element");
    }
    const Index d = elements_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& e : elements_) {
        require_dim(d, e.rows(), "POVM element");
        const HermitianOperator h(e);
        if (operators_.empty() && eig_hermitian(h).min() < -tol::positivity) {
            throw Error(ErrorCode::InvalidArgument, "POVM element is not positive semidefinite");
        }
        sum += e;
    }
    if (max_abs(sum - Matrix::Identity(d, d)) > tol::completeness) {
        throw Error(ErrorCode::InvalidArgument, "POVM elements do not sum to the identity");
    }
    for (std::size_t k = 0; k < operators_.size(); ++k) {
        if (max_abs(operators_[k].adjoint() * operators_[k] - elements_[k]) > tol::completeness) {
            throw Error(ErrorCode::InvalidArgument, "measurement operator inconsistent with element");
        }
    }
}

Povm Povm::from_elements(std::vector<Matrix> elements) {
    Povm p;
    for (Matrix& e : elements) {
        e = 0.5 * (e + e.adjoint()).eval();
    }
    p.elements_ = std::move(elements);
    p.validate();
    return p;
}

Povm Povm::from_measurement_operators(std::vector<Matrix> operators) {
    Povm p;
    for (const Matrix& m : operators) {
        if (m.rows() != m.cols()) {
            throw Error(ErrorCode::InvalidArgument, "measurement operators must be square");
        }
        Matrix e = m.adjoint() * m;
        p.elements_.push_back(0.5 * (e + e.adjoint()));
    }
    p.operators_ = std::move(operators);
    p.validate();
    return p;
}

Povm Povm::projective(const Matrix& basis) {
    std::vector<Matrix> ops;
    for (Index k = 0; k < basis.cols(); ++k) {
        ops.push_back(basis.col(k) * basis.col(k).adjoint());
    }
    return from_measurement_operators(std::move(ops));
}

Povm Povm::eigenbasis_of(const HermitianOperator& observable) {
    const EigenSystem eig = eig_hermitian(observable);
    const Index d = observable.dim();
    std::vector<Matrix> ops;
    Index k = d - 1;
    while (k >= 0) {
        Matrix proj = Matrix::Zero(d, d);
        const double value = eig.eigenvalues(k);
        while (k >= 0 && std::abs(eig.eigenvalues(k) - value) < 1e-9) {
            proj += eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint();
            --k;
        }
        ops.push_back(proj);
    }
    return from_measurement_operators(std::move(ops));
}

std::vector<Matrix> Povm::kraus_operators() const {
    if (!operators_.empty()) {
        return operators_;
    }
    std::vector<Matrix> out;
    out.reserve(elements_.size());
    for (const Matrix& e : elements_) {
        const EigenSystem eig = eig_hermitian(HermitianOperator(e));
        RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
        out.push_back(eig.eigenvectors * roots.cast<Complex>().asDiagonal() *
                      eig.eigenvectors.adjoint());
    }
    return out;
}

// ------------------------------------------------------------------ operations

QuantumState apply_unitary(const QuantumState& state, const Matrix& u) {
    require_dim(state.dim(), u.rows(), "unitary");
    if (state.is_pure()) {
        return QuantumState::pure_normalized(u * state.vector());
    }
    if (state.has_stored_decomposition()) {
        std::vector<PureComponent> comps = state.decomposition();
        for (auto& c : comps) {
            c.vector = u * c.vector;
            c.vector.normalize();
        }
        return QuantumState::mixture(std::move(comps));
    }
    const Matrix rho = state.density();
    return QuantumState::mixed(u * rho * u.adjoint());
}

QuantumState evolve(const QuantumState& state, const HermitianOperator& h, double b, double tau) {
    require_dim(state.dim(), h.dim(), "Hamiltonian");
    if (tau < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "evolution time must be non-negative");
    }
    if (b == 0.0 || tau == 0.0) {
        return state;
    }
    return apply_unitary(state, propagator(h, b * tau));
}

Complex expectation(const QuantumState& state, const Matrix& a) {
    require_dim(state.dim(), a.rows(), "operator");
    if (state.is_pure()) {
        const Vector& psi = state.vector();
        return psi.dot(a * psi);
    }
    return (state.density() * a).trace();
}

std::vector<double> outcome_probabilities(const QuantumState& state, const Povm& povm) {
    require_dim(state.dim(), povm.dim(), "POVM");
    std::vector<double> p;
    p.reserve(povm.size());
    for (const Matrix& e : povm.elements()) {
        p.push_back(clamp_probability(expectation(state, e).real()));
    }
    return p;
}

Moments expectation_and_variance(const QuantumState& state, const Observable& obs) {
    const Matrix& o = obs.matrix();
    const double mean = expectation(state, o).real();
    const double second = expectation(state, o * o).real();
    return Moments{mean, std::sqrt(std::max(0.0, second - mean * mean))};
}

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
    if (a.is_pure() && b.is_pure()) {
        return QuantumState::pure_normalized(kron(a.vector(), b.vector()));
    }
    std::vector<PureComponent> comps;
    for (const auto& ca : a.decomposition()) {
        for (const auto& cb : b.decomposition()) {
            Vector v = kron(ca.vector, cb.vector);
            comps.push_back({ca.weight * cb.weight, v / v.norm()});
        }
    }
    return QuantumState::mixture(std::move(comps));
}

Matrix tensor(const Matrix& a, const Matrix& b) {
    return kron(a, b);
}

Povm tensor(const Povm& a, const Povm& b) {
    const bool with_ops = a.has_measurement_operators() && b.has_measurement_operators();
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out.push_back(with_ops ? kron(a.measurement_operators()[i], b.measurement_operators()[j])
                                   : kron(a.element(i), b.element(j)));
        }
    }
    return with_ops ? Povm::from_measurement_operators(std::move(out))
                    : Povm::from_elements(std::move(out));
}

Povm extend_with_identity(const Povm& povm, Index ancilla_dim) {
    const Povm trivial = Povm::from_measurement_operators({Matrix::Identity(ancilla_dim, ancilla_dim)});
    if (povm.has_measurement_operators()) {
        return tensor(povm, trivial);
    }
    std::vector<Matrix> out;
    for (const Matrix& e : povm.elements()) {
        out.push_back(kron(e, Matrix::Identity(ancilla_dim, ancilla_dim)));
    }
    return Povm::from_elements(std::move(out));
}

ProjectedPovm project_povm(const Povm& povm, const Matrix& pi) {
    require_dim(povm.dim(), pi.rows(), "projector");
    if (pi.rows() != pi.cols() || max_abs(pi - pi.adjoint()) > tol::completeness ||
        max_abs(pi * pi - pi) > tol::completeness) {
        throw Error(ErrorCode::NotProjector, "operator is not an orthogonal projector");
    }
    std::vector<Vector> columns;
    for (Index k = 0; k < pi.cols(); ++k) {
        columns.push_back(pi.col(k));
    }
    const Matrix q = orthonormal_basis(columns);
    ProjectedPovm out{q, {}, Povm::from_elements({Matrix::Identity(q.cols(), q.cols())})};
    std::vector<Matrix> compressed;
    for (const Matrix& e : povm.elements()) {
        out.full.push_back(pi * e * pi);
        compressed.push_back(q.adjoint() * e * q);
    }
    out.povm = Povm::from_elements(std::move(compressed));
    return out;
}

}  // namespace qmetro
