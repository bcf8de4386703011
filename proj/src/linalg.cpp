#include "linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace weakflow {

bool all_finite(const Vec& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v(k).real()) || !std::isfinite(v(k).imag())) return false;
    }
    return true;
}

bool all_finite(const Mat& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
        }
    }
    return true;
}

void ensure_finite(Complex value, const char* what) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw NumericError(std::string(what) + " is not finite");
    }
}

StateVec::StateVec(Vec amps) : amps_(std::move(amps)) {
    if (amps_.size() == 0) throw ConfigError("state vector must have positive dimension");
    if (!all_finite(amps_)) throw NumericError("state vector has non-finite amplitudes");
    normalized_ = std::abs(amps_.squaredNorm() - 1.0) <= kStructuralTol;
}

StateVec::StateVec(std::initializer_list<Complex> amps)
    : StateVec(Eigen::Map<const Vec>(std::data(amps), static_cast<Eigen::Index>(amps.size()))) {}

StateVec StateVec::basis(int dim, int index) {
    if (dim < 1 || index < 0 || index >= dim) throw ConfigError("basis index out of range");
    Vec v = Vec::Zero(dim);
    v(index) = 1.0;
    return StateVec(std::move(v));
}

StateVec StateVec::normalized(Vec amps) {
    const double n = amps.norm();
    if (n < kAmplitudeFloor) throw ConfigError("cannot normalize a zero vector");
    return StateVec(Vec(amps / n));
}

const char* op_kind_name(OpKind kind) {
    switch (kind) {
        case OpKind::General: return "general";
        case OpKind::Hermitian: return "hermitian";
        case OpKind::Unitary: return "unitary";
        case OpKind::Projector: return "projector";
    }
    return "general";
}

namespace {

double max_abs(const Mat& m) {
    return m.cwiseAbs().maxCoeff();
}

void validate_kind(const Mat& m, OpKind kind) {
    const Mat id = Mat::Identity(m.rows(), m.cols());
    switch (kind) {
        case OpKind::General:
            break;
        case OpKind::Hermitian:
            if (max_abs(Mat(m - m.adjoint())) > kStructuralTol)
                throw ConfigError("operator tagged hermitian is not hermitian");
            break;
        case OpKind::Unitary:
            if (max_abs(Mat(m.adjoint() * m - id)) > kStructuralTol)
                throw ConfigError("operator tagged unitary is not unitary");
            break;
        case OpKind::Projector:
            if (max_abs(Mat(m - m.adjoint())) > kStructuralTol ||
                max_abs(Mat(m * m - m)) > kStructuralTol)
                throw ConfigError("operator tagged projector is not an orthogonal projector");
            break;
    }
}

OpKind combined_kind(OpKind a, OpKind b) {
    // hermitian (x) hermitian, unitary (x) unitary and projector (x) projector
    // all close under the Kronecker product.
    return a == b ? a : OpKind::General;
}

}  // namespace

Operator::Operator(Mat entries, OpKind kind) : entries_(std::move(entries)), kind_(kind) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
        throw ConfigError("operator must be a square matrix of positive dimension");
    if (!all_finite(entries_)) throw NumericError("operator has non-finite entries");
    validate_kind(entries_, kind_);
}

Operator Operator::identity(int dim) {
    return Operator(Mat::Identity(dim, dim), OpKind::Unitary);
}

Operator Operator::zero(int dim) {
    return Operator(Mat::Zero(dim, dim), OpKind::Hermitian);
}

Operator Operator::sigma_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return Operator(std::move(m), OpKind::Hermitian);
}

Operator Operator::sigma_y() {
    Mat m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return Operator(std::move(m), OpKind::Hermitian);
}

Operator Operator::sigma_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return Operator(std::move(m), OpKind::Hermitian);
}

Operator Operator::adjoint() const {
    OpKind k = kind_;
    return Operator(entries_.adjoint(), k);
}

StateVec Operator::apply(const StateVec& v) const {
    if (v.dim() != dim()) throw DimensionMismatchError("operator/state dimension mismatch");
    return StateVec(Vec(entries_ * v.amps()));
}

Operator Operator::scaled(Complex factor) const {
    OpKind k = OpKind::General;
    if (kind_ == OpKind::Hermitian && factor.imag() == 0.0) k = OpKind::Hermitian;
    return Operator(Mat(factor * entries_), k);
}

double Operator::spectral_radius() const {
    if (kind_ != OpKind::Hermitian && kind_ != OpKind::Projector)
        throw ConfigError("spectral radius requires a hermitian-tagged operator");
    Eigen::SelfAdjointEigenSolver<Mat> solver(entries_, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Operator operator*(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("operator dimension mismatch in product");
    OpKind k = (a.kind() == OpKind::Unitary && b.kind() == OpKind::Unitary) ? OpKind::Unitary
                                                                            : OpKind::General;
    return Operator(Mat(a.entries_ * b.entries_), k);
}

Operator operator+(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("operator dimension mismatch in sum");
    OpKind k = (a.kind() == OpKind::Hermitian && b.kind() == OpKind::Hermitian)
                   ? OpKind::Hermitian
                   : OpKind::General;
    return Operator(Mat(a.entries_ + b.entries_), k);
}

Operator operator-(const Operator& a, const Operator& b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("operator dimension mismatch in difference");
    OpKind k = (a.kind() == OpKind::Hermitian && b.kind() == OpKind::Hermitian)
                   ? OpKind::Hermitian
                   : OpKind::General;
    return Operator(Mat(a.entries_ - b.entries_), k);
}

Complex inner(const StateVec& a, const StateVec& b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("inner product dimension mismatch");
    return a.amps().dot(b.amps());  // Eigen's dot conjugates the left argument
}

Operator outer(const StateVec& f) {
    if (!f.is_normalized()) throw ConfigError("outer() requires a normalized state");
    return Operator(Mat(f.amps() * f.amps().adjoint()), OpKind::Projector);
}

Operator mat_exp_unitary(const Operator& hamiltonian, double s) {
    if (hamiltonian.kind() != OpKind::Hermitian && hamiltonian.kind() != OpKind::Projector)
        throw ConfigError("mat_exp_unitary requires a hermitian-tagged generator");
    if (!std::isfinite(s)) throw ConfigError("mat_exp_unitary requires a finite exponent scale");
    Eigen::SelfAdjointEigenSolver<Mat> solver(hamiltonian.entries());
    const auto& evals = solver.eigenvalues();
    const Mat& evecs = solver.eigenvectors();
    Vec phases(evals.size());
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
        phases(k) = std::exp(Complex(0.0, -s * evals(k)));
    }
    return Operator(Mat(evecs * phases.asDiagonal() * evecs.adjoint()), OpKind::Unitary);
}

StateVec tensor(const StateVec& a, const StateVec& b) {
    Vec out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) out(i * b.dim() + j) = a.amp(i) * b.amp(j);
    return StateVec(std::move(out));
}

Operator tensor(const Operator& a, const Operator& b) {
    const int da = a.dim(), db = b.dim();
    Mat out(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.entries()(i, j) * b.entries();
    return Operator(std::move(out), combined_kind(a.kind(), b.kind()));
}

Operator ordered_product(int dim, std::span<const Operator> factors) {
    Mat acc = Mat::Identity(dim, dim);
    bool all_unitary = true;
    for (const Operator& u : factors) {
        if (u.dim() != dim) throw DimensionMismatchError("ordered_product dimension mismatch");
        acc = acc * u.entries();
        all_unitary = all_unitary && u.kind() == OpKind::Unitary;
    }
    return Operator(std::move(acc), all_unitary ? OpKind::Unitary : OpKind::General);
}

}  // namespace weakflow
