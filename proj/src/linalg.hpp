#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "tolerances.hpp"

namespace weakflow {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

// Finite-dimensional complex state vector. The normalized flag records
// whether |<psi|psi> - 1| <= kStructuralTol at construction.
class StateVec {
public:
    explicit StateVec(Vec amps);
    StateVec(std::initializer_list<Complex> amps);

    static StateVec basis(int dim, int index);
    // Rescales to unit norm; throws on (near-)zero input.
    static StateVec normalized(Vec amps);

    int dim() const { return static_cast<int>(amps_.size()); }
    const Vec& amps() const { return amps_; }
    Complex amp(int k) const { return amps_(k); }
    double norm() const { return amps_.norm(); }
    bool is_normalized() const { return normalized_; }

private:
    Vec amps_;
    bool normalized_;
};

enum class OpKind { General, Hermitian, Unitary, Projector };

const char* op_kind_name(OpKind kind);

// Dense complex operator with a structural tag. Construction validates the
// tag invariant: hermitian max|M - M^+| <= 1e-10, unitary max|M^+M - 1| <= 1e-10,
// projector max|M^2 - M| <= 1e-10 and hermitian.
class Operator {
public:
    Operator(Mat entries, OpKind kind);

    static Operator identity(int dim);
    static Operator zero(int dim);
    static Operator sigma_x();
    static Operator sigma_y();
    static Operator sigma_z();

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Mat& entries() const { return entries_; }
    OpKind kind() const { return kind_; }

    Operator adjoint() const;
    Complex trace() const { return entries_.trace(); }

    StateVec apply(const StateVec& v) const;
    Operator scaled(Complex factor) const;

    // Largest |eigenvalue|; defined for hermitian-tagged operators only.
    double spectral_radius() const;

    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);

private:
    Mat entries_;
    OpKind kind_;
};

// <a|b> = sum_k conj(a_k) b_k.
Complex inner(const StateVec& a, const StateVec& b);

// Projector |f><f| for normalized f.
Operator outer(const StateVec& f);

// exp(-i s H) for hermitian-tagged H, via eigendecomposition.
Operator mat_exp_unitary(const Operator& hamiltonian, double s);

StateVec tensor(const StateVec& a, const StateVec& b);
Operator tensor(const Operator& a, const Operator& b);

// Product of the factors in the given order: factors[0] * factors[1] * ...
// Factors are listed latest-time first, so the rightmost (earliest) factor
// is applied to a state first. Empty sequence yields the identity.
Operator ordered_product(int dim, std::span<const Operator> factors);

void ensure_finite(Complex value, const char* what);

}  // namespace weakflow
