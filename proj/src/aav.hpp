#pragma once

#include "dyson.hpp"
#include "weak_values.hpp"

namespace weakflow {

// Spin-1/2 pre/post selection parametrized by theta in (0, pi/2):
// |i> = cos(theta)|up> + sin(theta)|down>, |f> = |up>, |fbar> = |down>,
// |ibar> = sin(theta)|up> - cos(theta)|down>.
struct SpinSelection {
    explicit SpinSelection(double theta);

    double theta;
    StateVec pre() const;
    StateVec post() const;
    StateVec post_bar() const;
    StateVec pre_bar() const;
    PrePostPair pair(double overlap_floor = kDefaultOverlapFloor) const;
};

// Uniform detector-coordinate grid; n_points a power of two >= 256 so the
// momentum representation comes from a radix-2 transform.
struct PointerGrid {
    double q_min;
    double q_max;
    int n_points;

    PointerGrid(double q_min_, double q_max_, int n_points_);

    double dq() const { return (q_max - q_min) / n_points; }
    double dp() const;
    double q(int k) const { return q_min + k * dq(); }
};

struct PointerState {
    std::vector<Complex> amps;  // over the grid
    double norm(const PointerGrid& grid) const;
};

// Spin (x) pointer wavefunction: one coordinate branch per spin-z basis state.
struct JointState {
    std::vector<Complex> up;
    std::vector<Complex> down;
    double norm(const PointerGrid& grid) const;
};

// Gaussian pointer exp(-(q-q0)^2 / 4 delta^2) times the selection amplitudes.
JointState prepare(const SpinSelection& selection, const PointerGrid& grid, double q0,
                   double delta);

// U_A = exp(-i eps q A) applied in the eigenbasis of the 2x2 hermitian A.
JointState couple(const JointState& state, const PointerGrid& grid, const Operator& a,
                  double eps);

struct PostselectResult {
    PointerState pointer;  // renormalized
    double success_prob;
};

PostselectResult postselect(const JointState& state, const PointerGrid& grid, const StateVec& f);

struct PointerMeans {
    double mean_q;
    double mean_p;
};

// <q> from |psi(q)|^2; <p> from the unitary discrete Fourier transform with
// the zero frequency centered.
PointerMeans pointer_means(const PointerState& state, const PointerGrid& grid);

// Momentum-space amplitudes on the conjugate grid p_j = (j - n/2) dp.
std::vector<Complex> momentum_representation(const PointerState& state, const PointerGrid& grid);

struct WeakReadout {
    Complex a_w_estimate;  // re from the momentum shift, im from the position shift
    double success_prob;
    double mean_q;
    double mean_p;
};

// prepare -> couple -> postselect -> means. Sign conventions fixed against a
// brute-force oracle: Re A_w = -<p>/eps, Im A_w = (<q> - q0) / (2 delta^2 eps).
WeakReadout weak_readout(const SpinSelection& selection, const PointerGrid& grid,
                         const Operator& a, double eps, double q0, double delta);

// Effective time-dependent post-selected state |f(t_end)> = U_s(t_end)|f> for a
// strong pulse of total area eps_st_qx, with U_s = exp(-i eps_st q_x B/N).
PrePostPair strong_postselect_sequence(const SpinSelection& selection, const TimeGrid& grid,
                                       double eps_st_qx, const Operator& b, int ensemble_size = 1);

}  // namespace weakflow
