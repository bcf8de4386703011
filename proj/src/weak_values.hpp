#pragma once

#include <optional>

#include "linalg.hpp"

namespace weakflow {

// Pre-selected |i> and post-selected |f> with the cached overlap <f|i>.
// Construction fails with OrthogonalSelection once |<f|i>| drops below the
// overlap floor: beyond that point weak values amplify without bound.
class PrePostPair {
public:
    PrePostPair(StateVec pre, StateVec post, double overlap_floor = kDefaultOverlapFloor);

    const StateVec& pre() const { return pre_; }
    const StateVec& post() const { return post_; }
    Complex overlap() const { return overlap_; }
    double overlap_floor() const { return overlap_floor_; }
    int dim() const { return pre_.dim(); }

private:
    StateVec pre_;
    StateVec post_;
    Complex overlap_;
    double overlap_floor_;
};

struct WeakValueResult {
    Complex value;
    Complex overlap;
    // |A_w| > spectral radius of A; present only for hermitian-tagged A.
    std::optional<bool> anomalous;
};

// A_w = <f|A|i> / <f|i>.
WeakValueResult weak_value(const Operator& a, const PrePostPair& pair);

// Pi~^w_f = |f><f| / <i|Pi_f|i>; <i|Pi~^w_f|i> = 1.
Operator weak_conditioned_projector(const PrePostPair& pair);

// P_{i->f} = |<f|i>|^2.
double transition_probability_direct(const PrePostPair& pair);
double transition_probability_direct(const StateVec& post, const StateVec& pre);

// <i|Pi_f A|i> / A_w, algebraically equal to |<f|i>|^2.
Complex transition_probability_ratio(const Operator& a, const PrePostPair& pair);

// Orthonormal companion states for a two-dimensional pair, Gram-Schmidt with
// phases fixed so that <f|i> and <fbar|i> are real positive: f_bar ~ i - f<f|i>,
// i_bar = sin(theta)|f> - cos(theta)|f_bar> with cos(theta) = |<f|i>|.
struct OrthogonalFrame {
    StateVec f;      // post state, phase-rotated so <f|i> > 0
    StateVec f_bar;  // orthonormal complement of f
    StateVec i_bar;  // orthonormal complement of i
    double cos_theta;
    double sin_theta;
};

OrthogonalFrame orthogonal_frame(const PrePostPair& pair);

}  // namespace weakflow
