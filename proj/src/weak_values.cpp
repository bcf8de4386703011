#include "weak_values.hpp"

#include <cmath>

namespace weakflow {

PrePostPair::PrePostPair(StateVec pre, StateVec post, double overlap_floor)
    : pre_(std::move(pre)), post_(std::move(post)), overlap_floor_(overlap_floor) {
    if (pre_.dim() != post_.dim())
        throw DimensionMismatchError("pre/post selection dimension mismatch");
    if (!pre_.is_normalized() || !post_.is_normalized())
        throw ConfigError("pre/post selection states must be normalized");
    if (!(overlap_floor_ > 0.0))
        throw ConfigError("overlap floor must be positive");
    overlap_ = inner(post_, pre_);
    if (std::abs(overlap_) < overlap_floor_)
        throw OrthogonalSelectionError("|<f|i>| below overlap floor: selection is orthogonal");
}

WeakValueResult weak_value(const Operator& a, const PrePostPair& pair) {
    if (a.dim() != pair.dim())
        throw DimensionMismatchError("operator/selection dimension mismatch");
    const Complex numerator = inner(pair.post(), a.apply(pair.pre()));
    WeakValueResult result;
    result.overlap = pair.overlap();
    result.value = numerator / pair.overlap();
    ensure_finite(result.value, "weak value");
    if (a.kind() == OpKind::Hermitian || a.kind() == OpKind::Projector) {
        result.anomalous = std::abs(result.value) > a.spectral_radius();
    }
    return result;
}

Operator weak_conditioned_projector(const PrePostPair& pair) {
    const Operator pi_f = outer(pair.post());
    const double scale = std::norm(pair.overlap());  // <i|Pi_f|i> = |<f|i>|^2
    return pi_f.scaled(1.0 / scale);
}

double transition_probability_direct(const PrePostPair& pair) {
    return std::norm(pair.overlap());
}

double transition_probability_direct(const StateVec& post, const StateVec& pre) {
    if (!pre.is_normalized() || !post.is_normalized())
        throw ConfigError("transition probability requires normalized states");
    return std::norm(inner(post, pre));
}

Complex transition_probability_ratio(const Operator& a, const PrePostPair& pair) {
    const WeakValueResult aw = weak_value(a, pair);
    if (std::abs(aw.value) < kAmplitudeFloor)
        throw NullWeakValueError("weak value is zero: probability ratio undefined");
    const Operator pi_f = outer(pair.post());
    const Complex numerator = inner(pair.pre(), (pi_f * a).apply(pair.pre()));
    return numerator / aw.value;
}

OrthogonalFrame orthogonal_frame(const PrePostPair& pair) {
    if (pair.dim() != 2)
        throw ConfigError("orthogonal frame is defined on two-state systems");
    // Rotate the post state so the overlap is real positive; projectors and
    // the ratios built from the frame are insensitive to this global phase.
    const Complex ov = pair.overlap();
    const Complex phase = ov / std::abs(ov);
    Vec f = phase * pair.post().amps();

    // Gram-Schmidt complement of f through i, phase fixed so <f_bar|i> > 0.
    const Vec& i = pair.pre().amps();
    Vec fbar = i - f * (f.dot(i));
    const double fbar_norm = fbar.norm();
    if (fbar_norm < kAmplitudeFloor)
        throw ConfigError("pre and post states are parallel: no orthogonal complement");
    fbar /= fbar_norm;
    const Complex fbar_ov = fbar.dot(i);
    fbar *= fbar_ov / std::abs(fbar_ov);

    const double c = std::abs(ov);
    const double s = std::abs(fbar_ov);
    Vec ibar = s * f - c * fbar;

    OrthogonalFrame frame{StateVec(std::move(f)), StateVec(std::move(fbar)),
                          StateVec(std::move(ibar)), c, s};
    return frame;
}

}  // namespace weakflow
