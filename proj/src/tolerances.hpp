#pragma once

namespace weakflow {

// Centralized tolerance constants. Structural checks bound representation
// error of constructed objects; identity checks bound exact algebra evaluated
// in floating point. Quadrature-dependent comparisons carry their own
// per-test tolerances.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kIdentityTol = 1e-12;

// Minimum admissible |<f|i>| before pre/post selection counts as orthogonal.
inline constexpr double kDefaultOverlapFloor = 1e-8;

// Amplitudes smaller than this are treated as numerically zero denominators.
inline constexpr double kAmplitudeFloor = 1e-14;

// Boundary slack for "much smaller than" margin checks: a margin passes a
// factor F when margin >= F*(1 - kMarginSlack). tan(1.4711) = 9.9972 must
// count as meeting the default factor 10.
inline constexpr double kMarginSlack = 1e-2;

}  // namespace weakflow
