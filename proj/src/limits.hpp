#pragma once

#include <string>
#include <vector>

#include "aav.hpp"
#include "dyson.hpp"

namespace weakflow {

enum class Regime { WeakValue, NullWeakValue, Breakdown, Indeterminate };

const char* regime_name(Regime regime);

// Classification thresholds. "Much smaller than" passes a margin when
// margin >= factor*(1 - kMarginSlack).
struct RegimeThresholds {
    double margin_factor = 10.0;
    double phase_threshold = 0.05;       // rad, phase-condition pass level
    double error_breakdown_level = 0.1;  // relative approximation error
};

// One (N, theta, couplings) point of the validity map.
struct RegimeReport {
    int ensemble_size = 1;       // N
    double theta = 0.0;
    double eps_st_qx = 0.0;      // strong strength at t_end
    double lhs16 = 0.0;          // eps_st q_x sin(2 theta), window left side
    double rhs16 = 0.0;          // tan(theta), window right side
    double margin11 = 0.0;       // tan(theta)/N
    double phase_mismatch = 0.0; // rad
    double approx_error = 0.0;   // |exact - weak| / |exact|, ensemble amplitudes
    Regime regime = Regime::Indeterminate;

    // Reported separately from the regime tag.
    bool window_violated = false;   // both margin sides of the window closed
    bool error_breakdown = false;   // measured error above the breakdown level
};

// Restriction N << |<i|fbar>/<i|f>| = tan(theta). Returns tan(theta)/N.
double weak_side_margin(const SpinSelection& selection, int ensemble_size);
bool weak_side_satisfied(double margin11, const RegimeThresholds& thresholds);

// Phase condition: wrapped |arg<ibar|U_s|ibar> - arg<i|U_s|i>| at t_end.
double check_phase_condition(const MeasurementSetup& setup, const TimeGrid& grid);

struct ValidityWindow {
    double lhs;  // eps_st q_x sin(2 theta)
    double rhs;  // tan(theta)
    bool satisfied;
};

// Joint validity window eps_st q_x sin(2 theta) << N << tan(theta).
ValidityWindow check_validity_window(const SpinSelection& selection, double eps_st_qx,
                                     int ensemble_size, const RegimeThresholds& thresholds = {});

// Complementary null-weak-value inequality N << |<i|f>/<i|fbar>| = cot(theta).
// Returns cot(theta)/N.
double null_weak_value_side(const SpinSelection& selection, int ensemble_size);

// |ensemble exact - ensemble weak| / |ensemble exact|.
double approximation_error(const MeasurementSetup& setup, const TimeGrid& grid);

struct TransitionRatioResult {
    Complex ratio;      // <i|Pi_f U_A|i> / weak-evolution propagator
    double reference;   // |<f(t_end)|i>|^2
    double residual;    // |ratio - reference|
    std::string method; // denominator resummation used
};

TransitionRatioResult verify_transition_ratio(const MeasurementSetup& setup, const TimeGrid& grid);

// Pure function of the report margins and thresholds; re-derivable from a
// serialized report (margin_null = 1/(margin11 N^2) via tan*cot = 1).
Regime classify_regime(int ensemble_size, double margin11, double margin_null, double lhs16,
                       double phase_mismatch, const RegimeThresholds& thresholds);

struct SweepConfig {
    std::vector<int> ensemble_sizes;
    std::vector<double> thetas;
    std::vector<double> eps_a_values;
    std::vector<double> eps_st_qx_values;
    double t_end = 1.0;
    int n_steps = 2000;
    RegimeThresholds thresholds;
    double overlap_floor = kDefaultOverlapFloor;
    int max_threads = 0;  // 0: hardware limit, capped by WEAKFLOW_THREADS
};

// One report per cartesian point, ordered lexicographically in the declared
// axes (N, theta, eps_a, eps_st_qx). Per-point failures surface as
// Indeterminate reports with non-finite fields zeroed, never as an abort.
std::vector<RegimeReport> sweep(const SweepConfig& config);

// Setup used by the sweep and the transition/error commands: A = sigma_z,
// B = sigma_x, square pulses across [0, t_end], per-system couplings taken
// unscaled (see approximation_error notes in the README).
MeasurementSetup standard_setup(double theta, double eps_a, double eps_st_qx, int ensemble_size,
                                double t_end, double overlap_floor = kDefaultOverlapFloor);

}  // namespace weakflow
