#pragma once

#include <vector>

#include "weak_values.hpp"

namespace weakflow {

// Uniform grid over [0, t_end]; nodes t_k = k*step, k = 0..n_steps.
struct TimeGrid {
    double t_end = 1.0;
    int n_steps = 2000;

    TimeGrid() = default;
    TimeGrid(double t_end_, int n_steps_);

    double step() const { return t_end / n_steps; }
    double node(int k) const { return k * step(); }
    int node_index(double t) const;  // t must lie on the grid
};

// d(eps)/dt profile: square window or per-node samples.
class PulseProfile {
public:
    static PulseProfile square(double amplitude, double t_on, double t_off);
    static PulseProfile off();
    // rate at node k of a grid with the given step; length fixes the domain.
    static PulseProfile sampled(std::vector<double> rates, double step);

    bool is_off() const;
    double rate_at(double t) const;
    // eps(t) = integral of the rate from 0 to t (left sums for sampled shape).
    double integral(double t) const;

private:
    PulseProfile() = default;
    enum class Shape { Square, Sampled } shape_ = Shape::Square;
    double amplitude_ = 0.0;
    double t_on_ = 0.0;
    double t_off_ = 0.0;
    std::vector<double> samples_;
    double sample_step_ = 0.0;
};

// One full experiment: weak observable A with pulse eps_A(t) and detector
// scale q_z, strong observable B with pulse eps_st(t) and scale q_x,
// ensemble size N, and the pre/post selection. With ensemble_scaled set the
// interaction Hamiltonians carry the per-system 1/N weight.
struct MeasurementSetup {
    Operator weak_op;
    Operator strong_op;
    PulseProfile pulse_weak;
    PulseProfile pulse_strong;
    PrePostPair pair;
    double q_z = 1.0;
    double q_x = 1.0;
    int ensemble_size = 1;
    bool ensemble_scaled = true;

    MeasurementSetup(Operator weak, Operator strong, PulseProfile pw, PulseProfile ps,
                     PrePostPair selection);

    double per_system_scale() const { return ensemble_scaled ? 1.0 / ensemble_size : 1.0; }
};

struct SeriesResult {
    std::vector<Complex> terms;         // per-order terms, orders 0..order
    std::vector<Complex> partial_sums;  // running sums of terms
    double residual_vs_exact = 0.0;     // |last partial sum - exact normalized amplitude|
    int order = 0;
    // weak series only: max over orders of |direct-ratio term - projector-route term|
    double form_mismatch = 0.0;
};

inline constexpr int kSeriesOrderCap = 8;

enum class Normalization {
    Raw,             // <f|U|i>
    BareOverlap,     // divided by <f|i>
    RotatedOverlap,  // divided by <f|U_s(t_end)|i>; order 0 of the series is 1
};

// H_A(t) = (d eps_A/dt)(t) * q_z * A, times 1/N when the setup is ensemble-scaled.
Operator h_weak(const MeasurementSetup& setup, const TimeGrid& grid, double t);
Operator h_strong(const MeasurementSetup& setup, const TimeGrid& grid, double t);

// U_s(t_k): ordered product of the per-step strong exponentials up to node k.
Operator strong_evolution(const MeasurementSetup& setup, const TimeGrid& grid, int node);

// H_{A,I}(t_k) = U_s(t_k)^+ H_A(t_k) U_s(t_k).
Operator interaction_hamiltonian(const MeasurementSetup& setup, const TimeGrid& grid, int node);

// <f|U_s(t_end)|i>: the overlap that normalizes the series.
Complex rotated_overlap(const MeasurementSetup& setup, const TimeGrid& grid);

// Exact propagator amplitude, evaluated in the factorized interaction picture
// <f| U_s(t_end) T-exp(-i integral H_{A,I}) |i> with exact per-step exponentials.
Complex exact_amplitude(const MeasurementSetup& setup, const TimeGrid& grid,
                        Normalization norm = Normalization::Raw);

// Same amplitude from the single ordered product for H_A + H_s; differs from
// the factorized route by the per-step Trotter error O(step^2 [H_A, H_s]).
Complex exact_amplitude_direct(const MeasurementSetup& setup, const TimeGrid& grid,
                               Normalization norm = Normalization::Raw);

// Ordered product of the per-step exponentials of H_A + H_s up to node k:
// the un-projected total propagator U_total(t_k). Unitary.
Operator total_propagator(const MeasurementSetup& setup, const TimeGrid& grid, int node);

// Ordered expansion of the exact propagator in powers of H_{A,I}; term n
// collects the total-degree-n part of the product of step exponentials, so the
// partial sums converge to exact_amplitude at the Taylor-remainder rate.
SeriesResult dyson_series_exact(const MeasurementSetup& setup, const TimeGrid& grid, int order);

// Weak-evolution series: term n is the time-ordered integral of the product of
// n first-order factors <f(t)|H_A(t)|i>/<f|i>. Terms 0 and 1 coincide with the
// exact series. Internally evaluated both directly and through the
// weak-conditioned projector; the disagreement is reported as form_mismatch.
SeriesResult weak_evolution_series(const MeasurementSetup& setup, const TimeGrid& grid, int order);

// S_w = integral of the first-order integrand; equals eps_A(t_end) q_z A_w / N
// when the strong pulse is off.
Complex weak_action(const MeasurementSetup& setup, const TimeGrid& grid);

// exp(-i S_w). |result| exceeds 1 when Im A_w < 0; reported as-is.
Complex weak_exponential(const MeasurementSetup& setup, const TimeGrid& grid);

// 1_{f,fbar}(t) = U_s(t)(|f><f| + |fbar><fbar|)U_s^+(t), plus the same operator
// rebuilt through the |i>,|ibar> decomposition. Two-state systems only.
struct IdentityResolutionResult {
    Operator first_line;
    Operator second_line;
    StateVec f_t;      // U_s(t)|f>
    StateVec f_bar_t;  // U_s(t)|fbar>
};

IdentityResolutionResult identity_resolution(const MeasurementSetup& setup, const TimeGrid& grid,
                                             int node);

// (single-system amplitude)^N, per Eq-7-style factorization of product states.
Complex ensemble_amplitude_exact(const MeasurementSetup& setup, const TimeGrid& grid);
// (<f(t_end)|i>)^N exp(-i N S_w).
Complex ensemble_amplitude_weak(const MeasurementSetup& setup, const TimeGrid& grid);

}  // namespace weakflow
