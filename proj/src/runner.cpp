#include "runner.hpp"

#include <cmath>

#include "aav.hpp"
#include "dyson.hpp"
#include "limits.hpp"
#include "weak_values.hpp"

namespace weakflow {

namespace {

Operator operator_by_name(const std::string& name) {
    if (name == "sigma_x") return Operator::sigma_x();
    if (name == "sigma_y") return Operator::sigma_y();
    if (name == "sigma_z") return Operator::sigma_z();
    if (name == "identity") return Operator(Mat::Identity(2, 2), OpKind::Hermitian);
    throw ConfigError("unknown operator '" + name +
                      "' (expected sigma_x, sigma_y, sigma_z or identity)");
}

struct CommonParams {
    double theta;
    double overlap_floor;
    Operator weak_op;
    Operator strong_op;
    double eps_a;
    double eps_st_qx;
    double q_z;
    double q_x;
    double t_end;
    int steps;
    int order;
    int ensemble_n;
    bool ensemble_scaled;
};

CommonParams read_common(const KeyValueConfig& config) {
    CommonParams p{
        config.get_double("selection.theta", 1.2),
        config.get_double("selection.overlap_floor", kDefaultOverlapFloor),
        operator_by_name(config.get_string("operators.weak", "sigma_x")),
        operator_by_name(config.get_string("operators.strong", "sigma_x")),
        config.get_double("coupling.eps_a", 0.05),
        config.get_double("coupling.eps_st_qx", 0.005),
        config.get_double("coupling.q_z", 1.0),
        config.get_double("coupling.q_x", 1.0),
        config.get_double("grid.t_end", 1.0),
        config.get_int("grid.steps", 2000),
        config.get_int("grid.order", kSeriesOrderCap),
        config.get_int("ensemble.n", 1),
        config.get_bool("ensemble.scaled", true),
    };
    if (p.ensemble_n < 1) throw ConfigError("ensemble.n must be at least 1");
    return p;
}

MeasurementSetup setup_from(const CommonParams& p) {
    const SpinSelection selection(p.theta);
    const PulseProfile weak_pulse =
        p.eps_a == 0.0 ? PulseProfile::off()
                       : PulseProfile::square(p.eps_a / p.t_end, 0.0, p.t_end);
    // eps_st_qx is the full strong strength eps_st(t_end)*q_x; q_x scales the
    // Hamiltonian separately, so the pulse itself carries eps_st only.
    const double eps_st = p.eps_st_qx / p.q_x;
    const PulseProfile strong_pulse =
        eps_st == 0.0 ? PulseProfile::off()
                      : PulseProfile::square(eps_st / p.t_end, 0.0, p.t_end);
    MeasurementSetup setup(p.weak_op, p.strong_op, weak_pulse, strong_pulse,
                           selection.pair(p.overlap_floor));
    setup.q_z = p.q_z;
    setup.q_x = p.q_x;
    setup.ensemble_size = p.ensemble_n;
    setup.ensemble_scaled = p.ensemble_scaled;
    return setup;
}

RecordTable cmd_weak_value(const KeyValueConfig& config) {
    const CommonParams p = read_common(config);
    const SpinSelection selection(p.theta);
    // selection.post = pre reads out the conventional average <i|A|i>
    const std::string post_mode = config.get_string("selection.post", "up");
    PrePostPair pair = selection.pair(p.overlap_floor);
    if (post_mode == "pre") {
        pair = PrePostPair(selection.pre(), selection.pre(), p.overlap_floor);
    } else if (post_mode != "up") {
        throw ConfigError("selection.post must be 'up' or 'pre'");
    }
    const WeakValueResult result = weak_value(p.weak_op, pair);
    RecordTable table("weak-value", {{"value_re", FieldKind::Real},
                                     {"value_im", FieldKind::Real},
                                     {"overlap_re", FieldKind::Real},
                                     {"overlap_im", FieldKind::Real},
                                     {"anomalous", FieldKind::Bool}});
    table.add_row({result.value.real(), result.value.imag(), result.overlap.real(),
                   result.overlap.imag(), result.anomalous.value_or(false)});
    return table;
}

RecordTable cmd_series_compare(const KeyValueConfig& config) {
    const CommonParams p = read_common(config);
    const MeasurementSetup setup = setup_from(p);
    const TimeGrid grid(p.t_end, p.steps);

    const SeriesResult exact = dyson_series_exact(setup, grid, p.order);
    const SeriesResult weak = weak_evolution_series(setup, grid, p.order);
    const Complex amplitude = exact_amplitude(setup, grid, Normalization::RotatedOverlap);
    const Complex wexp = weak_exponential(setup, grid);

    RecordTable table("series-compare", {{"order", FieldKind::Int},
                                         {"exact_re", FieldKind::Real},
                                         {"exact_im", FieldKind::Real},
                                         {"weak_re", FieldKind::Real},
                                         {"weak_im", FieldKind::Real},
                                         {"difference", FieldKind::Real},
                                         {"exact_residual", FieldKind::Real},
                                         {"weak_residual", FieldKind::Real}});
    for (int k = 0; k <= p.order; ++k) {
        const Complex e = exact.partial_sums[k];
        const Complex w = weak.partial_sums[k];
        table.add_row({static_cast<std::int64_t>(k), e.real(), e.imag(), w.real(), w.imag(),
                       std::abs(e - w), std::abs(e - amplitude), std::abs(w - wexp)});
    }
    return table;
}

RecordTable cmd_aav(const KeyValueConfig& config) {
    const CommonParams p = read_common(config);
    const double q0 = config.get_double("pointer.q0", 0.0);
    const double delta = config.get_double("pointer.delta", 1.0);
    const int n_points = config.get_int("pointer.n_points", 2048);
    const double halfwidth = config.get_double("pointer.box_halfwidth", 12.0);
    const std::vector<double> eps_list =
        config.get_double_list("pointer.eps_list", {2e-3, 1e-3, 5e-4});

    const SpinSelection selection(p.theta);
    const PointerGrid grid(q0 - halfwidth * delta, q0 + halfwidth * delta, n_points);
    const WeakValueResult exact = weak_value(p.weak_op, selection.pair(p.overlap_floor));

    RecordTable table("aav", {{"theta", FieldKind::Real},
                              {"eps", FieldKind::Real},
                              {"delta", FieldKind::Real},
                              {"success_prob", FieldKind::Real},
                              {"mean_q", FieldKind::Real},
                              {"mean_p", FieldKind::Real},
                              {"A_w_re_est", FieldKind::Real},
                              {"A_w_im_est", FieldKind::Real},
                              {"A_w_exact_re", FieldKind::Real},
                              {"A_w_exact_im", FieldKind::Real}});
    for (double eps : eps_list) {
        const WeakReadout readout = weak_readout(selection, grid, p.weak_op, eps, q0, delta);
        table.add_row({p.theta, eps, delta, readout.success_prob, readout.mean_q, readout.mean_p,
                       readout.a_w_estimate.real(), readout.a_w_estimate.imag(),
                       exact.value.real(), exact.value.imag()});
    }
    return table;
}

RecordTable cmd_regimes(const KeyValueConfig& config) {
    SweepConfig sweep_config;
    sweep_config.ensemble_sizes = config.get_int_list("sweep.n_values", {1, 2, 4, 8, 16, 32});
    sweep_config.thetas =
        config.get_double_list("sweep.theta_values", {0.3, 0.7854, 1.2, 1.4711});
    // range validation up front: axis values are configuration, not data
    for (int n : sweep_config.ensemble_sizes)
        if (n < 1) throw ConfigError("sweep.n_values must be at least 1");
    for (double theta : sweep_config.thetas) SpinSelection{theta};
    sweep_config.eps_a_values = config.get_double_list("sweep.eps_a_values", {0.02, 0.1});
    sweep_config.eps_st_qx_values =
        config.get_double_list("sweep.eps_st_qx_values", {0.005, 0.05});
    sweep_config.t_end = config.get_double("grid.t_end", 1.0);
    sweep_config.n_steps = config.get_int("grid.steps", 2000);
    sweep_config.thresholds.margin_factor = config.get_double("output.margin_factor", 10.0);
    sweep_config.thresholds.phase_threshold = config.get_double("output.phase_threshold", 0.05);
    sweep_config.thresholds.error_breakdown_level =
        config.get_double("output.error_breakdown_level", 0.1);
    sweep_config.overlap_floor = config.get_double("selection.overlap_floor", kDefaultOverlapFloor);

    const std::vector<RegimeReport> reports = sweep(sweep_config);

    RecordTable table("regimes", {{"N", FieldKind::Int},
                                  {"theta", FieldKind::Real},
                                  {"eps_st_qx", FieldKind::Real},
                                  {"lhs16", FieldKind::Real},
                                  {"rhs16", FieldKind::Real},
                                  {"margin11", FieldKind::Real},
                                  {"phase_mismatch", FieldKind::Real},
                                  {"approx_error", FieldKind::Real},
                                  {"regime", FieldKind::Text}});
    for (const RegimeReport& r : reports) {
        table.add_row({static_cast<std::int64_t>(r.ensemble_size), r.theta, r.eps_st_qx, r.lhs16,
                       r.rhs16, r.margin11, r.phase_mismatch, r.approx_error,
                       std::string(regime_name(r.regime))});
    }
    return table;
}

RecordTable cmd_transition(const KeyValueConfig& config) {
    const CommonParams p = read_common(config);
    const MeasurementSetup setup = setup_from(p);
    const TimeGrid grid(p.t_end, p.steps);
    const TransitionRatioResult result = verify_transition_ratio(setup, grid);

    RecordTable table("transition", {{"ratio_re", FieldKind::Real},
                                     {"ratio_im", FieldKind::Real},
                                     {"reference", FieldKind::Real},
                                     {"residual", FieldKind::Real},
                                     {"method", FieldKind::Text}});
    table.add_row({result.ratio.real(), result.ratio.imag(), result.reference, result.residual,
                   result.method});
    return table;
}

}  // namespace

RecordTable run_command(const std::string& command, const KeyValueConfig& config) {
    if (config.has("run.seed")) config.get_int("run.seed", 0);  // validated; reserved
    if (command == "weak-value") return cmd_weak_value(config);
    if (command == "series-compare") return cmd_series_compare(config);
    if (command == "aav") return cmd_aav(config);
    if (command == "regimes") return cmd_regimes(config);
    if (command == "transition") return cmd_transition(config);
    throw ConfigError("unknown command '" + command + "'");
}

}  // namespace weakflow
