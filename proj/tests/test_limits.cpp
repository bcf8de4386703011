#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "helpers.hpp"
#include "limits.hpp"

using namespace weakflow;
using namespace weakflow::testing;

namespace {

SweepConfig standard_sweep_config() {
    SweepConfig c;
    c.ensemble_sizes = {1, 2, 4, 8, 16, 32};
    c.thetas = {0.3, 0.7854, 1.2, 1.4711};
    c.eps_a_values = {0.02, 0.1};
    c.eps_st_qx_values = {0.005, 0.05};
    return c;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("restriction 11 margins") {
    const double m = weak_side_margin(SpinSelection(1.4711), 1);
    CHECK(m == doctest::Approx(std::tan(1.4711)));
    CHECK(weak_side_satisfied(m, RegimeThresholds{}));  // 9.997 passes factor 10 with slack

    CHECK_FALSE(weak_side_satisfied(weak_side_margin(SpinSelection(1.4711), 10),
                                         RegimeThresholds{}));
    CHECK(weak_side_margin(SpinSelection(std::numbers::pi / 4.0), 1) ==
          doctest::Approx(1.0));
    CHECK_FALSE(weak_side_satisfied(1.0, RegimeThresholds{}));
}

TEST_CASE("phase condition closed form for sigma_x strong measurement") {
    const TimeGrid grid(1.0, 2000);
    auto mismatch = [&](double theta, double eps_st) {
        return check_phase_condition(standard_setup(theta, 0.0, eps_st, 1, 1.0), grid);
    };
    CHECK(mismatch(0.9, 0.0) == 0.0);

    // closed form: 2 atan(tan(phi) sin(2 theta)), phi = eps_st q_x
    for (double theta : {0.3, std::numbers::pi / 4.0, 1.2}) {
        for (double eps_st : {0.02, 0.05}) {
            const double expect = 2.0 * std::atan(std::tan(eps_st) * std::sin(2.0 * theta));
            CHECK(mismatch(theta, eps_st) == doctest::Approx(expect).epsilon(1e-9));
        }
    }

    // monotone growth with the strong strength
    double last = 0.0;
    for (double eps_st : {0.01, 0.05, 0.1, 0.2}) {
        const double m = mismatch(0.7, eps_st);
        CHECK(m > last);
        last = m;
    }
}

TEST_CASE("degenerate phase is reported") {
    // B = sigma_z at theta = pi/4: <i|U_s|i> = cos(phi), zero at phi = pi/2.
    const SpinSelection sel(std::numbers::pi / 4.0);
    MeasurementSetup setup(Operator::sigma_z(), Operator::sigma_z(), PulseProfile::off(),
                           PulseProfile::square(std::numbers::pi / 2.0, 0.0, 1.0), sel.pair());
    CHECK_THROWS_AS(check_phase_condition(setup, TimeGrid(1.0, 2000)), DegeneratePhaseError);
}

TEST_CASE("window 16 evaluation") {
    const ValidityWindow open = check_validity_window(SpinSelection(1.4711), 0.01, 1);
    CHECK(open.lhs == doctest::Approx(0.01 * std::sin(2.0 * 1.4711)));
    CHECK(open.lhs == doctest::Approx(0.00198).epsilon(1e-2));
    CHECK(open.rhs == doctest::Approx(std::tan(1.4711)));
    CHECK(open.satisfied);

    CHECK_FALSE(check_validity_window(SpinSelection(1.4711), 0.01, 10).satisfied);  // N >= tan(theta)

    // near pi/2 the left side vanishes; only the right side limits
    const ValidityWindow steep = check_validity_window(SpinSelection(1.56), 1.0, 1);
    CHECK(steep.lhs < 0.05);
    CHECK(steep.satisfied);
}

TEST_CASE("null weak value side") {
    CHECK(null_weak_value_side(SpinSelection(0.0997), 1) ==
          doctest::Approx(1.0 / std::tan(0.0997)));
    CHECK(null_weak_value_side(SpinSelection(0.0997), 1) == doctest::Approx(10.0).epsilon(1e-2));
    CHECK(null_weak_value_side(SpinSelection(std::numbers::pi / 4.0), 1) == doctest::Approx(1.0));

    for (int n : {1, 3, 7}) {
        const SpinSelection sel(1.2);
        const double product = weak_side_margin(sel, n) * null_weak_value_side(sel, n);
        CHECK(std::abs(product - 1.0 / (static_cast<double>(n) * n)) <= kIdentityTol);
    }
}

TEST_CASE("approximation error: trivial zero and coupling scaling") {
    const TimeGrid grid(1.0, 1000);
    CHECK(approximation_error(standard_setup(0.8, 0.0, 0.0, 3, 1.0), grid) <= 1e-15);

    // quadratic in the weak coupling at fixed N, theta
    std::vector<double> eps{0.04, 0.02, 0.01};
    std::vector<double> errs;
    for (double e : eps)
        errs.push_back(approximation_error(standard_setup(1.2, e, 0.01, 2, 1.0), grid));
    CHECK(loglog_slope(eps, errs) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("approximation error grows across the right window boundary") {
    const TimeGrid grid(1.0, 2000);
    const double e1 = approximation_error(standard_setup(1.4711, 0.1, 0.01, 1, 1.0), grid);
    const double e8 = approximation_error(standard_setup(1.4711, 0.1, 0.01, 8, 1.0), grid);
    CHECK(e1 < e8);
    // at N = 32 the exact ensemble amplitude |cos(theta)|^N falls below the
    // 1e-14 floor: reported as near-orthogonal evolution
    CHECK_THROWS_AS(approximation_error(standard_setup(1.4711, 0.1, 0.01, 32, 1.0), grid),
                    NumericError);
}

TEST_CASE("transition probability emerges as a ratio of propagators") {
    const TimeGrid grid(1.0, 2000);

    const TransitionRatioResult trivial = verify_transition_ratio(standard_setup(1.2, 0.0, 0.0, 1, 1.0), grid);
    CHECK(trivial.residual <= kIdentityTol);
    CHECK(cdist(trivial.ratio, Complex(std::cos(1.2) * std::cos(1.2), 0.0)) <= kIdentityTol);

    const TransitionRatioResult weak_window = verify_transition_ratio(standard_setup(1.4711, 0.05, 0.005, 1, 1.0), grid);
    CHECK(weak_window.residual <= 1e-3);
    CHECK(weak_window.method == "weak_series_order8");

    // breakdown point still reports instead of failing
    const TransitionRatioResult rough = verify_transition_ratio(standard_setup(0.3, 0.5, 0.2, 1, 1.0), grid);
    CHECK(std::isfinite(rough.residual));
}

TEST_CASE("transition-ratio residual vanishes at least linearly with the couplings") {
    const TimeGrid grid(1.0, 1000);
    std::vector<double> lambdas{1.0, 0.5, 0.25};
    std::vector<double> residuals;
    for (double l : lambdas)
        residuals.push_back(
            verify_transition_ratio(standard_setup(1.2, 0.05 * l, 0.005 * l, 1, 1.0), grid).residual);
    CHECK(residuals[0] > residuals[1]);
    CHECK(residuals[1] > residuals[2]);
    CHECK(loglog_slope(lambdas, residuals) >= 0.9);
}

TEST_CASE("classifier is a pure function of margins and thresholds") {
    const RegimeThresholds thr;
    // weak window satisfied
    CHECK(classify_regime(1, 9.99, 0.1, 0.002, 0.01, thr) == Regime::WeakValue);
    // phase condition violated blocks the weak tag
    CHECK(classify_regime(1, 9.99, 0.1, 0.002, 0.2, thr) != Regime::WeakValue);
    // strong null side
    CHECK(classify_regime(1, 0.0997, 10.03, 0.01, 0.0, thr) == Regime::NullWeakValue);
    // null dominance
    CHECK(classify_regime(1, 0.31, 3.2, 0.01, 0.0, thr) == Regime::NullWeakValue);
    // both sides closed
    CHECK(classify_regime(4, 0.64, 0.1, 0.01, 0.0, thr) == Regime::Breakdown);
    // weak side open but below the factor
    CHECK(classify_regime(1, 2.57, 0.39, 0.01, 0.0, thr) == Regime::Indeterminate);
}

TEST_CASE("sweep: empty axes, singleton consistency and ordering") {
    SweepConfig empty;
    CHECK(sweep(empty).empty());

    SweepConfig single;
    single.ensemble_sizes = {2};
    single.thetas = {1.2};
    single.eps_a_values = {0.1};
    single.eps_st_qx_values = {0.01};
    const std::vector<RegimeReport> reports = sweep(single);
    REQUIRE(reports.size() == 1);
    const RegimeReport& r = reports.front();

    const TimeGrid grid(single.t_end, single.n_steps);
    const MeasurementSetup setup = standard_setup(1.2, 0.1, 0.01, 2, single.t_end);
    CHECK(r.approx_error == approximation_error(setup, grid));
    CHECK(r.phase_mismatch == check_phase_condition(setup, grid));
    CHECK(r.margin11 == weak_side_margin(SpinSelection(1.2), 2));
    CHECK(r.lhs16 == check_validity_window(SpinSelection(1.2), 0.01, 2).lhs);
}

TEST_CASE("standard sweep populates every regime and correlates error with the window") {
    const std::vector<RegimeReport> reports = sweep(standard_sweep_config());
    REQUIRE(reports.size() == 96);

    std::vector<double> weak_errors, breakdown_errors;
    int null_count = 0, indeterminate_count = 0;
    for (const RegimeReport& r : reports) {
        switch (r.regime) {
            case Regime::WeakValue: weak_errors.push_back(r.approx_error); break;
            case Regime::Breakdown: breakdown_errors.push_back(r.approx_error); break;
            case Regime::NullWeakValue: ++null_count; break;
            case Regime::Indeterminate: ++indeterminate_count; break;
        }
    }
    CHECK(!weak_errors.empty());
    CHECK(!breakdown_errors.empty());
    CHECK(null_count > 0);
    CHECK(indeterminate_count > 0);
    CHECK(median(weak_errors) < median(breakdown_errors));
}

TEST_CASE("sweep reports re-derive their own classification") {
    const RegimeThresholds thr;
    for (const RegimeReport& r : sweep(standard_sweep_config())) {
        const double margin_null =
            1.0 / (r.margin11 * r.ensemble_size * r.ensemble_size);
        CHECK(classify_regime(r.ensemble_size, r.margin11, margin_null, r.lhs16,
                              r.phase_mismatch, thr) == r.regime);
        if (r.regime == Regime::WeakValue) {
            CHECK(r.margin11 >= thr.margin_factor * (1.0 - kMarginSlack));
            CHECK(r.ensemble_size >= thr.margin_factor * (1.0 - kMarginSlack) * r.lhs16);
        }
        CHECK(std::isfinite(r.approx_error));
        CHECK(std::isfinite(r.phase_mismatch));
    }
}

TEST_CASE("sweep records per-point failures without aborting") {
    SweepConfig config;
    config.ensemble_sizes = {1};
    config.thetas = {2.0, 0.3};  // first angle is outside (0, pi/2)
    config.eps_a_values = {0.1};
    config.eps_st_qx_values = {0.01};
    config.n_steps = 200;
    config.max_threads = 2;
    const std::vector<RegimeReport> reports = sweep(config);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].regime == Regime::Indeterminate);
    CHECK(reports[0].approx_error == 0.0);
    CHECK(reports[1].regime == Regime::NullWeakValue);
    CHECK(reports[1].approx_error > 0.0);
}

TEST_CASE("sweep results do not depend on the thread count") {
    SweepConfig config = standard_sweep_config();
    config.thetas = {0.3, 1.4711};
    config.ensemble_sizes = {1, 32};

    config.max_threads = 1;
    const std::vector<RegimeReport> serial = sweep(config);
    config.max_threads = 4;
    const std::vector<RegimeReport> parallel = sweep(config);

    REQUIRE(serial.size() == parallel.size());
    for (size_t k = 0; k < serial.size(); ++k) {
        CHECK(serial[k].approx_error == parallel[k].approx_error);
        CHECK(serial[k].phase_mismatch == parallel[k].phase_mismatch);
        CHECK(serial[k].regime == parallel[k].regime);
    }
}
