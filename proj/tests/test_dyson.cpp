#include <doctest.h>

#include <cmath>
#include <random>

#include "dyson.hpp"
#include "helpers.hpp"

using namespace weakflow;
using namespace weakflow::testing;

namespace {

MeasurementSetup make_setup(double theta, double eps_a, double eps_st_qx, int ensemble = 1,
                            bool scaled = true, Operator a = Operator::sigma_z(),
                            Operator b = Operator::sigma_x(), double t_end = 1.0) {
    const PulseProfile pa = eps_a == 0.0 ? PulseProfile::off()
                                         : PulseProfile::square(eps_a / t_end, 0.0, t_end);
    const PulseProfile ps = eps_st_qx == 0.0
                                ? PulseProfile::off()
                                : PulseProfile::square(eps_st_qx / t_end, 0.0, t_end);
    MeasurementSetup setup(std::move(a), std::move(b), pa, ps,
                           PrePostPair(StateVec{std::cos(theta), std::sin(theta)},
                                       StateVec::basis(2, 0)));
    setup.ensemble_size = ensemble;
    setup.ensemble_scaled = scaled;
    return setup;
}

// exp(-i phi sigma_x) rebuilt from the angle-addition closed form.
Mat sigma_x_rotation(double phi) {
    Mat u(2, 2);
    u << std::cos(phi), Complex(0, -std::sin(phi)), Complex(0, -std::sin(phi)), std::cos(phi);
    return u;
}

}  // namespace

TEST_CASE("time grid node lookup") {
    const TimeGrid grid(2.0, 8);
    CHECK(grid.step() == doctest::Approx(0.25));
    CHECK(grid.node_index(0.5) == 2);
    CHECK(grid.node_index(2.0) == 8);
    CHECK_THROWS_AS(grid.node_index(0.37), ConfigError);
    CHECK_THROWS_AS(TimeGrid(0.0, 10), ConfigError);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), ConfigError);
}

TEST_CASE("pulse profiles") {
    const PulseProfile p = PulseProfile::square(0.4, 0.25, 0.75);
    CHECK(p.rate_at(0.1) == 0.0);
    CHECK(p.rate_at(0.5) == 0.4);
    CHECK(p.rate_at(0.75) == 0.0);  // half-open window
    CHECK(p.integral(1.0) == doctest::Approx(0.2));
    CHECK(p.integral(0.5) == doctest::Approx(0.1));
    CHECK_THROWS_AS(PulseProfile::square(1.0, 0.5, 0.5), ConfigError);

    const PulseProfile s = PulseProfile::sampled({1.0, 0.0, 2.0, 0.0}, 0.25);
    CHECK(s.rate_at(0.6) == 2.0);
    CHECK(s.integral(1.0) == doctest::Approx(0.75));
    CHECK_FALSE(s.is_off());
    CHECK(PulseProfile::off().is_off());
}

TEST_CASE("interaction Hamiltonians from pulse windows") {
    MeasurementSetup setup = make_setup(1.0, 0.0, 0.0);
    setup.pulse_weak = PulseProfile::square(0.3, 0.25, 0.75);
    const TimeGrid grid(1.0, 100);

    CHECK(max_abs_diff(h_weak(setup, grid, 0.1).entries(), Mat::Zero(2, 2)) == 0.0);
    CHECK(max_abs_diff(h_weak(setup, grid, 0.5).entries(),
                       Mat(0.3 * Operator::sigma_z().entries())) <= kIdentityTol);

    setup.ensemble_size = 4;
    CHECK(max_abs_diff(h_weak(setup, grid, 0.5).entries(),
                       Mat((0.3 / 4.0) * Operator::sigma_z().entries())) <= kIdentityTol);
    setup.ensemble_scaled = false;
    CHECK(max_abs_diff(h_weak(setup, grid, 0.5).entries(),
                       Mat(0.3 * Operator::sigma_z().entries())) <= kIdentityTol);

    CHECK_THROWS_AS(h_weak(setup, grid, 1.5), ConfigError);
    CHECK_THROWS_AS(h_strong(setup, grid, -0.1), ConfigError);
}

TEST_CASE("strong evolution matches the commuting closed form and stays unitary") {
    const double eps_st = 0.8;
    const int n_ensemble = 2;
    const MeasurementSetup setup = make_setup(0.9, 0.0, eps_st, n_ensemble);
    const TimeGrid grid(1.0, 400);

    const MeasurementSetup quiet = make_setup(0.9, 0.0, 0.0);
    CHECK(max_abs_diff(strong_evolution(quiet, grid, 400).entries(), Mat::Identity(2, 2)) == 0.0);

    for (int node : {57, 200, 400}) {
        const double phi = eps_st * grid.node(node) / n_ensemble;
        const Operator u = strong_evolution(setup, grid, node);
        CHECK(max_abs_diff(u.entries(), sigma_x_rotation(phi)) <= kStructuralTol);
        CHECK(max_abs_diff((u.adjoint() * u).entries(), Mat::Identity(2, 2)) <= kStructuralTol);
    }
}

TEST_CASE("interaction hamiltonian is the strong-frame similarity transform") {
    const TimeGrid grid(1.0, 200);

    const MeasurementSetup no_strong = make_setup(1.1, 0.07, 0.0);
    const Operator h = interaction_hamiltonian(no_strong, grid, 120);
    CHECK(max_abs_diff(h.entries(), h_weak(no_strong, grid, grid.node(120)).entries()) <=
          kIdentityTol);

    const MeasurementSetup rotated = make_setup(1.1, 0.07, 0.4);
    for (int node : {0, 77, 200}) {
        const Operator hi = interaction_hamiltonian(rotated, grid, node);
        CHECK(max_abs_diff(hi.entries(), hi.entries().adjoint()) <= kIdentityTol);
    }

    // Commuting A and B: the transform is inert.
    const MeasurementSetup commuting =
        make_setup(1.1, 0.07, 0.4, 1, true, Operator::sigma_x(), Operator::sigma_x());
    for (int node : {13, 150}) {
        CHECK(max_abs_diff(interaction_hamiltonian(commuting, grid, node).entries(),
                           h_weak(commuting, grid, grid.node(node)).entries()) <= kIdentityTol);
    }
}

TEST_CASE("exact amplitude: pulses off gives the bare overlap") {
    const MeasurementSetup setup = make_setup(0.8, 0.0, 0.0);
    const TimeGrid grid(1.0, 100);
    CHECK(cdist(exact_amplitude(setup, grid), setup.pair.overlap()) <= 1e-15);
    CHECK(cdist(exact_amplitude(setup, grid, Normalization::BareOverlap), Complex(1.0, 0.0)) <=
          1e-15);
}

TEST_CASE("exact amplitude: commuting closed form without the strong pulse") {
    const double theta = 1.2, eps_a = 0.35;
    const int n_ensemble = 3;
    const MeasurementSetup setup = make_setup(theta, eps_a, 0.0, n_ensemble);
    const TimeGrid grid(1.0, 500);
    // <up|exp(-i eps' sigma_z)|i> = exp(-i eps') cos(theta), eps' = eps_a/N
    const double eps_eff = eps_a / n_ensemble;
    const Complex expect = std::exp(Complex(0.0, -eps_eff)) * std::cos(theta);
    CHECK(cdist(exact_amplitude(setup, grid), expect) <= kStructuralTol);
}

TEST_CASE("exact amplitude: self-convergence order at least one") {
    const MeasurementSetup setup = make_setup(1.2, 0.3, 0.4);
    const Complex a1 = exact_amplitude(setup, TimeGrid(1.0, 250));
    const Complex a2 = exact_amplitude(setup, TimeGrid(1.0, 500));
    const Complex a3 = exact_amplitude(setup, TimeGrid(1.0, 1000));
    const double order = std::log2(std::abs(a1 - a2) / std::abs(a2 - a3));
    CHECK(order >= 0.9);
}

TEST_CASE("factorized and direct evaluations agree at the Trotter level") {
    const MeasurementSetup setup = make_setup(0.7, 0.01, 0.002);
    const TimeGrid grid(1.0, 80000);
    const Complex fact = exact_amplitude(setup, grid, Normalization::RotatedOverlap);
    const Complex direct = exact_amplitude_direct(setup, grid, Normalization::RotatedOverlap);
    CHECK(cdist(fact, direct) <= 1e-9);
}

TEST_CASE("total propagator is unitary at grid points") {
    const MeasurementSetup setup = make_setup(1.2, 0.3, 0.2);
    const TimeGrid grid(1.0, 800);
    for (int node : {0, 1, 317, 800}) {
        const Operator u = total_propagator(setup, grid, node);
        CHECK(max_abs_diff((u.adjoint() * u).entries(), Mat::Identity(2, 2)) <= kStructuralTol);
    }
}

TEST_CASE("exact series: leading term and order cap") {
    const MeasurementSetup setup = make_setup(1.2, 0.05, 0.005);
    const TimeGrid grid(1.0, 400);
    const SeriesResult series = dyson_series_exact(setup, grid, 3);
    CHECK(series.terms[0] == Complex(1.0, 0.0));
    CHECK(series.partial_sums.size() == 4);
    CHECK_THROWS_AS(dyson_series_exact(setup, grid, 9), ConfigError);
    CHECK_THROWS_AS(dyson_series_exact(setup, grid, -1), ConfigError);
}

TEST_CASE("exact series terms are homogeneous of degree n in the weak coupling") {
    const TimeGrid grid(1.0, 300);
    const SeriesResult full = dyson_series_exact(make_setup(1.2, 0.4, 0.3), grid, 5);
    const SeriesResult half = dyson_series_exact(make_setup(1.2, 0.2, 0.3), grid, 5);
    double lambda_pow = 1.0;
    for (int n = 1; n <= 5; ++n) {
        lambda_pow *= 2.0;
        CHECK(cdist(full.terms[n], lambda_pow * half.terms[n]) <=
              1e-10 * (1.0 + std::abs(full.terms[n])));
    }
}

TEST_CASE("exact series order 4 reaches the amplitude at small coupling") {
    const MeasurementSetup setup = make_setup(1.2, 0.05, 0.005);
    const TimeGrid grid(1.0, 2000);
    const SeriesResult series = dyson_series_exact(setup, grid, 4);
    const Complex amplitude = exact_amplitude(setup, grid, Normalization::RotatedOverlap);
    CHECK(cdist(series.partial_sums.back(), amplitude) <= 1e-6);
    CHECK(series.residual_vs_exact <= 1e-6);
}

TEST_CASE("weak and exact series share orders zero and one bitwise") {
    const MeasurementSetup setup = make_setup(1.2, 0.05, 0.005);
    const TimeGrid grid(1.0, 2000);
    const SeriesResult exact = dyson_series_exact(setup, grid, 6);
    const SeriesResult weak = weak_evolution_series(setup, grid, 6);
    CHECK(exact.terms[0] == weak.terms[0]);
    CHECK(exact.terms[1] == weak.terms[1]);
    CHECK(exact.partial_sums[1] == weak.partial_sums[1]);
}

TEST_CASE("weak series factorizes for a time-constant integrand") {
    // No strong pulse: g is constant across the window.
    const MeasurementSetup setup = make_setup(0.9, 0.12, 0.0, 1, true, Operator::sigma_x());
    const TimeGrid grid(1.0, 500);
    const SeriesResult weak = weak_evolution_series(setup, grid, 4);
    const Complex t1 = weak.terms[1];
    CHECK(cdist(weak.terms[2], 0.5 * t1 * t1) <= kIdentityTol * (1.0 + std::abs(t1 * t1)));
}

TEST_CASE("direct and projector-route forms of the weak series coincide") {
    const MeasurementSetup setup = make_setup(1.2, 0.08, 0.3);
    const TimeGrid grid(1.0, 1000);
    const SeriesResult weak = weak_evolution_series(setup, grid, 6);
    CHECK(weak.form_mismatch <= kIdentityTol);
}

TEST_CASE("weak series resums to the weak exponential") {
    // |S_w| = 0.05 tan(1.4711) ~ 0.5, the documented worst case for order 8.
    const MeasurementSetup setup = make_setup(1.4711, 0.05, 0.0, 1, true, Operator::sigma_x());
    const TimeGrid grid(1.0, 2000);
    const SeriesResult weak = weak_evolution_series(setup, grid, 8);
    CHECK(cdist(weak.partial_sums.back(), weak_exponential(setup, grid)) <= 1e-8);
}

TEST_CASE("weak action closed forms") {
    const TimeGrid grid(1.0, 1000);
    CHECK(weak_action(make_setup(0.9, 0.0, 0.0), grid) == Complex(0.0, 0.0));

    // eps_st = 0, A = sigma_x: S_w = eps_A q_z tan(theta).
    const double theta = 1.1, eps_a = 0.23;
    MeasurementSetup setup = make_setup(theta, eps_a, 0.0, 1, true, Operator::sigma_x());
    setup.q_z = 1.7;
    CHECK(cdist(weak_action(setup, grid), Complex(eps_a * 1.7 * std::tan(theta), 0.0)) <=
          kStructuralTol);
}

TEST_CASE("weak action is additive over disjoint pulse windows") {
    const TimeGrid grid(1.0, 1000);
    const double dt = grid.step();
    std::vector<double> w1(1000, 0.0), w2(1000, 0.0), both(1000, 0.0);
    for (int k = 100; k < 300; ++k) w1[k] = 0.4;
    for (int k = 600; k < 900; ++k) w2[k] = -0.2;
    for (int k = 0; k < 1000; ++k) both[k] = w1[k] + w2[k];

    auto with_pulse = [&](const std::vector<double>& rates) {
        MeasurementSetup setup = make_setup(1.0, 0.1, 0.15, 1, true, Operator::sigma_x());
        setup.pulse_weak = PulseProfile::sampled(rates, dt);
        return weak_action(setup, grid);
    };
    CHECK(cdist(with_pulse(both), with_pulse(w1) + with_pulse(w2)) <= kIdentityTol);
}

TEST_CASE("weak exponential magnitude follows the imaginary part of A_w") {
    const TimeGrid grid(1.0, 500);
    CHECK(weak_exponential(make_setup(0.6, 0.0, 0.0), grid) == Complex(1.0, 0.0));

    // real weak action: pure phase
    const MeasurementSetup real_case = make_setup(0.6, 0.3, 0.0);
    CHECK(std::abs(std::abs(weak_exponential(real_case, grid)) - 1.0) <= kIdentityTol);

    // sigma_y gives A_w = -i tan(theta): |W| = exp(-eps tan(theta)) != 1
    const double theta = 0.8, eps_a = 0.4;
    const MeasurementSetup imag_case =
        make_setup(theta, eps_a, 0.0, 1, true, Operator::sigma_y());
    const double expect = std::exp(-eps_a * std::tan(theta));
    CHECK(std::abs(std::abs(weak_exponential(imag_case, grid)) - expect) <= kStructuralTol);

    const MeasurementSetup grow_case =
        make_setup(theta, -eps_a, 0.0, 1, true, Operator::sigma_y());
    CHECK(std::abs(weak_exponential(grow_case, grid)) > 1.0);
}

TEST_CASE("identity resolution is complete and decomposes consistently") {
    const MeasurementSetup setup = make_setup(0.9, 0.05, 0.6);
    const TimeGrid grid(1.0, 400);
    for (int node : {0, 150, 400}) {
        const IdentityResolutionResult r = identity_resolution(setup, grid, node);
        CHECK(max_abs_diff(r.first_line.entries(), Mat::Identity(2, 2)) <= kIdentityTol);
        CHECK(max_abs_diff(r.first_line.entries(), r.second_line.entries()) <= kIdentityTol);

        const StateVec mapped = r.first_line.apply(r.f_t);
        CHECK((mapped.amps() - r.f_t.amps()).cwiseAbs().maxCoeff() <= kIdentityTol);
        CHECK(std::abs(r.f_t.norm() - 1.0) <= kIdentityTol);
    }
}

TEST_CASE("identity resolution rejects higher dimensions") {
    Mat a(3, 3), b(3, 3);
    a.setZero();
    a(0, 0) = 1.0;
    a(2, 2) = -1.0;
    b.setZero();
    b(0, 1) = b(1, 0) = 1.0;
    Vec pre(3), post(3);
    pre << 0.6, 0.48, 0.64;
    post << 1.0, 0.0, 0.0;
    MeasurementSetup setup(Operator(a, OpKind::Hermitian), Operator(b, OpKind::Hermitian),
                           PulseProfile::square(0.1, 0.0, 1.0), PulseProfile::off(),
                           PrePostPair(StateVec(pre), StateVec(post)));
    CHECK_THROWS_AS(identity_resolution(setup, TimeGrid(1.0, 10), 0), ConfigError);
}

TEST_CASE("ensemble amplitudes reduce to the single system at N = 1") {
    const MeasurementSetup setup = make_setup(1.2, 0.1, 0.02);
    const TimeGrid grid(1.0, 500);
    CHECK(cdist(ensemble_amplitude_exact(setup, grid), exact_amplitude(setup, grid)) == 0.0);
    const Complex weak1 = rotated_overlap(setup, grid) * weak_exponential(setup, grid);
    CHECK(cdist(ensemble_amplitude_weak(setup, grid), weak1) <= kIdentityTol);
}

TEST_CASE("ensemble amplitudes with couplings off are overlap powers") {
    MeasurementSetup setup = make_setup(0.8, 0.0, 0.0, 5);
    const TimeGrid grid(1.0, 100);
    Complex expect(1.0, 0.0);
    for (int k = 0; k < 5; ++k) expect *= setup.pair.overlap();
    CHECK(cdist(ensemble_amplitude_exact(setup, grid), expect) <= kIdentityTol);
    CHECK(cdist(ensemble_amplitude_weak(setup, grid), expect) <= kIdentityTol);
}

namespace {

Operator embed(const Operator& op, int slot, int n_systems) {
    // hermitian-tagged identity so the Kronecker factors stay hermitian
    const Operator id(Mat::Identity(2, 2), OpKind::Hermitian);
    Operator acc = slot == 0 ? op : id;
    for (int j = 1; j < n_systems; ++j) acc = tensor(acc, j == slot ? op : id);
    return acc;
}

// Joint-space evolution mirroring the interaction-picture stepping, built
// from linalg primitives only.
Complex brute_tensor_amplitude(const MeasurementSetup& setup, const TimeGrid& grid) {
    const int n_sys = setup.ensemble_size;
    const int dim = 1 << n_sys;
    const double dt = grid.step();
    const double scale = setup.per_system_scale();

    StateVec i_n = setup.pair.pre();
    StateVec f_n = setup.pair.post();
    for (int j = 1; j < n_sys; ++j) {
        i_n = tensor(i_n, setup.pair.pre());
        f_n = tensor(f_n, setup.pair.post());
    }

    Operator us_single = Operator::identity(2);
    Operator omega_joint = Operator::identity(dim);
    for (int m = 0; m < grid.n_steps; ++m) {
        const double t = grid.node(m);
        const double rate_a = setup.pulse_weak.rate_at(t) * setup.q_z * scale;
        const double rate_s = setup.pulse_strong.rate_at(t) * setup.q_x * scale;
        if (rate_a != 0.0) {
            const Mat hi = us_single.entries().adjoint() *
                           (rate_a * setup.weak_op.entries()) * us_single.entries();
            const Operator hi_single(hi, OpKind::Hermitian);
            Operator h_joint = Operator::zero(dim);
            for (int j = 0; j < n_sys; ++j) h_joint = h_joint + embed(hi_single, j, n_sys);
            omega_joint = mat_exp_unitary(h_joint, dt) * omega_joint;
        }
        if (rate_s != 0.0) {
            us_single =
                mat_exp_unitary(setup.strong_op.scaled(rate_s), dt) * us_single;
        }
    }
    Operator us_joint = us_single;
    for (int j = 1; j < n_sys; ++j) us_joint = tensor(us_joint, us_single);
    return inner(f_n, (us_joint * omega_joint).apply(i_n));
}

}  // namespace

TEST_CASE("ensemble factorization matches the brute tensor-product evolution") {
    const TimeGrid grid(1.0, 400);
    for (int n : {2, 3}) {
        // pure weak coupling
        const MeasurementSetup weak_only = make_setup(1.2, 0.08, 0.0, n);
        CHECK(cdist(ensemble_amplitude_exact(weak_only, grid),
                    brute_tensor_amplitude(weak_only, grid)) <= kStructuralTol);

        // with the strong pulse, both scalings
        for (bool scaled : {true, false}) {
            const MeasurementSetup full = make_setup(1.1, 0.08, 0.05, n, scaled);
            CHECK(cdist(ensemble_amplitude_exact(full, grid),
                        brute_tensor_amplitude(full, grid)) <= kStructuralTol);
        }
    }
}

TEST_CASE("series partial sums converge at first order in the step") {
    const MeasurementSetup setup = make_setup(1.2, 0.15, 0.3);
    auto partial = [&](int steps) {
        return dyson_series_exact(setup, TimeGrid(1.0, steps), 4).partial_sums.back();
    };
    const Complex p1 = partial(250), p2 = partial(500), p3 = partial(1000);
    const double order = std::log2(std::abs(p1 - p2) / std::abs(p2 - p3));
    CHECK(order >= 0.9);
}

TEST_CASE("rotated overlap honours the overlap floor") {
    // theta close to pi/2 pushes |<f|i>| under the floor at construction time.
    CHECK_THROWS_AS(make_setup(std::numbers::pi / 2.0 - 1e-9, 0.1, 0.0),
                    OrthogonalSelectionError);
}
