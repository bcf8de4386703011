#include "dyson.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace weakflow {

TimeGrid::TimeGrid(double t_end_, int n_steps_) : t_end(t_end_), n_steps(n_steps_) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
    if (n_steps < 1) throw ConfigError("n_steps must be at least 1");
}

int TimeGrid::node_index(double t) const {
    const double raw = t / step();
    const int k = static_cast<int>(std::lround(raw));
    if (k < 0 || k > n_steps || std::abs(raw - k) > 1e-9)
        throw ConfigError("time does not lie on the grid");
    return k;
}

PulseProfile PulseProfile::square(double amplitude, double t_on, double t_off) {
    if (!(t_on < t_off)) throw ConfigError("pulse window requires t_on < t_off");
    if (!std::isfinite(amplitude)) throw ConfigError("pulse amplitude must be finite");
    PulseProfile p;
    p.shape_ = Shape::Square;
    p.amplitude_ = amplitude;
    p.t_on_ = t_on;
    p.t_off_ = t_off;
    return p;
}

PulseProfile PulseProfile::off() { return square(0.0, 0.0, 1.0); }

PulseProfile PulseProfile::sampled(std::vector<double> rates, double step) {
    if (rates.empty()) throw ConfigError("sampled pulse requires at least one rate");
    if (!(step > 0.0)) throw ConfigError("sampled pulse requires a positive step");
    PulseProfile p;
    p.shape_ = Shape::Sampled;
    p.samples_ = std::move(rates);
    p.sample_step_ = step;
    return p;
}

bool PulseProfile::is_off() const {
    if (shape_ == Shape::Square) return amplitude_ == 0.0;
    for (double r : samples_)
        if (r != 0.0) return false;
    return true;
}

double PulseProfile::rate_at(double t) const {
    if (shape_ == Shape::Square) {
        return (t >= t_on_ && t < t_off_) ? amplitude_ : 0.0;
    }
    const auto k = static_cast<long>(std::floor(t / sample_step_ + 1e-12));
    if (k < 0 || k >= static_cast<long>(samples_.size())) return 0.0;
    return samples_[static_cast<size_t>(k)];
}

double PulseProfile::integral(double t) const {
    if (shape_ == Shape::Square) {
        const double lo = std::min(std::max(t, t_on_), t_off_);
        return amplitude_ * (lo - t_on_);
    }
    double acc = 0.0;
    for (size_t k = 0; k < samples_.size(); ++k) {
        const double a = k * sample_step_;
        if (a >= t) break;
        const double b = std::min((k + 1) * sample_step_, t);
        acc += samples_[k] * (b - a);
    }
    return acc;
}

MeasurementSetup::MeasurementSetup(Operator weak, Operator strong, PulseProfile pw,
                                   PulseProfile ps, PrePostPair selection)
    : weak_op(std::move(weak)),
      strong_op(std::move(strong)),
      pulse_weak(std::move(pw)),
      pulse_strong(std::move(ps)),
      pair(std::move(selection)) {
    if (weak_op.kind() != OpKind::Hermitian && weak_op.kind() != OpKind::Projector)
        throw ConfigError("weak observable must be hermitian-tagged");
    if (strong_op.kind() != OpKind::Hermitian && strong_op.kind() != OpKind::Projector)
        throw ConfigError("strong observable must be hermitian-tagged");
    if (weak_op.dim() != strong_op.dim() || weak_op.dim() != pair.dim())
        throw DimensionMismatchError("setup operators and selection must share one dimension");
}

namespace {

void check_time(const TimeGrid& grid, double t) {
    if (!(t >= 0.0) || !(t <= grid.t_end)) throw ConfigError("time outside [0, t_end]");
}

void check_node(const TimeGrid& grid, int node) {
    if (node < 0 || node > grid.n_steps) throw ConfigError("grid node out of range");
}

void check_order(int order) {
    if (order < 0) throw ConfigError("series order must be non-negative");
    if (order > kSeriesOrderCap) throw ConfigError("series order exceeds the practical cap of 8");
}

// exp(M) for anti-hermitian M = -i*s*H, via the eigendecomposition of H.
Mat step_exponential(const Mat& hermitian, double s) {
    if (hermitian.isZero(0.0)) return Mat::Identity(hermitian.rows(), hermitian.cols());
    Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian);
    Vec phases(hermitian.rows());
    for (Eigen::Index k = 0; k < phases.size(); ++k)
        phases(k) = std::exp(Complex(0.0, -s * solver.eigenvalues()(k)));
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Complex pow_int(Complex base, int n) {
    Complex acc(1.0, 0.0);
    for (int k = 0; k < n; ++k) acc *= base;
    return acc;
}

struct EvolutionData {
    Complex amp_raw;           // <f|U_s(t_end) Omega(t_end)|i>
    Complex overlap_bare;      // <f|i>
    Complex overlap_rotated;   // <f|U_s(t_end)|i>
    std::vector<Mat> us_nodes; // U_s at every grid node, 0..n_steps
};

// Single pass over the grid: accumulates U_s and the interaction-picture
// product Omega = prod_k exp(-i dt H_I(t_k)) with exact per-step exponentials.
EvolutionData evolve(const MeasurementSetup& setup, const TimeGrid& grid) {
    const int d = setup.weak_op.dim();
    const double dt = grid.step();
    const double scale = setup.per_system_scale();

    EvolutionData out;
    out.us_nodes.reserve(grid.n_steps + 1);
    Mat us = Mat::Identity(d, d);
    Mat omega = Mat::Identity(d, d);

    // Constant-rate strong pulses reuse one step exponential.
    double cached_rate = 0.0;
    Mat cached_step = Mat::Identity(d, d);
    bool cache_valid = false;

    for (int m = 0; m < grid.n_steps; ++m) {
        out.us_nodes.push_back(us);
        const double t = grid.node(m);
        const double rate_a = setup.pulse_weak.rate_at(t) * setup.q_z * scale;
        const double rate_s = setup.pulse_strong.rate_at(t) * setup.q_x * scale;

        if (rate_a != 0.0) {
            const Mat h_int = us.adjoint() * (rate_a * setup.weak_op.entries()) * us;
            omega = step_exponential(h_int, dt) * omega;
        }
        if (rate_s != 0.0) {
            if (!cache_valid || rate_s != cached_rate) {
                cached_step = step_exponential(Mat(rate_s * setup.strong_op.entries()), dt);
                cached_rate = rate_s;
                cache_valid = true;
            }
            us = cached_step * us;
        }
    }
    out.us_nodes.push_back(us);

    const Vec& i = setup.pair.pre().amps();
    const Vec& f = setup.pair.post().amps();
    out.overlap_bare = setup.pair.overlap();
    out.overlap_rotated = f.dot(us * i);
    out.amp_raw = f.dot(us * (omega * i));
    ensure_finite(out.amp_raw, "exact amplitude");
    return out;
}

Complex normalize(Complex raw, const EvolutionData& data, const MeasurementSetup& setup,
                  Normalization norm) {
    switch (norm) {
        case Normalization::Raw:
            return raw;
        case Normalization::BareOverlap:
            return raw / data.overlap_bare;
        case Normalization::RotatedOverlap:
            if (std::abs(data.overlap_rotated) < setup.pair.overlap_floor())
                throw OrthogonalSelectionError(
                    "|<f(t_end)|i>| below overlap floor: normalized amplitude undefined");
            return raw / data.overlap_rotated;
    }
    return raw;
}

// First-order integrand g(t_k) = <F|H_I(t_k)|i> / <F|i> with <F| = <f|U_s(t_end),
// plus the same factors through the weak-conditioned projector route.
struct Integrand {
    std::vector<Complex> g;
    std::vector<Complex> g_projector_route;
    Complex overlap_rotated;
};

Integrand first_order_integrand(const MeasurementSetup& setup, const TimeGrid& grid,
                                const EvolutionData& data) {
    Integrand out;
    out.overlap_rotated = data.overlap_rotated;
    if (std::abs(data.overlap_rotated) < setup.pair.overlap_floor())
        throw OrthogonalSelectionError(
            "|<f(t_end)|i>| below overlap floor: weak integrand undefined");

    const int n = grid.n_steps;
    const double scale = setup.per_system_scale();
    const Vec& i = setup.pair.pre().amps();
    const Vec& f = setup.pair.post().amps();
    const Vec f_rot = (f.adjoint() * data.us_nodes[n]).adjoint();  // |F> = U_s^+|f>

    // Pi~^w_F = |F><F| / |<F|i>|^2, fixed across the grid.
    const Mat proj = (f_rot * f_rot.adjoint()) / std::norm(data.overlap_rotated);

    out.g.resize(n);
    out.g_projector_route.resize(n);
    for (int m = 0; m < n; ++m) {
        const double rate_a = setup.pulse_weak.rate_at(grid.node(m)) * setup.q_z * scale;
        if (rate_a == 0.0) {
            out.g[m] = Complex(0.0, 0.0);
            out.g_projector_route[m] = Complex(0.0, 0.0);
            continue;
        }
        const Mat& us = data.us_nodes[m];
        const Mat h_int = us.adjoint() * (rate_a * setup.weak_op.entries()) * us;
        out.g[m] = f_rot.dot(h_int * i) / data.overlap_rotated;
        out.g_projector_route[m] = i.dot(proj * (h_int * i));
    }
    return out;
}

// Total-degree-n collection of prod_m exp(x_m) for scalars x_m: the Taylor
// partial sums of exp(sum x_m), by the multinomial identity.
std::vector<Complex> scalar_series(const std::vector<Complex>& x, int order) {
    std::vector<Complex> p(order + 1, Complex(0.0, 0.0));
    p[0] = Complex(1.0, 0.0);
    for (const Complex& xm : x) {
        for (int n = order; n >= 1; --n) {
            Complex power(1.0, 0.0);
            double factorial = 1.0;
            Complex acc = p[n];
            for (int j = 1; j <= n; ++j) {
                power *= xm;
                factorial *= j;
                acc += power / factorial * p[n - j];
            }
            p[n] = acc;
        }
    }
    return p;
}

}  // namespace

Operator h_weak(const MeasurementSetup& setup, const TimeGrid& grid, double t) {
    check_time(grid, t);
    const double rate = setup.pulse_weak.rate_at(t) * setup.q_z * setup.per_system_scale();
    return setup.weak_op.scaled(rate);
}

Operator h_strong(const MeasurementSetup& setup, const TimeGrid& grid, double t) {
    check_time(grid, t);
    const double rate = setup.pulse_strong.rate_at(t) * setup.q_x * setup.per_system_scale();
    return setup.strong_op.scaled(rate);
}

Operator strong_evolution(const MeasurementSetup& setup, const TimeGrid& grid, int node) {
    check_node(grid, node);
    const int d = setup.strong_op.dim();
    const double dt = grid.step();
    const double scale = setup.q_x * setup.per_system_scale();
    Mat us = Mat::Identity(d, d);
    for (int m = 0; m < node; ++m) {
        const double rate = setup.pulse_strong.rate_at(grid.node(m)) * scale;
        if (rate != 0.0)
            us = step_exponential(Mat(rate * setup.strong_op.entries()), dt) * us;
    }
    return Operator(std::move(us), OpKind::Unitary);
}

Operator interaction_hamiltonian(const MeasurementSetup& setup, const TimeGrid& grid, int node) {
    check_node(grid, node);
    const Operator us = strong_evolution(setup, grid, node);
    const Operator h = h_weak(setup, grid, grid.node(node));
    return Operator(Mat(us.entries().adjoint() * h.entries() * us.entries()), OpKind::Hermitian);
}

Complex rotated_overlap(const MeasurementSetup& setup, const TimeGrid& grid) {
    return evolve(setup, grid).overlap_rotated;
}

Complex exact_amplitude(const MeasurementSetup& setup, const TimeGrid& grid, Normalization norm) {
    const EvolutionData data = evolve(setup, grid);
    return normalize(data.amp_raw, data, setup, norm);
}

Operator total_propagator(const MeasurementSetup& setup, const TimeGrid& grid, int node) {
    check_node(grid, node);
    const int d = setup.weak_op.dim();
    const double dt = grid.step();
    const double scale = setup.per_system_scale();
    Mat u = Mat::Identity(d, d);
    for (int m = 0; m < node; ++m) {
        const double t = grid.node(m);
        const double rate_a = setup.pulse_weak.rate_at(t) * setup.q_z * scale;
        const double rate_s = setup.pulse_strong.rate_at(t) * setup.q_x * scale;
        if (rate_a == 0.0 && rate_s == 0.0) continue;
        const Mat h = rate_a * setup.weak_op.entries() + rate_s * setup.strong_op.entries();
        u = step_exponential(h, dt) * u;
    }
    return Operator(std::move(u), OpKind::Unitary);
}

Complex exact_amplitude_direct(const MeasurementSetup& setup, const TimeGrid& grid,
                               Normalization norm) {
    const Operator u = total_propagator(setup, grid, grid.n_steps);
    const EvolutionData data = evolve(setup, grid);  // overlaps for normalization
    const Complex raw = setup.pair.post().amps().dot(u.entries() * setup.pair.pre().amps());
    return normalize(raw, data, setup, norm);
}

SeriesResult dyson_series_exact(const MeasurementSetup& setup, const TimeGrid& grid, int order) {
    check_order(order);
    const EvolutionData data = evolve(setup, grid);
    const Integrand integrand = first_order_integrand(setup, grid, data);

    const int d = setup.weak_op.dim();
    const int n = grid.n_steps;
    const double dt = grid.step();
    const double scale = setup.per_system_scale();
    const Vec& i = setup.pair.pre().amps();
    const Vec f_rot = (setup.pair.post().amps().adjoint() * data.us_nodes[n]).adjoint();

    // W[k] = total-degree-k component of Omega applied to |i>. Each step
    // multiplies by exp(G) with G = -i dt H_I(t_m) and re-collects by degree:
    // W[k] <- sum_j G^j/j! W[k-j]. Descending k so the right-hand side sees
    // the pre-step values.
    std::vector<Vec> w(order + 1, Vec::Zero(d));
    w[0] = i;
    for (int m = 0; m < n; ++m) {
        const double rate_a = setup.pulse_weak.rate_at(grid.node(m)) * setup.q_z * scale;
        if (rate_a == 0.0) continue;
        const Mat& us = data.us_nodes[m];
        const Mat g_step =
            Complex(0.0, -dt) * (us.adjoint() * (rate_a * setup.weak_op.entries()) * us);
        for (int k = order; k >= 1; --k) {
            Vec acc = w[k];
            for (int j = 1; j <= k; ++j) {
                Vec v = w[k - j];
                double factorial = 1.0;
                for (int jj = 1; jj <= j; ++jj) {
                    v = g_step * v;
                    factorial *= jj;
                }
                acc += v / factorial;
            }
            w[k] = acc;
        }
    }

    SeriesResult result;
    result.order = order;
    result.terms.resize(order + 1);
    result.terms[0] = Complex(1.0, 0.0);
    if (order >= 1) {
        // Scalar accumulation, shared with the weak series (bit-identical order 1).
        Complex t1(0.0, 0.0);
        for (const Complex& g : integrand.g) t1 += Complex(0.0, -dt) * g;
        result.terms[1] = t1;
    }
    for (int k = 2; k <= order; ++k)
        result.terms[k] = f_rot.dot(w[k]) / data.overlap_rotated;

    result.partial_sums.resize(order + 1);
    Complex acc(0.0, 0.0);
    for (int k = 0; k <= order; ++k) {
        acc += result.terms[k];
        result.partial_sums[k] = acc;
    }
    result.residual_vs_exact =
        std::abs(result.partial_sums.back() - data.amp_raw / data.overlap_rotated);
    return result;
}

SeriesResult weak_evolution_series(const MeasurementSetup& setup, const TimeGrid& grid,
                                   int order) {
    check_order(order);
    const EvolutionData data = evolve(setup, grid);
    const Integrand integrand = first_order_integrand(setup, grid, data);
    const double dt = grid.step();

    std::vector<Complex> x(integrand.g.size());
    std::vector<Complex> x_proj(integrand.g.size());
    for (size_t m = 0; m < integrand.g.size(); ++m) {
        x[m] = Complex(0.0, -dt) * integrand.g[m];
        x_proj[m] = Complex(0.0, -dt) * integrand.g_projector_route[m];
    }
    const std::vector<Complex> terms = scalar_series(x, order);
    const std::vector<Complex> terms_proj = scalar_series(x_proj, order);

    SeriesResult result;
    result.order = order;
    result.terms = terms;
    result.partial_sums.resize(order + 1);
    Complex acc(0.0, 0.0);
    for (int k = 0; k <= order; ++k) {
        acc += terms[k];
        result.partial_sums[k] = acc;
        result.form_mismatch = std::max(result.form_mismatch, std::abs(terms[k] - terms_proj[k]));
    }
    result.residual_vs_exact =
        std::abs(result.partial_sums.back() - data.amp_raw / data.overlap_rotated);
    return result;
}

Complex weak_action(const MeasurementSetup& setup, const TimeGrid& grid) {
    if (setup.pulse_weak.is_off()) return Complex(0.0, 0.0);
    const EvolutionData data = evolve(setup, grid);
    const Integrand integrand = first_order_integrand(setup, grid, data);
    Complex sum(0.0, 0.0);
    for (const Complex& g : integrand.g) sum += g;
    return sum * grid.step();
}

Complex weak_exponential(const MeasurementSetup& setup, const TimeGrid& grid) {
    const Complex s = weak_action(setup, grid);
    return std::exp(Complex(0.0, -1.0) * s);
}

IdentityResolutionResult identity_resolution(const MeasurementSetup& setup, const TimeGrid& grid,
                                             int node) {
    if (setup.weak_op.dim() != 2)
        throw ConfigError("identity resolution is defined on two-state systems");
    check_node(grid, node);
    const OrthogonalFrame frame = orthogonal_frame(setup.pair);
    const Operator us = strong_evolution(setup, grid, node);
    const Mat& u = us.entries();

    const Vec f = frame.f.amps();
    const Vec fbar = frame.f_bar.amps();
    const Mat first = u * (f * f.adjoint() + fbar * fbar.adjoint()) * u.adjoint();

    // |f> = cos(theta)|i> + sin(theta)|ibar>, |fbar> = sin(theta)|i> - cos(theta)|ibar>.
    const Vec i = setup.pair.pre().amps();
    const Vec ibar = frame.i_bar.amps();
    const Vec f_re = frame.cos_theta * i + frame.sin_theta * ibar;
    const Vec fbar_re = frame.sin_theta * i - frame.cos_theta * ibar;
    const Mat second = u * (f_re * f_re.adjoint() + fbar_re * fbar_re.adjoint()) * u.adjoint();

    return IdentityResolutionResult{Operator(first, OpKind::General),
                                    Operator(second, OpKind::General),
                                    StateVec(Vec(u * f)), StateVec(Vec(u * fbar))};
}

Complex ensemble_amplitude_exact(const MeasurementSetup& setup, const TimeGrid& grid) {
    return pow_int(exact_amplitude(setup, grid, Normalization::Raw), setup.ensemble_size);
}

Complex ensemble_amplitude_weak(const MeasurementSetup& setup, const TimeGrid& grid) {
    const EvolutionData data = evolve(setup, grid);
    const Integrand integrand = first_order_integrand(setup, grid, data);
    Complex s(0.0, 0.0);
    for (const Complex& g : integrand.g) s += g;
    s *= grid.step();
    const int n = setup.ensemble_size;
    return pow_int(data.overlap_rotated, n) *
           std::exp(Complex(0.0, -1.0) * (static_cast<double>(n) * s));
}

}  // namespace weakflow
