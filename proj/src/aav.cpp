#include "aav.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace weakflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place radix-2 decimation-in-time transform, sign = -1 forward.
void fft(std::vector<Complex>& a, int sign) {
    const size_t n = a.size();
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const Complex w_len(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            Complex w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const Complex u = a[i + k];
                const Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= w_len;
            }
        }
    }
}

}  // namespace

SpinSelection::SpinSelection(double theta_) : theta(theta_) {
    if (!(theta > 0.0) || !(theta < std::numbers::pi / 2.0))
        throw ConfigError("selection angle must lie in (0, pi/2)");
}

StateVec SpinSelection::pre() const { return StateVec{std::cos(theta), std::sin(theta)}; }
StateVec SpinSelection::post() const { return StateVec::basis(2, 0); }
StateVec SpinSelection::post_bar() const { return StateVec::basis(2, 1); }
StateVec SpinSelection::pre_bar() const { return StateVec{std::sin(theta), -std::cos(theta)}; }

PrePostPair SpinSelection::pair(double overlap_floor) const {
    return PrePostPair(pre(), post(), overlap_floor);
}

PointerGrid::PointerGrid(double q_min_, double q_max_, int n_points_)
    : q_min(q_min_), q_max(q_max_), n_points(n_points_) {
    if (!(q_min < q_max)) throw ConfigError("pointer grid requires q_min < q_max");
    if (!is_power_of_two(n_points) || n_points < 256)
        throw ConfigError("pointer grid size must be a power of two >= 256");
}

double PointerGrid::dp() const { return kTwoPi / (n_points * dq()); }

double PointerState::norm(const PointerGrid& grid) const {
    double acc = 0.0;
    for (const Complex& a : amps) acc += std::norm(a);
    return std::sqrt(acc * grid.dq());
}

double JointState::norm(const PointerGrid& grid) const {
    double acc = 0.0;
    for (const Complex& a : up) acc += std::norm(a);
    for (const Complex& a : down) acc += std::norm(a);
    return std::sqrt(acc * grid.dq());
}

JointState prepare(const SpinSelection& selection, const PointerGrid& grid, double q0,
                   double delta) {
    if (!(delta > 0.0)) throw ConfigError("pointer spread delta must be positive");
    // Gaussian tail mass outside the box must stay below 1e-12.
    const double zl = (q0 - grid.q_min) / (std::sqrt(2.0) * delta);
    const double zr = (grid.q_max - q0) / (std::sqrt(2.0) * delta);
    const double tail = 0.5 * (std::erfc(zl) + std::erfc(zr));
    if (tail > 1e-12)
        throw TailTruncationError("pointer grid truncates more than 1e-12 of the Gaussian");

    const int n = grid.n_points;
    std::vector<Complex> phi(n);
    double norm_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const double d = grid.q(k) - q0;
        const double v = std::exp(-d * d / (4.0 * delta * delta));
        phi[k] = v;
        norm_sq += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm_sq * grid.dq());

    JointState state;
    state.up.resize(n);
    state.down.resize(n);
    const double c = std::cos(selection.theta), s = std::sin(selection.theta);
    for (int k = 0; k < n; ++k) {
        const Complex base = phi[k] * inv;
        state.up[k] = c * base;
        state.down[k] = s * base;
    }
    return state;
}

JointState couple(const JointState& state, const PointerGrid& grid, const Operator& a,
                  double eps) {
    if (a.dim() != 2) throw ConfigError("pointer coupling requires a 2x2 observable");
    if (a.kind() != OpKind::Hermitian && a.kind() != OpKind::Projector)
        throw ConfigError("pointer coupling requires a hermitian observable");
    if (!std::isfinite(eps)) throw ConfigError("coupling eps must be finite");

    Eigen::SelfAdjointEigenSolver<Mat> solver(a.entries());
    const Mat& v = solver.eigenvectors();
    const double a0 = solver.eigenvalues()(0);
    const double a1 = solver.eigenvalues()(1);

    const int n = grid.n_points;
    JointState out;
    out.up.resize(n);
    out.down.resize(n);
    for (int k = 0; k < n; ++k) {
        const double q = grid.q(k);
        // rotate into the eigenbasis, apply the per-branch phases, rotate back
        const Complex b0 = std::conj(v(0, 0)) * state.up[k] + std::conj(v(1, 0)) * state.down[k];
        const Complex b1 = std::conj(v(0, 1)) * state.up[k] + std::conj(v(1, 1)) * state.down[k];
        const Complex p0 = b0 * std::exp(Complex(0.0, -eps * q * a0));
        const Complex p1 = b1 * std::exp(Complex(0.0, -eps * q * a1));
        out.up[k] = v(0, 0) * p0 + v(0, 1) * p1;
        out.down[k] = v(1, 0) * p0 + v(1, 1) * p1;
    }
    return out;
}

PostselectResult postselect(const JointState& state, const PointerGrid& grid, const StateVec& f) {
    if (f.dim() != 2) throw ConfigError("post-selection state must be two-dimensional");
    if (!f.is_normalized()) throw ConfigError("post-selection state must be normalized");

    const int n = grid.n_points;
    PostselectResult result;
    result.pointer.amps.resize(n);
    const Complex cf0 = std::conj(f.amp(0));
    const Complex cf1 = std::conj(f.amp(1));
    double norm_sq = 0.0;
    for (int k = 0; k < n; ++k) {
        const Complex a = cf0 * state.up[k] + cf1 * state.down[k];
        result.pointer.amps[k] = a;
        norm_sq += std::norm(a);
    }
    result.success_prob = norm_sq * grid.dq();
    if (result.success_prob < 1e-14)
        throw PostselectionStarvedError("post-selection probability below 1e-14");
    const double inv = 1.0 / std::sqrt(result.success_prob);
    for (Complex& a : result.pointer.amps) a *= inv;
    return result;
}

std::vector<Complex> momentum_representation(const PointerState& state, const PointerGrid& grid) {
    const int n = grid.n_points;
    // psi~(p_j) = dq/sqrt(2 pi) sum_k exp(-i p_j q_k) psi(q_k), p_j = (j - n/2) dp.
    // The (-1)^k factor re-centers the frequencies so p = 0 sits at j = n/2.
    std::vector<Complex> work(state.amps.begin(), state.amps.end());
    for (int k = 1; k < n; k += 2) work[k] = -work[k];
    fft(work, -1);
    const double scale = grid.dq() / std::sqrt(kTwoPi);
    std::vector<Complex> out(n);
    for (int j = 0; j < n; ++j) {
        const double p = (j - n / 2) * grid.dp();
        out[j] = work[j] * std::exp(Complex(0.0, -p * grid.q_min)) * scale;
    }
    return out;
}

PointerMeans pointer_means(const PointerState& state, const PointerGrid& grid) {
    const int n = grid.n_points;
    double mean_q = 0.0, mass_q = 0.0;
    for (int k = 0; k < n; ++k) {
        const double w = std::norm(state.amps[k]);
        mean_q += grid.q(k) * w;
        mass_q += w;
    }
    mean_q /= mass_q;

    const std::vector<Complex> mom = momentum_representation(state, grid);
    double mean_p = 0.0, mass_p = 0.0;
    for (int j = 0; j < n; ++j) {
        const double w = std::norm(mom[j]);
        mean_p += (j - n / 2) * grid.dp() * w;
        mass_p += w;
    }
    mean_p /= mass_p;
    return PointerMeans{mean_q, mean_p};
}

WeakReadout weak_readout(const SpinSelection& selection, const PointerGrid& grid,
                         const Operator& a, double eps, double q0, double delta) {
    if (eps == 0.0) throw ConfigError("weak readout requires a non-zero coupling");
    const JointState prepared = prepare(selection, grid, q0, delta);
    const JointState coupled = couple(prepared, grid, a, eps);
    const PostselectResult post = postselect(coupled, grid, selection.post());
    const PointerMeans means = pointer_means(post.pointer, grid);

    WeakReadout out;
    out.success_prob = post.success_prob;
    out.mean_q = means.mean_q;
    out.mean_p = means.mean_p;
    out.a_w_estimate = Complex(-means.mean_p / eps, (means.mean_q - q0) / (2.0 * delta * delta * eps));
    return out;
}

PrePostPair strong_postselect_sequence(const SpinSelection& selection, const TimeGrid& grid,
                                       double eps_st_qx, const Operator& b, int ensemble_size) {
    if (eps_st_qx < 0.0) throw ConfigError("strong pulse area must be non-negative");
    if (ensemble_size < 1) throw ConfigError("ensemble size must be at least 1");
    const PulseProfile pulse = eps_st_qx == 0.0
                                   ? PulseProfile::off()
                                   : PulseProfile::square(eps_st_qx / grid.t_end, 0.0, grid.t_end);
    MeasurementSetup setup(Operator::sigma_z(), b, PulseProfile::off(), pulse, selection.pair());
    setup.ensemble_size = ensemble_size;
    const Operator us = strong_evolution(setup, grid, grid.n_steps);
    return PrePostPair(selection.pre(), us.apply(selection.post()));
}

}  // namespace weakflow
