#pragma once

#include <complex>
#include <random>

#include "linalg.hpp"
#include "weak_values.hpp"

namespace weakflow::testing {

inline double cdist(Complex a, Complex b) { return std::abs(a - b); }

inline double max_abs_diff(const Mat& a, const Mat& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline StateVec random_state(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v(k) = Complex(dist(rng), dist(rng));
    return StateVec::normalized(std::move(v));
}

inline Operator random_hermitian(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(dist(rng), dist(rng));
    Mat h = 0.5 * (m + m.adjoint());
    return Operator(std::move(h), OpKind::Hermitian);
}

// Least-squares slope of log|y| against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < n; ++k) {
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace weakflow::testing
