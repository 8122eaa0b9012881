// support.hpp — random instances and reference quadratures shared by the tests

#pragma once

#include "datransfer/model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace testsupport {

using datransfer::SystemParams;
using cplx = std::complex<double>;

inline SystemParams random_params(std::mt19937_64& rng, int max_dim = 8) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> site(1, max_dim - 1);
    SystemParams p;
    do {
        p.N_D = site(rng);
        p.N_A = site(rng);
    } while (p.N_D + p.N_A > max_dim);
    p.E_D = 2.0 * u(rng);
    p.E_A = 2.0 * u(rng);
    p.V = (0.1 + 0.6 * std::abs(u(rng))) / std::sqrt(static_cast<double>(p.N_D * p.N_A));
    p.g_D = u(rng);
    p.g_A = u(rng);
    p.lambda = 0.05 * std::abs(u(rng));
    p.beta = 0.3 + 5.0 * std::abs(u(rng));
    return p;
}

inline Eigen::MatrixXcd random_density(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd X(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) X(i, j) = cplx(g(rng), g(rng));
    }
    Eigen::MatrixXcd rho = X * X.adjoint();
    return rho / rho.trace().real();
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, int n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& x : p) s += (x = e(rng));
    for (auto& x : p) x /= s;
    return p;
}

// Composite Simpson rule with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Simpson on [a, b] after the substitution w = a + (b - a) u^2, which tames sqrt-type endpoint behavior.
inline double simpson_sq(const std::function<double(double)>& f, double a, double b, int n) {
    return simpson([&](double u) { return f(a + (b - a) * u * u) * 2.0 * (b - a) * u; }, 0.0, 1.0, n);
}

// P.V. of \int_a^b f(w)/(w - d) dw for a < d < b by subtracting f(d).
inline double pv_reference(const std::function<double(double)>& f, double a, double b, double d, int n) {
    const double fd = f(d);
    const double h = 1e-5 * d;
    const double fp = (f(d + h) - f(d - h)) / (2.0 * h);
    auto g = [&](double w) { return std::abs(w - d) < 1e-12 ? fp : (f(w) - fd) / (w - d); };
    return simpson(g, a, d, n) + simpson(g, d, b, n) + fd * std::log((b - d) / (d - a));
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace testsupport
