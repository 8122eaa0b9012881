// spectral.cpp — spectral density families and bath quadratures

#include "datransfer/spectral.hpp"
#include "datransfer/errors.hpp"

#include <cmath>
// Boost 1.74 pchip calls isnan unqualified.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace datransfer {

struct SpectralTable {
    std::vector<double> omega;
    std::vector<double> J;
    boost::math::interpolators::pchip<std::vector<double>> interp;

    SpectralTable(std::vector<double> w, std::vector<double> j)
        : omega(w), J(j), interp(std::move(w), std::move(j)) {}
};

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kUvFactor = 40.0;

bool is_inf(double beta) { return std::isinf(beta); }

// J(omega)/omega, finite at omega = 0.
double j_over_omega(const SpectralModel& m, double omega) {
    switch (m.family) {
    case SpectralFamily::Ohmic:
        return m.eta * std::exp(-omega / m.omega_c);
    case SpectralFamily::SuperOhmic:
        return m.eta * std::pow(omega / m.omega_c, m.power - 1.0) * std::exp(-omega / m.omega_c);
    case SpectralFamily::Tabulated:
        if (omega == 0.0) return j_tilde_zero(m);
        return eval_J(m, omega) / omega;
    }
    return 0.0;
}

QuadResult integrate_endpoint(const std::function<double(double)>& f, double a, double b,
                              const QuadratureSettings& quad) {
    if (!(b > a)) return {};
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    double l1 = 0.0;
    const double v = ts.integrate(f, a, b, quad.tolerance, &err, &l1);
    return {v, err + 64.0 * std::numeric_limits<double>::epsilon() * l1};
}

// Logarithmic panels on [a, b], a > 0: integrand e^x f(e^x) over [ln a, ln b].
QuadResult integrate_log(const std::function<double(double)>& f, double a, double b,
                         const QuadratureSettings& quad) {
    if (!(b > a)) return {};
    const double la = std::log(a);
    const double lb = std::log(b);
    QuadratureSettings q = quad;
    q.panels = quad.panels * std::max(1, static_cast<int>(std::ceil(std::log10(b / a))));
    return integrate_interval([&](double x) {
        const double w = std::exp(x);
        return w * f(w);
    }, la, lb, q);
}

double tail_bound(const SpectralModel& m, KernelBound tail, double L) {
    if (m.family == SpectralFamily::Tabulated) return 0.0;
    const double s = (m.family == SpectralFamily::Ohmic) ? 1.0 : m.power;
    const double p = s + tail.power;  // integrand ~ omega^p e^{-omega/wc}
    const double pref = std::abs(tail.coeff) * m.eta * std::pow(m.omega_c, 1.0 - s);
    if (p <= 0.0) {
        return pref * std::pow(L, p) * m.omega_c * std::exp(-L / m.omega_c);
    }
    return pref * std::pow(m.omega_c, p + 1.0) * boost::math::tgamma(p + 1.0, L / m.omega_c);
}

void require_ir_finite(const SpectralModel& m, double beta, const char* what) {
    if (!m.ir_cutoff && infrared_divergent(m, beta)) {
        throw InfraredDivergent(std::string(what) +
                                " diverges logarithmically at omega -> 0; set an ir_cutoff");
    }
}

} // namespace

SpectralModel SpectralModel::ohmic(double eta, double omega_c) {
    SpectralModel m;
    m.family = SpectralFamily::Ohmic;
    m.eta = eta;
    m.omega_c = omega_c;
    m.power = 1.0;
    validate(m);
    return m;
}

SpectralModel SpectralModel::super_ohmic(double eta, double omega_c, double s) {
    SpectralModel m;
    m.family = SpectralFamily::SuperOhmic;
    m.eta = eta;
    m.omega_c = omega_c;
    m.power = s;
    validate(m);
    return m;
}

SpectralModel SpectralModel::tabulated(std::vector<double> omega, std::vector<double> J) {
    if (omega.size() != J.size()) throw InvalidParameters("tabulated J: column lengths differ");
    if (omega.size() < 4) throw InvalidParameters("tabulated J: need at least 4 samples");
    if (omega.front() != 0.0) throw InvalidParameters("tabulated J: first frequency must be 0");
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!std::isfinite(omega[i]) || !std::isfinite(J[i])) {
            throw InvalidParameters("tabulated J: non-finite entry");
        }
        if (J[i] < 0.0) throw InvalidParameters("tabulated J: negative spectral density");
        if (i > 0 && !(omega[i] > omega[i - 1])) {
            throw InvalidParameters("tabulated J: frequencies must be strictly increasing");
        }
    }
    if (J.front() != 0.0) throw InvalidParameters("tabulated J: J(0) must vanish");
    SpectralModel m;
    m.family = SpectralFamily::Tabulated;
    m.eta = 1.0;
    m.omega_c = omega.back() / kUvFactor;
    m.table = std::make_shared<const SpectralTable>(std::move(omega), std::move(J));
    return m;
}

double SpectralModel::upper_limit() const {
    if (family == SpectralFamily::Tabulated) return table->omega.back();
    return kUvFactor * omega_c;
}

double SpectralModel::knee() const { return omega_c; }

SpectralModel load_tabulated(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameters("cannot open spectral table '" + path + "'");
    std::vector<double> w;
    std::vector<double> j;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double a = 0.0;
        double b = 0.0;
        if (!(ls >> a)) continue;
        if (!(ls >> b)) {
            throw InvalidParameters("spectral table line " + std::to_string(lineno) +
                                    ": expected two columns");
        }
        w.push_back(a);
        j.push_back(b);
    }
    return SpectralModel::tabulated(std::move(w), std::move(j));
}

void validate(const SpectralModel& m) {
    if (m.family == SpectralFamily::Tabulated) {
        if (!m.table) throw InvalidParameters("tabulated spectral model without data");
    } else {
        if (!(m.eta >= 0.0) || !std::isfinite(m.eta)) throw InvalidParameters("eta must be >= 0");
        if (!(m.omega_c > 0.0) || !std::isfinite(m.omega_c)) {
            throw InvalidParameters("omega_c must be > 0");
        }
        if (m.family == SpectralFamily::SuperOhmic && !(m.power > 1.0)) {
            throw InvalidParameters("super-ohmic exponent s must be > 1");
        }
    }
    if (m.ir_cutoff && !(*m.ir_cutoff >= 0.0)) throw InvalidParameters("ir_cutoff must be >= 0");
    if (m.quad.panels < 1 || !(m.quad.tolerance > 0.0) || m.quad.max_depth < 1) {
        throw InvalidParameters("invalid quadrature settings");
    }
}

double eval_J(const SpectralModel& m, double omega) {
    if (omega < 0.0 || std::isnan(omega)) throw NegativeFrequency("J(omega) requires omega >= 0");
    switch (m.family) {
    case SpectralFamily::Ohmic:
        return m.eta * omega * std::exp(-omega / m.omega_c);
    case SpectralFamily::SuperOhmic:
        if (omega == 0.0) return 0.0;
        return m.eta * std::pow(omega, m.power) * std::pow(m.omega_c, 1.0 - m.power) *
               std::exp(-omega / m.omega_c);
    case SpectralFamily::Tabulated:
        if (omega >= m.table->omega.back()) {
            return omega == m.table->omega.back() ? m.table->J.back() : 0.0;
        }
        return std::max(0.0, m.table->interp(omega));
    }
    return 0.0;
}

double j_tilde_zero(const SpectralModel& m) {
    switch (m.family) {
    case SpectralFamily::Ohmic:
        return m.eta;
    case SpectralFamily::SuperOhmic:
        return 0.0;
    case SpectralFamily::Tabulated:
        break;
    }
    const auto& w = m.table->omega;
    const auto& J = m.table->J;
    if (J[1] <= 0.0) return 0.0;
    if (J[2] > 0.0) {
        const double local = std::log(J[2] / J[1]) / std::log(w[2] / w[1]);
        if (local < 0.9) {
            throw DivergentLimit("tabulated J(omega)/omega grows as omega -> 0 (local exponent " +
                                 std::to_string(local) + ")");
        }
        if (local > 1.5) return 0.0;
    }
    // Neville extrapolation of J/omega to omega = 0 through the first three nonzero nodes.
    double x[3] = {w[1], w[2], w[3]};
    double p[3] = {J[1] / w[1], J[2] / w[2], J[3] / w[3]};
    for (int k = 1; k < 3; ++k) {
        for (int i = 0; i + k < 3; ++i) {
            p[i] = ((0.0 - x[i + k]) * p[i] + (x[i] - 0.0) * p[i + 1]) / (x[i] - x[i + k]);
        }
    }
    return std::max(0.0, p[0]);
}

bool infrared_divergent(const SpectralModel& m, double beta) {
    if (is_inf(beta)) return false;
    try {
        return j_tilde_zero(m) > 0.0;
    } catch (const DivergentLimit&) {
        return true;
    }
}

QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              const QuadratureSettings& quad) {
    QuadResult r;
    if (!(b > a)) return r;
    const double h = (b - a) / quad.panels;
    for (int i = 0; i < quad.panels; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == quad.panels) ? b : a + (i + 1) * h;
        double err = 0.0;
        double l1 = 0.0;
        r.value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            f, lo, hi, static_cast<unsigned>(quad.max_depth), quad.tolerance, &err, &l1);
        r.error += err + 64.0 * std::numeric_limits<double>::epsilon() * l1;
    }
    return r;
}

QuadResult integrate_weighted(const SpectralModel& m, const std::function<double(double)>& integrand,
                              KernelBound tail, double lower) {
    validate(m);
    const double a = std::max(lower, m.ir_cutoff.value_or(0.0));
    const double c = m.knee();
    const double L = m.upper_limit();
    QuadResult r;
    if (a < c) {
        const QuadResult low = (a == 0.0) ? integrate_endpoint(integrand, 0.0, c, m.quad)
                                          : integrate_log(integrand, a, c, m.quad);
        r.value += low.value;
        r.error += low.error;
    }
    const QuadResult bulk = integrate_interval(integrand, std::max(a, c), L, m.quad);
    r.value += bulk.value;
    r.error += bulk.error + tail_bound(m, tail, std::max(a, L));
    return r;
}

double thermal_coth(double beta, double omega) {
    if (is_inf(beta)) return 1.0;
    const double x = 0.5 * beta * omega;
    if (x < 1e-8) return 1.0 / x + x / 3.0;
    return 1.0 / std::tanh(x);
}

double thermal_J(const SpectralModel& m, double beta, double omega) {
    if (is_inf(beta)) return eval_J(m, omega);
    const double x = 0.5 * beta * omega;
    if (x < 1e-4) return (2.0 / beta) * j_over_omega(m, omega) * (1.0 + x * x / 3.0);
    return eval_J(m, omega) / std::tanh(x);
}

QuadResult mu_integral_estimate(const SpectralModel& m, double beta) {
    if (!(beta > 0.0)) throw InvalidParameters("beta must be > 0");
    require_ir_finite(m, beta, "mu integral");
    auto f = [&](double w) {
        if (w == 0.0) return 0.0;
        return (2.0 / kPi) * thermal_J(m, beta, w) / w;
    };
    const double L = m.upper_limit();
    return integrate_weighted(m, f, {(2.0 / kPi) * thermal_coth(beta, L), -1.0});
}

double mu_integral(const SpectralModel& m, double beta) { return mu_integral_estimate(m, beta).value; }

double boltzmann_mu_integral(const SpectralModel& m, double beta) {
    if (!(beta > 0.0)) throw InvalidParameters("beta must be > 0");
    if (is_inf(beta)) return 0.0;
    require_ir_finite(m, beta, "Boltzmann-weighted mu integral");
    auto f = [&](double w) {
        if (w == 0.0) return 0.0;
        return (2.0 / kPi) * std::exp(-beta * w) * thermal_J(m, beta, w) / w;
    };
    return integrate_weighted(m, f, {(2.0 / kPi) * thermal_coth(beta, m.upper_limit()), -1.0}).value;
}

QuadResult pv_lamb_shift_estimate(const SpectralModel& m, double beta, double de) {
    if (!(beta > 0.0)) throw InvalidParameters("beta must be > 0");
    if (!(de > 0.0)) throw InvalidParameters("principal value requires delta_e > 0");
    validate(m);
    auto f = [&](double w) { return thermal_J(m, beta, w); };
    const double a = m.ir_cutoff.value_or(0.0);
    const double L = m.upper_limit();

    // Regular part: -\int f/(omega + de).
    QuadResult r = integrate_weighted(m, [&](double w) { return -f(w) / (w + de); },
                                      {thermal_coth(beta, L), -1.0});

    if (de <= a) {
        QuadResult q = integrate_weighted(m, [&](double w) { return f(w) / (w - de); },
                                          {2.0 * thermal_coth(beta, L), -1.0});
        return {r.value + q.value, r.error + q.error};
    }

    double w = std::min(0.5 * de, 0.1 * m.knee());
    w = std::min(w, 0.5 * (de - a));

    auto pole = [&](double x) { return f(x) / (x - de); };
    const QuadResult left = integrate_endpoint(pole, a, de - w, m.quad);
    const QuadResult window = integrate_interval(
        [&](double u) { return (f(de + u) - f(de - u)) / u; }, 0.0, w, m.quad);
    QuadResult right;
    const double top = std::max(L, de + w);
    if (de + w < top) right = integrate_interval(pole, de + w, top, m.quad);
    const double tail = tail_bound(m, {2.0 * thermal_coth(beta, top), -1.0}, top);

    return {r.value + left.value + window.value + right.value,
            r.error + left.error + window.error + right.error + tail};
}

double pv_lamb_shift(const SpectralModel& m, double beta, double de) {
    return pv_lamb_shift_estimate(m, beta, de).value;
}

double polaron_overlap(const SpectralModel& m, double beta, double amplitude) {
    if (!(beta > 0.0)) throw InvalidParameters("beta must be > 0");
    if (amplitude == 0.0) return 1.0;
    // tanh(beta omega/4)/omega^2 stays bounded at omega -> 0 except at zero temperature.
    if (is_inf(beta) && !m.ir_cutoff && j_tilde_zero(m) > 0.0) {
        throw InfraredDivergent("zero-temperature polaron overlap diverges; set an ir_cutoff");
    }
    auto f = [&](double w) {
        if (w == 0.0) return 0.0;
        const double th = is_inf(beta) ? 1.0 : std::tanh(0.25 * beta * w);
        return (4.0 / kPi) * th / w * j_over_omega(m, w);
    };
    const double I = integrate_weighted(m, f, {4.0 / kPi, -2.0}).value;
    return std::exp(-amplitude * amplitude * I);
}

double weight_w1(const SystemParams& params, const SpectralModel& model) {
    validate(params);
    return polaron_overlap(model, params.beta, params.lambda * params.E_D);
}

} // namespace datransfer
