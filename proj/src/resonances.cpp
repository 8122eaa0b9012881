// resonances.cpp — second-order resonance energies from the bath integrals

#include "datransfer/resonances.hpp"
#include "datransfer/errors.hpp"

#include <cmath>
#include <limits>

namespace datransfer {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double bose_occupation(double x) {
    if (std::isinf(x)) return 0.0;
    return 1.0 / std::expm1(x);
}

cplx ResonanceSet::operator()(int j, int s) const {
    if (j < 1 || j > 4 || s < 1 || s > 4) throw IndexOutOfRange("resonance index out of range");
    return eps[j - 1][s - 1];
}

std::vector<ResonanceEntry> ResonanceSet::entries() const {
    std::vector<ResonanceEntry> out;
    for (int j = 0; j < 4; ++j) {
        for (int s = 0; s < 4; ++s) {
            out.push_back({j + 1, s + 1, eps[j][s], multiplicity[j][s], regularized[j][s]});
        }
    }
    return out;
}

double ResonanceSet::gamma_min() const {
    double g = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 4; ++j) {
        for (int s = 0; s < 4; ++s) {
            const double im = eps[j][s].imag();
            if (multiplicity[j][s] > 0 && im > 0.0) g = std::min(g, im);
        }
    }
    return g;
}

ResonanceSet compute_resonances(const SystemParams& p, const EffectiveSystem& eff,
                                const SpectralModel& model) {
    validate(p);
    validate(model);
    const double beta = p.beta;
    const double l2 = p.lambda * p.lambda;
    const double gap = eff.gap();
    const double inv_beta = std::isinf(beta) ? 0.0 : 1.0 / beta;
    const double G11 = eff.gbar(0, 0) * eff.gbar(0, 0);
    const double G22 = eff.gbar(1, 1) * eff.gbar(1, 1);
    const double G12 = eff.gbar(0, 1) * eff.gbar(0, 1);

    ResonanceSet r;
    RateComponents& c = r.components;
    c.j_tilde = j_tilde_zero(model);
    c.j_gap = eval_J(model, gap);
    c.coth_gap = thermal_coth(beta, gap);
    c.n_gap = bose_occupation(beta * gap);

    const bool ir_sensitive = infrared_divergent(model, beta);
    try {
        c.mu = mu_integral(model, beta);
        c.boltzmann_mu = boltzmann_mu_integral(model, beta);
        c.pv = pv_lamb_shift(model, beta, gap);
        c.x1 = (p.g_D * p.g_D - G11) * c.mu;
        c.x2 = (p.g_D * p.g_D - G22) * c.mu;
        c.x1_acceptor = (p.g_A * p.g_A - G11) * c.mu;
        c.x2_acceptor = (p.g_A * p.g_A - G22) * c.mu;
        c.x12 = (G22 - G11) * c.mu - G12 * c.boltzmann_mu - (2.0 / kPi) * G12 * c.pv;
    } catch (const InfraredDivergent&) {
        r.shifts_available = false;
        c.mu = c.boltzmann_mu = std::numeric_limits<double>::quiet_NaN();
        c.pv = c.x1 = c.x2 = c.x1_acceptor = c.x2_acceptor = c.x12 = 0.0;
    }
    c.y12 = 2.0 * inv_beta * (G11 + G22 + 2.0 * G12) * c.j_tilde + 2.0 * G12 * c.coth_gap * c.j_gap;

    const double up = 1.0 + c.n_gap;  // 1/|1 - e^{-beta gap}|
    const double down = c.n_gap;      // 1/|1 - e^{+beta gap}|
    const double gam1 = 2.0 * l2 * (inv_beta * G11 * c.j_tilde + G12 * c.j_gap * up);
    const double gam2 = 2.0 * l2 * (inv_beta * G22 * c.j_tilde + G12 * c.j_gap * down);
    const double E_D = p.E_D;
    const double E_A = p.E_A;

    auto& e = r.eps;
    e[0][0] = 0.0;
    e[0][1] = cplx(0.0, 4.0 * l2 * (2.0 * inv_beta * (G11 + G22) * c.j_tilde +
                                    G12 * c.coth_gap * c.j_gap));
    e[0][2] = cplx(gap + l2 * c.x12, l2 * c.y12);
    e[0][3] = -std::conj(e[0][2]);

    e[1][0] = cplx(eff.e1 - E_D + l2 * c.x1, gam1);
    e[1][1] = cplx(eff.e2 - E_D + l2 * c.x2, gam2);
    e[1][2] = cplx(eff.e1 - E_A + l2 * c.x1_acceptor, gam1);
    e[1][3] = cplx(eff.e2 - E_A + l2 * c.x2_acceptor, gam2);
    for (int s = 0; s < 4; ++s) e[2][s] = -std::conj(e[1][s]);

    e[3][0] = 0.0;
    e[3][1] = 0.0;
    const double shift4 = r.shifts_available ? l2 * (E_D * E_D - E_A * E_A) * c.mu : 0.0;
    e[3][2] = cplx(E_D - E_A - shift4, 0.0);
    e[3][3] = -std::conj(e[3][2]);

    const long nd = p.N_D - 1;
    const long na = p.N_A - 1;
    r.multiplicity[0] = {1, 1, 1, 1};
    r.multiplicity[1] = {nd, nd, na, na};
    r.multiplicity[2] = {nd, nd, na, na};
    r.multiplicity[3] = {nd * nd, na * na, na * nd, na * nd};

    const bool reg = ir_sensitive || model.ir_cutoff.has_value() || !r.shifts_available;
    for (int s = 0; s < 4; ++s) {
        r.regularized[0][s] = reg && (s >= 2);
        r.regularized[1][s] = reg;
        r.regularized[2][s] = reg;
        r.regularized[3][s] = reg && (s >= 2);
    }
    return r;
}

double population_relaxation_rate(const SystemParams& p, const EffectiveSystem& eff,
                                  const SpectralModel& model) {
    const double inv_beta = std::isinf(p.beta) ? 0.0 : 1.0 / p.beta;
    const double G11 = eff.gbar(0, 0) * eff.gbar(0, 0);
    const double G22 = eff.gbar(1, 1) * eff.gbar(1, 1);
    const double G12 = eff.gbar(0, 1) * eff.gbar(0, 1);
    const double gap = eff.gap();
    const double gamma0 = 8.0 * inv_beta * (G11 + G22) * j_tilde_zero(model) +
                          4.0 * G12 * thermal_coth(p.beta, gap) * eval_J(model, gap);
    return p.lambda * p.lambda * gamma0;
}

} // namespace datransfer
