// observables.cpp — efficiency closed forms and fluctuation statistics

#include "datransfer/observables.hpp"
#include "datransfer/errors.hpp"

#include <cmath>

namespace datransfer {

void validate(const InitialDistribution& dist) {
    if (dist.p.empty()) throw DistributionInvalid("empty distribution");
    double sum = 0.0;
    for (double x : dist.p) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw DistributionInvalid("probabilities must be >= 0");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw DistributionInvalid("probabilities must sum to 1");
}

DAState make_initial_state(const InitialDistribution& dist, int n_donor, int n_acceptor) {
    validate(dist);
    if (static_cast<int>(dist.p.size()) != n_donor) {
        throw DistributionInvalid("distribution length differs from N_D");
    }
    if (n_acceptor < 1) throw InvalidState("N_A must be >= 1");
    const int n = n_donor + n_acceptor;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    if (dist.kind == DistributionKind::Incoherent) {
        for (int j = 0; j < n_donor; ++j) rho(j, j) = dist.p[j];
    } else {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
        for (int j = 0; j < n_donor; ++j) psi(j) = std::sqrt(dist.p[j]);
        rho = psi * psi.adjoint();
    }
    return make_state(rho, n_donor, n_acceptor);
}

std::string to_string(TemperatureRegime r) {
    switch (r) {
    case TemperatureRegime::High: return "high_T";
    case TemperatureRegime::Low: return "low_T";
    case TemperatureRegime::Intermediate: break;
    }
    return "intermediate";
}

TemperatureRegime classify_regime(const EffectiveSystem& eff, double beta) {
    const double x = beta * eff.gap();
    if (x < 0.1) return TemperatureRegime::High;
    if (x > 10.0) return TemperatureRegime::Low;
    return TemperatureRegime::Intermediate;
}

double max_acceptor_population(const EffectiveSystem& eff, double beta) {
    const Eigen::Vector2d x = gibbs_weights(eff, beta);
    const double a2 = eff.alpha * eff.alpha;
    return (x(0) * a2 + x(1)) / ((1.0 + a2) * (x(0) + x(1)));
}

double shannon_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log(x);
    }
    return h;
}

EfficiencyReport efficiency_incoherent(const EffectiveSystem& eff, double beta, int n_donor) {
    if (n_donor < 1) throw InvalidParameters("N_D must be >= 1");
    EfficiencyReport r;
    r.p_D_inf = 1.0 - max_acceptor_population(eff, beta) / n_donor;
    r.p_A_inf = 1.0 - r.p_D_inf;
    r.regime = classify_regime(eff, beta);
    r.entropy = 0.0;
    return r;
}

EfficiencyReport efficiency_incoherent(const EffectiveSystem& eff, double beta,
                                       const std::vector<double>& p) {
    validate(InitialDistribution{p, DistributionKind::Incoherent});
    EfficiencyReport r = efficiency_incoherent(eff, beta, static_cast<int>(p.size()));
    r.entropy = shannon_entropy(p);
    return r;
}

EfficiencyReport efficiency_coherent(const EffectiveSystem& eff, double beta, int n_donor,
                                     const std::vector<double>& p) {
    validate(InitialDistribution{p, DistributionKind::Coherent});
    if (static_cast<int>(p.size()) != n_donor) {
        throw DistributionInvalid("distribution length differs from N_D");
    }
    double root_sum = 0.0;
    for (double x : p) root_sum += std::sqrt(x);
    EfficiencyReport r;
    r.p_D_inf = 1.0 - root_sum * root_sum / n_donor * max_acceptor_population(eff, beta);
    r.p_A_inf = 1.0 - r.p_D_inf;
    r.regime = classify_regime(eff, beta);
    r.entropy = shannon_entropy(p);
    return r;
}

double alpha_of_eta(double eta) {
    if (!(eta >= 0.0)) throw InvalidParameters("eta must be >= 0");
    // -eta + sqrt(eta^2 + 1) without cancellation.
    return 1.0 / (eta + std::hypot(eta, 1.0));
}

std::vector<PopulationSample> population_timeseries(const PropagatorContext& ctx, const DAState& rho0,
                                                    const std::vector<double>& grid) {
    std::vector<PopulationSample> out;
    out.reserve(grid.size());
    const int nd = ctx.params().N_D;
    const int na = ctx.params().N_A;
    for (double t : grid) {
        const DAState rt = propagate(ctx, rho0, t);
        PopulationSample s;
        s.t = t;
        s.p_D = rt.rho.topLeftCorner(nd, nd).trace().real();
        s.p_A = rt.rho.bottomRightCorner(na, na).trace().real();
        s.p_D_closed = donor_population(ctx, rho0, t);
        out.push_back(s);
    }
    return out;
}

double fluctuation_variance(double p_D, int n_donor) {
    if (n_donor < 1) throw InvalidParameters("N_D must be >= 1");
    const double v = p_D * (1.0 - p_D);
    return std::max(0.0, v) / (static_cast<double>(n_donor) * n_donor);
}

double uniform_site_population(const PropagatorContext& ctx, double t) {
    if (t < 0.0 || std::isnan(t)) throw NegativeTime("time must be >= 0");
    const auto& R = ctx.resonances();
    const double a2 = ctx.eff().alpha * ctx.eff().alpha;
    const double x1 = ctx.gibbs()(0);
    const double x2 = ctx.gibbs()(1);
    const double f12 = (cplx(1.0) - resonance_phase(R(1, 2), t)).real();
    const cplx e13 = R(1, 3);
    return 1.0 - f12 * ((1.0 - a2) / (1.0 + a2)) * (1.0 / (1.0 + a2) - x1 / (x1 + x2)) -
           2.0 * a2 / ((1.0 + a2) * (1.0 + a2)) *
               (1.0 - std::exp(-t * e13.imag()) * std::cos(t * e13.real()));
}

} // namespace datransfer
