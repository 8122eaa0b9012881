// observables.hpp — transfer efficiency, detuning landscape and donor population fluctuations

#pragma once

#include "datransfer/dynamics.hpp"

#include <string>
#include <vector>

namespace datransfer {

enum class DistributionKind { Incoherent, Coherent };

struct InitialDistribution {
    std::vector<double> p;
    DistributionKind kind{DistributionKind::Incoherent};
};

// Throws DistributionInvalid unless p_j >= 0 and sum p_j = 1 within 1e-12.
void validate(const InitialDistribution& dist);

DAState make_initial_state(const InitialDistribution& dist, int n_donor, int n_acceptor);

enum class TemperatureRegime { High, Intermediate, Low };
std::string to_string(TemperatureRegime r);

struct EfficiencyReport {
    double p_D_inf{0.0};
    double p_A_inf{0.0};
    TemperatureRegime regime{TemperatureRegime::Intermediate};
    double entropy{0.0};  // nats
};

// beta (e1 - e2) < 0.1 is High, > 10 is Low.
TemperatureRegime classify_regime(const EffectiveSystem& eff, double beta);

// (1/(1+alpha^2)) (x1 alpha^2 + x2) with Gibbs weights x1, x2: the largest reachable p_A.
double max_acceptor_population(const EffectiveSystem& eff, double beta);

EfficiencyReport efficiency_incoherent(const EffectiveSystem& eff, double beta, int n_donor);
// Entropy is taken from p; for the incoherent formula p only affects the entropy.
EfficiencyReport efficiency_incoherent(const EffectiveSystem& eff, double beta,
                                       const std::vector<double>& p);
EfficiencyReport efficiency_coherent(const EffectiveSystem& eff, double beta, int n_donor,
                                     const std::vector<double>& p);

// -eta + sqrt(eta^2 + 1), eta >= 0.
double alpha_of_eta(double eta);

double shannon_entropy(const std::vector<double>& p);

struct PopulationSample {
    double t{0.0};
    double p_D{0.0};        // from the propagated density matrix
    double p_A{0.0};
    double p_D_closed{0.0}; // from the closed-form donor population
};

std::vector<PopulationSample> population_timeseries(const PropagatorContext& ctx, const DAState& rho0,
                                                    const std::vector<double>& grid);

// p_D (1 - p_D) / N_D^2, clamped to 0 outside [0, 1] rounding.
double fluctuation_variance(double p_D, int n_donor);

// N_D <D_k, rho_t D_k> for rho0 = |D><D|; independent of k and N_D.
double uniform_site_population(const PropagatorContext& ctx, double t);

} // namespace datransfer
