// spectral.hpp — Bath spectral density J(omega) and the bath integrals built from it
//
// J(omega) = (pi/4) omega^2 \int_{S^2} |h(omega, Sigma)|^2 dSigma. Every semi-infinite integral is
// truncated at 40 omega_c; the discarded tail is bounded analytically with the upper incomplete
// gamma function and folded into the reported error estimate.

#pragma once

#include "datransfer/model.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace datransfer {

enum class SpectralFamily { Ohmic, SuperOhmic, Tabulated };

struct QuadratureSettings {
    int panels{4};            // panels per sub-interval, each refined adaptively
    double tolerance{1e-10};  // relative tolerance handed to the adaptive rules
    int max_depth{15};
};

struct SpectralTable;  // monotone cubic interpolant over (omega, J) samples

struct SpectralModel {
    SpectralFamily family{SpectralFamily::Ohmic};
    double eta{0.1};
    double omega_c{10.0};
    double power{1.0};                 // exponent s, super-ohmic only
    std::optional<double> ir_cutoff;   // integrals run over [ir_cutoff, inf) when set
    QuadratureSettings quad;
    std::shared_ptr<const SpectralTable> table;

    static SpectralModel ohmic(double eta, double omega_c);
    static SpectralModel super_ohmic(double eta, double omega_c, double s);
    // omega must start at 0 and be strictly increasing; J >= 0 with J(0) = 0.
    static SpectralModel tabulated(std::vector<double> omega, std::vector<double> J);

    // Largest frequency carrying spectral weight (40 omega_c, or the last table node).
    double upper_limit() const;
    // Split point between the low-frequency and bulk quadrature regions.
    double knee() const;
};

// Two-column text file "omega J" ('#' comments allowed).
SpectralModel load_tabulated(const std::string& path);

void validate(const SpectralModel& model);

struct QuadResult {
    double value{0.0};
    double error{0.0};
};

double eval_J(const SpectralModel& model, double omega);

// lim_{omega->0+} J(omega)/omega. Throws DivergentLimit for sub-ohmic tabulated data.
double j_tilde_zero(const SpectralModel& model);

// True when mu (and the other 1/omega^2-weighted integrals) diverge at this beta without ir_cutoff.
bool infrared_divergent(const SpectralModel& model, double beta);

// Adaptive integral of J(omega) * kernel(omega) over [max(lower, ir_cutoff), inf).
// kernel_bound(omega) must dominate |kernel| beyond the truncation point, as c * omega^q.
struct KernelBound {
    double coeff{1.0};
    double power{0.0};
};
QuadResult integrate_weighted(const SpectralModel& model,
                              const std::function<double(double)>& kernel,
                              KernelBound tail, double lower = 0.0);

// Finite-interval adaptive integral of an arbitrary integrand with the model's quadrature settings.
QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              const QuadratureSettings& quad);

// coth(beta omega / 2), with coth = 1 at beta = inf.
double thermal_coth(double beta, double omega);

// J(omega) coth(beta omega / 2), continuous at omega = 0 where it equals 2 J~(0) / beta.
double thermal_J(const SpectralModel& model, double beta, double omega);

// mu = (2/pi) \int J(omega)/omega coth(beta omega/2) domega. Throws InfraredDivergent.
double mu_integral(const SpectralModel& model, double beta);
QuadResult mu_integral_estimate(const SpectralModel& model, double beta);

// (2/pi) \int J(omega)/omega e^{-beta omega} coth(beta omega/2) domega. Throws InfraredDivergent.
double boltzmann_mu_integral(const SpectralModel& model, double beta);

// P.V. \int J(omega) coth(beta omega/2) [1/(omega - de) - 1/(omega + de)] domega, de > 0.
double pv_lamb_shift(const SpectralModel& model, double beta, double delta_e);
QuadResult pv_lamb_shift_estimate(const SpectralModel& model, double beta, double delta_e);

// exp(-amplitude^2 (4/pi) \int tanh(beta omega/4) J(omega)/omega^2 domega).
double polaron_overlap(const SpectralModel& model, double beta, double amplitude);

// w_1 = polaron_overlap with amplitude lambda E_D.
double weight_w1(const SystemParams& params, const SpectralModel& model);

} // namespace datransfer
