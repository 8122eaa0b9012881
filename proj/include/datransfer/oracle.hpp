// oracle.hpp — reference solutions used to validate the resonance-theory main term
//
// Nothing here depends on the resonance or propagator code: each reference is built directly
// from the Hamiltonian, the spectral density and standard open-system constructions.

#pragma once

#include "datransfer/model.hpp"
#include "datransfer/spectral.hpp"

#include <complex>
#include <string>
#include <vector>

namespace datransfer {

// exp(-i t H) rho0 exp(i t H) by dense Hermitian eigendecomposition. Dimension <= 64.
Eigen::MatrixXcd unitary_reference(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& rho0, double t);
DAState unitary_reference(const SystemParams& params, const DAState& rho0, double t);

// ---------------------------------------------------------------------------
// Independent-boson (pure dephasing) sector

// (2/pi) \int J(w) (w t - sin w t)/w^2 dw
double boson_phase_integral(const SpectralModel& model, double t);
// (2/pi) \int J(w) coth(beta w/2) (1 - cos w t)/w^2 dw
double boson_decoherence_integral(const SpectralModel& model, double beta, double t);

// Coherence factor of |A_perp><D_perp| for a bath coupled through kappa_D, kappa_A:
// exp(i (E_D - E_A) t - i lambda^2 (kappa_D^2 - kappa_A^2) Phi(t) - lambda^2 (kappa_D - kappa_A)^2 Gamma(t)).
std::complex<double> independent_boson_factor(const SpectralModel& model, double beta, double lambda,
                                              double E_D, double E_A, double kappa_D, double kappa_A,
                                              double t);

// Same factor for a discrete vacuum bath; (2/pi) \int J dw becomes sum_m c_m^2 / 2.
struct TruncatedBath;
std::complex<double> independent_boson_factor(const TruncatedBath& bath, double lambda, double E_D,
                                              double E_A, double kappa_D, double kappa_A, double t);

// Sector coupling as written for the D_perp / A_perp polaron: kappa_X = E_X.
std::complex<double> independent_boson_coherence(const SystemParams& params, const SpectralModel& model,
                                                 double t);

// ---------------------------------------------------------------------------
// Redfield generator of the effective two-level system

struct RedfieldResult {
    Eigen::Matrix4cd generator;              // acts on vec(rho) in the (phi_1, phi_2) basis, column-major
    std::vector<std::complex<double>> eps;   // generator eigenvalues divided by i, sorted by Re then Im
    Eigen::Matrix2cd stationary;             // normalized null vector
    double population_rate{0.0};             // decay rate of the non-zero real eigenvalue
    std::complex<double> coherence{0.0};     // eps with Re closest to +(e1 - e2)
};

// Bath correlation spectrum S(w) = 4 J(w) / (1 - e^{-beta w}), J extended as an odd function.
double correlation_spectrum(const SpectralModel& model, double beta, double omega);

RedfieldResult redfield_reference(const EffectiveSystem& eff, const SpectralModel& model, double beta,
                                  double lambda);

// ---------------------------------------------------------------------------
// Truncated discrete bath

struct TruncatedBath {
    std::vector<double> omega;   // mode frequencies
    std::vector<double> c;       // couplings, c_m^2 = (4/pi) \int_bin J
    int n_max{2};

    int modes() const noexcept { return static_cast<int>(omega.size()); }
    long long dimension(int n_system) const;
};

inline constexpr long long kMaxBathDimension = 100000;

// Equal-weight bins on [0, 10 omega_c] (the whole table for tabulated J): each bin carries the same \int J; omega_m is the
// J-weighted centroid of its bin.
TruncatedBath discretize_bath(const SpectralModel& model, int modes, int n_max);

struct BathTrajectory {
    std::vector<double> t;
    std::vector<Eigen::MatrixXcd> rho;   // reduced DA density matrices
    std::vector<double> p_D;
    double max_norm_error{0.0};          // max |<Psi(t)|Psi(t)> - <Psi(0)|Psi(0)>| over pure components
};

// Coherent amplitudes of the displaced vacuum for a system operator eigenvalue g:
// alpha_m = -lambda g c_m / (sqrt(2) omega_m).
std::vector<double> displaced_vacuum(const TruncatedBath& bath, double lambda, double g);

// Exact propagation of rho0 (x) |bath> where |bath> is the vacuum or a coherent state with
// the given amplitudes. Dense eigendecomposition up to dimension 2000, Lanczos beyond.
BathTrajectory truncated_bath_evolution(const SystemParams& params, const TruncatedBath& bath,
                                        const DAState& rho0, const std::vector<double>& grid,
                                        const std::vector<double>& bath_amplitudes = {});

// Max over the grid of the Frobenius distance between the reduced state and |psi><psi| when
// psi (x) displaced vacuum is evolved. psi must be supported on one block; the displacement uses
// g_D or g_A accordingly.
double stationarity_check(const SystemParams& params, const TruncatedBath& bath,
                          const Eigen::VectorXcd& psi, const std::vector<double>& grid);

// ---------------------------------------------------------------------------
// Reports

struct OracleCheck {
    std::string check_name;
    double predicted{0.0};
    double reference{0.0};
    double abs_err{0.0};
    double rel_err{0.0};
    bool pass{false};
};

// abs_err <= abs_tol or rel_err <= rel_tol.
OracleCheck make_check(std::string name, double predicted, double reference, double abs_tol,
                       double rel_tol = 0.0);

} // namespace datransfer
