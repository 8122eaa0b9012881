// resonances.hpp — complex resonance energies eps_j^(s) of the four density-matrix sectors
//
// Sector j and index s follow the propagator layout:
//   j = 1: span{phi_1, phi_2} block           s = 1..4 (0, populations, two coherences)
//   j = 2: P_Dperp rho P_ss (s = 1, 2) and P_Aperp rho P_ss (s = 3, 4)
//   j = 3: adjoint of sector 2, eps_3 = -conj(eps_2)
//   j = 4: P_Dperp rho P_Dperp, P_Aperp rho P_Aperp, P_Aperp rho P_Dperp, P_Dperp rho P_Aperp

#pragma once

#include "datransfer/model.hpp"
#include "datransfer/spectral.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace datransfer {

using cplx = std::complex<double>;

// Bath quantities entering the resonance formulas, kept for reporting.
struct RateComponents {
    double j_tilde{0.0};       // J~(0)
    double j_gap{0.0};         // J(e1 - e2)
    double coth_gap{1.0};      // coth(beta (e1 - e2)/2)
    double n_gap{0.0};         // Bose occupation 1/(e^{beta (e1 - e2)} - 1)
    double mu{0.0};
    double boltzmann_mu{0.0};
    double pv{0.0};            // P.V. integral at de = e1 - e2
    double x1{0.0};
    double x2{0.0};
    double x1_acceptor{0.0};   // x1, x2 with g_D -> g_A
    double x2_acceptor{0.0};
    double x12{0.0};
    double y12{0.0};
};

struct ResonanceEntry {
    int sector{1};
    int index{1};
    cplx value;
    long multiplicity{1};
    bool regularized{false};
};

struct ResonanceSet {
    std::array<std::array<cplx, 4>, 4> eps{};
    std::array<std::array<long, 4>, 4> multiplicity{};
    std::array<std::array<bool, 4>, 4> regularized{};
    bool shifts_available{true};
    RateComponents components;

    // 1-based access, throws IndexOutOfRange.
    cplx operator()(int j, int s) const;
    std::vector<ResonanceEntry> entries() const;
    // Smallest strictly positive imaginary part over entries with nonzero multiplicity.
    double gamma_min() const;
};

// Bose occupation 1/(e^x - 1) for x > 0, 0 at x = inf.
double bose_occupation(double x);

// Propagates DivergentLimit from J~(0); an infrared-divergent mu leaves real parts at their
// bare values and clears shifts_available.
ResonanceSet compute_resonances(const SystemParams& params, const EffectiveSystem& eff,
                                const SpectralModel& model);

// lambda^2 gamma_0 assembled in the (8/beta, 4 coth) grouping of the two-level generator.
double population_relaxation_rate(const SystemParams& params, const EffectiveSystem& eff,
                                  const SpectralModel& model);

} // namespace datransfer
