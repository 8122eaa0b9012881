// dynamics.hpp — main-term density matrix propagation and donor element closed forms

#pragma once

#include "datransfer/model.hpp"
#include "datransfer/resonances.hpp"
#include "datransfer/spectral.hpp"

namespace datransfer {

class PropagatorContext {
public:
    PropagatorContext(const SystemParams& params, const SpectralModel& model);

    const SystemParams& params() const noexcept { return params_; }
    const EffectiveSystem& eff() const noexcept { return eff_; }
    const ProjectionSet& projections() const noexcept { return proj_; }
    const ResonanceSet& resonances() const noexcept { return res_; }
    const Eigen::Vector2d& gibbs() const noexcept { return gibbs_; }
    const Eigen::MatrixXcd& gibbs_state() const noexcept { return gibbs_state_; }

private:
    SystemParams params_;
    EffectiveSystem eff_;
    ProjectionSet proj_;
    ResonanceSet res_;
    Eigen::Vector2d gibbs_;
    Eigen::MatrixXcd gibbs_state_;
};

// e^{i t eps} = e^{-t Im eps} (cos(t Re eps) + i sin(t Re eps)).
cplx resonance_phase(cplx eps, double t);

// Main term of the reduced DA density matrix at time t. Throws NegativeTime.
DAState propagate(const PropagatorContext& ctx, const DAState& rho0, double t);

// Tr(rho0 P_bar_S) rho_bar + P_Dperp rho0 P_Dperp + P_Aperp rho0 P_Aperp.
DAState asymptotic_state(const PropagatorContext& ctx, const DAState& rho0);

// <D_k, rho_t D_l> from the closed form, 1 <= k, l <= N_D. Throws IndexOutOfRange.
cplx donor_element(const PropagatorContext& ctx, const DAState& rho0, double t, int k, int l);

// Total donor population from the closed form.
double donor_population(const PropagatorContext& ctx, const DAState& rho0, double t);

// [rho0]_{ss'} = <phi_s, rho0 phi_s'>, s, s' in {1, 2}.
Eigen::Matrix2cd effective_block(const PropagatorContext& ctx, const DAState& rho0);

} // namespace datransfer
