// dynamics.cpp — main-term propagator, asymptotic state and donor matrix elements

#include "datransfer/dynamics.hpp"
#include "datransfer/errors.hpp"

#include <cmath>

namespace datransfer {

PropagatorContext::PropagatorContext(const SystemParams& params, const SpectralModel& model)
    : params_(params),
      eff_(effective_reduction(params)),
      proj_(build_projections(params, eff_)),
      res_(compute_resonances(params, eff_, model)),
      gibbs_(gibbs_weights(eff_, params.beta)),
      gibbs_state_(gibbs_embedded(proj_, eff_, params.beta)) {}

cplx resonance_phase(cplx eps, double t) {
    if (t == 0.0) return 1.0;
    const double damp = std::exp(-t * eps.imag());
    const double ph = t * eps.real();
    return {damp * std::cos(ph), damp * std::sin(ph)};
}

namespace {

void check_state(const PropagatorContext& ctx, const DAState& rho0) {
    if (rho0.n_donor != ctx.params().N_D || rho0.n_acceptor != ctx.params().N_A ||
        rho0.rho.rows() != ctx.params().dim() || rho0.rho.cols() != ctx.params().dim()) {
        throw InvalidState("state dimensions do not match the propagator context");
    }
}

Eigen::MatrixXcd two_re(const Eigen::MatrixXcd& X) { return X + X.adjoint(); }

} // namespace

Eigen::Matrix2cd effective_block(const PropagatorContext& ctx, const DAState& rho0) {
    check_state(ctx, rho0);
    const auto& phi = ctx.projections().phi;
    Eigen::Matrix2cd b;
    for (int s = 0; s < 2; ++s) {
        for (int r = 0; r < 2; ++r) b(s, r) = phi[s].dot(rho0.rho * phi[r]);
    }
    return b;
}

DAState propagate(const PropagatorContext& ctx, const DAState& rho0, double t) {
    if (t < 0.0 || std::isnan(t)) throw NegativeTime("propagation time must be >= 0");
    check_state(ctx, rho0);
    const auto& P = ctx.projections();
    const auto& R = ctx.resonances();
    const Eigen::MatrixXcd& rho = rho0.rho;
    const double x1 = ctx.gibbs()(0);
    const double x2 = ctx.gibbs()(1);
    auto f = [&](int j, int s) { return cplx(1.0) - resonance_phase(R(j, s), t); };

    const Eigen::MatrixXcd P11 = P.P(1, 1);
    const Eigen::MatrixXcd P22 = P.P(2, 2);
    const Eigen::MatrixXcd P12 = P.P(1, 2);
    const Eigen::MatrixXcd P21 = P.P(2, 1);

    Eigen::MatrixXcd out = rho;
    const Eigen::MatrixXcd pops = x1 * (P22 * rho * P22 - P12 * rho * P21) +
                                  x2 * (P11 * rho * P11 - P21 * rho * P12);
    out -= f(1, 2) / (x1 + x2) * pops;
    out -= two_re(f(1, 3) * (P22 * rho * P11));
    out -= two_re(f(4, 3) * (P.P_Aperp * rho * P.P_Dperp));

    Eigen::MatrixXcd sector2 = f(2, 1) * (P.P_Dperp * rho * P11) + f(2, 2) * (P.P_Dperp * rho * P22) +
                               f(2, 3) * (P.P_Aperp * rho * P11) + f(2, 4) * (P.P_Aperp * rho * P22);
    out -= two_re(sector2);
    return DAState{rho0.n_donor, rho0.n_acceptor, out};
}

DAState asymptotic_state(const PropagatorContext& ctx, const DAState& rho0) {
    check_state(ctx, rho0);
    const auto& P = ctx.projections();
    const cplx weight = (rho0.rho * P.P_bar_S).trace();
    Eigen::MatrixXcd out = weight * ctx.gibbs_state() + P.P_Dperp * rho0.rho * P.P_Dperp +
                           P.P_Aperp * rho0.rho * P.P_Aperp;
    return DAState{rho0.n_donor, rho0.n_acceptor, out};
}

cplx donor_element(const PropagatorContext& ctx, const DAState& rho0, double t, int k, int l) {
    if (t < 0.0 || std::isnan(t)) throw NegativeTime("propagation time must be >= 0");
    check_state(ctx, rho0);
    const int nd = ctx.params().N_D;
    if (k < 1 || k > nd || l < 1 || l > nd) throw IndexOutOfRange("donor index out of range");
    const auto& P = ctx.projections();
    const auto& R = ctx.resonances();
    const double a = ctx.eff().alpha;
    const double a2 = a * a;
    const double x1 = ctx.gibbs()(0);
    const double x2 = ctx.gibbs()(1);
    const Eigen::Matrix2cd b = effective_block(ctx, rho0);
    auto f = [&](int j, int s) { return cplx(1.0) - resonance_phase(R(j, s), t); };

    cplx out = rho0.rho(k - 1, l - 1);
    out -= f(1, 2) / static_cast<double>(nd) * ((1.0 - a2) / (1.0 + a2)) *
           (x2 * b(0, 0) - x1 * b(1, 1)) / (x1 + x2);
    out -= 2.0 / nd * (std::abs(a) / (1.0 + a2)) * (f(1, 3) * b(1, 0)).real();

    // Terms coupling H_{Dperp} to the effective two-level span.
    const Eigen::VectorXcd left = P.P_Dperp.row(k - 1).transpose();   // P_Dperp^T e_k
    const Eigen::VectorXcd right = P.P_Dperp.col(l - 1);
    for (int s = 1; s <= 2; ++s) {
        const Eigen::MatrixXcd Pss = P.P(s, s);
        const cplx fwd = (left.transpose() * rho0.rho * Pss.col(l - 1))(0);
        const cplx bwd = (Pss.row(k - 1) * rho0.rho * right)(0);
        out -= f(2, s) * fwd + std::conj(f(2, s)) * bwd;
    }
    return out;
}

double donor_population(const PropagatorContext& ctx, const DAState& rho0, double t) {
    if (t < 0.0 || std::isnan(t)) throw NegativeTime("propagation time must be >= 0");
    check_state(ctx, rho0);
    const int nd = ctx.params().N_D;
    const auto& P = ctx.projections();
    const auto& R = ctx.resonances();
    const double a = ctx.eff().alpha;
    const double a2 = a * a;
    const double x1 = ctx.gibbs()(0);
    const double x2 = ctx.gibbs()(1);
    const Eigen::Matrix2cd b = effective_block(ctx, rho0);
    auto f = [&](int j, int s) { return cplx(1.0) - resonance_phase(R(j, s), t); };

    cplx pd0 = rho0.rho.topLeftCorner(nd, nd).trace();
    cplx out = pd0;
    out -= f(1, 2) * ((1.0 - a2) / (1.0 + a2)) * (x2 * b(0, 0) - x1 * b(1, 1)) / (x1 + x2);
    out -= 2.0 * (std::abs(a) / (1.0 + a2)) * (f(1, 3) * b(1, 0)).real();
    cplx cross = 0.0;
    for (int s = 1; s <= 2; ++s) {
        const Eigen::MatrixXcd M = P.P_Dperp * rho0.rho * P.P(s, s);
        cross += f(2, s) * M.topLeftCorner(nd, nd).trace();
    }
    out -= 2.0 * cross.real();
    return out.real();
}

} // namespace datransfer
