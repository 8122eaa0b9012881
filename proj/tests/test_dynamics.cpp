// test_dynamics.cpp — main-term propagator, closed-form donor elements, asymptotic state

#include "datransfer/dynamics.hpp"
#include "datransfer/errors.hpp"
#include "datransfer/oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace datransfer;
using testsupport::random_density;

namespace {

const SpectralModel kBath = SpectralModel::super_ohmic(0.5, 10.0, 3.0);

DAState state(const SystemParams& p, const Eigen::MatrixXcd& rho) { return DAState{p.N_D, p.N_A, rho}; }

} // namespace

TEST_CASE("phase factor is overflow-free") {
    CHECK(resonance_phase(cplx(0.0, 1.0), 1e6) == cplx(0.0));
    CHECK(std::abs(resonance_phase(cplx(2.0, 0.0), 1.3) - std::exp(cplx(0.0, 2.6))) < 1e-15);
    CHECK(std::abs(resonance_phase(cplx(2.0, 0.5), 1.3) - std::exp(cplx(0.0, 1.3) * cplx(2.0, 0.5))) < 1e-15);
}

TEST_CASE("t = 0 returns rho0 and negative times are rejected") {
    std::mt19937_64 rng(1);
    const SystemParams p = testsupport::random_params(rng);
    const PropagatorContext ctx(p, kBath);
    const DAState rho0 = state(p, random_density(rng, p.dim()));
    CHECK((propagate(ctx, rho0, 0.0).rho - rho0.rho).norm() < 1e-15);
    CHECK_THROWS_AS(propagate(ctx, rho0, -1.0), NegativeTime);
    CHECK_THROWS_AS(donor_population(ctx, rho0, -1.0), NegativeTime);
}

TEST_CASE("zero coupling reproduces unitary evolution") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        SystemParams p = testsupport::random_params(rng);
        p.lambda = 0.0;
        const PropagatorContext ctx(p, kBath);
        const DAState rho0 = state(p, random_density(rng, p.dim()));
        for (double t : {0.1, 1.0, 10.0}) {
            CHECK((propagate(ctx, rho0, t).rho - unitary_reference(p, rho0, t).rho).norm() < 1e-10);
        }
    }
}

TEST_CASE("trace, hermiticity and sector confinement") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemParams p = testsupport::random_params(rng);
        const PropagatorContext ctx(p, kBath);
        const auto& P = ctx.projections();
        const DAState rho0 = state(p, random_density(rng, p.dim()));
        const Eigen::MatrixXcd span = 0.7 * P.donor_uniform * P.donor_uniform.adjoint() +
                                      0.3 * P.acceptor_uniform * P.acceptor_uniform.adjoint() +
                                      cplx(0.2, 0.1) * P.donor_uniform * P.acceptor_uniform.adjoint() +
                                      cplx(0.2, -0.1) * P.acceptor_uniform * P.donor_uniform.adjoint();
        const Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(p.dim(), p.dim()) - P.P_bar_S;
        for (double t : {0.5, 3.0, 40.0, 900.0}) {
            const Eigen::MatrixXcd r = propagate(ctx, rho0, t).rho;
            CHECK(std::abs(r.trace() - cplx(1.0)) < 1e-10);
            CHECK((r - r.adjoint()).norm() < 1e-12);
            const Eigen::MatrixXcd s = propagate(ctx, state(p, span), t).rho;
            CHECK((Q * s).norm() < 1e-12);
            CHECK((s * Q).norm() < 1e-12);
        }
    }
}

TEST_CASE("states on the complement subspaces are stationary") {
    SystemParams p;
    p.N_D = 3;
    p.N_A = 2;
    p.lambda = 0.1;
    const PropagatorContext ctx(p, kBath);
    const auto& P = ctx.projections();
    const Eigen::VectorXcd xd = (P.xi_D.col(0) + cplx(0.0, 1.0) * P.xi_D.col(1)) / std::sqrt(2.0);
    const Eigen::VectorXcd xa = P.xi_A.col(0);
    for (const Eigen::VectorXcd& psi : {xd, xa}) {
        const DAState rho0 = state(p, psi * psi.adjoint());
        for (double t : {0.3, 7.0, 1e4}) CHECK((propagate(ctx, rho0, t).rho - rho0.rho).norm() <= 1e-12);
    }
}

TEST_CASE("closed-form donor elements match the propagated matrix") {
    SystemParams p;
    p.N_D = 3;
    p.N_A = 2;
    p.E_D = 0.4;
    p.E_A = -0.3;
    p.V = 0.15;
    p.lambda = 0.08;
    p.beta = 2.0;
    std::mt19937_64 rng(4);
    for (const auto& m : {kBath, SpectralModel::ohmic(0.3, 5.0)}) {
        const PropagatorContext ctx(p, m);
        for (int trial = 0; trial < 10; ++trial) {
            const DAState rho0 = state(p, random_density(rng, p.dim()));
            for (double t : {0.0, 0.7, 12.0, 300.0}) {
                const Eigen::MatrixXcd r = propagate(ctx, rho0, t).rho;
                double worst = 0.0;
                for (int k = 1; k <= p.N_D; ++k) {
                    for (int l = 1; l <= p.N_D; ++l) {
                        worst = std::max(worst, std::abs(donor_element(ctx, rho0, t, k, l) - r(k - 1, l - 1)));
                    }
                }
                CHECK(worst < 1e-10);
                CHECK(std::abs(donor_population(ctx, rho0, t) - r.topLeftCorner(3, 3).trace().real()) < 1e-10);
            }
        }
        const DAState rho0 = state(p, random_density(rng, p.dim()));
        CHECK_THROWS_AS(donor_element(ctx, rho0, 1.0, 0, 1), IndexOutOfRange);
        CHECK_THROWS_AS(donor_element(ctx, rho0, 1.0, 1, 4), IndexOutOfRange);
    }
}

TEST_CASE("asymptotic state") {
    SystemParams p;
    p.N_D = 2;
    p.N_A = 3;
    p.lambda = 0.1;
    p.beta = 1.5;
    const PropagatorContext ctx(p, kBath);
    const auto& P = ctx.projections();

    // Gibbs state of the span is a fixed point; |D><D| relaxes onto it.
    const DAState gibbs = state(p, ctx.gibbs_state());
    CHECK((asymptotic_state(ctx, gibbs).rho - gibbs.rho).norm() < 1e-14);
    const DAState d = state(p, P.donor_uniform * P.donor_uniform.adjoint());
    CHECK((asymptotic_state(ctx, d).rho - ctx.gibbs_state()).norm() < 1e-14);

    // Exponential approach once the persistent D_perp/A_perp coherence is removed.
    std::mt19937_64 rng(9);
    DAState rho0 = state(p, random_density(rng, p.dim()));
    rho0.rho -= P.P_Aperp * rho0.rho * P.P_Dperp + P.P_Dperp * rho0.rho * P.P_Aperp;
    const double g = ctx.resonances().gamma_min();
    for (double x : {1.0, 3.0, 10.0, 30.0}) {
        const double dev = (propagate(ctx, rho0, x / g).rho - asymptotic_state(ctx, rho0).rho).norm();
        CHECK(dev <= 2.0 * std::exp(-x));
    }
}

TEST_CASE("coherence between phi_1 and phi_2 decays as a single exponential") {
    SystemParams p;
    p.lambda = 0.1;
    const PropagatorContext ctx(p, kBath);
    const auto& P = ctx.projections();
    const Eigen::VectorXcd psi = (P.phi[0] + P.phi[1]) / std::sqrt(2.0);
    const DAState rho0 = state(p, psi * psi.adjoint());
    const double rate = ctx.resonances()(1, 3).imag();
    const cplx c0 = P.phi[0].dot(rho0.rho * P.phi[1]);
    for (double t : {1.0, 10.0, 100.0}) {
        const cplx c = P.phi[0].dot(propagate(ctx, rho0, t).rho * P.phi[1]);
        CHECK(std::abs(c) == doctest::Approx(std::abs(c0) * std::exp(-rate * t)).epsilon(1e-12));
    }
}

TEST_CASE("donor elements do not depend on N_A at fixed v") {
    SystemParams a;
    a.N_D = 3;
    a.N_A = 1;
    a.V = 0.3;
    a.lambda = 0.1;
    SystemParams b = a;
    b.N_A = 4;
    b.V = 0.15;
    const PropagatorContext ca(a, kBath);
    const PropagatorContext cb(b, kBath);
    std::mt19937_64 rng(12);
    const Eigen::MatrixXcd donor = random_density(rng, 3);
    Eigen::MatrixXcd ra = Eigen::MatrixXcd::Zero(4, 4);
    Eigen::MatrixXcd rb = Eigen::MatrixXcd::Zero(7, 7);
    ra.topLeftCorner(3, 3) = donor;
    rb.topLeftCorner(3, 3) = donor;
    for (double t : {0.5, 5.0, 50.0}) {
        const Eigen::MatrixXcd x = propagate(ca, state(a, ra), t).rho.topLeftCorner(3, 3);
        const Eigen::MatrixXcd y = propagate(cb, state(b, rb), t).rho.topLeftCorner(3, 3);
        CHECK((x - y).norm() <= 1e-12);
    }
}

TEST_CASE("positivity holds to O(lambda^2)") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemParams p = testsupport::random_params(rng);
        const PropagatorContext ctx(p, SpectralModel::ohmic(0.3, 5.0));
        const DAState rho0 = state(p, random_density(rng, p.dim()));
        for (double t : {0.1, 5.0, 100.0}) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(propagate(ctx, rho0, t).rho);
            CHECK(es.eigenvalues().minCoeff() >= -10.0 * p.lambda * p.lambda);
        }
    }
}

TEST_CASE("state dimension must match the context") {
    SystemParams p;
    p.N_D = 2;
    const PropagatorContext ctx(p, kBath);
    const DAState wrong{1, 1, Eigen::MatrixXcd::Identity(2, 2) / 2.0};
    CHECK_THROWS_AS(propagate(ctx, wrong, 1.0), InvalidState);
}
