// model.cpp — Hamiltonian assembly, effective reduction, projectors, Gibbs state

#include "datransfer/model.hpp"
#include "datransfer/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace datransfer {

double SystemParams::effective_coupling() const noexcept {
    return V * std::sqrt(static_cast<double>(N_D) * static_cast<double>(N_A));
}

void validate(const SystemParams& p) {
    if (p.N_D < 1 || p.N_A < 1) {
        throw InvalidParameters("N_D and N_A must be >= 1");
    }
    if (!(p.beta > 0.0)) {
        throw InvalidParameters("beta must be > 0");
    }
    for (double x : {p.E_D, p.E_A, p.V, p.g_D, p.g_A, p.lambda}) {
        if (!std::isfinite(x)) throw InvalidParameters("model constants must be finite");
    }
    if (!(p.weak_coupling_threshold > 0.0)) {
        throw InvalidParameters("weak_coupling_threshold must be > 0");
    }
}

std::optional<std::string> regime_warning(const SystemParams& p) {
    const double v = p.effective_coupling();
    const double gap = std::sqrt((p.E_D - p.E_A) * (p.E_D - p.E_A) + 4.0 * v * v);
    const double l2 = p.lambda * p.lambda;
    if (l2 < p.weak_coupling_threshold * gap) return std::nullopt;
    std::ostringstream os;
    os << "weak-coupling regime violated: lambda^2 = " << l2 << " >= "
       << p.weak_coupling_threshold << " * (e1 - e2) = " << p.weak_coupling_threshold * gap;
    return os.str();
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> build_hamiltonian(const SystemParams& p) {
    validate(p);
    const int n = p.dim();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < p.N_D; ++j) {
        H(j, j) = p.E_D;
        G(j, j) = p.g_D;
    }
    for (int k = 0; k < p.N_A; ++k) {
        H(p.N_D + k, p.N_D + k) = p.E_A;
        G(p.N_D + k, p.N_D + k) = p.g_A;
    }
    for (int j = 0; j < p.N_D; ++j) {
        for (int k = 0; k < p.N_A; ++k) {
            H(j, p.N_D + k) = p.V;
            H(p.N_D + k, j) = p.V;
        }
    }
    return {H, G};
}

EffectiveSystem effective_reduction(const SystemParams& p) {
    validate(p);
    EffectiveSystem eff;
    eff.v = p.effective_coupling();
    if (eff.v == 0.0) {
        throw DegenerateEffectiveSystem("effective coupling v = V sqrt(N_D N_A) vanishes");
    }
    const double v = eff.v;
    const double root = std::sqrt((p.E_D - p.E_A) * (p.E_D - p.E_A) + 4.0 * v * v);
    eff.e1 = 0.5 * (p.E_D + p.E_A + root);
    eff.e2 = 0.5 * (p.E_D + p.E_A - root);

    // Eigenvector components (v, e - E_D); the shifted root is formed without cancellation.
    const double d = p.E_D - p.E_A;
    const double s1 = (d <= 0.0) ? 0.5 * (root - d) : 2.0 * v * v / (root + d);   // e1 - E_D
    const double s2 = (d >= 0.0) ? -0.5 * (root + d) : -2.0 * v * v / (root - d); // e2 - E_D

    const double sign = v > 0.0 ? 1.0 : -1.0;
    eff.phi1 = sign * Eigen::Vector2d(v, s1) / std::hypot(v, s1);
    eff.phi2 = sign * Eigen::Vector2d(v, s2) / std::hypot(v, s2);
    eff.alpha = s1 / v;

    auto gbar = [&](double a, double b) {
        return (p.g_D * v * v + p.g_A * a * b) /
               std::sqrt((v * v + a * a) * (v * v + b * b));
    };
    eff.gbar(0, 0) = gbar(s1, s1);
    eff.gbar(1, 1) = gbar(s2, s2);
    eff.gbar(0, 1) = eff.gbar(1, 0) = gbar(s1, s2);
    return eff;
}

namespace {

// Gram-Schmidt over |X_1> - |X_{j+1}>, j = 1..n-1, embedded at offset.
Eigen::MatrixXcd complement_basis(int n_total, int offset, int n_block) {
    Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(n_total, std::max(0, n_block - 1));
    for (int j = 0; j + 1 < n_block; ++j) {
        Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n_total);
        w(offset) = 1.0;
        w(offset + j + 1) = -1.0;
        for (int i = 0; i < j; ++i) {
            w -= basis.col(i) * basis.col(i).dot(w);
        }
        basis.col(j) = w / w.norm();
    }
    return basis;
}

} // namespace

Eigen::MatrixXcd ProjectionSet::P(int k, int l) const {
    return phi.at(k - 1) * phi.at(l - 1).adjoint();
}

ProjectionSet build_projections(const SystemParams& p, const EffectiveSystem& eff) {
    validate(p);
    const int n = p.dim();
    ProjectionSet ps;
    ps.n_donor = p.N_D;
    ps.n_acceptor = p.N_A;
    ps.donor_uniform = Eigen::VectorXcd::Zero(n);
    ps.acceptor_uniform = Eigen::VectorXcd::Zero(n);
    ps.donor_uniform.head(p.N_D).setConstant(1.0 / std::sqrt(static_cast<double>(p.N_D)));
    ps.acceptor_uniform.tail(p.N_A).setConstant(1.0 / std::sqrt(static_cast<double>(p.N_A)));

    ps.phi[0] = eff.phi1(0) * ps.donor_uniform + eff.phi1(1) * ps.acceptor_uniform;
    ps.phi[1] = eff.phi2(0) * ps.donor_uniform + eff.phi2(1) * ps.acceptor_uniform;

    ps.P_bar_S = ps.donor_uniform * ps.donor_uniform.adjoint() +
                 ps.acceptor_uniform * ps.acceptor_uniform.adjoint();
    ps.xi_D = complement_basis(n, 0, p.N_D);
    ps.xi_A = complement_basis(n, p.N_D, p.N_A);
    ps.P_Dperp = ps.xi_D * ps.xi_D.adjoint();
    ps.P_Aperp = ps.xi_A * ps.xi_A.adjoint();
    if (ps.xi_D.cols() == 0) ps.P_Dperp = Eigen::MatrixXcd::Zero(n, n);
    if (ps.xi_A.cols() == 0) ps.P_Aperp = Eigen::MatrixXcd::Zero(n, n);
    return ps;
}

Eigen::Vector2d gibbs_weights(const EffectiveSystem& eff, double beta) {
    if (!(beta > 0.0)) throw InvalidParameters("beta must be > 0");
    // Max-shifted: weights relative to the lower level e2.
    const double x = beta * eff.gap();  // >= 0, may be +inf
    const double r = std::exp(-x);      // e^{-beta e1} / e^{-beta e2}
    return {r / (1.0 + r), 1.0 / (1.0 + r)};
}

Eigen::Matrix2d gibbs_effective(const EffectiveSystem& eff, double beta) {
    const Eigen::Vector2d w = gibbs_weights(eff, beta);
    return w.asDiagonal();
}

Eigen::MatrixXcd gibbs_embedded(const ProjectionSet& proj, const EffectiveSystem& eff, double beta) {
    const Eigen::Vector2d w = gibbs_weights(eff, beta);
    return w(0) * proj.P(1, 1) + w(1) * proj.P(2, 2);
}

DAState make_state(const Eigen::MatrixXcd& rho, int n_donor, int n_acceptor) {
    if (n_donor < 1 || n_acceptor < 1) throw InvalidState("site counts must be >= 1");
    const int n = n_donor + n_acceptor;
    if (rho.rows() != n || rho.cols() != n) {
        throw InvalidState("density matrix has wrong dimension");
    }
    if ((rho - rho.adjoint()).norm() > 1e-10) throw InvalidState("density matrix is not Hermitian");
    if (std::abs(rho.trace() - std::complex<double>(1.0, 0.0)) > kTraceTolerance) {
        throw InvalidState("density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kTracePsdTolerance) {
        throw InvalidState("density matrix has a negative eigenvalue");
    }
    return DAState{n_donor, n_acceptor, rho};
}

} // namespace datransfer
