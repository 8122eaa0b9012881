// model.hpp — Degenerate donor-acceptor Hamiltonian, effective two-level reduction and projectors
//
// Basis order throughout the library: D_1..D_{N_D}, A_1..A_{N_A}. Units hbar = k_B = 1.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <utility>

namespace datransfer {

struct SystemParams {
    double E_D{1.0};
    double E_A{-1.0};
    int N_D{1};
    int N_A{1};
    double V{0.5};
    double g_D{1.0};
    double g_A{-1.0};
    double lambda{0.1};
    double beta{1.0};        // +inf is accepted (zero temperature)
    double weak_coupling_threshold{0.1};

    int dim() const noexcept { return N_D + N_A; }
    double effective_coupling() const noexcept;  // v = V sqrt(N_D N_A)
};

// Throws InvalidParameters on N < 1, beta <= 0 or non-finite energies.
void validate(const SystemParams& params);

// Returns a message when lambda^2 >= threshold * (e1 - e2).
std::optional<std::string> regime_warning(const SystemParams& params);

struct EffectiveSystem {
    double v{0.0};
    double e1{0.0};
    double e2{0.0};
    Eigen::Vector2d phi1;   // components on (|D>, |A>)
    Eigen::Vector2d phi2;
    double alpha{0.0};      // (e1 - E_D) / v
    Eigen::Matrix2d gbar;   // <phi_i, (g_D|D><D| + g_A|A><A|) phi_j>

    double gap() const noexcept { return e1 - e2; }
};

// H_S and the coupling operator G on the full site basis.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> build_hamiltonian(const SystemParams& params);

// Throws DegenerateEffectiveSystem when v == 0.
EffectiveSystem effective_reduction(const SystemParams& params);

struct ProjectionSet {
    int n_donor{0};
    int n_acceptor{0};
    Eigen::VectorXcd donor_uniform;     // |D>
    Eigen::VectorXcd acceptor_uniform;  // |A>
    std::array<Eigen::VectorXcd, 2> phi; // phi_1, phi_2 embedded in the site basis
    Eigen::MatrixXcd P_bar_S;
    Eigen::MatrixXcd P_Dperp;
    Eigen::MatrixXcd P_Aperp;
    Eigen::MatrixXcd xi_D;  // columns: orthonormal basis of Ran P_Dperp
    Eigen::MatrixXcd xi_A;

    // |phi_k><phi_l|, k,l in {1,2}
    Eigen::MatrixXcd P(int k, int l) const;
};

ProjectionSet build_projections(const SystemParams& params, const EffectiveSystem& eff);

// Populations of (phi_1, phi_2) in the effective Gibbs state; overflow-free for any beta > 0.
Eigen::Vector2d gibbs_weights(const EffectiveSystem& eff, double beta);

// 2x2 Gibbs density matrix in the (phi_1, phi_2) basis.
Eigen::Matrix2d gibbs_effective(const EffectiveSystem& eff, double beta);

// Gibbs state embedded in the full site basis.
Eigen::MatrixXcd gibbs_embedded(const ProjectionSet& proj, const EffectiveSystem& eff, double beta);

// ---------------------------------------------------------------------------
// DAState

struct DAState {
    int n_donor{1};
    int n_acceptor{1};
    Eigen::MatrixXcd rho;

    int dim() const noexcept { return n_donor + n_acceptor; }
};

inline constexpr double kTracePsdTolerance = 1e-9;
inline constexpr double kTraceTolerance = 1e-10;

// Rejects matrices that are not Hermitian, not trace one, or not positive within tol_psd.
DAState make_state(const Eigen::MatrixXcd& rho, int n_donor, int n_acceptor);

} // namespace datransfer
