// oracle.cpp — unitary, Redfield, independent-boson and truncated-bath references

#include "datransfer/oracle.hpp"
#include "datransfer/errors.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>

namespace datransfer {

namespace {
constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;
constexpr cplx kI(0.0, 1.0);
} // namespace

Eigen::MatrixXcd unitary_reference(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& rho0, double t) {
    if (H.rows() > 64) throw DimensionTooLarge("unitary reference limited to dimension 64");
    if (H.rows() != rho0.rows()) throw InvalidState("dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::MatrixXcd& U = es.eigenvectors();
    Eigen::VectorXcd ph(H.rows());
    for (Eigen::Index k = 0; k < H.rows(); ++k) ph(k) = std::exp(-kI * es.eigenvalues()(k) * t);
    const Eigen::MatrixXcd Ut = U * ph.asDiagonal() * U.adjoint();
    return Ut * rho0 * Ut.adjoint();
}

DAState unitary_reference(const SystemParams& params, const DAState& rho0, double t) {
    const auto [H, G] = build_hamiltonian(params);
    (void)G;
    return DAState{rho0.n_donor, rho0.n_acceptor, unitary_reference(H, rho0.rho, t)};
}

// ---------------------------------------------------------------------------

namespace {

// (x - sin x) / x^2
double phase_kernel(double x) {
    if (x < 1e-2) {
        const double x2 = x * x;
        return x * (1.0 / 6.0 - x2 / 120.0 + x2 * x2 / 5040.0);
    }
    return (x - std::sin(x)) / (x * x);
}

// (1 - cos x) / x^2
double decoherence_kernel(double x) {
    if (x == 0.0) return 0.5;
    const double s = std::sin(0.5 * x) / x;
    return 2.0 * s * s;
}

double oscillatory_integral(const SpectralModel& m, double t, const std::function<double(double)>& f) {
    const double L = m.upper_limit();
    QuadratureSettings q = m.quad;
    q.panels = std::max(q.panels, static_cast<int>(std::ceil(t * L / (2.0 * kPi))) + 1);
    const double c = std::min(m.knee(), L);
    QuadratureSettings qlow = m.quad;
    qlow.panels = std::max(qlow.panels, static_cast<int>(std::ceil(t * c / (2.0 * kPi))) + 1);
    return integrate_interval(f, 0.0, c, qlow).value + integrate_interval(f, c, L, q).value;
}

} // namespace

double boson_phase_integral(const SpectralModel& m, double t) {
    if (t < 0.0) throw NegativeTime("time must be >= 0");
    if (t == 0.0) return 0.0;
    return oscillatory_integral(m, t, [&](double w) {
        return (2.0 / kPi) * eval_J(m, w) * t * t * phase_kernel(w * t);
    });
}

double boson_decoherence_integral(const SpectralModel& m, double beta, double t) {
    if (t < 0.0) throw NegativeTime("time must be >= 0");
    if (t == 0.0) return 0.0;
    return oscillatory_integral(m, t, [&](double w) {
        return (2.0 / kPi) * thermal_J(m, beta, w) * t * t * decoherence_kernel(w * t);
    });
}

std::complex<double> independent_boson_factor(const SpectralModel& m, double beta, double lambda,
                                              double E_D, double E_A, double kD, double kA, double t) {
    if (t < 0.0) throw NegativeTime("time must be >= 0");
    const double l2 = lambda * lambda;
    const double phi = (kD * kD != kA * kA) ? boson_phase_integral(m, t) : 0.0;
    const double gam = (kD != kA) ? boson_decoherence_integral(m, beta, t) : 0.0;
    const double phase = (E_D - E_A) * t - l2 * (kD * kD - kA * kA) * phi;
    return std::exp(-l2 * (kD - kA) * (kD - kA) * gam) * cplx(std::cos(phase), std::sin(phase));
}

std::complex<double> independent_boson_factor(const TruncatedBath& bath, double lambda, double E_D,
                                              double E_A, double kD, double kA, double t) {
    if (t < 0.0) throw NegativeTime("time must be >= 0");
    double phi = 0.0;
    double gam = 0.0;
    for (int m = 0; m < bath.modes(); ++m) {
        const double w2 = 0.5 * bath.c[m] * bath.c[m] * t * t;
        phi += w2 * phase_kernel(bath.omega[m] * t);
        gam += w2 * decoherence_kernel(bath.omega[m] * t);
    }
    const double l2 = lambda * lambda;
    const double phase = (E_D - E_A) * t - l2 * (kD * kD - kA * kA) * phi;
    return std::exp(-l2 * (kD - kA) * (kD - kA) * gam) * cplx(std::cos(phase), std::sin(phase));
}

std::complex<double> independent_boson_coherence(const SystemParams& p, const SpectralModel& m, double t) {
    validate(p);
    return independent_boson_factor(m, p.beta, p.lambda, p.E_D, p.E_A, p.E_D, p.E_A, t);
}

// ---------------------------------------------------------------------------

double correlation_spectrum(const SpectralModel& m, double beta, double omega) {
    const bool zero_t = std::isinf(beta);
    if (omega == 0.0) return zero_t ? 0.0 : 4.0 * j_tilde_zero(m) / beta;
    const double w = std::abs(omega);
    const double n = zero_t ? 0.0 : 1.0 / std::expm1(beta * w);
    return omega > 0.0 ? 4.0 * eval_J(m, w) * (1.0 + n) : 4.0 * eval_J(m, w) * n;
}

RedfieldResult redfield_reference(const EffectiveSystem& eff, const SpectralModel& m, double beta,
                                  double lambda) {
    const Eigen::Vector2d E(eff.e1, eff.e2);
    const Eigen::Matrix2cd H = E.cast<cplx>().asDiagonal();
    const Eigen::Matrix2cd A = (lambda * eff.gbar).cast<cplx>();
    Eigen::Matrix2cd Lam;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) Lam(a, b) = A(a, b) * 0.5 * correlation_spectrum(m, beta, E(b) - E(a));
    }
    auto apply = [&](const Eigen::Matrix2cd& r) -> Eigen::Matrix2cd {
        return -kI * (H * r - r * H) - A * Lam * r + Lam * r * A + A * r * Lam.adjoint() -
               r * Lam.adjoint() * A;
    };

    RedfieldResult out;
    for (int col = 0; col < 4; ++col) {
        Eigen::Matrix2cd basis = Eigen::Matrix2cd::Zero();
        basis(col % 2, col / 2) = 1.0;
        const Eigen::Matrix2cd img = apply(basis);
        for (int row = 0; row < 4; ++row) out.generator(row, col) = img(row % 2, row / 2);
    }

    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(out.generator);
    int null_idx = 0;
    for (int k = 0; k < 4; ++k) {
        const cplx lam = es.eigenvalues()(k);
        out.eps.push_back(cplx(lam.imag(), -lam.real()));
        if (std::abs(lam) < std::abs(es.eigenvalues()(null_idx))) null_idx = k;
    }
    const Eigen::Vector4cd nv = es.eigenvectors().col(null_idx);
    out.stationary << nv(0), nv(2), nv(1), nv(3);
    out.stationary /= out.stationary.trace();

    const double gap = eff.gap();
    double best_coh = std::numeric_limits<double>::infinity();
    out.population_rate = 0.0;
    for (int k = 0; k < 4; ++k) {
        if (k == null_idx) continue;
        const cplx e = out.eps[k];
        if (std::abs(e.real()) < 0.5 * gap) out.population_rate = std::max(out.population_rate, e.imag());
        if (std::abs(e.real() - gap) < best_coh) {
            best_coh = std::abs(e.real() - gap);
            out.coherence = e;
        }
    }
    std::sort(out.eps.begin(), out.eps.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

// ---------------------------------------------------------------------------

long long TruncatedBath::dimension(int n_system) const {
    long long d = n_system;
    for (int m = 0; m < modes(); ++m) {
        d *= (n_max + 1);
        if (d > kMaxBathDimension * 16) return d;
    }
    return d;
}

TruncatedBath discretize_bath(const SpectralModel& m, int modes, int n_max) {
    if (modes < 0 || n_max < 0) throw InvalidParameters("mode count and n_max must be >= 0");
    TruncatedBath bath;
    bath.n_max = n_max;
    if (modes == 0) return bath;
    const double top = m.family == SpectralFamily::Tabulated ? m.upper_limit() : 10.0 * m.omega_c;
    auto J = [&](double w) { return eval_J(m, w); };
    auto wJ = [&](double w) { return w * eval_J(m, w); };
    const double total = integrate_interval(J, 0.0, top, m.quad).value;
    if (!(total > 0.0)) throw InvalidParameters("spectral density carries no weight on [0, 10 omega_c]");
    const double share = total / modes;
    double lo = 0.0;
    for (int k = 0; k < modes; ++k) {
        double hi = top;
        if (k + 1 < modes) {
            double a = lo;
            double b = top;
            for (int it = 0; it < 80 && b - a > 1e-14 * top; ++it) {
                const double mid = 0.5 * (a + b);
                if (integrate_interval(J, lo, mid, m.quad).value < share) a = mid; else b = mid;
            }
            hi = 0.5 * (a + b);
        }
        const double w = integrate_interval(J, lo, hi, m.quad).value;
        bath.omega.push_back(integrate_interval(wJ, lo, hi, m.quad).value / w);
        bath.c.push_back(std::sqrt(4.0 / kPi * w));
        lo = hi;
    }
    return bath;
}

std::vector<double> displaced_vacuum(const TruncatedBath& bath, double lambda, double g) {
    std::vector<double> a(bath.modes());
    for (int m = 0; m < bath.modes(); ++m) a[m] = -lambda * g * bath.c[m] / (std::sqrt(2.0) * bath.omega[m]);
    return a;
}

namespace {

struct BathSpace {
    int n_sys;
    int modes;
    int levels;
    long long B;
    long long dim;
};

Eigen::SparseMatrix<double> bath_hamiltonian(const SystemParams& p, const TruncatedBath& bath,
                                             const BathSpace& sp) {
    const auto [Hs, G] = build_hamiltonian(p);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<int> occ(sp.modes);
    std::vector<long long> stride(sp.modes);
    long long s = 1;
    for (int m = 0; m < sp.modes; ++m) {
        stride[m] = s;
        s *= sp.levels;
    }
    for (long long b = 0; b < sp.B; ++b) {
        long long r = b;
        double eb = 0.0;
        for (int m = 0; m < sp.modes; ++m) {
            occ[m] = static_cast<int>(r % sp.levels);
            r /= sp.levels;
            eb += bath.omega[m] * occ[m];
        }
        for (int i = 0; i < sp.n_sys; ++i) {
            const long long row = i * sp.B + b;
            for (int j = 0; j < sp.n_sys; ++j) {
                const double h = Hs(i, j).real() + (i == j ? eb : 0.0);
                if (h != 0.0) trip.emplace_back(row, j * sp.B + b, h);
            }
            const double gi = p.lambda * G(i, i).real() / std::sqrt(2.0);
            if (gi == 0.0) continue;
            for (int m = 0; m < sp.modes; ++m) {
                if (occ[m] + 1 < sp.levels) {
                    const long long col = row + stride[m];
                    const double v = gi * bath.c[m] * std::sqrt(occ[m] + 1.0);
                    trip.emplace_back(row, col, v);
                    trip.emplace_back(col, row, v);
                }
            }
        }
    }
    Eigen::SparseMatrix<double> H(sp.dim, sp.dim);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

Eigen::VectorXcd bath_state(const BathSpace& sp, const std::vector<double>& amp) {
    std::vector<Eigen::VectorXd> per(sp.modes, Eigen::VectorXd::Zero(sp.levels));
    for (int m = 0; m < sp.modes; ++m) {
        const double a = amp.empty() ? 0.0 : amp[m];
        double coef = 1.0;
        for (int n = 0; n < sp.levels; ++n) {
            per[m](n) = coef;
            coef *= a / std::sqrt(n + 1.0);
        }
        per[m].normalize();
    }
    Eigen::VectorXcd out(sp.B);
    for (long long b = 0; b < sp.B; ++b) {
        long long r = b;
        double v = 1.0;
        for (int m = 0; m < sp.modes; ++m) {
            v *= per[m](static_cast<int>(r % sp.levels));
            r /= sp.levels;
        }
        out(b) = v;
    }
    return out;
}

Eigen::MatrixXcd reduce(const Eigen::VectorXcd& psi, const BathSpace& sp) {
    Eigen::Map<const Eigen::MatrixXcd> M(psi.data(), sp.B, sp.n_sys);
    return M.transpose() * M.conjugate();
}

// exp(-i H dt) psi on a Krylov subspace, substeps bounded by ||H|| h <= 5.
void lanczos_step(const Eigen::SparseMatrix<double>& H, double hnorm, Eigen::VectorXcd& psi, double dt) {
    const int mmax = static_cast<int>(std::min<long long>(30, H.rows()));
    const double hmax = 5.0 / std::max(hnorm, 1e-300);
    double remaining = dt;
    while (remaining > 0.0) {
        const double h = std::min(remaining, hmax);
        const double nrm = psi.norm();
        if (nrm == 0.0) return;
        std::vector<Eigen::VectorXcd> V;
        V.push_back(psi / nrm);
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(mmax);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(mmax);
        int m = 0;
        for (; m < mmax; ++m) {
            Eigen::VectorXcd w = H * V[m];
            alpha(m) = V[m].dot(w).real();
            w -= alpha(m) * V[m];
            if (m > 0) w -= beta(m - 1) * V[m - 1];
            for (const auto& v : V) w -= v * v.dot(w);  // full reorthogonalization
            const double b = w.norm();
            if (m + 1 == mmax || b < 1e-13) {
                ++m;
                break;
            }
            beta(m) = b;
            V.push_back(w / b);
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha(i);
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        Eigen::VectorXcd coef = Eigen::VectorXcd::Zero(m);
        for (int k = 0; k < m; ++k) {
            coef += es.eigenvectors().col(k).cast<cplx>() *
                    (std::exp(-kI * es.eigenvalues()(k) * h) * es.eigenvectors()(0, k));
        }
        psi.setZero();
        for (int k = 0; k < m; ++k) psi += coef(k) * V[k];
        psi *= nrm;
        remaining -= h;
    }
}

} // namespace

BathTrajectory truncated_bath_evolution(const SystemParams& p, const TruncatedBath& bath,
                                        const DAState& rho0, const std::vector<double>& grid,
                                        const std::vector<double>& amp) {
    validate(p);
    BathSpace sp{p.dim(), bath.modes(), bath.n_max + 1, 1, 0};
    const long long dim = bath.dimension(p.dim());
    if (dim > kMaxBathDimension) throw DimensionTooLarge("truncated bath dimension exceeds 1e5");
    sp.B = dim / p.dim();
    sp.dim = dim;
    if (!amp.empty() && static_cast<int>(amp.size()) != bath.modes()) {
        throw InvalidParameters("bath amplitude count differs from mode count");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0 || (i > 0 && grid[i] < grid[i - 1])) {
            throw NegativeTime("time grid must be non-negative and non-decreasing");
        }
    }

    const Eigen::SparseMatrix<double> H = bath_hamiltonian(p, bath, sp);
    const Eigen::VectorXcd chi = bath_state(sp, amp);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rs(rho0.rho);
    std::vector<std::pair<double, Eigen::VectorXcd>> comps;
    for (int k = 0; k < p.dim(); ++k) {
        const double w = rs.eigenvalues()(k);
        if (w <= 1e-14) continue;
        Eigen::VectorXcd psi(sp.dim);
        for (int s = 0; s < p.dim(); ++s) psi.segment(s * sp.B, sp.B) = rs.eigenvectors()(s, k) * chi;
        comps.emplace_back(w, psi);
    }

    BathTrajectory out;
    out.t = grid;
    out.rho.assign(grid.size(), Eigen::MatrixXcd::Zero(p.dim(), p.dim()));

    const bool dense = sp.dim <= 2000;
    Eigen::MatrixXd U;
    Eigen::VectorXd evals;
    double hnorm = 0.0;
    if (dense) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(H)};
        U = es.eigenvectors();
        evals = es.eigenvalues();
    } else {
        for (int k = 0; k < H.outerSize(); ++k) {
            double row = 0.0;
            for (Eigen::SparseMatrix<double>::InnerIterator it(H, k); it; ++it) row += std::abs(it.value());
            hnorm = std::max(hnorm, row);
        }
    }

    for (const auto& [w, psi0] : comps) {
        const double n0 = psi0.squaredNorm();
        if (dense) {
            const Eigen::VectorXcd c0 = U.transpose().cast<cplx>() * psi0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                Eigen::VectorXcd c = c0;
                for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * evals(k) * grid[i]);
                const Eigen::VectorXcd psi = U.cast<cplx>() * c;
                out.max_norm_error = std::max(out.max_norm_error, std::abs(psi.squaredNorm() - n0));
                out.rho[i] += w * reduce(psi, sp);
            }
        } else {
            Eigen::VectorXcd psi = psi0;
            double tcur = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                lanczos_step(H, hnorm, psi, grid[i] - tcur);
                tcur = grid[i];
                out.max_norm_error = std::max(out.max_norm_error, std::abs(psi.squaredNorm() - n0));
                out.rho[i] += w * reduce(psi, sp);
            }
        }
    }
    for (const auto& r : out.rho) out.p_D.push_back(r.topLeftCorner(p.N_D, p.N_D).trace().real());
    return out;
}

double stationarity_check(const SystemParams& p, const TruncatedBath& bath, const Eigen::VectorXcd& psi,
                          const std::vector<double>& grid) {
    validate(p);
    if (psi.size() != p.dim()) throw InvalidState("psi has wrong dimension");
    const double nrm = psi.norm();
    if (std::abs(nrm - 1.0) > 1e-10) throw InvalidState("psi must be normalized");
    const double donor_weight = psi.head(p.N_D).norm();
    const double acceptor_weight = psi.tail(p.N_A).norm();
    double g = 0.0;
    if (acceptor_weight < 1e-14) {
        g = p.g_D;
    } else if (donor_weight < 1e-14) {
        g = p.g_A;
    } else {
        throw InvalidState("psi must be supported on the donor block or the acceptor block");
    }
    const Eigen::MatrixXcd target = psi * psi.adjoint();
    const DAState rho0{p.N_D, p.N_A, target};
    const BathTrajectory tr = truncated_bath_evolution(p, bath, rho0, grid, displaced_vacuum(bath, p.lambda, g));
    double res = 0.0;
    for (const auto& r : tr.rho) res = std::max(res, (r - target).norm());
    return res;
}

// ---------------------------------------------------------------------------

OracleCheck make_check(std::string name, double predicted, double reference, double abs_tol, double rel_tol) {
    OracleCheck c;
    c.check_name = std::move(name);
    c.predicted = predicted;
    c.reference = reference;
    c.abs_err = std::abs(predicted - reference);
    c.rel_err = reference != 0.0 ? c.abs_err / std::abs(reference) : (c.abs_err == 0.0 ? 0.0 : INFINITY);
    c.pass = std::isfinite(c.abs_err) && (c.abs_err <= abs_tol || c.rel_err <= rel_tol);
    return c;
}

} // namespace datransfer
