// test_resonances.cpp — resonance table structure, scaling laws and rate cross-checks

#include "datransfer/errors.hpp"
#include "datransfer/oracle.hpp"
#include "datransfer/resonances.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace datransfer;

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kInf = std::numeric_limits<double>::infinity();

SystemParams dimer() {
    SystemParams p;
    p.E_D = 1.0;
    p.E_A = -1.0;
    p.V = 0.5;
    p.g_D = 1.0;
    p.g_A = -1.0;
    p.beta = 1.0;
    p.lambda = 0.1;
    return p;
}

ResonanceSet resonances(const SystemParams& p, const SpectralModel& m) {
    return compute_resonances(p, effective_reduction(p), m);
}

double max_entry_diff(const ResonanceSet& a, const ResonanceSet& b) {
    double d = 0.0;
    for (int j = 1; j <= 4; ++j) {
        for (int s = 1; s <= 4; ++s) d = std::max(d, std::abs(a(j, s) - b(j, s)));
    }
    return d;
}

} // namespace

TEST_CASE("zero coupling leaves the bare Bohr frequencies") {
    SystemParams p = dimer();
    p.lambda = 0.0;
    const auto eff = effective_reduction(p);
    const auto r = compute_resonances(p, eff, SpectralModel::ohmic(0.5, 10.0));
    CHECK(r(1, 2) == cplx(0.0));
    CHECK(r(1, 3) == cplx(eff.gap()));
    CHECK(r(2, 1) == cplx(eff.e1 - p.E_D));
    CHECK(r(4, 3) == cplx(p.E_D - p.E_A));
    for (const auto& e : r.entries()) CHECK(e.value.imag() == 0.0);
}

TEST_CASE("exact zeros and conjugation symmetries") {
    std::mt19937_64 rng(5);
    const auto m = SpectralModel::super_ohmic(0.3, 5.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const SystemParams p = testsupport::random_params(rng);
        const auto r = resonances(p, m);
        CHECK(r(1, 1) == cplx(0.0));
        CHECK(r(4, 1) == cplx(0.0));
        CHECK(r(4, 2) == cplx(0.0));
        for (int s = 1; s <= 4; ++s) CHECK(r(3, s) == -std::conj(r(2, s)));
        CHECK(r(1, 4) == -std::conj(r(1, 3)));
        CHECK(r(4, 4) == -std::conj(r(4, 3)));
        CHECK(r(4, 3).imag() == 0.0);
        for (const auto& e : r.entries()) CHECK(e.value.imag() >= 0.0);
    }
    CHECK_THROWS_AS(resonances(dimer(), m)(0, 1), IndexOutOfRange);
    CHECK_THROWS_AS(resonances(dimer(), m)(1, 5), IndexOutOfRange);
}

TEST_CASE("equal site couplings give a pure dephasing coherence rate") {
    SystemParams p = dimer();
    p.g_A = p.g_D = 0.8;
    const auto m = SpectralModel::ohmic(0.5, 10.0);
    const auto eff = effective_reduction(p);
    const auto r = compute_resonances(p, eff, m);
    CHECK(std::abs(eff.gbar(0, 1)) < 1e-15);
    const double expected = p.lambda * p.lambda * (2.0 / p.beta) *
                            (eff.gbar(0, 0) * eff.gbar(0, 0) + eff.gbar(1, 1) * eff.gbar(1, 1)) * 0.5;
    CHECK(r(1, 3).imag() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("population rate identity with gamma_0") {
    std::mt19937_64 rng(17);
    for (const auto& m : {SpectralModel::ohmic(0.4, 8.0), SpectralModel::super_ohmic(0.2, 3.0, 2.5)}) {
        for (int trial = 0; trial < 50; ++trial) {
            const SystemParams p = testsupport::random_params(rng);
            const auto eff = effective_reduction(p);
            const double a = compute_resonances(p, eff, m)(1, 2).imag();
            const double b = population_relaxation_rate(p, eff, m);
            CHECK(std::abs(a - b) <= 1e-12 * std::abs(b) + 1e-300);
        }
    }
}

TEST_CASE("rates scale exactly as lambda^2") {
    std::mt19937_64 rng(23);
    const auto m = SpectralModel::ohmic(0.4, 8.0);
    for (int trial = 0; trial < 20; ++trial) {
        SystemParams p = testsupport::random_params(rng);
        const auto r1 = resonances(p, m);
        p.lambda *= 2.0;
        const auto r2 = resonances(p, m);
        for (int j = 1; j <= 4; ++j) {
            for (int s = 1; s <= 4; ++s) {
                CHECK(r2(j, s).imag() == doctest::Approx(4.0 * r1(j, s).imag()).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("resonances depend on N_D, N_A only through v") {
    SystemParams a = dimer();
    a.N_D = 1;
    a.N_A = 1;
    a.V = 0.6;
    SystemParams b = a;
    b.N_D = 4;
    b.N_A = 9;
    b.V = 0.6 / 6.0;
    const auto m = SpectralModel::super_ohmic(0.5, 10.0, 3.0);
    CHECK(max_entry_diff(resonances(a, m), resonances(b, m)) <= 1e-14);
}

TEST_CASE("multiplicities") {
    SystemParams p = dimer();
    p.N_D = 3;
    p.N_A = 5;
    const auto r = resonances(p, SpectralModel::super_ohmic(0.5, 10.0, 3.0));
    CHECK(r.multiplicity[0] == std::array<long, 4>{1, 1, 1, 1});
    CHECK(r.multiplicity[1] == std::array<long, 4>{2, 2, 4, 4});
    CHECK(r.multiplicity[3] == std::array<long, 4>{4, 16, 8, 8});
    // With a single donor and acceptor only the effective sector is populated.
    const auto r1 = resonances(dimer(), SpectralModel::super_ohmic(0.5, 10.0, 3.0));
    CHECK(r1.gamma_min() == doctest::Approx(r1(1, 3).imag()));
}

TEST_CASE("Lamb shifts are unavailable for ohmic baths at finite temperature") {
    const auto r = resonances(dimer(), SpectralModel::ohmic(0.5, 10.0));
    CHECK_FALSE(r.shifts_available);
    CHECK(std::isnan(r.components.mu));
    CHECK(r(1, 2).imag() > 0.0);
    CHECK(r(1, 3).real() == doctest::Approx(effective_reduction(dimer()).gap()));
    for (const auto& e : r.entries()) {
        const bool mu_dependent = (e.sector == 1 || e.sector == 4) ? e.index >= 3 : true;
        CHECK(e.regularized == mu_dependent);
    }
    auto cut = SpectralModel::ohmic(0.5, 10.0);
    cut.ir_cutoff = 1e-4;
    const auto rc = resonances(dimer(), cut);
    CHECK(rc.shifts_available);
    CHECK(rc.regularized[0][2]);
    // Zero temperature: mu converges, no flag.
    SystemParams cold = dimer();
    cold.beta = kInf;
    const auto r0 = resonances(cold, SpectralModel::ohmic(0.5, 10.0));
    CHECK(r0.shifts_available);
    CHECK_FALSE(r0.regularized[0][2]);
}

TEST_CASE("resonance table from independent quadrature of each term") {
    // Dimer, super-ohmic bath: every integral converges without a cutoff.
    SystemParams p = dimer();
    const auto m = SpectralModel::super_ohmic(0.5, 10.0, 3.0);
    const auto eff = effective_reduction(p);
    const auto r = compute_resonances(p, eff, m);
    const double gap = eff.gap();
    const double l2 = p.lambda * p.lambda;
    const double beta = p.beta;
    auto J = [&](double w) { return 0.5 * w * w * w / 100.0 * std::exp(-w / 10.0); };
    auto coth = [](double x) { return 1.0 / std::tanh(x); };
    const double mu = 2.0 / kPi * testsupport::simpson([&](double w) {
        return w == 0.0 ? 0.0 : J(w) / w * coth(0.5 * beta * w);
    }, 0.0, 400.0, 400000);
    const double bmu = 2.0 / kPi * testsupport::simpson([&](double w) {
        return w == 0.0 ? 0.0 : std::exp(-beta * w) * J(w) / w * coth(0.5 * beta * w);
    }, 0.0, 400.0, 400000);
    auto f = [&](double w) { return w == 0.0 ? 0.0 : J(w) * coth(0.5 * beta * w); };
    const double pv = testsupport::pv_reference(f, 0.0, 400.0, gap, 400000) -
                      testsupport::simpson([&](double w) { return f(w) / (w + gap); }, 0.0, 400.0, 400000);
    const double G11 = std::pow(eff.gbar(0, 0), 2);
    const double G22 = std::pow(eff.gbar(1, 1), 2);
    const double G12 = std::pow(eff.gbar(0, 1), 2);
    const double x12 = (G22 - G11) * mu - G12 * bmu - 2.0 / kPi * G12 * pv;
    const double y12 = 2.0 * G12 * coth(0.5 * beta * gap) * J(gap);
    CHECK(r(1, 3).real() == doctest::Approx(gap + l2 * x12).epsilon(1e-10));
    CHECK(r(1, 3).imag() == doctest::Approx(l2 * y12).epsilon(1e-12));
    CHECK(r(4, 3).real() == doctest::Approx(p.E_D - p.E_A - l2 * (p.E_D * p.E_D - p.E_A * p.E_A) * mu).epsilon(1e-10));
    const double n = 1.0 / std::expm1(beta * gap);
    CHECK(r(2, 1).imag() == doctest::Approx(2.0 * l2 * G12 * J(gap) * (1.0 + n)).epsilon(1e-12));
    CHECK(r(2, 2).imag() == doctest::Approx(2.0 * l2 * G12 * J(gap) * n).epsilon(1e-12));
    CHECK(r(2, 1).real() == doctest::Approx(eff.e1 - p.E_D + l2 * (p.g_D * p.g_D - G11) * mu).epsilon(1e-10));
    // Detailed balance inside the second sector.
    CHECK((r(2, 1).imag() + r(2, 2).imag()) ==
          doctest::Approx(2.0 * l2 * G12 * J(gap) * coth(0.5 * beta * gap)).epsilon(1e-12));
}

TEST_CASE("Redfield rates agree when J~(0) vanishes") {
    const auto m = SpectralModel::super_ohmic(0.5, 10.0, 3.0);
    for (double beta : {0.5, 2.0, 20.0}) {
        SystemParams p = dimer();
        p.beta = beta;
        p.lambda = 0.05;
        const auto eff = effective_reduction(p);
        const auto r = compute_resonances(p, eff, m);
        const auto rf = redfield_reference(eff, m, p.beta, p.lambda);
        CHECK(rf.population_rate == doctest::Approx(r(1, 2).imag()).epsilon(1e-6));
        CHECK(rf.coherence.imag() == doctest::Approx(r(1, 3).imag()).epsilon(1e-6));
    }
}

TEST_CASE("Redfield population rate omits the zero-frequency dephasing term") {
    // Documented disagreement: for ohmic J the (8/beta) J~(0) part of gamma_0 has no Redfield counterpart.
    SystemParams p = dimer();
    p.lambda = 0.05;
    const auto m = SpectralModel::ohmic(0.5, 10.0);
    const auto eff = effective_reduction(p);
    const auto r = compute_resonances(p, eff, m);
    const auto rf = redfield_reference(eff, m, p.beta, p.lambda);
    const double G12 = std::pow(eff.gbar(0, 1), 2);
    const double golden = 4.0 * p.lambda * p.lambda * G12 * thermal_coth(p.beta, eff.gap()) * eval_J(m, eff.gap());
    CHECK(rf.population_rate == doctest::Approx(golden).epsilon(1e-6));
    CHECK(r(1, 2).imag() > rf.population_rate);
}
