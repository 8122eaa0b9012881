// scenario.hpp — scenario files and the evolve / sweep / resonances / validate drivers

#pragma once

#include "datransfer/observables.hpp"
#include "datransfer/oracle.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace datransfer {

enum class InitialKind { UniformD, Incoherent, Coherent, Explicit };
enum class GridSpacing { Linear, Log };
enum class SweepAxis { Eta, Beta, ND, Lambda, P };

struct TimeGrid {
    double t_max{10.0};
    int points{101};
    GridSpacing spacing{GridSpacing::Linear};
    double t_min{0.0};  // first nonzero point of a log grid; 0 means t_max * 1e-3

    // Linear grids start at 0; log grids are 0 followed by points - 1 log-spaced values.
    std::vector<double> values() const;
};

// One element <a, rho b> of the output; labels are D<k>, A<k>, D, A, phi1, phi2.
struct ElementSpec {
    std::string bra;
    std::string ket;
};

struct SweepSpec {
    SweepAxis axis{SweepAxis::Eta};
    std::vector<double> values;
};

struct ValidateSpec {
    double unitary_tolerance{1e-9};
    int random_cases{20};
    double rate_tolerance{0.05};
};

struct Scenario {
    SystemParams params;
    SpectralModel spectral;
    InitialKind initial{InitialKind::UniformD};
    std::vector<double> p;                 // incoherent / coherent distributions
    std::filesystem::path rho_file;        // explicit initial state
    TimeGrid time;
    std::vector<ElementSpec> elements{{"D1", "D1"}, {"phi1", "phi2"}};
    std::optional<SweepSpec> sweep;
    ValidateSpec validate;
    std::filesystem::path source;
};

// Throws ConfigError (with field and line) for syntax errors, unknown keys and invalid values.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = ".");

// "N_D N_A" header followed by "row col re im" lines (0-based indices). Throws ConfigError.
DAState load_density_matrix(const std::filesystem::path& path);

DAState initial_state(const Scenario& sc);

// "%.16e" formatting: 17 significant digits, round-trip safe.
std::string format_double(double x);

struct RunOptions {
    std::filesystem::path out_dir{"."};
    int workers{1};
    std::uint64_t seed{12345};
};

// Worker count: explicit flag, else DATRANSFER_WORKERS, else hardware concurrency.
int resolve_workers(std::optional<int> flag);

// Each driver writes its files into opts.out_dir and returns the written paths.
std::vector<std::filesystem::path> run_evolve(const Scenario& sc, const RunOptions& opts);
std::vector<std::filesystem::path> run_sweep(const Scenario& sc, const RunOptions& opts);
std::vector<std::filesystem::path> run_resonances(const Scenario& sc, const RunOptions& opts);

struct ValidationReport {
    std::vector<OracleCheck> checks;
    bool shifts_available{true};
    bool all_pass() const;
};

ValidationReport validate_scenario(const Scenario& sc, const RunOptions& opts);
// Writes validation.json; the caller maps all_pass() == false to a failing exit code.
ValidationReport run_validate(const Scenario& sc, const RunOptions& opts);

} // namespace datransfer
