// datransfer_cli.cpp — command-line frontend: evolve, sweep, resonances, validate

#include "datransfer/errors.hpp"
#include "datransfer/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalFailure = 2, kValidationFailure = 3 };

struct Common {
    std::string config;
    std::string out{"."};
    std::optional<int> workers;
    std::uint64_t seed{12345};
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "scenario file")->required();
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--workers", c.workers, "worker threads (default: $DATRANSFER_WORKERS or all cores)");
    cmd->add_option("--seed", c.seed, "seed for randomized validation cases");
}

} // namespace

int main(int argc, char** argv) {
    using namespace datransfer;
    CLI::App app{"Donor-acceptor transfer dynamics in the weak-coupling resonance approximation"};
    app.require_subcommand(1);
    Common common;
    auto* evolve = app.add_subcommand("evolve", "time evolution of the reduced density matrix");
    auto* sweep = app.add_subcommand("sweep", "asymptotic efficiencies along a parameter axis");
    auto* resonances = app.add_subcommand("resonances", "resonance energies and rate components");
    auto* validate = app.add_subcommand("validate", "run the oracle validation suite");
    for (auto* cmd : {evolve, sweep, resonances, validate}) add_common(cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        const Scenario sc = load_scenario(common.config);
        RunOptions opts;
        opts.out_dir = common.out;
        opts.workers = resolve_workers(common.workers);
        opts.seed = common.seed;

        if (evolve->parsed()) {
            for (const auto& p : run_evolve(sc, opts)) std::cout << p.string() << "\n";
        } else if (sweep->parsed()) {
            for (const auto& p : run_sweep(sc, opts)) std::cout << p.string() << "\n";
        } else if (resonances->parsed()) {
            for (const auto& p : run_resonances(sc, opts)) std::cout << p.string() << "\n";
        } else {
            const ValidationReport rep = run_validate(sc, opts);
            for (const auto& c : rep.checks) {
                std::cout << (c.pass ? "PASS " : "FAIL ") << c.check_name << "  predicted=" << format_double(c.predicted)
                          << " reference=" << format_double(c.reference) << "\n";
            }
            if (!rep.shifts_available) std::cout << "note: Lamb shifts unavailable (infrared-divergent mu)\n";
            if (!rep.all_pass()) return kValidationFailure;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kOk;
}
