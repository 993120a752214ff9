#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fedecay/config.hpp"
#include "fedecay/errors.hpp"
#include "fedecay/experiments.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<double> tol;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", flags.out_dir, "Output directory (overrides the config)");
    cmd->add_option("--tol", flags.tol, "Solver tolerance (overrides the config)");
    cmd->add_option("--threads", flags.threads, "Concurrent sweep cells (overrides the config)");
}

int run(fedecay::ExperimentKind kind, const CommonFlags& flags) {
    fedecay::ExperimentConfig config = fedecay::parse_config_file(flags.config_path);
    if (config.kind != kind)
        throw fedecay::ConfigError(std::string("config kind '") + to_string(config.kind) +
                                   "' does not match the subcommand '" + to_string(kind) + "'");
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (flags.tol) config.tol = *flags.tol;
    if (flags.threads) config.threads = *flags.threads;
    fedecay::validate_config(config);
    fedecay::run_experiment(config, std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D finite element energy-decay and Schwarz experiment runner"};
    app.require_subcommand(1);

    const std::pair<const char*, fedecay::ExperimentKind> kinds[] = {
        {"decay", fedecay::ExperimentKind::Decay},
        {"refine-sweep", fedecay::ExperimentKind::RefineSweep},
        {"schwarz", fedecay::ExperimentKind::Schwarz},
        {"convergence", fedecay::ExperimentKind::Convergence},
        {"mesh-info", fedecay::ExperimentKind::MeshInfo},
    };

    CommonFlags flags;
    for (const auto& [name, kind] : kinds) {
        (void)kind;
        add_common(app.add_subcommand(name, std::string("Run the ") + name + " experiment"),
                   flags);
    }

    try {
        app.parse(argc, argv);
        for (const auto& [name, kind] : kinds)
            if (app.get_subcommand(name)->parsed()) return run(kind, flags);
        return 2;  // unreachable with require_subcommand(1)
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help exits 0, usage errors are config errors
    } catch (const fedecay::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fedecay::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const fedecay::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
