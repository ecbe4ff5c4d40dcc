#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "clqr/cli.hpp"
#include "clqr/condense.hpp"
#include "clqr/precond.hpp"
#include "clqr/riccati.hpp"
#include "clqr/symbol.hpp"

namespace {

int kExitConfig = 2;
int kExitNumerical = 3;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw clqr::cli::ConfigError("cannot write output file: " + path);
    out << text;
}

clqr::Vec parse_x0(const std::string& text) {
    clqr::Vec x;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) x.push_back(std::stod(item));
    return x;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Condensed constrained-LQR workbench: block-Toeplitz spectral bounds, "
                 "horizon-independent preconditioning, and a projected fast gradient solver"};
    app.require_subcommand(1);

    clqr::cli::RunConfig config;
    std::string horizon_text = "10";
    std::string precond_text = "none";
    std::string terminal_text;
    std::string x0_text;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--system", config.systems, "builtin name or model file path");
        cmd->add_option("--n", horizon_text, "horizon list: 'a..b' or comma list");
        cmd->add_option("--terminal", terminal_text, "terminal policy: q, dare, or dlyap");
        cmd->add_flag("--prestabilize", config.prestabilize, "use the LQR-prestabilized system");
        cmd->add_option("--precondition", precond_text, "none or strang");
        cmd->add_option("--epsilon", config.epsilon, "FGM gradient-map tolerance");
        cmd->add_option("--seed", config.seed, "seed for random initial states");
        cmd->add_option("--out", config.out_path, "output path (default stdout)");
        cmd->add_option("--ts", config.ts, "ZOH sampling time for continuous systems");
        cmd->add_flag("--identity-precond", config.identity_precond,
                      "debug: use the identity preconditioner");
        cmd->add_flag("--nonconforming", config.nonconforming,
                      "allow the preconditioner with terminal policies its analysis does not "
                      "cover");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "condition numbers versus horizon");
    CLI::App* precondition =
        app.add_subcommand("precondition", "preconditioned condition numbers versus horizon");
    CLI::App* solve = app.add_subcommand("solve", "solve one CLQR instance with the FGM");
    CLI::App* bench = app.add_subcommand("bench", "condition/iteration table over all variants");
    for (CLI::App* cmd : {spectrum, precondition, solve, bench}) add_common(cmd);
    solve->add_option("--x0", x0_text, "initial state, comma separated");

    CLI11_PARSE(app, argc, argv);

    try {
        config.horizons = clqr::cli::parse_horizons(horizon_text);
        if (!terminal_text.empty()) {
            config.terminal_set = true;
            if (terminal_text == "q") config.terminal = clqr::TerminalKind::SameAsQ;
            else if (terminal_text == "dare") config.terminal = clqr::TerminalKind::DareSolution;
            else if (terminal_text == "dlyap") config.terminal = clqr::TerminalKind::DlyapSolution;
            else throw clqr::cli::ConfigError("unknown terminal policy '" + terminal_text + "'");
        }
        if (precond_text == "strang") config.precondition = true;
        else if (precond_text != "none")
            throw clqr::cli::ConfigError("unknown preconditioner '" + precond_text + "'");
        if (config.systems.empty() && !bench->parsed()) config.systems = {"schur-stable"};

        if (spectrum->parsed()) {
            write_output(config.out_path, clqr::cli::cmd_spectrum(config));
        } else if (precondition->parsed()) {
            write_output(config.out_path, clqr::cli::cmd_precondition(config));
        } else if (solve->parsed()) {
            const clqr::ModelBundle bundle =
                clqr::cli::resolve_system(config.systems.at(0), config.ts);
            clqr::Vec x0 = parse_x0(x0_text);
            if (x0.empty()) x0.assign(bundle.model.n(), 0.0);
            if (x0.size() != bundle.model.n())
                throw clqr::cli::ConfigError("--x0 must have " +
                                             std::to_string(bundle.model.n()) + " entries");
            const clqr::cli::SolveOutput out = clqr::cli::cmd_solve(config, x0);
            std::cout << out.report;
            if (!config.out_path.empty()) write_output(config.out_path, out.trace_csv);
        } else if (bench->parsed()) {
            const clqr::cli::BenchOutput out = clqr::cli::cmd_bench(config);
            for (const std::string& w : out.warnings) std::cerr << w << '\n';
            write_output(config.out_path, out.csv);
        }
    } catch (const clqr::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const clqr::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const clqr::UnknownName& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const clqr::DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        // Numerical failures: NoConvergence, NotPositiveDefinite, Singular,
        // SymbolUnavailable, InfeasibleProjection, ...
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
