#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "clqr/fgm.hpp"
#include "clqr/model.hpp"

// Command-line workbench: condition-number sweeps, preconditioner
// comparisons, single solves, and the benchmark table, all emitted as CSV.
// Every numeric cell is produced by composing the library operations; no
// arithmetic happens at this layer.

namespace clqr::cli {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    std::vector<std::string> systems;  // builtin names or model-file paths
    std::vector<int> horizons = {10};
    TerminalKind terminal = TerminalKind::DareSolution;
    bool terminal_set = false;  // explicit --terminal beats the per-command default
    bool prestabilize = false;
    bool precondition = false;  // --precondition strang
    double epsilon = 1e-5;
    std::uint64_t seed = 42;
    std::string out_path;
    bool identity_precond = false;  // debug: force L = I
    bool nonconforming = false;     // allow M with a terminal the analysis does not cover
    double ts = 0.02;               // ZOH step for continuous systems
};

/// "a..b" (inclusive), comma list, or a single integer.
std::vector<int> parse_horizons(const std::string& text);

/// Resolves a builtin name or model-file path and discretizes continuous
/// sources with the configured ZOH step.
ModelBundle resolve_system(const std::string& name_or_path, double ts);

/// Terminal policy the reference experiments use per configuration:
/// DARE when prestabilized or unstable, the Lyapunov solution for a
/// stable plant without prestabilization.
TerminalKind default_terminal(bool prestabilize, bool plant_stable);

/// CSV `N,cond_q,cond_p,cond_bound`. The bound column is empty for
/// unstable non-prestabilized systems (no convergent symbol).
std::string cmd_spectrum(const RunConfig& config);

/// CSV `N,cond_orig,cond_strang,bound_strang`.
std::string cmd_precondition(const RunConfig& config);

/// Human-readable report; trace CSV `k,grad_map_norm,objective` is
/// returned separately for the --out path.
struct SolveOutput {
    std::string report;
    std::string trace_csv;
};
SolveOutput cmd_solve(const RunConfig& config, const Vec& x_hat);

/// CSV `system,prestab,precond,kappa,median_iters,p90_iters` over every
/// (system, prestabilize, preconditioner) cell; cells whose preconditioner
/// is not computable read `N/A`. Systems that fail to load are skipped
/// with a warning collected into `warnings`.
struct BenchOutput {
    std::string csv;
    std::vector<std::string> warnings;
};
BenchOutput cmd_bench(const RunConfig& config);

}  // namespace clqr::cli
