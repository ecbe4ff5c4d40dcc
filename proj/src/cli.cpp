#include "clqr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>

#include "clqr/condense.hpp"
#include "clqr/precond.hpp"
#include "clqr/riccati.hpp"
#include "clqr/symbol.hpp"

namespace clqr::cli {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

double kappa_of(const Mat& H) {
    const matkit::EigResult eig = matkit::sym_eig(H);
    return eig.values.back() / eig.values.front();
}

ClqrSpec with_terminal(ClqrSpec spec, TerminalKind kind, int N) {
    spec.terminal.kind = kind;
    spec.N = N;
    return spec;
}

// Deterministic PRNG for the benchmark draws; independent of the standard
// library's distribution implementations so the CSV is stable everywhere.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        state += 0x9E3779B97f4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

Vec sphere_point(SplitMix64& rng, std::size_t n, double radius) {
    Vec x(n);
    double norm = 0.0;
    do {
        for (std::size_t i = 0; i < n; ++i) x[i] = rng.normal();
        norm = matkit::norm2(x);
    } while (norm < 1e-12);
    for (std::size_t i = 0; i < n; ++i) x[i] *= radius / norm;
    return x;
}

FgmSettings settings_for(const CondensedQp& qp, double epsilon) {
    FgmSettings s;
    s.epsilon = epsilon;
    s.projection = extract_box(qp) ? ProjectionKind::Box : ProjectionKind::PolytopeDual;
    return s;
}

void require_conforming(const RunConfig& config, TerminalKind kind) {
    TerminalPolicy policy;
    policy.kind = kind;
    if (!config.nonconforming && !config.identity_precond &&
        !preconditioner_conforming(policy, config.prestabilize))
        throw ConfigError(
            "preconditioner analysis assumes terminal=dare (prestabilized) or terminal=dlyap "
            "(stable, non-prestabilized); pass --nonconforming to override");
}

const std::string& single_system(const RunConfig& config) {
    if (config.systems.size() != 1)
        throw ConfigError("this command needs exactly one --system");
    return config.systems.front();
}

}  // namespace

std::vector<int> parse_horizons(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int a = std::stoi(text.substr(0, dots));
        const int b = std::stoi(text.substr(dots + 2));
        if (a < 1 || b < a) throw ConfigError("bad horizon range '" + text + "'");
        for (int v = a; v <= b; ++v) out.push_back(v);
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        const int v = std::stoi(item);
        if (v < 1) throw ConfigError("horizon entries must be >= 1");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty horizon list");
    return out;
}

ModelBundle resolve_system(const std::string& name_or_path, double ts) {
    ModelBundle bundle;
    const bool looks_like_path = name_or_path.find('/') != std::string::npos ||
                                 name_or_path.find('.') != std::string::npos;
    if (looks_like_path)
        bundle = load_model(name_or_path);
    else
        bundle = builtin_system(name_or_path);
    if (bundle.model.time_domain == TimeDomain::Continuous) {
        const double step = ts > 0.0 ? ts : bundle.default_ts;
        bundle.model = zoh_discretize(bundle.model, step);
    }
    return bundle;
}

TerminalKind default_terminal(bool prestabilize, bool plant_stable) {
    if (prestabilize) return TerminalKind::DareSolution;
    return plant_stable ? TerminalKind::DlyapSolution : TerminalKind::DareSolution;
}

std::string cmd_spectrum(const RunConfig& config) {
    const ModelBundle bundle = resolve_system(single_system(config), config.ts);
    const bool stable = check_schur_stability(bundle.model.A).stable();
    const TerminalKind p_kind =
        config.terminal_set ? config.terminal : default_terminal(config.prestabilize, stable);

    // The bound is horizon-independent; compute it once from an N=1 condense.
    bool have_bound = true;
    double bound = 0.0;
    try {
        const CondensedQp probe =
            condense(bundle.model, with_terminal(bundle.spec, p_kind, 1), config.prestabilize);
        bound = symbol_bounds(hessian_symbol(probe)).kappa;
    } catch (const SymbolUnavailable&) {
        have_bound = false;
    } catch (const NotStable&) {
        have_bound = false;
    }

    struct Row {
        double cond_q, cond_p;
    };
    std::vector<Row> rows(config.horizons.size());
    std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(config.horizons.size()); ++i) {
        try {
            const int N = config.horizons[static_cast<std::size_t>(i)];
            const CondensedQp qp_q = condense(
                bundle.model, with_terminal(bundle.spec, TerminalKind::SameAsQ, N),
                config.prestabilize);
            const CondensedQp qp_p =
                condense(bundle.model, with_terminal(bundle.spec, p_kind, N), config.prestabilize);
            rows[static_cast<std::size_t>(i)] = {kappa_of(qp_q.H), kappa_of(qp_p.H)};
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::ostringstream out;
    out << "N,cond_q,cond_p,cond_bound\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << config.horizons[i] << ',' << fmt(rows[i].cond_q) << ',' << fmt(rows[i].cond_p)
            << ',';
        if (have_bound) out << fmt(bound);
        out << '\n';
    }
    return out.str();
}

std::string cmd_precondition(const RunConfig& config) {
    const ModelBundle bundle = resolve_system(single_system(config), config.ts);
    const bool stable = check_schur_stability(bundle.model.A).stable();
    const TerminalKind kind =
        config.terminal_set ? config.terminal : default_terminal(config.prestabilize, stable);

    // Computability first (an unstable non-prestabilized plant is a
    // numerical failure), then the analysis-validity gate.
    const BlockPreconditioner pc =
        config.identity_precond
            ? BlockPreconditioner::identity(bundle.model.m())
            : build_preconditioner(bundle.model, bundle.spec, config.prestabilize);
    require_conforming(config, kind);

    const CondensedQp probe =
        condense(bundle.model, with_terminal(bundle.spec, kind, 1), config.prestabilize);
    const double bound = symbol_bounds(preconditioned_symbol(hessian_symbol(probe), pc)).kappa;

    struct Row {
        double cond_orig, cond_strang;
    };
    std::vector<Row> rows(config.horizons.size());
    std::exception_ptr failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(config.horizons.size()); ++i) {
        try {
            const int N = config.horizons[static_cast<std::size_t>(i)];
            const CondensedQp qp =
                condense(bundle.model, with_terminal(bundle.spec, kind, N), config.prestabilize);
            rows[static_cast<std::size_t>(i)] = {kappa_of(qp.H), kappa_of(apply_to_qp(qp, pc).H)};
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::ostringstream out;
    out << "N,cond_orig,cond_strang,bound_strang\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        out << config.horizons[i] << ',' << fmt(rows[i].cond_orig) << ','
            << fmt(rows[i].cond_strang) << ',' << fmt(bound) << '\n';
    return out.str();
}

SolveOutput cmd_solve(const RunConfig& config, const Vec& x_hat) {
    const ModelBundle bundle = resolve_system(single_system(config), config.ts);
    const bool stable = check_schur_stability(bundle.model.A).stable();
    const TerminalKind kind =
        config.terminal_set ? config.terminal : default_terminal(config.prestabilize, stable);

    CondensedQp qp = condense(bundle.model, with_terminal(bundle.spec, kind, config.horizons[0]),
                              config.prestabilize);
    if (config.precondition || config.identity_precond) {
        const BlockPreconditioner pc =
            config.identity_precond
                ? BlockPreconditioner::identity(bundle.model.m())
                : build_preconditioner(bundle.model, bundle.spec, config.prestabilize);
        require_conforming(config, kind);
        qp = apply_to_qp(qp, pc);
    }

    FgmSettings settings = settings_for(qp, config.epsilon);
    settings.record_trace = !config.out_path.empty();
    const FgmReport report = solve_fgm(qp, x_hat, settings);

    SolveOutput out;
    std::ostringstream text;
    text << "status: " << (report.status == FgmStatus::Converged ? "Converged" : "IterCap")
         << '\n'
         << "iterations: " << report.iterations << '\n'
         << "grad_map_norm: " << report.grad_map_norm << '\n'
         << "u0:";
    for (double u : report.u0) text << ' ' << fmt(u);
    text << '\n';
    out.report = text.str();

    if (settings.record_trace) {
        std::ostringstream trace;
        trace << "k,grad_map_norm,objective\n";
        for (const TracePoint& p : report.trace)
            trace << p.k << ',' << p.grad_map_norm << ',' << p.objective << '\n';
        out.trace_csv = trace.str();
    }
    return out;
}

BenchOutput cmd_bench(const RunConfig& config) {
    BenchOutput out;
    std::ostringstream csv;
    csv << "system,prestab,precond,kappa,median_iters,p90_iters\n";

    std::vector<std::string> systems = config.systems;
    if (systems.empty()) systems = builtin_names();

    for (const std::string& name : systems) {
        ModelBundle bundle;
        try {
            bundle = resolve_system(name, config.ts);
        } catch (const std::exception& e) {
            out.warnings.push_back("bench: skipping '" + name + "': " + e.what());
            continue;
        }
        const bool stable = check_schur_stability(bundle.model.A).stable();
        const int N = config.horizons[0];

        for (const bool prestab : {false, true}) {
            const TerminalKind kind = default_terminal(prestab, stable);
            const CondensedQp base =
                condense(bundle.model, with_terminal(bundle.spec, kind, N), prestab);

            for (const bool precond : {false, true}) {
                csv << name << ',' << (prestab ? 1 : 0) << ','
                    << (precond ? "strang" : "none") << ',';
                if (precond && !prestab && !stable) {
                    // No convergent symbol, no central Toeplitz block.
                    csv << "N/A,N/A,N/A\n";
                    continue;
                }
                CondensedQp qp = base;
                if (precond)
                    qp = apply_to_qp(qp, build_preconditioner(bundle.model, bundle.spec, prestab));

                const FgmSolver solver(qp, settings_for(qp, config.epsilon));
                SplitMix64 rng{config.seed};
                std::vector<int> iters;
                iters.reserve(100);
                for (int draw = 0; draw < 100; ++draw) {
                    const Vec x_hat = sphere_point(rng, qp.n, 0.5);
                    iters.push_back(solver.solve(x_hat).iterations);
                }
                std::sort(iters.begin(), iters.end());
                const double median = 0.5 * (iters[49] + iters[50]);
                const int p90 = iters[89];
                csv << fmt(solver.lipschitz() / solver.mu()) << ',';
                char med[32];
                std::snprintf(med, sizeof med, "%.1f", median);
                csv << med << ',' << p90 << '\n';
            }
        }
    }
    out.csv = csv.str();
    return out;
}

}  // namespace clqr::cli
