#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clqr/matkit.hpp"

// LTI system and CLQR problem definition, zero-order-hold discretization,
// model file ingestion, and the built-in example-system catalog.

namespace clqr {

using matkit::Mat;
using matkit::Vec;

struct WrongDomain : std::runtime_error {
    explicit WrongDomain(const std::string& what) : std::runtime_error(what) {}
};
struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownName : std::runtime_error {
    explicit UnknownName(const std::string& what) : std::runtime_error(what) {}
};
struct ParseError : std::runtime_error {
    ParseError(int line, int column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(column) +
                             ": " + what),
          line(line),
          column(column) {}
    int line;
    int column;
};

enum class TimeDomain { Discrete, Continuous };

struct LtiModel {
    Mat A;
    Mat B;
    TimeDomain time_domain = TimeDomain::Discrete;
    double sample_time = 0.0;  // seconds; set when a continuous source was discretized

    std::size_t n() const { return A.rows(); }
    std::size_t m() const { return B.cols(); }
};

enum class TerminalKind { SameAsQ, DareSolution, DlyapSolution, Explicit };

struct TerminalPolicy {
    TerminalKind kind = TerminalKind::SameAsQ;
    Mat explicit_P;  // used only for Explicit

    static TerminalPolicy same_as_q() { return {TerminalKind::SameAsQ, {}}; }
    static TerminalPolicy dare() { return {TerminalKind::DareSolution, {}}; }
    static TerminalPolicy dlyap() { return {TerminalKind::DlyapSolution, {}}; }
    static TerminalPolicy explicit_p(Mat P) { return {TerminalKind::Explicit, std::move(P)}; }
};

/// Stage constraints E_u u_k + E_x x_k <= c, horizon N, and the cost weights.
struct ClqrSpec {
    Mat Q;
    Mat R;
    TerminalPolicy terminal;
    Mat Eu;  // l x m
    Mat Ex;  // l x n
    Vec c;   // length l
    int N = 1;

    std::size_t l() const { return Eu.rows(); }
};

/// Throws (NotPositiveDefinite / DimensionMismatch) unless the spec is
/// well-formed against the model.
void certify_spec(const ClqrSpec& spec, const LtiModel& model);

enum class StabilityVerdict { SchurStable, NotSchurStable, Marginal };

struct StabilityCertificate {
    StabilityVerdict verdict = StabilityVerdict::Marginal;
    Mat witness;       // Lyapunov solution X when the solve succeeded
    std::string note;  // failure detail otherwise
    bool stable() const { return verdict == StabilityVerdict::SchurStable; }
};

/// Zero-order-hold discretization via the augmented matrix exponential:
/// exp([[A*Ts, B*Ts], [0, 0]]) carries A_d and B_d in its top blocks.
LtiModel zoh_discretize(const LtiModel& model, double Ts);

/// Certifies Schur stability by solving the discrete Lyapunov equation
/// A'XA - X = -I through the Kronecker system (I - A'(x)A') vec(X) = vec(I)
/// and testing X for positive definiteness. A singular Kronecker system
/// (eigenvalue product on the unit circle) yields Marginal.
StabilityCertificate check_schur_stability(const Mat& A);

struct ModelBundle {
    LtiModel model;
    ClqrSpec spec;
    double default_ts = 0.02;  // suggested ZOH step for continuous sources
};

ModelBundle load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const LtiModel& model, const ClqrSpec& spec);

ModelBundle parse_model_text(std::string_view text);
std::string save_model_text(const LtiModel& model, const ClqrSpec& spec);

/// Catalog of the built-in example systems: "schur-stable" (discrete,
/// four states / two inputs) and "pendulum" (continuous linearized
/// inverted pendulum). Anything else throws UnknownName.
ModelBundle builtin_system(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace clqr
