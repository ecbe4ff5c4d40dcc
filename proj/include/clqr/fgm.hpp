#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "clqr/condense.hpp"
#include "clqr/matkit.hpp"

// Projected Fast Gradient Method with the constant step-size scheme for
// strongly convex objectives and gradient-map stopping, plus the projection
// sub-solvers (componentwise box, dual-ascent polytope).

namespace clqr {

struct InfeasibleProjection : std::runtime_error {
    explicit InfeasibleProjection(const std::string& what) : std::runtime_error(what) {}
};

enum class ProjectionKind { Box, PolytopeDual };

struct FgmSettings {
    double epsilon = 1e-5;  // gradient-map tolerance
    int max_iters = 50000;
    ProjectionKind projection = ProjectionKind::PolytopeDual;
    bool record_trace = false;
};

enum class FgmStatus { Converged, IterCap };

struct TracePoint {
    int k;
    double grad_map_norm;
    double objective;
};

struct FgmReport {
    Vec v_star;
    int iterations = 0;
    double grad_map_norm = 0.0;
    FgmStatus status = FgmStatus::Converged;
    Vec u0;  // recovered first input, -K x_hat + v*_0 (through the recovery map)
    std::vector<TracePoint> trace;
};

/// Componentwise clamp onto [lo, hi].
Vec project_box(const Vec& y, const Vec& lo, const Vec& hi);

/// Projection onto {v : G v <= b} through the dual
///   max_{lambda >= 0} -1/2 ||G' lambda||^2 + lambda'(G y - b),
/// solved by an accelerated projected-gradient ascent to a dual
/// gradient-map norm of tol (default 1e-10 (1 + ||y||)). Returns
/// v = y - G' lambda*. Throws InfeasibleProjection when the dual objective
/// exceeds the divergence guard.
Vec project_polytope(const Vec& y, const Mat& G, const Vec& b, double tol = -1.0);

struct BoxBounds {
    Vec lo, hi;
};

/// Recognizes a pure per-coordinate box: F = 0 and every row of G has
/// exactly one nonzero entry. Returns the bounds, or nothing.
std::optional<BoxBounds> extract_box(const CondensedQp& qp);

/// One QP, many initial states: eigenvalue extremes of H and the dual
/// projector data are computed once at construction.
class FgmSolver {
public:
    FgmSolver(const CondensedQp& qp, FgmSettings settings = {});

    FgmReport solve(const Vec& x_hat) const;

    double mu() const { return mu_; }
    double lipschitz() const { return lf_; }

private:
    const CondensedQp qp_;
    FgmSettings settings_;
    double mu_ = 0.0;
    double lf_ = 0.0;
    double beta_ = 0.0;
    std::optional<BoxBounds> box_;
    Mat gram_;                // G G' for the dual projector
    double gram_lipschitz_ = 0.0;
};

/// Convenience wrapper around FgmSolver for a single solve.
FgmReport solve_fgm(const CondensedQp& qp, const Vec& x_hat, const FgmSettings& settings = {});

}  // namespace clqr
