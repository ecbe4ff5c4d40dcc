#pragma once

#include <stdexcept>

#include "clqr/matkit.hpp"
#include "clqr/model.hpp"

// DARE and discrete Lyapunov solvers, LQR gain, terminal-cost resolution.

namespace clqr {

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};
struct NotStable : std::runtime_error {
    explicit NotStable(const std::string& what) : std::runtime_error(what) {}
};

struct DareSolution {
    Mat P;            // symmetric positive definite
    Mat K;            // LQR gain, K = (B'PB + R)^{-1} B'PA
    double residual;  // Frobenius norm of the DARE defect
    int iterations;
};

/// Solves P = A'PA + Q - A'PB (B'PB + R)^{-1} B'PA by fixed-point iteration
/// from P_0 = Q, re-symmetrizing every step. Converges for stabilizable
/// (A, B); otherwise throws NoConvergence at the iteration cap.
DareSolution solve_dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R);

/// Frobenius norm of A'PA + Q - A'PB (B'PB + R)^{-1} B'PA - P.
double dare_defect(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& P);

/// Solves A'XA + Q = X through the Kronecker linear system. Requires A
/// Schur-stable (certified internally); throws NotStable otherwise.
Mat solve_dlyap(const Mat& A, const Mat& Q);

struct TerminalResolution {
    Mat P;
    Mat K;  // prestabilizing gain; zero for DlyapSolution
};

/// Resolves the spec's terminal policy to a concrete (P, K) pair. The gain
/// is the infinite-horizon LQR controller for every policy except
/// DlyapSolution, which keeps K = 0 and requires a Schur-stable plant.
TerminalResolution resolve_terminal(const ClqrSpec& spec, const LtiModel& model);

}  // namespace clqr
