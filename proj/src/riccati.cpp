#include "clqr/riccati.hpp"

#include <cmath>

namespace clqr {

using matkit::fro_norm;
using matkit::lu_solve;
using matkit::transpose;

namespace {

Mat symmetrize(const Mat& m) { return 0.5 * (m + transpose(m)); }

Mat lqr_gain(const Mat& A, const Mat& B, const Mat& R, const Mat& P) {
    const Mat bt = transpose(B);
    return lu_solve(bt * P * B + R, bt * P * A);
}

}  // namespace

double dare_defect(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& P) {
    const Mat at = transpose(A);
    const Mat K = lqr_gain(A, B, R, P);
    const Mat next = at * P * A + Q - at * P * B * K;
    return fro_norm(next - P);
}

DareSolution solve_dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
    constexpr int kMaxIters = 10000;
    constexpr double kRelTol = 1e-13;

    const Mat at = transpose(A);
    Mat P = Q;
    int iters = 0;
    double prev_step = std::numeric_limits<double>::infinity();
    for (; iters < kMaxIters; ++iters) {
        const Mat K = lqr_gain(A, B, R, P);
        Mat next = symmetrize(at * P * A + Q - at * P * B * K);
        const double step = fro_norm(next - P);
        const double scale = std::max(fro_norm(P), 1e-300);
        P = std::move(next);
        if (step <= kRelTol * scale) break;
        // A growing step after the initial transient signals divergence.
        if (iters > 50 && step > 10.0 * prev_step && step > scale)
            throw NoConvergence("solve_dare: defect growing; pair likely not stabilizable");
        prev_step = step;
    }
    if (iters >= kMaxIters)
        throw NoConvergence("solve_dare: no convergence within 10000 iterations");

    DareSolution out;
    out.P = P;
    out.K = lqr_gain(A, B, R, P);
    out.residual = dare_defect(A, B, Q, R, P);
    out.iterations = iters + 1;
    if (out.residual > 1e-10 * fro_norm(P))
        throw NoConvergence("solve_dare: converged point fails the defect tolerance");
    return out;
}

Mat solve_dlyap(const Mat& A, const Mat& Q) {
    const StabilityCertificate cert = check_schur_stability(A);
    if (!cert.stable())
        throw NotStable("solve_dlyap: matrix is not certified Schur-stable (" + cert.note + ")");

    const std::size_t n = A.rows();
    const Mat at = transpose(A);
    const Mat sys = Mat::identity(n * n) - matkit::kron(at, at);
    Vec rhs(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rhs[i * n + j] = Q(i, j);
    const Vec x = lu_solve(sys, rhs);
    Mat X(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) X(i, j) = x[i * n + j];
    X = symmetrize(X);

    const double defect = fro_norm(at * X * A + Q - X);
    if (defect > 1e-10 * std::max(fro_norm(X), 1e-300))
        throw NoConvergence("solve_dlyap: Kronecker solve failed the defect tolerance");
    return X;
}

TerminalResolution resolve_terminal(const ClqrSpec& spec, const LtiModel& model) {
    if (model.time_domain != TimeDomain::Discrete)
        throw WrongDomain("resolve_terminal: model must be discrete");
    switch (spec.terminal.kind) {
        case TerminalKind::SameAsQ: {
            // The gain is still wanted for prestabilization.
            const DareSolution d = solve_dare(model.A, model.B, spec.Q, spec.R);
            return {spec.Q, d.K};
        }
        case TerminalKind::DareSolution: {
            const DareSolution d = solve_dare(model.A, model.B, spec.Q, spec.R);
            return {d.P, d.K};
        }
        case TerminalKind::DlyapSolution: {
            return {solve_dlyap(model.A, spec.Q), Mat(model.m(), model.n())};
        }
        case TerminalKind::Explicit: {
            const DareSolution d = solve_dare(model.A, model.B, spec.Q, spec.R);
            return {spec.terminal.explicit_P, d.K};
        }
    }
    throw std::logic_error("resolve_terminal: unreachable");
}

}  // namespace clqr
