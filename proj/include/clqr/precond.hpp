#pragma once

#include "clqr/condense.hpp"
#include "clqr/matkit.hpp"
#include "clqr/symbol.hpp"

// Horizon-independent block preconditioner: the central diagonal block of
// the infinite block-Toeplitz Hessian is M = B'PB + R, where P solves the
// closed-loop Lyapunov equation A_c'P A_c + Q_c = P. Repeating the Cholesky
// factor L of M down the diagonal preconditions the Hessian for any N.

namespace clqr {

struct BlockPreconditioner {
    Mat M;      // m x m, = B'PB + R
    Mat L;      // lower-triangular Cholesky factor of M
    Mat L_inv;  // explicit inverse of L

    static BlockPreconditioner identity(std::size_t m);
};

/// Builds the block preconditioner. With prestabilized set, P is the DARE
/// solution (the closed-loop Lyapunov solution under the LQR gain); without
/// it the plant must be Schur-stable and P solves A'PA + Q = P. An unstable
/// non-prestabilized plant has no convergent symbol, so no preconditioner:
/// SymbolUnavailable (via NotStable) is thrown.
BlockPreconditioner build_preconditioner(const LtiModel& model, const ClqrSpec& spec,
                                         bool prestabilized);

/// True when the terminal policy matches the configuration the
/// preconditioner analysis assumes: DARE when prestabilized, the discrete
/// Lyapunov solution for a stable plant without prestabilization.
bool preconditioner_conforming(const TerminalPolicy& terminal, bool prestabilized);

/// Symmetric variable change w = L_N' v with L_N = I_N (x) L:
/// H <- L_N^{-1} H L_N^{-T}, Phi <- L_N^{-1} Phi, G <- G L_N^{-T}.
/// F, g, K are untouched and the per-stage recovery v_k = L^{-T} w_k is
/// recorded on the result.
CondensedQp apply_to_qp(const CondensedQp& qp, const BlockPreconditioner& pc);

/// Attaches the transform L^{-1}, giving the symbol of the preconditioned
/// Hessian family; its bounds are the horizon-independent preconditioned
/// condition bound.
MatrixSymbol preconditioned_symbol(const MatrixSymbol& sym, const BlockPreconditioner& pc);

}  // namespace clqr
