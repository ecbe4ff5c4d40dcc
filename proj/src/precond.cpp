#include "clqr/precond.hpp"

#include "clqr/riccati.hpp"

namespace clqr {

using matkit::chol_lower;
using matkit::lu_solve;
using matkit::transpose;

BlockPreconditioner BlockPreconditioner::identity(std::size_t m) {
    BlockPreconditioner pc;
    pc.M = Mat::identity(m);
    pc.L = Mat::identity(m);
    pc.L_inv = Mat::identity(m);
    return pc;
}

BlockPreconditioner build_preconditioner(const LtiModel& model, const ClqrSpec& spec,
                                         bool prestabilized) {
    if (model.time_domain != TimeDomain::Discrete)
        throw WrongDomain("build_preconditioner: model must be discrete");

    Mat P;
    if (prestabilized) {
        P = solve_dare(model.A, model.B, spec.Q, spec.R).P;
    } else {
        // K = 0: the central Toeplitz block sums A'^i Q A^i, the discrete
        // Lyapunov solution, which exists only for a Schur-stable plant.
        P = solve_dlyap(model.A, spec.Q);
    }

    BlockPreconditioner pc;
    const Mat bt = transpose(model.B);
    pc.M = 0.5 * ((bt * P * model.B + spec.R) + transpose(bt * P * model.B + spec.R));
    pc.L = chol_lower(pc.M);
    pc.L_inv = lu_solve(pc.L, Mat::identity(pc.L.rows()));
    return pc;
}

bool preconditioner_conforming(const TerminalPolicy& terminal, bool prestabilized) {
    if (prestabilized) return terminal.kind == TerminalKind::DareSolution;
    return terminal.kind == TerminalKind::DlyapSolution;
}

CondensedQp apply_to_qp(const CondensedQp& qp, const BlockPreconditioner& pc) {
    const std::size_t m = qp.m;
    if (pc.L.rows() != m || pc.L.cols() != m)
        throw DimensionMismatch("apply_to_qp: preconditioner block is not m x m");

    const Mat li = pc.L_inv;
    const Mat lit = transpose(li);
    const int N = qp.N;

    CondensedQp out = qp;
    // Block-diagonal L_N: every transform acts stage-blockwise.
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const Mat blk = qp.H.block(static_cast<std::size_t>(i) * m,
                                       static_cast<std::size_t>(j) * m, m, m);
            out.H.set_block(static_cast<std::size_t>(i) * m, static_cast<std::size_t>(j) * m,
                            li * blk * lit);
        }
    out.H = 0.5 * (out.H + transpose(out.H));

    for (int i = 0; i < N; ++i) {
        const Mat blk = qp.Phi.block(static_cast<std::size_t>(i) * m, 0, m, qp.n);
        out.Phi.set_block(static_cast<std::size_t>(i) * m, 0, li * blk);
    }

    const std::size_t l = qp.l;
    for (int i = 0; i < N && l > 0; ++i)
        for (int j = 0; j < N; ++j) {
            const Mat blk = qp.G.block(static_cast<std::size_t>(i) * l,
                                       static_cast<std::size_t>(j) * m, l, m);
            out.G.set_block(static_cast<std::size_t>(i) * l, static_cast<std::size_t>(j) * m,
                            blk * lit);
        }

    out.input_recovery = qp.input_recovery * lit;
    return out;
}

MatrixSymbol preconditioned_symbol(const MatrixSymbol& sym, const BlockPreconditioner& pc) {
    if (sym.kind != SymbolKind::Hessian)
        throw std::invalid_argument("preconditioned_symbol: input must be a Hessian symbol");
    MatrixSymbol out = sym;
    out.kind = SymbolKind::PreconditionedHessian;
    out.transform = pc.L_inv;
    return out;
}

}  // namespace clqr
