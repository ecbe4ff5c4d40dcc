#include "clqr/condense.hpp"

#include "clqr/riccati.hpp"

namespace clqr {

using matkit::matmul;
using matkit::transpose;

PredictionPair build_prediction(const Mat& A_c, const Mat& B, int N) {
    if (N < 1) throw std::invalid_argument("build_prediction: N must be >= 1");
    const std::size_t n = A_c.rows(), m = B.cols();
    if (A_c.cols() != n || B.rows() != n)
        throw DimensionMismatch("build_prediction: A_c and B dimensions inconsistent");

    PredictionPair out;
    out.N = N;
    out.n = n;
    out.m = m;
    out.Gamma = Mat(static_cast<std::size_t>(N) * n, static_cast<std::size_t>(N) * m);
    out.Lambda = Mat(static_cast<std::size_t>(N) * n, n);

    // First block column by the recurrence col_k = A_c * col_{k-1}; every
    // other column is the same stack shifted down.
    std::vector<Mat> col(static_cast<std::size_t>(N));
    col[0] = B;
    for (int k = 1; k < N; ++k) col[static_cast<std::size_t>(k)] = A_c * col[static_cast<std::size_t>(k - 1)];
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j)
            out.Gamma.set_block(static_cast<std::size_t>(i) * n, static_cast<std::size_t>(j) * m,
                                col[static_cast<std::size_t>(i - j)]);

    Mat power = A_c;
    for (int k = 0; k < N; ++k) {
        out.Lambda.set_block(static_cast<std::size_t>(k) * n, 0, power);
        if (k + 1 < N) power = A_c * power;
    }
    return out;
}

namespace {

// Qbar * X computed blockwise: row block i of X is weighted by Q_c except
// the last, which gets P.
Mat apply_qbar(const PredictionPair& pred, const Mat& Q_c, const Mat& P, const Mat& X) {
    const std::size_t n = pred.n;
    const int N = pred.N;
    Mat out(X.rows(), X.cols());
    for (int i = 0; i < N; ++i) {
        const Mat& w = (i + 1 == N) ? P : Q_c;
        const Mat xi = X.block(static_cast<std::size_t>(i) * n, 0, n, X.cols());
        out.set_block(static_cast<std::size_t>(i) * n, 0, w * xi);
    }
    return out;
}

}  // namespace

Mat build_hessian(const PredictionPair& pred, const Mat& Q_c, const Mat& P, const Mat& R) {
    const Mat weighted = apply_qbar(pred, Q_c, P, pred.Gamma);
    Mat h = matmul(transpose(pred.Gamma), weighted);
    const std::size_t m = pred.m;
    for (int k = 0; k < pred.N; ++k)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                h(static_cast<std::size_t>(k) * m + i, static_cast<std::size_t>(k) * m + j) += R(i, j);
    return 0.5 * (h + transpose(h));
}

Mat build_linear_map(const PredictionPair& pred, const Mat& Q_c, const Mat& P) {
    return matmul(transpose(pred.Gamma), apply_qbar(pred, Q_c, P, pred.Lambda));
}

ConstraintSet build_constraints(const LtiModel& model, const ClqrSpec& spec, const Mat& K,
                                const PredictionPair& pred) {
    const std::size_t n = pred.n, m = pred.m, l = spec.l();
    const int N = pred.N;
    ConstraintSet out;
    out.G = Mat(static_cast<std::size_t>(N) * l, static_cast<std::size_t>(N) * m);
    out.F = Mat(static_cast<std::size_t>(N) * l, n);
    out.g.assign(static_cast<std::size_t>(N) * l, 0.0);
    if (l == 0) return out;

    // Stage k: (E_x - E_u K) x_k + E_u v_k <= c with
    // x_k = A_c^k x_hat + sum_{j<k} A_c^{k-1-j} B v_j.
    const Mat Ebar = spec.Ex - spec.Eu * K;

    for (int k = 0; k < N; ++k) {
        out.G.set_block(static_cast<std::size_t>(k) * l, static_cast<std::size_t>(k) * m, spec.Eu);
        for (int j = 0; j < k; ++j) {
            const Mat blk =
                pred.Gamma.block(static_cast<std::size_t>(k - 1) * n, static_cast<std::size_t>(j) * m, n, m);
            out.G.set_block(static_cast<std::size_t>(k) * l, static_cast<std::size_t>(j) * m, Ebar * blk);
        }
        for (std::size_t i = 0; i < l; ++i) out.g[static_cast<std::size_t>(k) * l + i] = spec.c[i];
    }

    Mat power = Mat::identity(n);  // A_c^0
    const Mat A_c = model.A - model.B * K;
    for (int k = 0; k < N; ++k) {
        out.F.set_block(static_cast<std::size_t>(k) * l, 0, -1.0 * (Ebar * power));
        if (k + 1 < N) power = A_c * power;
    }
    return out;
}

CondensedQp condense(const LtiModel& model, const ClqrSpec& spec, bool prestabilize) {
    if (model.time_domain != TimeDomain::Discrete)
        throw WrongDomain("condense: model must be discrete");
    certify_spec(spec, model);

    const TerminalResolution term = resolve_terminal(spec, model);
    CondensedQp qp;
    qp.N = spec.N;
    qp.n = model.n();
    qp.m = model.m();
    qp.l = spec.l();
    qp.P = term.P;
    qp.R = spec.R;
    qp.B = model.B;

    if (prestabilize) {
        qp.K = term.K;
        qp.A_c = model.A - model.B * qp.K;
        qp.Q_c = 0.5 * ((spec.Q + transpose(qp.K) * spec.R * qp.K) +
                        transpose(spec.Q + transpose(qp.K) * spec.R * qp.K));
        // "Same as Q" means the terminal weight equals the stage state
        // weight, which in the prestabilized cost is Q_c, not Q.
        if (spec.terminal.kind == TerminalKind::SameAsQ) qp.P = qp.Q_c;
    } else {
        qp.K = Mat(qp.m, qp.n);
        qp.A_c = model.A;
        qp.Q_c = spec.Q;
    }
    qp.closed_loop = check_schur_stability(qp.A_c);

    const PredictionPair pred = build_prediction(qp.A_c, model.B, spec.N);
    qp.H = build_hessian(pred, qp.Q_c, qp.P, spec.R);
    qp.Phi = build_linear_map(pred, qp.Q_c, qp.P);
    const ConstraintSet con = build_constraints(model, spec, qp.K, pred);
    qp.G = con.G;
    qp.F = con.F;
    qp.g = con.g;
    qp.input_recovery = Mat::identity(qp.m);
    return qp;
}

}  // namespace clqr
