#pragma once

#include "clqr/matkit.hpp"
#include "clqr/model.hpp"

// Builds the condensed QP over the stacked input sequence: prediction
// matrices, Hessian, linear-term map, and condensed stage constraints,
// for both the plain and the prestabilized formulation.

namespace clqr {

struct PredictionPair {
    Mat Gamma;   // (N n) x (N m), block (i, j) = A_c^{i-j} B for i >= j
    Mat Lambda;  // (N n) x n, block k = A_c^{k+1} (free response of x_1..x_N)
    int N = 0;
    std::size_t n = 0, m = 0;
};

PredictionPair build_prediction(const Mat& A_c, const Mat& B, int N);

/// H = Gamma' Qbar Gamma + I_N (x) R with Qbar = blkdiag(I_{N-1} (x) Q_c, P),
/// explicitly symmetrized.
Mat build_hessian(const PredictionPair& pred, const Mat& Q_c, const Mat& P, const Mat& R);

/// Phi = Gamma' Qbar Lambda, so the QP gradient at v is H v + Phi x_hat.
Mat build_linear_map(const PredictionPair& pred, const Mat& Q_c, const Mat& P);

struct ConstraintSet {
    Mat G;  // (N l) x (N m)
    Mat F;  // (N l) x n
    Vec g;  // length N l
};

/// Condenses the stage constraints E_u u_k + E_x x_k <= c under
/// u_k = -K x_k + v_k into G v <= F x_hat + g.
ConstraintSet build_constraints(const LtiModel& model, const ClqrSpec& spec, const Mat& K,
                                const PredictionPair& pred);

struct CondensedQp {
    Mat H;    // (N m) x (N m) Hessian
    Mat Phi;  // (N m) x n linear-term map
    Mat G;
    Mat F;
    Vec g;
    Mat K;  // prestabilizing gain; zero when none
    int N = 0;
    std::size_t n = 0, m = 0, l = 0;

    // Constituents of the Hessian, kept for symbol construction.
    Mat A_c;
    Mat B;
    Mat Q_c;
    Mat R;
    Mat P;
    StabilityCertificate closed_loop;

    // Per-stage recovery v_k = input_recovery * w_k after a variable change
    // (identity until a preconditioner is applied).
    Mat input_recovery;
};

/// Assembles the full condensed QP. With prestabilize set, uses A_c = A - BK
/// and Q_c = Q + K'RK with K from the terminal resolution; otherwise
/// A_c = A, Q_c = Q, K = 0. An unstable A_c is not an error here: the
/// result carries the stability certificate and the symbol module rejects
/// it when a matrix symbol is requested.
CondensedQp condense(const LtiModel& model, const ClqrSpec& spec, bool prestabilize);

}  // namespace clqr
