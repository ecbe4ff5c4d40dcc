#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "clqr/riccati.hpp"
#include "clqr/symbol.hpp"
#include "oracles.hpp"

using namespace clqr;
using matkit::CMat;
using matkit::fro_norm;
using matkit::herm_eig;
using matkit::transpose;

namespace {

constexpr double kPi = 3.14159265358979323846;

CondensedQp stable_catalog_qp(TerminalKind kind, int N) {
    const ModelBundle stable = builtin_system("schur-stable");
    ClqrSpec spec = stable.spec;
    spec.terminal.kind = kind;
    spec.N = N;
    return condense(stable.model, spec, false);
}

CondensedQp pendulum_prestab_qp(int N) {
    const ModelBundle pend = builtin_system("pendulum");
    const LtiModel d = zoh_discretize(pend.model, 0.02);
    ClqrSpec spec = pend.spec;
    spec.terminal = TerminalPolicy::dare();
    spec.N = N;
    return condense(d, spec, true);
}

}  // namespace

TEST_CASE("symbol construction demands a stability certificate") {
    const ModelBundle pend = builtin_system("pendulum");
    const LtiModel d = zoh_discretize(pend.model, 0.02);
    CHECK_THROWS_AS(prediction_symbol(d.A, d.B), SymbolUnavailable);

    ClqrSpec spec = pend.spec;
    spec.terminal = TerminalPolicy::dare();
    const CondensedQp raw = condense(d, spec, false);
    CHECK_THROWS_AS(hessian_symbol(raw), SymbolUnavailable);
}

TEST_CASE("eval_symbol collapsed cases") {
    oracles::Rng rng(101);
    const Mat B = oracles::random_mat(rng, 3, 2);

    // A_c = 0: the prediction symbol is B at every angle.
    const MatrixSymbol pred = prediction_symbol(Mat(3, 3), B);
    for (double theta : {0.0, 0.9, 2.5}) {
        const CMat v = eval_symbol(pred, theta);
        double diff = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 2; ++j) diff += std::abs(v(i, j) - matkit::cplx{B(i, j)});
        CHECK(diff <= 1e-12);
    }

    // B = 0: the Hessian symbol is R everywhere.
    const Mat R = Mat::diag({10.0, 20.0});
    const MatrixSymbol hess = hessian_symbol(0.5 * Mat::identity(3), Mat(3, 2),
                                             Mat::identity(3), R);
    const CMat hv = eval_symbol(hess, 1.3);
    CHECK(std::abs(hv(0, 0) - matkit::cplx{10.0}) <= 1e-14);
    CHECK(std::abs(hv(1, 1) - matkit::cplx{20.0}) <= 1e-14);
    CHECK(std::abs(hv(0, 1)) <= 1e-14);
}

TEST_CASE("Hessian symbol at z=1 matches a long-truncation block-row sum") {
    const CondensedQp qp = stable_catalog_qp(TerminalKind::DlyapSolution, 200);
    const MatrixSymbol sym = hessian_symbol(qp);
    const CMat at_one = eval_symbol(sym, 0.0);

    // Sum the blocks of the central block row of H(200).
    const std::size_t m = qp.m;
    const std::size_t mid = 100;
    Mat row_sum(m, m);
    for (std::size_t j = 0; j < 200; ++j)
        row_sum = row_sum + qp.H.block(mid * m, j * m, m, m);

    double diff = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(std::abs(at_one(i, j).imag()) <= 1e-10);
            diff = std::max(diff, std::abs(at_one(i, j).real() - row_sum(i, j)));
        }
    CHECK(diff <= 1e-6 * fro_norm(row_sum));
}

TEST_CASE("symbol values are Hermitian and conjugate-symmetric across theta") {
    const CondensedQp qp = stable_catalog_qp(TerminalKind::DlyapSolution, 5);
    const MatrixSymbol sym = hessian_symbol(qp);
    for (int k = 0; k < 16; ++k) {
        const double theta = kPi * k / 15.0;
        const CMat v = eval_symbol(sym, theta);
        CHECK(fro_norm(v - matkit::conj_transpose(v)) <= 1e-12 * std::max(fro_norm(v), 1e-300));

        const Vec a = herm_eig(v);
        const Vec b = herm_eig(eval_symbol(sym, 2.0 * kPi - theta));
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10));
    }
}

TEST_CASE("symbol_bounds on a constant symbol and input validation") {
    const MatrixSymbol flat =
        hessian_symbol(Mat(2, 2), Mat(2, 2), Mat::identity(2), Mat::diag({10.0, 20.0}));
    const SpectralBounds b = symbol_bounds(flat, 64);
    CHECK(b.lambda_min == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(b.lambda_max == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(b.kappa == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(symbol_bounds(flat, 100), std::invalid_argument);
    CHECK_THROWS_AS(symbol_bounds(flat, 8), std::invalid_argument);
}

TEST_CASE("fourier_coefficients reproduce the Toeplitz blocks") {
    oracles::Rng rng(102);
    const Mat B = oracles::random_mat(rng, 3, 2);

    const MatrixSymbol zero_pred = prediction_symbol(Mat(3, 3), B);
    const std::vector<Mat> c0 = fourier_coefficients(zero_pred, 1, 4096);
    CHECK(fro_norm(c0[0] - B) <= 1e-10 * std::max(fro_norm(B), 1.0));

    const Mat A = oracles::random_with_spectral_norm(rng, 3, 0.7);
    const MatrixSymbol pred = prediction_symbol(A, B);
    const std::vector<Mat> cs = fourier_coefficients(pred, 3, 4096);
    CHECK(fro_norm(cs[2] - A * A * B) <= 1e-8 * std::max(fro_norm(B), 1.0));

    // Hessian coefficient 0 = B'PB + R with P from the closed-loop
    // Lyapunov equation (here K = 0, so dlyap of the plant).
    const ModelBundle stable = builtin_system("schur-stable");
    const Mat P = solve_dlyap(stable.model.A, stable.spec.Q);
    const Mat M = transpose(stable.model.B) * P * stable.model.B + stable.spec.R;
    const MatrixSymbol hess =
        hessian_symbol(stable.model.A, stable.model.B, stable.spec.Q, stable.spec.R);
    const std::vector<Mat> h0 = fourier_coefficients(hess, 1, 8192);
    CHECK(fro_norm(h0[0] - M) <= 1e-8 * fro_norm(M));
}

TEST_CASE("fourier_coefficients of the Hessian match the central block row of H(40)") {
    const CondensedQp qp = stable_catalog_qp(TerminalKind::DlyapSolution, 40);
    const MatrixSymbol sym = hessian_symbol(qp);
    const std::vector<Mat> coeffs = fourier_coefficients(sym, 10, 8192);
    const std::size_t m = qp.m, mid = 20;
    for (std::size_t j = 0; j < 10; ++j) {
        // Coefficient j sits below the diagonal: block (mid + j, mid).
        const Mat blk = qp.H.block((mid + j) * m, mid * m, m, m);
        CHECK(fro_norm(coeffs[j] - blk) <= 1e-6 * std::max(fro_norm(qp.H.block(mid * m, mid * m, m, m)), 1.0));
    }
}

TEST_CASE("verify_containment holds on catalog configurations") {
    const CondensedQp probe = pendulum_prestab_qp(1);
    const SpectralBounds pb = symbol_bounds(hessian_symbol(probe));
    for (int N : {1, 5, 10}) {
        const CondensedQp qp = pendulum_prestab_qp(N);
        CHECK_NOTHROW(verify_containment(qp, pb));
    }

    const CondensedQp sprobe = stable_catalog_qp(TerminalKind::DlyapSolution, 1);
    const SpectralBounds sb = symbol_bounds(hessian_symbol(sprobe));
    for (int N : {1, 6, 12}) {
        const CondensedQp qp = stable_catalog_qp(TerminalKind::DlyapSolution, N);
        const ContainmentReport rep = verify_containment(qp, sb);
        CHECK(rep.lo_margin >= -1e-8 * sb.lambda_max);
        CHECK(rep.hi_margin >= -1e-8 * sb.lambda_max);
    }
}

TEST_CASE("verify_containment flags an eigenvalue outside the bounds") {
    const CondensedQp qp = stable_catalog_qp(TerminalKind::DlyapSolution, 4);
    SpectralBounds fake;
    fake.lambda_min = 11.0;  // above the true smallest eigenvalue
    fake.lambda_max = 200.0;
    fake.kappa = fake.lambda_max / fake.lambda_min;
    CHECK_THROWS_AS(verify_containment(qp, fake), ContainmentViolated);
}

TEST_CASE("nested spectra and monotone kappa under the DARE terminal") {
    const CondensedQp probe = pendulum_prestab_qp(1);
    const SpectralBounds pb = symbol_bounds(hessian_symbol(probe));

    double prev_lo = -1e300, prev_hi = 1e300, prev_kappa = 0.0;
    for (int N = 2; N <= 15; ++N) {
        const CondensedQp qp = pendulum_prestab_qp(N);
        const auto eig = matkit::sym_eig(qp.H);
        const double lo = eig.values.front(), hi = eig.values.back();
        if (N > 2) {
            CHECK(lo <= prev_lo + 1e-9 * pb.lambda_max);
            CHECK(hi >= prev_hi - 1e-9 * pb.lambda_max);
            CHECK(hi / lo >= prev_kappa - 1e-9);
        }
        CHECK(lo >= pb.lambda_min - 1e-8 * pb.lambda_max);
        CHECK(hi <= pb.lambda_max + 1e-8 * pb.lambda_max);
        prev_lo = lo;
        prev_hi = hi;
        prev_kappa = hi / lo;
    }
    CHECK(prev_kappa <= pb.kappa);
}

TEST_CASE("P=Q terminal can dip below the symbol's lower bound") {
    // Frozen witness: with the terminal weight Q instead of the Lyapunov
    // completion, the Hessian is the Toeplitz compression minus a PSD tail
    // term, and its smallest eigenvalue falls well below the symbol's
    // minimum. The Lyapunov-completed Hessian of the same plant stays inside.
    const Mat A{{0.17313792002209721, -0.036758478542964164, -0.41921986438422915,
                 -0.091038399885345192},
                {-0.16639692262301198, 0.15612547208994165, 0.55349669029351456,
                 0.053181859120077765},
                {-0.19105297283236675, -0.28696799220951191, -0.01375186201528265,
                 -0.043341951606145734},
                {-0.28230208807192236, 0.028525210129793446, -0.28215361209412337,
                 0.27264001851083441}};
    const Mat B{{1.0847512652964209},
                {-0.47405047060852817},
                {0.51452056331808882},
                {-0.13206950521935684}};
    const Mat Q{{4.4280441925224352, 0.95088692991259116, 0.29404136426428623,
                 1.1350481849370075},
                {0.95088692991259116, 2.3256606221496376, 0.47845347450656622,
                 -1.2581234013975138},
                {0.29404136426428623, 0.47845347450656622, 2.3111078447618976,
                 1.9068651365964184},
                {1.1350481849370075, -1.2581234013975138, 1.9068651365964184,
                 5.214200611217616}};
    const Mat R{{1.3663212066963639}};

    LtiModel model;
    model.A = A;
    model.B = B;
    model.time_domain = TimeDomain::Discrete;
    ClqrSpec spec;
    spec.Q = Q;
    spec.R = R;
    spec.Eu = Mat(0, 1);
    spec.Ex = Mat(0, 4);
    spec.N = 20;

    spec.terminal = TerminalPolicy::dlyap();
    const SpectralBounds bounds = symbol_bounds(hessian_symbol(condense(model, spec, false)));
    CHECK_NOTHROW(verify_containment(condense(model, spec, false), bounds));

    spec.terminal = TerminalPolicy::same_as_q();
    const CondensedQp pq = condense(model, spec, false);
    const auto eig = matkit::sym_eig(pq.H);
    const double dip = (bounds.lambda_min - eig.values.front()) / bounds.lambda_max;
    CHECK(dip > 0.05);  // genuinely outside, not a rounding artifact
    CHECK(eig.values.back() <= bounds.lambda_max * (1.0 + 1e-8));
    CHECK_THROWS_AS(verify_containment(pq, bounds), ContainmentViolated);
}

TEST_CASE("random stable plants stay inside their symbol bounds") {
    oracles::Rng rng(103);
    LtiModel model;
    model.A = oracles::random_with_spectral_norm(rng, 3, 0.85);
    model.B = oracles::random_mat(rng, 3, 1);
    model.time_domain = TimeDomain::Discrete;
    ClqrSpec spec;
    spec.Q = oracles::random_spd(rng, 3);
    spec.R = oracles::random_spd(rng, 1);
    spec.Eu = Mat(0, 1);
    spec.Ex = Mat(0, 3);
    spec.terminal = TerminalPolicy::dlyap();
    spec.N = 1;

    const CondensedQp probe = condense(model, spec, false);
    const SpectralBounds b = symbol_bounds(hessian_symbol(probe));
    for (int N = 1; N <= 25; ++N) {
        spec.N = N;
        CHECK_NOTHROW(verify_containment(condense(model, spec, false), b));
    }
}
