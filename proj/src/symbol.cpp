#include "clqr/symbol.hpp"

#include <cmath>

namespace clqr {

using matkit::cplx;
using matkit::conj_transpose;
using matkit::herm_eig;

namespace {

constexpr double kPi = 3.14159265358979323846;

StabilityCertificate certify_or_throw(const Mat& A_c) {
    StabilityCertificate cert = check_schur_stability(A_c);
    if (!cert.stable())
        throw SymbolUnavailable("matrix symbol requires a Schur-stable A_c: " + cert.note);
    return cert;
}

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

MatrixSymbol prediction_symbol(const Mat& A_c, const Mat& B) {
    MatrixSymbol s;
    s.kind = SymbolKind::Prediction;
    s.A_c = A_c;
    s.B = B;
    s.cert = certify_or_throw(A_c);
    return s;
}

MatrixSymbol hessian_symbol(const Mat& A_c, const Mat& B, const Mat& Q_c, const Mat& R) {
    MatrixSymbol s;
    s.kind = SymbolKind::Hessian;
    s.A_c = A_c;
    s.B = B;
    s.Q_c = Q_c;
    s.R = R;
    s.cert = certify_or_throw(A_c);
    return s;
}

MatrixSymbol hessian_symbol(const CondensedQp& qp) {
    if (!qp.closed_loop.stable())
        throw SymbolUnavailable("condensed QP carries a failed stability certificate: " +
                                qp.closed_loop.note);
    MatrixSymbol s;
    s.kind = SymbolKind::Hessian;
    s.A_c = qp.A_c;
    s.B = qp.B;
    s.Q_c = qp.Q_c;
    s.R = qp.R;
    s.cert = qp.closed_loop;
    return s;
}

namespace {

CMat resolvent_times_b(const MatrixSymbol& sym, double theta) {
    const std::size_t n = sym.A_c.rows();
    const cplx z = std::polar(1.0, theta);
    CMat shifted(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            shifted(i, j) = (i == j ? z : cplx{0.0, 0.0}) - cplx{sym.A_c(i, j), 0.0};
    CMat rhs = CMat::from_real(sym.B);
    CMat x;
    try {
        x = matkit::clu_solve(shifted, rhs);
    } catch (const matkit::Singular& e) {
        throw SingularResolvent(std::string("zI - A_c numerically singular despite a stability "
                                            "certificate: ") +
                                e.what());
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < rhs.cols(); ++j) x(i, j) *= z;
    return x;
}

CMat hermitianize(const CMat& a) {
    CMat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return out;
}

}  // namespace

CMat eval_symbol(const MatrixSymbol& sym, double theta) {
    const CMat pred = resolvent_times_b(sym, theta);
    if (sym.kind == SymbolKind::Prediction) return pred;

    const CMat qc = CMat::from_real(sym.Q_c);
    CMat h = conj_transpose(pred) * qc * pred;
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) += sym.R(i, j);
    h = hermitianize(h);

    if (sym.kind == SymbolKind::PreconditionedHessian) {
        const CMat t = CMat::from_real(sym.transform);
        h = hermitianize(t * h * conj_transpose(t));
    }
    return h;
}

namespace {

struct GridPoint {
    double lo, hi;
};

GridPoint extreme_eigs(const MatrixSymbol& sym, double theta) {
    const Vec eigs = herm_eig(eval_symbol(sym, theta));
    return {eigs.front(), eigs.back()};
}

// Golden-section search for an eigenvalue extremum inside [a, b].
// `sign` is +1 to maximize the top eigenvalue, -1 to minimize the bottom.
std::pair<double, double> refine(const MatrixSymbol& sym, double a, double b, int sign,
                                 double rel_tol) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto f = [&](double th) {
        const GridPoint p = extreme_eigs(sym, th);
        return sign > 0 ? p.hi : -p.lo;
    };
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    double best = std::max(f1, f2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        const double now = std::max(f1, f2);
        if (std::abs(now - best) <= rel_tol * std::max(std::abs(now), 1e-300) && it > 2) {
            best = std::max(best, now);
            break;
        }
        best = std::max(best, now);
    }
    const double theta = f1 > f2 ? x1 : x2;
    return {sign > 0 ? best : -best, theta};
}

}  // namespace

SpectralBounds symbol_bounds(const MatrixSymbol& sym, int grid, double refine_tol) {
    if (grid < 16 || !is_power_of_two(grid))
        throw std::invalid_argument("symbol_bounds: grid must be a power of two >= 16");

    std::vector<GridPoint> pts(static_cast<std::size_t>(grid));
    const double step = kPi / (grid - 1);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 0; i < grid; ++i)
        pts[static_cast<std::size_t>(i)] = extreme_eigs(sym, i * step);

    // Index-ordered reduction keeps the result independent of thread count.
    int imin = 0, imax = 0;
    for (int i = 1; i < grid; ++i) {
        if (pts[static_cast<std::size_t>(i)].lo < pts[static_cast<std::size_t>(imin)].lo) imin = i;
        if (pts[static_cast<std::size_t>(i)].hi > pts[static_cast<std::size_t>(imax)].hi) imax = i;
    }

    SpectralBounds out;
    out.grid_points = grid;

    const double a_min = std::max(0.0, (imin - 1) * step);
    const double b_min = std::min(kPi, (imin + 1) * step);
    const auto [lo, th_min] = refine(sym, a_min, b_min, -1, refine_tol);
    out.lambda_min = std::min(lo, pts[static_cast<std::size_t>(imin)].lo);
    out.argmin_theta = th_min;

    const double a_max = std::max(0.0, (imax - 1) * step);
    const double b_max = std::min(kPi, (imax + 1) * step);
    const auto [hi, th_max] = refine(sym, a_max, b_max, +1, refine_tol);
    out.lambda_max = std::max(hi, pts[static_cast<std::size_t>(imax)].hi);
    out.argmax_theta = th_max;

    out.kappa = out.lambda_max / out.lambda_min;
    return out;
}

std::vector<Mat> fourier_coefficients(const MatrixSymbol& sym, int count, int quad_points) {
    if (count < 1) throw std::invalid_argument("fourier_coefficients: count must be >= 1");
    if (quad_points < 4096)
        throw std::invalid_argument("fourier_coefficients: need at least 4096 quadrature points");

    const std::size_t br = sym.block_rows(), bc = sym.block_cols();
    std::vector<CMat> evals(static_cast<std::size_t>(quad_points));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int k = 0; k < quad_points; ++k)
        evals[static_cast<std::size_t>(k)] = eval_symbol(sym, 2.0 * kPi * k / quad_points);

    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        CMat acc(br, bc);
        for (int k = 0; k < quad_points; ++k) {
            const cplx w = std::polar(1.0, 2.0 * kPi * k * j / quad_points);
            const CMat& e = evals[static_cast<std::size_t>(k)];
            for (std::size_t r = 0; r < br; ++r)
                for (std::size_t c = 0; c < bc; ++c) acc(r, c) += w * e(r, c);
        }
        Mat coeff(br, bc);
        for (std::size_t r = 0; r < br; ++r)
            for (std::size_t c = 0; c < bc; ++c) coeff(r, c) = acc(r, c).real() / quad_points;
        out.push_back(std::move(coeff));
    }
    return out;
}

ContainmentReport verify_containment(const CondensedQp& qp, const SpectralBounds& bounds) {
    const matkit::EigResult eig = matkit::sym_eig(qp.H);
    const double tol = 1e-8 * bounds.lambda_max;

    ContainmentReport report;
    report.horizon = qp.N;
    report.smallest_eig = eig.values.front();
    report.largest_eig = eig.values.back();
    report.lo_margin = eig.values.front() - bounds.lambda_min;
    report.hi_margin = bounds.lambda_max - eig.values.back();

    for (double v : eig.values) {
        if (v < bounds.lambda_min - tol || v > bounds.lambda_max + tol)
            throw ContainmentViolated(
                "Hessian eigenvalue " + std::to_string(v) + " escapes the symbol bounds [" +
                    std::to_string(bounds.lambda_min) + ", " + std::to_string(bounds.lambda_max) +
                    "] at N = " + std::to_string(qp.N),
                v, qp.N);
    }
    return report;
}

}  // namespace clqr
