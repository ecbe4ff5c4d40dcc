#include "clqr/fgm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clqr {

using matkit::dot;
using matkit::matvec;
using matkit::norm2;
using matkit::sym_eig;
using matkit::transpose;
using matkit::vec_scale;
using matkit::vec_sub;

Vec project_box(const Vec& y, const Vec& lo, const Vec& hi) {
    if (lo.size() != y.size() || hi.size() != y.size())
        throw std::invalid_argument("project_box: bound dimensions mismatch");
    Vec out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (lo[i] > hi[i]) throw std::invalid_argument("project_box: lo exceeds hi");
        out[i] = std::min(std::max(y[i], lo[i]), hi[i]);
    }
    return out;
}

namespace {

constexpr double kDivergenceGuard = 1e12;

// Accelerated projected-gradient ascent on the projection dual
//   max_{lambda >= 0} -1/2 lambda' (G G') lambda + lambda' (G y - b).
// `gram` and its largest eigenvalue are precomputed by the caller.
Vec dual_polytope_project(const Vec& y, const Mat& G, const Vec& b, const Mat& gram,
                          double gram_lipschitz, double tol) {
    const std::size_t rows = G.rows();
    if (rows == 0) return y;
    if (tol <= 0.0) tol = 1e-10 * (1.0 + norm2(y));

    Vec r = matvec(G, y);
    bool feasible = true;
    for (std::size_t i = 0; i < rows; ++i) {
        r[i] -= b[i];
        if (r[i] > 0.0) feasible = false;
    }
    if (feasible) return y;

    const double lp = std::max(gram_lipschitz, 1e-300);
    Vec lambda(rows, 0.0), z(rows, 0.0);
    double t = 1.0;
    constexpr int kCap = 2000000;
    for (int k = 1; k <= kCap; ++k) {
        Vec grad = matvec(gram, z);
        for (std::size_t i = 0; i < rows; ++i) grad[i] -= r[i];
        Vec next(rows);
        double gm_sq = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            next[i] = std::max(0.0, z[i] - grad[i] / lp);
            const double d = z[i] - next[i];
            gm_sq += d * d;
        }
        if (lp * std::sqrt(gm_sq) <= tol) {
            lambda = std::move(next);
            break;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < rows; ++i) {
            const double step = next[i] - lambda[i];
            z[i] = next[i] + momentum * step;
        }
        lambda = std::move(next);
        t = t_next;

        if ((k & 63) == 0) {
            const Vec gl = matvec(gram, lambda);
            const double obj = -0.5 * dot(lambda, gl) + dot(lambda, r);
            // An unbounded dual ray also shows up as runaway multipliers long
            // before the objective itself crosses the guard.
            if (obj > kDivergenceGuard || norm2(lambda) > 1e10)
                throw InfeasibleProjection(
                    "project_polytope: dual ascent diverging; constraint set is empty");
        }
    }

    Vec correction = matvec(transpose(G), lambda);
    Vec v(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) v[i] = y[i] - correction[i];
    return v;
}

}  // namespace

Vec project_polytope(const Vec& y, const Mat& G, const Vec& b, double tol) {
    if (G.cols() != y.size() || G.rows() != b.size())
        throw std::invalid_argument("project_polytope: dimension mismatch");
    if (G.rows() == 0) return y;
    const Mat gram = G * transpose(G);
    const double lp = sym_eig(gram).values.back();
    return dual_polytope_project(y, G, b, gram, lp, tol);
}

std::optional<BoxBounds> extract_box(const CondensedQp& qp) {
    const std::size_t dim = qp.H.rows();
    constexpr double inf = std::numeric_limits<double>::infinity();
    BoxBounds box{Vec(dim, -inf), Vec(dim, inf)};
    if (qp.G.rows() == 0) return box;

    if (matkit::max_abs(qp.F) != 0.0) return std::nullopt;
    for (std::size_t i = 0; i < qp.G.rows(); ++i) {
        std::size_t nonzeros = 0, col = 0;
        for (std::size_t j = 0; j < qp.G.cols(); ++j) {
            if (qp.G(i, j) != 0.0) {
                ++nonzeros;
                col = j;
            }
        }
        if (nonzeros != 1) return std::nullopt;
        const double a = qp.G(i, col);
        const double bound = qp.g[i] / a;
        if (a > 0.0)
            box.hi[col] = std::min(box.hi[col], bound);
        else
            box.lo[col] = std::max(box.lo[col], bound);
    }
    return box;
}

FgmSolver::FgmSolver(const CondensedQp& qp, FgmSettings settings)
    : qp_(qp), settings_(settings) {
    const matkit::EigResult eig = sym_eig(qp_.H);
    mu_ = eig.values.front();
    lf_ = eig.values.back();
    if (mu_ <= 0.0)
        throw matkit::NotPositiveDefinite("solve_fgm: Hessian is not positive definite");
    beta_ = (std::sqrt(lf_) - std::sqrt(mu_)) / (std::sqrt(lf_) + std::sqrt(mu_));

    if (settings_.projection == ProjectionKind::Box) {
        box_ = extract_box(qp_);
        if (!box_)
            throw std::invalid_argument(
                "solve_fgm: box projection requested but the constraint set is not a "
                "per-coordinate box");
    } else if (qp_.G.rows() > 0) {
        gram_ = qp_.G * transpose(qp_.G);
        gram_lipschitz_ = sym_eig(gram_).values.back();
    }
}

FgmReport FgmSolver::solve(const Vec& x_hat) const {
    if (x_hat.size() != qp_.n) throw std::invalid_argument("solve_fgm: x_hat has wrong dimension");
    const std::size_t dim = qp_.H.rows();
    const Vec q = matvec(qp_.Phi, x_hat);

    Vec b;
    if (settings_.projection == ProjectionKind::PolytopeDual && qp_.G.rows() > 0) {
        b = matvec(qp_.F, x_hat);
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += qp_.g[i];
    }

    auto project = [&](const Vec& y) -> Vec {
        if (settings_.projection == ProjectionKind::Box) return project_box(y, box_->lo, box_->hi);
        if (qp_.G.rows() == 0) return y;
        return dual_polytope_project(y, qp_.G, b, gram_, gram_lipschitz_,
                                     1e-10 * (1.0 + norm2(y)));
    };

    FgmReport report;
    Vec v(dim, 0.0), y(dim, 0.0);
    bool converged = false;
    int k = 0;
    while (k < settings_.max_iters) {
        ++k;
        Vec grad = matvec(qp_.H, y);
        for (std::size_t i = 0; i < dim; ++i) grad[i] = y[i] - (grad[i] + q[i]) / lf_;
        const Vec v_next = project(grad);
        const double gm = lf_ * norm2(vec_sub(y, v_next));

        if (settings_.record_trace) {
            const Vec hv = matvec(qp_.H, v_next);
            const double obj = 0.5 * dot(v_next, hv) + dot(q, v_next);
            report.trace.push_back({k, gm, obj});
        }

        if (gm <= settings_.epsilon) {
            v = v_next;
            converged = true;
            report.grad_map_norm = gm;
            break;
        }
        Vec y_next(dim);
        for (std::size_t i = 0; i < dim; ++i)
            y_next[i] = v_next[i] + beta_ * (v_next[i] - v[i]);
        y = std::move(y_next);
        v = v_next;
        report.grad_map_norm = gm;
    }

    report.v_star = v;
    report.iterations = k;
    report.status = converged ? FgmStatus::Converged : FgmStatus::IterCap;

    // u_0 = -K x_hat + v*_0, with v recovered through the variable change.
    Vec v0(qp_.m);
    for (std::size_t i = 0; i < qp_.m; ++i) v0[i] = v[i];
    const Vec v0_phys = matvec(qp_.input_recovery, v0);
    const Vec kx = matvec(qp_.K, x_hat);
    report.u0.resize(qp_.m);
    for (std::size_t i = 0; i < qp_.m; ++i) report.u0[i] = v0_phys[i] - kx[i];
    return report;
}

FgmReport solve_fgm(const CondensedQp& qp, const Vec& x_hat, const FgmSettings& settings) {
    return FgmSolver(qp, settings).solve(x_hat);
}

}  // namespace clqr
