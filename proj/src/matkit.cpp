#include "clqr/matkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    e_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require(r.size() == cols_, "Mat: ragged initializer");
        e_.insert(e_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    require(r0 + nr <= rows_ && c0 + nc <= cols_, "Mat::block: out of range");
    Mat out(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
}

void Mat::set_block(std::size_t r0, std::size_t c0, const Mat& src) {
    require(r0 + src.rows() <= rows_ && c0 + src.cols() <= cols_, "Mat::set_block: out of range");
    for (std::size_t i = 0; i < src.rows(); ++i)
        for (std::size_t j = 0; j < src.cols(); ++j) (*this)(r0 + i, c0 + j) = src(i, j);
}

Vec Mat::col(std::size_t j) const {
    Vec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

Vec Mat::row(std::size_t i) const {
    Vec v(cols_);
    for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
}

CMat CMat::identity(std::size_t n) {
    CMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::from_real(const Mat& re) {
    CMat m(re.rows(), re.cols());
    for (std::size_t i = 0; i < re.rows(); ++i)
        for (std::size_t j = 0; j < re.cols(); ++j) m(i, j) = re(i, j);
    return m;
}

Mat operator+(const Mat& a, const Mat& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "Mat+: shape mismatch");
    Mat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return out;
}

Mat operator-(const Mat& a, const Mat& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "Mat-: shape mismatch");
    Mat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    return out;
}

Mat operator*(double s, const Mat& a) {
    Mat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
    return out;
}

namespace serial {

Mat matmul(const Mat& a, const Mat& b) {
    require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
    Mat c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* ci = c.data() + i * m;
        const double* ai = a.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b.data() + p * m;
            for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

}  // namespace serial

Mat matmul(const Mat& a, const Mat& b) {
    require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    // Small products are not worth the fork/join.
    if (n * k * m < (1u << 16)) return serial::matmul(a, b);
    Mat c(n, m);
    // Rows are independent; each entry accumulates over p in ascending order,
    // exactly as in serial::matmul, so the result is bit-identical.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* ci = c.data() + i * m;
        const double* ai = a.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b.data() + p * m;
            for (std::size_t j = 0; j < m; ++j) ci[j] += aip * bp[j];
        }
    }
    return c;
}

Vec matvec(const Mat& a, const Vec& x) {
    require(a.cols() == x.size(), "matvec: dimension mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        const double* ai = a.data() + i * a.cols();
        for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
        y[i] = s;
    }
    return y;
}

Mat transpose(const Mat& a) {
    Mat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Mat operator*(const Mat& a, const Mat& b) { return matmul(a, b); }
Vec operator*(const Mat& a, const Vec& x) { return matvec(a, x); }

CMat operator+(const CMat& a, const CMat& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "CMat+: shape mismatch");
    CMat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    return out;
}

CMat operator-(const CMat& a, const CMat& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "CMat-: shape mismatch");
    CMat out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    return out;
}

CMat cmatmul(const CMat& a, const CMat& b) {
    require(a.cols() == b.rows(), "cmatmul: inner dimension mismatch");
    CMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const cplx aip = a(i, p);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aip * b(p, j);
        }
    return c;
}

CMat operator*(const CMat& a, const CMat& b) { return cmatmul(a, b); }

CMat conj_transpose(const CMat& a) {
    CMat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = std::conj(a(i, j));
    return t;
}

double fro_norm(const Mat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

double fro_norm(const CMat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

double inf_norm(const Mat& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double max_abs(const Mat& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) best = std::max(best, std::abs(a(i, j)));
    return best;
}

double trace(const Mat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
    return s;
}

double dot(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

Vec vec_add(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "vec_add: length mismatch");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vec vec_sub(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "vec_sub: length mismatch");
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vec vec_scale(double s, const Vec& a) {
    Vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return out;
}

namespace {

void check_symmetric(const Mat& S, const char* who) {
    const double scale = fro_norm(S);
    const Mat d = S - transpose(S);
    if (fro_norm(d) > 1e-12 * std::max(scale, 1e-300))
        throw NonSymmetric(std::string(who) + ": matrix not symmetric within 1e-12 relative");
}

}  // namespace

Mat chol_lower(const Mat& S) {
    require(S.rows() == S.cols(), "chol_lower: matrix not square");
    check_symmetric(S, "chol_lower");
    const std::size_t n = S.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(S(i, i)));
    const double pivot_tol = static_cast<double>(n) * kEps * max_diag;

    Mat L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = S(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (d <= pivot_tol)
            throw NotPositiveDefinite("chol_lower: pivot " + std::to_string(d) + " at column " +
                                      std::to_string(j));
        L(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = S(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / L(j, j);
        }
    }
    return L;
}

EigResult sym_eig(const Mat& S) {
    require(S.rows() == S.cols(), "sym_eig: matrix not square");
    check_symmetric(S, "sym_eig");
    const std::size_t n = S.rows();
    Mat a = S;
    Mat v = Mat::identity(n);
    const double target = 1e-14 * fro_norm(S);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 128 && off_norm() > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    EigResult out;
    out.values.resize(n);
    out.vectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

Vec herm_eig(const CMat& H) {
    require(H.rows() == H.cols(), "herm_eig: matrix not square");
    const std::size_t n = H.rows();
    {
        const CMat d = H - conj_transpose(H);
        const double scale = fro_norm(H);
        if (fro_norm(d) > 1e-12 * std::max(scale, 1e-300))
            throw NonHermitian("herm_eig: matrix not Hermitian within 1e-12 relative");
    }
    // [[X, -Y], [Y, X]] has each Hermitian eigenvalue twice.
    Mat embed(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x = 0.5 * (H(i, j).real() + H(j, i).real());
            const double y = 0.5 * (H(i, j).imag() - H(j, i).imag());
            embed(i, j) = x;
            embed(n + i, n + j) = x;
            embed(i, n + j) = -y;
            embed(n + i, j) = y;
        }
    }
    const EigResult r = sym_eig(embed);
    Vec out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = r.values[2 * i];
    return out;
}

namespace {

struct LuFactors {
    Mat lu;
    std::vector<std::size_t> perm;
    int sign = 1;
};

LuFactors lu_factor(const Mat& A) {
    require(A.rows() == A.cols(), "lu: matrix not square");
    const std::size_t n = A.rows();
    const double tol = static_cast<double>(n) * kEps * inf_norm(A);
    LuFactors f{A, std::vector<std::size_t>(n), 1};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    Mat& a = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) { best = std::abs(a(i, k)); piv = i; }
        if (best < tol || best == 0.0)
            throw Singular("lu: pivot " + std::to_string(best) + " below tolerance at step " +
                           std::to_string(k));
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const double lik = a(i, k);
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
    return f;
}

}  // namespace

Mat lu_solve(const Mat& A, const Mat& B) {
    require(A.rows() == B.rows(), "lu_solve: RHS row count mismatch");
    const LuFactors f = lu_factor(A);
    const std::size_t n = A.rows(), k = B.cols();
    Mat x(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) x(i, j) = B(f.perm[i], j);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t p = 0; p < i; ++p) {
            const double l = f.lu(i, p);
            for (std::size_t j = 0; j < k; ++j) x(i, j) -= l * x(p, j);
        }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t p = ii + 1; p < n; ++p) {
            const double u = f.lu(ii, p);
            for (std::size_t j = 0; j < k; ++j) x(ii, j) -= u * x(p, j);
        }
        const double d = f.lu(ii, ii);
        for (std::size_t j = 0; j < k; ++j) x(ii, j) /= d;
    }
    return x;
}

Vec lu_solve(const Mat& A, const Vec& b) {
    Mat rhs(b.size(), 1);
    for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
    const Mat x = lu_solve(A, rhs);
    Vec out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(i, 0);
    return out;
}

double lu_det(const Mat& A) {
    LuFactors f;
    try {
        f = lu_factor(A);
    } catch (const Singular&) {
        return 0.0;
    }
    double d = f.sign;
    for (std::size_t i = 0; i < A.rows(); ++i) d *= f.lu(i, i);
    return d;
}

CMat clu_solve(const CMat& A, const CMat& B) {
    require(A.rows() == A.cols(), "clu_solve: matrix not square");
    require(A.rows() == B.rows(), "clu_solve: RHS row count mismatch");
    const std::size_t n = A.rows(), k = B.cols();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(A(i, j));
        scale = std::max(scale, s);
    }
    const double tol = static_cast<double>(n) * kEps * scale;

    CMat a = A;
    CMat x = B;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t kk = 0; kk < n; ++kk) {
        std::size_t piv = kk;
        double best = std::abs(a(kk, kk));
        for (std::size_t i = kk + 1; i < n; ++i)
            if (std::abs(a(i, kk)) > best) { best = std::abs(a(i, kk)); piv = i; }
        if (best < tol || best == 0.0)
            throw Singular("clu_solve: pivot below tolerance at step " + std::to_string(kk));
        if (piv != kk) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(kk, j), a(piv, j));
            for (std::size_t j = 0; j < k; ++j) std::swap(x(kk, j), x(piv, j));
        }
        for (std::size_t i = kk + 1; i < n; ++i) {
            const cplx l = a(i, kk) / a(kk, kk);
            a(i, kk) = l;
            for (std::size_t j = kk + 1; j < n; ++j) a(i, j) -= l * a(kk, j);
            for (std::size_t j = 0; j < k; ++j) x(i, j) -= l * x(kk, j);
        }
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t p = ii + 1; p < n; ++p) {
            const cplx u = a(ii, p);
            for (std::size_t j = 0; j < k; ++j) x(ii, j) -= u * x(p, j);
        }
        for (std::size_t j = 0; j < k; ++j) x(ii, j) /= a(ii, ii);
    }
    return x;
}

Mat mat_exp(const Mat& A) {
    require(A.rows() == A.cols(), "mat_exp: matrix not square");
    const std::size_t n = A.rows();
    const double norm = inf_norm(A);
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const double s = std::ldexp(1.0, -squarings);
    const Mat a = s * A;

    // Degree-6 diagonal Pade: N(a) = sum c_k a^k, D(a) = N(-a).
    double c[7];
    c[0] = 1.0;
    for (int k = 1; k <= 6; ++k) c[k] = c[k - 1] * (7.0 - k) / (k * (13.0 - k));

    Mat power = Mat::identity(n);
    Mat num = Mat::identity(n);
    Mat den = Mat::identity(n);
    double parity = 1.0;
    for (int k = 1; k <= 6; ++k) {
        power = power * a;
        parity = -parity;
        num = num + c[k] * power;
        den = den + (c[k] * parity) * power;
    }
    Mat x = lu_solve(den, num);
    for (int k = 0; k < squarings; ++k) x = x * x;
    return x;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const double w = a(ia, ja);
            if (w == 0.0) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    out(ia * b.rows() + ib, ja * b.cols() + jb) = w * b(ib, jb);
        }
    return out;
}

}  // namespace matkit
