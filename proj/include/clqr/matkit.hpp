#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

// Dense real/complex linear-algebra kernels used by every other module.
// Self-contained: no BLAS/LAPACK. Sizes are desk-scale (a few hundred rows),
// so the kernels favor clarity and deterministic results over blocking.
//
// matmul runs its row loop under OpenMP when the product is large enough;
// serial::matmul is the reference kernel kept for testing and benchmarking.
// Both accumulate each output entry in the same index order, so their
// results are bit-identical.

namespace matkit {

using Vec = std::vector<double>;
using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

struct NotPositiveDefinite : std::runtime_error {
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};
struct NonSymmetric : std::runtime_error {
    explicit NonSymmetric(const std::string& what) : std::runtime_error(what) {}
};
struct NonHermitian : std::runtime_error {
    explicit NonHermitian(const std::string& what) : std::runtime_error(what) {}
};
struct Singular : std::runtime_error {
    explicit Singular(const std::string& what) : std::runtime_error(what) {}
};

/// Row-major dense real matrix.
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols, 0.0) {}
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(std::size_t n);
    static Mat diag(const Vec& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    double* data() { return e_.data(); }
    const double* data() const { return e_.data(); }

    Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const Mat& src);

    Vec col(std::size_t j) const;
    Vec row(std::size_t i) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vec e_;
};

/// Row-major dense complex matrix.
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}

    static CMat identity(std::size_t n);
    static CMat from_real(const Mat& re);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0, cols_ = 0;
    CVec e_;
};

// ---- arithmetic ----

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double s, const Mat& a);
Mat operator*(const Mat& a, const Mat& b);  // = matmul
Vec operator*(const Mat& a, const Vec& x);  // = matvec

Mat matmul(const Mat& a, const Mat& b);
Vec matvec(const Mat& a, const Vec& x);
Mat transpose(const Mat& a);

namespace serial {
Mat matmul(const Mat& a, const Mat& b);
}

CMat operator+(const CMat& a, const CMat& b);
CMat operator-(const CMat& a, const CMat& b);
CMat operator*(const CMat& a, const CMat& b);
CMat cmatmul(const CMat& a, const CMat& b);
CMat conj_transpose(const CMat& a);

// ---- norms, reductions ----

double fro_norm(const Mat& a);
double fro_norm(const CMat& a);
double inf_norm(const Mat& a);   // max row sum
double max_abs(const Mat& a);
double trace(const Mat& a);

// ---- vector helpers ----

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_scale(double s, const Vec& a);

// ---- factorizations and solvers ----

/// Cholesky factor of a symmetric positive-definite matrix.
/// Returns lower-triangular L with L*L^T = S. Throws NotPositiveDefinite
/// when a pivot falls at or below n*eps*max_diag.
Mat chol_lower(const Mat& S);

struct EigResult {
    Vec values;   // ascending
    Mat vectors;  // orthonormal columns, S*V = V*diag(values)
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm is <= 1e-14 * ||S||_F.
EigResult sym_eig(const Mat& S);

/// Eigenvalues of a Hermitian matrix, ascending. Embeds X+iY into the
/// 2n x 2n real symmetric [[X,-Y],[Y,X]] whose spectrum is the doubled
/// Hermitian spectrum, and keeps every second value.
Vec herm_eig(const CMat& H);

/// Solves A*X = B with partial-pivoting LU. Throws Singular when a pivot
/// magnitude drops below n*eps*||A||_inf.
Mat lu_solve(const Mat& A, const Mat& B);
Vec lu_solve(const Mat& A, const Vec& b);

/// Determinant via the same LU factorization (product of pivots).
double lu_det(const Mat& A);

/// Complex analogue of lu_solve.
CMat clu_solve(const CMat& A, const CMat& B);

/// Matrix exponential by scaling-and-squaring with a degree-6 diagonal
/// Pade approximant.
Mat mat_exp(const Mat& A);

/// Kronecker product.
Mat kron(const Mat& a, const Mat& b);

}  // namespace matkit
