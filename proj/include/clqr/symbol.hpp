#pragma once

#include <stdexcept>
#include <vector>

#include "clqr/condense.hpp"
#include "clqr/matkit.hpp"

// Matrix symbols of the prediction matrix and the condensed Hessian,
// unit-circle spectral sweeps, and horizon-independent eigenvalue and
// condition-number bounds.
//
// A symbol exists only for a Schur-stable A_c: the block Fourier series
// sum_{i>=0} A_c^i B z^{-i} is a convergent Neumann series exactly then,
// giving the prediction symbol z (zI - A_c)^{-1} B.

namespace clqr {

using matkit::CMat;

struct SymbolUnavailable : std::runtime_error {
    explicit SymbolUnavailable(const std::string& what) : std::runtime_error(what) {}
};
struct SingularResolvent : std::runtime_error {
    explicit SingularResolvent(const std::string& what) : std::runtime_error(what) {}
};
struct ContainmentViolated : std::runtime_error {
    ContainmentViolated(const std::string& what, double eigenvalue, int horizon)
        : std::runtime_error(what), eigenvalue(eigenvalue), horizon(horizon) {}
    double eigenvalue;
    int horizon;
};

enum class SymbolKind { Prediction, Hessian, PreconditionedHessian };

struct MatrixSymbol {
    SymbolKind kind = SymbolKind::Hessian;
    Mat A_c;
    Mat B;
    Mat Q_c;       // Hessian kinds only
    Mat R;         // Hessian kinds only
    Mat transform;  // m x m left factor L^{-1}; PreconditionedHessian only
    StabilityCertificate cert;

    std::size_t block_rows() const {
        return kind == SymbolKind::Prediction ? A_c.rows() : B.cols();
    }
    std::size_t block_cols() const { return B.cols(); }
};

/// Factories certify Schur stability of A_c and throw SymbolUnavailable
/// when the certificate fails.
MatrixSymbol prediction_symbol(const Mat& A_c, const Mat& B);
MatrixSymbol hessian_symbol(const Mat& A_c, const Mat& B, const Mat& Q_c, const Mat& R);
MatrixSymbol hessian_symbol(const CondensedQp& qp);

/// Evaluates the symbol at z = e^{i theta}. Hessian kinds come back
/// re-Hermitianized.
CMat eval_symbol(const MatrixSymbol& sym, double theta);

struct SpectralBounds {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double kappa = 0.0;
    int grid_points = 0;
    double argmin_theta = 0.0;
    double argmax_theta = 0.0;
};

/// Extreme symbol eigenvalues over the unit circle: a uniform grid on
/// [0, pi] (the spectrum at -theta matches by conjugate symmetry) followed
/// by golden-section refinement around the grid extrema. Grid evaluations
/// run in parallel with an index-ordered reduction, so the result does not
/// depend on scheduling.
SpectralBounds symbol_bounds(const MatrixSymbol& sym, int grid = 4096,
                             double refine_tol = 1e-10);

/// Fourier coefficients (1/2pi) Int P(e^{i theta}) e^{i theta j} d theta for
/// j = 0..count-1, by the trapezoid rule on quad_points >= 4096 uniform
/// points. Coefficient j of the prediction symbol is A_c^j B.
std::vector<Mat> fourier_coefficients(const MatrixSymbol& sym, int count,
                                      int quad_points = 8192);

struct ContainmentReport {
    int horizon = 0;
    double lo_margin = 0.0;  // min eigenvalue minus lambda_min
    double hi_margin = 0.0;  // lambda_max minus max eigenvalue
    double smallest_eig = 0.0;
    double largest_eig = 0.0;
};

/// Asserts every Hessian eigenvalue sits inside
/// [lambda_min - tol, lambda_max + tol] with tol = 1e-8 * lambda_max.
/// Throws ContainmentViolated with the offending eigenvalue otherwise.
ContainmentReport verify_containment(const CondensedQp& qp, const SpectralBounds& bounds);

}  // namespace clqr
