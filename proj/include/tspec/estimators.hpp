#pragma once
// Reduced-rank spectral estimators. Both modes whiten a Toeplitz-filtered
// covariance against a Tikhonov-regularized Gram/covariance, solve a
// positive-definite generalized eigenvalue problem for the leading subspace,
// and eigendecompose the compressed operator there. The expensive
// factorization of the regularized right-hand matrix depends only on
// (data, gamma) and is exposed as a reusable factor so sweeps over symbols
// share it.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <vector>

#include "tspec/symbols.hpp"
#include "tspec/toeplitz.hpp"

namespace tspec {

enum class FitMode { primal, dual };

struct EstimatorConfig {
  FitMode mode = FitMode::primal;
  ToeplitzSymbol symbol;
  double gamma = 1e-6;
  int rank = 5;
  ApplyPath path = ApplyPath::automatic;
};

// Eigentriplets of a small dense matrix with exact biorthogonal scaling
// (left_i^H right_j = delta_ij), sorted by descending |value|.
struct SmallEig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd left;   // columns w^l_i
  Eigen::MatrixXcd right;  // columns w^r_i
};

// structure selects a numerically exact path: hermitian inputs yield real
// values, skew inputs purely imaginary ones. With structure == general the
// matrix is inspected and upgraded when it is numerically structured.
// Defective input (right-eigenvector condition number > 1e12) throws: the
// estimator rests on a non-defectiveness assumption for the compressed
// operator.
SmallEig eig_small(const Eigen::MatrixXcd& m, Symmetry structure = Symmetry::general);

// Top-r eigenpairs of Mleft v = value * Mright v with Mleft Hermitian PSD and
// Mright Hermitian PD, normalized v_i^H Mright v_i = 1, values descending.
// A degenerate block straddling the rank-r cut is kept whole, so the result
// may hold more than r pairs.
struct GepResult {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};
GepResult solve_spd_gep(const Eigen::MatrixXcd& mleft, const Eigen::MatrixXcd& mright, int r);

struct SpectralDecomposition {
  FitMode mode = FitMode::primal;
  ToeplitzSymbol symbol;
  double gamma = 0.0;
  int requested_rank = 0;
  int effective_rank = 0;  // after degenerate-block extension at the cut
  Eigen::Index n = 0;      // training samples
  Eigen::Index m = 0;      // dictionary size (primal), 0 for dual

  // All sorted by descending |eigenvalue|; singular_values descending
  // separately (subspace energies, not aligned with eigenvalue index).
  Eigen::VectorXcd eigenvalues;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXcd left_coeffs;   // m x r (primal, dictionary) or n x r (dual, representer)
  Eigen::MatrixXcd right_coeffs;  // same shapes
  // False where |eigenvalue| is numerically zero and the biorthogonal left
  // scaling (division by its conjugate) is ill-posed; such columns keep the
  // unscaled left coefficients.
  std::vector<bool> usable;

  // Training context for pairings, evaluation, and operator application.
  Eigen::MatrixXd features;   // primal: raw m x n feature matrix
  Eigen::MatrixXd gram;       // dual: raw n x n Gram matrix
  Eigen::MatrixXcd filtered;  // primal: W = (1/n) Zc T Zc^H (m x m)
  Eigen::MatrixXcd subspace;  // V_r columns (primal m x r, dual n x r)
  Eigen::MatrixXcd dual_basis;  // dual only: U_r columns (n x r)
};

// Cache of everything gamma- and data-dependent but symbol-independent on the
// feature side: centered features and the Cholesky factor of the regularized
// covariance (1/n) Zc Zc^T + gamma I.
class PrimalFactor {
 public:
  PrimalFactor(Eigen::MatrixXd features, double gamma);

  Eigen::Index m() const { return features_.rows(); }
  Eigen::Index n() const { return features_.cols(); }
  double gamma() const { return gamma_; }
  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::MatrixXd& centered() const { return centered_; }

  // W = (1/n) Zc T Zc^H, the symbol-weighted sum of lagged covariances.
  Eigen::MatrixXcd filtered_covariance(const BandedToeplitz& t,
                                       ApplyPath path = ApplyPath::automatic) const;
  // L^-1 W L^-H: the fitted map expressed in the whitened feature basis; its
  // top singular value is the operator-norm proxy used by transient-growth
  // estimates.
  Eigen::MatrixXcd whitened(const Eigen::MatrixXcd& w) const;

  // Triangular solves against the real Cholesky factor, complex RHS.
  Eigen::MatrixXcd solve_lower(const Eigen::MatrixXcd& rhs) const;        // L x = rhs
  Eigen::MatrixXcd solve_upper_conj(const Eigen::MatrixXcd& rhs) const;   // L^H x = rhs

 private:
  Eigen::MatrixXd features_;
  Eigen::MatrixXd centered_;
  double gamma_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

// Kernel-side analogue: eigendecomposition of the centered Gram
// Kbar = (1/n) J K J, from which all whitening/recovery transforms with a
// given gamma are spectral functions.
class DualFactor {
 public:
  DualFactor(Eigen::MatrixXd gram_matrix, double gamma);

  Eigen::Index n() const { return gram_.rows(); }
  double gamma() const { return gamma_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& centered_gram() const { return centered_; }
  int numeric_rank() const { return rank_; }

  // D T D with D = Kbar^{1/2} (Kbar + gamma I)^{-1/2}: the fitted map in the
  // whitened sample basis (kernel counterpart of PrimalFactor::whitened).
  Eigen::MatrixXcd whitened(const BandedToeplitz& t,
                            ApplyPath path = ApplyPath::automatic) const;

  const Eigen::MatrixXd& half_whitener() const { return d_; }
  // Maps whitened-basis vectors q back to sample coefficients
  // u = Kbar^{-1/2} (Kbar + gamma I)^{-1/2} q (pseudo-inverse on the numeric
  // rank), the GEP normalization u^H Kbar (Kbar + gamma I) u = 1 built in.
  const Eigen::MatrixXd& recovery() const { return e_; }

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd centered_;
  double gamma_;
  int rank_ = 0;
  Eigen::MatrixXd d_;  // spectral sqrt(lambda/(lambda+gamma))
  Eigen::MatrixXd e_;  // spectral 1/sqrt(lambda (lambda+gamma)) on lambda > tol
};

// features is the raw m x n dictionary-evaluation matrix (features x samples).
SpectralDecomposition fit_primal(const Eigen::MatrixXd& features, const EstimatorConfig& cfg);
SpectralDecomposition fit_primal(const PrimalFactor& factor, const EstimatorConfig& cfg);

// gram_matrix is the raw n x n kernel Gram over training samples.
SpectralDecomposition fit_dual(const Eigen::MatrixXd& gram_matrix, const EstimatorConfig& cfg);
SpectralDecomposition fit_dual(const DualFactor& factor, const EstimatorConfig& cfg);

}  // namespace tspec
