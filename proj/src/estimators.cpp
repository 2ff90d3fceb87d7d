#include "tspec/estimators.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tspec {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Degenerate blocks straddling the cut are kept whole: truncating inside a
// tied group is not reproducible across BLAS backends.
int extend_for_ties(const VectorXd& desc, int r) {
  int reff = r;
  const double cut = desc[r - 1];
  if (cut > 0.0) {
    const double threshold = cut * (1.0 - 1e-8);
    while (reff < desc.size() && desc[reff] >= threshold) ++reff;
  }
  return reff;
}

// Descending |value| with a deterministic tie-break (Im, then Re, descending)
// so conjugate pairs always come out +/- ordered.
std::vector<int> order_by_magnitude(const VectorXcd& values) {
  std::vector<int> idx(static_cast<size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    const double ma = std::abs(values[a]), mb = std::abs(values[b]);
    if (ma != mb) return ma > mb;
    if (values[a].imag() != values[b].imag()) return values[a].imag() > values[b].imag();
    return values[a].real() > values[b].real();
  });
  return idx;
}

SmallEig sorted_triplets(const VectorXcd& values, const MatrixXcd& left,
                         const MatrixXcd& right) {
  const auto idx = order_by_magnitude(values);
  SmallEig out;
  const Index r = values.size();
  out.values.resize(r);
  out.left.resize(left.rows(), r);
  out.right.resize(right.rows(), r);
  for (Index i = 0; i < r; ++i) {
    out.values[i] = values[idx[static_cast<size_t>(i)]];
    out.left.col(i) = left.col(idx[static_cast<size_t>(i)]);
    out.right.col(i) = right.col(idx[static_cast<size_t>(i)]);
  }
  return out;
}

Eigen::MatrixXcd center_each_column(Eigen::MatrixXcd x) {
  x.rowwise() -= x.colwise().mean();
  return x;
}

void check_common(const EstimatorConfig& cfg, FitMode expected) {
  if (cfg.mode != expected)
    throw std::invalid_argument("estimator config mode does not match the fit entry point");
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (cfg.rank < 1) throw std::invalid_argument("rank must be >= 1");
}

// Divide left coefficients by conj(eigenvalue) so left^H K right = delta;
// numerically zero eigenvalues make that ill-posed and are flagged instead.
std::vector<bool> biorthogonal_scale(const VectorXcd& values, MatrixXcd& left) {
  std::vector<bool> usable(static_cast<size_t>(values.size()), false);
  double vmax = 0.0;
  for (Index i = 0; i < values.size(); ++i) vmax = std::max(vmax, std::abs(values[i]));
  const double floor_abs = 1e-12 * vmax;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::abs(values[i]) > floor_abs && vmax > 0.0) {
      left.col(i) /= std::conj(values[i]);
      usable[static_cast<size_t>(i)] = true;
    }
  }
  return usable;
}

}  // namespace

SmallEig eig_small(const MatrixXcd& m, Symmetry structure) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("eig_small needs a nonempty square matrix");
  const Index r = m.rows();
  const double scale = m.cwiseAbs().maxCoeff();

  Symmetry s = structure;
  if (s == Symmetry::general && scale > 0.0) {
    const double herm_dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    const double skew_dev = (m + m.adjoint()).cwiseAbs().maxCoeff();
    if (herm_dev <= 1e-13 * scale)
      s = Symmetry::hermitian;
    else if (skew_dev <= 1e-13 * scale)
      s = Symmetry::skew;
  }

  if (s == Symmetry::hermitian) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (m + m.adjoint()));
    if (es.info() != Eigen::Success)
      throw std::runtime_error("hermitian eigendecomposition failed to converge");
    const VectorXcd values = es.eigenvalues().cast<cplx>();
    return sorted_triplets(values, es.eigenvectors(), es.eigenvectors());
  }
  if (s == Symmetry::skew) {
    const MatrixXcd h = cplx(0.0, 0.5) * (m - m.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("skew eigendecomposition failed to converge");
    const VectorXcd values = cplx(0.0, -1.0) * es.eigenvalues().cast<cplx>();
    return sorted_triplets(values, es.eigenvectors(), es.eigenvectors());
  }

  Eigen::ComplexEigenSolver<MatrixXcd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed to converge");
  const MatrixXcd& p = es.eigenvectors();
  Eigen::JacobiSVD<MatrixXcd> svd(p);
  const double smin = svd.singularValues()(r - 1);
  const double smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw std::runtime_error(
        "compressed operator is numerically defective (eigenvector condition number above "
        "1e12); the estimator assumes a non-defective compression");
  const MatrixXcd pinv = p.inverse();
  // left column i = (row i of P^-1)^H, so left^H right = P^-1 P = I exactly.
  return sorted_triplets(es.eigenvalues(), pinv.adjoint(), p);
}

GepResult solve_spd_gep(const MatrixXcd& mleft, const MatrixXcd& mright, int r) {
  if (mleft.rows() != mleft.cols() || mright.rows() != mright.cols() ||
      mleft.rows() != mright.rows())
    throw std::invalid_argument("generalized eigenproblem needs matching square matrices");
  const Index n = mleft.rows();
  if (r < 1 || r > n) throw std::invalid_argument("rank outside [1, n]");

  Eigen::LLT<MatrixXcd> llt(0.5 * (mright + mright.adjoint()));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "right-hand matrix is not positive definite (Cholesky failed); the regularization "
        "is too small or the Gram matrix is numerically broken");
  const MatrixXcd half = llt.matrixL().solve(MatrixXcd(0.5 * (mleft + mleft.adjoint())));
  const MatrixXcd tmp = llt.matrixL().solve(MatrixXcd(half.adjoint()));
  const MatrixXcd b = tmp.adjoint();  // L^-1 Mleft L^-H
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (b + b.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("whitened eigendecomposition failed to converge");

  const VectorXd desc = es.eigenvalues().reverse();
  const int reff = extend_for_ties(desc, r);
  GepResult out;
  out.values = desc.head(reff);
  MatrixXcd y(n, reff);
  for (int i = 0; i < reff; ++i) y.col(i) = es.eigenvectors().col(n - 1 - i);
  out.vectors = llt.matrixU().solve(y);
  return out;
}

PrimalFactor::PrimalFactor(MatrixXd features, double gamma)
    : features_(std::move(features)), gamma_(gamma) {
  if (!(gamma_ > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (features_.rows() < 1 || features_.cols() < 3)
    throw std::invalid_argument("feature matrix too small");
  if (features_.cols() <= features_.rows())
    std::cerr << "warning: fewer samples than features; covariance estimates are degenerate\n";
  centered_ = center(features_, CenterMode::columns);
  MatrixXd cg = (centered_ * centered_.transpose()) / static_cast<double>(n());
  cg.diagonal().array() += gamma_;
  llt_.compute(cg);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("regularized covariance is not positive definite");
}

MatrixXcd PrimalFactor::filtered_covariance(const BandedToeplitz& t, ApplyPath path) const {
  if (t.order() != n()) throw std::invalid_argument("Toeplitz order does not match sample count");
  const MatrixXcd zf = apply_right(centered_, t, path);
  return (zf * centered_.transpose()) / static_cast<double>(n());
}

MatrixXcd PrimalFactor::solve_lower(const MatrixXcd& rhs) const {
  MatrixXcd out(rhs.rows(), rhs.cols());
  out.real() = llt_.matrixL().solve(rhs.real().eval());
  out.imag() = llt_.matrixL().solve(rhs.imag().eval());
  return out;
}

MatrixXcd PrimalFactor::solve_upper_conj(const MatrixXcd& rhs) const {
  MatrixXcd out(rhs.rows(), rhs.cols());
  out.real() = llt_.matrixU().solve(rhs.real().eval());
  out.imag() = llt_.matrixU().solve(rhs.imag().eval());
  return out;
}

MatrixXcd PrimalFactor::whitened(const MatrixXcd& w) const {
  const MatrixXcd s = solve_lower(w);
  return solve_lower(s.adjoint()).adjoint();
}

DualFactor::DualFactor(MatrixXd gram_matrix, double gamma)
    : gram_(std::move(gram_matrix)), gamma_(gamma) {
  if (!(gamma_ > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (gram_.rows() != gram_.cols() || gram_.rows() < 3)
    throw std::invalid_argument("Gram matrix must be square with at least 3 samples");
  const double gscale = gram_.cwiseAbs().maxCoeff();
  if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(gscale, 1.0))
    throw std::invalid_argument("Gram matrix must be symmetric");
  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();
  centered_ = center(gram_, CenterMode::gram);
  centered_ = 0.5 * (centered_ + centered_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(centered_);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("centered Gram eigendecomposition failed to converge");
  const VectorXd& lambda = es.eigenvalues();
  const MatrixXd& q = es.eigenvectors();
  const double lmax = lambda.maxCoeff();
  if (!(lmax > 0.0)) throw std::runtime_error("centered Gram matrix is numerically zero");
  const double tol =
      static_cast<double>(n()) * std::numeric_limits<double>::epsilon() * lmax;

  VectorXd dspec(lambda.size()), espec(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    const double lp = std::max(lambda[i], 0.0);
    dspec[i] = std::sqrt(lp / (lambda[i] + gamma_));
    if (lambda[i] > tol) {
      espec[i] = 1.0 / std::sqrt(lambda[i] * (lambda[i] + gamma_));
      ++rank_;
    } else {
      espec[i] = 0.0;
    }
  }
  d_ = q * dspec.asDiagonal() * q.transpose();
  e_ = q * espec.asDiagonal() * q.transpose();
}

MatrixXcd DualFactor::whitened(const BandedToeplitz& t, ApplyPath path) const {
  if (t.order() != n()) throw std::invalid_argument("Toeplitz order does not match sample count");
  const MatrixXcd td = apply_left(t, MatrixXcd(d_.cast<cplx>()), path);
  return d_ * td;
}

SpectralDecomposition fit_primal(const PrimalFactor& factor, const EstimatorConfig& cfg) {
  check_common(cfg, FitMode::primal);
  if (cfg.gamma != factor.gamma())
    throw std::invalid_argument("config gamma differs from the cached factor's gamma");
  const Index n = factor.n();
  const Index m = factor.m();
  if (cfg.rank > m) throw std::invalid_argument("rank exceeds the dictionary size");

  const BandedToeplitz t(cfg.symbol, static_cast<int>(n));
  const MatrixXcd w = factor.filtered_covariance(t, cfg.path);
  const MatrixXcd s = factor.solve_lower(w);
  const MatrixXcd b = s * s.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (b + b.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("whitened eigendecomposition failed to converge");

  const VectorXd desc = es.eigenvalues().reverse();
  const int reff = extend_for_ties(desc, cfg.rank);
  MatrixXcd y(m, reff);
  for (int i = 0; i < reff; ++i) y.col(i) = es.eigenvectors().col(m - 1 - i);
  const MatrixXcd v = factor.solve_upper_conj(y);

  const MatrixXcd mr = v.adjoint() * (w * v);
  const SmallEig se = eig_small(mr, cfg.symbol.symmetry());

  SpectralDecomposition dec;
  dec.mode = FitMode::primal;
  dec.symbol = cfg.symbol;
  dec.gamma = cfg.gamma;
  dec.requested_rank = cfg.rank;
  dec.effective_rank = reff;
  dec.n = n;
  dec.m = m;
  dec.eigenvalues = se.values;
  dec.singular_values = desc.head(reff).cwiseMax(0.0).cwiseSqrt();
  dec.right_coeffs = v * se.right;
  dec.left_coeffs = w.adjoint() * (v * se.left);
  dec.usable = biorthogonal_scale(dec.eigenvalues, dec.left_coeffs);
  dec.features = factor.features();
  dec.filtered = w;
  dec.subspace = v;
  return dec;
}

SpectralDecomposition fit_primal(const MatrixXd& features, const EstimatorConfig& cfg) {
  check_common(cfg, FitMode::primal);
  const PrimalFactor factor(features, cfg.gamma);
  return fit_primal(factor, cfg);
}

SpectralDecomposition fit_dual(const DualFactor& factor, const EstimatorConfig& cfg) {
  check_common(cfg, FitMode::dual);
  if (cfg.gamma != factor.gamma())
    throw std::invalid_argument("config gamma differs from the cached factor's gamma");
  const Index n = factor.n();
  if (cfg.rank > n) throw std::invalid_argument("rank exceeds the sample count");
  if (cfg.rank > factor.numeric_rank())
    std::cerr << "warning: requested rank exceeds the numeric rank of the centered Gram ("
              << factor.numeric_rank() << ")\n";

  const BandedToeplitz t(cfg.symbol, static_cast<int>(n));
  const MatrixXcd a = apply_sandwich(factor.centered_gram(), t, cfg.path);
  const MatrixXd& d = factor.half_whitener();
  const MatrixXcd c = d * a * d;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (c + c.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("whitened eigendecomposition failed to converge");

  const VectorXd desc = es.eigenvalues().reverse();
  const int reff = extend_for_ties(desc, cfg.rank);
  MatrixXcd q(n, reff);
  for (int i = 0; i < reff; ++i) q.col(i) = es.eigenvectors().col(n - 1 - i);
  const MatrixXcd u = factor.recovery() * q;
  const MatrixXcd v = factor.centered_gram() * u;

  const MatrixXcd tv = apply_left(t, v, cfg.path);
  const MatrixXcd mr = v.adjoint() * tv;
  const SmallEig se = eig_small(mr, cfg.symbol.symmetry());

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const BandedToeplitz th = t.conjugate_transpose();

  SpectralDecomposition dec;
  dec.mode = FitMode::dual;
  dec.symbol = cfg.symbol;
  dec.gamma = cfg.gamma;
  dec.requested_rank = cfg.rank;
  dec.effective_rank = reff;
  dec.n = n;
  dec.m = 0;
  dec.eigenvalues = se.values;
  dec.singular_values = desc.head(reff).cwiseMax(0.0).cwiseSqrt();
  dec.right_coeffs = inv_sqrt_n * center_each_column(u * se.right);
  dec.left_coeffs =
      inv_sqrt_n * center_each_column(apply_left(th, MatrixXcd(v * se.left), cfg.path));
  dec.usable = biorthogonal_scale(dec.eigenvalues, dec.left_coeffs);
  dec.gram = factor.gram();
  dec.subspace = v;
  dec.dual_basis = u;
  return dec;
}

SpectralDecomposition fit_dual(const MatrixXd& gram_matrix, const EstimatorConfig& cfg) {
  check_common(cfg, FitMode::dual);
  const DualFactor factor(gram_matrix, cfg.gamma);
  return fit_dual(factor, cfg);
}

}  // namespace tspec
