#include "tspec/toeplitz.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace tspec {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

BandedToeplitz::BandedToeplitz(const ToeplitzSymbol& symbol, int n) {
  const int ell = symbol.bandwidth();
  if (n < 3) throw std::invalid_argument("banded Toeplitz needs n >= 3");
  if (ell >= n - 2)
    throw std::invalid_argument("bandwidth must satisfy ell < n - 2");
  if (ell > n / 2)
    std::cerr << "warning: bandwidth " << ell << " above n/2 = " << n / 2
              << "; diagonal rescaling exceeds 2x\n";
  n_ = n;
  ell_ = ell;
  symmetry_ = symbol.symmetry();
  rescaled_.assign(static_cast<size_t>(2 * ell + 1), cplx(0));
  real_ = true;
  for (int j = -ell; j <= ell; ++j) {
    const cplx v = static_cast<double>(n) / static_cast<double>(n - std::abs(j)) *
                   symbol.coeff(j);
    rescaled_[static_cast<size_t>(ell + j)] = v;
    if (v.imag() != 0.0) real_ = false;
  }
}

cplx BandedToeplitz::coeff(int j) const {
  if (j < -ell_ || j > ell_) return cplx(0);
  return rescaled_[static_cast<size_t>(ell_ + j)];
}

BandedToeplitz BandedToeplitz::conjugate_transpose() const {
  BandedToeplitz out;
  out.n_ = n_;
  out.ell_ = ell_;
  out.real_ = real_;
  out.symmetry_ = symmetry_;
  out.rescaled_.assign(rescaled_.size(), cplx(0));
  for (int j = -ell_; j <= ell_; ++j)
    out.rescaled_[static_cast<size_t>(ell_ + j)] =
        std::conj(rescaled_[static_cast<size_t>(ell_ - j)]);
  return out;
}

BandedToeplitz BandedToeplitz::transpose() const {
  BandedToeplitz out;
  out.n_ = n_;
  out.ell_ = ell_;
  out.real_ = real_;
  out.symmetry_ = symmetry_;
  out.rescaled_.assign(rescaled_.size(), cplx(0));
  for (int j = -ell_; j <= ell_; ++j)
    out.rescaled_[static_cast<size_t>(ell_ + j)] = rescaled_[static_cast<size_t>(ell_ - j)];
  return out;
}

MatrixXcd BandedToeplitz::dense() const {
  MatrixXcd out = MatrixXcd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - ell_); j <= std::min(n_ - 1, i + ell_); ++j)
      out(i, j) = coeff(j - i);
  return out;
}

BandedToeplitz build_banded(const ToeplitzSymbol& symbol, int n) {
  return BandedToeplitz(symbol, n);
}

namespace {

bool use_fft(const BandedToeplitz& t, ApplyPath path) {
  if (path == ApplyPath::band) return false;
  if (path == ApplyPath::fft) return true;
  const double log2n = std::log2(static_cast<double>(t.order()));
  return static_cast<double>(t.bandwidth()) > log2n;
}

// y_k = sum_j a_j x_{k-j}, zero-padded outside [0, n)
void band_apply_row(const BandedToeplitz& t, const VectorXcd& x, VectorXcd& y) {
  const int n = t.order();
  const int ell = t.bandwidth();
  y.setZero(n);
  for (int j = -ell; j <= ell; ++j) {
    const cplx a = t.coeff(j);
    if (a == cplx(0)) continue;
    const int lo = std::max(0, j);
    const int hi = std::min(n, n + j);
    for (int k = lo; k < hi; ++k) y[k] += a * x[k - j];
  }
}

size_t fft_length(int n, int ell) {
  size_t want = static_cast<size_t>(n) + 2 * static_cast<size_t>(ell) + 1;
  size_t len = 1;
  while (len < want) len <<= 1;
  return len;
}

}  // namespace

MatrixXcd apply_right(const MatrixXcd& m, const BandedToeplitz& t, ApplyPath path) {
  const int n = t.order();
  const int ell = t.bandwidth();
  if (m.cols() != n)
    throw std::invalid_argument("apply_right: column count must equal Toeplitz order");
  MatrixXcd out(m.rows(), n);
  if (!use_fft(t, path)) {
    VectorXcd x(n), y(n);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      x = m.row(r).transpose();
      band_apply_row(t, x, y);
      out.row(r) = y.transpose();
    }
    return out;
  }
  const size_t len = fft_length(n, ell);
  std::vector<cplx> kernel(len, cplx(0));
  kernel[0] = t.coeff(0);
  for (int j = 1; j <= ell; ++j) {
    kernel[static_cast<size_t>(j)] = t.coeff(j);
    kernel[len - static_cast<size_t>(j)] = t.coeff(-j);
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> kf(len);
  fft.fwd(kf, kernel);
  std::vector<cplx> buf(len), bf(len);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::fill(buf.begin(), buf.end(), cplx(0));
    for (int k = 0; k < n; ++k) buf[static_cast<size_t>(k)] = m(r, k);
    fft.fwd(bf, buf);
    for (size_t i = 0; i < len; ++i) bf[i] *= kf[i];
    fft.inv(buf, bf);
    for (int k = 0; k < n; ++k) out(r, k) = buf[static_cast<size_t>(k)];
  }
  return out;
}

MatrixXcd apply_right(const MatrixXd& m, const BandedToeplitz& t, ApplyPath path) {
  return apply_right(MatrixXcd(m.cast<cplx>()), t, path);
}

MatrixXcd apply_left(const BandedToeplitz& t, const MatrixXcd& m, ApplyPath path) {
  // T M = (M^T T^T)^T; T^T mirrors the diagonals without conjugation.
  const MatrixXcd mt = m.transpose();
  return apply_right(mt, t.transpose(), path).transpose();
}

MatrixXcd apply_sandwich(const MatrixXcd& k, const BandedToeplitz& t, ApplyPath path) {
  if (k.rows() != k.cols() || k.rows() != t.order())
    throw std::invalid_argument("apply_sandwich needs a square matrix of the Toeplitz order");
  const MatrixXcd tk = apply_left(t, k, path);
  return apply_right(tk, t.conjugate_transpose(), path);
}

MatrixXcd apply_sandwich(const MatrixXd& k, const BandedToeplitz& t, ApplyPath path) {
  return apply_sandwich(MatrixXcd(k.cast<cplx>()), t, path);
}

MatrixXd center(const MatrixXd& m, CenterMode mode) {
  if (mode == CenterMode::columns) {
    return m.colwise() - m.rowwise().mean();
  }
  if (m.rows() != m.cols())
    throw std::invalid_argument("gram centering needs a square matrix");
  const double n = static_cast<double>(m.rows());
  MatrixXd out = m;
  const Eigen::VectorXd rm = out.rowwise().mean();
  out.colwise() -= rm;
  const Eigen::RowVectorXd cm = out.colwise().mean();
  out.rowwise() -= cm;
  return out / n;
}

MatrixXcd center(const MatrixXcd& m, CenterMode mode) {
  if (mode == CenterMode::columns) {
    return m.colwise() - m.rowwise().mean();
  }
  if (m.rows() != m.cols())
    throw std::invalid_argument("gram centering needs a square matrix");
  const double n = static_cast<double>(m.rows());
  MatrixXcd out = m;
  const Eigen::VectorXcd rm = out.rowwise().mean();
  out.colwise() -= rm;
  const Eigen::RowVectorXcd cm = out.colwise().mean();
  out.rowwise() -= cm;
  return out / n;
}

}  // namespace tspec
