#pragma once
// Banded Toeplitz action on sample space. Entries are the symbol coefficients
// rescaled by n/(n-|j|) so each diagonal's sample average is unbiased, and the
// matrix is only ever applied (band loop or FFT circulant embedding), never
// materialized, outside of debugging dumps.

#include <Eigen/Dense>

#include "tspec/symbols.hpp"

namespace tspec {

enum class ApplyPath { automatic, band, fft };
enum class CenterMode { columns, gram };

class BandedToeplitz {
 public:
  BandedToeplitz(const ToeplitzSymbol& symbol, int n);

  int order() const { return n_; }
  int bandwidth() const { return ell_; }
  Symmetry symmetry() const { return symmetry_; }
  cplx coeff(int j) const;  // rescaled diagonal value, j in [-ell, ell]
  bool is_real() const { return real_; }

  BandedToeplitz conjugate_transpose() const;
  BandedToeplitz transpose() const;

  // Dense materialization; debugging and oracle comparisons only.
  Eigen::MatrixXcd dense() const;

 private:
  BandedToeplitz() = default;
  int n_ = 0;
  int ell_ = 0;
  std::vector<cplx> rescaled_;  // index j + ell
  Symmetry symmetry_ = Symmetry::general;
  bool real_ = false;
};

BandedToeplitz build_banded(const ToeplitzSymbol& symbol, int n);

// M * T for row-major sample axes: M is p x n, result p x n.
Eigen::MatrixXcd apply_right(const Eigen::MatrixXcd& m, const BandedToeplitz& t,
                             ApplyPath path = ApplyPath::automatic);
Eigen::MatrixXcd apply_right(const Eigen::MatrixXd& m, const BandedToeplitz& t,
                             ApplyPath path = ApplyPath::automatic);

// T * M for column vectors stacked in M (n x q).
Eigen::MatrixXcd apply_left(const BandedToeplitz& t, const Eigen::MatrixXcd& m,
                            ApplyPath path = ApplyPath::automatic);

// T * K * T^H for Hermitian K (n x n).
Eigen::MatrixXcd apply_sandwich(const Eigen::MatrixXcd& k, const BandedToeplitz& t,
                                ApplyPath path = ApplyPath::automatic);
Eigen::MatrixXcd apply_sandwich(const Eigen::MatrixXd& k, const BandedToeplitz& t,
                                ApplyPath path = ApplyPath::automatic);

// columns: M J = M - row means (annihilates constant columns).
// gram:    (1/n) J M J, the centered Gram normalization.
Eigen::MatrixXd center(const Eigen::MatrixXd& m, CenterMode mode);
Eigen::MatrixXcd center(const Eigen::MatrixXcd& m, CenterMode mode);

}  // namespace tspec
