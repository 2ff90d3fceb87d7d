#pragma once
// Spectral post-processing of a fitted decomposition: mode amplitudes,
// spectral filters, expectation forecasts, resolvent-response curves over a
// frequency grid, and transient-growth (Kreiss-type) estimates.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "tspec/estimators.hpp"

namespace tspec {

// An observable paired with a decomposition: dictionary coefficients for
// primal fits (length m), values on the training samples for dual fits
// (length n, acting through the reproducing property).
struct Observable {
  enum class Rep { coefficients, values };
  Rep rep = Rep::coefficients;
  Eigen::VectorXcd vec;

  static Observable from_coefficients(Eigen::VectorXcd v) {
    return Observable{Rep::coefficients, std::move(v)};
  }
  static Observable from_values(Eigen::VectorXcd v) {
    return Observable{Rep::values, std::move(v)};
  }
};

// <g_i, h> for every retained mode, via the pairing the decomposition was
// biorthogonalized in (plain coefficient contraction primal, reproducing
// property dual). Columns flagged unusable carry unscaled left vectors.
Eigen::VectorXcd mode_amplitudes(const SpectralDecomposition& dec, const Observable& h);

// Values h_i(x) of every retained eigenfunction at one point, given its
// feature embedding: probe = z(x) for primal fits, probe = [k(x_j, x)]_j for
// dual fits.
Eigen::VectorXcd eigenfunction_values(const SpectralDecomposition& dec,
                                      const Eigen::VectorXcd& probe);

// sum_i value_i^s <g_i, h> h_i(probe) over usable modes: the s-step action of
// the fitted finite-rank operator on h, evaluated at one point.
cplx filter_power(const SpectralDecomposition& dec, const Observable& h, int s,
                  const Eigen::VectorXcd& probe);

// sum_i exp(lambda_i t) <g_i, h> h_i(probe) with lambda_i the inverse spectral
// map of eigenvalue i. Triplets without a mappable eigenvalue are dropped
// (their count goes to *dropped when given, otherwise a warning is printed);
// t = 0 needs no map and uses every usable triplet. Negative t requires a
// skew (time-reversible) fit. For real data and conjugate-paired eigenvalues
// the imaginary part is a ~1e-8 relative residual; callers take the real part.
cplx predict_expectation(const SpectralDecomposition& dec, const Observable& h,
                         const Eigen::VectorXcd& probe, double t,
                         std::optional<SpectralBranch> branch = std::nullopt,
                         int* dropped = nullptr);

// predict_expectation over many horizons, sharing amplitudes and the
// eigenvalue back-map across the whole series.
Eigen::VectorXcd predict_series(const SpectralDecomposition& dec, const Observable& h,
                                const Eigen::VectorXcd& probe, const Eigen::VectorXd& times,
                                std::optional<SpectralBranch> branch = std::nullopt,
                                int* dropped = nullptr);

struct ResponseCurve {
  Eigen::VectorXd theta;   // Hz
  Eigen::VectorXd values;  // empirical L2 norm of the rank-r resolvent image of f
  Eigen::VectorXd sigma;   // whitened operator-norm column (observable-independent)
  double mu = 0.0;
  std::string observable;
};

// theta |-> norm of the estimated resolvent image of f at mu + i 2 pi theta.
// The template's symbol fixes the resolvent family (generator_resolvent or
// transfer_resolvent), its bandwidth, and the sample spacing dt; mu and the
// grid are swept with the factorization shared across grid points. The image
// norm is computed from the leading-subspace compression directly (no
// eigendecomposition), so near-defective grid points are still well-defined.
ResponseCurve resolvent_response(const PrimalFactor& factor, const EstimatorConfig& tmpl,
                                 const Observable& f, double mu,
                                 const Eigen::VectorXd& theta_grid, int jobs = 0);
ResponseCurve resolvent_response(const DualFactor& factor, const EstimatorConfig& tmpl,
                                 const Observable& f, double mu,
                                 const Eigen::VectorXd& theta_grid, int jobs = 0);
// Convenience: builds the factor implied by tmpl.mode from raw data
// (features m x n for primal, Gram n x n for dual).
ResponseCurve resolvent_response(const Eigen::MatrixXd& data, const EstimatorConfig& tmpl,
                                 const Observable& f, double mu,
                                 const Eigen::VectorXd& theta_grid, int jobs = 0);

// max over the grid of (e^{Re mu} - 1) * sigma_max(whitened resolvent fit at
// mu), a grid lower bound on the transient-growth (Kreiss) constant of the
// step operator. Every mu needs Re mu > 0; ell is the resolvent symbol
// bandwidth.
double kreiss_estimate(const PrimalFactor& factor, int ell, const std::vector<cplx>& mu_grid,
                       ApplyPath path = ApplyPath::automatic, int jobs = 0);
double kreiss_estimate(const DualFactor& factor, int ell, const std::vector<cplx>& mu_grid,
                       ApplyPath path = ApplyPath::automatic, int jobs = 0);
double kreiss_estimate(const Eigen::MatrixXd& data, FitMode mode, double gamma, int ell,
                       const std::vector<cplx>& mu_grid, ApplyPath path = ApplyPath::automatic,
                       int jobs = 0);

}  // namespace tspec
