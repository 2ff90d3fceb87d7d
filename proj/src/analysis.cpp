#include "tspec/analysis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "tspec/parallel.hpp"

namespace tspec {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

const VectorXcd& checked_observable(const SpectralDecomposition& dec, const Observable& h) {
  if (dec.mode == FitMode::primal) {
    if (h.rep != Observable::Rep::coefficients)
      throw std::invalid_argument("primal fits pair with coefficient observables");
    if (h.vec.size() != dec.left_coeffs.rows())
      throw std::invalid_argument("observable length does not match the dictionary size");
  } else {
    if (h.rep != Observable::Rep::values)
      throw std::invalid_argument("dual fits pair with sample-value observables");
    if (h.vec.size() != dec.left_coeffs.rows())
      throw std::invalid_argument("observable length does not match the sample count");
  }
  return h.vec;
}

cplx ipow(cplx base, int s) {
  cplx out(1.0, 0.0);
  for (int k = 0; k < s; ++k) out *= base;
  return out;
}

double sigma_max(const MatrixXcd& a) {
  const MatrixXcd g = a.adjoint() * a;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (g + g.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("singular-value computation failed to converge");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// real-matrix times complex vector without materializing a complex copy
VectorXcd real_transpose_times(const MatrixXd& z, const VectorXcd& c) {
  VectorXcd out(z.cols());
  out.real() = z.transpose() * c.real();
  out.imag() = z.transpose() * c.imag();
  return out;
}

VectorXcd real_times(const MatrixXd& k, const VectorXcd& c) {
  VectorXcd out(k.rows());
  out.real() = k * c.real();
  out.imag() = k * c.imag();
  return out;
}

VectorXcd centered_vec(VectorXcd v) {
  v.array() -= v.mean();
  return v;
}

// Shared response-template plumbing: the resolvent family, bandwidth, and
// sample spacing come from the template symbol.
struct ResponseFamily {
  SymbolKind kind;
  int ell;
  double dt;
};

ResponseFamily response_family(const EstimatorConfig& tmpl, double mu, const VectorXd& grid) {
  const SymbolKind kind = tmpl.symbol.kind();
  if (kind != SymbolKind::generator_resolvent && kind != SymbolKind::transfer_resolvent)
    throw std::invalid_argument(
        "response template symbol must be a generator or transfer resolvent");
  if (!tmpl.symbol.params().dt)
    throw std::invalid_argument("response template symbol must carry the sample spacing dt");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  const double dt = *tmpl.symbol.params().dt;
  const double nyquist = M_PI / dt;
  for (Index i = 0; i < grid.size(); ++i)
    if (std::abs(2.0 * M_PI * grid[i]) > nyquist * (1.0 + 1e-12))
      throw std::invalid_argument("theta grid leaves the Nyquist band");
  return ResponseFamily{kind, tmpl.symbol.bandwidth(), dt};
}

ToeplitzSymbol response_symbol(const ResponseFamily& fam, cplx mu_theta) {
  if (fam.kind == SymbolKind::generator_resolvent)
    return generator_resolvent_symbol(mu_theta, fam.dt, fam.ell);
  return transfer_resolvent_symbol(fam.dt * mu_theta, fam.ell).with_dt(fam.dt);
}

// Leading Mright-orthonormal subspace of the whitened fit, tie blocks kept.
MatrixXcd leading_subspace_primal(const PrimalFactor& factor, const MatrixXcd& w, int rank) {
  const MatrixXcd s = factor.solve_lower(w);
  const MatrixXcd b = s * s.adjoint();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (b + b.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("whitened eigendecomposition failed to converge");
  const Index m = w.rows();
  const int reff = std::min<Index>(rank, m);
  MatrixXcd y(m, reff);
  for (int i = 0; i < reff; ++i) y.col(i) = es.eigenvectors().col(m - 1 - i);
  return factor.solve_upper_conj(y);
}

MatrixXcd leading_subspace_dual(const DualFactor& factor, const BandedToeplitz& t,
                                ApplyPath path, int rank, MatrixXcd& u_out) {
  const MatrixXcd a = apply_sandwich(factor.centered_gram(), t, path);
  const MatrixXd& d = factor.half_whitener();
  const MatrixXcd c = d * a * d;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (c + c.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("whitened eigendecomposition failed to converge");
  const Index n = factor.n();
  const int reff = std::min<Index>(rank, n);
  MatrixXcd q(n, reff);
  for (int i = 0; i < reff; ++i) q.col(i) = es.eigenvectors().col(n - 1 - i);
  u_out = factor.recovery() * q;
  return factor.centered_gram() * u_out;
}

}  // namespace

VectorXcd mode_amplitudes(const SpectralDecomposition& dec, const Observable& h) {
  const VectorXcd& v = checked_observable(dec, h);
  return dec.left_coeffs.adjoint() * v;
}

VectorXcd eigenfunction_values(const SpectralDecomposition& dec, const VectorXcd& probe) {
  if (probe.size() != dec.right_coeffs.rows())
    throw std::invalid_argument("probe length does not match the coefficient basis");
  return dec.right_coeffs.transpose() * probe;
}

cplx filter_power(const SpectralDecomposition& dec, const Observable& h, int s,
                  const VectorXcd& probe) {
  if (s < 0) throw std::invalid_argument("filter power needs s >= 0");
  const VectorXcd amps = mode_amplitudes(dec, h);
  const VectorXcd vals = eigenfunction_values(dec, probe);
  cplx out(0.0, 0.0);
  for (Index i = 0; i < dec.eigenvalues.size(); ++i) {
    if (!dec.usable[static_cast<size_t>(i)]) continue;
    out += ipow(dec.eigenvalues[i], s) * amps[i] * vals[i];
  }
  return out;
}

cplx predict_expectation(const SpectralDecomposition& dec, const Observable& h,
                         const VectorXcd& probe, double t,
                         std::optional<SpectralBranch> branch, int* dropped) {
  const VectorXd times = VectorXd::Constant(1, t);
  return predict_series(dec, h, probe, times, branch, dropped)[0];
}

VectorXcd predict_series(const SpectralDecomposition& dec, const Observable& h,
                         const VectorXcd& probe, const VectorXd& times,
                         std::optional<SpectralBranch> branch, int* dropped) {
  double min_t = 0.0;
  for (Index k = 0; k < times.size(); ++k) min_t = std::min(min_t, times[k]);
  if (min_t < 0.0 && dec.symbol.symmetry() != Symmetry::skew)
    throw std::invalid_argument("negative horizons need a skew (time-reversible) fit");

  const VectorXcd amps = mode_amplitudes(dec, h);
  const VectorXcd vals = eigenfunction_values(dec, probe);
  const Index r = dec.eigenvalues.size();

  std::vector<cplx> lambdas(static_cast<size_t>(r));
  std::vector<bool> mapped(static_cast<size_t>(r), false);
  int skipped = 0;
  int usable_mapped = 0;
  bool needs_map = false;
  for (Index k = 0; k < times.size(); ++k) needs_map = needs_map || times[k] != 0.0;
  for (Index i = 0; i < r; ++i) {
    if (!dec.usable[static_cast<size_t>(i)]) {
      ++skipped;
      continue;
    }
    const auto lam = branch ? inverse_spectral_map(dec.symbol, dec.eigenvalues[i], *branch)
                            : inverse_spectral_map(dec.symbol, dec.eigenvalues[i]);
    if (lam) {
      lambdas[static_cast<size_t>(i)] = *lam;
      mapped[static_cast<size_t>(i)] = true;
      ++usable_mapped;
    } else {
      ++skipped;
    }
  }
  if (needs_map && usable_mapped == 0)
    throw std::runtime_error("no estimated eigenvalue admits the inverse spectral map");
  if (dropped)
    *dropped = skipped;
  else if (skipped > 0 && needs_map)
    std::cerr << "warning: " << skipped
              << " spectral mode(s) dropped from the forecast (unmappable or unusable)\n";

  VectorXcd out = VectorXcd::Zero(times.size());
  for (Index k = 0; k < times.size(); ++k) {
    const double t = times[k];
    cplx sum(0.0, 0.0);
    for (Index i = 0; i < r; ++i) {
      if (!dec.usable[static_cast<size_t>(i)]) continue;
      if (t == 0.0) {
        sum += amps[i] * vals[i];  // exp(0) for every mode, mappable or not
      } else if (mapped[static_cast<size_t>(i)]) {
        sum += std::exp(lambdas[static_cast<size_t>(i)] * t) * amps[i] * vals[i];
      }
    }
    out[k] = sum;
  }
  return out;
}

ResponseCurve resolvent_response(const PrimalFactor& factor, const EstimatorConfig& tmpl,
                                 const Observable& f, double mu, const VectorXd& theta_grid,
                                 int jobs) {
  if (tmpl.mode != FitMode::primal)
    throw std::invalid_argument("primal factor paired with a non-primal template");
  if (tmpl.gamma != factor.gamma())
    throw std::invalid_argument("template gamma differs from the cached factor's gamma");
  if (f.rep != Observable::Rep::coefficients || f.vec.size() != factor.m())
    throw std::invalid_argument("primal response needs a coefficient observable of length m");
  const ResponseFamily fam = response_family(tmpl, mu, theta_grid);
  const Index n = factor.n();

  ResponseCurve curve;
  curve.theta = theta_grid;
  curve.mu = mu;
  curve.values.resize(theta_grid.size());
  curve.sigma.resize(theta_grid.size());
  parallel_for(static_cast<std::size_t>(theta_grid.size()), jobs, [&](std::size_t k) {
    const cplx mu_theta(mu, 2.0 * M_PI * theta_grid[static_cast<Index>(k)]);
    const ToeplitzSymbol sym = response_symbol(fam, mu_theta);
    const BandedToeplitz t(sym, static_cast<int>(n));
    const MatrixXcd w = factor.filtered_covariance(t, tmpl.path);
    const MatrixXcd v = leading_subspace_primal(factor, w, tmpl.rank);
    const VectorXcd c = v * (v.adjoint() * (w * f.vec));
    const VectorXcd vals = real_transpose_times(factor.features(), c);
    curve.values[static_cast<Index>(k)] =
        std::sqrt(vals.squaredNorm() / static_cast<double>(n));
    curve.sigma[static_cast<Index>(k)] = sigma_max(factor.whitened(w));
  });
  return curve;
}

ResponseCurve resolvent_response(const DualFactor& factor, const EstimatorConfig& tmpl,
                                 const Observable& f, double mu, const VectorXd& theta_grid,
                                 int jobs) {
  if (tmpl.mode != FitMode::dual)
    throw std::invalid_argument("dual factor paired with a non-dual template");
  if (tmpl.gamma != factor.gamma())
    throw std::invalid_argument("template gamma differs from the cached factor's gamma");
  if (f.rep != Observable::Rep::values || f.vec.size() != factor.n())
    throw std::invalid_argument("dual response needs a value observable of length n");
  const ResponseFamily fam = response_family(tmpl, mu, theta_grid);
  const Index n = factor.n();
  const VectorXcd jf = centered_vec(f.vec);

  ResponseCurve curve;
  curve.theta = theta_grid;
  curve.mu = mu;
  curve.values.resize(theta_grid.size());
  curve.sigma.resize(theta_grid.size());
  parallel_for(static_cast<std::size_t>(theta_grid.size()), jobs, [&](std::size_t k) {
    const cplx mu_theta(mu, 2.0 * M_PI * theta_grid[static_cast<Index>(k)]);
    const ToeplitzSymbol sym = response_symbol(fam, mu_theta);
    const BandedToeplitz t(sym, static_cast<int>(n));
    MatrixXcd u;
    const MatrixXcd v = leading_subspace_dual(factor, t, tmpl.path, tmpl.rank, u);
    const VectorXcd tjf = apply_left(t, MatrixXcd(jf));
    const VectorXcd beta =
        centered_vec(u * (v.adjoint() * tjf)) / static_cast<double>(n);
    const VectorXcd vals = real_times(factor.gram(), beta);
    curve.values[static_cast<Index>(k)] =
        std::sqrt(vals.squaredNorm() / static_cast<double>(n));
    curve.sigma[static_cast<Index>(k)] = sigma_max(factor.whitened(t, tmpl.path));
  });
  return curve;
}

ResponseCurve resolvent_response(const MatrixXd& data, const EstimatorConfig& tmpl,
                                 const Observable& f, double mu, const VectorXd& theta_grid,
                                 int jobs) {
  if (tmpl.mode == FitMode::primal) {
    const PrimalFactor factor(data, tmpl.gamma);
    return resolvent_response(factor, tmpl, f, mu, theta_grid, jobs);
  }
  const DualFactor factor(data, tmpl.gamma);
  return resolvent_response(factor, tmpl, f, mu, theta_grid, jobs);
}

namespace {

void check_mu_grid(const std::vector<cplx>& mu_grid) {
  if (mu_grid.empty()) throw std::invalid_argument("mu grid must be nonempty");
  for (const cplx& mu : mu_grid)
    if (!(mu.real() > 0.0)) throw std::invalid_argument("every mu needs Re(mu) > 0");
}

}  // namespace

double kreiss_estimate(const PrimalFactor& factor, int ell, const std::vector<cplx>& mu_grid,
                       ApplyPath path, int jobs) {
  check_mu_grid(mu_grid);
  std::vector<double> candidates(mu_grid.size());
  parallel_for(mu_grid.size(), jobs, [&](std::size_t k) {
    const ToeplitzSymbol sym = transfer_resolvent_symbol(mu_grid[k], ell);
    const BandedToeplitz t(sym, static_cast<int>(factor.n()));
    const MatrixXcd w = factor.filtered_covariance(t, path);
    candidates[k] = sigma_max(factor.whitened(w)) * std::expm1(mu_grid[k].real());
  });
  return *std::max_element(candidates.begin(), candidates.end());
}

double kreiss_estimate(const DualFactor& factor, int ell, const std::vector<cplx>& mu_grid,
                       ApplyPath path, int jobs) {
  check_mu_grid(mu_grid);
  std::vector<double> candidates(mu_grid.size());
  parallel_for(mu_grid.size(), jobs, [&](std::size_t k) {
    const ToeplitzSymbol sym = transfer_resolvent_symbol(mu_grid[k], ell);
    const BandedToeplitz t(sym, static_cast<int>(factor.n()));
    candidates[k] = sigma_max(factor.whitened(t, path)) * std::expm1(mu_grid[k].real());
  });
  return *std::max_element(candidates.begin(), candidates.end());
}

double kreiss_estimate(const MatrixXd& data, FitMode mode, double gamma, int ell,
                       const std::vector<cplx>& mu_grid, ApplyPath path, int jobs) {
  if (mode == FitMode::primal) {
    const PrimalFactor factor(data, gamma);
    return kreiss_estimate(factor, ell, mu_grid, path, jobs);
  }
  const DualFactor factor(data, gamma);
  return kreiss_estimate(factor, ell, mu_grid, path, jobs);
}

}  // namespace tspec
