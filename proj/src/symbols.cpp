#include "tspec/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

namespace tspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

double max_abs(const std::vector<cplx>& c) {
  double m = 0.0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  return m;
}

Symmetry classify(const std::vector<cplx>& coeffs, int ell) {
  const double tol = 1e-12 * std::max(1e-300, max_abs(coeffs));
  bool herm = true, skew = true;
  for (int j = 0; j <= ell; ++j) {
    const cplx ap = coeffs[static_cast<size_t>(ell + j)];
    const cplx am = coeffs[static_cast<size_t>(ell - j)];
    if (std::abs(am - std::conj(ap)) > tol) herm = false;
    if (std::abs(am + std::conj(ap)) > tol) skew = false;
    if (!herm && !skew) return Symmetry::general;
  }
  if (herm) return Symmetry::hermitian;
  return Symmetry::skew;
}

}  // namespace

ToeplitzSymbol::ToeplitzSymbol()
    : ToeplitzSymbol(SymbolKind::identity, {cplx(0), cplx(0), cplx(1)}) {}

ToeplitzSymbol::ToeplitzSymbol(SymbolKind kind, std::vector<cplx> coeffs, SymbolParams params)
    : kind_(kind), coeffs_(std::move(coeffs)), params_(std::move(params)) {
  if (coeffs_.empty() || coeffs_.size() % 2 == 0)
    throw std::invalid_argument("symbol coefficient array must have odd size 2*ell+1");
  ell_ = static_cast<int>(coeffs_.size() / 2);
  for (const auto& v : coeffs_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("symbol coefficients must be finite");
  symmetry_ = classify(coeffs_, ell_);
}

cplx ToeplitzSymbol::coeff(int j) const {
  if (j < -ell_ || j > ell_) return cplx(0.0, 0.0);
  return coeffs_[static_cast<size_t>(ell_ + j)];
}

ToeplitzSymbol ToeplitzSymbol::with_dt(double dt) const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  ToeplitzSymbol out = *this;
  out.params_.dt = dt;
  return out;
}

ToeplitzSymbol builtin_symbol(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::identity:
      return ToeplitzSymbol(kind, {cplx(0), cplx(0), cplx(1)});
    case SymbolKind::cosh:
      return ToeplitzSymbol(kind, {cplx(0.5), cplx(0), cplx(0.5)});
    case SymbolKind::sinh:
      return ToeplitzSymbol(kind, {cplx(-0.5), cplx(0), cplx(0.5)});
    default:
      throw std::invalid_argument("builtin_symbol only covers identity, cosh, sinh");
  }
}

ToeplitzSymbol transfer_resolvent_symbol(cplx mu, int ell) {
  if (!(mu.real() > 0.0)) throw std::invalid_argument("transfer resolvent needs Re mu > 0");
  if (ell < 0) throw std::invalid_argument("ell must be nonnegative");
  std::vector<cplx> c(static_cast<size_t>(2 * ell + 1), cplx(0));
  for (int j = 0; j <= ell; ++j)
    c[static_cast<size_t>(ell + j)] = std::exp(-static_cast<double>(j + 1) * mu);
  SymbolParams p;
  p.mu = mu;
  return ToeplitzSymbol(SymbolKind::transfer_resolvent, std::move(c), std::move(p));
}

ToeplitzSymbol generator_resolvent_symbol(cplx mu, double dt, int ell) {
  if (mu.real() < 0.0) throw std::invalid_argument("generator resolvent needs Re mu >= 0");
  if (mu.real() == 0.0)
    std::cerr << "warning: generator resolvent with Re mu = 0 decays only through the "
                 "truncation window\n";
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
  std::vector<cplx> c(static_cast<size_t>(2 * ell + 1), cplx(0));
  // trapezoid weights for int_0^{ell*dt} e^{-mu t} A_t dt in lag coordinates
  c[static_cast<size_t>(ell)] = cplx(dt / 2.0);
  for (int j = 1; j < ell; ++j)
    c[static_cast<size_t>(ell + j)] = dt * std::exp(-mu * (static_cast<double>(j) * dt));
  c[static_cast<size_t>(2 * ell)] =
      (dt / 2.0) * std::exp(-mu * (static_cast<double>(ell) * dt));
  SymbolParams p;
  p.mu = mu;
  p.dt = dt;
  return ToeplitzSymbol(SymbolKind::generator_resolvent, std::move(c), std::move(p));
}

ToeplitzSymbol symmetrize(const ToeplitzSymbol& s) {
  const int ell = s.bandwidth();
  const double scale = std::max(1e-300, max_abs(s.coeffs()));
  for (int j = 1; j <= ell; ++j)
    if (std::abs(s.coeff(-j)) > 1e-14 * scale)
      throw std::invalid_argument("symmetrize expects a one-sided symbol (a_j = 0 for j < 0)");
  for (int j = 0; j <= ell; ++j)
    if (std::abs(s.coeff(j).imag()) > 1e-14 * scale)
      throw std::invalid_argument("symmetrize expects real coefficients");
  std::vector<cplx> c(static_cast<size_t>(2 * ell + 1), cplx(0));
  c[static_cast<size_t>(ell)] = s.coeff(0).real();
  for (int j = 1; j <= ell; ++j) {
    const double half = s.coeff(j).real() / 2.0;
    c[static_cast<size_t>(ell + j)] = half;
    c[static_cast<size_t>(ell - j)] = half;
  }
  return ToeplitzSymbol(s.kind(), std::move(c), s.params());
}

ToeplitzSymbol bandpass_inverse_symbol(double omega_min, double omega_max, int ell,
                                       bool jackson) {
  if (!(0.0 <= omega_min && omega_min < omega_max && omega_max <= kPi))
    throw std::invalid_argument("bandpass needs 0 <= omega_min < omega_max <= pi");
  if (ell < 1) throw std::invalid_argument("ell must be at least 1");
  std::vector<cplx> c(static_cast<size_t>(2 * ell + 1), cplx(0));
  for (int j = 1; j <= ell; ++j) {
    double a = -(sine_integral(j * omega_max) - sine_integral(j * omega_min)) / kPi;
    if (jackson) {
      const double s = 1.0 - std::pow(static_cast<double>(j) / (ell + 1.0), 2);
      a *= s;
    }
    c[static_cast<size_t>(ell + j)] = cplx(a);
    c[static_cast<size_t>(ell - j)] = cplx(-a);
  }
  SymbolParams p;
  p.omega_min = omega_min;
  p.omega_max = omega_max;
  p.jackson = jackson;
  return ToeplitzSymbol(SymbolKind::bandpass_inverse, std::move(c), std::move(p));
}

ToeplitzSymbol trig_symbol(const std::vector<cplx>& alpha, const std::vector<cplx>& beta) {
  const int ell = std::max(alpha.empty() ? 0 : static_cast<int>(alpha.size()) - 1,
                           static_cast<int>(beta.size()));
  if (alpha.empty() && beta.empty())
    throw std::invalid_argument("trig symbol needs at least one coefficient");
  std::vector<cplx> c(static_cast<size_t>(2 * ell + 1), cplx(0));
  if (!alpha.empty()) c[static_cast<size_t>(ell)] = alpha[0];
  const cplx half_over_i(0.0, -0.5);  // 1/(2i)
  for (int k = 1; k <= ell; ++k) {
    const cplx a = k < static_cast<int>(alpha.size()) ? alpha[static_cast<size_t>(k)] : cplx(0);
    const cplx b = k <= static_cast<int>(beta.size()) ? beta[static_cast<size_t>(k - 1)] : cplx(0);
    c[static_cast<size_t>(ell + k)] = a / 2.0 + half_over_i * b;
    c[static_cast<size_t>(ell - k)] = a / 2.0 - half_over_i * b;
  }
  return ToeplitzSymbol(SymbolKind::trig, std::move(c));
}

ToeplitzSymbol trig_symbol(const std::vector<double>& alpha, const std::vector<double>& beta) {
  return trig_symbol(std::vector<cplx>(alpha.begin(), alpha.end()),
                     std::vector<cplx>(beta.begin(), beta.end()));
}

namespace {

// Laurent coefficient vectors over j = -deg..deg; multiply by B(z) = (z + 1/z)/2.
std::vector<double> laurent_mul_B(const std::vector<double>& u) {
  const int deg = static_cast<int>(u.size() / 2);
  std::vector<double> out(u.size() + 2, 0.0);
  // out index offset deg+1
  for (int j = -deg; j <= deg; ++j) {
    const double v = u[static_cast<size_t>(deg + j)] / 2.0;
    out[static_cast<size_t>(deg + 1 + j + 1)] += v;
    out[static_cast<size_t>(deg + 1 + j - 1)] += v;
  }
  return out;
}

std::vector<double> laurent_pad(const std::vector<double>& u, int deg_to) {
  const int deg = static_cast<int>(u.size() / 2);
  std::vector<double> out(static_cast<size_t>(2 * deg_to + 1), 0.0);
  for (int j = -deg; j <= deg; ++j)
    out[static_cast<size_t>(deg_to + j)] = u[static_cast<size_t>(deg + j)];
  return out;
}

}  // namespace

ToeplitzSymbol chebyshev_symbol(const std::vector<double>& b, const std::vector<double>& c) {
  if (b.empty() && c.empty())
    throw std::invalid_argument("chebyshev symbol needs at least one coefficient");
  const int deg_b = b.empty() ? 0 : static_cast<int>(b.size()) - 1;
  const int deg_c = c.empty() ? 0 : static_cast<int>(c.size());  // sin factor adds one
  const int ell = std::max(deg_b, deg_c);

  // First-kind recurrence: T_0 = 1, T_1 = B, T_{k+1} = 2 B T_k - T_{k-1}.
  std::vector<double> acc(static_cast<size_t>(2 * ell + 1), 0.0);
  {
    std::vector<double> tkm1{1.0};           // T_0
    std::vector<double> tk{0.5, 0.0, 0.5};   // T_1 = B
    for (int k = 0; k <= deg_b && k < static_cast<int>(b.size()); ++k) {
      const std::vector<double>& tcur = (k == 0) ? tkm1 : tk;
      const std::vector<double> p = laurent_pad(tcur, ell);
      for (size_t i = 0; i < acc.size(); ++i) acc[i] += b[static_cast<size_t>(k)] * p[i];
      if (k >= 1 && k < deg_b) {
        std::vector<double> tnext = laurent_mul_B(tk);
        for (auto& v : tnext) v *= 2.0;
        const std::vector<double> pm1 = laurent_pad(tkm1, static_cast<int>(tnext.size() / 2));
        for (size_t i = 0; i < tnext.size(); ++i) tnext[i] -= pm1[i];
        tkm1 = tk;
        tk = std::move(tnext);
      }
    }
  }

  // Second-kind recurrence: U_0 = 1, U_1 = 2B, U_{m+1} = 2 B U_m - U_{m-1};
  // the sine factor (z - 1/z)/(2i) multiplies the whole U sum.
  std::vector<cplx> coeffs(static_cast<size_t>(2 * ell + 1), cplx(0));
  for (int j = -ell; j <= ell; ++j)
    coeffs[static_cast<size_t>(ell + j)] = cplx(acc[static_cast<size_t>(ell + j)]);
  if (!c.empty()) {
    const int m_max = static_cast<int>(c.size()) - 1;
    std::vector<double> usum(static_cast<size_t>(2 * m_max + 1), 0.0);
    std::vector<double> ukm1{1.0};           // U_0
    std::vector<double> uk{1.0, 0.0, 1.0};   // U_1 = 2B
    for (int m = 0; m <= m_max; ++m) {
      const std::vector<double>& ucur = (m == 0) ? ukm1 : uk;
      const std::vector<double> p = laurent_pad(ucur, m_max);
      for (size_t i = 0; i < usum.size(); ++i) usum[i] += c[static_cast<size_t>(m)] * p[i];
      if (m >= 1 && m < m_max) {
        std::vector<double> unext = laurent_mul_B(uk);
        for (auto& v : unext) v *= 2.0;
        const std::vector<double> pm1 = laurent_pad(ukm1, static_cast<int>(unext.size() / 2));
        for (size_t i = 0; i < unext.size(); ++i) unext[i] -= pm1[i];
        ukm1 = uk;
        uk = std::move(unext);
      }
    }
    // multiply usum by (z - 1/z)/(2i) = -i/2 z + i/2 z^{-1}
    const cplx up(0.0, -0.5), dn(0.0, 0.5);
    for (int j = -m_max; j <= m_max; ++j) {
      const double v = usum[static_cast<size_t>(m_max + j)];
      if (v == 0.0) continue;
      coeffs[static_cast<size_t>(ell + j + 1)] += up * v;
      coeffs[static_cast<size_t>(ell + j - 1)] += dn * v;
    }
  }
  return ToeplitzSymbol(SymbolKind::chebyshev, std::move(coeffs));
}

double sine_integral(double x) {
  // Power-series Pade below |x| = 4, auxiliary-function asymptotics above;
  // both rational approximations are accurate to better than 1e-16.
  const double x2 = x * x;
  if (x2 > 16.0) {
    const double y = 1.0 / x2;
    const double f =
        (1. +
         y * (7.44437068161936700618e2 +
              y * (1.96396372895146869801e5 +
                   y * (2.37750310125431834034e7 +
                        y * (1.43073403821274636888e9 +
                             y * (4.33736238870432522765e10 +
                                  y * (6.40533830574022022911e11 +
                                       y * (4.20968180571076940208e12 +
                                            y * (1.00795182980368574617e13 +
                                                 y * (4.94816688199951963482e12 +
                                                      y * (-4.94701168645415959931e11))))))))))) /
        (x * (1. +
              y * (7.46437068161927678031e2 +
                   y * (1.97865247031583951450e5 +
                        y * (2.41535670165126845144e7 +
                             y * (1.47478952192985464958e9 +
                                  y * (4.58595115847765779830e10 +
                                       y * (7.08501308149515401563e11 +
                                            y * (5.06084464593475076774e12 +
                                                 y * (1.43468549171581016479e13 +
                                                      y * (1.11535493509914254097e13)))))))))));
    const double g =
        y *
        (1. +
         y * (8.1359520115168615e2 +
              y * (2.35239181626478200e5 +
                   y * (3.12557570795778731e7 +
                        y * (2.06297595146763354e9 +
                             y * (6.83052205423625007e10 +
                                  y * (1.09049528450362786e12 +
                                       y * (7.57664583257834349e12 +
                                            y * (1.81004487464664575e13 +
                                                 y * (6.43291613143049485e12 +
                                                      y * (-1.36517137670871689e12))))))))))) /
        (1. +
         y * (8.19595201151451564e2 +
              y * (2.40036752835578777e5 +
                   y * (3.26026661647090822e7 +
                        y * (2.23355543278099360e9 +
                             y * (7.87465017341829930e10 +
                                  y * (1.39866710696414565e12 +
                                       y * (1.17164723371736605e13 +
                                            y * (4.01839087307656620e13 +
                                                 y * (3.99653257887490811e13))))))))));
    return (x > 0.0 ? kPi / 2.0 : -kPi / 2.0) - f * std::cos(x) - g * std::sin(x);
  }
  return x *
         (1. +
          x2 * (-4.54393409816329991e-2 +
                x2 * (1.15457225751016682e-3 +
                      x2 * (-1.41018536821330254e-5 +
                            x2 * (9.43280809438713025e-8 +
                                  x2 * (-3.53201978997168357e-10 +
                                        x2 * (7.08240282274875911e-13 +
                                              x2 * (-6.05338212010422477e-16)))))))) /
         (1. +
          x2 * (1.01162145739225565e-2 +
                x2 * (4.99175116169755106e-5 +
                      x2 * (1.55654986308745614e-7 +
                            x2 * (3.28067571055789734e-10 +
                                  x2 * (4.5049097575386581e-13 +
                                        x2 * (3.21107051193712168e-16)))))));
}

cplx eval_symbol(const ToeplitzSymbol& s, cplx z) {
  if (std::abs(z) > 1.0 + 1e-12)
    throw std::domain_error("eval_symbol requires |z| <= 1");
  const int ell = s.bandwidth();
  cplx acc = s.coeff(0);
  cplx zp(1.0, 0.0), zbp(1.0, 0.0);
  const cplx zb = std::conj(z);
  for (int j = 1; j <= ell; ++j) {
    zp *= z;
    zbp *= zb;
    acc += s.coeff(j) * zp + s.coeff(-j) * zbp;
  }
  return acc;
}

double truncation_error_bound(const ToeplitzSymbol& s,
                              const std::function<cplx(cplx)>& target,
                              const std::vector<cplx>& region_samples, bool normal) {
  if (!s.params().dt.has_value())
    throw std::invalid_argument("truncation_error_bound needs a symbol with dt set");
  if (region_samples.empty())
    throw std::invalid_argument("truncation_error_bound needs at least one sample");
  const double dt = *s.params().dt;
  double worst = 0.0;
  for (const cplx& w : region_samples) {
    if (w.real() > 1e-12)
      throw std::invalid_argument("region samples must satisfy Re omega <= 0");
    const cplx z = std::exp(dt * w);
    worst = std::max(worst, std::abs(target(w) - eval_symbol(s, z)));
  }
  if (!normal) worst *= 1.0 + std::sqrt(2.0);
  return worst;
}

namespace {

double require_dt(const ToeplitzSymbol& s) {
  if (!s.params().dt.has_value())
    throw std::invalid_argument("inverse spectral map needs a symbol with dt set");
  return *s.params().dt;
}

cplx require_mu(const ToeplitzSymbol& s) {
  if (!s.params().mu.has_value())
    throw std::invalid_argument("resolvent inverse needs a symbol with mu set");
  return *s.params().mu;
}

double fold_nyquist(double im, double dt) {
  const double band = 2.0 * kPi / dt;
  double out = im - band * std::round(im / band);
  if (out <= -band / 2.0) out += band;  // land in (-pi/dt, pi/dt]
  return out;
}

constexpr double kBranchSlack = 1e-9;

}  // namespace

std::optional<cplx> inverse_spectral_map(const ToeplitzSymbol& s, cplx nu,
                                         SpectralBranch branch) {
  switch (s.kind()) {
    case SymbolKind::identity: {
      const double dt = require_dt(s);
      if (std::abs(nu) == 0.0) return std::nullopt;
      return std::log(nu) / dt;
    }
    case SymbolKind::cosh: {
      const double dt = require_dt(s);
      const double x = nu.real();
      if (branch == SpectralBranch::real_axis) {
        if (x < 1.0 - kBranchSlack) return std::nullopt;
        return cplx(-std::acosh(std::max(x, 1.0)) / dt, 0.0);
      }
      if (std::abs(x) > 1.0 + kBranchSlack) return std::nullopt;
      return cplx(0.0, std::acos(std::clamp(x, -1.0, 1.0)) / dt);
    }
    case SymbolKind::sinh: {
      const double dt = require_dt(s);
      const double y = nu.imag();
      if (std::abs(y) > 1.0 + kBranchSlack) return std::nullopt;
      return cplx(0.0, std::asin(std::clamp(y, -1.0, 1.0)) / dt);
    }
    case SymbolKind::transfer_resolvent: {
      const double dt = require_dt(s);
      const cplx mu = require_mu(s);
      if (std::abs(nu) == 0.0) return std::nullopt;
      const cplx w = std::exp(mu) - 1.0 / nu;
      if (std::abs(w) == 0.0) return std::nullopt;
      return std::log(w) / dt;
    }
    case SymbolKind::generator_resolvent: {
      const cplx mu = require_mu(s);
      if (std::abs(nu) == 0.0) return std::nullopt;
      cplx lam = mu - 1.0 / nu;
      if (s.params().dt.has_value())
        lam = cplx(lam.real(), fold_nyquist(lam.imag(), *s.params().dt));
      return lam;
    }
    default:
      throw std::invalid_argument("symbol kind '" + to_string(s.kind()) +
                                  "' has no registered inverse spectral map");
  }
}

std::optional<cplx> inverse_spectral_map(const ToeplitzSymbol& s, cplx nu) {
  const SpectralBranch branch = s.symmetry() == Symmetry::hermitian
                                    ? SpectralBranch::real_axis
                                    : SpectralBranch::imaginary_axis;
  return inverse_spectral_map(s, nu, branch);
}

std::string to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::identity: return "identity";
    case SymbolKind::cosh: return "cosh";
    case SymbolKind::sinh: return "sinh";
    case SymbolKind::transfer_resolvent: return "transfer_resolvent";
    case SymbolKind::generator_resolvent: return "generator_resolvent";
    case SymbolKind::bandpass_inverse: return "bandpass_inverse";
    case SymbolKind::trig: return "trig";
    case SymbolKind::chebyshev: return "chebyshev";
    case SymbolKind::custom: return "custom";
  }
  return "custom";
}

std::optional<SymbolKind> symbol_kind_from_string(const std::string& name) {
  for (SymbolKind k : {SymbolKind::identity, SymbolKind::cosh, SymbolKind::sinh,
                       SymbolKind::transfer_resolvent, SymbolKind::generator_resolvent,
                       SymbolKind::bandpass_inverse, SymbolKind::trig, SymbolKind::chebyshev,
                       SymbolKind::custom}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace tspec
