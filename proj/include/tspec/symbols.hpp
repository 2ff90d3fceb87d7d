#pragma once
// Banded Laurent symbols: finite two-sided coefficient sequences a_{-ell..ell}
// describing analytic transforms of a time-discretized evolution operator.
// A symbol evaluates on the closed unit disk and knows how to map estimated
// eigenvalues back to generator eigenvalues where an inverse is registered.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tspec {

using cplx = std::complex<double>;

enum class SymbolKind {
  identity,
  cosh,
  sinh,
  transfer_resolvent,
  generator_resolvent,
  bandpass_inverse,
  trig,
  chebyshev,
  custom,
};

// hermitian: a_{-j} == conj(a_j)  (symbol real on the unit circle)
// skew:      a_{-j} == -conj(a_j) (symbol imaginary on the unit circle)
enum class Symmetry { general, hermitian, skew };

// Branch selector for two-valued inverse maps: real_axis expects generator
// eigenvalues on the negative real line (self-adjoint dynamics), imaginary_axis
// expects them on the imaginary line (deterministic/skew dynamics).
enum class SpectralBranch { real_axis, imaginary_axis };

struct SymbolParams {
  std::optional<cplx> mu;
  std::optional<double> dt;
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  bool jackson = false;
};

class ToeplitzSymbol {
 public:
  ToeplitzSymbol();  // the identity symbol (a_1 = 1)
  // coeffs holds a_{-ell}..a_{ell} in order; size must be odd.
  ToeplitzSymbol(SymbolKind kind, std::vector<cplx> coeffs, SymbolParams params = {});

  int bandwidth() const { return ell_; }
  cplx coeff(int j) const;  // j in [-ell, ell]
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  SymbolKind kind() const { return kind_; }
  Symmetry symmetry() const { return symmetry_; }
  const SymbolParams& params() const { return params_; }

  // Copy with the sample spacing stamped in; inverse maps need it.
  ToeplitzSymbol with_dt(double dt) const;

 private:
  SymbolKind kind_;
  int ell_ = 0;
  std::vector<cplx> coeffs_;
  Symmetry symmetry_ = Symmetry::general;
  SymbolParams params_;
};

// Catalogue constructors.
ToeplitzSymbol builtin_symbol(SymbolKind kind);  // identity, cosh, sinh
ToeplitzSymbol transfer_resolvent_symbol(cplx mu, int ell);
ToeplitzSymbol generator_resolvent_symbol(cplx mu, double dt, int ell);
ToeplitzSymbol symmetrize(const ToeplitzSymbol& s);
ToeplitzSymbol bandpass_inverse_symbol(double omega_min, double omega_max, int ell,
                                       bool jackson = true);
ToeplitzSymbol trig_symbol(const std::vector<cplx>& alpha, const std::vector<cplx>& beta);
ToeplitzSymbol trig_symbol(const std::vector<double>& alpha, const std::vector<double>& beta);
ToeplitzSymbol chebyshev_symbol(const std::vector<double>& b, const std::vector<double>& c);

// Sine integral Si(x) = int_0^x sin(t)/t dt, absolute accuracy ~1e-15.
double sine_integral(double x);

// Evaluate the symbol at z with |z| <= 1: a_0 + sum_j (a_j z^j + a_{-j} conj(z)^j).
// On the unit circle this is the plain Laurent sum.
cplx eval_symbol(const ToeplitzSymbol& s, cplx z);

// sup over region_samples omega (Re omega <= 0) of |target(omega) - T(e^{dt*omega})|,
// multiplied by (1 + sqrt 2) when the evolution operator is not assumed normal.
// The symbol must carry dt.
double truncation_error_bound(const ToeplitzSymbol& s,
                              const std::function<cplx(cplx)>& target,
                              const std::vector<cplx>& region_samples, bool normal);

// Map an estimated eigenvalue nu back to a generator eigenvalue. Returns
// nullopt when nu lies outside the branch domain or on a pole; values are
// never clamped beyond a ~1e-9 roundoff slack at branch endpoints. Imaginary
// parts are reported inside the Nyquist band (-pi/dt, pi/dt].
std::optional<cplx> inverse_spectral_map(const ToeplitzSymbol& s, cplx nu, SpectralBranch branch);
// Branch defaulted from the symbol symmetry: hermitian -> real_axis, else imaginary_axis.
std::optional<cplx> inverse_spectral_map(const ToeplitzSymbol& s, cplx nu);

std::string to_string(SymbolKind k);
std::optional<SymbolKind> symbol_kind_from_string(const std::string& name);

}  // namespace tspec
