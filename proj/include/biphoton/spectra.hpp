#pragma once

#include <complex>
#include <cstddef>
#include <optional>

#include "biphoton/grid.hpp"
#include "biphoton/units.hpp"

namespace biphoton::spectra {

/// Gaussian pump envelope around 2*omega_c; sigma is the amplitude standard
/// deviation in rad/ps.
struct PumpModel {
  AngularFrequency omega_c;
  double sigma = 0.0;

  void validate() const;
};

enum class PhasematchShape { Sinc, GaussianApprox };

/// Linearised phase mismatch Δk·L/2 = (dk_s ν_s + dk_i ν_i)·L/2.
struct PhasematchModel {
  double length_mm = 0.0;
  double dk_s = 0.0;  // ps/mm
  double dk_i = 0.0;  // ps/mm
  double gamma = kGaussianSincGamma;
  PhasematchShape shape = PhasematchShape::GaussianApprox;

  double tau_plus() const { return (dk_s + dk_i) * length_mm / 2.0; }
  double tau_minus() const { return (dk_s - dk_i) * length_mm / 2.0; }
  void validate() const;
};

/// Second process displaced by delta_omega, added with weight r e^{iφ}.
struct SuperpositionModel {
  double delta_omega = 0.0;  // rad/ps
  double r = 0.0;
  double phi = 0.0;  // rad

  double rho() const { return 2.0 * r / (1.0 + r * r); }
  void validate() const;
};

/// Smaller of the two weights r with 2r/(1+r^2) = rho.
double r_from_rho(double rho);

struct ProcessModel {
  PumpModel pump;
  PhasematchModel phasematch;
  std::optional<SuperpositionModel> superposition;

  void validate() const;
};

std::complex<double> pump_envelope(const PumpModel& pump, AngularFrequency omega_sum);

/// nu_s, nu_i are detunings from omega_c in rad/ps.
std::complex<double> phasematching(const PhasematchModel& pm, double nu_s, double nu_i);

/// Unnormalised superposed amplitude F = f+ + r e^{iφ} f- at absolute frequencies.
std::complex<double> joint_amplitude(const ProcessModel& model, double omega_s, double omega_i);

/// Square sampling window centered on (omega_c, omega_c). Unset fields are
/// resolved by resolve_grid.
struct GridSpec {
  std::optional<double> half_span;   // rad/ps
  std::optional<std::size_t> samples;
  /// Largest |τ| (ps) the grid must resolve in the HOM integral; an automatic
  /// sample count is raised until |τ|·step <= π/2.
  std::optional<double> max_delay;
};

struct ResolvedGrid {
  double half_span = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kDefaultGridSamples = 512;

/// Fill unset grid fields. The span covers both displaced peaks plus six
/// standard deviations of the amplitude's marginal along either axis
/// (twenty for the sinc shape, whose tails decay algebraically); the sample
/// count is at least 512 (1536 for sinc) and is raised until every beat
/// period 2π/Δω holds eight samples and max_delay is resolved.
ResolvedGrid resolve_grid(const ProcessModel& model, const GridSpec& spec = {});

/// Samples the model on the resolved grid and normalises to unit L2 norm.
/// Throws GridTooCoarse or GridTooNarrow.
SpectralGrid build_jsa(const ProcessModel& model, const GridSpec& spec = {});

}  // namespace biphoton::spectra
