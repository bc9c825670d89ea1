#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/spectra.hpp"
#include "biphoton/units.hpp"

namespace biphoton::hom {

/// Coincidence probability trace p(τ).
struct HomTrace {
  std::vector<double> delays;         // ps, strictly increasing
  std::vector<double> probabilities;  // each in [0, 1]
  /// Per-sample standard error, present when the trace came from counts.
  std::optional<std::vector<double>> standard_error;
  std::map<std::string, std::string> meta;

  std::size_t size() const { return delays.size(); }
  bool empty() const { return delays.empty(); }
  void validate() const;
};

/// General exchange-overlap route on a sampled, unit-norm JSA with identical
/// signal/idler axes. Throws DelayTooLargeForGrid when |τ|·Δω_step >= π.
double hom_numeric(const SpectralGrid& jsa, Delay tau);

/// Spectral amplitude of one photon sampled on a uniform axis.
struct SpectralAmplitude {
  UniformAxis axis;
  std::vector<Complex> values;
};

/// Coincidence probability of a product state f1(ωs) f2(ωi). Never exceeds 1/2.
double hom_separable(const SpectralAmplitude& f1, const SpectralAmplitude& f2, Delay tau);

/// Parameters of the closed-form two-process trace.
struct ClosedFormParams {
  double tau_minus = 0.0;  // ps
  double tau_plus = 0.0;   // ps
  double sigma = 0.0;      // rad/ps
  double gamma = kGaussianSincGamma;
  double delta_omega = 0.0;  // rad/ps
  double rho = 0.0;
  double phi = 0.0;  // rad

  double c_minus() const { return 0.5 * gamma * delta_omega * delta_omega * tau_minus * tau_minus; }
  double c_plus() const { return 1.0 + 0.5 * gamma * sigma * sigma * tau_plus * tau_plus; }
};

ClosedFormParams closed_form_params(const spectra::ProcessModel& model);

/// Closed-form coincidence probability for two displaced Gaussian-approximated
/// processes:
///   p = 1/2 - exp(-(τ-τ-)²/(2γτ-²)) / (2 sqrt(C+))
///           · (exp(-C-/C+) + ρ cos(Δω τ - φ)) / (1 + exp(-C-) ρ cos(Δω τ- - φ)).
/// Throws DegenerateGroupDelay when |τ-| < 1e-6 ps.
double hom_closed_form(const ClosedFormParams& params, double tau);

/// Closed form for a GaussianApprox process model; throws InvalidModel for Sinc.
double hom_analytic(const spectra::ProcessModel& model, Delay tau);

enum class Engine { Numeric, Analytic };

std::string to_string(Engine engine);

/// Model parameters as "key=value" trace meta, units in the key names.
void record_model(std::map<std::string, std::string>& meta, const spectra::ProcessModel& model);

HomTrace sweep_numeric(const SpectralGrid& jsa, std::span<const double> delays);
HomTrace sweep_analytic(const spectra::ProcessModel& model, std::span<const double> delays);

/// Evenly spaced delays, inclusive of both ends.
std::vector<double> linspace(double start, double stop, std::size_t count);

enum class Verdict { Entangled, Inconclusive };

std::string to_string(Verdict verdict);

/// One-sided test: Entangled iff max p > 1/2 + epsilon. Throws EmptyTrace.
Verdict witness(const HomTrace& trace, double epsilon);

inline constexpr double kNoiselessGuardBand = 1e-6;

/// 3x the standard error at the trace maximum when the trace carries count
/// statistics, 1e-6 otherwise.
double default_guard_band(const HomTrace& trace);

}  // namespace biphoton::hom
