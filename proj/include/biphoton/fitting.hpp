#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/hom.hpp"
#include "biphoton/spectra.hpp"

namespace biphoton::fit {

/// Parameters of the measured-trace model
///   p(τ) = baseline + visibility · (p_closed(τ + tau_offset) - 1/2).
/// R is an alternative to Rho (ρ = 2r/(1+r²)); the two are never both free.
enum class FitParam { DeltaOmega, Rho, R, Phi, TauMinus, TauPlus, Sigma, Visibility, Baseline, TauOffset };

std::string_view name(FitParam p);
std::string_view unit(FitParam p);
std::optional<FitParam> parse_fit_param(std::string_view text);

struct ModelParams {
  double delta_omega = 0.0;  // rad/ps
  double rho = 0.0;
  double phi = 0.0;        // rad
  double tau_minus = 0.0;  // ps
  double tau_plus = 0.0;   // ps
  double sigma = 0.0;      // rad/ps
  double gamma = kGaussianSincGamma;
  double visibility = 1.0;
  double baseline = 0.5;
  double tau_offset = 0.0;  // ps

  hom::ClosedFormParams closed_form() const;
  double get(FitParam p) const;
  void set(FitParam p, double value);
};

ModelParams params_from_model(const spectra::ProcessModel& model);

double model_probability(const ModelParams& params, double tau);

hom::HomTrace model_trace(const ModelParams& params, std::span<const double> delays);

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const { return v >= lower && v <= upper; }
};

struct FitSpec {
  std::vector<FitParam> free;
  /// Bounds for free parameters; missing entries get defaults (see default_bounds).
  std::map<FitParam, Bounds> bounds;
  /// Starting values; fixed parameters keep these values.
  ModelParams initial;
  int restarts = 8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Default search interval for a free parameter around its initial value.
/// Phi is left unbounded and wrapped into [0, 2π) after fitting.
Bounds default_bounds(FitParam p, const ModelParams& initial);

struct FitResult {
  ModelParams params;
  std::map<FitParam, double> values;  // free parameters as fitted
  std::map<FitParam, double> param_stderr;
  double residual_rms = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Best-so-far objective per simplex iteration of the selected restart.
  std::vector<double> objective_history;
  /// Final objective (sum of squared residuals) of every restart, by seed.
  std::vector<double> restart_objectives;
};

/// Bounded multi-start simplex fit of the trace model. Restarts run in
/// parallel; restart k starts from the initial values with φ advanced by
/// 2πk/restarts and the other free parameters jittered by up to ±5% of their
/// bound width. Throws TooFewSamples, NonFiniteData.
FitResult fit_trace(const hom::HomTrace& data, const FitSpec& spec);

/// Convert raw coincidence counts to probabilities: divide by twice the
/// plateau, estimated as the mean of the outer 20% of samples.
hom::HomTrace normalize_counts(std::span<const double> delays, std::span<const double> counts);

/// Comparison of a true-sinc single process (numeric route) with its
/// two-Gaussian stand-in (closed form).
struct SincReport {
  hom::HomTrace sinc_trace;
  hom::HomTrace standin_trace;
  double sinc_max = 0.0;
  double standin_max = 0.0;
  bool sinc_exceeds_half = false;
  bool standin_exceeds_half = false;
  double l2_distance = 0.0;  // sqrt(∫ (p_sinc - p_standin)^2 dτ)
};

/// The numeric side drops the superposition and keeps the model's
/// phasematching shape; the closed-form side uses the superposition with
/// Gaussian-approximated phasematching. An automatic grid is sized to resolve
/// the largest |delay|.
SincReport discriminate_sinc(const spectra::ProcessModel& model, std::span<const double> delays,
                             const spectra::GridSpec& grid = {});

}  // namespace biphoton::fit
