#include "biphoton/hom.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "biphoton/errors.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton::hom {
namespace {

constexpr double kClampBand = 1e-9;
constexpr double kMinTauMinus = 1e-6;

double clamp_probability(double p) {
  if (p < 0.0 && p > -kClampBand) return 0.0;
  if (p > 1.0 && p < 1.0 + kClampBand) return 1.0;
  return p;
}

void require_increasing(std::span<const double> delays) {
  for (std::size_t k = 0; k < delays.size(); ++k) {
    if (!std::isfinite(delays[k]))
      throw Error(ErrorKind::NonFiniteData, fmt::format("delay index {} is not finite", k));
    if (k > 0 && !(delays[k] > delays[k - 1]))
      throw Error(ErrorKind::InvalidArgument, fmt::format("delays not strictly increasing at index {}", k));
  }
}

void check_delay_resolved(const SpectralGrid& jsa, double tau) {
  const double phase_step = std::abs(tau) * std::max(jsa.omega_s().step, jsa.omega_i().step);
  if (!(phase_step < std::numbers::pi))
    throw Error(ErrorKind::DelayTooLargeForGrid,
                fmt::format("|tau|*step = {:.4g} rad at tau = {:.6g} ps (must stay below pi)", phase_step, tau));
}

std::string num(double v) { return fmt::format("{:.17g}", v); }


}  // namespace

void record_model(std::map<std::string, std::string>& meta, const spectra::ProcessModel& model) {
  meta["omega_c_rad_per_ps"] = num(model.pump.omega_c.value);
  meta["sigma_rad_per_ps"] = num(model.pump.sigma);
  meta["length_mm"] = num(model.phasematch.length_mm);
  meta["dk_s_ps_per_mm"] = num(model.phasematch.dk_s);
  meta["dk_i_ps_per_mm"] = num(model.phasematch.dk_i);
  meta["gamma"] = num(model.phasematch.gamma);
  meta["shape"] = model.phasematch.shape == spectra::PhasematchShape::Sinc ? "sinc" : "gaussian";
  meta["tau_plus_ps"] = num(model.phasematch.tau_plus());
  meta["tau_minus_ps"] = num(model.phasematch.tau_minus());
  if (model.superposition) {
    meta["delta_omega_rad_per_ps"] = num(model.superposition->delta_omega);
    meta["r"] = num(model.superposition->r);
    meta["rho"] = num(model.superposition->rho());
    meta["phi_rad"] = num(model.superposition->phi);
  }
}

void HomTrace::validate() const {
  if (probabilities.size() != delays.size())
    throw Error(ErrorKind::InvalidArgument, "trace delay and probability arrays differ in length");
  if (standard_error && standard_error->size() != delays.size())
    throw Error(ErrorKind::InvalidArgument, "trace standard-error array has the wrong length");
  require_increasing(delays);
  for (std::size_t k = 0; k < probabilities.size(); ++k)
    if (!std::isfinite(probabilities[k]))
      throw Error(ErrorKind::NonFiniteData, fmt::format("probability index {} is not finite", k));
}

double hom_numeric(const SpectralGrid& jsa, Delay tau) {
  check_delay_resolved(jsa, tau.value);
  const auto g = kernels::parallel::exchange_diagonals(jsa);
  const auto overlap = kernels::parallel::exchange_overlap(g, jsa.omega_s().step, tau.value);
  return clamp_probability(0.5 - 0.5 * overlap.real());
}

double hom_separable(const SpectralAmplitude& f1, const SpectralAmplitude& f2, Delay tau) {
  if (!f1.axis.same_as(f2.axis) || f1.values.size() != f1.axis.size || f2.values.size() != f2.axis.size)
    throw Error(ErrorKind::GridMismatch, "separable amplitudes must share one axis");
  double n1 = 0.0;
  double n2 = 0.0;
  Complex overlap{0.0, 0.0};
  for (std::size_t k = 0; k < f1.axis.size; ++k) {
    const double w = f1.axis.weight(k);
    n1 += w * std::norm(f1.values[k]);
    n2 += w * std::norm(f2.values[k]);
    const double phase = -tau.value * f1.axis[k];
    overlap += w * std::conj(f1.values[k]) * f2.values[k] * Complex{std::cos(phase), std::sin(phase)};
  }
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw Error(ErrorKind::ZeroNorm, "separable amplitude has zero norm");
  return 0.5 - 0.5 * std::norm(overlap) / (n1 * n2);
}

ClosedFormParams closed_form_params(const spectra::ProcessModel& model) {
  ClosedFormParams p;
  p.tau_minus = model.phasematch.tau_minus();
  p.tau_plus = model.phasematch.tau_plus();
  p.sigma = model.pump.sigma;
  p.gamma = model.phasematch.gamma;
  if (model.superposition) {
    p.delta_omega = model.superposition->delta_omega;
    p.rho = model.superposition->rho();
    p.phi = model.superposition->phi;
  }
  return p;
}

double hom_closed_form(const ClosedFormParams& p, double tau) {
  if (std::abs(p.tau_minus) < kMinTauMinus)
    throw Error(ErrorKind::DegenerateGroupDelay,
                fmt::format("|tau-| = {:.3g} ps is below 1e-6 ps; the dip envelope is singular", std::abs(p.tau_minus)));
  const double cm = p.c_minus();
  const double cp = p.c_plus();
  const double shift = tau - p.tau_minus;
  const double envelope = std::exp(-shift * shift / (2.0 * p.gamma * p.tau_minus * p.tau_minus));
  const double beat = std::exp(-cm / cp) + p.rho * std::cos(p.delta_omega * tau - p.phi);
  const double norm = 1.0 + std::exp(-cm) * p.rho * std::cos(p.delta_omega * p.tau_minus - p.phi);
  return 0.5 - envelope / (2.0 * std::sqrt(cp)) * beat / norm;
}

double hom_analytic(const spectra::ProcessModel& model, Delay tau) {
  model.validate();
  if (model.phasematch.shape != spectra::PhasematchShape::GaussianApprox)
    throw Error(ErrorKind::InvalidModel, "closed-form trace requires the Gaussian-approximated phasematching");
  return hom_closed_form(closed_form_params(model), tau.value);
}

std::string to_string(Engine engine) { return engine == Engine::Numeric ? "numeric" : "analytic"; }

std::string to_string(Verdict verdict) { return verdict == Verdict::Entangled ? "Entangled" : "Inconclusive"; }

HomTrace sweep_numeric(const SpectralGrid& jsa, std::span<const double> delays) {
  require_increasing(delays);
  for (std::size_t k = 0; k < delays.size(); ++k) {
    try {
      check_delay_resolved(jsa, delays[k]);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("delay index {}: {}", k, e.message()));
    }
  }
  HomTrace trace;
  trace.delays.assign(delays.begin(), delays.end());
  trace.meta["engine"] = to_string(Engine::Numeric);
  trace.meta["grid_samples"] = std::to_string(jsa.rows());
  trace.meta["grid_step_rad_per_ps"] = num(jsa.omega_s().step);
  if (delays.empty()) return trace;
  trace.probabilities = kernels::parallel::hom_sweep(jsa, delays);
  for (auto& p : trace.probabilities) p = clamp_probability(p);
  return trace;
}

HomTrace sweep_analytic(const spectra::ProcessModel& model, std::span<const double> delays) {
  require_increasing(delays);
  HomTrace trace;
  trace.delays.assign(delays.begin(), delays.end());
  trace.probabilities.reserve(delays.size());
  for (std::size_t k = 0; k < delays.size(); ++k) {
    try {
      trace.probabilities.push_back(hom_analytic(model, Delay{delays[k]}));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("delay index {}: {}", k, e.message()));
    }
  }
  trace.meta["engine"] = to_string(Engine::Analytic);
  record_model(trace.meta, model);
  return trace;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (std::size_t k = 0; k < count; ++k)
    out[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
  return out;
}

Verdict witness(const HomTrace& trace, double epsilon) {
  if (trace.empty()) throw Error(ErrorKind::EmptyTrace, "witness needs at least one sample");
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "guard band must be non-negative");
  const double peak = *std::max_element(trace.probabilities.begin(), trace.probabilities.end());
  return peak > 0.5 + epsilon ? Verdict::Entangled : Verdict::Inconclusive;
}

double default_guard_band(const HomTrace& trace) {
  if (trace.empty()) throw Error(ErrorKind::EmptyTrace, "guard band of an empty trace");
  if (!trace.standard_error) return kNoiselessGuardBand;
  const auto peak = std::max_element(trace.probabilities.begin(), trace.probabilities.end());
  const auto k = static_cast<std::size_t>(peak - trace.probabilities.begin());
  return std::max(3.0 * (*trace.standard_error)[k], kNoiselessGuardBand);
}

}  // namespace biphoton::hom
