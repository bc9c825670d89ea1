#include "biphoton/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton::spectra {
namespace {

constexpr double kBoundaryTolerance = 1e-4;
constexpr double kMinSamplesPerBeat = 8.0;

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Amplitude of F with the phasematching replaced by its Gaussian envelope;
// used to bound truncation for either shape.
double envelope_magnitude(const ProcessModel& model, double omega_s, double omega_i) {
  ProcessModel g = model;
  g.phasematch.shape = PhasematchShape::GaussianApprox;
  if (!g.superposition) return std::abs(joint_amplitude(g, omega_s, omega_i));
  const auto& sp = *g.superposition;
  const double nu_s = omega_s - g.pump.omega_c();
  const double nu_i = omega_i - g.pump.omega_c();
  const double a = std::abs(pump_envelope(g.pump, AngularFrequency{omega_s + omega_i}));
  const double plus = std::abs(phasematching(g.phasematch, nu_s + sp.delta_omega / 2, nu_i - sp.delta_omega / 2));
  const double minus = std::abs(phasematching(g.phasematch, nu_s - sp.delta_omega / 2, nu_i + sp.delta_omega / 2));
  return a * (plus + sp.r * minus);
}

}  // namespace

void PumpModel::validate() const {
  if (!finite_positive(omega_c.value)) throw Error(ErrorKind::InvalidModel, "pump omega_c must be finite and positive");
  if (!finite_positive(sigma)) throw Error(ErrorKind::InvalidModel, "pump sigma must be finite and positive");
}

void PhasematchModel::validate() const {
  if (!finite_positive(length_mm)) throw Error(ErrorKind::InvalidModel, "crystal length must be positive");
  if (!finite_positive(gamma)) throw Error(ErrorKind::InvalidModel, "gamma must be positive");
  if (!std::isfinite(dk_s) || !std::isfinite(dk_i))
    throw Error(ErrorKind::InvalidModel, "group-delay mismatches must be finite");
  if (!std::isfinite(tau_plus()) || !std::isfinite(tau_minus()))
    throw Error(ErrorKind::InvalidModel, "tau+/tau- not finite");
}

void SuperpositionModel::validate() const {
  if (!std::isfinite(delta_omega) || delta_omega < 0.0)
    throw Error(ErrorKind::InvalidModel, "delta_omega must be finite and non-negative");
  if (!std::isfinite(r) || r < 0.0) throw Error(ErrorKind::InvalidModel, "r must be finite and non-negative");
  if (!std::isfinite(phi)) throw Error(ErrorKind::InvalidModel, "phi must be finite");
}

double r_from_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(ErrorKind::InvalidModel, "rho must lie in [0, 1]");
  if (rho == 0.0) return 0.0;
  return (1.0 - std::sqrt(1.0 - rho * rho)) / rho;
}

void ProcessModel::validate() const {
  pump.validate();
  phasematch.validate();
  if (superposition) superposition->validate();
}

std::complex<double> pump_envelope(const PumpModel& pump, AngularFrequency omega_sum) {
  const double detuning = 2.0 * pump.omega_c.value - omega_sum.value;
  return {std::exp(-detuning * detuning / (2.0 * pump.sigma * pump.sigma)), 0.0};
}

std::complex<double> phasematching(const PhasematchModel& pm, double nu_s, double nu_i) {
  const double x = (pm.dk_s * nu_s + pm.dk_i * nu_i) * pm.length_mm / 2.0;
  const double magnitude = pm.shape == PhasematchShape::Sinc ? sinc(x) : std::exp(-pm.gamma * x * x);
  return magnitude * std::complex<double>{std::cos(x), -std::sin(x)};
}

std::complex<double> joint_amplitude(const ProcessModel& model, double omega_s, double omega_i) {
  const double nu_s = omega_s - model.pump.omega_c.value;
  const double nu_i = omega_i - model.pump.omega_c.value;
  const auto alpha = pump_envelope(model.pump, AngularFrequency{omega_s + omega_i});
  if (!model.superposition) return alpha * phasematching(model.phasematch, nu_s, nu_i);
  const auto& sp = *model.superposition;
  const double half = sp.delta_omega / 2.0;
  const auto f_plus = phasematching(model.phasematch, nu_s + half, nu_i - half);
  const auto f_minus = phasematching(model.phasematch, nu_s - half, nu_i + half);
  return alpha * (f_plus + std::polar(sp.r, sp.phi) * f_minus);
}

ResolvedGrid resolve_grid(const ProcessModel& model, const GridSpec& spec) {
  model.validate();
  const auto& pm = model.phasematch;
  const double delta = model.superposition ? model.superposition->delta_omega : 0.0;
  const bool sinc_shape = pm.shape == PhasematchShape::Sinc;

  ResolvedGrid out;
  if (spec.half_span) {
    if (!finite_positive(*spec.half_span)) throw Error(ErrorKind::InvalidModel, "grid half_span must be positive");
    out.half_span = *spec.half_span;
  } else {
    // |F| ~ exp(-v^T M v / 2) with M = (1/σ²)[1 1; 1 1] + 2γ[a² ab; ab b²].
    const double a = pm.dk_s * pm.length_mm / 2.0;
    const double b = pm.dk_i * pm.length_mm / 2.0;
    const double inv_s2 = 1.0 / (model.pump.sigma * model.pump.sigma);
    const double m00 = inv_s2 + 2.0 * pm.gamma * a * a;
    const double m11 = inv_s2 + 2.0 * pm.gamma * b * b;
    const double det = 2.0 * pm.gamma * (a - b) * (a - b) * inv_s2;
    if (!(det > 0.0) || std::abs(pm.tau_minus()) < 1e-9)
      throw Error(ErrorKind::GridTooNarrow,
                  "tau- = 0 leaves the amplitude unbounded along the anti-diagonal; give an explicit half_span");
    const double marginal_std = std::sqrt(std::max(m11, m00) / det);
    const double reach = sinc_shape ? 20.0 : 6.0;
    out.half_span = delta / 2.0 + reach * marginal_std;
  }

  if (spec.samples) {
    out.samples = *spec.samples;
    if (out.samples < 2) throw Error(ErrorKind::GridTooCoarse, "grid needs at least 2 samples");
  } else {
    std::size_t n = sinc_shape ? 3 * kDefaultGridSamples : kDefaultGridSamples;
    if (delta > 0.0) {
      const double max_step = 2.0 * std::numbers::pi / (kMinSamplesPerBeat * delta);
      const auto needed = static_cast<std::size_t>(std::ceil(2.0 * out.half_span / max_step)) + 1;
      n = std::max(n, needed);
    }
    if (spec.max_delay && *spec.max_delay > 0.0) {
      const double max_step = std::numbers::pi / (2.0 * *spec.max_delay);
      const auto needed = static_cast<std::size_t>(std::ceil(2.0 * out.half_span / max_step)) + 1;
      n = std::max(n, needed);
    }
    out.samples = n;
  }
  return out;
}

SpectralGrid build_jsa(const ProcessModel& model, const GridSpec& spec) {
  const auto resolved = resolve_grid(model, spec);
  const auto axis = UniformAxis::centered(model.pump.omega_c.value, resolved.half_span, resolved.samples);

  if (model.superposition && model.superposition->delta_omega > 0.0) {
    const double beat = 2.0 * std::numbers::pi / model.superposition->delta_omega;
    if (beat / axis.step < kMinSamplesPerBeat)
      throw Error(ErrorKind::GridTooCoarse, "only " + std::to_string(beat / axis.step) +
                                                " samples per beat period 2π/Δω (need 8)");
  }

  SpectralGrid grid(axis, axis);
  kernels::parallel::fill(grid, [&](double ws, double wi) { return joint_amplitude(model, ws, wi); });
  grid.check_finite();

  // Truncation check against the Gaussian envelope of the amplitude.
  double peak = 0.0;
  for (std::size_t is = 0; is < grid.rows(); ++is)
    for (std::size_t ii = 0; ii < grid.cols(); ++ii)
      peak = std::max(peak, envelope_magnitude(model, axis[is], axis[ii]));
  double edge = 0.0;
  const std::size_t last = axis.size - 1;
  for (std::size_t k = 0; k < axis.size; ++k) {
    edge = std::max({edge, envelope_magnitude(model, axis[0], axis[k]), envelope_magnitude(model, axis[last], axis[k]),
                     envelope_magnitude(model, axis[k], axis[0]), envelope_magnitude(model, axis[k], axis[last])});
  }
  if (!(peak > 0.0)) throw Error(ErrorKind::ZeroNorm, "amplitude vanishes on the grid");
  if (edge > kBoundaryTolerance * peak)
    throw Error(ErrorKind::GridTooNarrow,
                "boundary amplitude is " + std::to_string(edge / peak) + " of peak (limit 1e-4)");

  grid.normalize();
  return grid;
}

}  // namespace biphoton::spectra
