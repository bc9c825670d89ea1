#include "biphoton/fitting.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "biphoton/errors.hpp"
#include "biphoton/nelder_mead.hpp"

namespace biphoton::fit {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAgreement = 1e-4;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDiscriminationTolerance = 1e-3;

double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

struct Restart {
  NelderMeadResult result;
  std::uint64_t seed = 0;
};

bool agree(FitParam p, double a, double b, const Bounds& bounds) {
  if (p == FitParam::Phi) {
    double d = std::abs(wrap_phase(a) - wrap_phase(b));
    d = std::min(d, kTwoPi - d);
    return d <= kAgreement * std::max({std::abs(wrap_phase(a)), std::abs(wrap_phase(b)), 1e-2 * kTwoPi});
  }
  const double width = std::isfinite(bounds.upper - bounds.lower) ? bounds.upper - bounds.lower : 1.0;
  return std::abs(a - b) <= kAgreement * std::max({std::abs(a), std::abs(b), 1e-2 * width});
}

}  // namespace

std::string_view name(FitParam p) {
  switch (p) {
    case FitParam::DeltaOmega: return "delta_omega";
    case FitParam::Rho: return "rho";
    case FitParam::R: return "r";
    case FitParam::Phi: return "phi";
    case FitParam::TauMinus: return "tau_minus";
    case FitParam::TauPlus: return "tau_plus";
    case FitParam::Sigma: return "sigma";
    case FitParam::Visibility: return "visibility";
    case FitParam::Baseline: return "baseline";
    case FitParam::TauOffset: return "tau_offset";
  }
  return "?";
}

std::string_view unit(FitParam p) {
  switch (p) {
    case FitParam::DeltaOmega:
    case FitParam::Sigma: return "rad/ps";
    case FitParam::Phi: return "rad";
    case FitParam::TauMinus:
    case FitParam::TauPlus:
    case FitParam::TauOffset: return "ps";
    default: return "1";
  }
}

std::optional<FitParam> parse_fit_param(std::string_view text) {
  for (auto p : {FitParam::DeltaOmega, FitParam::Rho, FitParam::R, FitParam::Phi, FitParam::TauMinus,
                 FitParam::TauPlus, FitParam::Sigma, FitParam::Visibility, FitParam::Baseline, FitParam::TauOffset})
    if (name(p) == text) return p;
  return std::nullopt;
}

hom::ClosedFormParams ModelParams::closed_form() const {
  return {tau_minus, tau_plus, sigma, gamma, delta_omega, rho, phi};
}

double ModelParams::get(FitParam p) const {
  switch (p) {
    case FitParam::DeltaOmega: return delta_omega;
    case FitParam::Rho: return rho;
    case FitParam::R: return spectra::r_from_rho(std::clamp(rho, 0.0, 1.0));
    case FitParam::Phi: return phi;
    case FitParam::TauMinus: return tau_minus;
    case FitParam::TauPlus: return tau_plus;
    case FitParam::Sigma: return sigma;
    case FitParam::Visibility: return visibility;
    case FitParam::Baseline: return baseline;
    case FitParam::TauOffset: return tau_offset;
  }
  return 0.0;
}

void ModelParams::set(FitParam p, double v) {
  switch (p) {
    case FitParam::DeltaOmega: delta_omega = v; break;
    case FitParam::Rho: rho = v; break;
    case FitParam::R: rho = 2.0 * v / (1.0 + v * v); break;
    case FitParam::Phi: phi = v; break;
    case FitParam::TauMinus: tau_minus = v; break;
    case FitParam::TauPlus: tau_plus = v; break;
    case FitParam::Sigma: sigma = v; break;
    case FitParam::Visibility: visibility = v; break;
    case FitParam::Baseline: baseline = v; break;
    case FitParam::TauOffset: tau_offset = v; break;
  }
}

ModelParams params_from_model(const spectra::ProcessModel& model) {
  const auto cf = hom::closed_form_params(model);
  ModelParams p;
  p.delta_omega = cf.delta_omega;
  p.rho = cf.rho;
  p.phi = cf.phi;
  p.tau_minus = cf.tau_minus;
  p.tau_plus = cf.tau_plus;
  p.sigma = cf.sigma;
  p.gamma = cf.gamma;
  return p;
}

double model_probability(const ModelParams& params, double tau) {
  return params.baseline + params.visibility * (hom::hom_closed_form(params.closed_form(), tau + params.tau_offset) - 0.5);
}

hom::HomTrace model_trace(const ModelParams& params, std::span<const double> delays) {
  hom::HomTrace trace;
  trace.delays.assign(delays.begin(), delays.end());
  trace.probabilities.reserve(delays.size());
  for (double tau : delays) trace.probabilities.push_back(model_probability(params, tau));
  trace.meta["engine"] = "fit-model";
  return trace;
}

Bounds default_bounds(FitParam p, const ModelParams& initial) {
  const double v = initial.get(p);
  switch (p) {
    case FitParam::Rho:
    case FitParam::R:
    case FitParam::Baseline: return {0.0, 1.0};
    case FitParam::Visibility: return {1e-3, 1.0};
    case FitParam::Phi: return {-kInf, kInf};
    case FitParam::TauOffset: return {-2.0, 2.0};
    case FitParam::DeltaOmega:
      return v > 0.0 ? Bounds{0.5 * v, 2.0 * v} : Bounds{0.0, 10.0};
    case FitParam::TauMinus:
    case FitParam::TauPlus:
    case FitParam::Sigma:
      if (v == 0.0) return {-1.0, 1.0};
      return v > 0.0 ? Bounds{0.5 * v, 2.0 * v} : Bounds{2.0 * v, 0.5 * v};
  }
  return {-kInf, kInf};
}

void FitSpec::validate() const {
  if (free.empty()) throw Error(ErrorKind::InvalidArgument, "no free fit parameters");
  if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");
  bool rho_free = false;
  bool r_free = false;
  for (std::size_t k = 0; k < free.size(); ++k) {
    const auto p = free[k];
    for (std::size_t j = 0; j < k; ++j)
      if (free[j] == p) throw Error(ErrorKind::InvalidArgument, fmt::format("{} listed twice", name(p)));
    rho_free |= p == FitParam::Rho;
    r_free |= p == FitParam::R;
    const auto it = bounds.find(p);
    const Bounds b = it != bounds.end() ? it->second : default_bounds(p, initial);
    if (!(b.lower <= b.upper)) throw Error(ErrorKind::InvalidArgument, fmt::format("empty bounds for {}", name(p)));
    if (!b.contains(initial.get(p)))
      throw Error(ErrorKind::InvalidArgument, fmt::format("initial {} outside its bounds", name(p)));
    if ((p == FitParam::Rho) && (b.lower < 0.0 || b.upper > 1.0))
      throw Error(ErrorKind::InvalidArgument, "rho bounds must lie within [0, 1]");
    if (p == FitParam::Visibility && (b.lower <= 0.0 || b.upper > 1.0))
      throw Error(ErrorKind::InvalidArgument, "visibility bounds must lie within (0, 1]");
  }
  if (rho_free && r_free) throw Error(ErrorKind::InvalidArgument, "rho and r cannot both be free");
}

FitResult fit_trace(const hom::HomTrace& data, const FitSpec& spec) {
  spec.validate();
  if (data.delays.size() != data.probabilities.size())
    throw Error(ErrorKind::InvalidArgument, "trace arrays differ in length");
  for (std::size_t k = 0; k < data.size(); ++k)
    if (!std::isfinite(data.delays[k]) || !std::isfinite(data.probabilities[k]))
      throw Error(ErrorKind::NonFiniteData, fmt::format("trace sample {} is not finite", k));
  const std::size_t nfree = spec.free.size();
  if (data.size() < 2 * nfree)
    throw Error(ErrorKind::TooFewSamples,
                fmt::format("{} samples for {} free parameters (need at least twice as many)", data.size(), nfree));

  Box box;
  std::vector<Bounds> bounds(nfree);
  for (std::size_t k = 0; k < nfree; ++k) {
    const auto it = spec.bounds.find(spec.free[k]);
    bounds[k] = it != spec.bounds.end() ? it->second : default_bounds(spec.free[k], spec.initial);
    box.lower.push_back(bounds[k].lower);
    box.upper.push_back(bounds[k].upper);
  }

  auto unpack = [&](const std::vector<double>& x) {
    ModelParams p = spec.initial;
    for (std::size_t k = 0; k < nfree; ++k) p.set(spec.free[k], x[k]);
    return p;
  };
  auto residuals = [&](const std::vector<double>& x) {
    const ModelParams p = unpack(x);
    std::vector<double> r(data.size());
    for (std::size_t k = 0; k < data.size(); ++k) r[k] = model_probability(p, data.delays[k]) - data.probabilities[k];
    return r;
  };
  const std::function<double(const std::vector<double>&)> objective = [&](const std::vector<double>& x) {
    double ssr = 0.0;
    for (double r : residuals(x)) ssr += r * r;
    return ssr;
  };

  NelderMeadOptions options;
  options.unbounded_scale.assign(nfree, 1.0);
  for (std::size_t k = 0; k < nfree; ++k)
    if (spec.free[k] == FitParam::Phi) options.unbounded_scale[k] = kTwoPi;

  std::vector<Restart> restarts(static_cast<std::size_t>(spec.restarts));
  const auto count = static_cast<std::ptrdiff_t>(restarts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t r = 0; r < count; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    const std::uint64_t seed = spec.seed + idx;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<double> start(nfree);
    for (std::size_t k = 0; k < nfree; ++k) {
      const auto p = spec.free[k];
      const double v = spec.initial.get(p);
      if (p == FitParam::Phi) {
        start[k] = v + kTwoPi * static_cast<double>(idx) / static_cast<double>(spec.restarts);
      } else if (idx == 0) {
        start[k] = v;
      } else {
        const double width = bounds[k].upper - bounds[k].lower;
        start[k] = std::clamp(v + jitter(rng) * (std::isfinite(width) ? width : 1.0), bounds[k].lower, bounds[k].upper);
      }
    }
    restarts[idx].seed = seed;
    restarts[idx].result = nelder_mead(objective, start, box, options);
  }

  std::vector<std::size_t> order(restarts.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return restarts[a].result.value < restarts[b].result.value;
  });
  const auto& best = restarts[order.front()].result;

  FitResult out;
  out.params = unpack(best.x);
  out.params.phi = wrap_phase(out.params.phi);
  for (std::size_t k = 0; k < nfree; ++k)
    out.values[spec.free[k]] = spec.free[k] == FitParam::Phi ? wrap_phase(best.x[k]) : best.x[k];
  out.residual_rms = std::sqrt(best.value / static_cast<double>(data.size()));
  out.iterations = best.iterations;
  out.objective_history = best.best_history;
  for (const auto& r : restarts) out.restart_objectives.push_back(r.result.value);

  out.converged = best.converged;
  if (restarts.size() > 1) {
    const auto& second = restarts[order[1]].result;
    for (std::size_t k = 0; k < nfree; ++k)
      out.converged = out.converged && agree(spec.free[k], best.x[k], second.x[k], bounds[k]);
  }

  // Standard errors from the Gauss-Newton curvature at the optimum.
  const std::size_t n = data.size();
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nfree));
  for (std::size_t k = 0; k < nfree; ++k) {
    const double width = bounds[k].upper - bounds[k].lower;
    const double h = 1e-6 * std::max(std::abs(best.x[k]), std::isfinite(width) ? 1e-2 * width : 1.0);
    auto xp = best.x;
    auto xm = best.x;
    xp[k] += h;
    xm[k] -= h;
    const auto rp = residuals(xp);
    const auto rm = residuals(xm);
    for (std::size_t i = 0; i < n; ++i)
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (rp[i] - rm[i]) / (2.0 * h);
  }
  const double dof = n > nfree ? static_cast<double>(n - nfree) : 1.0;
  const double s2 = best.value / dof;
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  for (std::size_t k = 0; k < nfree; ++k) {
    double se = std::numeric_limits<double>::quiet_NaN();
    if (lu.isInvertible()) {
      const Eigen::MatrixXd cov = s2 * lu.inverse();
      se = std::sqrt(std::max(cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), 0.0));
    }
    out.param_stderr[spec.free[k]] = se;
  }
  return out;
}

hom::HomTrace normalize_counts(std::span<const double> delays, std::span<const double> counts) {
  if (delays.size() != counts.size()) throw Error(ErrorKind::InvalidArgument, "delay and count arrays differ in length");
  if (counts.empty()) throw Error(ErrorKind::EmptyTrace, "no count samples");
  for (double c : counts)
    if (!std::isfinite(c) || c < 0.0) throw Error(ErrorKind::NonFiniteData, "counts must be finite and non-negative");
  const std::size_t n = counts.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < edge || k >= n - edge) {
      sum += counts[k];
      ++used;
    }
  }
  const double plateau = sum / static_cast<double>(used);
  if (!(plateau > 0.0)) throw Error(ErrorKind::ZeroNorm, "count plateau is zero");

  hom::HomTrace trace;
  trace.delays.assign(delays.begin(), delays.end());
  trace.standard_error.emplace();
  for (double c : counts) {
    trace.probabilities.push_back(c / (2.0 * plateau));
    trace.standard_error->push_back(std::sqrt(std::max(c, 1.0)) / (2.0 * plateau));
  }
  trace.meta["source"] = "counts";
  trace.meta["plateau_counts"] = fmt::format("{:.17g}", plateau);
  trace.validate();
  return trace;
}

SincReport discriminate_sinc(const spectra::ProcessModel& model, std::span<const double> delays,
                             const spectra::GridSpec& grid) {
  model.validate();
  spectra::ProcessModel single = model;
  single.superposition.reset();
  auto spec = grid;
  if (!spec.max_delay && !spec.samples) {
    double reach = 0.0;
    for (double t : delays) reach = std::max(reach, std::abs(t));
    if (reach > 0.0) spec.max_delay = reach;
  }
  const auto jsa = spectra::build_jsa(single, spec);

  spectra::ProcessModel standin = model;
  standin.phasematch.shape = spectra::PhasematchShape::GaussianApprox;

  SincReport report;
  report.sinc_trace = hom::sweep_numeric(jsa, delays);
  report.standin_trace = hom::sweep_analytic(standin, delays);
  if (delays.empty()) return report;

  report.sinc_max = *std::max_element(report.sinc_trace.probabilities.begin(), report.sinc_trace.probabilities.end());
  report.standin_max =
      *std::max_element(report.standin_trace.probabilities.begin(), report.standin_trace.probabilities.end());
  report.sinc_exceeds_half = report.sinc_max > 0.5 + kDiscriminationTolerance;
  report.standin_exceeds_half = report.standin_max > 0.5 + kDiscriminationTolerance;

  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < delays.size(); ++k) {
    const double d0 = report.sinc_trace.probabilities[k] - report.standin_trace.probabilities[k];
    const double d1 = report.sinc_trace.probabilities[k + 1] - report.standin_trace.probabilities[k + 1];
    acc += 0.5 * (d0 * d0 + d1 * d1) * (delays[k + 1] - delays[k]);
  }
  report.l2_distance = std::sqrt(acc);
  return report;
}

}  // namespace biphoton::fit
