#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "biphoton/cli.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/hom.hpp"
#include "biphoton/io.hpp"

namespace biphoton::cli {
namespace {

io::Header header_for(Command command, const RunOptions& options) {
  auto h = io::standard_header(options.config_hash);
  h.emplace_back("command", std::string(to_string(command)));
  h.emplace_back("seed", std::to_string(options.seed));
  return h;
}

template <class Writer>
void emit(const RunOptions& options, const std::string& name, std::ostream& out, Writer&& write) {
  std::ostringstream ss;
  write(ss);
  io::write_file(options.out_dir / name, ss.str());
  out << "wrote " << (options.out_dir / name).string() << '\n';
}

void write_binary(const RunOptions& options, const std::string& name, const SpectralGrid& jsa, std::ostream& out) {
  const auto path = options.out_dir / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  io::write_jsa_binary(f, jsa);
  if (!f) throw Error(ErrorKind::Io, "failed writing " + path.string());
  out << "wrote " << path.string() << '\n';
}

std::vector<double> delay_grid(const RunConfig& c) {
  return hom::linspace(c.delays->start, c.delays->stop, c.delays->count);
}

spectra::GridSpec grid_for(const RunConfig& c, const std::vector<double>& delays) {
  auto spec = c.grid;
  double reach = 0.0;
  for (double t : delays) reach = std::max(reach, std::abs(t));
  if (reach > 0.0) spec.max_delay = reach;
  return spec;
}

struct Extremes {
  double min_p = 0.0, min_tau = 0.0, max_p = 0.0, max_tau = 0.0;
};

Extremes extremes(const hom::HomTrace& t) {
  const auto lo = std::min_element(t.probabilities.begin(), t.probabilities.end()) - t.probabilities.begin();
  const auto hi = std::max_element(t.probabilities.begin(), t.probabilities.end()) - t.probabilities.begin();
  return {t.probabilities[lo], t.delays[lo], t.probabilities[hi], t.delays[hi]};
}

void report_trace(std::ostream& out, const std::string& label, const hom::HomTrace& t) {
  const auto e = extremes(t);
  out << fmt::format("{}: min p = {:.9f} at tau = {:.6g} ps, max p = {:.9f} at tau = {:.6g} ps\n", label, e.min_p,
                     e.min_tau, e.max_p, e.max_tau);
}

void simulate(const RunConfig& c, const RunOptions& o, std::ostream& out) {
  const auto& model = *c.model;
  const auto header = header_for(Command::Simulate, o);
  const auto delays = delay_grid(c);
  const auto spec = grid_for(c, delays);
  const auto resolved = spectra::resolve_grid(model, spec);
  out << fmt::format("grid: {} x {} samples, half span {:.6g} rad/ps\n", resolved.samples, resolved.samples,
                     resolved.half_span);
  const auto jsa = spectra::build_jsa(model, spec);

  if (c.jsa_format != JsaFormat::Binary)
    emit(o, "jsa.csv", out, [&](std::ostream& os) { io::write_jsa_csv(os, jsa, header); });
  if (c.jsa_format != JsaFormat::Csv) write_binary(o, "jsa.bin", jsa, out);

  auto numeric = hom::sweep_numeric(jsa, delays);
  hom::record_model(numeric.meta, model);
  emit(o, "trace_numeric.csv", out, [&](std::ostream& os) { io::write_trace_csv(os, numeric, header); });
  report_trace(out, "numeric", numeric);

  std::optional<hom::HomTrace> analytic;
  if (model.phasematch.shape == spectra::PhasematchShape::GaussianApprox) {
    analytic = hom::sweep_analytic(model, delays);
    emit(o, "trace_analytic.csv", out, [&](std::ostream& os) { io::write_trace_csv(os, *analytic, header); });
    report_trace(out, "analytic", *analytic);
    double dev = 0.0;
    for (std::size_t k = 0; k < delays.size(); ++k)
      dev = std::max(dev, std::abs(numeric.probabilities[k] - analytic->probabilities[k]));
    out << fmt::format("max |numeric - analytic| = {:.3e}\n", dev);
  }

  if (c.noise > 0.0) {
    auto synthetic = analytic ? *analytic : numeric;
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> noise(0.0, c.noise);
    for (auto& p : synthetic.probabilities) p = std::clamp(p + noise(rng), 0.0, 1.0);
    synthetic.standard_error = std::vector<double>(synthetic.size(), c.noise);
    synthetic.meta["noise"] = fmt::format("{:.17g}", c.noise);
    synthetic.meta["source"] = synthetic.meta["engine"];
    synthetic.meta["engine"] = "synthetic";
    emit(o, "trace_synthetic.csv", out, [&](std::ostream& os) { io::write_trace_csv(os, synthetic, header); });
  }
}

void decompose(const RunConfig& c, const RunOptions& o, std::ostream& out) {
  const auto& model = *c.model;
  const auto& bc = *c.basis;
  const auto header = header_for(Command::Decompose, o);
  auto jsa = spectra::build_jsa(model, c.grid);
  const AngularFrequency center{bc.center.value_or(model.pump.omega_c.value)};
  if (bc.compensate_s != 0.0 || bc.compensate_i != 0.0)
    jsa = modes::compensate_delays(jsa, center, bc.compensate_s, bc.compensate_i);

  modes::HermiteBasis basis{center, bc.scale, bc.max_order};
  basis.validate();
  if (bc.optimize) {
    basis = modes::optimize_basis(jsa, basis);
    out << fmt::format("optimized basis scale = {:.9g} rad/ps\n", basis.scale);
  }
  const auto d = modes::project(jsa, basis);
  const auto s = modes::schmidt_decompose(jsa);
  const double overlap = modes::singlet_overlap(jsa, basis);

  std::vector<double> leading(s.schmidt_values.begin(),
                              s.schmidt_values.begin() + std::min<std::size_t>(16, s.schmidt_values.size()));
  emit(o, "modes.csv", out, [&](std::ostream& os) { io::write_modes_csv(os, d, leading, header); });

  double purity = 0.0;
  for (double l : s.schmidt_values) purity += l * l * l * l;
  std::ostringstream summary;
  io::write_header(summary, header);
  summary << fmt::format("basis_center = {:.17g} rad/ps\n", basis.center.value);
  summary << fmt::format("basis_scale = {:.17g} rad/ps\n", basis.scale);
  summary << fmt::format("max_order = {}\n", basis.max_order);
  summary << fmt::format("captured_weight = {:.17g}\n", d.captured_weight);
  summary << fmt::format("singlet_overlap = {:.17g}\n", overlap);
  summary << fmt::format("c01 = {:.17g} {:+.17g}i\n", d.coefficient(0, 1).real(), d.coefficient(0, 1).imag());
  summary << fmt::format("c10 = {:.17g} {:+.17g}i\n", d.coefficient(1, 0).real(), d.coefficient(1, 0).imag());
  summary << fmt::format("schmidt_number = {:.17g}\n", 1.0 / purity);
  for (std::size_t k = 0; k < leading.size(); ++k) summary << fmt::format("lambda_{} = {:.17g}\n", k, leading[k]);
  io::write_file(o.out_dir / "decompose.txt", summary.str());
  out << "wrote " << (o.out_dir / "decompose.txt").string() << '\n';

  out << fmt::format("captured weight = {:.6f}\n", d.captured_weight);
  out << fmt::format("singlet overlap = {:.6f}\n", overlap);
  out << fmt::format("schmidt number = {:.6f}\n", 1.0 / purity);
}

void witness(const RunConfig& c, const RunOptions& o, std::ostream& out) {
  hom::HomTrace trace;
  if (c.input) {
    std::ifstream f(*c.input);
    if (!f) throw Error(ErrorKind::Io, "cannot open trace " + c.input->string());
    trace = io::read_trace_csv(f);
  } else {
    const auto delays = delay_grid(c);
    trace = hom::sweep_numeric(spectra::build_jsa(*c.model, grid_for(c, delays)), delays);
  }
  const double eps = c.epsilon.value_or(hom::default_guard_band(trace));
  const auto verdict = hom::witness(trace, eps);
  const auto e = extremes(trace);

  std::ostringstream report;
  io::write_header(report, header_for(Command::Witness, o));
  report << fmt::format("verdict = {}\n", hom::to_string(verdict));
  report << fmt::format("guard_band = {:.6g}{}\n", eps, c.epsilon ? "" : " (default)");
  report << fmt::format("max_p = {:.17g}\n", e.max_p);
  report << fmt::format("max_tau_ps = {:.17g}\n", e.max_tau);
  report << fmt::format("samples = {}\n", trace.size());
  io::write_file(o.out_dir / "witness.txt", report.str());

  out << fmt::format("verdict: {}\n", hom::to_string(verdict));
  out << fmt::format("guard band: {:.6g}{}\n", eps, c.epsilon ? "" : " (default)");
  out << fmt::format("max p = {:.9f} at tau = {:.6g} ps\n", e.max_p, e.max_tau);
}

void fit_command(const RunConfig& c, const RunOptions& o, std::ostream& out) {
  std::ifstream f(*c.input);
  if (!f) throw Error(ErrorKind::Io, "cannot open trace " + c.input->string());
  const auto data = io::read_trace_csv(f);

  fit::FitSpec spec;
  spec.free = c.fit->free;
  spec.bounds = c.fit->bounds;
  spec.initial = fit_initial(c);
  spec.restarts = c.fit->restarts;
  spec.seed = o.seed;
  const auto result = fit::fit_trace(data, spec);
  const auto model = fit::model_trace(result.params, data.delays);
  const auto header = header_for(Command::Fit, o);

  emit(o, "fit.txt", out, [&](std::ostream& os) { io::write_fit_text(os, result, header); });
  emit(o, "fit.json", out, [&](std::ostream& os) { os << io::fit_json(result, header) << '\n'; });
  emit(o, "overlay.csv", out, [&](std::ostream& os) { io::write_overlay_csv(os, data, model, header); });
  io::write_fit_text(out, result);
}

void discriminate(const RunConfig& c, const RunOptions& o, std::ostream& out) {
  const auto delays = delay_grid(c);
  const auto report = fit::discriminate_sinc(*c.model, delays, grid_for(c, delays));
  const auto header = header_for(Command::Discriminate, o);
  emit(o, "trace_sinc.csv", out, [&](std::ostream& os) { io::write_trace_csv(os, report.sinc_trace, header); });
  emit(o, "trace_standin.csv", out, [&](std::ostream& os) { io::write_trace_csv(os, report.standin_trace, header); });

  std::ostringstream text;
  io::write_header(text, header);
  text << fmt::format("sinc_max = {:.17g}\n", report.sinc_max);
  text << fmt::format("standin_max = {:.17g}\n", report.standin_max);
  text << fmt::format("sinc_exceeds_half = {}\n", report.sinc_exceeds_half);
  text << fmt::format("standin_exceeds_half = {}\n", report.standin_exceeds_half);
  text << fmt::format("l2_distance = {:.17g}\n", report.l2_distance);
  io::write_file(o.out_dir / "discriminate.txt", text.str());
  out << "wrote " << (o.out_dir / "discriminate.txt").string() << '\n';

  out << fmt::format("single sinc process: max p = {:.9f} ({} 1/2)\n", report.sinc_max,
                     report.sinc_exceeds_half ? "above" : "not above");
  out << fmt::format("two-Gaussian stand-in: max p = {:.9f} ({} 1/2)\n", report.standin_max,
                     report.standin_exceeds_half ? "above" : "not above");
  out << fmt::format("L2 distance = {:.6g}\n", report.l2_distance);
}

}  // namespace

void run(Command command, const RunConfig& config, const RunOptions& options, std::ostream& out) {
  const auto missing = check_requirements(config, command);
  if (!missing.empty()) throw Error(ErrorKind::ConfigInvalid, missing.front().message);
  switch (command) {
    case Command::Simulate: simulate(config, options, out); break;
    case Command::Decompose: decompose(config, options, out); break;
    case Command::Witness: witness(config, options, out); break;
    case Command::Fit: fit_command(config, options, out); break;
    case Command::Discriminate: discriminate(config, options, out); break;
  }
}

}  // namespace biphoton::cli
