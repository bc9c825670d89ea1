#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "biphoton/cli.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton::cli {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Kind { Carrier, Rate, Time, Length, InverseVelocity, Angle, Scalar, Count, Word, Path, List, Flag, Width };

struct UnitDef {
  std::string_view tag;
  double factor;
};

// Units accepted per kind; factor converts to the internal unit.
std::vector<UnitDef> units_for(Kind kind) {
  switch (kind) {
    case Kind::Carrier: return {{"rad/ps", 1.0}, {"THz", kTwoPi}, {"nm", 0.0}};
    case Kind::Rate: return {{"rad/ps", 1.0}, {"THz", kTwoPi}};
    case Kind::Time: return {{"ps", 1.0}, {"fs", 1e-3}};
    case Kind::Length: return {{"mm", 1.0}, {"um", 1e-3}, {"cm", 10.0}};
    case Kind::InverseVelocity: return {{"ps/mm", 1.0}, {"fs/mm", 1e-3}};
    case Kind::Angle: return {{"rad", 1.0}, {"deg", std::numbers::pi / 180.0}, {"pi", std::numbers::pi}};
    case Kind::Width: return {{"nm", 1.0}};
    default: return {};
  }
}

std::string tags_of(Kind kind) {
  std::string s;
  for (const auto& u : units_for(kind)) s += (s.empty() ? "" : ", ") + std::string(u.tag);
  return s;
}

using Schema = std::map<std::string, std::map<std::string, Kind>>;

Kind fit_param_kind(fit::FitParam p) {
  switch (p) {
    case fit::FitParam::DeltaOmega:
    case fit::FitParam::Sigma: return Kind::Rate;
    case fit::FitParam::Phi: return Kind::Angle;
    case fit::FitParam::TauMinus:
    case fit::FitParam::TauPlus:
    case fit::FitParam::TauOffset: return Kind::Time;
    default: return Kind::Scalar;
  }
}

const std::vector<fit::FitParam>& all_fit_params() {
  static const std::vector<fit::FitParam> params{
      fit::FitParam::DeltaOmega, fit::FitParam::Rho,     fit::FitParam::R,          fit::FitParam::Phi,
      fit::FitParam::TauMinus,   fit::FitParam::TauPlus, fit::FitParam::Sigma,      fit::FitParam::Visibility,
      fit::FitParam::Baseline,   fit::FitParam::TauOffset};
  return params;
}

const Schema& schema() {
  static const Schema s = [] {
    Schema out{
        {"run", {{"command", Kind::Word}}},
        {"pump", {{"center", Kind::Carrier}, {"sigma", Kind::Rate}, {"fwhm", Kind::Width}}},
        {"phasematch",
         {{"length", Kind::Length},
          {"dk_s", Kind::InverseVelocity},
          {"dk_i", Kind::InverseVelocity},
          {"gamma", Kind::Scalar},
          {"shape", Kind::Word}}},
        {"superposition", {{"delta_omega", Kind::Rate}, {"r", Kind::Scalar}, {"rho", Kind::Scalar}, {"phi", Kind::Angle}}},
        {"grid", {{"half_span", Kind::Rate}, {"samples", Kind::Count}}},
        {"delays", {{"start", Kind::Time}, {"stop", Kind::Time}, {"count", Kind::Count}}},
        {"io", {{"input", Kind::Path}, {"jsa_format", Kind::Word}}},
        {"basis",
         {{"center", Kind::Carrier},
          {"scale", Kind::Rate},
          {"max_order", Kind::Count},
          {"optimize", Kind::Flag},
          {"compensate_s", Kind::Time},
          {"compensate_i", Kind::Time}}},
        {"witness", {{"epsilon", Kind::Word}}},
        {"simulate", {{"noise", Kind::Scalar}}},
        {"fit", {{"free", Kind::List}, {"restarts", Kind::Count}}},
    };
    for (const auto p : all_fit_params()) {
      out["fit.initial"][std::string(fit::name(p))] = fit_param_kind(p);
      out["fit.bounds"][std::string(fit::name(p))] = fit_param_kind(p);
    }
    return out;
  }();
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_number(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

class Parser {
 public:
  Parser(std::string_view text, std::filesystem::path base) : base_(std::move(base)) { lex(text); }

  ParsedConfig parse() {
    ParsedConfig out;
    auto& c = out.config;
    if (auto w = word("run", "command")) {
      c.command = parse_command(*w);
      if (!c.command)
        error(line_of("run", "command"), "run", "command",
              fmt::format("unknown command '{}' (simulate, decompose, witness, fit, discriminate)", *w));
    }
    model(c);
    grid(c);
    delays(c);
    io(c);
    basis(c);
    witness(c);
    if (has("simulate", "noise")) {
      if (auto v = quantity("simulate", "noise", Kind::Scalar)) {
        if (*v < 0.0) error(line_of("simulate", "noise"), "simulate", "noise", "must be non-negative");
        c.noise = std::max(*v, 0.0);
      }
    }
    fit_section(c);
    out.diagnostics = std::move(diags_);
    std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    return out;
  }

 private:
  void lex(std::string_view text) {
    YAML::Node root;
    try {
      root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
      error(static_cast<std::size_t>(e.mark.line) + 1, "", "", "YAML syntax: " + e.msg);
      return;
    }
    if (root.IsNull()) return;
    if (!root.IsMap()) {
      error(1, "", "", "top level must be a mapping of sections");
      return;
    }
    for (const auto& item : root) {
      const auto name = item.first.as<std::string>();
      const auto line = line_of(item.first);
      if (item.second.IsMap() || item.second.IsNull())
        section(name, item.second, line);
      else
        error(line, "", name, fmt::format("'{}' is not a section; values belong under a section", name));
    }
  }

  static std::size_t line_of(const YAML::Node& n) { return static_cast<std::size_t>(n.Mark().line) + 1; }

  void section(const std::string& name, const YAML::Node& node, std::size_t line) {
    const auto sec = schema().find(name);
    if (sec == schema().end()) {
      error(line, name, "", fmt::format("unknown section '{}'", name));
      return;
    }
    if (seen_sections_.contains(name)) error(line, name, "", fmt::format("section '{}' repeated", name));
    seen_sections_.insert(name);
    auto& slot = sections_[name];
    if (node.IsNull()) return;
    for (const auto& item : node) {
      const auto key = item.first.as<std::string>();
      const auto at = line_of(item.first);
      if (item.second.IsMap()) {
        section(name + "." + key, item.second, at);
        continue;
      }
      if (!sec->second.contains(key)) {
        error(at, name, key, fmt::format("unknown key '{}' in section '{}'", key, name));
        continue;
      }
      std::string value;
      if (item.second.IsScalar()) {
        value = trim(item.second.Scalar());
      } else if (item.second.IsSequence()) {
        for (const auto& v : item.second) {
          if (!v.IsScalar()) continue;
          value += (value.empty() ? "" : ", ") + v.Scalar();
        }
      }
      if (value.empty()) {
        error(at, name, key, "empty value");
        continue;
      }
      if (slot.contains(key)) {
        error(at, name, key, fmt::format("duplicate key (first set on line {})", slot[key].line));
        continue;
      }
      slot[key] = {value, at};
    }
  }

  void error(std::size_t line, const std::string& section, const std::string& key, std::string message) {
    diags_.push_back({Diagnostic::Severity::Error, line, section, key, std::move(message)});
  }
  void note(std::size_t line, const std::string& section, const std::string& key, std::string message) {
    diags_.push_back({Diagnostic::Severity::Note, line, section, key, std::move(message)});
  }

  bool has_section(const std::string& s) const { return sections_.contains(s); }
  bool has(const std::string& s, const std::string& k) const {
    const auto it = sections_.find(s);
    return it != sections_.end() && it->second.contains(k);
  }
  std::size_t line_of(const std::string& s, const std::string& k) const { return sections_.at(s).at(k).line; }
  const std::string& raw(const std::string& s, const std::string& k) const { return sections_.at(s).at(k).value; }

  std::optional<std::string> word(const std::string& s, const std::string& k) {
    if (!has(s, k)) return std::nullopt;
    return raw(s, k);
  }

  void missing(const std::string& s, const std::string& k) {
    error(0, s, k, fmt::format("missing required key '{}' in section '{}'", k, s));
  }

  std::optional<double> require(const std::string& s, const std::string& k, Kind kind) {
    if (!has(s, k)) {
      missing(s, k);
      return std::nullopt;
    }
    return quantity(s, k, kind);
  }

  std::optional<double> convert(const std::string& text, std::size_t line, const std::string& s, const std::string& k,
                                Kind kind) {
    const auto sp = text.find_first_of(" \t");
    const std::string number = text.substr(0, sp);
    const std::string tag = sp == std::string::npos ? "" : trim(std::string_view(text).substr(sp));
    const auto v = to_number(number);
    if (!v) {
      error(line, s, k, fmt::format("'{}' is not a number", number));
      return std::nullopt;
    }
    if (kind == Kind::Count) {
      if (!tag.empty()) error(line, s, k, "a sample count takes no unit");
      if (*v < 0.0 || std::floor(*v) != *v) {
        error(line, s, k, "must be a non-negative integer");
        return std::nullopt;
      }
      return v;
    }
    if (kind == Kind::Scalar) {
      if (!tag.empty() && tag != "1") {
        error(line, s, k, fmt::format("dimensionless value has unit '{}'", tag));
        return std::nullopt;
      }
      return v;
    }
    const auto defs = units_for(kind);
    if (tag.empty()) {
      error(line, s, k, fmt::format("missing unit tag (expected one of: {})", tags_of(kind)));
      return std::nullopt;
    }
    for (const auto& u : defs) {
      if (u.tag != tag) continue;
      if (kind == Kind::Carrier && tag == "nm") {
        if (!(*v > 0.0)) {
          error(line, s, k, "wavelength must be positive");
          return std::nullopt;
        }
        return units::wavelength_nm_to_rad_per_ps(*v);
      }
      if (tag == "THz")
        note(line, s, k,
             fmt::format("THz is read as ordinary frequency and multiplied by 2*pi: {} THz = {:.10g} rad/ps", *v,
                         *v * kTwoPi));
      return *v * u.factor;
    }
    error(line, s, k, fmt::format("unit '{}' not accepted here (expected one of: {})", tag, tags_of(kind)));
    return std::nullopt;
  }

  std::optional<double> quantity(const std::string& s, const std::string& k, Kind kind) {
    return convert(raw(s, k), line_of(s, k), s, k, kind);
  }

  void model(RunConfig& c) {
    const bool any = has_section("pump") || has_section("phasematch") || has_section("superposition");
    if (!any) return;
    bool ok = true;
    spectra::ProcessModel m;

    if (!has_section("pump")) error(0, "pump", "", "missing section 'pump'");
    const auto center = require("pump", "center", Kind::Carrier);
    ok &= center.has_value();
    if (center) m.pump.omega_c = AngularFrequency{*center};
    const bool sig = has("pump", "sigma");
    const bool fw = has("pump", "fwhm");
    if (sig && fw) {
      error(line_of("pump", "fwhm"), "pump", "fwhm", "give either sigma or fwhm, not both");
      ok = false;
    } else if (sig) {
      const auto v = quantity("pump", "sigma", Kind::Rate);
      ok &= v.has_value();
      if (v) m.pump.sigma = *v;
    } else if (fw) {
      const auto v = quantity("pump", "fwhm", Kind::Width);
      ok &= v.has_value();
      if (v && center) {
        // FWHM is a wavelength width of the pump at twice the photon frequency.
        const double pump_nm = units::wavelength_nm_to_rad_per_ps(2.0 * *center);
        m.pump.sigma = units::sigma_from_fwhm_nm(pump_nm, *v);
      }
    } else {
      error(0, "pump", "sigma", "missing pump bandwidth: give sigma (rad/ps, THz) or fwhm (nm)");
      ok = false;
    }

    if (!has_section("phasematch")) error(0, "phasematch", "", "missing section 'phasematch'");
    const auto length = require("phasematch", "length", Kind::Length);
    const auto dks = require("phasematch", "dk_s", Kind::InverseVelocity);
    const auto dki = require("phasematch", "dk_i", Kind::InverseVelocity);
    ok &= length && dks && dki;
    if (length) m.phasematch.length_mm = *length;
    if (dks) m.phasematch.dk_s = *dks;
    if (dki) m.phasematch.dk_i = *dki;
    if (has("phasematch", "gamma")) {
      const auto g = quantity("phasematch", "gamma", Kind::Scalar);
      ok &= g.has_value();
      if (g) m.phasematch.gamma = *g;
    }
    if (auto shape = word("phasematch", "shape")) {
      if (*shape == "sinc")
        m.phasematch.shape = spectra::PhasematchShape::Sinc;
      else if (*shape == "gaussian")
        m.phasematch.shape = spectra::PhasematchShape::GaussianApprox;
      else {
        error(line_of("phasematch", "shape"), "phasematch", "shape", "shape must be 'sinc' or 'gaussian'");
        ok = false;
      }
    }

    if (has_section("superposition")) {
      spectra::SuperpositionModel sp;
      const auto dw = require("superposition", "delta_omega", Kind::Rate);
      ok &= dw.has_value();
      if (dw) sp.delta_omega = *dw;
      const bool r = has("superposition", "r");
      const bool rho = has("superposition", "rho");
      if (r && rho) {
        error(line_of("superposition", "rho"), "superposition", "rho", "give either r or rho, not both");
        ok = false;
      } else if (r) {
        const auto v = quantity("superposition", "r", Kind::Scalar);
        ok &= v.has_value();
        if (v) sp.r = *v;
      } else if (rho) {
        const auto v = quantity("superposition", "rho", Kind::Scalar);
        ok &= v.has_value();
        if (v) {
          if (*v < 0.0 || *v > 1.0) {
            error(line_of("superposition", "rho"), "superposition", "rho", "rho must lie in [0, 1]");
            ok = false;
          } else {
            sp.r = spectra::r_from_rho(*v);
          }
        }
      } else {
        error(0, "superposition", "r", "missing weight: give r or rho");
        ok = false;
      }
      if (has("superposition", "phi")) {
        const auto v = quantity("superposition", "phi", Kind::Angle);
        ok &= v.has_value();
        if (v) sp.phi = *v;
      }
      m.superposition = sp;
    }

    if (!ok) return;
    try {
      m.validate();
    } catch (const Error& e) {
      error(0, "model", "", e.message());
      return;
    }
    c.model = m;
  }

  void grid(RunConfig& c) {
    if (has("grid", "half_span")) {
      if (auto v = quantity("grid", "half_span", Kind::Rate)) {
        if (*v > 0.0)
          c.grid.half_span = *v;
        else
          error(line_of("grid", "half_span"), "grid", "half_span", "must be positive");
      }
    }
    if (has("grid", "samples")) {
      if (auto v = quantity("grid", "samples", Kind::Count)) {
        if (*v >= 2)
          c.grid.samples = static_cast<std::size_t>(*v);
        else
          error(line_of("grid", "samples"), "grid", "samples", "need at least 2 samples");
      }
    }
  }

  void delays(RunConfig& c) {
    if (!has_section("delays")) return;
    const auto start = require("delays", "start", Kind::Time);
    const auto stop = require("delays", "stop", Kind::Time);
    const auto count = require("delays", "count", Kind::Count);
    if (!start || !stop || !count) return;
    if (*count < 1) {
      error(line_of("delays", "count"), "delays", "count", "need at least one delay");
      return;
    }
    if (*count > 1 && !(*stop > *start)) {
      error(line_of("delays", "stop"), "delays", "stop", "stop must exceed start");
      return;
    }
    c.delays = DelayRange{*start, *stop, static_cast<std::size_t>(*count)};
  }

  void io(RunConfig& c) {
    if (auto p = word("io", "input")) {
      std::filesystem::path path(*p);
      c.input = path.is_relative() && !base_.empty() ? base_ / path : path;
    }
    if (auto f = word("io", "jsa_format")) {
      if (*f == "csv")
        c.jsa_format = JsaFormat::Csv;
      else if (*f == "binary")
        c.jsa_format = JsaFormat::Binary;
      else if (*f == "both")
        c.jsa_format = JsaFormat::Both;
      else
        error(line_of("io", "jsa_format"), "io", "jsa_format", "jsa_format must be csv, binary or both");
    }
  }

  void basis(RunConfig& c) {
    if (!has_section("basis")) return;
    BasisConfig b;
    bool ok = true;
    if (has("basis", "center")) {
      b.center = quantity("basis", "center", Kind::Carrier);
      ok &= b.center.has_value();
    }
    const auto scale = require("basis", "scale", Kind::Rate);
    ok &= scale.has_value();
    if (scale) {
      if (*scale > 0.0)
        b.scale = *scale;
      else {
        error(line_of("basis", "scale"), "basis", "scale", "must be positive");
        ok = false;
      }
    }
    if (has("basis", "max_order")) {
      const auto v = quantity("basis", "max_order", Kind::Count);
      if (v && *v >= 1)
        b.max_order = static_cast<int>(*v);
      else {
        if (v) error(line_of("basis", "max_order"), "basis", "max_order", "must be at least 1");
        ok = false;
      }
    }
    if (auto f = word("basis", "optimize")) {
      if (*f == "true" || *f == "yes")
        b.optimize = true;
      else if (*f == "false" || *f == "no")
        b.optimize = false;
      else {
        error(line_of("basis", "optimize"), "basis", "optimize", "expected true or false");
        ok = false;
      }
    }
    for (const auto* key : {"compensate_s", "compensate_i"}) {
      if (!has("basis", key)) continue;
      const auto v = quantity("basis", key, Kind::Time);
      ok &= v.has_value();
      if (v) (std::string_view(key) == "compensate_s" ? b.compensate_s : b.compensate_i) = *v;
    }
    if (ok) c.basis = b;
  }

  void witness(RunConfig& c) {
    const auto w = word("witness", "epsilon");
    if (!w || *w == "auto") return;
    const auto v = convert(*w, line_of("witness", "epsilon"), "witness", "epsilon", Kind::Scalar);
    if (!v) return;
    if (*v < 0.0) {
      error(line_of("witness", "epsilon"), "witness", "epsilon", "guard band must be non-negative");
      return;
    }
    c.epsilon = *v;
  }

  void fit_section(RunConfig& c) {
    if (!has_section("fit") && !has_section("fit.initial") && !has_section("fit.bounds")) return;
    FitConfig f;
    bool ok = true;
    if (!has("fit", "free")) {
      missing("fit", "free");
      ok = false;
    } else {
      std::string_view list = raw("fit", "free");
      while (!list.empty()) {
        const auto comma = list.find(',');
        const std::string item = trim(list.substr(0, comma));
        list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
        if (item.empty()) continue;
        const auto p = fit::parse_fit_param(item);
        if (!p) {
          error(line_of("fit", "free"), "fit", "free", fmt::format("unknown fit parameter '{}'", item));
          ok = false;
        } else if (std::find(f.free.begin(), f.free.end(), *p) != f.free.end()) {
          error(line_of("fit", "free"), "fit", "free", fmt::format("'{}' listed twice", item));
          ok = false;
        } else {
          f.free.push_back(*p);
        }
      }
      if (ok && f.free.empty()) {
        error(line_of("fit", "free"), "fit", "free", "no free parameters listed");
        ok = false;
      }
      const bool rho = std::find(f.free.begin(), f.free.end(), fit::FitParam::Rho) != f.free.end();
      const bool r = std::find(f.free.begin(), f.free.end(), fit::FitParam::R) != f.free.end();
      if (rho && r) {
        error(line_of("fit", "free"), "fit", "free", "rho and r cannot both be free");
        ok = false;
      }
    }
    if (has("fit", "restarts")) {
      const auto v = quantity("fit", "restarts", Kind::Count);
      if (v && *v >= 1)
        f.restarts = static_cast<int>(*v);
      else {
        if (v) error(line_of("fit", "restarts"), "fit", "restarts", "must be at least 1");
        ok = false;
      }
    }
    for (const auto p : all_fit_params()) {
      const std::string key(fit::name(p));
      if (has("fit.initial", key)) {
        const auto v = quantity("fit.initial", key, fit_param_kind(p));
        ok &= v.has_value();
        if (v) f.initial[p] = *v;
      }
      if (has("fit.bounds", key)) {
        const std::string& text = raw("fit.bounds", key);
        const auto line = line_of("fit.bounds", key);
        const auto dots = text.find("..");
        if (dots == std::string::npos) {
          error(line, "fit.bounds", key, "expected 'lower .. upper unit'");
          ok = false;
          continue;
        }
        const std::string hi_text = trim(std::string_view(text).substr(dots + 2));
        const auto sp = hi_text.find_first_of(" \t");
        const std::string tag = sp == std::string::npos ? "" : hi_text.substr(sp);
        const auto lo = convert(trim(std::string_view(text).substr(0, dots)) + tag, line, "fit.bounds", key, fit_param_kind(p));
        const auto hi = convert(hi_text, line, "fit.bounds", key, fit_param_kind(p));
        if (!lo || !hi) {
          ok = false;
          continue;
        }
        if (!(*lo <= *hi)) {
          error(line, "fit.bounds", key, "lower bound exceeds upper bound");
          ok = false;
          continue;
        }
        f.bounds[p] = {*lo, *hi};
      }
    }
    if (ok) c.fit = f;
  }

  std::filesystem::path base_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::set<std::string> seen_sections_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Decompose: return "decompose";
    case Command::Witness: return "witness";
    case Command::Fit: return "fit";
    case Command::Discriminate: return "discriminate";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view text) {
  for (auto c : {Command::Simulate, Command::Decompose, Command::Witness, Command::Fit, Command::Discriminate})
    if (to_string(c) == text) return c;
  return std::nullopt;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid: return kConfigError;
    case ErrorKind::Io: return kIoError;
    default: return kNumericalError;
  }
}

std::string format_diagnostic(const Diagnostic& d, std::string_view source) {
  std::string where(source);
  if (d.line > 0) where += fmt::format(":{}", d.line);
  std::string field = d.section;
  if (!d.key.empty()) field += (field.empty() ? "" : ".") + d.key;
  return fmt::format("{}: {}: {}{}", where, d.severity == Diagnostic::Severity::Error ? "error" : "note",
                     field.empty() ? "" : field + ": ", d.message);
}

bool ParsedConfig::ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

ParsedConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  return Parser(text, base_dir).parse();
}

std::vector<Diagnostic> check_requirements(const RunConfig& c, Command command) {
  std::vector<Diagnostic> out;
  auto need = [&](bool present, const char* section, const std::string& why) {
    if (!present)
      out.push_back({Diagnostic::Severity::Error, 0, section, "",
                     fmt::format("{} needs {}", to_string(command), why)});
  };
  switch (command) {
    case Command::Simulate:
      need(c.model.has_value(), "pump", "a model (sections pump and phasematch)");
      need(c.delays.has_value(), "delays", "a delay range (section delays)");
      break;
    case Command::Decompose:
      need(c.model.has_value(), "pump", "a model (sections pump and phasematch)");
      need(c.basis.has_value(), "basis", "a basis (section basis)");
      break;
    case Command::Witness:
      need(c.input.has_value() || (c.model.has_value() && c.delays.has_value()), "io",
           "an input trace (io.input) or a model with a delays section");
      break;
    case Command::Discriminate:
      need(c.model.has_value(), "pump", "a model (sections pump and phasematch)");
      need(c.model && c.model->superposition.has_value(), "superposition", "a superposition section");
      need(c.delays.has_value(), "delays", "a delay range (section delays)");
      break;
    case Command::Fit: {
      need(c.input.has_value(), "io", "an input trace (io.input)");
      need(c.fit.has_value(), "fit", "a fit section");
      if (!c.model) {
        const bool has_r = c.fit && (c.fit->initial.contains(fit::FitParam::Rho) || c.fit->initial.contains(fit::FitParam::R));
        for (auto p : {fit::FitParam::DeltaOmega, fit::FitParam::Phi, fit::FitParam::TauMinus, fit::FitParam::TauPlus,
                       fit::FitParam::Sigma})
          need(c.fit && c.fit->initial.contains(p), "fit.initial",
               fmt::format("a start value for {} (no model given)", fit::name(p)));
        need(has_r, "fit.initial", "a start value for rho or r (no model given)");
      }
      break;
    }
  }
  return out;
}

fit::ModelParams fit_initial(const RunConfig& c) {
  fit::ModelParams p;
  if (c.model) p = fit::params_from_model(*c.model);
  if (c.fit)
    for (const auto& [param, value] : c.fit->initial) p.set(param, value);
  return p;
}

}  // namespace biphoton::cli
