#include "biphoton/io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton::io {
namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Io, fmt::format("line {}: cannot parse number '{}'", line, s));
  }
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> comments;
};

Table read_table(std::istream& is) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      const auto body = trim(std::string_view(s).substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.comments.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    if (t.columns.empty()) {
      t.columns = split(s, ',');
      continue;
    }
    const auto fields = split(s, ',');
    if (fields.size() != t.columns.size())
      throw Error(ErrorKind::Io, fmt::format("line {}: expected {} fields, got {}", lineno, t.columns.size(), fields.size()));
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_double(f, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.columns.empty()) throw Error(ErrorKind::Io, "missing CSV header row");
  return t;
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char bytes[8];
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  os.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorKind::Io, "truncated JSA1 stream");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes[k]) << (8 * k);
  return v;
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

Header standard_header(const std::string& config_hash) {
  return {{"tool", std::string("biphoton ") + kToolVersion}, {"config_hash", config_hash}, {"units", kUnitConvention}};
}

void write_header(std::ostream& os, const Header& header) {
  for (const auto& [k, v] : header) os << "# " << k << '=' << v << '\n';
}

void write_jsa_csv(std::ostream& os, const SpectralGrid& jsa, const Header& header) {
  write_header(os, header);
  os << "omega_s_rad_per_ps,omega_i_rad_per_ps,re,im\n";
  for (std::size_t is = 0; is < jsa.rows(); ++is)
    for (std::size_t ii = 0; ii < jsa.cols(); ++ii) {
      const auto a = jsa(is, ii);
      os << num(jsa.omega_s()[is]) << ',' << num(jsa.omega_i()[ii]) << ',' << num(a.real()) << ',' << num(a.imag())
         << '\n';
    }
}

SpectralGrid read_jsa_csv(std::istream& is) {
  const auto t = read_table(is);
  if (t.columns != std::vector<std::string>{"omega_s_rad_per_ps", "omega_i_rad_per_ps", "re", "im"})
    throw Error(ErrorKind::Io, "unexpected JSA CSV header");
  if (t.rows.empty()) throw Error(ErrorKind::Io, "JSA CSV has no samples");
  // Rows are ordered by signal then idler index.
  std::vector<double> ws;
  std::vector<double> wi;
  for (const auto& r : t.rows) {
    if (ws.empty() || r[0] != ws.back()) ws.push_back(r[0]);
    if (ws.size() == 1) wi.push_back(r[1]);
  }
  if (ws.size() * wi.size() != t.rows.size()) throw Error(ErrorKind::Io, "JSA CSV is not a full rectangular grid");
  std::vector<Complex> amp;
  amp.reserve(t.rows.size());
  for (const auto& r : t.rows) amp.emplace_back(r[2], r[3]);
  SpectralGrid g(UniformAxis::from_samples(ws), UniformAxis::from_samples(wi), std::move(amp));
  g.check_finite();
  return g;
}

void write_jsa_binary(std::ostream& os, const SpectralGrid& jsa) {
  os.write("JSA1", 4);
  put_u64(os, jsa.rows());
  put_u64(os, jsa.cols());
  for (std::size_t k = 0; k < jsa.rows(); ++k) put_f64(os, jsa.omega_s()[k]);
  for (std::size_t k = 0; k < jsa.cols(); ++k) put_f64(os, jsa.omega_i()[k]);
  for (const auto& a : jsa.data()) {
    put_f64(os, a.real());
    put_f64(os, a.imag());
  }
}

SpectralGrid read_jsa_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string_view(magic, 4) != "JSA1") throw Error(ErrorKind::Io, "missing JSA1 magic");
  const auto ns = get_u64(is);
  const auto ni = get_u64(is);
  if (ns < 2 || ni < 2 || ns > (1u << 20) || ni > (1u << 20)) throw Error(ErrorKind::Io, "implausible JSA1 dimensions");
  std::vector<double> ws(ns);
  std::vector<double> wi(ni);
  for (auto& w : ws) w = get_f64(is);
  for (auto& w : wi) w = get_f64(is);
  std::vector<Complex> amp(ns * ni);
  for (auto& a : amp) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    a = {re, im};
  }
  SpectralGrid g(UniformAxis::from_samples(ws), UniformAxis::from_samples(wi), std::move(amp));
  g.check_finite();
  return g;
}

void write_trace_csv(std::ostream& os, const hom::HomTrace& trace, const Header& header) {
  write_header(os, header);
  for (const auto& [k, v] : trace.meta) os << "# " << k << '=' << v << '\n';
  os << "tau_ps,p_coincidence" << (trace.standard_error ? ",stderr" : "") << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    os << num(trace.delays[k]) << ',' << num(trace.probabilities[k]);
    if (trace.standard_error) os << ',' << num((*trace.standard_error)[k]);
    os << '\n';
  }
}

hom::HomTrace read_trace_csv(std::istream& is) {
  const auto t = read_table(is);
  hom::HomTrace trace;
  if (t.columns.size() == 2 && t.columns[0] == "tau_ps" && t.columns[1] == "counts") {
    std::vector<double> delays;
    std::vector<double> counts;
    for (const auto& r : t.rows) {
      delays.push_back(r[0]);
      counts.push_back(r[1]);
    }
    trace = fit::normalize_counts(delays, counts);
  } else if (t.columns.size() >= 2 && t.columns[0] == "tau_ps" && t.columns[1] == "p_coincidence" &&
             (t.columns.size() == 2 || (t.columns.size() == 3 && t.columns[2] == "stderr"))) {
    if (t.columns.size() == 3) trace.standard_error.emplace();
    for (const auto& r : t.rows) {
      trace.delays.push_back(r[0]);
      trace.probabilities.push_back(r[1]);
      if (trace.standard_error) trace.standard_error->push_back(r[2]);
    }
  } else {
    throw Error(ErrorKind::Io, "trace CSV header must be tau_ps,p_coincidence[,stderr] or tau_ps,counts");
  }
  for (const auto& [k, v] : t.comments) trace.meta.emplace(k, v);
  trace.validate();
  return trace;
}

void write_modes_csv(std::ostream& os, const modes::ModeDecomposition& d, const std::vector<double>& schmidt_values,
                     const Header& header) {
  write_header(os, header);
  os << "i,j,re_c,im_c\n";
  const int orders = d.max_order + 1;
  for (int i = 0; i < orders; ++i)
    for (int j = 0; j < orders; ++j) {
      const auto c = d.coefficient(i, j);
      os << i << ',' << j << ',' << num(c.real()) << ',' << num(c.imag()) << '\n';
    }
  os << "# summary captured_weight=" << num(d.captured_weight) << " schmidt_values=";
  for (std::size_t k = 0; k < schmidt_values.size(); ++k) os << (k ? ";" : "") << num(schmidt_values[k]);
  os << '\n';
}

void write_fit_text(std::ostream& os, const fit::FitResult& result, const Header& header) {
  write_header(os, header);
  using fit::FitParam;
  const fit::ModelParams& p = result.params;
  for (auto param : {FitParam::DeltaOmega, FitParam::Rho, FitParam::Phi, FitParam::TauMinus, FitParam::TauPlus,
                     FitParam::Sigma, FitParam::Visibility, FitParam::Baseline, FitParam::TauOffset}) {
    os << fit::name(param) << " = " << num(p.get(param)) << ' ' << fit::unit(param);
    const auto it = result.param_stderr.find(param);
    if (it != result.param_stderr.end())
      os << " +- " << num(it->second);
    else if (param == FitParam::Rho && result.values.contains(FitParam::R))
      os << " (from r)";
    else
      os << " (fixed)";
    os << '\n';
  }
  if (result.values.contains(FitParam::R)) {
    os << "r = " << num(result.values.at(FitParam::R)) << " 1 +- " << num(result.param_stderr.at(FitParam::R))
       << '\n';
  }
  os << "residual_rms = " << num(result.residual_rms) << '\n';
  os << "iterations = " << result.iterations << '\n';
  os << "converged = " << (result.converged ? "true" : "false") << '\n';
}

std::string fit_json(const fit::FitResult& result, const Header& header) {
  nlohmann::ordered_json j;
  for (const auto& [k, v] : header) j["header"][k] = v;
  using fit::FitParam;
  for (auto param : {FitParam::DeltaOmega, FitParam::Rho, FitParam::Phi, FitParam::TauMinus, FitParam::TauPlus,
                     FitParam::Sigma, FitParam::Visibility, FitParam::Baseline, FitParam::TauOffset}) {
    auto& e = j["params"][std::string(fit::name(param))];
    e["value"] = result.params.get(param);
    e["unit"] = fit::unit(param);
    e["free"] = result.values.contains(param);
    const auto it = result.param_stderr.find(param);
    if (it != result.param_stderr.end() && std::isfinite(it->second)) e["stderr"] = it->second;
  }
  if (result.values.contains(FitParam::R)) {
    j["params"]["r"]["value"] = result.values.at(FitParam::R);
    j["params"]["r"]["free"] = true;
  }
  j["residual_rms"] = result.residual_rms;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  j["restart_objectives"] = result.restart_objectives;
  return j.dump(2) + "\n";
}

void write_overlay_csv(std::ostream& os, const hom::HomTrace& data, const hom::HomTrace& model, const Header& header) {
  write_header(os, header);
  os << "tau_ps,p_data,p_model\n";
  for (std::size_t k = 0; k < data.size(); ++k)
    os << num(data.delays[k]) << ',' << num(data.probabilities[k]) << ',' << num(model.probabilities[k]) << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace biphoton::io
