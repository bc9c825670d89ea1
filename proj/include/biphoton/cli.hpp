#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/fitting.hpp"
#include "biphoton/modes.hpp"
#include "biphoton/spectra.hpp"

namespace biphoton::cli {

enum class Command { Simulate, Decompose, Witness, Fit, Discriminate };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view text);

/// Process exit codes.
enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

int exit_code_for(ErrorKind kind);

struct Diagnostic {
  enum class Severity { Error, Note };
  Severity severity = Severity::Error;
  std::size_t line = 0;  // 0 when the problem is a missing entry
  std::string section;
  std::string key;
  std::string message;
};

std::string format_diagnostic(const Diagnostic& d, std::string_view source);

struct DelayRange {
  double start = 0.0;  // ps
  double stop = 0.0;   // ps
  std::size_t count = 0;
};

struct BasisConfig {
  std::optional<double> center;  // rad/ps; defaults to the pump's omega_c
  double scale = 0.0;            // rad/ps
  int max_order = modes::kDefaultMaxOrder;
  bool optimize = false;
  double compensate_s = 0.0;  // ps
  double compensate_i = 0.0;  // ps
};

struct FitConfig {
  std::vector<fit::FitParam> free;
  std::map<fit::FitParam, double> initial;
  std::map<fit::FitParam, fit::Bounds> bounds;
  int restarts = 8;
};

enum class JsaFormat { Csv, Binary, Both };

/// Parsed configuration. Every physical value is already converted to the
/// internal units.
struct RunConfig {
  std::optional<Command> command;
  std::optional<spectra::ProcessModel> model;
  spectra::GridSpec grid;
  std::optional<DelayRange> delays;
  std::optional<std::filesystem::path> input;
  JsaFormat jsa_format = JsaFormat::Both;
  std::optional<BasisConfig> basis;
  std::optional<double> epsilon;  // unset: default guard band
  std::optional<FitConfig> fit;
  double noise = 0.0;
};

struct ParsedConfig {
  RunConfig config;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

/// Parses YAML text: top-level sections (pump, phasematch, superposition,
/// grid, delays, io, basis, witness, simulate, fit with nested initial and
/// bounds, run) holding "key: value unit" entries. Collects every problem
/// instead of stopping at the first. Relative input paths are resolved
/// against `base_dir`.
ParsedConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Missing-section diagnostics for running `command` with `config`.
std::vector<Diagnostic> check_requirements(const RunConfig& config, Command command);

/// Start values for a fit: the model's parameters (when present) overridden
/// by fit.initial.
fit::ModelParams fit_initial(const RunConfig& config);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  bool verbose = false;
  std::string config_hash;
};

/// Executes one command, writing artifacts into options.out_dir and a short
/// report to `out`. Throws biphoton::Error.
void run(Command command, const RunConfig& config, const RunOptions& options, std::ostream& out);

/// Entry point shared by the executable and the tests.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace biphoton::cli
