#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <ostream>

#include "biphoton/cli.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"

namespace biphoton::cli {
namespace {

struct Flags {
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool verbose = false;
};

void add_flags(CLI::App* sub, Flags& f, bool with_run_options) {
  sub->add_option("--config,-c", f.config, "Configuration file")->required();
  if (!with_run_options) return;
  sub->add_option("--out-dir,-o", f.out_dir, "Directory for output files")->capture_default_str();
  sub->add_option("--seed", f.seed, "Seed for restarts and synthetic noise")->capture_default_str();
  sub->add_flag("--verbose,-v", f.verbose, "Print configuration notes");
}

void print_diagnostics(std::ostream& os, const std::vector<Diagnostic>& diags, const std::string& source,
                       bool include_notes) {
  for (const auto& d : diags)
    if (include_notes || d.severity == Diagnostic::Severity::Error) os << format_diagnostic(d, source) << '\n';
}

std::size_t count(const std::vector<Diagnostic>& diags, Diagnostic::Severity s) {
  return static_cast<std::size_t>(
      std::count_if(diags.begin(), diags.end(), [s](const Diagnostic& d) { return d.severity == s; }));
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-photon spectral entanglement: simulation, mode analysis, HOM witness and fitting", "biphoton"};
  app.set_version_flag("--version", std::string("biphoton ") + io::kToolVersion);
  app.require_subcommand(1);

  Flags flags;
  std::optional<Command> chosen;
  bool validate_only = false;
  bool from_config = false;

  for (auto c : {Command::Simulate, Command::Decompose, Command::Witness, Command::Fit, Command::Discriminate}) {
    const char* help = "";
    switch (c) {
      case Command::Simulate: help = "Sample the JSA and write numeric and analytic HOM traces"; break;
      case Command::Decompose: help = "Hermite-Gauss mode coefficients and Schmidt values"; break;
      case Command::Witness: help = "Entanglement verdict from a trace (p > 1/2 + epsilon)"; break;
      case Command::Fit: help = "Fit the closed-form model to a measured trace"; break;
      case Command::Discriminate: help = "Compare a true-sinc process with its two-Gaussian stand-in"; break;
    }
    auto* sub = app.add_subcommand(std::string(to_string(c)), help);
    add_flags(sub, flags, true);
    sub->callback([&chosen, c] { chosen = c; });
  }
  auto* validate = app.add_subcommand("validate", "Check a configuration and print diagnostics");
  add_flags(validate, flags, false);
  validate->callback([&validate_only] { validate_only = true; });
  auto* runsub = app.add_subcommand("run", "Run the command named in run.command");
  add_flags(runsub, flags, true);
  runsub->callback([&from_config] { from_config = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  std::string text;
  try {
    text = io::read_file(flags.config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  const auto base = std::filesystem::path(flags.config).parent_path();
  auto parsed = parse_config(text, base);

  if (validate_only) {
    auto diags = parsed.diagnostics;
    if (parsed.ok() && parsed.config.command) {
      const auto more = check_requirements(parsed.config, *parsed.config.command);
      diags.insert(diags.end(), more.begin(), more.end());
    }
    print_diagnostics(out, diags, flags.config, true);
    const auto errors = count(diags, Diagnostic::Severity::Error);
    out << fmt::format("{}: {} error(s), {} note(s)\n", flags.config, errors, count(diags, Diagnostic::Severity::Note));
    return errors == 0 ? kOk : kConfigError;
  }

  print_diagnostics(err, parsed.diagnostics, flags.config, flags.verbose);
  if (!parsed.ok()) return kConfigError;

  if (from_config) {
    if (!parsed.config.command) {
      err << flags.config << ": error: run.command: missing; 'run' needs a command to execute\n";
      return kConfigError;
    }
    chosen = parsed.config.command;
  }
  const Command command = *chosen;

  const auto missing = check_requirements(parsed.config, command);
  if (!missing.empty()) {
    print_diagnostics(err, missing, flags.config, true);
    return kConfigError;
  }

  RunOptions options;
  options.out_dir = flags.out_dir;
  options.seed = flags.seed;
  options.verbose = flags.verbose;
  options.config_hash = io::fnv1a_hex(text);

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) {
    err << "error: Io: cannot create " << options.out_dir.string() << ": " << ec.message() << '\n';
    return kIoError;
  }

  try {
    run(command, parsed.config, options, out);
  } catch (const Error& e) {
    err << "error: " << to_string(command) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return kOk;
}

}  // namespace biphoton::cli
