#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "biphoton/fitting.hpp"
#include "biphoton/grid.hpp"
#include "biphoton/hom.hpp"
#include "biphoton/modes.hpp"

namespace biphoton::io {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr const char* kUnitConvention =
    "angular frequency rad/ps; delay ps; length mm; THz inputs are ordinary frequency, multiplied by 2*pi";

/// Comment lines written as "# key=value" at the top of every output file.
using Header = std::vector<std::pair<std::string, std::string>>;

/// Standard header: tool version, config hash, unit convention.
Header standard_header(const std::string& config_hash);

void write_header(std::ostream& os, const Header& header);

/// CSV: header row omega_s_rad_per_ps,omega_i_rad_per_ps,re,im; one row per sample.
void write_jsa_csv(std::ostream& os, const SpectralGrid& jsa, const Header& header = {});
SpectralGrid read_jsa_csv(std::istream& is);

/// Binary: "JSA1", uint64 n_s, uint64 n_i, n_s + n_i axis samples, then
/// n_s*n_i (re, im) pairs row-major; all little-endian, float64 values.
void write_jsa_binary(std::ostream& os, const SpectralGrid& jsa);
SpectralGrid read_jsa_binary(std::istream& is);

/// CSV: "# key=value" meta lines, header tau_ps,p_coincidence[,stderr].
void write_trace_csv(std::ostream& os, const hom::HomTrace& trace, const Header& header = {});

/// Accepts probability traces (tau_ps,p_coincidence[,stderr]) and raw counts
/// (tau_ps,counts), the latter normalised with fit::normalize_counts.
hom::HomTrace read_trace_csv(std::istream& is);

/// CSV: i,j,re_c,im_c rows followed by a "# summary" comment line.
void write_modes_csv(std::ostream& os, const modes::ModeDecomposition& coefficients,
                     const std::vector<double>& schmidt_values, const Header& header = {});

/// key = value unit ± stderr lines.
void write_fit_text(std::ostream& os, const fit::FitResult& result, const Header& header = {});
std::string fit_json(const fit::FitResult& result, const Header& header = {});

/// CSV tau_ps,p_data,p_model.
void write_overlay_csv(std::ostream& os, const hom::HomTrace& data, const hom::HomTrace& model, const Header& header = {});

/// Helpers for files; throw Error(Io) on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// 64-bit FNV-1a digest, hex encoded.
std::string fnv1a_hex(std::string_view text);

}  // namespace biphoton::io
