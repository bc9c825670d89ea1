#pragma once

// Internal unit system: angular frequency in rad/ps, time in ps, length in mm,
// inverse group velocity differences in ps/mm. Ordinary-frequency inputs in THz
// are multiplied by 2*pi on ingestion.

#include <cmath>
#include <numbers>

namespace biphoton {

/// Speed of light in nm/ps.
inline constexpr double kSpeedOfLightNmPerPs = 299792.458;

/// Gaussian stand-in exponent for sinc(x) ~ exp(-gamma x^2).
inline constexpr double kGaussianSincGamma = 0.193;

struct AngularFrequency {
  double value = 0.0;  // rad/ps

  constexpr double operator()() const { return value; }
  friend constexpr bool operator==(AngularFrequency, AngularFrequency) = default;
};

struct Delay {
  double value = 0.0;  // ps

  constexpr double operator()() const { return value; }
  friend constexpr bool operator==(Delay, Delay) = default;
};

namespace units {

constexpr double thz_to_rad_per_ps(double thz) { return 2.0 * std::numbers::pi * thz; }

constexpr double rad_per_ps_to_thz(double w) { return w / (2.0 * std::numbers::pi); }

/// Angular frequency of light with vacuum wavelength `nm`.
constexpr double wavelength_nm_to_rad_per_ps(double nm) {
  return 2.0 * std::numbers::pi * kSpeedOfLightNmPerPs / nm;
}

/// Amplitude standard deviation (rad/ps) of a Gaussian spectrum with the given
/// wavelength FWHM around `center_nm`.
inline double sigma_from_fwhm_nm(double center_nm, double fwhm_nm) {
  const double fwhm_w = 2.0 * std::numbers::pi * kSpeedOfLightNmPerPs * fwhm_nm / (center_nm * center_nm);
  return fwhm_w / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

}  // namespace units
}  // namespace biphoton
