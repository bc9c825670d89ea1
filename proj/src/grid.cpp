#include "biphoton/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton {

std::vector<double> UniformAxis::values() const {
  std::vector<double> out(size);
  for (std::size_t k = 0; k < size; ++k) out[k] = (*this)[k];
  return out;
}

UniformAxis UniformAxis::centered(double center, double half_span, std::size_t size) {
  if (size < 2 || !(half_span > 0.0))
    throw Error(ErrorKind::GridMismatch, "axis needs >= 2 samples and a positive span");
  return UniformAxis{center - half_span, 2.0 * half_span / static_cast<double>(size - 1), size};
}

UniformAxis UniformAxis::from_samples(std::span<const double> samples) {
  if (samples.size() < 2) throw Error(ErrorKind::GridMismatch, "axis needs >= 2 samples");
  const std::size_t n = samples.size();
  const double step = (samples[n - 1] - samples[0]) / static_cast<double>(n - 1);
  if (!(step > 0.0) || !std::isfinite(step))
    throw Error(ErrorKind::GridMismatch, "axis must be strictly increasing");
  const double scale = std::max({std::abs(samples[0]), std::abs(samples[n - 1]), step});
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = samples[0] + static_cast<double>(k) * step;
    if (std::abs(samples[k] - expected) > 1e-9 * scale)
      throw Error(ErrorKind::GridMismatch, "axis spacing not uniform at sample " + std::to_string(k));
  }
  return UniformAxis{samples[0], step, n};
}

bool UniformAxis::same_as(const UniformAxis& other, double rel_tol) const {
  if (size != other.size) return false;
  const double scale = std::max({std::abs(start), std::abs(other.start), step});
  return std::abs(start - other.start) <= rel_tol * scale &&
         std::abs(step - other.step) <= rel_tol * std::max(step, other.step);
}

SpectralGrid::SpectralGrid(UniformAxis omega_s, UniformAxis omega_i)
    : omega_s_(omega_s), omega_i_(omega_i), amplitude_(omega_s.size * omega_i.size) {}

SpectralGrid::SpectralGrid(UniformAxis omega_s, UniformAxis omega_i, std::vector<Complex> amplitude)
    : omega_s_(omega_s), omega_i_(omega_i), amplitude_(std::move(amplitude)) {
  if (amplitude_.size() != omega_s_.size * omega_i_.size)
    throw Error(ErrorKind::GridMismatch, "amplitude size does not match axes");
}

double SpectralGrid::norm_squared() const { return kernels::parallel::norm_squared(*this); }

double SpectralGrid::norm() const { return std::sqrt(norm_squared()); }

void SpectralGrid::normalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::ZeroNorm, "joint spectral amplitude has zero norm");
  for (auto& a : amplitude_) a /= n;
}

SpectralGrid SpectralGrid::transposed() const {
  SpectralGrid t(omega_i_, omega_s_);
  for (std::size_t is = 0; is < rows(); ++is)
    for (std::size_t ii = 0; ii < cols(); ++ii) t(ii, is) = (*this)(is, ii);
  return t;
}

void SpectralGrid::check_finite() const {
  for (const auto& a : amplitude_)
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      throw Error(ErrorKind::NonFiniteData, "non-finite amplitude sample");
}

}  // namespace biphoton
