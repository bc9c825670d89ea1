#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace biphoton {

using Complex = std::complex<double>;

/// Uniformly spaced sample positions `start + k * step`, k = 0 .. size-1.
struct UniformAxis {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;

  double operator[](std::size_t k) const { return start + static_cast<double>(k) * step; }
  double back() const { return (*this)[size - 1]; }

  /// Composite trapezoidal weight of sample k, including the step.
  double weight(std::size_t k) const {
    return (k == 0 || k + 1 == size) ? 0.5 * step : step;
  }

  std::vector<double> values() const;

  /// Axis centered on `center` with `size` samples spanning +-half_span.
  static UniformAxis centered(double center, double half_span, std::size_t size);

  /// Rebuild an axis from explicit sample positions; throws GridMismatch when
  /// the spacing is not uniform to 1 part in 1e9.
  static UniformAxis from_samples(std::span<const double> samples);

  bool same_as(const UniformAxis& other, double rel_tol = 1e-12) const;
};

/// Sampled joint spectral amplitude, amplitude[i_s][i_i] stored row-major.
class SpectralGrid {
 public:
  SpectralGrid() = default;
  SpectralGrid(UniformAxis omega_s, UniformAxis omega_i);
  SpectralGrid(UniformAxis omega_s, UniformAxis omega_i, std::vector<Complex> amplitude);

  const UniformAxis& omega_s() const { return omega_s_; }
  const UniformAxis& omega_i() const { return omega_i_; }
  std::size_t rows() const { return omega_s_.size; }
  std::size_t cols() const { return omega_i_.size; }

  Complex& operator()(std::size_t is, std::size_t ii) { return amplitude_[is * cols() + ii]; }
  const Complex& operator()(std::size_t is, std::size_t ii) const { return amplitude_[is * cols() + ii]; }

  std::span<const Complex> data() const { return amplitude_; }
  std::span<Complex> data() { return amplitude_; }

  /// Trapezoidal integral of |F|^2.
  double norm_squared() const;
  double norm() const;

  /// Scale to unit L2 norm; throws ZeroNorm when the grid is identically zero.
  void normalize();

  /// F^T: amplitude(ω_i, ω_s) on swapped axes.
  SpectralGrid transposed() const;

  /// Throws NonFiniteData if any entry is NaN or infinite.
  void check_finite() const;

 private:
  UniformAxis omega_s_;
  UniformAxis omega_i_;
  std::vector<Complex> amplitude_;
};

}  // namespace biphoton
