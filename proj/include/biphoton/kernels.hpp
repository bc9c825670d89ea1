#pragma once

// Data-parallel inner loops. Every kernel has a plain serial version in
// `reference` and an OpenMP version in `parallel`; the library calls the
// parallel ones and the tests hold them to the reference. Parallel kernels
// only split work over independent outputs, so results are bitwise
// reproducible regardless of thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "biphoton/grid.hpp"

namespace biphoton::kernels {

/// Row-major table of real basis functions: values[n * samples + k] = u_n(axis[k]).
struct BasisTable {
  std::size_t orders = 0;
  std::size_t samples = 0;
  std::vector<double> values;

  double operator()(std::size_t n, std::size_t k) const { return values[n * samples + k]; }
};

namespace reference {

template <class Fn>
void fill(SpectralGrid& grid, Fn&& fn) {
  for (std::size_t is = 0; is < grid.rows(); ++is)
    for (std::size_t ii = 0; ii < grid.cols(); ++ii)
      grid(is, ii) = fn(grid.omega_s()[is], grid.omega_i()[ii]);
}

double norm_squared(const SpectralGrid& grid);

/// 1/2 - 1/2 Re ∬ F*(ωs,ωi) F(ωi,ωs) exp(-iτ(ωs-ωi)), evaluated as a direct
/// double sum with explicit phases. Requires identical axes.
double hom_direct(const SpectralGrid& grid, double tau);

std::vector<double> hom_sweep(const SpectralGrid& grid, std::span<const double> taus);

/// c[m * ui.orders + n] = ∬ u_m(ωs) u_n(ωi) F(ωs,ωi), direct quadruple loop.
std::vector<Complex> project(const SpectralGrid& grid, const BasisTable& us, const BasisTable& ui);

}  // namespace reference

namespace parallel {

template <class Fn>
void fill(SpectralGrid& grid, Fn&& fn) {
  const auto rows = static_cast<std::ptrdiff_t>(grid.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t is = 0; is < rows; ++is) {
    const double ws = grid.omega_s()[static_cast<std::size_t>(is)];
    for (std::size_t ii = 0; ii < grid.cols(); ++ii)
      grid(static_cast<std::size_t>(is), ii) = fn(ws, grid.omega_i()[ii]);
  }
}

double norm_squared(const SpectralGrid& grid);

/// Exchange-overlap density collapsed onto diagonals of constant ωs-ωi:
/// g[d + n - 1] = Σ_{j-k=d} w_j w_k F*(j,k) F(k,j). Requires identical axes.
std::vector<Complex> exchange_diagonals(const SpectralGrid& grid);

/// Σ_d g_d exp(-iτ d h) for diagonals produced by exchange_diagonals.
Complex exchange_overlap(std::span<const Complex> diagonals, double step, double tau);

std::vector<double> hom_sweep(const SpectralGrid& grid, std::span<const double> taus);

std::vector<Complex> project(const SpectralGrid& grid, const BasisTable& us, const BasisTable& ui);

}  // namespace parallel
}  // namespace biphoton::kernels
