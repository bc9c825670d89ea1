#include <omp.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "biphoton/errors.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton::kernels::parallel {

double norm_squared(const SpectralGrid& grid) {
  const auto rows = static_cast<std::ptrdiff_t>(grid.rows());
  std::vector<double> row_sum(grid.rows(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto is = static_cast<std::size_t>(r);
    double acc = 0.0;
    for (std::size_t ii = 0; ii < grid.cols(); ++ii) acc += grid.omega_i().weight(ii) * std::norm(grid(is, ii));
    row_sum[is] = grid.omega_s().weight(is) * acc;
  }
  double total = 0.0;
  for (double v : row_sum) total += v;
  return total;
}

std::vector<Complex> exchange_diagonals(const SpectralGrid& grid) {
  if (!grid.omega_s().same_as(grid.omega_i()))
    throw Error(ErrorKind::GridMismatch, "exchange overlap needs identical signal and idler axes");
  const auto& ax = grid.omega_s();
  const auto n = static_cast<std::ptrdiff_t>(ax.size);
  std::vector<Complex> g(static_cast<std::size_t>(2 * n - 1));
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t idx = 0; idx < 2 * n - 1; ++idx) {
    const std::ptrdiff_t d = idx - (n - 1);  // j - k
    const std::ptrdiff_t k_lo = std::max<std::ptrdiff_t>(0, -d);
    const std::ptrdiff_t k_hi = std::min<std::ptrdiff_t>(n - 1, n - 1 - d);
    Complex acc{0.0, 0.0};
    for (std::ptrdiff_t k = k_lo; k <= k_hi; ++k) {
      const auto j = static_cast<std::size_t>(k + d);
      const auto kk = static_cast<std::size_t>(k);
      acc += ax.weight(j) * ax.weight(kk) * std::conj(grid(j, kk)) * grid(kk, j);
    }
    g[static_cast<std::size_t>(idx)] = acc;
  }
  return g;
}

Complex exchange_overlap(std::span<const Complex> diagonals, double step, double tau) {
  const auto n = static_cast<std::ptrdiff_t>((diagonals.size() + 1) / 2);
  Complex acc{0.0, 0.0};
  for (std::size_t idx = 0; idx < diagonals.size(); ++idx) {
    const double d = static_cast<double>(static_cast<std::ptrdiff_t>(idx) - (n - 1));
    const double phase = -tau * d * step;
    acc += diagonals[idx] * Complex{std::cos(phase), std::sin(phase)};
  }
  return acc;
}

std::vector<double> hom_sweep(const SpectralGrid& grid, std::span<const double> taus) {
  const auto g = exchange_diagonals(grid);
  const double step = grid.omega_s().step;
  std::vector<double> out(taus.size());
  const auto count = static_cast<std::ptrdiff_t>(taus.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    const auto k = static_cast<std::size_t>(t);
    out[k] = 0.5 - 0.5 * exchange_overlap(g, step, taus[k]).real();
  }
  return out;
}

std::vector<Complex> project(const SpectralGrid& grid, const BasisTable& us, const BasisTable& ui) {
  const std::size_t rows = grid.rows();
  const std::size_t ni = ui.orders;
  // Inner integral over ωi for every signal sample.
  std::vector<Complex> partial(rows * ni);
  const auto rows_signed = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows_signed; ++r) {
    const auto is = static_cast<std::size_t>(r);
    for (std::size_t n = 0; n < ni; ++n) {
      Complex acc{0.0, 0.0};
      for (std::size_t ii = 0; ii < grid.cols(); ++ii)
        acc += grid.omega_i().weight(ii) * ui(n, ii) * grid(is, ii);
      partial[is * ni + n] = acc;
    }
  }
  std::vector<Complex> c(us.orders * ni);
  const auto pairs = static_cast<std::ptrdiff_t>(us.orders * ni);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < pairs; ++p) {
    const auto m = static_cast<std::size_t>(p) / ni;
    const auto n = static_cast<std::size_t>(p) % ni;
    Complex acc{0.0, 0.0};
    for (std::size_t is = 0; is < rows; ++is) acc += grid.omega_s().weight(is) * us(m, is) * partial[is * ni + n];
    c[static_cast<std::size_t>(p)] = acc;
  }
  return c;
}

}  // namespace biphoton::kernels::parallel
