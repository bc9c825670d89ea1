#include <cmath>
#include <complex>

#include "biphoton/errors.hpp"
#include "biphoton/kernels.hpp"

namespace biphoton::kernels::reference {

double norm_squared(const SpectralGrid& grid) {
  double acc = 0.0;
  for (std::size_t is = 0; is < grid.rows(); ++is)
    for (std::size_t ii = 0; ii < grid.cols(); ++ii)
      acc += grid.omega_s().weight(is) * grid.omega_i().weight(ii) * std::norm(grid(is, ii));
  return acc;
}

double hom_direct(const SpectralGrid& grid, double tau) {
  if (!grid.omega_s().same_as(grid.omega_i()))
    throw Error(ErrorKind::GridMismatch, "exchange overlap needs identical signal and idler axes");
  const auto& ax = grid.omega_s();
  Complex acc{0.0, 0.0};
  for (std::size_t j = 0; j < ax.size; ++j) {
    for (std::size_t k = 0; k < ax.size; ++k) {
      const double phase = -tau * (ax[j] - ax[k]);
      acc += ax.weight(j) * ax.weight(k) * std::conj(grid(j, k)) * grid(k, j) *
             Complex{std::cos(phase), std::sin(phase)};
    }
  }
  return 0.5 - 0.5 * acc.real();
}

std::vector<double> hom_sweep(const SpectralGrid& grid, std::span<const double> taus) {
  std::vector<double> out;
  out.reserve(taus.size());
  for (double tau : taus) out.push_back(hom_direct(grid, tau));
  return out;
}

std::vector<Complex> project(const SpectralGrid& grid, const BasisTable& us, const BasisTable& ui) {
  std::vector<Complex> c(us.orders * ui.orders);
  for (std::size_t m = 0; m < us.orders; ++m) {
    for (std::size_t n = 0; n < ui.orders; ++n) {
      Complex acc{0.0, 0.0};
      for (std::size_t is = 0; is < grid.rows(); ++is)
        for (std::size_t ii = 0; ii < grid.cols(); ++ii)
          acc += grid.omega_s().weight(is) * grid.omega_i().weight(ii) * us(m, is) * ui(n, ii) * grid(is, ii);
      c[m * ui.orders + n] = acc;
    }
  }
  return c;
}

}  // namespace biphoton::kernels::reference
