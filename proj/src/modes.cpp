#include "biphoton/modes.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "biphoton/errors.hpp"

namespace biphoton::modes {
namespace {

constexpr double kEscapeTolerance = 1e-4;

// h_0 .. h_{max_order}(x) for the unit-scale normalised Hermite functions.
void hermite_values(double x, int max_order, double* out) {
  const double h0 = std::exp(-0.5 * x * x) / std::pow(std::numbers::pi, 0.25);
  out[0] = h0;
  if (max_order == 0) return;
  out[1] = std::numbers::sqrt2 * x * h0;
  for (int n = 1; n < max_order; ++n) {
    const double dn = n;
    out[n + 1] = x * std::sqrt(2.0 / (dn + 1.0)) * out[n] - std::sqrt(dn / (dn + 1.0)) * out[n - 1];
  }
}

// Mass of u_n^2 inside [lo, hi], integrated on a fine grid independent of the
// caller's sampling.
double mass_inside(const HermiteBasis& basis, int n, double lo, double hi) {
  const double width = hi - lo;
  const auto samples = static_cast<std::size_t>(std::max(4001.0, 40.0 * width / basis.scale));
  const auto axis = UniformAxis::centered(0.5 * (lo + hi), 0.5 * width, samples | 1u);
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < axis.size; ++k) {
    hermite_values((axis[k] - basis.center.value) / basis.scale, n, h.data());
    acc += axis.weight(k) * h[static_cast<std::size_t>(n)] * h[static_cast<std::size_t>(n)] / basis.scale;
  }
  return acc;
}

void check_basis_inside(const HermiteBasis& basis, const UniformAxis& axis, const char* which) {
  const double escaped = 1.0 - mass_inside(basis, basis.max_order, axis.start, axis.back());
  if (escaped > kEscapeTolerance)
    throw Error(ErrorKind::BasisEscapesGrid, std::string("u_") + std::to_string(basis.max_order) + " loses " +
                                                 std::to_string(escaped) + " of its mass outside the " + which +
                                                 " axis");
}

SpectralGrid sample_product_sum(const HermiteBasis& basis, const UniformAxis& axis,
                                 std::initializer_list<std::tuple<int, int, double>> terms) {
  const auto table = hermite_table(basis, axis);
  SpectralGrid grid(axis, axis);
  for (std::size_t is = 0; is < axis.size; ++is)
    for (std::size_t ii = 0; ii < axis.size; ++ii) {
      double v = 0.0;
      for (const auto& [m, n, w] : terms)
        v += w * table(static_cast<std::size_t>(m), is) * table(static_cast<std::size_t>(n), ii);
      grid(is, ii) = v;
    }
  grid.normalize();
  return grid;
}

}  // namespace

void HermiteBasis::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::InvalidModel, "basis scale must be positive");
  if (max_order < 1) throw Error(ErrorKind::OrderOutOfRange, "basis max_order must be >= 1");
  if (!std::isfinite(center.value)) throw Error(ErrorKind::InvalidModel, "basis center must be finite");
}

double hermite_function(const HermiteBasis& basis, int n, AngularFrequency omega) {
  basis.validate();
  if (n < 0 || n > basis.max_order)
    throw Error(ErrorKind::OrderOutOfRange,
                "order " + std::to_string(n) + " outside 0.." + std::to_string(basis.max_order));
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  hermite_values((omega.value - basis.center.value) / basis.scale, n, h.data());
  return h[static_cast<std::size_t>(n)] / std::sqrt(basis.scale);
}

kernels::BasisTable hermite_table(const HermiteBasis& basis, const UniformAxis& axis) {
  basis.validate();
  const auto orders = static_cast<std::size_t>(basis.max_order) + 1;
  kernels::BasisTable table{orders, axis.size, std::vector<double>(orders * axis.size)};
  std::vector<double> h(orders);
  const double norm = 1.0 / std::sqrt(basis.scale);
  for (std::size_t k = 0; k < axis.size; ++k) {
    hermite_values((axis[k] - basis.center.value) / basis.scale, basis.max_order, h.data());
    for (std::size_t n = 0; n < orders; ++n) table.values[n * axis.size + k] = h[n] * norm;
  }
  return table;
}

std::vector<double> gram_matrix(const HermiteBasis& basis, const UniformAxis& axis) {
  const auto table = hermite_table(basis, axis);
  const std::size_t orders = table.orders;
  std::vector<double> gram(orders * orders, 0.0);
  for (std::size_t m = 0; m < orders; ++m)
    for (std::size_t n = 0; n < orders; ++n) {
      double acc = 0.0;
      for (std::size_t k = 0; k < axis.size; ++k) acc += axis.weight(k) * table(m, k) * table(n, k);
      gram[m * orders + n] = acc;
    }
  return gram;
}

ModeDecomposition project(const SpectralGrid& jsa, const HermiteBasis& basis) {
  basis.validate();
  check_basis_inside(basis, jsa.omega_s(), "signal");
  check_basis_inside(basis, jsa.omega_i(), "idler");
  const auto us = hermite_table(basis, jsa.omega_s());
  const auto ui = hermite_table(basis, jsa.omega_i());

  ModeDecomposition out;
  out.max_order = basis.max_order;
  out.coefficients = kernels::parallel::project(jsa, us, ui);
  for (const auto& c : out.coefficients) out.captured_weight += std::norm(c);
  return out;
}

SpectralGrid reconstruct(const ModeDecomposition& decomposition, const HermiteBasis& basis, const SpectralGrid& like) {
  HermiteBasis b = basis;
  b.max_order = decomposition.max_order;
  const auto us = hermite_table(b, like.omega_s());
  const auto ui = hermite_table(b, like.omega_i());
  const auto orders = static_cast<std::size_t>(b.max_order) + 1;
  SpectralGrid out(like.omega_s(), like.omega_i());
  for (std::size_t is = 0; is < out.rows(); ++is)
    for (std::size_t ii = 0; ii < out.cols(); ++ii) {
      Complex acc{0.0, 0.0};
      for (std::size_t m = 0; m < orders; ++m)
        for (std::size_t n = 0; n < orders; ++n) acc += decomposition.coefficients[m * orders + n] * us(m, is) * ui(n, ii);
      out(is, ii) = acc;
    }
  return out;
}

double singlet_overlap(const SpectralGrid& jsa, const HermiteBasis& basis) {
  const auto d = project(jsa, basis);
  return std::norm((d.coefficient(0, 1) - d.coefficient(1, 0)) / std::numbers::sqrt2);
}

ModeDecomposition schmidt_decompose(const SpectralGrid& jsa) {
  const auto rows = static_cast<Eigen::Index>(jsa.rows());
  const auto cols = static_cast<Eigen::Index>(jsa.cols());
  Eigen::MatrixXcd weighted(rows, cols);
  for (Eigen::Index is = 0; is < rows; ++is) {
    const double ws = std::sqrt(jsa.omega_s().weight(static_cast<std::size_t>(is)));
    for (Eigen::Index ii = 0; ii < cols; ++ii) {
      const double wi = std::sqrt(jsa.omega_i().weight(static_cast<std::size_t>(ii)));
      weighted(is, ii) = ws * wi * jsa(static_cast<std::size_t>(is), static_cast<std::size_t>(ii));
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(weighted);
  const auto& sv = svd.singularValues();

  ModeDecomposition out;
  out.schmidt_values.assign(sv.data(), sv.data() + sv.size());
  std::sort(out.schmidt_values.begin(), out.schmidt_values.end(), std::greater<>());
  for (double s : out.schmidt_values) out.captured_weight += s * s;
  return out;
}

HermiteBasis optimize_basis(const SpectralGrid& jsa, const HermiteBasis& initial) {
  initial.validate();
  HermiteBasis probe = initial;
  probe.max_order = 1;
  auto overlap_at = [&](double scale) {
    probe.scale = scale;
    return singlet_overlap(jsa, probe);
  };
  auto fits = [&](double scale) {
    HermiteBasis b = initial;
    b.max_order = 1;
    b.scale = scale;
    try {
      check_basis_inside(b, jsa.omega_s(), "signal");
      check_basis_inside(b, jsa.omega_i(), "idler");
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  const double initial_overlap = overlap_at(initial.scale);

  const double step = std::max(jsa.omega_s().step, jsa.omega_i().step);
  double lo = std::max(initial.scale / 5.0, 2.0 * step);
  double hi = initial.scale * 5.0;
  while (hi > lo && !fits(hi)) hi *= 0.95;
  if (!(hi > lo)) return initial;

  // Coarse log-spaced scan to locate the basin, then golden-section refine.
  constexpr int kScan = 32;
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  const double dlog = (log_hi - log_lo) / (kScan - 1);
  int best = 0;
  double best_value = -1.0;
  for (int k = 0; k < kScan; ++k) {
    const double v = overlap_at(std::exp(log_lo + dlog * k));
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  double a = log_lo + dlog * std::max(best - 1, 0);
  double b = log_lo + dlog * std::min(best + 1, kScan - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = overlap_at(std::exp(c));
  double fd = overlap_at(std::exp(d));
  while (b - a > 1e-7) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = overlap_at(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = overlap_at(std::exp(d));
    }
  }
  const double refined_scale = std::exp(0.5 * (a + b));
  const double refined = overlap_at(refined_scale);

  HermiteBasis out = initial;
  if (refined > initial_overlap + 1e-12) out.scale = refined_scale;
  return out;
}

SpectralGrid compensate_delays(const SpectralGrid& jsa, AngularFrequency reference, double t_s, double t_i) {
  SpectralGrid out = jsa;
  const auto rows = static_cast<std::ptrdiff_t>(jsa.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    const auto is = static_cast<std::size_t>(r);
    for (std::size_t ii = 0; ii < jsa.cols(); ++ii) {
      const double phase = (jsa.omega_s()[is] - reference.value) * t_s + (jsa.omega_i()[ii] - reference.value) * t_i;
      out(is, ii) = jsa(is, ii) * Complex{std::cos(phase), std::sin(phase)};
    }
  }
  return out;
}

SpectralGrid basis_product(const HermiteBasis& basis, int m, int n, const UniformAxis& axis) {
  HermiteBasis b = basis;
  b.max_order = std::max({b.max_order, m, n});
  return sample_product_sum(b, axis, {{m, n, 1.0}});
}

SpectralGrid singlet_jsa(const HermiteBasis& basis, const UniformAxis& axis) {
  return sample_product_sum(basis, axis, {{0, 1, 1.0}, {1, 0, -1.0}});
}

}  // namespace biphoton::modes
