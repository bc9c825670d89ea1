#pragma once

#include <cstddef>
#include <vector>

#include "biphoton/grid.hpp"
#include "biphoton/kernels.hpp"
#include "biphoton/units.hpp"

namespace biphoton::modes {

/// Hermite-Gauss broadband modes u_n((ω - center)/scale)/sqrt(scale).
struct HermiteBasis {
  AngularFrequency center;
  double scale = 1.0;  // rad/ps, width of u_0
  int max_order = 5;

  void validate() const;
};

inline constexpr int kDefaultMaxOrder = 5;

/// Normalised Hermite function u_n(omega) for the basis, evaluated by the
/// three-term recurrence on normalised functions. Throws OrderOutOfRange.
double hermite_function(const HermiteBasis& basis, int n, AngularFrequency omega);

/// u_0 .. u_{max_order} sampled on `axis`.
kernels::BasisTable hermite_table(const HermiteBasis& basis, const UniformAxis& axis);

/// Trapezoidal Gram matrix ∫ u_m u_n dω over `axis`, (max_order+1)^2 row-major.
std::vector<double> gram_matrix(const HermiteBasis& basis, const UniformAxis& axis);

struct ModeDecomposition {
  int max_order = 0;
  std::vector<Complex> coefficients;  // c[i * (max_order + 1) + j]
  double captured_weight = 0.0;
  std::vector<double> schmidt_values;  // descending

  Complex coefficient(int i, int j) const {
    return coefficients[static_cast<std::size_t>(i * (max_order + 1) + j)];
  }
};

/// c_ij = ∬ u_i(ωs) u_j(ωi) F(ωs, ωi). Throws BasisEscapesGrid when more than
/// 1e-4 of u_max_order's mass lies outside either axis.
ModeDecomposition project(const SpectralGrid& jsa, const HermiteBasis& basis);

/// Σ c_ij u_i(ωs) u_j(ωi) on the grid of `like`.
SpectralGrid reconstruct(const ModeDecomposition& decomposition, const HermiteBasis& basis, const SpectralGrid& like);

/// |<ψ-|F>|^2 = |(c_01 - c_10)/sqrt(2)|^2.
double singlet_overlap(const SpectralGrid& jsa, const HermiteBasis& basis);

/// Schmidt coefficients from the SVD of the quadrature-weighted amplitude
/// sqrt(w_j) F_jk sqrt(w_k). Coefficients are left empty.
ModeDecomposition schmidt_decompose(const SpectralGrid& jsa);

/// Golden-section search over the basis scale (center kept) maximising the
/// singlet overlap. Never returns a basis worse than `initial`.
HermiteBasis optimize_basis(const SpectralGrid& jsa, const HermiteBasis& initial);

/// F(ωs, ωi) · exp(i[(ωs - reference) t_s + (ωi - reference) t_i]).
/// Removes arrival-time offsets t_s, t_i (ps) of the two photons. This is a
/// local operation: Schmidt values and HOM traces (up to a shift of t_s - t_i)
/// are unchanged, but real-valued mode bases only see the state once its
/// linear spectral phase is gone.
SpectralGrid compensate_delays(const SpectralGrid& jsa, AngularFrequency reference, double t_s, double t_i);

/// u_m(ωs) u_n(ωi) on a square grid over `axis`, normalised.
SpectralGrid basis_product(const HermiteBasis& basis, int m, int n, const UniformAxis& axis);

/// (u_0(ωs)u_1(ωi) - u_1(ωs)u_0(ωi))/sqrt(2) on a square grid over `axis`.
SpectralGrid singlet_jsa(const HermiteBasis& basis, const UniformAxis& axis);

}  // namespace biphoton::modes
