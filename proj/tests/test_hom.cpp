#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "biphoton/errors.hpp"
#include "biphoton/hom.hpp"
#include "biphoton/modes.hpp"
#include "biphoton/spectra.hpp"
#include "oracles.hpp"

using namespace biphoton;
using namespace biphoton::hom;

namespace {

constexpr double kCenter = oracle::kOmegaC808;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

SpectralAmplitude gaussian(const UniformAxis& axis, double center, double width, double phase_slope = 0.0) {
  SpectralAmplitude f{axis, {}};
  for (std::size_t k = 0; k < axis.size; ++k) {
    const double d = axis[k] - center;
    f.values.push_back(std::exp(-d * d / (2.0 * width * width)) * std::exp(Complex{0.0, phase_slope * d}));
  }
  return f;
}

SpectralGrid transposed_real_symmetric(std::size_t n) {
  const auto axis = UniformAxis::centered(kCenter, 12.0, n);
  SpectralGrid g(axis, axis);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double a = axis[j] - kCenter;
      const double b = axis[k] - kCenter;
      g(j, k) = std::exp(-(a + b) * (a + b) / 8.0 - (a - b) * (a - b) / 2.0);
    }
  g.normalize();
  return g;
}

}  // namespace

TEST_CASE("hom_numeric") {
  SUBCASE("real exchange-symmetric amplitude dips to zero") {
    CHECK(std::abs(hom_numeric(transposed_real_symmetric(201), Delay{0.0})) < 1e-12);
  }

  SUBCASE("singlet anti-bunches") {
    const modes::HermiteBasis basis{AngularFrequency{kCenter}, 1.5, 1};
    const auto singlet = modes::singlet_jsa(basis, UniformAxis::centered(kCenter, 20.0, 301));
    CHECK(hom_numeric(singlet, Delay{0.0}) == doctest::Approx(1.0).epsilon(1e-6));
    for (double tau : {-0.2, -0.05, 0.05, 0.2}) CHECK(hom_numeric(singlet, Delay{tau}) > 0.5);
  }

  SUBCASE("large delays go to one half") {
    const auto jsa = spectra::build_jsa(oracle::waveguide_model(spectra::SuperpositionModel{3.0, 0.6, 1.0}),
                                        spectra::GridSpec{.max_delay = 40.0});
    for (double tau : {-40.0, -30.0, 30.0, 40.0}) CHECK(std::abs(hom_numeric(jsa, Delay{tau}) - 0.5) < 1e-3);
  }

  SUBCASE("agrees with the plain double sum") {
    oracle::Gen gen(31);
    for (int k = 0; k < 4; ++k) {
      const auto m = oracle::round_lobe(gen.uniform(0.0, 3.0), gen.uniform(0.0, 1.0), gen.uniform(0.0, 6.28));
      const auto g = oracle::sample(m, 18.0, 121);
      for (double tau : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
        CAPTURE(tau);
        CHECK(hom_numeric(g, Delay{tau}) == doctest::Approx(oracle::hom_double_sum(g, tau)).epsilon(1e-11));
      }
    }
  }

  SUBCASE("transpose with reversed delay; range [0, 1]") {
    oracle::Gen gen(32);
    for (int k = 0; k < 5; ++k) {
      const auto m = oracle::waveguide_model(
          spectra::SuperpositionModel{gen.uniform(0.0, 3.0), gen.uniform(0.0, 1.0), gen.uniform(0.0, 6.28)});
      const auto jsa = spectra::build_jsa(m);
      const auto t = jsa.transposed();
      for (int j = 0; j < 6; ++j) {
        const double tau = gen.uniform(-6.0, 6.0);
        const double p = hom_numeric(jsa, Delay{tau});
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(std::abs(p - hom_numeric(t, Delay{-tau})) < 1e-9);
      }
    }
  }

  SUBCASE("delay beyond the grid resolution") {
    const auto g = transposed_real_symmetric(101);
    const double limit = std::numbers::pi / g.omega_s().step;
    CHECK_NOTHROW(hom_numeric(g, Delay{0.99 * limit}));
    CHECK(kind_of([&] { hom_numeric(g, Delay{1.01 * limit}); }) == ErrorKind::DelayTooLargeForGrid);
    CHECK(kind_of([&] { hom_numeric(g, Delay{-1.01 * limit}); }) == ErrorKind::DelayTooLargeForGrid);
  }
}

TEST_CASE("hom_separable") {
  const auto axis = UniformAxis::centered(kCenter, 40.0, 2001);

  SUBCASE("identical Gaussians dip to zero") {
    const auto f = gaussian(axis, kCenter, 2.0);
    CHECK(std::abs(hom_separable(f, f, Delay{0.0})) < 1e-12);
  }

  SUBCASE("orthogonal modes never interfere") {
    const modes::HermiteBasis basis{AngularFrequency{kCenter}, 2.0, 1};
    SpectralAmplitude u0{axis, {}}, u1{axis, {}};
    for (std::size_t k = 0; k < axis.size; ++k) {
      u0.values.emplace_back(modes::hermite_function(basis, 0, AngularFrequency{axis[k]}));
      u1.values.emplace_back(modes::hermite_function(basis, 1, AngularFrequency{axis[k]}));
    }
    CHECK(std::abs(hom_separable(u0, u1, Delay{0.0}) - 0.5) < 1e-12);
    // Away from zero delay the odd product u_0 u_1 has a non-zero Fourier
    // transform: p = 1/2 - (tau s)^2 exp(-(tau s)^2 / 2) / 4.
    for (double tau : {-3.0, -1.0, 0.3, 1.0, 3.0}) {
      const double x = tau * basis.scale;
      CHECK(hom_separable(u0, u1, Delay{tau}) == doctest::Approx(0.5 - 0.25 * x * x * std::exp(-0.5 * x * x)).epsilon(1e-9));
    }
  }

  SUBCASE("Gaussian dip shape") {
    for (double w : {0.7, 2.0, 5.0}) {
      const auto f = gaussian(axis, kCenter, w);
      for (double tau : {0.0, 0.5 / w, 1.0 / w, 2.0 / w}) {
        CAPTURE(w);
        CAPTURE(tau);
        CHECK(hom_separable(f, f, Delay{tau}) == doctest::Approx(oracle::gaussian_dip(w, tau)).epsilon(1e-9).scale(1e-9));
      }
    }
  }

  SUBCASE("never above one half") {
    oracle::Gen gen(33);
    for (int k = 0; k < 300; ++k) {
      const auto f1 = gaussian(axis, kCenter + gen.uniform(-5, 5), gen.uniform(0.5, 5), gen.uniform(-2, 2));
      const auto f2 = gaussian(axis, kCenter + gen.uniform(-5, 5), gen.uniform(0.5, 5), gen.uniform(-2, 2));
      const double p = hom_separable(f1, f2, Delay{gen.uniform(-5, 5)});
      CHECK(p <= 0.5 + 1e-9);
      CHECK(p >= 0.0);
    }
  }

  SUBCASE("errors") {
    SpectralAmplitude zero{axis, std::vector<Complex>(axis.size)};
    const auto f = gaussian(axis, kCenter, 2.0);
    CHECK(kind_of([&] { hom_separable(zero, f, Delay{0.0}); }) == ErrorKind::ZeroNorm);
    const auto other = gaussian(UniformAxis::centered(kCenter, 30.0, 2001), kCenter, 2.0);
    CHECK(kind_of([&] { hom_separable(other, f, Delay{0.0}); }) == ErrorKind::GridMismatch);
  }
}

TEST_CASE("hom_analytic") {
  SUBCASE("single process at its dip centre") {
    const auto m = oracle::waveguide_model();
    const auto cf = closed_form_params(m);
    const double expect = 0.5 - 1.0 / (2.0 * std::sqrt(1.0 + 0.5 * 0.193 * m.pump.sigma * m.pump.sigma * 3.6 * 3.6));
    CHECK(cf.c_plus() == doctest::Approx(1.0 + 0.5 * 0.193 * m.pump.sigma * m.pump.sigma * 12.96));
    CHECK(hom_analytic(m, Delay{1.8}) == doctest::Approx(expect).epsilon(1e-14));
    for (double tau : {-5.0, 0.0, 1.0, 2.5, 7.0}) CHECK(hom_analytic(m, Delay{tau}) >= expect);
  }

  SUBCASE("beating has period 2pi/delta_omega") {
    ClosedFormParams p;
    p.tau_minus = 1.8;
    p.tau_plus = 3.6;
    p.sigma = oracle::kSigma404Fwhm14;
    p.delta_omega = oracle::kDeltaOmega135THz;
    p.rho = 1.0;
    p.phi = 0.0;
    const double period = 2.0 * std::numbers::pi / p.delta_omega;
    oracle::Gen gen(34);
    for (int k = 0; k < 100; ++k) {
      const double tau = gen.uniform(0.0, 3.0);
      // (p - 1/2) / envelope is periodic; sampled where the envelope is not tiny.
      auto ratio = [&](double t) {
        const double env = std::exp(-(t - p.tau_minus) * (t - p.tau_minus) / (2.0 * p.gamma * p.tau_minus * p.tau_minus));
        return (hom_closed_form(p, t) - 0.5) / env;
      };
      CHECK(ratio(tau) == doctest::Approx(ratio(tau + period)).epsilon(1e-9));
    }
  }

  SUBCASE("matches the numeric route on the waveguide model with the phase sign flipped") {
    // The closed form as written corresponds to weight r e^{-i phi}; see README.
    const auto m = oracle::waveguide_model(spectra::SuperpositionModel{oracle::kDeltaOmega135THz, 0.8, 2.2});
    auto flipped = m;
    flipped.superposition->phi = -m.superposition->phi;
    const auto jsa = spectra::build_jsa(flipped);
    const auto delays = linspace(-3.0 * 1.8 + 1.8, 3.0 * 1.8 + 1.8, 200);
    const auto numeric = sweep_numeric(jsa, delays);
    const auto analytic = sweep_analytic(m, delays);
    double worst = 0.0;
    for (std::size_t k = 0; k < delays.size(); ++k)
      worst = std::max(worst, std::abs(numeric.probabilities[k] - analytic.probabilities[k]));
    CHECK(worst < 1e-3);
  }

  SUBCASE("errors") {
    auto m = oracle::waveguide_model();
    m.phasematch.dk_i = m.phasematch.dk_s;
    CHECK(kind_of([&] { hom_analytic(m, Delay{0.0}); }) == ErrorKind::DegenerateGroupDelay);
    m = oracle::waveguide_model();
    m.phasematch.shape = spectra::PhasematchShape::Sinc;
    CHECK(kind_of([&] { hom_analytic(m, Delay{0.0}); }) == ErrorKind::InvalidModel);
  }
}

TEST_CASE("sweeps") {
  const auto m = oracle::waveguide_model(spectra::SuperpositionModel{oracle::kDeltaOmega135THz, 1.0, 0.0});
  const auto jsa = spectra::build_jsa(m);

  SUBCASE("empty and single delay") {
    CHECK(sweep_numeric(jsa, {}).empty());
    CHECK(sweep_analytic(m, {}).empty());
    const std::vector<double> one{0.4};
    CHECK(sweep_numeric(jsa, one).probabilities[0] == doctest::Approx(hom_numeric(jsa, Delay{0.4})).epsilon(1e-13));
    CHECK(sweep_analytic(m, one).probabilities[0] == hom_analytic(m, Delay{0.4}));
  }

  SUBCASE("meta records engine and parameters") {
    const std::vector<double> d{0.0, 1.0};
    const auto a = sweep_analytic(m, d);
    CHECK(a.meta.at("engine") == "analytic");
    CHECK(a.meta.count("delta_omega_rad_per_ps") == 1);
    CHECK(sweep_numeric(jsa, d).meta.at("engine") == "numeric");
  }

  SUBCASE("waveguide central bump over +-10 ps") {
    const auto trace = sweep_numeric(jsa, linspace(-10.0, 10.0, 200));
    CHECK(*std::max_element(trace.probabilities.begin(), trace.probabilities.end()) > 0.5);
    CHECK(witness(trace, kNoiselessGuardBand) == Verdict::Entangled);
  }

  SUBCASE("errors carry the index") {
    const std::vector<double> bad{0.0, 2.0, 1.0};
    CHECK(kind_of([&] { sweep_numeric(jsa, bad); }) == ErrorKind::InvalidArgument);
    auto degenerate = m;
    degenerate.phasematch.dk_i = degenerate.phasematch.dk_s;
    try {
      const std::vector<double> d{0.0};
      sweep_analytic(degenerate, d);
      FAIL("expected an Error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateGroupDelay);
      CHECK(std::string(e.what()).find("index 0") != std::string::npos);
    }
    const std::vector<double> far{0.0, 1e4};
    CHECK(kind_of([&] { sweep_numeric(jsa, far); }) == ErrorKind::DelayTooLargeForGrid);
  }

  SUBCASE("linspace") {
    const auto v = linspace(-1.0, 1.0, 5);
    CHECK(v == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
    CHECK(linspace(2.0, 3.0, 1) == std::vector<double>{2.0});
    CHECK(linspace(2.0, 3.0, 0).empty());
  }
}

TEST_CASE("witness") {
  HomTrace t;
  t.delays = {0.0, 1.0, 2.0};
  t.probabilities = {0.4, 0.7, 0.5};
  CHECK(witness(t, 0.02) == Verdict::Entangled);
  CHECK(witness(t, 0.25) == Verdict::Inconclusive);
  t.probabilities = {0.5, 0.5, 0.5};
  CHECK(witness(t, 1e-6) == Verdict::Inconclusive);
  CHECK(witness(t, 0.0) == Verdict::Inconclusive);
  CHECK(kind_of([] { witness(HomTrace{}, 0.0); }) == ErrorKind::EmptyTrace);
  CHECK(kind_of([&] { witness(t, -1.0); }) == ErrorKind::InvalidArgument);

  SUBCASE("guard band") {
    CHECK(default_guard_band(t) == kNoiselessGuardBand);
    t.probabilities = {0.4, 0.52, 0.5};
    t.standard_error = std::vector<double>{0.01, 0.01, 0.01};
    CHECK(default_guard_band(t) == doctest::Approx(0.03));
    CHECK(witness(t, default_guard_band(t)) == Verdict::Inconclusive);
  }

  SUBCASE("random separable states stay inconclusive") {
    const auto axis = UniformAxis::centered(kCenter, 40.0, 801);
    oracle::Gen gen(35);
    for (int k = 0; k < 100; ++k) {
      const auto f1 = gaussian(axis, kCenter + gen.uniform(-4, 4), gen.uniform(0.8, 5));
      const auto f2 = gaussian(axis, kCenter + gen.uniform(-4, 4), gen.uniform(0.8, 5));
      HomTrace trace;
      trace.delays = linspace(-5.0, 5.0, 41);
      for (double tau : trace.delays) trace.probabilities.push_back(hom_separable(f1, f2, Delay{tau}));
      CHECK(witness(trace, kNoiselessGuardBand) == Verdict::Inconclusive);
    }
  }
}

TEST_CASE("HomTrace validation") {
  HomTrace t;
  t.delays = {0.0, 1.0};
  t.probabilities = {0.5};
  CHECK(kind_of([&] { t.validate(); }) == ErrorKind::InvalidArgument);
  t.probabilities = {0.5, std::nan("")};
  CHECK(kind_of([&] { t.validate(); }) == ErrorKind::NonFiniteData);
  t.probabilities = {0.5, 0.5};
  t.delays = {1.0, 1.0};
  CHECK(kind_of([&] { t.validate(); }) == ErrorKind::InvalidArgument);
}
