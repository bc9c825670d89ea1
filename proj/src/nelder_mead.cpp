#include "biphoton/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace biphoton::fit {
namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

class Simplex {
 public:
  Simplex(const std::function<double(const std::vector<double>&)>& objective, const Box& box,
          std::vector<double> scale, NelderMeadResult& result, std::size_t max_evaluations)
      : objective_(objective), box_(box), scale_(std::move(scale)), result_(result), max_evaluations_(max_evaluations) {}

  double evaluate(std::vector<double>& x) {
    box_.project(x);
    ++result_.evaluations;
    const double f = objective_(x);
    return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
  }

  void build(const std::vector<double>& origin, double step) {
    const std::size_t n = origin.size();
    vertices_.clear();
    auto x0 = origin;
    const double f0 = evaluate(x0);
    vertices_.push_back({x0, f0});
    for (std::size_t i = 0; i < n; ++i) {
      auto x = x0;
      const double delta = step * scale_[i];
      x[i] = x0[i] + delta;
      if (x[i] > box_.upper[i]) x[i] = x0[i] - delta;
      const double f = evaluate(x);
      vertices_.push_back({x, f});
    }
  }

  // Runs until the simplex collapses; returns true on convergence.
  bool run(double f_tolerance, double x_tolerance) {
    const std::size_t n = vertices_.front().x.size();
    while (result_.evaluations < max_evaluations_) {
      std::stable_sort(vertices_.begin(), vertices_.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
      ++result_.iterations;
      result_.best_history.push_back(vertices_.front().f);

      const double spread = vertices_.back().f - vertices_.front().f;
      const double size = diameter();
      if (size <= x_tolerance || (spread <= f_tolerance * std::abs(vertices_.front().f) && size <= 1e-6)) return true;

      std::vector<double> centroid(n, 0.0);
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < n; ++i) centroid[i] += vertices_[v].x[i] / static_cast<double>(n);

      Vertex& worst = vertices_.back();
      auto along = [&](double t) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (worst.x[i] - centroid[i]);
        return x;
      };

      auto xr = along(-1.0);
      const double fr = evaluate(xr);
      if (fr < vertices_.front().f) {
        auto xe = along(-2.0);
        const double fe = evaluate(xe);
        worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        continue;
      }
      if (fr < vertices_[n - 1].f) {
        worst = {xr, fr};
        continue;
      }
      auto xc = fr < worst.f ? along(-0.5) : along(0.5);
      const double fc = evaluate(xc);
      if (fc < std::min(fr, worst.f)) {
        worst = {xc, fc};
        continue;
      }
      for (std::size_t v = 1; v <= n; ++v) {
        for (std::size_t i = 0; i < n; ++i)
          vertices_[v].x[i] = vertices_[0].x[i] + 0.5 * (vertices_[v].x[i] - vertices_[0].x[i]);
        vertices_[v].f = evaluate(vertices_[v].x);
      }
    }
    std::stable_sort(vertices_.begin(), vertices_.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    return false;
  }

  const Vertex& best() const { return vertices_.front(); }

 private:
  double diameter() const {
    double d = 0.0;
    for (std::size_t v = 1; v < vertices_.size(); ++v)
      for (std::size_t i = 0; i < scale_.size(); ++i)
        d = std::max(d, std::abs(vertices_[v].x[i] - vertices_[0].x[i]) / scale_[i]);
    return d;
  }

  const std::function<double(const std::vector<double>&)>& objective_;
  const Box& box_;
  std::vector<double> scale_;
  NelderMeadResult& result_;
  std::size_t max_evaluations_;
  std::vector<Vertex> vertices_;
};

}  // namespace

void Box::project(std::vector<double>& x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> start, const Box& box, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  std::vector<double> scale(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double width = box.upper[i] - box.lower[i];
    if (std::isfinite(width) && width > 0.0)
      scale[i] = width;
    else if (i < options.unbounded_scale.size())
      scale[i] = options.unbounded_scale[i];
    else
      scale[i] = std::max(std::abs(start[i]), 1.0);
  }

  NelderMeadResult result;
  Simplex simplex(objective, box, scale, result, options.max_evaluations);
  box.project(start);
  simplex.build(start, options.initial_step);
  bool converged = simplex.run(options.f_tolerance, options.x_tolerance);

  for (int k = 0; k < options.rebuilds && converged; ++k) {
    const double before = simplex.best().f;
    const auto origin = simplex.best().x;
    simplex.build(origin, options.initial_step * 0.1);
    converged = simplex.run(options.f_tolerance, options.x_tolerance);
    if (!(simplex.best().f < before - options.f_tolerance * std::abs(before))) break;
  }

  result.x = simplex.best().x;
  result.value = simplex.best().f;
  result.converged = converged;
  return result;
}

}  // namespace biphoton::fit
