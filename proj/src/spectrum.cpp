#include "cascsym/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cascsym/error.hpp"

namespace cascsym {

using detail::require;

double SpectrumCurve::h_max() const { return law.gamma + spectrum_width(law); }

namespace {

void check_law(const ScalingLaw& law, double d) {
  law.validate();
  require(std::isfinite(d) && d > 0.0, "dimension d must be positive");
  if (law.bigC <= 0.0) throw DomainError("C = 0: spectrum degenerates to a point");
}

double legendre_on_grid(const ScalingLaw& law, double d, double h, double p_max, int grid) {
  auto objective = [&](double p) { return p * h - zeta(law, p) + d; };
  // The grid depends only on (p_max, grid); reuse it across calls on this thread.
  thread_local std::map<std::pair<double, int>, std::vector<double>> cache;
  auto it = cache.find({p_max, grid});
  if (it == cache.end()) {
    if (cache.size() >= 16) cache.clear();
    std::vector<double> fresh;
    fresh.reserve(static_cast<std::size_t>(grid) + 1);
    fresh.push_back(0.0);
    const double l0 = std::log(1e-6);
    const double l1 = std::log(p_max);
    for (int i = 0; i < grid; ++i) fresh.push_back(std::exp(l0 + (l1 - l0) * i / (grid - 1)));
    it = cache.emplace(std::make_pair(p_max, grid), std::move(fresh)).first;
  }
  const std::vector<double>& ps = it->second;

  std::size_t best = 0;
  double best_val = objective(0.0);
  for (std::size_t i = 1; i < ps.size(); ++i) {
    const double v = objective(ps[i]);
    if (v < best_val) {  // smallest p wins ties
      best_val = v;
      best = i;
    }
  }
  // The objective is convex in p; refine inside the neighbouring cells.
  double a = ps[best == 0 ? 0 : best - 1];
  double b = ps[std::min(best + 1, ps.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double e = a + g * (b - a);
  double fc = objective(c);
  double fe = objective(e);
  for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, b); ++it) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = objective(e);
    }
  }
  return std::min({best_val, fc, fe});
}

}  // namespace

double f_closed(const ScalingLaw& law, double d, double h) {
  check_law(law, d);
  const double width = spectrum_width(law);
  const double slack = 1e-12 * std::max(1.0, std::abs(law.gamma) + width);
  if (!(h >= law.gamma - slack && h <= law.gamma + width + slack)) {
    std::ostringstream why;
    why << "h = " << h << " outside [" << law.gamma << ", " << law.gamma + width << "]";
    throw DomainError(why.str());
  }
  const double x = std::clamp((h - law.gamma) / width, 0.0, 1.0);
  if (x == 0.0) return d - law.bigC;
  return d - law.bigC + law.bigC * x * (1.0 - std::log(x));
}

double default_p_max(const ScalingLaw& law) {
  law.validate();
  return law.k * std::log(1e-9) / std::log(law.beta);
}

double f_legendre(const ScalingLaw& law, double d, double h, double p_max, int grid) {
  check_law(law, d);
  require(grid >= 2, "Legendre grid needs at least 2 nodes");
  require(std::isfinite(p_max) && p_max > 1e-6, "p_max must exceed the smallest grid order");
  require(std::pow(law.beta, p_max / law.k) < 1e-8, "p_max too small: beta^{p_max/k} must be below 1e-8");
  const double coarse = legendre_on_grid(law, d, h, p_max, grid);
  const double fine = legendre_on_grid(law, d, h, p_max, 2 * grid);
  if (std::abs(coarse - fine) > 1e-6) {
    std::ostringstream why;
    why << "Legendre grid too coarse: " << coarse << " vs " << fine << " on the doubled grid";
    throw NumericError(why.str());
  }
  return fine;
}

SpectrumCurve spectrum_curve(const ScalingLaw& law, double d, int n_points) {
  check_law(law, d);
  require(n_points >= 2, "spectrum curve needs at least 2 points");
  SpectrumCurve curve;
  curve.d = d;
  curve.law = law;
  const double width = spectrum_width(law);
  for (int i = 0; i < n_points; ++i) {
    const double h = i == n_points - 1 ? law.gamma + width : law.gamma + width * i / (n_points - 1);
    const double f = f_closed(law, d, h);
    curve.has_negative_f = curve.has_negative_f || f < 0.0;
    curve.points.push_back({h, f});
  }
  return curve;
}

}  // namespace cascsym
