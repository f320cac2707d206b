#pragma once

#include <vector>

#include "cascsym/exponents.hpp"

namespace cascsym {

struct SpectrumPoint {
  double h = 0.0;
  double f = 0.0;
};

struct SpectrumCurve {
  double d = 1.0;
  ScalingLaw law;
  std::vector<SpectrumPoint> points;
  bool has_negative_f = false;  // emitted as-is, never clipped

  double h_min() const { return law.gamma; }
  double h_max() const;
};

/// f(h) = d - C + C x (1 - ln x), x = k (h - gamma) / (C |ln beta|), on
/// h in [gamma, gamma + (C/k)|ln beta|]. The x = 0 end takes its limit d - C.
double f_closed(const ScalingLaw& law, double d, double h);

/// Smallest p_max with beta^{p_max/k} below 1e-9.
double default_p_max(const ScalingLaw& law);

/// inf_{p >= 0} [p h - zeta_p + d] over {0} and a log-spaced grid on
/// [1e-6, p_max], refined by golden section inside the bracketing cell.
/// Cross-checked against a grid twice as dense; disagreement beyond 1e-6 throws.
double f_legendre(const ScalingLaw& law, double d, double h, double p_max, int grid = 10000);

SpectrumCurve spectrum_curve(const ScalingLaw& law, double d, int n_points);

}  // namespace cascsym
