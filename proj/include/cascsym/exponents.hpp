#pragma once

// Scaling-exponent algebra of hierarchically symmetric cascades.
//
// A scaling law is the triple (gamma, C, beta) at hierarchy step k. It generates
//   zeta_p  = gamma p + C (1 - beta^{p/k})
//   delta_p = zeta_{p+k} - zeta_p = delta_inf + (delta_0 - delta_inf) beta^{p/k}
// with delta_inf = gamma k and delta_0 = gamma k + C (1 - beta).

#include <optional>
#include <vector>

namespace cascsym {

struct CascadeParams {
  double r = 0.5;  // scale ratio, (0,1)
  int k = 1;       // hierarchy step
  double d = 1.0;  // dimension of the support

  void validate() const;
};

struct ScalingLaw {
  double gamma = 0.0;
  double bigC = 0.0;
  double beta = 0.5;
  int k = 1;

  void validate() const;

  double delta_inf() const { return gamma * k; }
  double delta0() const { return gamma * k + bigC * (1.0 - beta); }
  /// A = (delta_0 - delta_inf) ln r; negative whenever C > 0.
  double amplitude(double r) const;

  friend bool operator==(const ScalingLaw&, const ScalingLaw&) = default;
};

/// Incremental exponents delta_{mk} for m = 0, 1, ... with optional standard errors.
struct DeltaSeries {
  struct Entry {
    int m = 0;
    double delta = 0.0;
  };

  int k = 1;
  std::vector<Entry> entries;
  std::optional<std::vector<double>> stderr_;

  void validate() const;
  std::size_t size() const { return entries.size(); }
  std::vector<double> values() const;

  static DeltaSeries from_values(int k, const std::vector<double>& deltas);
};

double zeta(const ScalingLaw& law, double p);
double delta(const ScalingLaw& law, double p);

/// One application of the contraction delta_p -> (1-beta) delta_inf + beta delta_p.
double a1_step(double delta_p, double beta, double delta_inf);

ScalingLaw law_from_deltas(double delta0, double delta_inf, double beta, int k);

/// Drift fixed by a conservation law zeta_{k0} = z0. With (z0, k0) = (0, 1) this
/// is the mean-one normalization E[W] = 1.
double conservation_gamma(double bigC, double beta, int k, double z0, double k0);

/// Width h_max - h_min = (C/k)|ln beta| of the singularity spectrum.
double spectrum_width(const ScalingLaw& law);

}  // namespace cascsym
