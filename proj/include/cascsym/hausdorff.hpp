#pragma once

// Finite atomic measures on [0,1] obtained from a Levy measure by u = e^{kx},
// their moment sequences, exact one-dimensional Wasserstein-1 distances, and the
// K sqrt(eps) stability bound for approximately log-Poisson generators.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cascsym/generators.hpp"

namespace cascsym {

enum class MeasureKind { Signed, Positive };

struct UnitAtom {
  double u = 0.0;
  double w = 0.0;

  friend bool operator==(const UnitAtom&, const UnitAtom&) = default;
};

struct UnitMeasure {
  std::vector<UnitAtom> atoms;
  MeasureKind kind = MeasureKind::Positive;

  void validate() const;
  double total_mass() const;
  double total_variation() const;
  UnitMeasure normalized() const;

  static UnitMeasure dirac(double u, double w = 1.0);
};

/// Atoms of nu pushed through x -> e^{kx}. Requires sigma2 = 0 and jumps on (-inf, 0).
UnitMeasure pushforward_to_unit(const LevyGenerator& gen, int k);

struct RhoEta {
  UnitMeasure rho;  // (u - 1) nu~, signed, non-positive weights
  UnitMeasure eta;  // (1 - u) nu~ = -rho
  double A = 0.0;   // total mass of rho
};

RhoEta rho_eta(const UnitMeasure& nu_tilde);

/// sum_i w_i u_i^m for m = 0..m_max.
std::vector<double> moment_sequence(const UnitMeasure& mu, int m_max);

/// sup_{m <= m_max} |\int u^m d rho - A beta^m|.
double moment_residual(const UnitMeasure& rho, double A, double beta, int m_max);

/// \int (u - beta)^2 d eta.
double second_moment_test(const UnitMeasure& eta, double beta);

/// eta mass outside [center - radius, center + radius].
double mass_outside(const UnitMeasure& eta, double center, double radius);

/// Exact W1 between two probability measures on [0,1]: \int |F_mu - F_nu| du.
double w1_unit(const UnitMeasure& mu, const UnitMeasure& nu);

/// K = ((1 + beta)^2 |ln r| / |A|)^{1/2}.
double stability_constant(double beta, double r, double A);

struct StabilityReport {
  double epsilon = 0.0;
  double bigK = 0.0;
  double w1_levy = 0.0;
  std::optional<double> w1_multiplier;
  bool bound_ok = false;

  double beta = 0.0;
  double A = 0.0;                     // reference amplitude
  double eta_mass = 0.0;
  double eta_mass_minus_absA = 0.0;
  double moment_residual = 0.0;       // sup_m |\int u^m d rho - A beta^m|
  double second_moment = 0.0;
  int m_max = 0;

  double bound() const;
};

inline constexpr int kDefaultStabilityMMax = 40;

StabilityReport verify_stability(const LevyGenerator& gen_perturbed, const LogPoissonParams& gen_ref, double r,
                                 int k, int m_max = kDefaultStabilityMMax);

/// Mean absolute difference of the sorted samples of W = e^{log W} from the two
/// generators, both drawn with the same seed.
double empirical_w1_multipliers(const LevyGenerator& gen_a, const LevyGenerator& gen_b, std::size_t n_samples,
                                std::uint64_t seed);

// Perturbation families around a log-Poisson reference, all with the same drift
// and the same rho mass A as the reference:
//   split  - nu~ mass split evenly between u = beta - s and beta + s
//   leak   - fraction theta of the eta mass moved to a second atom u2
//   smear  - eta spread uniformly over [beta - w/2, beta + w/2]
enum class Preset { Split, Leak, Smear };

std::string to_string(Preset p);
Preset preset_from_string(const std::string& s);

LevyGenerator perturbed_generator(const LogPoissonParams& ref, int k, Preset preset, double strength);
/// Largest admissible strength (exclusive) for the preset.
double max_strength(const LogPoissonParams& ref, int k, Preset preset);

struct SweepRow {
  double epsilon_target = 0.0;
  double strength = 0.0;
  StabilityReport report;
};

struct StabilitySweep {
  std::vector<SweepRow> rows;
  double loglog_slope = 0.0;  // slope of ln w1_levy against ln epsilon
  bool all_bounds_ok = false;
};

/// For each target epsilon, solves for the preset strength reaching it and
/// verifies the bound. n_samples > 0 adds the sampled multiplier distance
/// between the mean-one normalized perturbed and reference generators.
StabilitySweep stability_sweep(const LogPoissonParams& ref, double r, int k, Preset preset,
                               const std::vector<double>& eps_grid, std::size_t n_samples = 0,
                               std::uint64_t seed = 0, int m_max = kDefaultStabilityMMax);

}  // namespace cascsym
