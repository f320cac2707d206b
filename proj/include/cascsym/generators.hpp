#pragma once

// Log-infinitely-divisible cascade generators. log W has Levy triplet
// (drift, sigma2, nu) where nu has finite total mass, so
//   psi(p) = ln E[W^p] = drift p + sigma2 p^2 / 2 + \int (e^{px} - 1) nu(dx).
// nu is a finite list of atoms plus an optional truncated power-law tail.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cascsym/exponents.hpp"
#include "cascsym/random.hpp"

namespace cascsym {

/// log W = a + b N, N ~ Poisson(lambda), with b < 0 and lambda > 0.
struct LogPoissonParams {
  double a = 0.0;
  double b = -1.0;
  double lambda = 1.0;

  void validate() const;
  /// Contraction ratio e^{bk} of the induced exponent recurrence.
  double beta(int k) const;

  friend bool operator==(const LogPoissonParams&, const LogPoissonParams&) = default;
};

/// nu(dx) = c |x|^{-1-alpha} dx on [-x_max, -x_min].
struct StableTail {
  double alpha = 0.5;
  double c = 1.0;
  double x_min = 1e-8;
  double x_max = 10.0;

  void validate() const;
  double total_mass() const;

  friend bool operator==(const StableTail&, const StableTail&) = default;
};

struct LevyAtom {
  double x = 0.0;  // jump of log W
  double w = 0.0;  // intensity, > 0

  friend bool operator==(const LevyAtom&, const LevyAtom&) = default;
};

struct LevyGenerator {
  double drift = 0.0;
  double sigma2 = 0.0;
  std::vector<LevyAtom> atoms;
  std::optional<StableTail> tail;

  LevyGenerator() = default;
  LevyGenerator(const LogPoissonParams& lp);  // NOLINT: a log-Poisson law is a generator

  static LevyGenerator deterministic(double drift);
  static LevyGenerator log_normal(double drift, double sigma2);
  static LevyGenerator log_stable(double drift, const StableTail& tail);

  void validate() const;
  double total_mass() const;
  /// "log-poisson", "log-normal", "log-stable", or "atomic" (anything else).
  std::string kind() const;

  friend bool operator==(const LevyGenerator&, const LevyGenerator&) = default;
};

struct MomentLog {
  double p = 0.0;
  double ln_moment = 0.0;
};

LogPoissonParams logpoisson_from_scaling(const ScalingLaw& law, double r);

/// psi(p) = ln E[W^p]. Throws NumericError instead of returning inf/nan.
double ln_moment(const LevyGenerator& gen, double p);

/// phi(p) = psi(p + k) - psi(p), evaluated without forming the two psi values.
double step_cumulant(const LevyGenerator& gen, double p, int k);

DeltaSeries delta_series_analytic(const LevyGenerator& gen, double r, int k, int m_max);

/// Draws one log W from a keyed stream. Total jump count is Poisson(total mass)
/// and each jump picks its component with a single uniform, so generators of
/// equal total mass are coupled when driven by the same stream.
class LogMultiplierSampler {
 public:
  explicit LogMultiplierSampler(const LevyGenerator& gen);
  double draw(KeyedStream& stream) const;

 private:
  LevyGenerator gen_;
  std::vector<double> cumulative_;  // atoms then tail
  double total_ = 0.0;
  double sigma_ = 0.0;
};

std::vector<double> sample_logW(const LevyGenerator& gen, std::size_t count, std::uint64_t seed);

/// Shifts the drift so that E[W] = 1.
LevyGenerator normalize_mean_one(const LevyGenerator& gen);

struct CarlemanSum {
  std::vector<double> terms;  // terms[p-1] = E[W^{2p}]^{-1/(2p)}
  double sum = 0.0;
};

CarlemanSum carleman_partial_sum(const LevyGenerator& gen, int P);

enum class Determinacy { DeterminateDivergent, IndeterminateConvergent, Inconclusive };

std::string to_string(Determinacy d);

struct DeterminacyResult {
  Determinacy verdict = Determinacy::Inconclusive;
  CarlemanSum carleman;
  double tail_min = 0.0;      // smallest term with p >= P/2
  double tail_ratio = 0.0;    // fitted geometric ratio on the tail
  double tail_r2 = 0.0;       // R^2 of the log-linear tail fit
  double projected_sum = 0.0; // partial sum plus geometric extrapolation (inf if ratio >= 1)
};

DeterminacyResult determinacy_verdict(const LevyGenerator& gen, int P, double threshold = 1e-3);

/// Nodes x_i and weights w_i discretizing the tail on its quadrature grid
/// (composite Simpson in log|x| with the given number of intervals).
std::vector<LevyAtom> discretize_tail(const StableTail& tail, int intervals = 512);

}  // namespace cascsym
