#pragma once

// Test bench for the hierarchical symmetry
//   delta_{(m+1)k} = (1 - beta) delta_inf + beta delta_{mk}.
// fit_a1 estimates (beta, delta_inf) from a delta series, classify labels the
// generator family the series came from, and characterize turns an A1 series
// into its scaling law and log-Poisson parameters.

#include <optional>
#include <string>

#include "cascsym/exponents.hpp"
#include "cascsym/generators.hpp"

namespace cascsym {

enum class Verdict { A1Holds, Monofractal, AffineDivergent, PowerDecay, Other };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct A1Fit {
  double beta_hat = 0.0;       // NaN when unidentifiable (constant series)
  double delta_inf_hat = 0.0;
  double amplitude = 0.0;      // D in delta_m = delta_inf + D beta^m
  double epsilon_hat = 0.0;    // sup-norm recurrence residual at (beta_hat, delta_inf_hat)
  bool beta_identified = true;
  bool beta_at_boundary = false;  // argmin on the first or last grid node
  double recurrence_slope = 0.0;  // OLS slope of delta_{m+1} on delta_m

  double delta0_hat() const { return delta_inf_hat + amplitude; }
};

struct A1Report {
  A1Fit fit;
  Verdict verdict = Verdict::Other;
  double tol = 0.0;
  int m_max = 0;
  int k = 1;
  std::string series_digest;
  std::optional<ScalingLaw> law;
  std::optional<LogPoissonParams> logpoisson;

  double beta_hat() const { return fit.beta_hat; }
  double delta_inf_hat() const { return fit.delta_inf_hat; }
  double epsilon_hat() const { return fit.epsilon_hat; }
};

/// sup_m |delta_{m+1} - (1 - beta) delta_inf - beta delta_m| over the series.
double a1_residual(const DeltaSeries& series, double beta, double delta_inf);

A1Fit fit_a1(const DeltaSeries& series);

/// max(1e-8, 3 median se) for series with standard errors, else 1e-8.
double default_tolerance(const DeltaSeries& series);

A1Report classify(const DeltaSeries& series, double tol);
A1Report classify(const DeltaSeries& series);

A1Report characterize(const DeltaSeries& series, double r, int k, double tol);
A1Report characterize(const DeltaSeries& series, double r, int k);

/// FNV-1a over k, orders and the bit patterns of the values, as 16 hex digits.
std::string series_digest(const DeltaSeries& series);

}  // namespace cascsym
