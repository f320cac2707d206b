#include "cascsym/random.hpp"

#include <cmath>
#include <numbers>

#include "cascsym/error.hpp"

namespace cascsym {

double KeyedStream::normal() {
  // Box-Muller without caching the second variate: draws stay aligned per call.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t KeyedStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;

  if (mean < 10.0) {
    // Inversion by sequential search; one uniform per draw.
    double u = uniform();
    double pmf = std::exp(-mean);
    std::uint64_t n = 0;
    while (u > pmf) {
      u -= pmf;
      ++n;
      pmf *= mean / static_cast<double>(n);
      if (pmf == 0.0) break;
    }
    return n;
  }

  // PTRS transformed rejection (Hormann 1993).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b);
    const double rhs = -mean + kd * loglam - std::lgamma(kd + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(kd);
  }
}

}  // namespace cascsym
