#include "cascsym/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cascsym/error.hpp"
#include "cascsym/parallel.hpp"

namespace cascsym {

using detail::finite_or_throw;
using detail::require;

// ---------------------------------------------------------------------------
// Parameter types

void LogPoissonParams::validate() const {
  require(std::isfinite(a), "log-Poisson drift a must be finite");
  require(std::isfinite(b) && b < 0.0, "log-Poisson jump b must be negative");
  require(std::isfinite(lambda) && lambda > 0.0, "log-Poisson rate lambda must be positive");
}

double LogPoissonParams::beta(int k) const {
  require(k >= 1, "hierarchy step k must be >= 1");
  return std::exp(b * k);
}

void StableTail::validate() const {
  require(alpha > 0.0 && alpha < 2.0, "stable index alpha must lie in (0,2)");
  require(std::isfinite(c) && c > 0.0, "stable tail scale c must be positive");
  require(x_min > 0.0 && std::isfinite(x_min), "stable tail cutoff x_min must be positive");
  require(std::isfinite(x_max), "untruncated stable tail: x_max must be finite");
  require(x_min < x_max, "stable tail requires x_min < x_max");
}

double StableTail::total_mass() const {
  return c / alpha * (std::pow(x_min, -alpha) - std::pow(x_max, -alpha));
}

LevyGenerator::LevyGenerator(const LogPoissonParams& lp) : drift(lp.a) {
  lp.validate();
  atoms.push_back({lp.b, lp.lambda});
}

LevyGenerator LevyGenerator::deterministic(double drift) {
  LevyGenerator g;
  g.drift = drift;
  g.validate();
  return g;
}

LevyGenerator LevyGenerator::log_normal(double drift, double sigma2) {
  LevyGenerator g;
  g.drift = drift;
  g.sigma2 = sigma2;
  g.validate();
  return g;
}

LevyGenerator LevyGenerator::log_stable(double drift, const StableTail& tail) {
  LevyGenerator g;
  g.drift = drift;
  g.tail = tail;
  g.validate();
  return g;
}

void LevyGenerator::validate() const {
  require(std::isfinite(drift), "generator drift must be finite");
  require(std::isfinite(sigma2) && sigma2 >= 0.0, "Gaussian variance sigma2 must be >= 0");
  for (const auto& atom : atoms) {
    require(std::isfinite(atom.x), "Levy atom location must be finite");
    require(atom.x != 0.0, "Levy atom at x = 0 is not allowed");
    require(std::isfinite(atom.w) && atom.w > 0.0, "Levy atom mass must be positive");
  }
  if (tail) tail->validate();
}

double LevyGenerator::total_mass() const {
  double m = 0.0;
  for (const auto& atom : atoms) m += atom.w;
  if (tail) m += tail->total_mass();
  return m;
}

std::string LevyGenerator::kind() const {
  if (sigma2 == 0.0 && !tail && atoms.size() == 1 && atoms[0].x < 0.0) return "log-poisson";
  if (sigma2 > 0.0 && !tail && atoms.empty()) return "log-normal";
  if (sigma2 == 0.0 && tail && atoms.empty()) return "log-stable";
  return "atomic";
}

// ---------------------------------------------------------------------------
// Tail quadrature. With x = -e^s the tail integral becomes
//   \int f(-e^s) c e^{-alpha s} ds  over  s in [ln x_min, ln x_max].

namespace {

double simpson_tail(const StableTail& tail, const std::function<double(double)>& f, int intervals) {
  const double s0 = std::log(tail.x_min);
  const double s1 = std::log(tail.x_max);
  const double h = (s1 - s0) / intervals;
  double sum = 0.0;
  double comp = 0.0;  // Neumaier
  for (int i = 0; i <= intervals; ++i) {
    const double s = s0 + h * i;
    const double wt = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double term = wt * f(-std::exp(s)) * tail.c * std::exp(-tail.alpha * s);
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return (sum + comp) * h / 3.0;
}

double integrate_tail(const StableTail& tail, const std::function<double(double)>& f) {
  constexpr double kRelTol = 1e-9;
  int n = 512;
  double prev = simpson_tail(tail, f, n);
  while (n < (1 << 20)) {
    n *= 2;
    const double next = simpson_tail(tail, f, n);
    if (std::abs(next - prev) <= kRelTol * std::abs(next) || std::abs(next - prev) < 1e-300) return next;
    prev = next;
  }
  return prev;
}

void check_order(double p) { require(std::isfinite(p) && p >= 0.0, "moment order p must be finite and >= 0"); }

}  // namespace

std::vector<LevyAtom> discretize_tail(const StableTail& tail, int intervals) {
  tail.validate();
  require(intervals >= 2 && intervals % 2 == 0, "tail discretization needs an even number of intervals");
  const double s0 = std::log(tail.x_min);
  const double s1 = std::log(tail.x_max);
  const double h = (s1 - s0) / intervals;
  std::vector<LevyAtom> nodes;
  nodes.reserve(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    const double s = s0 + h * i;
    const double wt = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    nodes.push_back({-std::exp(s), wt * h / 3.0 * tail.c * std::exp(-tail.alpha * s)});
  }
  return nodes;
}

// ---------------------------------------------------------------------------
// Moments

LogPoissonParams logpoisson_from_scaling(const ScalingLaw& law, double r) {
  law.validate();
  require(r > 0.0 && r < 1.0, "scale ratio r must lie in (0,1)");
  if (law.bigC <= 0.0)
    throw DomainError("monofractal law (C = 0): the multiplier is deterministic, not log-Poisson");
  const double lnr = std::log(r);
  LogPoissonParams lp{law.gamma * lnr, std::log(law.beta) / law.k, -law.bigC * lnr};
  lp.validate();
  return lp;
}

double ln_moment(const LevyGenerator& gen, double p) {
  gen.validate();
  check_order(p);
  if (p == 0.0) return 0.0;
  double psi = gen.drift * p + 0.5 * gen.sigma2 * p * p;
  for (const auto& atom : gen.atoms) psi += atom.w * std::expm1(p * atom.x);
  if (gen.tail) psi += integrate_tail(*gen.tail, [p](double x) { return std::expm1(p * x); });
  return finite_or_throw(psi, "ln E[W^p] overflow");
}

double step_cumulant(const LevyGenerator& gen, double p, int k) {
  gen.validate();
  check_order(p);
  require(k >= 1, "hierarchy step k must be >= 1");
  double phi = gen.drift * k + gen.sigma2 * k * (p + 0.5 * k);
  for (const auto& atom : gen.atoms) phi += atom.w * std::exp(p * atom.x) * std::expm1(k * atom.x);
  if (gen.tail)
    phi += integrate_tail(*gen.tail, [p, k](double x) { return std::exp(p * x) * std::expm1(k * x); });
  return finite_or_throw(phi, "psi(p+k) - psi(p) overflow");
}

DeltaSeries delta_series_analytic(const LevyGenerator& gen, double r, int k, int m_max) {
  require(r > 0.0 && r < 1.0, "scale ratio r must lie in (0,1)");
  require(k >= 1, "hierarchy step k must be >= 1");
  require(m_max >= 2, "delta series needs m_max >= 2");
  const double lnr = std::log(r);
  DeltaSeries series;
  series.k = k;
  for (int m = 0; m <= m_max; ++m)
    series.entries.push_back({m, step_cumulant(gen, static_cast<double>(m) * k, k) / lnr});
  return series;
}

// ---------------------------------------------------------------------------
// Sampling

LogMultiplierSampler::LogMultiplierSampler(const LevyGenerator& gen) : gen_(gen) {
  gen_.validate();
  for (const auto& atom : gen_.atoms) {
    total_ += atom.w;
    cumulative_.push_back(total_);
  }
  if (gen_.tail) {
    total_ += gen_.tail->total_mass();
    cumulative_.push_back(total_);
  }
  finite_or_throw(total_, "Levy measure total mass");
  sigma_ = std::sqrt(gen_.sigma2);
}

double LogMultiplierSampler::draw(KeyedStream& stream) const {
  double x = gen_.drift;
  const std::uint64_t jumps = total_ > 0.0 ? stream.poisson(total_) : 0;
  for (std::uint64_t i = 0; i < jumps; ++i) {
    const double pos = stream.uniform() * total_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), pos);
    std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
    if (idx < gen_.atoms.size()) {
      x += gen_.atoms[idx].x;
    } else {
      // Inverse CDF of t^{-1-alpha} on [x_min, x_max], reusing the position inside the tail segment.
      const StableTail& t = *gen_.tail;
      const double lo = idx == 0 ? 0.0 : cumulative_[idx - 1];
      const double f = std::clamp((pos - lo) / (total_ - lo), 0.0, 1.0);
      const double a = std::pow(t.x_min, -t.alpha);
      const double bnd = std::pow(t.x_max, -t.alpha);
      x -= std::pow(a - f * (a - bnd), -1.0 / t.alpha);
    }
  }
  if (sigma_ > 0.0) x += sigma_ * stream.normal();
  return x;
}

std::vector<double> sample_logW(const LevyGenerator& gen, std::size_t count, std::uint64_t seed) {
  require(count >= 1, "sample count must be >= 1");
  const LogMultiplierSampler sampler(gen);
  std::vector<double> out(count);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      KeyedStream stream(seed, j);
      out[j] = sampler.draw(stream);
    }
  });
  return out;
}

LevyGenerator normalize_mean_one(const LevyGenerator& gen) {
  LevyGenerator out = gen;
  out.drift -= ln_moment(gen, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Carleman determinacy

CarlemanSum carleman_partial_sum(const LevyGenerator& gen, int P) {
  require(P >= 1, "Carleman partial sum needs P >= 1");
  CarlemanSum out;
  out.terms.reserve(P);
  double comp = 0.0;
  for (int p = 1; p <= P; ++p) {
    const double two_p = 2.0 * p;
    const double term = finite_or_throw(std::exp(-ln_moment(gen, two_p) / two_p), "Carleman term");
    out.terms.push_back(term);
    const double t = out.sum + term;
    comp += std::abs(out.sum) >= std::abs(term) ? (out.sum - t) + term : (term - t) + out.sum;
    out.sum = t;
  }
  out.sum += comp;
  return out;
}

std::string to_string(Determinacy d) {
  switch (d) {
    case Determinacy::DeterminateDivergent: return "determinate-divergent";
    case Determinacy::IndeterminateConvergent: return "indeterminate-convergent";
    case Determinacy::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DeterminacyResult determinacy_verdict(const LevyGenerator& gen, int P, double threshold) {
  require(P >= 10, "determinacy verdict needs P >= 10");
  DeterminacyResult res;
  res.carleman = carleman_partial_sum(gen, P);
  const auto& terms = res.carleman.terms;

  // Log-linear fit of ln(term_p) against p over the tail p in [P/2, P].
  const int first = P / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  res.tail_min = std::numeric_limits<double>::infinity();
  for (int p = first; p <= P; ++p) {
    const double t = terms[p - 1];
    res.tail_min = std::min(res.tail_min, t);
    const double y = std::log(t);
    sx += p;
    sy += y;
    sxx += double(p) * p;
    sxy += p * y;
    syy += y * y;
    ++n;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  const double slope = cxy / vx;
  res.tail_ratio = std::exp(slope);
  res.tail_r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 0.0;
  const double last = terms.back();
  res.projected_sum = res.tail_ratio < 1.0 ? res.carleman.sum + last * res.tail_ratio / (1.0 - res.tail_ratio)
                                           : std::numeric_limits<double>::infinity();

  // A geometric tail whose extrapolated remainder is small compared with the
  // partial sum converges; terms bounded away from zero diverge.
  const bool geometric = res.tail_ratio < 1.0 && res.tail_r2 > 0.999 &&
                         res.projected_sum - res.carleman.sum < res.carleman.sum;
  if (geometric)
    res.verdict = Determinacy::IndeterminateConvergent;
  else if (res.tail_min >= threshold)
    res.verdict = Determinacy::DeterminateDivergent;
  else
    res.verdict = Determinacy::Inconclusive;
  return res;
}

}  // namespace cascsym
