#include "cascsym/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cascsym/error.hpp"
#include "cascsym/parallel.hpp"

namespace cascsym {

using detail::require;

namespace {

constexpr double kMassTol = 1e-9;
constexpr int kSmearAtoms = 32;

}  // namespace

void UnitMeasure::validate() const {
  for (const auto& a : atoms) {
    require(std::isfinite(a.u) && a.u >= 0.0 && a.u <= 1.0, "unit measure atoms must lie in [0,1]");
    require(std::isfinite(a.w) && a.w != 0.0, "unit measure atom weights must be finite and nonzero");
    if (kind == MeasureKind::Positive) require(a.w > 0.0, "positive measure has a negative weight");
  }
}

double UnitMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.w;
  return m;
}

double UnitMeasure::total_variation() const {
  double m = 0.0;
  for (const auto& a : atoms) m += std::abs(a.w);
  return m;
}

UnitMeasure UnitMeasure::normalized() const {
  require(kind == MeasureKind::Positive, "only positive measures can be normalized");
  const double mass = total_mass();
  require(mass > 0.0, "cannot normalize an empty measure");
  UnitMeasure out = *this;
  for (auto& a : out.atoms) a.w /= mass;
  return out;
}

UnitMeasure UnitMeasure::dirac(double u, double w) {
  UnitMeasure m;
  m.kind = w > 0.0 ? MeasureKind::Positive : MeasureKind::Signed;
  m.atoms.push_back({u, w});
  m.validate();
  return m;
}

UnitMeasure pushforward_to_unit(const LevyGenerator& gen, int k) {
  gen.validate();
  require(k >= 1, "hierarchy step k must be >= 1");
  if (gen.sigma2 > 0.0)
    throw DomainError("generator has a Gaussian part: outside the classification Step 3 regime");
  UnitMeasure out;
  out.kind = MeasureKind::Positive;
  auto push = [&](const LevyAtom& atom) {
    if (!(atom.x < 0.0))
      throw DomainError("generator has positive jumps: outside the classification Step 3 regime");
    out.atoms.push_back({std::exp(k * atom.x), atom.w});
  };
  for (const auto& atom : gen.atoms) push(atom);
  if (gen.tail)
    for (const auto& atom : discretize_tail(*gen.tail)) push(atom);
  return out;
}

RhoEta rho_eta(const UnitMeasure& nu_tilde) {
  nu_tilde.validate();
  require(nu_tilde.kind == MeasureKind::Positive, "rho/eta construction needs a positive measure");
  RhoEta out;
  out.rho.kind = MeasureKind::Signed;
  out.eta.kind = MeasureKind::Positive;
  for (const auto& a : nu_tilde.atoms) {
    if (a.u >= 1.0) throw DomainError("pushed-forward Levy measure has an atom at u = 1");
    const double wr = (a.u - 1.0) * a.w;
    out.rho.atoms.push_back({a.u, wr});
    out.eta.atoms.push_back({a.u, -wr});
    out.A += wr;
  }
  return out;
}

std::vector<double> moment_sequence(const UnitMeasure& mu, int m_max) {
  mu.validate();
  require(m_max >= 0, "m_max must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(m_max) + 1, 0.0);
  for (const auto& a : mu.atoms) {
    double um = 1.0;
    for (int m = 0; m <= m_max; ++m) {
      out[m] += a.w * um;
      um *= a.u;
    }
  }
  return out;
}

double moment_residual(const UnitMeasure& rho, double A, double beta, int m_max) {
  require(m_max >= 2, "moment residual needs m_max >= 2");
  const auto mom = moment_sequence(rho, m_max);
  double sup = 0.0;
  double bm = 1.0;
  for (int m = 0; m <= m_max; ++m) {
    sup = std::max(sup, std::abs(mom[m] - A * bm));
    bm *= beta;
  }
  return sup;
}

double second_moment_test(const UnitMeasure& eta, double beta) {
  eta.validate();
  require(eta.kind == MeasureKind::Positive, "second moment test needs a positive measure");
  double s = 0.0;
  for (const auto& a : eta.atoms) s += a.w * (a.u - beta) * (a.u - beta);
  return s;
}

double mass_outside(const UnitMeasure& eta, double center, double radius) {
  eta.validate();
  double s = 0.0;
  for (const auto& a : eta.atoms)
    if (std::abs(a.u - center) > radius) s += a.w;
  return s;
}

double w1_unit(const UnitMeasure& mu, const UnitMeasure& nu) {
  mu.validate();
  nu.validate();
  require(mu.kind == MeasureKind::Positive && nu.kind == MeasureKind::Positive,
          "W1 needs positive measures");
  const double mm = mu.total_mass();
  const double nm = nu.total_mass();
  if (std::abs(mm - 1.0) > kMassTol || std::abs(nm - 1.0) > kMassTol) {
    std::ostringstream why;
    why << "W1 needs probability measures: masses " << mm << " and " << nm;
    throw DomainError(why.str());
  }
  // Signed point masses of mu - nu, swept left to right.
  std::vector<UnitAtom> diff;
  diff.reserve(mu.atoms.size() + nu.atoms.size());
  for (const auto& a : mu.atoms) diff.push_back(a);
  for (const auto& a : nu.atoms) diff.push_back({a.u, -a.w});
  std::sort(diff.begin(), diff.end(), [](const UnitAtom& a, const UnitAtom& b) { return a.u < b.u; });
  double cdf = 0.0;
  double w1 = 0.0;
  for (std::size_t i = 0; i + 1 < diff.size(); ++i) {
    cdf += diff[i].w;
    w1 += std::abs(cdf) * (diff[i + 1].u - diff[i].u);
  }
  return w1;
}

double stability_constant(double beta, double r, double A) {
  require(beta > 0.0 && beta < 1.0, "contraction ratio beta must lie in the open interval (0,1)");
  require(r > 0.0 && r < 1.0, "scale ratio r must lie in (0,1)");
  require(std::isfinite(A), "amplitude A must be finite");
  if (A == 0.0) throw DomainError("monofractal (A = 0): stability bound is vacuous");
  return std::sqrt((1.0 + beta) * (1.0 + beta) * std::abs(std::log(r)) / std::abs(A));
}

double StabilityReport::bound() const { return bigK * std::sqrt(epsilon); }

StabilityReport verify_stability(const LevyGenerator& gen_perturbed, const LogPoissonParams& gen_ref, double r,
                                 int k, int m_max) {
  gen_ref.validate();
  require(r > 0.0 && r < 1.0, "scale ratio r must lie in (0,1)");
  require(m_max >= 2, "m_max must be >= 2");
  StabilityReport rep;
  rep.m_max = m_max;
  rep.beta = gen_ref.beta(k);
  const double lnr = std::log(r);
  const double delta_inf = gen_ref.a * k / lnr;
  rep.A = gen_ref.lambda * (rep.beta - 1.0);

  // A1 residual of the perturbed analytic series against the reference (beta, delta_inf).
  const DeltaSeries series = delta_series_analytic(gen_perturbed, r, k, m_max + 1);
  double eps = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const double pred = (1.0 - rep.beta) * delta_inf + rep.beta * series.entries[m].delta;
    eps = std::max(eps, std::abs(series.entries[m + 1].delta - pred));
  }
  rep.epsilon = eps;

  const RhoEta re = rho_eta(pushforward_to_unit(gen_perturbed, k));
  rep.eta_mass = re.eta.total_mass();
  rep.eta_mass_minus_absA = rep.eta_mass - std::abs(rep.A);
  rep.moment_residual = moment_residual(re.rho, rep.A, rep.beta, m_max);
  rep.second_moment = second_moment_test(re.eta, rep.beta);
  rep.bigK = stability_constant(rep.beta, r, rep.A);
  rep.w1_levy = w1_unit(re.eta.normalized(), UnitMeasure::dirac(rep.beta));
  rep.bound_ok = rep.w1_levy <= rep.bound() + 1e-12;
  return rep;
}

double empirical_w1_multipliers(const LevyGenerator& gen_a, const LevyGenerator& gen_b, std::size_t n_samples,
                                std::uint64_t seed) {
  require(n_samples >= 10000, "multiplier W1 needs at least 10^4 samples");
  auto sorted_w = [&](const LevyGenerator& g) {
    std::vector<double> s = sample_logW(g, n_samples, seed);
    for (double& v : s) v = std::exp(v);
    std::sort(s.begin(), s.end());
    return s;
  };
  const std::vector<double> a = sorted_w(gen_a);
  const std::vector<double> b = sorted_w(gen_b);
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double v = std::abs(a[i] - b[i]);
    const double t = sum + v;
    comp += sum >= v ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(n_samples);
}

std::string to_string(Preset p) {
  switch (p) {
    case Preset::Split: return "split";
    case Preset::Leak: return "leak";
    case Preset::Smear: return "smear";
  }
  return "split";
}

Preset preset_from_string(const std::string& s) {
  if (s == "split") return Preset::Split;
  if (s == "leak") return Preset::Leak;
  if (s == "smear") return Preset::Smear;
  throw ParseError("unknown perturbation preset '" + s + "' (expected split, leak or smear)");
}

double max_strength(const LogPoissonParams& ref, int k, Preset preset) {
  const double beta = ref.beta(k);
  switch (preset) {
    case Preset::Split: return std::min(beta, 1.0 - beta);
    case Preset::Leak: return 1.0;
    case Preset::Smear: return 2.0 * std::min(beta, 1.0 - beta);
  }
  return 0.0;
}

LevyGenerator perturbed_generator(const LogPoissonParams& ref, int k, Preset preset, double strength) {
  ref.validate();
  require(k >= 1, "hierarchy step k must be >= 1");
  require(strength >= 0.0 && strength < max_strength(ref, k, preset), "perturbation strength out of range");
  const double beta = ref.beta(k);
  const double A = ref.lambda * (beta - 1.0);
  std::vector<UnitAtom> nu;  // pushed-forward atoms (u, mass)
  switch (preset) {
    case Preset::Split:
      if (strength == 0.0) {
        nu.push_back({beta, ref.lambda});
      } else {
        nu.push_back({beta - strength, 0.5 * ref.lambda});
        nu.push_back({beta + strength, 0.5 * ref.lambda});
      }
      break;
    case Preset::Leak: {
      const double u2 = 0.5 * beta;
      if (strength < 1.0) nu.push_back({beta, (1.0 - strength) * ref.lambda});
      if (strength > 0.0) nu.push_back({u2, strength * A / (u2 - 1.0)});
      break;
    }
    case Preset::Smear: {
      if (strength == 0.0) {
        nu.push_back({beta, ref.lambda});
        break;
      }
      double denom = 0.0;
      for (int i = 0; i < kSmearAtoms; ++i) {
        const double u = beta - 0.5 * strength + (i + 0.5) * strength / kSmearAtoms;
        nu.push_back({u, 0.0});
        denom += u - 1.0;
      }
      for (auto& a : nu) a.w = A / denom;
      break;
    }
  }
  LevyGenerator g;
  g.drift = ref.a;
  for (const auto& a : nu) g.atoms.push_back({std::log(a.u) / k, a.w});
  g.validate();
  return g;
}

StabilitySweep stability_sweep(const LogPoissonParams& ref, double r, int k, Preset preset,
                               const std::vector<double>& eps_grid, std::size_t n_samples, std::uint64_t seed,
                               int m_max) {
  require(!eps_grid.empty(), "epsilon grid is empty");
  const double smax = max_strength(ref, k, preset);
  auto eps_at = [&](double s) { return verify_stability(perturbed_generator(ref, k, preset, s), ref, r, k, m_max).epsilon; };

  StabilitySweep sweep;
  sweep.all_bounds_ok = true;
  const LevyGenerator ref_norm = normalize_mean_one(LevyGenerator(ref));
  for (double target : eps_grid) {
    require(target > 0.0 && std::isfinite(target), "epsilon targets must be positive");
    // epsilon grows monotonically with the strength; bisect in log strength.
    double lo = std::log(smax * 1e-12);
    double hi = std::log(smax * (1.0 - 1e-9));
    if (eps_at(std::exp(hi)) < target) {
      std::ostringstream why;
      why << "epsilon " << target << " is not reachable with the " << to_string(preset) << " preset";
      throw DomainError(why.str());
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eps_at(std::exp(mid)) < target ? lo : hi) = mid;
    }
    SweepRow row;
    row.epsilon_target = target;
    row.strength = std::exp(0.5 * (lo + hi));
    const LevyGenerator pert = perturbed_generator(ref, k, preset, row.strength);
    row.report = verify_stability(pert, ref, r, k, m_max);
    if (n_samples > 0)
      row.report.w1_multiplier = empirical_w1_multipliers(normalize_mean_one(pert), ref_norm, n_samples, seed);
    sweep.all_bounds_ok = sweep.all_bounds_ok && row.report.bound_ok;
    sweep.rows.push_back(std::move(row));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : sweep.rows) {
    if (!(row.report.w1_levy > 0.0 && row.report.epsilon > 0.0)) continue;
    const double x = std::log(row.report.epsilon);
    const double y = std::log(row.report.w1_levy);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  sweep.loglog_slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return sweep;
}

}  // namespace cascsym
