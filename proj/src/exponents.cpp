#include "cascsym/exponents.hpp"

#include <cmath>
#include <string>

#include "cascsym/error.hpp"

namespace cascsym {

using detail::require;

void CascadeParams::validate() const {
  require(r > 0.0 && r < 1.0, "scale ratio r must lie in (0,1)");
  require(k >= 1, "hierarchy step k must be >= 1");
  require(d > 0.0 && std::isfinite(d), "dimension d must be positive");
}

void ScalingLaw::validate() const {
  require(std::isfinite(gamma), "gamma must be finite");
  require(std::isfinite(bigC) && bigC >= 0.0, "concentration amplitude C must be >= 0");
  require(beta > 0.0 && beta < 1.0, "contraction ratio beta must lie in the open interval (0,1)");
  require(k >= 1, "hierarchy step k must be >= 1");
}

double ScalingLaw::amplitude(double r) const {
  require(r > 0.0 && r < 1.0, "scale ratio r must lie in (0,1)");
  return (delta0() - delta_inf()) * std::log(r);
}

void DeltaSeries::validate() const {
  require(k >= 1, "hierarchy step k must be >= 1");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    require(entries[i].m == static_cast<int>(i),
            "delta series orders must be m = 0, 1, 2, ... without gaps");
    require(std::isfinite(entries[i].delta), "delta series entries must be finite");
  }
  if (stderr_) {
    require(stderr_->size() == entries.size(), "standard errors must match the entries");
    for (double s : *stderr_) require(std::isfinite(s) && s >= 0.0, "standard errors must be finite and >= 0");
  }
}

std::vector<double> DeltaSeries::values() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.delta);
  return out;
}

DeltaSeries DeltaSeries::from_values(int k, const std::vector<double>& deltas) {
  DeltaSeries s;
  s.k = k;
  for (std::size_t i = 0; i < deltas.size(); ++i) s.entries.push_back({static_cast<int>(i), deltas[i]});
  s.validate();
  return s;
}

namespace {

void check_order(double p) {
  require(std::isfinite(p) && p >= 0.0, "moment order p must be finite and >= 0");
}

}  // namespace

double zeta(const ScalingLaw& law, double p) {
  law.validate();
  check_order(p);
  // -expm1 keeps 1 - beta^{p/k} accurate for small p.
  return law.gamma * p - law.bigC * std::expm1(p / law.k * std::log(law.beta));
}

double delta(const ScalingLaw& law, double p) {
  law.validate();
  check_order(p);
  const double dinf = law.delta_inf();
  return dinf + (law.delta0() - dinf) * std::pow(law.beta, p / law.k);
}

double a1_step(double delta_p, double beta, double delta_inf) {
  require(beta > 0.0 && beta < 1.0, "contraction ratio beta must lie in the open interval (0,1)");
  return (1.0 - beta) * delta_inf + beta * delta_p;
}

ScalingLaw law_from_deltas(double delta0, double delta_inf, double beta, int k) {
  require(beta > 0.0 && beta < 1.0, "contraction ratio beta must lie in the open interval (0,1)");
  require(k >= 1, "hierarchy step k must be >= 1");
  require(std::isfinite(delta0) && std::isfinite(delta_inf), "delta_0 and delta_inf must be finite");
  if (delta0 < delta_inf)
    throw DomainError("negative concentration: delta_0 < delta_inf gives C < 0");
  ScalingLaw law{delta_inf / k, (delta0 - delta_inf) / (1.0 - beta), beta, k};
  law.validate();
  return law;
}

double conservation_gamma(double bigC, double beta, int k, double z0, double k0) {
  require(k0 > 0.0 && std::isfinite(k0), "conservation order k0 must be > 0");
  require(beta > 0.0 && beta < 1.0, "contraction ratio beta must lie in the open interval (0,1)");
  require(k >= 1, "hierarchy step k must be >= 1");
  require(bigC >= 0.0, "concentration amplitude C must be >= 0");
  return (z0 + bigC * std::expm1(k0 / k * std::log(beta))) / k0;
}

double spectrum_width(const ScalingLaw& law) {
  law.validate();
  return law.bigC / law.k * std::abs(std::log(law.beta));
}

}  // namespace cascsym
