#include <cmath>

#include "doctest.h"

#include "cascsym/error.hpp"
#include "cascsym/exponents.hpp"
#include "cascsym/generators.hpp"
#include "cascsym/hausdorff.hpp"

using namespace cascsym;
using doctest::Approx;

namespace {
const ScalingLaw kSL{1.0 / 9.0, 2.0, 2.0 / 3.0, 3};
const LogPoissonParams& sl_ref() {
  static const LogPoissonParams p = logpoisson_from_scaling(kSL, 0.5);
  return p;
}
UnitMeasure two_atoms(double u1, double w1, double u2, double w2) {
  UnitMeasure m;
  m.atoms = {{u1, w1}, {u2, w2}};
  return m;
}
}  // namespace

TEST_CASE("pushforward_to_unit") {
  const UnitMeasure single = pushforward_to_unit(LevyGenerator(sl_ref()), 3);
  REQUIRE(single.atoms.size() == 1);
  CHECK(single.atoms[0].u == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(single.atoms[0].w == Approx(1.386294).epsilon(1e-6));

  LevyGenerator g;
  g.atoms = {{-1.0, 0.5}, {-2.0, 0.25}};
  const UnitMeasure two = pushforward_to_unit(g, 1);
  REQUIRE(two.atoms.size() == 2);
  CHECK(two.atoms[0].u == Approx(std::exp(-1.0)));
  CHECK(two.atoms[0].w == 0.5);
  CHECK(two.atoms[1].u == Approx(std::exp(-2.0)));
  CHECK(two.atoms[1].w == 0.25);

  CHECK(pushforward_to_unit(LevyGenerator::deterministic(0.1), 2).atoms.empty());
  CHECK_THROWS_AS(pushforward_to_unit(LevyGenerator::log_normal(0.0, 0.2), 1), DomainError);
  LevyGenerator up;
  up.atoms = {{0.3, 1.0}};
  CHECK_THROWS_AS(pushforward_to_unit(up, 1), DomainError);
}

TEST_CASE("rho_eta") {
  const RhoEta re = rho_eta(pushforward_to_unit(LevyGenerator(sl_ref()), 3));
  CHECK(re.A == Approx(-0.462098).epsilon(1e-6));
  CHECK(re.rho.atoms[0].w == Approx(-0.462098).epsilon(1e-6));
  CHECK(re.eta.total_mass() == Approx(0.462098).epsilon(1e-6));
  CHECK(re.A == Approx((kSL.delta0() - kSL.delta_inf()) * std::log(0.5)).epsilon(1e-12));
  CHECK(rho_eta(UnitMeasure{}).A == 0.0);
  CHECK(rho_eta(two_atoms(0.5, 1.0, 0.8, 1.0)).A == Approx(-0.7).epsilon(1e-14));
}

TEST_CASE("moment_sequence") {
  UnitMeasure rho;
  rho.kind = MeasureKind::Signed;
  rho.atoms = {{2.0 / 3.0, -0.462098}};
  const auto m = moment_sequence(rho, 2);
  CHECK(m[0] == Approx(-0.462098));
  CHECK(m[1] == Approx(-0.308065).epsilon(1e-6));
  CHECK(m[2] == Approx(-0.205377).epsilon(1e-6));
  CHECK(moment_sequence(UnitMeasure::dirac(0.0), 3) == std::vector<double>{1, 0, 0, 0});
  CHECK(moment_sequence(UnitMeasure::dirac(1.0), 3) == std::vector<double>{1, 1, 1, 1});
}

TEST_CASE("moment_residual") {
  const LogPoissonParams& ref = sl_ref();
  const RhoEta re = rho_eta(pushforward_to_unit(LevyGenerator(ref), 3));
  CHECK(moment_residual(re.rho, re.A, ref.beta(3), 50) <= 1e-14);

  const double beta = ref.beta(3);
  const RhoEta split = rho_eta(pushforward_to_unit(perturbed_generator(ref, 3, Preset::Split, 0.05), 3));
  CHECK(split.A == Approx(re.A).epsilon(1e-12));
  const double res = moment_residual(split.rho, re.A, beta, 50);
  CHECK(res > 0.0);
  double direct = 0.0;
  for (int m = 0; m <= 50; ++m) {
    double mom = 0.0;
    for (const auto& a : split.rho.atoms) mom += a.w * std::pow(a.u, m);
    direct = std::max(direct, std::abs(mom - re.A * std::pow(beta, m)));
  }
  CHECK(res == Approx(direct).epsilon(1e-12).scale(1e-12));
  UnitMeasure empty;
  empty.kind = MeasureKind::Signed;
  CHECK(moment_residual(empty, -0.3, 0.5, 5) == Approx(0.3));
}

TEST_CASE("second_moment_test and mass_outside") {
  CHECK(second_moment_test(UnitMeasure::dirac(0.6, 0.4), 0.6) == 0.0);
  const double s = 0.1;
  CHECK(second_moment_test(two_atoms(0.5 - s, 0.5, 0.5 + s, 0.5), 0.5) == Approx(s * s).epsilon(1e-14));
  UnitMeasure uniform;
  const int n = 10000;
  for (int i = 0; i < n; ++i) uniform.atoms.push_back({(i + 0.5) / n, 1.0 / n});
  CHECK(second_moment_test(uniform, 0.5) == Approx(1.0 / 12.0).epsilon(1e-7));
  CHECK(mass_outside(two_atoms(0.4, 0.5, 0.6, 0.5), 0.5, 0.05) == Approx(1.0));
  CHECK(mass_outside(two_atoms(0.4, 0.5, 0.6, 0.5), 0.5, 0.2) == 0.0);
}

TEST_CASE("w1_unit") {
  CHECK(w1_unit(UnitMeasure::dirac(0.3), UnitMeasure::dirac(0.3)) == 0.0);
  CHECK(w1_unit(two_atoms(0.6, 0.5, 0.8, 0.5), UnitMeasure::dirac(0.7)) == Approx(0.1).epsilon(1e-14));
  CHECK(w1_unit(UnitMeasure::dirac(0.0), UnitMeasure::dirac(1.0)) == 1.0);
  CHECK_THROWS_AS(w1_unit(UnitMeasure::dirac(0.0, 1.0), UnitMeasure::dirac(1.0, 2.0)), DomainError);
}

TEST_CASE("stability_constant") {
  CHECK(stability_constant(2.0 / 3.0, 0.5, -0.462098120373297) == Approx(2.041241).epsilon(1e-6));
  CHECK(stability_constant(1e-300, 0.5, std::log(0.5)) == Approx(1.0).epsilon(1e-12));
  CHECK(stability_constant(0.5, std::exp(-1.0), -0.5) == Approx(2.121320).epsilon(1e-6));
  CHECK_THROWS_AS(stability_constant(0.5, 0.5, 0.0), DomainError);
}

TEST_CASE("verify_stability") {
  const LogPoissonParams& ref = sl_ref();
  const StabilityReport exact = verify_stability(LevyGenerator(ref), ref, 0.5, 3);
  CHECK(exact.epsilon <= 1e-15);
  CHECK(exact.w1_levy <= 1e-15);
  CHECK(exact.bound_ok);
  CHECK(exact.bigK == Approx(2.041241).epsilon(1e-6));

  const StabilityReport split = verify_stability(perturbed_generator(ref, 3, Preset::Split, 0.05), ref, 0.5, 3);
  CHECK(split.w1_levy == Approx(0.05).epsilon(1e-12));
  CHECK(split.bound_ok);
  CHECK(split.w1_levy <= split.bound());
  // The epsilon of the split family is lambda s^2 / |ln r| (constant in m).
  CHECK(split.epsilon == Approx(ref.lambda * 0.05 * 0.05 / std::log(2.0)).epsilon(1e-10));
  CHECK(split.eta_mass_minus_absA == Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(split.m_max == kDefaultStabilityMMax);

  for (Preset p : {Preset::Leak, Preset::Smear}) {
    const LevyGenerator g = perturbed_generator(ref, 3, p, 0.3 * max_strength(ref, 3, p));
    const StabilityReport rep = verify_stability(g, ref, 0.5, 3);
    CHECK(rep.epsilon > 0.0);
    CHECK(rep.bound_ok);
  }
}

TEST_CASE("stability sweep over decades") {
  const LogPoissonParams& ref = sl_ref();
  const std::vector<double> grid{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const StabilitySweep sw = stability_sweep(ref, 0.5, 3, Preset::Split, grid);
  REQUIRE(sw.rows.size() == grid.size());
  CHECK(sw.all_bounds_ok);
  CHECK(sw.loglog_slope == Approx(0.5).epsilon(0.05 / 0.5));
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(sw.rows[i].report.epsilon == Approx(grid[i]).epsilon(1e-6));
  for (Preset p : {Preset::Leak, Preset::Smear}) {
    const StabilitySweep s = stability_sweep(ref, 0.5, 3, p, {1e-3, 1e-4, 1e-5});
    CHECK(s.all_bounds_ok);
  }
  CHECK(preset_from_string(to_string(Preset::Smear)) == Preset::Smear);
  CHECK_THROWS_AS(preset_from_string("wobble"), ParseError);
}

TEST_CASE("empirical_w1_multipliers") {
  CHECK(empirical_w1_multipliers(LevyGenerator::deterministic(std::log(0.5)), LevyGenerator::deterministic(std::log(0.6)),
                                 10000, 1) == Approx(0.1).epsilon(1e-12));
  const LevyGenerator g(sl_ref());
  const std::size_t n = 10000;
  CHECK(empirical_w1_multipliers(g, g, n, 3) < 2.0 / std::sqrt(static_cast<double>(n)));
  const StabilitySweep sw = stability_sweep(sl_ref(), 0.5, 3, Preset::Split, {1e-2, 1e-3, 1e-4, 1e-5}, 20000, 5);
  for (std::size_t i = 1; i < sw.rows.size(); ++i)
    CHECK(*sw.rows[i].report.w1_multiplier < *sw.rows[i - 1].report.w1_multiplier);
  CHECK_THROWS_AS(empirical_w1_multipliers(g, g, 10, 3), DomainError);
}
