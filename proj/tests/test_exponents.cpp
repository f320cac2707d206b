#include <cmath>
#include <random>

#include "doctest.h"

#include "cascsym/error.hpp"
#include "cascsym/exponents.hpp"

using namespace cascsym;
using doctest::Approx;

namespace {
const ScalingLaw kSL{1.0 / 9.0, 2.0, 2.0 / 3.0, 3};
}

TEST_CASE("zeta reference values") {
  CHECK(zeta(kSL, 0.0) == 0.0);
  CHECK(zeta(kSL, 3.0) == Approx(1.0).epsilon(1e-15));
  CHECK(zeta(kSL, 2.0) == Approx(0.695936).epsilon(1e-6));
  CHECK(zeta(kSL, 6.0) == Approx(1.777778).epsilon(1e-6));
}

TEST_CASE("delta reference values") {
  CHECK(delta(kSL, 0.0) == Approx(1.0).epsilon(1e-14));
  CHECK(delta(kSL, 3.0) == Approx(0.777778).epsilon(1e-6));
  CHECK(delta(kSL, 3000.0) == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(delta(kSL, 3.0) == Approx(zeta(kSL, 6.0) - zeta(kSL, 3.0)).epsilon(1e-14));
}

TEST_CASE("a1_step") {
  CHECK(a1_step(1.0, 2.0 / 3.0, 1.0 / 3.0) == Approx(0.777778).epsilon(1e-6));
  CHECK(a1_step(0.777778, 2.0 / 3.0, 1.0 / 3.0) == Approx(0.629630).epsilon(1e-6));
  CHECK(a1_step(0.4, 0.3, 0.4) == Approx(0.4).epsilon(1e-15));
  CHECK(a1_step(0.4, 0.9, 0.4) == Approx(0.4).epsilon(1e-15));
}

TEST_CASE("law_from_deltas") {
  const ScalingLaw sl = law_from_deltas(1.0, 1.0 / 3.0, 2.0 / 3.0, 3);
  CHECK(sl.gamma == Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(sl.bigC == Approx(2.0).epsilon(1e-14));
  const ScalingLaw mono = law_from_deltas(0.5, 0.5, 0.5, 1);
  CHECK(mono.gamma == 0.5);
  CHECK(mono.bigC == 0.0);
  const ScalingLaw l = law_from_deltas(0.9, 0.3, 0.4, 2);
  CHECK(l.gamma == Approx(0.15).epsilon(1e-14));
  CHECK(l.bigC == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(law_from_deltas(0.2, 0.3, 0.4, 2), DomainError);
  CHECK_THROWS_AS(law_from_deltas(0.9, 0.3, 1.0, 2), DomainError);
}

TEST_CASE("conservation_gamma") {
  CHECK(conservation_gamma(2.0, 2.0 / 3.0, 3, 1.0, 3.0) == Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(conservation_gamma(2.0, 2.0 / 3.0, 3, 0.0, 1.0) == Approx(-0.252839).epsilon(1e-6));
  CHECK(conservation_gamma(0.0, 0.3, 2, 0.0, 1.0) == 0.0);
  const ScalingLaw l{conservation_gamma(2.0, 2.0 / 3.0, 3, 0.0, 1.0), 2.0, 2.0 / 3.0, 3};
  CHECK(std::abs(zeta(l, 1.0)) < 1e-15);
}

TEST_CASE("spectrum_width") {
  CHECK(spectrum_width(kSL) == Approx(0.270310).epsilon(1e-6));
  CHECK(spectrum_width(ScalingLaw{0.2, 0.0, 0.5, 1}) == 0.0);
  CHECK(spectrum_width(ScalingLaw{0.0, 1.0, std::exp(-1.0), 1}) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(zeta(ScalingLaw{0.1, 1.0, 1.0, 1}, 1.0), DomainError);
  CHECK_THROWS_AS(zeta(ScalingLaw{0.1, 1.0, 0.0, 1}, 1.0), DomainError);
  CHECK_THROWS_AS(zeta(ScalingLaw{0.1, -1.0, 0.5, 1}, 1.0), DomainError);
  CHECK_THROWS_AS(zeta(ScalingLaw{0.1, 1.0, 0.5, 0}, 1.0), DomainError);
  CHECK_THROWS_AS(zeta(kSL, -1.0), DomainError);
  CHECK_THROWS_AS(zeta(kSL, NAN), DomainError);
}

TEST_CASE("DeltaSeries from_values and validation") {
  const DeltaSeries s = DeltaSeries::from_values(3, {1.0, 0.5, 0.25});
  CHECK(s.size() == 3);
  CHECK(s.entries[2].m == 2);
  CHECK(s.values() == std::vector<double>{1.0, 0.5, 0.25});
  DeltaSeries gap = s;
  gap.entries[1].m = 5;
  CHECK_THROWS_AS(gap.validate(), DomainError);
}

TEST_CASE("property: recurrence iterates agree with the closed form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> g(-1.0, 1.0), c(0.0, 4.0), b(0.01, 0.99);
  std::uniform_int_distribution<int> kk(1, 6);
  for (int i = 0; i < 300; ++i) {
    const ScalingLaw law{g(rng), c(rng), b(rng), kk(rng)};
    double d = delta(law, 0.0);
    for (int m = 0; m < 40; ++m) {
      CHECK(d == Approx(delta(law, m * law.k)).epsilon(1e-12).scale(1.0));
      d = a1_step(d, law.beta, law.delta_inf());
    }
    // zeta is concave, starts at 0, and delta_p = zeta_{p+k} - zeta_p.
    const double p = 0.37 * law.k;
    CHECK(delta(law, p) == Approx(zeta(law, p + law.k) - zeta(law, p)).epsilon(1e-12).scale(1.0));
    CHECK(zeta(law, 1.0) + zeta(law, 3.0) <= 2.0 * zeta(law, 2.0) + 1e-12);
  }
}

TEST_CASE("property: law_from_deltas inverts delta0 / delta_inf") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> g(-1.0, 1.0), c(0.0, 4.0), b(0.01, 0.99);
  std::uniform_int_distribution<int> kk(1, 6);
  for (int i = 0; i < 200; ++i) {
    const ScalingLaw law{g(rng), c(rng), b(rng), kk(rng)};
    const ScalingLaw back = law_from_deltas(law.delta0(), law.delta_inf(), law.beta, law.k);
    CHECK(back.gamma == Approx(law.gamma).epsilon(1e-12).scale(1.0));
    CHECK(back.bigC == Approx(law.bigC).epsilon(1e-12).scale(1.0));
  }
}
