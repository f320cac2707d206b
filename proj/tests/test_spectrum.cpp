#include <cmath>
#include <random>

#include "doctest.h"

#include "cascsym/error.hpp"
#include "cascsym/exponents.hpp"
#include "cascsym/spectrum.hpp"

using namespace cascsym;
using doctest::Approx;

namespace {
const ScalingLaw kSL{1.0 / 9.0, 2.0, 2.0 / 3.0, 3};
}

TEST_CASE("f_closed reference values") {
  const double hmax = kSL.gamma + spectrum_width(kSL);
  CHECK(hmax == Approx(0.381421).epsilon(1e-6));
  CHECK(f_closed(kSL, 3.0, hmax) == 3.0);
  CHECK(f_closed(kSL, 3.0, kSL.gamma) == Approx(1.0).epsilon(1e-15));
  CHECK(f_closed(kSL, 3.0, kSL.gamma + 1e-12) == Approx(1.0).epsilon(1e-9));
  const double h23 = kSL.gamma + 2.0 / 3.0 * spectrum_width(kSL);  // x = 2/3
  CHECK(h23 == Approx(0.29131).epsilon(1e-4));
  CHECK(f_closed(kSL, 3.0, h23) == Approx(2.873953).epsilon(1e-6));
  CHECK_THROWS_AS(f_closed(kSL, 3.0, hmax + 0.01), DomainError);
  CHECK_THROWS_AS(f_closed(kSL, 3.0, kSL.gamma - 0.01), DomainError);
  CHECK_THROWS_AS(f_closed(ScalingLaw{0.1, 0.0, 0.5, 1}, 3.0, 0.1), DomainError);
}

TEST_CASE("f_legendre reference values") {
  const double pmax = default_p_max(kSL);
  CHECK(std::pow(kSL.beta, pmax / kSL.k) < 1e-8);
  CHECK(f_legendre(kSL, 3.0, kSL.gamma + 2.0 / 3.0 * spectrum_width(kSL), pmax) == Approx(2.873953).epsilon(1e-6));
  CHECK(f_legendre(kSL, 3.0, kSL.gamma + spectrum_width(kSL), pmax) == Approx(3.0).epsilon(1e-12));
  const double near = f_legendre(kSL, 3.0, kSL.gamma + 1e-4, pmax);
  CHECK(near > 1.0);
  CHECK(near < 1.01);
  CHECK_THROWS_AS(f_legendre(kSL, 3.0, 0.2, 3.0), DomainError);
}

TEST_CASE("property: closed form and Legendre transform agree") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> g(-0.3, 0.5), c(0.2, 3.0), b(0.1, 0.9), u(0.01, 0.99);
  for (int i = 0; i < 10; ++i) {
    const ScalingLaw law{g(rng), c(rng), b(rng), 1 + i % 3};
    const double pmax = default_p_max(law);
    for (int j = 0; j < 10; ++j) {
      const double h = law.gamma + u(rng) * spectrum_width(law);
      CHECK(f_closed(law, 2.0, h) == Approx(f_legendre(law, 2.0, h, pmax)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("spectrum_curve") {
  const SpectrumCurve c3 = spectrum_curve(kSL, 3.0, 3);
  REQUIRE(c3.points.size() == 3);
  CHECK(c3.points[0].h == Approx(0.111111).epsilon(1e-6));
  CHECK(c3.points[0].f == Approx(1.0));
  CHECK(c3.points[2].h == Approx(0.381421).epsilon(1e-6));
  CHECK(c3.points[2].f == 3.0);
  CHECK(c3.h_max() - c3.h_min() == Approx(spectrum_width(kSL)).epsilon(1e-12));
  CHECK_FALSE(c3.has_negative_f);
  CHECK(spectrum_curve(kSL, 3.0, 2).points.size() == 2);
  // f is concave and increasing on [h_min, h_max].
  const SpectrumCurve c = spectrum_curve(kSL, 3.0, 50);
  for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].f > c.points[i - 1].f);
  CHECK(spectrum_curve(ScalingLaw{0.1, 3.0, 0.5, 1}, 1.0, 5).has_negative_f);
  CHECK_THROWS_AS(spectrum_curve(ScalingLaw{0.1, 0.0, 0.5, 1}, 3.0, 5), DomainError);
  CHECK_THROWS_AS(spectrum_curve(kSL, 3.0, 1), DomainError);
}
