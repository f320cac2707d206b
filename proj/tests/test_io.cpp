#include <cmath>
#include <sstream>

#include "doctest.h"

#include "cascsym/cascade.hpp"
#include "cascsym/error.hpp"
#include "cascsym/exponents.hpp"
#include "cascsym/generators.hpp"
#include "cascsym/hausdorff.hpp"
#include "cascsym/io.hpp"
#include "cascsym/spectrum.hpp"
#include "cascsym/symmetry.hpp"

using namespace cascsym;
using doctest::Approx;

namespace {
const ScalingLaw kSL{1.0 / 9.0, 2.0, 2.0 / 3.0, 3};

std::string parse_error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_zeta_csv(in);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("parse_number accepts decimals and exact rationals") {
  CHECK(parse_number("2/3") == 2.0 / 3.0);
  CHECK(parse_number(" 1/9 ") == 1.0 / 9.0);
  CHECK(parse_number("-1/2") == -0.5);
  CHECK(parse_number("1e-3") == 1e-3);
  CHECK(parse_number("0.6667") == 0.6667);
  CHECK_THROWS_AS(parse_number("abc"), ParseError);
  CHECK_THROWS_AS(parse_number("1/0"), ParseError);
  CHECK_THROWS_AS(parse_number("1/2/3"), ParseError);
  CHECK_THROWS_AS(parse_number(""), ParseError);
}

TEST_CASE("format_double round trips") {
  for (double v : {1.0 / 3.0, -0.077016353395549, 1e-300, 6.02e23, 0.0})
    CHECK(parse_number(format_double(v)) == v);
}

TEST_CASE("generator JSON round trips") {
  const std::vector<LevyGenerator> gens{
      LevyGenerator(logpoisson_from_scaling(kSL, 0.5)),
      LevyGenerator::log_normal(-0.1, 0.2),
      LevyGenerator::log_stable(0.01, StableTail{0.5, 0.1, 1e-8, 10.0}),
      LevyGenerator::deterministic(-0.3),
  };
  for (const auto& g : gens) {
    const json doc = generator_to_json(g);
    CHECK(generator_from_json(json::parse(doc.dump())) == g);
  }
  LevyGenerator atomic;
  atomic.drift = 0.2;
  atomic.atoms = {{-0.5, 1.0}, {-1.0, 0.3}};
  CHECK(generator_to_json(atomic)["kind"] == "atomic");
  CHECK(generator_from_json(generator_to_json(atomic)) == atomic);
  CHECK_THROWS_AS(generator_from_json(json{{"kind", "mystery"}}), ParseError);
  CHECK_THROWS_AS(generator_from_json(json{{"kind", "log-normal"}, {"drift", 0.0}}), ParseError);
  CHECK(law_from_json(law_to_json(kSL)) == kSL);
}

TEST_CASE("A1 report JSON round trips") {
  const A1Report rep = characterize(delta_series_analytic(LevyGenerator(logpoisson_from_scaling(kSL, 0.5)), 0.5, 3, 10), 0.5, 3);
  const json doc = a1_report_to_json(rep);
  CHECK(doc["schema"] == kA1ReportSchema);
  CHECK(doc["verdict"] == "a1-holds");
  const A1Report back = a1_report_from_json(json::parse(doc.dump()));
  CHECK(back.fit.beta_hat == rep.fit.beta_hat);
  CHECK(back.fit.epsilon_hat == rep.fit.epsilon_hat);
  CHECK(back.logpoisson == rep.logpoisson);
  CHECK(back.law == rep.law);
  CHECK(back.series_digest == rep.series_digest);

  const A1Report mono = classify(DeltaSeries::from_values(1, std::vector<double>(6, 0.4)));
  const json mdoc = a1_report_to_json(mono);
  CHECK(mdoc["verdict"] == "monofractal");
  CHECK(std::isnan(a1_report_from_json(json::parse(mdoc.dump())).fit.beta_hat));
}

TEST_CASE("stability report JSON round trips") {
  const LogPoissonParams ref = logpoisson_from_scaling(kSL, 0.5);
  StabilityReport rep = verify_stability(perturbed_generator(ref, 3, Preset::Split, 0.05), ref, 0.5, 3);
  rep.w1_multiplier = 0.0123;
  const json doc = stability_report_to_json(rep);
  CHECK(doc["schema"] == kStabilitySchema);
  const StabilityReport back = stability_report_from_json(json::parse(doc.dump()));
  CHECK(back.epsilon == rep.epsilon);
  CHECK(back.w1_levy == rep.w1_levy);
  CHECK(back.w1_multiplier == rep.w1_multiplier);
  CHECK(back.bound_ok == rep.bound_ok);
}

TEST_CASE("CSV files round trip exactly") {
  SimConfig c;
  c.params.r = 0.5;
  c.params.k = 3;
  c.n_samples = 2000;
  c.n_levels = 5;
  c.seed = 77;
  c.p_list = {0.0, 1.0, 3.0, 6.0};
  const StructureTable t = simulate(c, LevyGenerator(logpoisson_from_scaling(kSL, 0.5)));
  std::stringstream st;
  write_structure_csv(st, t, json{{"note", "x"}});
  const std::string text = st.str();
  CHECK(text.rfind("# {", 0) == 0);
  CHECK(text.find("\np,n,ln_S,se\n") != std::string::npos);
  std::istringstream st_in(text);
  CHECK(read_structure_csv(st_in) == t);
  std::istringstream meta_in(text);
  const json meta = read_metadata(meta_in);
  CHECK(meta["note"] == "x");
  CHECK(meta["seed"] == 77);

  const ZetaEstimate z = estimate_zeta(t);
  std::stringstream zs;
  write_zeta_csv(zs, z);
  const ZetaEstimate zb = read_zeta_csv(zs);
  REQUIRE(zb.rows.size() == z.rows.size());
  for (std::size_t i = 0; i < z.rows.size(); ++i) {
    CHECK(zb.rows[i].p == z.rows[i].p);
    CHECK(zb.rows[i].zeta_hat == z.rows[i].zeta_hat);
    CHECK(zb.rows[i].se == z.rows[i].se);
  }

  const SpectrumCurve curve = spectrum_curve(kSL, 3.0, 11);
  std::stringstream ss;
  write_spectrum_csv(ss, curve);
  const SpectrumCurve cb = read_spectrum_csv(ss);
  REQUIRE(cb.points.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) CHECK(cb.points[i].f == curve.points[i].f);
  CHECK(cb.law == kSL);

  const StabilitySweep sw = stability_sweep(logpoisson_from_scaling(kSL, 0.5), 0.5, 3, Preset::Split, {1e-2, 1e-3});
  std::stringstream ws;
  write_sweep_csv(ws, sw);
  const StabilitySweep wb = read_sweep_csv(ws);
  REQUIRE(wb.rows.size() == 2);
  CHECK(wb.rows[1].report.w1_levy == sw.rows[1].report.w1_levy);
  CHECK_FALSE(wb.rows[1].report.w1_multiplier.has_value());
  CHECK(wb.loglog_slope == sw.loglog_slope);
}

TEST_CASE("malformed CSV errors name the row and column") {
  const std::string head = "# {\"format\":\"zeta-estimate\"}\np,zeta_hat,se\n";
  const std::string bad_cell = parse_error_of(head + "0,0,0\n3,abc,0.1\n");
  CHECK(bad_cell.find("line 4") != std::string::npos);
  CHECK(bad_cell.find("zeta_hat") != std::string::npos);
  CHECK(parse_error_of(head + "3,1\n").find("line 3") != std::string::npos);
  CHECK(parse_error_of("p,wrong,se\n").find("header") != std::string::npos);
  CHECK(parse_error_of("# {not json\np,zeta_hat,se\n").find("line 1") != std::string::npos);
  CHECK_FALSE(parse_error_of("").empty());
}
