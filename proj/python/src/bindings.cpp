#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cascsym/cascade.hpp"
#include "cascsym/error.hpp"
#include "cascsym/exponents.hpp"
#include "cascsym/generators.hpp"
#include "cascsym/hausdorff.hpp"
#include "cascsym/io.hpp"
#include "cascsym/parallel.hpp"
#include "cascsym/spectrum.hpp"
#include "cascsym/symmetry.hpp"

namespace py = pybind11;
using namespace cascsym;

namespace {

// Structured results cross the boundary as plain dicts.
py::object to_py(const json& doc) { return py::module_::import("json").attr("loads")(doc.dump()); }

json from_py(const py::object& obj) {
  return json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

LevyGenerator as_generator(const py::object& obj) {
  if (py::isinstance<LevyGenerator>(obj)) return obj.cast<LevyGenerator>();
  if (py::isinstance<LogPoissonParams>(obj)) return LevyGenerator(obj.cast<LogPoissonParams>());
  return generator_from_json(from_py(obj));
}

json structure_to_json(const StructureTable& t) {
  json rows = json::array(), dropped = json::array();
  for (const auto& r : t.rows) rows.push_back({{"p", r.p}, {"n", r.n}, {"ln_S", r.ln_S}, {"se", r.se}});
  for (const auto& d : t.dropped) dropped.push_back({{"p", d.p}, {"n", d.n}, {"reason", d.reason}});
  return {{"r", t.r}, {"n_samples", t.n_samples}, {"seed", t.seed}, {"rows", rows}, {"dropped", dropped}};
}

json zeta_to_json(const ZetaEstimate& z) {
  json rows = json::array();
  for (const auto& r : z.rows) rows.push_back({{"p", r.p}, {"zeta_hat", r.zeta_hat}, {"se", r.se}});
  return {{"rows", rows}, {"warnings", z.warnings}};
}

ZetaEstimate zeta_from_py(const py::object& obj) {
  const json doc = from_py(obj);
  ZetaEstimate z;
  for (const auto& r : doc.at("rows")) z.rows.push_back({r.at("p"), r.at("zeta_hat"), r.value("se", 0.0)});
  return z;
}

DeltaSeries series_from(const std::vector<double>& deltas, int k, const std::optional<std::vector<double>>& se) {
  DeltaSeries s = DeltaSeries::from_values(k, deltas);
  s.stderr_ = se;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hierarchical-symmetry toolkit for multiplicative cascades";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<ScalingLaw>(m, "ScalingLaw")
      .def(py::init([](double gamma, double bigC, double beta, int k) {
             ScalingLaw l{gamma, bigC, beta, k};
             l.validate();
             return l;
           }),
           py::arg("gamma"), py::arg("bigC"), py::arg("beta"), py::arg("k"))
      .def_readwrite("gamma", &ScalingLaw::gamma)
      .def_readwrite("bigC", &ScalingLaw::bigC)
      .def_readwrite("beta", &ScalingLaw::beta)
      .def_readwrite("k", &ScalingLaw::k)
      .def_property_readonly("delta_inf", &ScalingLaw::delta_inf)
      .def_property_readonly("delta0", &ScalingLaw::delta0)
      .def("__eq__", [](const ScalingLaw& a, const ScalingLaw& b) { return a == b; })
      .def("__repr__", [](const ScalingLaw& l) {
        return "ScalingLaw(gamma=" + format_double(l.gamma) + ", bigC=" + format_double(l.bigC) +
               ", beta=" + format_double(l.beta) + ", k=" + std::to_string(l.k) + ")";
      });

  py::class_<LogPoissonParams>(m, "LogPoissonParams")
      .def(py::init([](double a, double b, double lambda) {
             LogPoissonParams p{a, b, lambda};
             p.validate();
             return p;
           }),
           py::arg("a"), py::arg("b"), py::arg("lam"))
      .def_readwrite("a", &LogPoissonParams::a)
      .def_readwrite("b", &LogPoissonParams::b)
      .def_readwrite("lam", &LogPoissonParams::lambda)
      .def("beta", &LogPoissonParams::beta, py::arg("k"))
      .def("__eq__", [](const LogPoissonParams& x, const LogPoissonParams& y) { return x == y; })
      .def("__repr__", [](const LogPoissonParams& p) {
        return "LogPoissonParams(a=" + format_double(p.a) + ", b=" + format_double(p.b) +
               ", lam=" + format_double(p.lambda) + ")";
      });

  py::class_<LevyGenerator>(m, "LevyGenerator")
      .def(py::init<const LogPoissonParams&>())
      .def_static("deterministic", &LevyGenerator::deterministic, py::arg("drift"))
      .def_static("log_normal", &LevyGenerator::log_normal, py::arg("drift"), py::arg("sigma2"))
      .def_static("from_dict", [](const py::object& d) { return generator_from_json(from_py(d)); })
      .def("to_dict", [](const LevyGenerator& g) { return to_py(generator_to_json(g)); })
      .def_property_readonly("kind", &LevyGenerator::kind)
      .def_readonly("drift", &LevyGenerator::drift)
      .def_readonly("sigma2", &LevyGenerator::sigma2)
      .def("__repr__", [](const LevyGenerator& g) { return "LevyGenerator(" + generator_to_json(g).dump() + ")"; });
  py::implicitly_convertible<LogPoissonParams, LevyGenerator>();

  // Exponent algebra
  m.def("zeta", &zeta, py::arg("law"), py::arg("p"));
  m.def("delta", &delta, py::arg("law"), py::arg("p"));
  m.def("a1_step", &a1_step, py::arg("delta_p"), py::arg("beta"), py::arg("delta_inf"));
  m.def("law_from_deltas", &law_from_deltas, py::arg("delta0"), py::arg("delta_inf"), py::arg("beta"), py::arg("k"));
  m.def("conservation_gamma", &conservation_gamma, py::arg("bigC"), py::arg("beta"), py::arg("k"), py::arg("z0"),
        py::arg("k0"));
  m.def("spectrum_width", &spectrum_width, py::arg("law"));
  m.def("parse_number", &parse_number, py::arg("text"));

  // Generators
  m.def("logpoisson_from_scaling", &logpoisson_from_scaling, py::arg("law"), py::arg("r"));
  m.def("ln_moment", [](const py::object& g, double p) { return ln_moment(as_generator(g), p); }, py::arg("gen"),
        py::arg("p"));
  m.def("normalize_mean_one", [](const py::object& g) { return normalize_mean_one(as_generator(g)); }, py::arg("gen"));
  m.def(
      "delta_series_analytic",
      [](const py::object& g, double r, int k, int m_max) { return delta_series_analytic(as_generator(g), r, k, m_max).values(); },
      py::arg("gen"), py::arg("r"), py::arg("k"), py::arg("m_max"));
  m.def(
      "sample_logW",
      [](const py::object& g, std::size_t count, std::uint64_t seed) {
        const LevyGenerator gen = as_generator(g);
        py::gil_scoped_release release;
        return sample_logW(gen, count, seed);
      },
      py::arg("gen"), py::arg("count"), py::arg("seed"));
  m.def(
      "determinacy",
      [](const py::object& g, int P, double threshold) {
        const DeterminacyResult r = determinacy_verdict(as_generator(g), P, threshold);
        return to_py({{"verdict", to_string(r.verdict)},
                      {"sum", r.carleman.sum},
                      {"terms", r.carleman.terms},
                      {"tail_min", r.tail_min},
                      {"tail_ratio", r.tail_ratio},
                      {"tail_r2", r.tail_r2}});
      },
      py::arg("gen"), py::arg("P") = 200, py::arg("threshold") = 1e-3);

  // Cascade pipeline
  m.def(
      "simulate",
      [](const py::object& g, double r, int k, int n_levels, std::size_t n_samples, std::uint64_t seed,
         std::optional<std::vector<double>> p_list) {
        SimConfig c;
        c.params.r = r;
        c.params.k = k;
        c.n_levels = n_levels;
        c.n_samples = n_samples;
        c.seed = seed;
        c.p_list = p_list ? *p_list : default_p_list(k);
        const LevyGenerator gen = as_generator(g);
        StructureTable t;
        {
          py::gil_scoped_release release;
          t = simulate(c, gen);
        }
        return to_py(structure_to_json(t));
      },
      py::arg("gen"), py::arg("r"), py::arg("k"), py::arg("n_levels") = 8, py::arg("n_samples") = 100000,
      py::arg("seed") = 0, py::arg("p_list") = py::none());
  m.def(
      "estimate_zeta",
      [](const py::object& table) {
        const json doc = from_py(table);
        StructureTable t;
        t.r = doc.at("r");
        for (const auto& row : doc.at("rows")) t.rows.push_back({row.at("p"), row.at("n"), row.at("ln_S"), row.at("se")});
        for (const auto& row : doc.value("dropped", json::array()))
          t.dropped.push_back({row.at("p"), row.at("n"), row.value("reason", "")});
        return to_py(zeta_to_json(estimate_zeta(t)));
      },
      py::arg("table"));
  m.def(
      "estimate_deltas",
      [](const py::object& zeta_est, int k) {
        const DeltaSeries s = estimate_deltas(zeta_from_py(zeta_est), k);
        return to_py({{"delta", s.values()}, {"se", s.stderr_ ? json(*s.stderr_) : json(nullptr)}});
      },
      py::arg("zeta"), py::arg("k"));

  // Symmetry
  m.def(
      "classify",
      [](const std::vector<double>& deltas, int k, std::optional<double> tol, std::optional<std::vector<double>> se) {
        const DeltaSeries s = series_from(deltas, k, se);
        return to_py(a1_report_to_json(tol ? classify(s, *tol) : classify(s)));
      },
      py::arg("deltas"), py::arg("k"), py::arg("tol") = py::none(), py::arg("se") = py::none());
  m.def(
      "characterize",
      [](const std::vector<double>& deltas, double r, int k, std::optional<double> tol,
         std::optional<std::vector<double>> se) {
        const DeltaSeries s = series_from(deltas, k, se);
        return to_py(a1_report_to_json(tol ? characterize(s, r, k, *tol) : characterize(s, r, k)));
      },
      py::arg("deltas"), py::arg("r"), py::arg("k"), py::arg("tol") = py::none(), py::arg("se") = py::none());

  // Stability
  m.def("stability_constant", &stability_constant, py::arg("beta"), py::arg("r"), py::arg("A"));
  m.def(
      "verify_stability",
      [](const py::object& g, const LogPoissonParams& ref, double r, int k, int m_max) {
        return to_py(stability_report_to_json(verify_stability(as_generator(g), ref, r, k, m_max)));
      },
      py::arg("gen"), py::arg("ref"), py::arg("r"), py::arg("k"), py::arg("m_max") = kDefaultStabilityMMax);
  m.def(
      "perturbed_generator",
      [](const LogPoissonParams& ref, int k, const std::string& preset, double strength) {
        return perturbed_generator(ref, k, preset_from_string(preset), strength);
      },
      py::arg("ref"), py::arg("k"), py::arg("preset"), py::arg("strength"));
  m.def(
      "stability_sweep",
      [](const LogPoissonParams& ref, double r, int k, const std::vector<double>& eps_grid, const std::string& preset,
         std::size_t n_samples, std::uint64_t seed, int m_max) {
        const Preset p = preset_from_string(preset);
        StabilitySweep sw;
        {
          py::gil_scoped_release release;
          sw = stability_sweep(ref, r, k, p, eps_grid, n_samples, seed, m_max);
        }
        json rows = json::array();
        for (const auto& row : sw.rows) {
          json j = stability_report_to_json(row.report);
          j["epsilon_target"] = row.epsilon_target;
          j["strength"] = row.strength;
          rows.push_back(j);
        }
        return to_py({{"rows", rows}, {"loglog_slope", sw.loglog_slope}, {"all_bounds_ok", sw.all_bounds_ok}});
      },
      py::arg("ref"), py::arg("r"), py::arg("k"), py::arg("eps_grid"), py::arg("preset") = "split",
      py::arg("n_samples") = 0, py::arg("seed") = 0, py::arg("m_max") = kDefaultStabilityMMax);

  // Spectrum
  m.def("f_closed", &f_closed, py::arg("law"), py::arg("d"), py::arg("h"));
  m.def(
      "f_legendre",
      [](const ScalingLaw& law, double d, double h, std::optional<double> p_max, int grid) {
        return f_legendre(law, d, h, p_max ? *p_max : default_p_max(law), grid);
      },
      py::arg("law"), py::arg("d"), py::arg("h"), py::arg("p_max") = py::none(), py::arg("grid") = 10000);
  m.def(
      "spectrum_curve",
      [](const ScalingLaw& law, double d, int n) {
        const SpectrumCurve c = spectrum_curve(law, d, n);
        std::vector<double> h, f;
        for (const auto& pt : c.points) {
          h.push_back(pt.h);
          f.push_back(pt.f);
        }
        return py::make_tuple(h, f);
      },
      py::arg("law"), py::arg("d"), py::arg("n_points"));

  m.def("set_max_threads", &set_max_threads, py::arg("n"));
  m.def("max_threads", &max_threads);
}
