// cascsym: command-line front end.
//
//   cascsym simulate        Monte Carlo structure functions + zeta estimates (CSV)
//   cascsym analyze         A1 report (JSON) from a zeta CSV
//   cascsym spectrum        singularity spectrum f(h) (CSV)
//   cascsym stability       epsilon sweep of the Wasserstein bound (CSV)
//   cascsym classify-family verdict table for the principal generator families (CSV)
//   cascsym determinacy     Carleman sum and determinacy verdict (JSON)
//
// Exit codes: 0 ok, 1 computation error, 2 usage error. Errors are written to
// stderr as a one-line JSON object.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cascsym/cascade.hpp"
#include "cascsym/error.hpp"
#include "cascsym/exponents.hpp"
#include "cascsym/generators.hpp"
#include "cascsym/hausdorff.hpp"
#include "cascsym/io.hpp"
#include "cascsym/parallel.hpp"
#include "cascsym/spectrum.hpp"
#include "cascsym/symmetry.hpp"

using namespace cascsym;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric flags are read as text so that exact rationals like 2/3 are accepted.
class NumericFlags {
 public:
  void add(CLI::App* app, const std::string& name, const std::string& key, std::string default_text,
           const std::string& help, bool required = false) {
    auto& slot = text_[key];
    slot = std::move(default_text);
    auto* opt = app->add_option(name, slot, help);
    if (required) opt->required();
    if (!slot.empty()) opt->capture_default_str();
  }

  bool given(const std::string& key) const { return !text_.at(key).empty(); }

  double get(const std::string& key) const {
    const std::string& t = text_.at(key);
    if (t.empty()) throw UsageError("missing value for --" + key);
    try {
      return parse_number(t);
    } catch (const ParseError& e) {
      throw UsageError("--" + key + ": " + e.what());
    }
  }

 private:
  std::map<std::string, std::string> text_;
};

int as_int(double v, const std::string& key) {
  if (v != std::floor(v) || std::abs(v) > 2e9) throw UsageError("--" + key + " must be an integer");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(parse_number(item));
    } catch (const ParseError& e) {
      throw UsageError("--" + key + ": " + e.what());
    }
  }
  return out;
}

// "1e-1:1e-6" expands to the decades 1e-1, 1e-2, ..., 1e-6; otherwise a comma list.
std::vector<double> parse_eps_grid(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return parse_list(text, "eps-grid");
  double hi = 0, lo = 0;
  try {
    hi = parse_number(text.substr(0, colon));
    lo = parse_number(text.substr(colon + 1));
  } catch (const ParseError& e) {
    throw UsageError(std::string("--eps-grid: ") + e.what());
  }
  if (!(hi > 0 && lo > 0)) throw UsageError("--eps-grid bounds must be positive");
  if (hi < lo) std::swap(hi, lo);
  const int decades = static_cast<int>(std::lround(std::log10(hi / lo)));
  std::vector<double> out;
  for (int i = 0; i <= decades; ++i) out.push_back(hi * std::pow(10.0, -i));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json base_meta(const std::string& command, const json& config) {
  return {{"command", command}, {"config", config}};
}

// ---------------------------------------------------------------------------
// Shared generator flags

struct GeneratorFlags {
  std::string kind = "log-poisson";
  std::string json_path;
};

void add_law_flags(CLI::App* cmd, NumericFlags& nf, bool sl_defaults) {
  nf.add(cmd, "--r", "r", sl_defaults ? "1/2" : "", "scale ratio in (0,1)");
  nf.add(cmd, "--k", "k", sl_defaults ? "3" : "", "hierarchy step");
  nf.add(cmd, "--beta", "beta", sl_defaults ? "2/3" : "", "contraction ratio in (0,1)");
  nf.add(cmd, "--bigC", "bigC", sl_defaults ? "2" : "", "concentration amplitude C");
  nf.add(cmd, "--gamma", "gamma", sl_defaults ? "1/9" : "",
         "drift exponent; defaults to the mean-one value when omitted");
}

ScalingLaw law_from_flags(const NumericFlags& nf) {
  const double bigC = nf.get("bigC");
  const double beta = nf.get("beta");
  const int k = as_int(nf.get("k"), "k");
  const double gamma = nf.given("gamma") ? nf.get("gamma") : conservation_gamma(bigC, beta, k, 0.0, 1.0);
  ScalingLaw law{gamma, bigC, beta, k};
  law.validate();
  return law;
}

LevyGenerator generator_from_flags(const GeneratorFlags& gf, const NumericFlags& nf, json& config) {
  if (!gf.json_path.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(gf.json_path));
    } catch (const json::exception& e) {
      throw ParseError(gf.json_path + ": " + e.what());
    }
    config["generator"] = doc;
    return generator_from_json(doc);
  }
  LevyGenerator gen;
  if (gf.kind == "log-poisson") {
    const ScalingLaw law = law_from_flags(nf);
    config["law"] = law_to_json(law);
    gen = LevyGenerator(logpoisson_from_scaling(law, nf.get("r")));
  } else if (gf.kind == "log-normal") {
    const double sigma2 = nf.get("sigma2");
    gen = LevyGenerator::log_normal(nf.given("drift") ? nf.get("drift") : -0.5 * sigma2, sigma2);
  } else if (gf.kind == "deterministic") {
    gen = LevyGenerator::deterministic(nf.get("drift"));
  } else {
    throw UsageError("--gen must be log-poisson, log-normal or deterministic (or use --gen-json)");
  }
  config["generator"] = generator_to_json(gen);
  return gen;
}

void add_generator_flags(CLI::App* cmd, GeneratorFlags& gf, NumericFlags& nf) {
  cmd->add_option("--gen", gf.kind, "generator family: log-poisson, log-normal, deterministic")
      ->capture_default_str();
  cmd->add_option("--gen-json", gf.json_path, "generator document (JSON); overrides --gen");
  nf.add(cmd, "--sigma2", "sigma2", "", "log-normal variance");
  nf.add(cmd, "--drift", "drift", "", "drift of log W (log-normal defaults to the mean-one value)");
}

// ---------------------------------------------------------------------------
// Commands

int run_simulate(const GeneratorFlags& gf, const NumericFlags& nf, const std::string& p_list,
                 const std::string& out_table, const std::string& out_zeta) {
  json config;
  SimConfig sc;
  sc.params.r = nf.get("r");
  sc.params.k = as_int(nf.get("k"), "k");
  sc.n_levels = as_int(nf.get("levels"), "levels");
  const double samples = nf.get("samples");
  if (samples < 1 || samples != std::floor(samples)) throw UsageError("--samples must be a positive integer");
  sc.n_samples = static_cast<std::size_t>(samples);
  const double seed = nf.get("seed");
  if (seed < 0 || seed != std::floor(seed)) throw UsageError("--seed must be a non-negative integer");
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.p_list = p_list.empty() ? default_p_list(sc.params.k) : parse_list(p_list, "p-list");
  const LevyGenerator gen = generator_from_flags(gf, nf, config);

  config["r"] = sc.params.r;
  config["k"] = sc.params.k;
  config["levels"] = sc.n_levels;
  config["samples"] = sc.n_samples;
  config["seed"] = sc.seed;
  config["p_list"] = sc.p_list;

  const StructureTable table = simulate(sc, gen);
  const ZetaEstimate est = estimate_zeta(table);
  json meta = base_meta("simulate", config);
  meta["seed"] = sc.seed;

  std::ostringstream t, z;
  write_structure_csv(t, table, meta);
  write_zeta_csv(z, est, meta);
  write_text(out_table, t.str());
  write_text(out_zeta, z.str());
  json summary{{"structure_csv", out_table}, {"zeta_csv", out_zeta}, {"rows", table.rows.size()},
               {"dropped_rows", table.dropped.size()}, {"warnings", est.warnings}};
  if (out_table != "-" && out_zeta != "-") std::cout << summary.dump() << "\n";
  return 0;
}

int run_analyze(const std::string& zeta_csv, const NumericFlags& nf, const std::string& out) {
  const double r = nf.get("r");
  const int k = as_int(nf.get("k"), "k");
  std::ifstream f(zeta_csv, std::ios::binary);
  if (!f) throw Error("cannot open '" + zeta_csv + "'");
  const ZetaEstimate est = read_zeta_csv(f);
  const DeltaSeries series =
      nf.given("m-max") ? estimate_deltas(est, k, as_int(nf.get("m-max"), "m-max")) : estimate_deltas(est, k);
  const double tol = nf.given("tol") ? nf.get("tol") : default_tolerance(series);
  A1Report rep = classify(series, tol);
  if (rep.verdict == Verdict::A1Holds) rep = characterize(series, r, k, tol);
  json doc = a1_report_to_json(rep);
  doc["input"] = {{"zeta_csv", zeta_csv}, {"r", r}, {"k", k}};
  write_text(out, doc.dump(2) + "\n");
  return 0;
}

int run_spectrum(const NumericFlags& nf, const std::string& out) {
  ScalingLaw law = law_from_flags(nf);
  const double d = nf.get("d");
  const int points = as_int(nf.get("points"), "points");
  const SpectrumCurve curve = spectrum_curve(law, d, points);
  json config{{"law", law_to_json(law)}, {"d", d}, {"points", points}};
  std::ostringstream s;
  write_spectrum_csv(s, curve, base_meta("spectrum", config));
  write_text(out, s.str());
  return 0;
}

int run_stability(const NumericFlags& nf, const std::string& preset, const std::string& eps_grid,
                  const std::string& out) {
  const ScalingLaw law = law_from_flags(nf);
  const double r = nf.get("r");
  const LogPoissonParams ref = logpoisson_from_scaling(law, r);
  const std::vector<double> grid = parse_eps_grid(eps_grid);
  const double samples = nf.get("samples");
  const double seed = nf.get("seed");
  if (samples < 0 || samples != std::floor(samples)) throw UsageError("--samples must be a non-negative integer");
  if (seed < 0 || seed != std::floor(seed)) throw UsageError("--seed must be a non-negative integer");
  const int m_max = as_int(nf.get("m-max"), "m-max");
  Preset p = Preset::Split;
  try {
    p = preset_from_string(preset);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--preset: ") + e.what());
  }
  const StabilitySweep sweep = stability_sweep(ref, r, law.k, p, grid, static_cast<std::size_t>(samples),
                                               static_cast<std::uint64_t>(seed), m_max);
  json config{{"law", law_to_json(law)}, {"r", r},         {"reference", logpoisson_to_json(ref)},
              {"preset", preset},        {"eps_grid", grid}, {"samples", samples},
              {"seed", seed},            {"m_max", m_max}};
  json meta = base_meta("stability", config);
  meta["seed"] = static_cast<std::uint64_t>(seed);
  std::ostringstream s;
  write_sweep_csv(s, sweep, meta);
  write_text(out, s.str());
  return 0;
}

int run_classify_family(const NumericFlags& nf, bool include_general, const std::string& out) {
  const ScalingLaw law = law_from_flags(nf);
  const double r = nf.get("r");
  const int k = law.k;
  const int m_max = as_int(nf.get("m-max"), "m-max");
  const double sigma2 = nf.get("sigma2");
  const double alpha = nf.get("alpha");

  struct Family {
    std::string name;
    std::string triplet;
    std::string a1;
    LevyGenerator gen;
  };
  const LogPoissonParams lp = logpoisson_from_scaling(law, r);
  std::vector<Family> families{
      {"log-poisson", "sigma2=0 nu=lambda*delta_b", "holds", LevyGenerator(lp)},
      {"log-normal", "sigma2>0 nu=0", "fails", normalize_mean_one(LevyGenerator::log_normal(0.0, sigma2))},
      {"log-stable", "sigma2=0 nu=power-law", "fails",
       LevyGenerator::log_stable(0.0, StableTail{alpha, 0.1, 1e-8, 10.0})},
      {"monofractal", "sigma2=0 nu=0 (C=0)", "trivially holds", LevyGenerator::deterministic(law.gamma * std::log(r))},
  };
  if (include_general) {
    LevyGenerator g(lp);
    g.atoms.push_back({0.05, 0.5});
    families.push_back({"general log-id", "positive jump added", "fails", g});
  }

  std::ostringstream s;
  json config{{"law", law_to_json(law)}, {"r", r}, {"m_max", m_max}, {"sigma2", sigma2}, {"alpha", alpha}};
  s << "# " << json{{"format", "family-table"}, {"version", kVersion}, {"command", "classify-family"},
                    {"config", config}}.dump()
    << "\n";
  s << "class,levy_triplet,a1,verdict,determinacy\n";
  for (const auto& fam : families) {
    const DeltaSeries series = delta_series_analytic(fam.gen, r, k, m_max);
    const A1Report rep = classify(series);
    const DeterminacyResult det = determinacy_verdict(fam.gen, 200);
    s << fam.name << ',' << fam.triplet << ',' << fam.a1 << ',' << to_string(rep.verdict) << ','
      << to_string(det.verdict) << '\n';
  }
  write_text(out, s.str());
  return 0;
}

int run_determinacy(const GeneratorFlags& gf, const NumericFlags& nf, const std::string& out) {
  json config;
  const LevyGenerator gen = generator_from_flags(gf, nf, config);
  const int P = as_int(nf.get("P"), "P");
  const double threshold = nf.get("threshold");
  const DeterminacyResult res = determinacy_verdict(gen, P, threshold);
  json doc{{"command", "determinacy"},
           {"config", config},
           {"P", P},
           {"threshold", threshold},
           {"verdict", to_string(res.verdict)},
           {"sum", res.carleman.sum},
           {"first_terms", std::vector<double>(res.carleman.terms.begin(),
                                               res.carleman.terms.begin() + std::min<std::size_t>(5, P))},
           {"last_term", res.carleman.terms.back()},
           {"tail_min", res.tail_min},
           {"tail_ratio", res.tail_ratio},
           {"tail_r2", res.tail_r2},
           {"projected_sum", std::isfinite(res.projected_sum) ? json(res.projected_sum) : json(nullptr)}};
  write_text(out, doc.dump(2) + "\n");
  return 0;
}

void report_error(const char* kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical-symmetry toolkit for multiplicative cascades"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (results do not depend on it)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo structure functions and zeta estimates");
  NumericFlags sim_nf;
  GeneratorFlags sim_gf;
  add_generator_flags(sim, sim_gf, sim_nf);
  add_law_flags(sim, sim_nf, false);
  sim_nf.add(sim, "--levels", "levels", "", "number of cascade levels", true);
  sim_nf.add(sim, "--samples", "samples", "", "independent branch realizations", true);
  sim_nf.add(sim, "--seed", "seed", "", "random seed", true);
  std::string sim_p_list, sim_table = "structure.csv", sim_zeta = "zeta.csv";
  sim->add_option("--p-list", sim_p_list, "comma-separated moment orders (default 0,1,k,...,6k)");
  sim->add_option("--out-table", sim_table, "structure table CSV ('-' for stdout)")->capture_default_str();
  sim->add_option("--out-zeta", sim_zeta, "zeta estimate CSV ('-' for stdout)")->capture_default_str();

  // analyze
  auto* ana = app.add_subcommand("analyze", "A1 report from a zeta CSV");
  std::string ana_csv, ana_out;
  ana->add_option("zeta_csv", ana_csv, "zeta estimate CSV")->required();
  NumericFlags ana_nf;
  ana_nf.add(ana, "--k", "k", "", "hierarchy step", true);
  ana_nf.add(ana, "--r", "r", "", "scale ratio", true);
  ana_nf.add(ana, "--tol", "tol", "", "A1 tolerance (default from standard errors)");
  ana_nf.add(ana, "--m-max", "m-max", "", "largest m of the delta series");
  ana->add_option("--out", ana_out, "output path (default stdout)");

  // spectrum
  auto* spectrum_cmd = app.add_subcommand("spectrum", "singularity spectrum f(h)");
  NumericFlags spectrum_nf;
  add_law_flags(spectrum_cmd, spectrum_nf, true);
  spectrum_nf.add(spectrum_cmd, "--d", "d", "3", "dimension of the support");
  spectrum_nf.add(spectrum_cmd, "--points", "points", "101", "number of curve points");
  std::string spectrum_out;
  spectrum_cmd->add_option("--out", spectrum_out, "output path (default stdout)");

  // stability
  auto* stab = app.add_subcommand("stability", "Wasserstein stability sweep");
  NumericFlags stab_nf;
  add_law_flags(stab, stab_nf, true);
  std::string stab_preset = "split", stab_grid = "1e-1:1e-6", stab_out;
  stab->add_option("--preset", stab_preset, "perturbation family: split, leak, smear")->capture_default_str();
  stab->add_option("--eps-grid", stab_grid, "hi:lo decades or a comma list")->capture_default_str();
  stab_nf.add(stab, "--samples", "samples", "0", "multiplier samples for the sampled W1 (0 skips)");
  stab_nf.add(stab, "--seed", "seed", "0", "random seed");
  stab_nf.add(stab, "--m-max", "m-max", "40", "orders m used for epsilon");
  stab->add_option("--out", stab_out, "output path (default stdout)");

  // classify-family
  auto* fam = app.add_subcommand("classify-family", "A1 verdicts for the principal generator families");
  NumericFlags fam_nf;
  add_law_flags(fam, fam_nf, true);
  fam_nf.add(fam, "--sigma2", "sigma2", "0.2", "log-normal variance");
  fam_nf.add(fam, "--alpha", "alpha", "1/2", "log-stable index");
  fam_nf.add(fam, "--m-max", "m-max", "40", "length of the analytic delta series");
  bool fam_general = false;
  fam->add_flag("--include-general", fam_general, "add a generator with a positive jump");
  std::string fam_out;
  fam->add_option("--out", fam_out, "output path (default stdout)");

  // determinacy
  auto* det = app.add_subcommand("determinacy", "Carleman determinacy verdict");
  NumericFlags det_nf;
  GeneratorFlags det_gf;
  add_generator_flags(det, det_gf, det_nf);
  add_law_flags(det, det_nf, true);
  det_nf.add(det, "--P", "P", "200", "number of Carleman terms");
  det_nf.add(det, "--threshold", "threshold", "1e-3", "lower bound for non-vanishing terms");
  std::string det_out;
  det->add_option("--out", det_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    std::cerr << app.help() << "\n";
    return 2;
  }

  if (threads > 0) set_max_threads(threads);

  try {
    if (*sim) return run_simulate(sim_gf, sim_nf, sim_p_list, sim_table, sim_zeta);
    if (*ana) return run_analyze(ana_csv, ana_nf, ana_out);
    if (*spectrum_cmd) return run_spectrum(spectrum_nf, spectrum_out);
    if (*stab) return run_stability(stab_nf, stab_preset, stab_grid, stab_out);
    if (*fam) return run_classify_family(fam_nf, fam_general, fam_out);
    if (*det) return run_determinacy(det_gf, det_nf, det_out);
  } catch (const UsageError& e) {
    report_error("usage", e.what());
    return 2;
  } catch (const ParseError& e) {
    report_error("parse", e.what());
    return 1;
  } catch (const DomainError& e) {
    report_error("domain", e.what());
    return 1;
  } catch (const NumericError& e) {
    report_error("numeric", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("error", e.what());
    return 1;
  }
  return 2;
}
