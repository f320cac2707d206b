#include "cascsym/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "cascsym/error.hpp"

namespace cascsym {

// ---------------------------------------------------------------------------
// Numbers

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_plain(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  const auto slash = s.find('/');
  double v = 0.0;
  if (slash == std::string::npos) {
    if (!parse_plain(s, v)) throw ParseError("not a number: '" + text + "'");
    return v;
  }
  double num = 0.0, den = 0.0;
  if (!parse_plain(trim(s.substr(0, slash)), num) || !parse_plain(trim(s.substr(slash + 1)), den))
    throw ParseError("not a rational number: '" + text + "'");
  if (den == 0.0) throw ParseError("zero denominator in '" + text + "'");
  return num / den;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

double get_num(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  const json& v = doc.at(key);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw ParseError(std::string("field '") + key + "' is not a number");
  return v.get<double>();
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json generator_to_json(const LevyGenerator& gen) {
  gen.validate();
  const std::string kind = gen.kind();
  json doc;
  doc["kind"] = kind;
  if (kind == "log-poisson") {
    doc["a"] = gen.drift;
    doc["b"] = gen.atoms[0].x;
    doc["lambda"] = gen.atoms[0].w;
  } else if (kind == "log-normal") {
    doc["drift"] = gen.drift;
    doc["sigma2"] = gen.sigma2;
  } else if (kind == "log-stable") {
    doc["drift"] = gen.drift;
    doc["alpha"] = gen.tail->alpha;
    doc["c"] = gen.tail->c;
    doc["x_min"] = gen.tail->x_min;
    doc["x_max"] = gen.tail->x_max;
  } else {
    doc["drift"] = gen.drift;
    doc["sigma2"] = gen.sigma2;
    doc["atoms"] = json::array();
    for (const auto& a : gen.atoms) doc["atoms"].push_back({{"x", a.x}, {"w", a.w}});
    if (gen.tail)
      doc["tail"] = {{"alpha", gen.tail->alpha}, {"c", gen.tail->c}, {"x_min", gen.tail->x_min},
                     {"x_max", gen.tail->x_max}};
  }
  return doc;
}

LevyGenerator generator_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("kind")) throw ParseError("generator document needs a 'kind' field");
  const std::string kind = doc.at("kind").get<std::string>();
  LevyGenerator gen;
  if (kind == "log-poisson") {
    gen = LevyGenerator(LogPoissonParams{get_num(doc, "a"), get_num(doc, "b"), get_num(doc, "lambda")});
  } else if (kind == "log-normal") {
    gen = LevyGenerator::log_normal(get_num(doc, "drift"), get_num(doc, "sigma2"));
  } else if (kind == "log-stable") {
    gen = LevyGenerator::log_stable(
        get_num(doc, "drift"),
        StableTail{get_num(doc, "alpha"), get_num(doc, "c"), get_num(doc, "x_min"), get_num(doc, "x_max")});
  } else if (kind == "atomic") {
    gen.drift = get_num(doc, "drift");
    gen.sigma2 = doc.contains("sigma2") ? get_num(doc, "sigma2") : 0.0;
    if (doc.contains("atoms"))
      for (const auto& a : doc.at("atoms")) gen.atoms.push_back({get_num(a, "x"), get_num(a, "w")});
    if (doc.contains("tail")) {
      const json& t = doc.at("tail");
      gen.tail = StableTail{get_num(t, "alpha"), get_num(t, "c"), get_num(t, "x_min"), get_num(t, "x_max")};
    }
  } else {
    throw ParseError("unknown generator kind '" + kind + "'");
  }
  gen.validate();
  return gen;
}

json logpoisson_to_json(const LogPoissonParams& lp) {
  return {{"kind", "log-poisson"}, {"a", lp.a}, {"b", lp.b}, {"lambda", lp.lambda}};
}

LogPoissonParams logpoisson_from_json(const json& doc) {
  LogPoissonParams lp{get_num(doc, "a"), get_num(doc, "b"), get_num(doc, "lambda")};
  lp.validate();
  return lp;
}

json law_to_json(const ScalingLaw& law) {
  return {{"gamma", law.gamma}, {"bigC", law.bigC}, {"beta", law.beta}, {"k", law.k}};
}

ScalingLaw law_from_json(const json& doc) {
  ScalingLaw law{get_num(doc, "gamma"), get_num(doc, "bigC"), get_num(doc, "beta"), doc.at("k").get<int>()};
  law.validate();
  return law;
}

json a1_report_to_json(const A1Report& rep) {
  json doc;
  doc["schema"] = kA1ReportSchema;
  doc["verdict"] = to_string(rep.verdict);
  doc["beta_hat"] = num_or_null(rep.fit.beta_hat);
  doc["beta_identified"] = rep.fit.beta_identified;
  doc["beta_at_boundary"] = rep.fit.beta_at_boundary;
  doc["delta_inf_hat"] = rep.fit.delta_inf_hat;
  doc["delta0_hat"] = rep.fit.delta0_hat();
  doc["amplitude"] = rep.fit.amplitude;
  doc["epsilon_hat"] = rep.fit.epsilon_hat;
  doc["recurrence_slope"] = num_or_null(rep.fit.recurrence_slope);
  doc["tol"] = rep.tol;
  doc["k"] = rep.k;
  doc["m_max"] = rep.m_max;
  doc["series_digest"] = rep.series_digest;
  doc["law"] = rep.law ? law_to_json(*rep.law) : json(nullptr);
  doc["logpoisson"] = rep.logpoisson ? logpoisson_to_json(*rep.logpoisson) : json(nullptr);
  return doc;
}

A1Report a1_report_from_json(const json& doc) {
  if (!doc.contains("schema") || doc.at("schema") != kA1ReportSchema)
    throw ParseError(std::string("expected schema ") + kA1ReportSchema);
  A1Report rep;
  rep.verdict = verdict_from_string(doc.at("verdict").get<std::string>());
  rep.fit.beta_hat = get_num(doc, "beta_hat");
  rep.fit.beta_identified = doc.at("beta_identified").get<bool>();
  rep.fit.beta_at_boundary = doc.at("beta_at_boundary").get<bool>();
  rep.fit.delta_inf_hat = get_num(doc, "delta_inf_hat");
  rep.fit.amplitude = get_num(doc, "amplitude");
  rep.fit.epsilon_hat = get_num(doc, "epsilon_hat");
  rep.fit.recurrence_slope = get_num(doc, "recurrence_slope");
  rep.tol = get_num(doc, "tol");
  rep.k = doc.at("k").get<int>();
  rep.m_max = doc.at("m_max").get<int>();
  rep.series_digest = doc.at("series_digest").get<std::string>();
  if (!doc.at("law").is_null()) rep.law = law_from_json(doc.at("law"));
  if (!doc.at("logpoisson").is_null()) rep.logpoisson = logpoisson_from_json(doc.at("logpoisson"));
  return rep;
}

json stability_report_to_json(const StabilityReport& rep) {
  json doc;
  doc["schema"] = kStabilitySchema;
  doc["epsilon"] = rep.epsilon;
  doc["bigK"] = rep.bigK;
  doc["bound"] = rep.bound();
  doc["w1_levy"] = rep.w1_levy;
  doc["w1_multiplier"] = rep.w1_multiplier ? json(*rep.w1_multiplier) : json(nullptr);
  doc["bound_ok"] = rep.bound_ok;
  doc["beta"] = rep.beta;
  doc["A"] = rep.A;
  doc["eta_mass"] = rep.eta_mass;
  doc["eta_mass_minus_absA"] = rep.eta_mass_minus_absA;
  doc["moment_residual"] = rep.moment_residual;
  doc["second_moment"] = rep.second_moment;
  doc["m_max"] = rep.m_max;
  return doc;
}

StabilityReport stability_report_from_json(const json& doc) {
  if (!doc.contains("schema") || doc.at("schema") != kStabilitySchema)
    throw ParseError(std::string("expected schema ") + kStabilitySchema);
  StabilityReport rep;
  rep.epsilon = get_num(doc, "epsilon");
  rep.bigK = get_num(doc, "bigK");
  rep.w1_levy = get_num(doc, "w1_levy");
  if (!doc.at("w1_multiplier").is_null()) rep.w1_multiplier = get_num(doc, "w1_multiplier");
  rep.bound_ok = doc.at("bound_ok").get<bool>();
  rep.beta = get_num(doc, "beta");
  rep.A = get_num(doc, "A");
  rep.eta_mass = get_num(doc, "eta_mass");
  rep.eta_mass_minus_absA = get_num(doc, "eta_mass_minus_absA");
  rep.moment_residual = get_num(doc, "moment_residual");
  rep.second_moment = get_num(doc, "second_moment");
  rep.m_max = doc.at("m_max").get<int>();
  return rep;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void write_meta(std::ostream& out, const char* format, json meta, const json& extra) {
  meta["format"] = format;
  meta["version"] = kVersion;
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  out << "# " << meta.dump() << "\n";
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

// Reads the metadata line (if any) and the header; returns rows of fields.
struct CsvBody {
  json meta = json::object();
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
};

CsvBody read_body(std::istream& in, const std::vector<std::string>& header) {
  CsvBody body;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!have_header && line[0] == '#') {
      try {
        body.meta = json::parse(line.substr(1));
      } catch (const json::exception& e) {
        throw ParseError("line " + std::to_string(lineno) + ": bad metadata JSON: " + e.what());
      }
      continue;
    }
    if (!have_header) {
      if (split_csv(line) != header) {
        std::string expected;
        for (std::size_t i = 0; i < header.size(); ++i) expected += (i ? "," : "") + header[i];
        throw ParseError("line " + std::to_string(lineno) + ": expected header '" + expected + "'");
      }
      have_header = true;
      continue;
    }
    auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                       " columns, found " + std::to_string(fields.size()));
    body.rows.push_back(std::move(fields));
    body.line_numbers.push_back(lineno);
  }
  if (!have_header) throw ParseError("CSV has no header row");
  return body;
}

double field_num(const CsvBody& body, std::size_t row, std::size_t col, const std::vector<std::string>& header) {
  const std::string& s = body.rows[row][col];
  double v = 0.0;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!parse_plain(s, v))
    throw ParseError("line " + std::to_string(body.line_numbers[row]) + ", column '" + header[col] +
                     "': not a number: '" + s + "'");
  return v;
}

int field_int(const CsvBody& body, std::size_t row, std::size_t col, const std::vector<std::string>& header) {
  const double v = field_num(body, row, col, header);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError("line " + std::to_string(body.line_numbers[row]) + ", column '" + header[col] +
                     "': not an integer");
  return static_cast<int>(v);
}

}  // namespace

json read_metadata(std::istream& in) {
  const auto pos = in.tellg();
  std::string line;
  if (std::getline(in, line) && !line.empty() && line[0] == '#') {
    try {
      return json::parse(line.substr(1));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad metadata JSON: ") + e.what());
    }
  }
  in.clear();
  in.seekg(pos);
  return json::object();
}

void write_structure_csv(std::ostream& out, const StructureTable& table, const json& meta) {
  json m;
  m["r"] = table.r;
  m["n_samples"] = table.n_samples;
  m["seed"] = table.seed;
  m["dropped"] = json::array();
  for (const auto& d : table.dropped) m["dropped"].push_back({{"p", d.p}, {"n", d.n}, {"reason", d.reason}});
  write_meta(out, "structure-table", m, meta);
  out << "p,n,ln_S,se\n";
  for (const auto& row : table.rows)
    out << format_double(row.p) << ',' << row.n << ',' << format_double(row.ln_S) << ',' << format_double(row.se)
        << '\n';
}

StructureTable read_structure_csv(std::istream& in) {
  const std::vector<std::string> header{"p", "n", "ln_S", "se"};
  const CsvBody body = read_body(in, header);
  StructureTable t;
  t.r = body.meta.contains("r") ? body.meta.at("r").get<double>() : 0.5;
  if (body.meta.contains("n_samples")) t.n_samples = body.meta.at("n_samples").get<std::size_t>();
  if (body.meta.contains("seed")) t.seed = body.meta.at("seed").get<std::uint64_t>();
  if (body.meta.contains("dropped"))
    for (const auto& d : body.meta.at("dropped"))
      t.dropped.push_back({d.at("p").get<double>(), d.at("n").get<int>(), d.at("reason").get<std::string>()});
  for (std::size_t i = 0; i < body.rows.size(); ++i)
    t.rows.push_back({field_num(body, i, 0, header), field_int(body, i, 1, header), field_num(body, i, 2, header),
                      field_num(body, i, 3, header)});
  return t;
}

void write_zeta_csv(std::ostream& out, const ZetaEstimate& est, const json& meta) {
  json m;
  m["warnings"] = est.warnings;
  write_meta(out, "zeta-estimate", m, meta);
  out << "p,zeta_hat,se\n";
  for (const auto& row : est.rows)
    out << format_double(row.p) << ',' << format_double(row.zeta_hat) << ',' << format_double(row.se) << '\n';
}

ZetaEstimate read_zeta_csv(std::istream& in) {
  const std::vector<std::string> header{"p", "zeta_hat", "se"};
  const CsvBody body = read_body(in, header);
  ZetaEstimate est;
  if (body.meta.contains("warnings")) est.warnings = body.meta.at("warnings").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < body.rows.size(); ++i)
    est.rows.push_back({field_num(body, i, 0, header), field_num(body, i, 1, header), field_num(body, i, 2, header)});
  return est;
}

void write_spectrum_csv(std::ostream& out, const SpectrumCurve& curve, const json& meta) {
  json m;
  m["d"] = curve.d;
  m["law"] = law_to_json(curve.law);
  m["has_negative_f"] = curve.has_negative_f;
  write_meta(out, "spectrum-curve", m, meta);
  out << "h,f\n";
  for (const auto& pt : curve.points) out << format_double(pt.h) << ',' << format_double(pt.f) << '\n';
}

SpectrumCurve read_spectrum_csv(std::istream& in) {
  const std::vector<std::string> header{"h", "f"};
  const CsvBody body = read_body(in, header);
  SpectrumCurve c;
  if (body.meta.contains("d")) c.d = body.meta.at("d").get<double>();
  if (body.meta.contains("law")) c.law = law_from_json(body.meta.at("law"));
  if (body.meta.contains("has_negative_f")) c.has_negative_f = body.meta.at("has_negative_f").get<bool>();
  for (std::size_t i = 0; i < body.rows.size(); ++i)
    c.points.push_back({field_num(body, i, 0, header), field_num(body, i, 1, header)});
  return c;
}

namespace {

const std::vector<std::string>& sweep_header() {
  static const std::vector<std::string> h{"epsilon",  "w1_levy", "bound",          "w1_multiplier", "bound_ok",
                                          "strength", "epsilon_target", "bigK",   "beta",          "A",
                                          "eta_mass", "eta_mass_minus_absA", "moment_residual", "second_moment",
                                          "m_max"};
  return h;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const StabilitySweep& sweep, const json& meta) {
  json m;
  m["loglog_slope"] = sweep.loglog_slope;
  m["all_bounds_ok"] = sweep.all_bounds_ok;
  write_meta(out, "stability-sweep", m, meta);
  const auto& h = sweep_header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
  for (const auto& row : sweep.rows) {
    const StabilityReport& r = row.report;
    out << format_double(r.epsilon) << ',' << format_double(r.w1_levy) << ',' << format_double(r.bound()) << ','
        << (r.w1_multiplier ? format_double(*r.w1_multiplier) : std::string()) << ',' << (r.bound_ok ? 1 : 0)
        << ',' << format_double(row.strength) << ',' << format_double(row.epsilon_target) << ','
        << format_double(r.bigK) << ',' << format_double(r.beta) << ',' << format_double(r.A) << ','
        << format_double(r.eta_mass) << ',' << format_double(r.eta_mass_minus_absA) << ','
        << format_double(r.moment_residual) << ',' << format_double(r.second_moment) << ',' << r.m_max << '\n';
  }
}

StabilitySweep read_sweep_csv(std::istream& in) {
  const auto& h = sweep_header();
  const CsvBody body = read_body(in, h);
  StabilitySweep sweep;
  if (body.meta.contains("loglog_slope")) sweep.loglog_slope = body.meta.at("loglog_slope").get<double>();
  if (body.meta.contains("all_bounds_ok")) sweep.all_bounds_ok = body.meta.at("all_bounds_ok").get<bool>();
  for (std::size_t i = 0; i < body.rows.size(); ++i) {
    SweepRow row;
    StabilityReport& r = row.report;
    r.epsilon = field_num(body, i, 0, h);
    r.w1_levy = field_num(body, i, 1, h);
    if (!body.rows[i][3].empty()) r.w1_multiplier = field_num(body, i, 3, h);
    r.bound_ok = field_int(body, i, 4, h) != 0;
    row.strength = field_num(body, i, 5, h);
    row.epsilon_target = field_num(body, i, 6, h);
    r.bigK = field_num(body, i, 7, h);
    r.beta = field_num(body, i, 8, h);
    r.A = field_num(body, i, 9, h);
    r.eta_mass = field_num(body, i, 10, h);
    r.eta_mass_minus_absA = field_num(body, i, 11, h);
    r.moment_residual = field_num(body, i, 12, h);
    r.second_moment = field_num(body, i, 13, h);
    r.m_max = field_int(body, i, 14, h);
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

}  // namespace cascsym
