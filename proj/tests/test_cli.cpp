#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

#include "cascsym/exponents.hpp"
#include "cascsym/generators.hpp"
#include "cascsym/io.hpp"

using namespace cascsym;
namespace fs = std::filesystem;

namespace {

const ScalingLaw kSL{1.0 / 9.0, 2.0, 2.0 / 3.0, 3};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("cascsym_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = "cd '" + work_dir().string() + "' && " + env + " '" CASCSYM_CLI "' " + args + " > '" +
                          out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

void write_zeta(const fs::path& path, const LevyGenerator& gen, double r, int k, int orders) {
  ZetaEstimate z;
  for (int m = 0; m <= orders; ++m) z.rows.push_back({double(m * k), ln_moment(gen, m * k) / std::log(r), 0.0});
  std::ofstream f(path);
  write_zeta_csv(f, z);
}

}  // namespace

TEST_CASE("simulate writes two CSVs and is deterministic") {
  const std::string args =
      "simulate --gen log-poisson --r 0.5 --k 3 --beta 0.6667 --bigC 2 --levels 8 --samples 100000 --seed 42";
  const Run first = run(args + " --out-table t1.csv --out-zeta z1.csv");
  REQUIRE(first.code == 0);
  const Run second = run(args + " --out-table t2.csv --out-zeta z2.csv --threads 1", "CASCSYM_THREADS=3");
  REQUIRE(second.code == 0);
  const std::string t1 = slurp(work_dir() / "t1.csv"), z1 = slurp(work_dir() / "z1.csv");
  CHECK(t1.rfind("# {", 0) == 0);
  CHECK(z1.rfind("# {", 0) == 0);
  CHECK(t1.find("\np,n,ln_S,se\n") != std::string::npos);
  CHECK(z1.find("\np,zeta_hat,se\n") != std::string::npos);
  CHECK(t1 == slurp(work_dir() / "t2.csv"));
  CHECK(z1 == slurp(work_dir() / "z2.csv"));
  std::ifstream in(work_dir() / "t1.csv");
  CHECK(read_metadata(in)["seed"] == 42);
}

TEST_CASE("usage errors exit with 2 and a JSON message") {
  const Run missing = run("simulate --gen log-poisson --r 0.5 --k 3 --beta 2/3 --bigC 2 --samples 10 --seed 1");
  CHECK(missing.code == 2);
  CHECK(json::parse(missing.err.substr(0, missing.err.find('\n')))["error"] == "usage");
  CHECK(run("spectrum --beta two-thirds").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("computation errors exit with 1") {
  const Run bad = run("spectrum --beta 3/2");
  CHECK(bad.code == 1);
  CHECK(json::parse(bad.err)["error"] == "domain");
  CHECK(run("spectrum --bigC 0").code == 1);
}

TEST_CASE("analyze classifies analytic zeta tables") {
  write_zeta(work_dir() / "sl_zeta.csv", LevyGenerator(logpoisson_from_scaling(kSL, 0.5)), 0.5, 3, 12);
  const Run sl = run("analyze sl_zeta.csv --k 3 --r 1/2");
  REQUIRE(sl.code == 0);
  const json rep = json::parse(sl.out);
  CHECK(rep["verdict"] == "a1-holds");
  CHECK(rep["logpoisson"]["lambda"].get<double>() == doctest::Approx(1.386294).epsilon(1e-6));

  write_zeta(work_dir() / "ln_zeta.csv", LevyGenerator::log_normal(-0.1, 0.2), 0.5, 1, 12);
  const Run ln = run("analyze ln_zeta.csv --k 1 --r 0.5 --out ln_report.json");
  REQUIRE(ln.code == 0);
  CHECK(json::parse(slurp(work_dir() / "ln_report.json"))["verdict"] == "affine-divergent");
}

TEST_CASE("malformed CSV reports the row and column") {
  std::ofstream(work_dir() / "broken.csv") << "# {}\np,zeta_hat,se\n0,0,0\n3,oops,0\n";
  const Run r = run("analyze broken.csv --k 3 --r 0.5");
  CHECK(r.code == 1);
  const json err = json::parse(r.err);
  CHECK(err["error"] == "parse");
  CHECK(err["message"].get<std::string>().find("line 4") != std::string::npos);
  CHECK(err["message"].get<std::string>().find("zeta_hat") != std::string::npos);
  CHECK(run("analyze no_such_file.csv --k 3 --r 0.5").code == 1);
}

TEST_CASE("classify-family table") {
  const Run r = run("classify-family");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("log-poisson,") != std::string::npos);
  CHECK(r.out.find(",a1-holds,determinate-divergent") != std::string::npos);
  CHECK(r.out.find(",affine-divergent,indeterminate-convergent") != std::string::npos);
  CHECK(r.out.find(",power-decay,") != std::string::npos);
  CHECK(r.out.find(",monofractal,") != std::string::npos);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  CHECK(lines == 6);
}

TEST_CASE("stability sweep CSV") {
  const Run r = run("stability --preset split --eps-grid 1e-1:1e-6 --out sweep.csv");
  REQUIRE(r.code == 0);
  std::ifstream in(work_dir() / "sweep.csv");
  const StabilitySweep sw = read_sweep_csv(in);
  REQUIRE(sw.rows.size() == 6);
  for (const auto& row : sw.rows) CHECK(row.report.bound_ok);
  CHECK(std::abs(sw.loglog_slope - 0.5) <= 0.05);
  CHECK(run("stability --preset bogus").code == 2);
}

TEST_CASE("determinacy verdicts") {
  const Run ln = run("determinacy --gen log-normal --sigma2 0.2");
  REQUIRE(ln.code == 0);
  const json doc = json::parse(ln.out);
  CHECK(doc["verdict"] == "indeterminate-convergent");
  CHECK(doc["sum"].get<double>() == doctest::Approx(4.99169).epsilon(1e-5));
  CHECK(json::parse(run("determinacy").out)["verdict"] == "determinate-divergent");
}

TEST_CASE("spectrum accepts exact rationals") {
  const Run r = run("spectrum --gamma 1/9 --bigC 2 --beta 2/3 --k 3 --d 3 --points 3");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const SpectrumCurve c = read_spectrum_csv(in);
  REQUIRE(c.points.size() == 3);
  CHECK(c.points.front().f == doctest::Approx(1.0));
  CHECK(c.points.back().f == 3.0);
}
