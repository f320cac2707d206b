#include "cascsym/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cascsym/error.hpp"
#include "cascsym/parallel.hpp"

namespace cascsym {

using detail::require;

namespace {

constexpr std::size_t kJackknifeGroups = 100;
constexpr double kOrderTol = 1e-9;

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

void SimConfig::validate() const {
  params.validate();
  require(n_levels >= 2, "simulation needs at least 2 levels");
  require(n_samples >= 100, "simulation needs at least 100 samples");
  require(!p_list.empty(), "moment order list is empty");
  require(std::is_sorted(p_list.begin(), p_list.end()), "moment orders must be sorted");
  require(p_list.front() == 0.0, "moment orders must include p = 0");
  for (double p : p_list) require(std::isfinite(p) && p >= 0.0, "moment orders must be finite and >= 0");
  require(std::adjacent_find(p_list.begin(), p_list.end()) == p_list.end(), "moment orders must be distinct");
}

std::vector<double> default_p_list(int k) {
  require(k >= 1, "hierarchy step k must be >= 1");
  std::vector<double> ps{0.0, 1.0};
  for (int m = 1; m <= 6; ++m) ps.push_back(static_cast<double>(m * k));
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

StructureTable simulate(const SimConfig& config, const LevyGenerator& gen) {
  config.validate();
  const LogMultiplierSampler sampler(gen);
  const std::size_t N = config.n_samples;
  const auto L = static_cast<std::size_t>(config.n_levels);

  // path[j*L + (n-1)] = ln Phi_j(r^n) = sum_{i<=n} ln W_{i,j}
  std::vector<double> path(N * L);
  parallel_for(N, [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      KeyedStream stream(config.seed, j);
      double acc = 0.0;
      for (std::size_t n = 0; n < L; ++n) {
        acc += sampler.draw(stream);
        path[j * L + n] = acc;
      }
    }
  });

  StructureTable table;
  table.r = config.params.r;
  table.n_samples = N;
  table.seed = config.seed;

  const std::size_t groups = std::min(N, kJackknifeGroups);
  std::vector<double> block(groups);
  std::vector<std::size_t> block_count(groups);
  for (std::size_t j = 0; j < N; ++j) ++block_count[j * groups / N];

  for (double p : config.p_list) {
    for (std::size_t n = 1; n <= L; ++n) {
      if (p == 0.0) {
        table.rows.push_back({0.0, static_cast<int>(n), 0.0, 0.0});
        continue;
      }
      double shift = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < N; ++j) shift = std::max(shift, p * path[j * L + n - 1]);

      // Log-sum-exp in index order; block partial sums feed the grouped jackknife.
      Neumaier total;
      std::fill(block.begin(), block.end(), 0.0);
      {
        std::size_t g = 0;
        Neumaier part;
        for (std::size_t j = 0; j < N; ++j) {
          const std::size_t gj = j * groups / N;
          if (gj != g) {
            block[g] = part.value();
            part = Neumaier{};
            g = gj;
          }
          const double v = std::exp(p * path[j * L + n - 1] - shift);
          part.add(v);
          total.add(v);
        }
        block[g] = part.value();
      }
      const double T = total.value();
      const double ln_S = shift + std::log(T / static_cast<double>(N));

      Neumaier mean_rep;
      std::vector<double> reps(groups);
      for (std::size_t g = 0; g < groups; ++g) {
        reps[g] = shift + std::log((T - block[g]) / static_cast<double>(N - block_count[g]));
        mean_rep.add(reps[g]);
      }
      const double rep_mean = mean_rep.value() / static_cast<double>(groups);
      Neumaier ss;
      for (double v : reps) ss.add((v - rep_mean) * (v - rep_mean));
      const double se = std::sqrt(ss.value() * static_cast<double>(groups - 1) / static_cast<double>(groups));

      if (!std::isfinite(ln_S) || !std::isfinite(se)) {
        table.dropped.push_back({p, static_cast<int>(n), "non-finite moment estimate"});
      } else if (se > kMaxRelativeError) {
        std::ostringstream why;
        why << "relative error " << se << " exceeds " << kMaxRelativeError;
        table.dropped.push_back({p, static_cast<int>(n), why.str()});
      } else {
        table.rows.push_back({p, static_cast<int>(n), ln_S, se});
      }
    }
  }
  return table;
}

const ZetaRow* ZetaEstimate::find(double p) const {
  for (const auto& row : rows)
    if (std::abs(row.p - p) <= kOrderTol * std::max(1.0, std::abs(p))) return &row;
  return nullptr;
}

ZetaEstimate estimate_zeta(const StructureTable& table) {
  require(table.r > 0.0 && table.r < 1.0, "structure table scale ratio must lie in (0,1)");
  const double lnr = std::log(table.r);
  std::vector<double> orders;
  for (const auto& row : table.rows) orders.push_back(row.p);
  for (const auto& row : table.dropped) orders.push_back(row.p);
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());

  ZetaEstimate est;
  for (double p : orders) {
    if (p == 0.0) {
      est.rows.push_back({0.0, 0.0, 0.0});
      continue;
    }
    std::vector<const StructureRow*> pts;
    for (const auto& row : table.rows)
      if (row.p == p) pts.push_back(&row);
    if (pts.size() < 3) {
      std::ostringstream why;
      why << "p = " << p << " omitted: only " << pts.size() << " valid levels";
      est.warnings.push_back(why.str());
      continue;
    }
    // Inverse-variance weights keep the noisy deep levels of high orders from
    // dominating; plain least squares when some level carries no error estimate.
    bool weighted = true;
    for (const auto* row : pts) weighted = weighted && row->se > 0.0;
    auto weight = [&](const StructureRow* row) { return weighted ? 1.0 / (row->se * row->se) : 1.0; };
    double sw = 0.0, xbar = 0.0, ybar = 0.0;
    for (const auto* row : pts) {
      const double w = weight(row);
      sw += w;
      xbar += w * row->n * lnr;
      ybar += w * row->ln_S;
    }
    xbar /= sw;
    ybar /= sw;
    double sxx = 0.0, sxy = 0.0;
    for (const auto* row : pts) {
      const double dx = row->n * lnr - xbar;
      sxx += weight(row) * dx * dx;
      sxy += weight(row) * dx * (row->ln_S - ybar);
    }
    const double slope = sxy / sxx;
    double var = 0.0;
    for (const auto* row : pts) {
      const double c = weight(row) * (row->n * lnr - xbar) / sxx;
      var += c * c * row->se * row->se;
    }
    est.rows.push_back({p, slope, std::sqrt(var)});
  }
  return est;
}

DeltaSeries estimate_deltas(const ZetaEstimate& zeta, int k, int m_max) {
  require(k >= 1, "hierarchy step k must be >= 1");
  require(m_max >= 0, "m_max must be >= 0");
  std::vector<double> missing;
  for (int m = 0; m <= m_max + 1; ++m)
    if (!zeta.find(static_cast<double>(m) * k)) missing.push_back(static_cast<double>(m) * k);
  if (!missing.empty()) {
    std::ostringstream why;
    why << "zeta estimate is missing orders p =";
    for (std::size_t i = 0; i < missing.size(); ++i) why << (i ? ", " : " ") << missing[i];
    throw DomainError(why.str());
  }
  DeltaSeries series;
  series.k = k;
  std::vector<double> se;
  for (int m = 0; m <= m_max; ++m) {
    const ZetaRow* lo = zeta.find(static_cast<double>(m) * k);
    const ZetaRow* hi = zeta.find(static_cast<double>(m + 1) * k);
    series.entries.push_back({m, hi->zeta_hat - lo->zeta_hat});
    se.push_back(std::hypot(hi->se, lo->se));
  }
  series.stderr_ = std::move(se);
  series.validate();
  return series;
}

DeltaSeries estimate_deltas(const ZetaEstimate& zeta, int k) {
  require(k >= 1, "hierarchy step k must be >= 1");
  int run = 0;
  while (zeta.find(static_cast<double>(run + 1) * k)) ++run;
  // run = largest M with orders 0..Mk present (given p = 0 present)
  return estimate_deltas(zeta, k, std::max(0, run - 1));
}

}  // namespace cascsym
