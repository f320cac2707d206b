#include "cascsym/symmetry.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>

#include "cascsym/error.hpp"

namespace cascsym {

using detail::require;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::A1Holds: return "a1-holds";
    case Verdict::Monofractal: return "monofractal";
    case Verdict::AffineDivergent: return "affine-divergent";
    case Verdict::PowerDecay: return "power-decay";
    case Verdict::Other: return "other";
  }
  return "other";
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::A1Holds, Verdict::Monofractal, Verdict::AffineDivergent, Verdict::PowerDecay,
                    Verdict::Other})
    if (to_string(v) == s) return v;
  throw ParseError("unknown verdict label '" + s + "'");
}

double a1_residual(const DeltaSeries& series, double beta, double delta_inf) {
  double eps = 0.0;
  for (std::size_t m = 0; m + 1 < series.entries.size(); ++m) {
    const double r = series.entries[m + 1].delta - (1.0 - beta) * delta_inf - beta * series.entries[m].delta;
    eps = std::max(eps, std::abs(r));
  }
  return eps;
}

namespace {

constexpr int kGridNodes = 1000;
constexpr double kGridLo = 0.001;
constexpr double kGridHi = 0.999;

struct Weighted {
  std::vector<double> y;
  std::vector<double> w;
};

Weighted weighted_values(const DeltaSeries& series) {
  Weighted d;
  d.y = series.values();
  d.w.assign(d.y.size(), 1.0);
  if (series.stderr_) {
    const auto& se = *series.stderr_;
    if (std::all_of(se.begin(), se.end(), [](double s) { return s > 0.0; }))
      for (std::size_t i = 0; i < se.size(); ++i) d.w[i] = 1.0 / (se[i] * se[i]);
  }
  return d;
}

struct LinearFit {
  double delta_inf = 0.0;
  double amplitude = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

// Weighted least squares of y_m on (1, q^m) for fixed q.
LinearFit fit_given_q(const Weighted& d, double q) {
  double s0 = 0, s1 = 0, s11 = 0, sy = 0, s1y = 0;
  double qm = 1.0;
  for (std::size_t m = 0; m < d.y.size(); ++m) {
    const double w = d.w[m];
    s0 += w;
    s1 += w * qm;
    s11 += w * qm * qm;
    sy += w * d.y[m];
    s1y += w * qm * d.y[m];
    qm *= q;
  }
  const double det = s0 * s11 - s1 * s1;
  LinearFit f;
  if (!(det > 0.0)) return f;
  f.amplitude = (s0 * s1y - s1 * sy) / det;
  f.delta_inf = (sy - s1 * f.amplitude) / s0;
  f.sse = 0.0;
  qm = 1.0;
  for (std::size_t m = 0; m < d.y.size(); ++m) {
    const double r = d.y[m] - f.delta_inf - f.amplitude * qm;
    f.sse += d.w[m] * r * r;
    qm *= q;
  }
  return f;
}

bool solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b, std::array<double, 3>& x) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (!(std::abs(a[piv][col]) > 0.0)) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

double sse_of(const Weighted& d, double dinf, double amp, double q) {
  double sse = 0.0;
  double qm = 1.0;
  for (std::size_t m = 0; m < d.y.size(); ++m) {
    const double r = d.y[m] - dinf - amp * qm;
    sse += d.w[m] * r * r;
    qm *= q;
  }
  return sse;
}

// Gauss-Newton on (delta_inf, D, q); converges quadratically on exact series.
void polish(const Weighted& d, double& dinf, double& amp, double& q) {
  double sse = sse_of(d, dinf, amp, q);
  for (int iter = 0; iter < 60 && sse > 0.0; ++iter) {
    std::array<std::array<double, 3>, 3> jtj{};
    std::array<double, 3> jtr{};
    double qm = 1.0;     // q^m
    double qm1 = 0.0;    // m q^{m-1}
    for (std::size_t m = 0; m < d.y.size(); ++m) {
      const std::array<double, 3> j{1.0, qm, amp * qm1};
      const double r = dinf + amp * qm - d.y[m];
      for (int a = 0; a < 3; ++a) {
        jtr[a] -= d.w[m] * j[a] * r;
        for (int b = 0; b < 3; ++b) jtj[a][b] += d.w[m] * j[a] * j[b];
      }
      qm1 = qm1 * q + qm;
      qm *= q;
    }
    std::array<double, 3> step{};
    if (!solve3(jtj, jtr, step)) return;
    double scale = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, scale *= 0.5) {
      const double nq = q + scale * step[2];
      if (!(nq > 0.0 && nq < 1.0)) continue;
      const double nd = dinf + scale * step[0];
      const double na = amp + scale * step[1];
      const double nsse = sse_of(d, nd, na, nq);
      if (nsse < sse) {
        dinf = nd;
        amp = na;
        q = nq;
        improved = sse - nsse > 1e-30 * sse;
        sse = nsse;
        break;
      }
    }
    if (!improved) return;
  }
}

double ols_recurrence_slope(const std::vector<double>& y) {
  const std::size_t n = y.size() - 1;
  double xbar = 0, ybar = 0;
  for (std::size_t m = 0; m < n; ++m) {
    xbar += y[m];
    ybar += y[m + 1];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t m = 0; m < n; ++m) {
    sxx += (y[m] - xbar) * (y[m] - xbar);
    sxy += (y[m] - xbar) * (y[m + 1] - ybar);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

double series_scale(const std::vector<double>& y) {
  double s = 1.0;
  for (double v : y) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

A1Fit fit_a1(const DeltaSeries& series) {
  series.validate();
  require(series.size() >= 4, "A1 fit needs at least 4 delta entries");
  const Weighted d = weighted_values(series);

  A1Fit fit;
  fit.recurrence_slope = ols_recurrence_slope(d.y);

  const auto [lo_it, hi_it] = std::minmax_element(d.y.begin(), d.y.end());
  if (*hi_it - *lo_it <= 1e-14 * series_scale(d.y)) {
    // Constant series: any beta satisfies the recurrence.
    double sw = 0, swy = 0;
    for (std::size_t m = 0; m < d.y.size(); ++m) {
      sw += d.w[m];
      swy += d.w[m] * d.y[m];
    }
    fit.delta_inf_hat = *hi_it == *lo_it ? *lo_it : swy / sw;
    fit.amplitude = 0.0;
    fit.beta_hat = std::numeric_limits<double>::quiet_NaN();
    fit.beta_identified = false;
    fit.epsilon_hat = a1_residual(series, 0.5, fit.delta_inf_hat);
    return fit;
  }

  // Stage 1: log-spaced grid over q, linear least squares at each node.
  std::vector<double> grid(kGridNodes);
  const double llo = std::log(kGridLo);
  const double lhi = std::log(kGridHi);
  for (int i = 0; i < kGridNodes; ++i) grid[i] = std::exp(llo + (lhi - llo) * i / (kGridNodes - 1));
  int best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGridNodes; ++i) {
    const double sse = fit_given_q(d, grid[i]).sse;
    if (sse < best_sse) {  // strict: the smallest q wins ties
      best_sse = sse;
      best = i;
    }
  }
  fit.beta_at_boundary = best == 0 || best == kGridNodes - 1;

  // Golden-section refinement inside the neighbouring grid cells.
  double a = grid[std::max(0, best - 1)];
  double b = grid[std::min(kGridNodes - 1, best + 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double e = a + g * (b - a);
  double fc = fit_given_q(d, c).sse;
  double fe = fit_given_q(d, e).sse;
  for (int iter = 0; iter < 200 && b - a > 1e-15; ++iter) {
    if (fc <= fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - g * (b - a);
      fc = fit_given_q(d, c).sse;
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + g * (b - a);
      fe = fit_given_q(d, e).sse;
    }
  }
  double q = fc <= fe ? c : e;
  if (fit_given_q(d, grid[best]).sse < fit_given_q(d, q).sse) q = grid[best];
  const LinearFit lf = fit_given_q(d, q);
  double dinf = lf.delta_inf;
  double amp = lf.amplitude;
  polish(d, dinf, amp, q);

  fit.beta_hat = q;
  fit.delta_inf_hat = dinf;
  fit.amplitude = amp;
  // Stage 2: residual in recurrence form.
  fit.epsilon_hat = a1_residual(series, q, dinf);
  return fit;
}

double default_tolerance(const DeltaSeries& series) {
  if (!series.stderr_ || series.stderr_->empty()) return 1e-8;
  std::vector<double> se = *series.stderr_;
  std::sort(se.begin(), se.end());
  const std::size_t n = se.size();
  const double median = n % 2 ? se[n / 2] : 0.5 * (se[n / 2 - 1] + se[n / 2]);
  return std::max(1e-8, 3.0 * median);
}

namespace {

bool is_affine(const std::vector<double>& y, double tol) {
  std::vector<double> diff(y.size() - 1);
  for (std::size_t m = 0; m + 1 < y.size(); ++m) diff[m] = y[m + 1] - y[m];
  const auto [lo, hi] = std::minmax_element(diff.begin(), diff.end());
  double mean = 0.0;
  for (double v : diff) mean += v;
  mean /= static_cast<double>(diff.size());
  return *hi - *lo <= tol && std::abs(mean) > tol;
}

// Completely monotone increments with a stabilising local power exponent:
// Delta_m ~ m^{-kappa} rather than beta^m.
bool is_power_decay(const std::vector<double>& y, double tol) {
  const std::size_t n = y.size() - 1;
  if (n < 5) return false;
  std::vector<double> diff(n);
  for (std::size_t m = 0; m < n; ++m) diff[m] = y[m + 1] - y[m];
  const double sign = diff[0] > 0.0 ? 1.0 : -1.0;
  if (std::abs(diff[0]) <= tol) return false;
  for (double v : diff)
    if (!(sign * v > 0.0)) return false;
  std::vector<double> ratio(n - 1);
  for (std::size_t m = 0; m + 1 < n; ++m) ratio[m] = diff[m + 1] / diff[m];
  for (std::size_t m = 0; m + 1 < ratio.size(); ++m)
    if (ratio[m + 1] < ratio[m] - 1e-9) return false;  // log-convexity of |Delta|
  auto local_power = [&](std::size_t m) {
    return std::log(ratio[m]) / std::log((m + 2.0) / (m + 1.0));
  };
  const std::size_t last = ratio.size() - 1;
  const std::size_t mid = ratio.size() / 2;
  const double s_last = local_power(last);
  const double s_mid = local_power(mid);
  return ratio[last] > ratio[mid] && std::abs(s_last - s_mid) <= 0.25 * std::abs(s_last);
}

}  // namespace

A1Report classify(const DeltaSeries& series, double tol) {
  series.validate();
  require(series.size() >= 5, "classification needs at least 5 delta entries");
  require(std::isfinite(tol) && tol > 0.0, "classification tolerance must be positive");
  A1Report rep;
  rep.fit = fit_a1(series);
  rep.tol = tol;
  rep.k = series.k;
  rep.m_max = series.entries.back().m;
  rep.series_digest = series_digest(series);

  const std::vector<double> y = series.values();
  const double thresh = tol * series_scale(y);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  const A1Fit& f = rep.fit;

  const bool constant = *hi - *lo <= thresh;
  const bool a1_ok = f.beta_identified && !f.beta_at_boundary && f.beta_hat > 0.0 && f.beta_hat < 1.0 &&
                     f.epsilon_hat <= thresh;
  const bool flat_fit = a1_ok && std::abs(f.amplitude) < thresh;

  if (constant || flat_fit) {
    rep.verdict = Verdict::Monofractal;
    const double beta = f.beta_identified && f.beta_hat > 0.0 && f.beta_hat < 1.0 ? f.beta_hat : 0.5;
    rep.law = ScalingLaw{f.delta_inf_hat / series.k, 0.0, beta, series.k};
  } else if (a1_ok) {
    rep.verdict = Verdict::A1Holds;
    if (f.delta0_hat() >= f.delta_inf_hat)
      rep.law = law_from_deltas(f.delta0_hat(), f.delta_inf_hat, f.beta_hat, series.k);
    else
      rep.verdict = Verdict::Other;  // contraction with negative concentration
  } else if (is_affine(y, thresh)) {
    rep.verdict = Verdict::AffineDivergent;
  } else if (is_power_decay(y, thresh)) {
    rep.verdict = Verdict::PowerDecay;
  } else {
    rep.verdict = Verdict::Other;
  }
  return rep;
}

A1Report classify(const DeltaSeries& series) { return classify(series, default_tolerance(series)); }

A1Report characterize(const DeltaSeries& series, double r, int k, double tol) {
  require(r > 0.0 && r < 1.0, "scale ratio r must lie in (0,1)");
  require(k == series.k, "hierarchy step does not match the delta series");
  A1Report rep = classify(series, tol);
  if (rep.verdict != Verdict::A1Holds)
    throw DomainError("characterization requires verdict a1-holds, got " + to_string(rep.verdict));
  rep.logpoisson = logpoisson_from_scaling(*rep.law, r);
  return rep;
}

A1Report characterize(const DeltaSeries& series, double r, int k) {
  return characterize(series, r, k, default_tolerance(series));
}

std::string series_digest(const DeltaSeries& series) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(series.k));
  for (const auto& e : series.entries) {
    mix(static_cast<std::uint64_t>(e.m));
    mix(std::bit_cast<std::uint64_t>(e.delta));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cascsym
