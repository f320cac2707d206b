#pragma once

// Monte Carlo simulation of the branch observable Phi(r^n) = W_1 ... W_n and
// regression estimates of zeta_p and delta_p from structure functions
// S_p(r^n) = <Phi(r^n)^p>.

#include <cstdint>
#include <string>
#include <vector>

#include "cascsym/exponents.hpp"
#include "cascsym/generators.hpp"

namespace cascsym {

struct SimConfig {
  CascadeParams params;
  int n_levels = 8;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
  std::vector<double> p_list;

  void validate() const;
};

/// {0, 1, k, 2k, ..., 6k}, sorted and deduplicated.
std::vector<double> default_p_list(int k);

struct StructureRow {
  double p = 0.0;
  int n = 0;
  double ln_S = 0.0;
  double se = 0.0;
  bool operator==(const StructureRow&) const = default;
};

struct DroppedRow {
  double p = 0.0;
  int n = 0;
  std::string reason;
  bool operator==(const DroppedRow&) const = default;
};

struct StructureTable {
  std::vector<StructureRow> rows;
  std::vector<DroppedRow> dropped;  // rows withheld from the table, with the reason
  double r = 0.5;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  bool operator==(const StructureTable&) const = default;
};

struct ZetaRow {
  double p = 0.0;
  double zeta_hat = 0.0;
  double se = 0.0;
};

struct ZetaEstimate {
  std::vector<ZetaRow> rows;
  std::vector<std::string> warnings;

  const ZetaRow* find(double p) const;
};

/// Rows whose jackknife standard error of ln S_p (the relative error of S_p)
/// exceeds this are dropped as unreliable.
inline constexpr double kMaxRelativeError = 0.5;

StructureTable simulate(const SimConfig& config, const LevyGenerator& gen);

/// Slope of ln S_p against n ln r per order, levels weighted by 1/se^2 (unweighted when
/// any se is zero); se assumes independent levels. zeta_0 is fixed at 0.
ZetaEstimate estimate_zeta(const StructureTable& table);

/// delta_{mk} = zeta_{(m+1)k} - zeta_{mk} for the longest contiguous run of
/// orders 0, k, 2k, ... present in the estimate.
DeltaSeries estimate_deltas(const ZetaEstimate& zeta, int k);
/// As above with an explicit m_max; missing orders raise an error listing them.
DeltaSeries estimate_deltas(const ZetaEstimate& zeta, int k, int m_max);

}  // namespace cascsym
