#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "nru/pmf.hpp"

namespace nru {

// G(n, r) = sum_{i<=n} rho^i/i! sum_{j<=r} p^(i)_j for the aggregated flow of
// the licensed loss queue with K servers and R resource units.
//
// Values are held relative to a common scale factor so that large loads do
// not overflow; ratios are exact.
class GTable {
 public:
  GTable(unsigned servers, std::size_t resources, double load, const DiscretePmf& pmf);

  unsigned servers() const noexcept { return k_; }
  std::size_t resources() const noexcept { return r_; }
  double load() const noexcept { return rho_; }

  // G(n, r) itself; may overflow to inf for very large loads. Zero for r < 0.
  double value(int n, std::ptrdiff_t r) const;
  // G(n, r) / G(K, R).
  double relative(int n, std::ptrdiff_t r) const;
  double empty_probability() const { return relative(0, 0); }
  // 1 - G(K-1, room) / G(K, R), summed over the blocked states so that small
  // losses keep their relative precision.
  double blocked_relative(std::ptrdiff_t room) const;

  // rho^k/k! p^(k)_r / G(K, R): the product-form stationary probability.
  double state_probability(unsigned k, std::size_t r) const;

 private:
  double scaled(int n, std::ptrdiff_t r) const;

  unsigned k_;
  std::size_t r_;
  double rho_;
  double log_scale_;
  std::vector<double> term_;           // rho^i/i! / scale, i = 0..K
  std::vector<std::vector<double>> conv_;  // p^(i)_j, j = 0..R
  std::vector<double> g_;              // scaled G, row-major (K+1) x (R+1)
  std::vector<double> tail_;           // sum_{n<K} term_n sum_{s>r} p^(n)_s, r = 0..R
  double full_ = 0.0;                  // term_K sum_s p^(K)_s
};

// P_k(r) for k = 0..K, r = 0..R.
struct StationaryDistribution {
  std::vector<std::vector<double>> p;
  double total() const noexcept;
};

inline constexpr double kMaxMaterializedStates = 1e7;

StationaryDistribution stationary_distribution(const GTable& g);

// sum_i p_i (1 - G(K-1, R-i) / G(K, R)).
double class_loss_probability(const GTable& g, const DiscretePmf& class_pmf);
// Loss of a session that needs exactly j units.
double demand_loss_probability(const GTable& g, std::size_t units);
// The same loss summed directly over the stationary states.
double class_loss_probability(const StationaryDistribution& st, const DiscretePmf& class_pmf);

enum class Strategy { baseline, fat, slim };

std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);

// Threshold sentinel for "no threshold": fat with R_F = inf.
inline constexpr long kInfiniteThreshold = std::numeric_limits<long>::max();

struct StrategySplit {
  Strategy strategy = Strategy::baseline;
  long threshold = 0;
  // Probability that an offloadable session goes to the unlicensed band
  // without trying the licensed one.
  double pi_direct = 0.0;
  DiscretePmf class2;            // full offloadable demand pmf
  DiscretePmf class2_licensed;   // offloadable demand routed to licensed; empty if pi_direct = 1
  DiscretePmf licensed_pmf;      // aggregate of both classes in the licensed band
  double load1 = 0.0;
  double load2 = 0.0;            // licensed share of the class-2 load
  double licensed_load() const noexcept { return load1 + load2; }
  // True if demand j goes straight to the unlicensed band.
  bool routed_direct(std::size_t j) const noexcept;
};

// Fat: j > threshold offloaded directly. Slim: j <= threshold offloaded directly.
// Baseline ignores the threshold.
StrategySplit make_strategy_split(Strategy strategy, const DiscretePmf& p1, const DiscretePmf& p2, double lambda1,
                                  double lambda2, double mu, long threshold);

// Probability that an offloadable session ends up in the unlicensed band.
double offload_probability(const StrategySplit& split, const GTable& g);

// Demand pmf of sessions that reach the unlicensed band.
DiscretePmf offloaded_demand_pmf(const StrategySplit& split, const GTable& g);
// The same pmf computed from the stationary state probabilities.
DiscretePmf offloaded_demand_pmf(const StrategySplit& split, const StationaryDistribution& st);

// Erlang-B blocking probability by the standard recursion.
double erlang_b(unsigned servers, double load);

}  // namespace nru
