#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "nru/chanstat.hpp"
#include "nru/geometry.hpp"
#include "nru/mcs.hpp"
#include "nru/pmf.hpp"

namespace nru {

struct ContentionConfig {
  unsigned cw_nru = 16;
  unsigned cw_wigig = 16;
  unsigned max_retries = 3;  // T
  double blockage_prob = 0.0;
  double tolerance = 1e-10;
  unsigned max_iterations = 10000;
  double damping = 0.5;
  // Count the tagged station among its own technology's contenders.
  bool literal_collision = false;

  void validate() const;
};

// Fixed point of one technology population as seen by a tagged station.
struct TechnologyState {
  double pi = 0.0;       // transmit probability per slot
  double theta = 0.0;    // per-attempt success probability
  double p_c = 0.0;      // collision probability
  std::vector<double> q; // retry-stage distribution, length T+1
};

struct ContentionPoint {
  unsigned n_nru = 0;
  unsigned n_wigig = 0;
  std::optional<TechnologyState> nru;    // absent when n_nru = 0
  std::optional<TechnologyState> wigig;  // absent when n_wigig = 0
  unsigned iterations = 0;
  double residual = 0.0;
};

// q_i = (1-theta)^i theta / (1 - (1-theta)^(T+1)).
std::vector<double> retry_distribution(double theta, unsigned max_retries);
// Largest absolute residual of the stage balance equations.
double retry_balance_residual(const std::vector<double>& q, double theta);
// (2^j W + 1) / 2
double mean_backoff_slots(unsigned stage, unsigned cw);
// 1 / sum_j q_j b_j
double transmission_probability(double theta, unsigned cw, unsigned max_retries);
// The same quantity through its closed form; undefined at theta = 1/2.
double transmission_probability_closed_form(double theta, unsigned cw, unsigned max_retries);

ContentionPoint solve_contention(unsigned n_nru, unsigned n_wigig, const ContentionConfig& cfg);

// Memoizes solve_contention over (n_nru, n_wigig). Thread-safe.
class ContentionSolver {
 public:
  explicit ContentionSolver(ContentionConfig cfg);
  const ContentionConfig& config() const noexcept { return cfg_; }
  const ContentionPoint& at(unsigned n_nru, unsigned n_wigig) const;
  // Largest fixed-point iteration count seen so far.
  unsigned max_iterations_used() const;

 private:
  ContentionConfig cfg_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<unsigned, unsigned>, ContentionPoint> cache_;
};

struct MixedContention {
  double success_nru = 0.0;    // Pi_N
  double success_wigig = 0.0;  // Pi_W
  double collision_nru = 0.0;  // Poisson-mixed p_c seen by a tagged NR-U station
  double truncated_mass = 0.0;
  unsigned max_nru = 0;
  unsigned max_wigig = 0;
};

// Poisson(load_nru) x Poisson(load_wigig) mixture over the contenders seen by
// a tagged station, truncated once the residual mass drops below truncation_mass.
MixedContention mixed_contention(double load_nru, double load_wigig, const ContentionSolver& solver,
                                 double truncation_mass = 1e-9);
double success_probability(double load_nru, double load_wigig, const ContentionSolver& solver,
                           double truncation_mass = 1e-9);

enum class UnlicensedMapMode { distance_midpoint, mean_efficiency };

// Unlicensed spectral efficiency m_j per licensed demand level j; NaN where
// no licensed class produces j.
std::vector<double> unlicensed_efficiency_map(const DemandPmf& demand, const Region& region,
                                              const LinkModel& licensed, const LinkModel& unlicensed,
                                              const McsTable& unlicensed_mcs, UnlicensedMapMode mode);

struct AttainedRates {
  std::vector<double> per_class;  // bit/s, indexed by demand level
  double mean = 0.0;
};

AttainedRates attained_rates(double success, const DiscretePmf& offloaded, const std::vector<double>& efficiency,
                             double bandwidth_hz);
// Mass of the demand levels whose rate falls short of min_rate_bps.
double qos_violation(const AttainedRates& rates, const DiscretePmf& offloaded, double min_rate_bps);

}  // namespace nru
