#pragma once

#include <cstddef>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nru/chanstat.hpp"
#include "nru/geometry.hpp"
#include "nru/lbt.hpp"
#include "nru/pmf.hpp"
#include "nru/resq.hpp"

namespace nru {

struct SimControl {
  std::uint64_t seed = 1;
  std::uint64_t budget = 1'000'000;  // arrivals, slots or samples depending on the simulator
  double confidence = 0.95;
  unsigned batches = 20;
  double warmup_fraction = 0.05;

  void validate() const;
};

struct EstimateWithCI {
  double value = 0.0;
  double half_width = 0.0;
  unsigned batches = 0;
  // Standard error implied by the half width at the given confidence.
  double sigma = 0.0;

  bool covers(double x) const noexcept { return std::abs(x - value) <= half_width; }
  bool within_sigmas(double x, double k) const noexcept { return std::abs(x - value) <= k * sigma; }
};

// Batch-means estimate and Student-t half width from per-batch values.
EstimateWithCI batch_estimate(const std::vector<double>& batch_values, double confidence);

// Two-class loss system: type 1 is lost when blocked, type 2 goes to the
// unlicensed band when blocked or when the strategy routes it there directly.
struct LossSystem {
  unsigned servers = 1;
  std::size_t resources = 1;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double mu = 1.0;
  DiscretePmf p1;  // may be empty when lambda1 = 0
  DiscretePmf p2;
  Strategy strategy = Strategy::baseline;
  long threshold = 0;
};

struct ResqSimResult {
  EstimateWithCI loss_type1;       // blocked fraction of type-1 arrivals
  EstimateWithCI offload_type2;    // fraction of type-2 arrivals ending in the unlicensed band
  std::vector<std::uint64_t> offloaded_histogram;  // counts per demand level
  std::uint64_t max_occupied = 0;
};

ResqSimResult simulate_resq(const LossSystem& sys, const SimControl& ctl);

struct ChiSquareResult {
  double statistic = 0.0;
  double critical = 0.0;
  unsigned dof = 0;
  std::uint64_t samples = 0;
  bool pass = false;
};

// Pearson test of observed counts against a pmf, merging adjacent levels
// until each bin expects at least min_expected samples.
ChiSquareResult chi_square_test(const std::vector<std::uint64_t>& counts, const DiscretePmf& expected,
                                double level = 0.99, double min_expected = 5.0);

struct LbtSimResult {
  EstimateWithCI pi_nru, pi_wigig;
  EstimateWithCI collision_nru, collision_wigig;
  EstimateWithCI success_nru, success_wigig;  // per-attempt success probability
  EstimateWithCI slot_success_nru;            // successes per NR-U station per slot
  std::uint64_t slots = 0;
};

// Slot-synchronous saturated contention: backoff uniform on {0..CW-1}, window
// doubling per failure, reset after T retries, Bernoulli blockage per attempt.
LbtSimResult simulate_lbt(unsigned n_nru, unsigned n_wigig, const ContentionConfig& cfg, const SimControl& ctl);

struct ExactLbtResult {
  double pi_nru = 0.0, pi_wigig = 0.0;
  double collision_nru = 0.0, collision_wigig = 0.0;
  std::size_t states = 0;
};

// Stationary analysis of the joint per-slot Markov chain of all stations.
ExactLbtResult exact_lbt_chain(unsigned n_nru, unsigned n_wigig, const ContentionConfig& cfg,
                               std::size_t max_states = 200000);

// Stationary P_k(r) from the full queue CTMC whose state is the multiset of
// demands in service.
StationaryDistribution exact_ctmc_resq(unsigned servers, std::size_t resources, double load, const DiscretePmf& pmf,
                                       std::size_t max_states = 200000);
double total_variation(const StationaryDistribution& a, const StationaryDistribution& b);

// Monte Carlo checks of the geometric and channel stages.
EstimateWithCI mc_mean_blockage(double radius, const DeploymentConfig& dep, double site_height, const SimControl& ctl);
EstimateWithCI mc_sinr_cdf(double x_db, const Region& region, double height_offset, const PropagationBranch& b,
                           bool shadowing, const SimControl& ctl);
EstimateWithCI mc_demand_mean(const Region& region, const LinkModel& link, const McsTable& mcs, double min_rate_bps,
                              double unit_bw_hz, std::size_t capacity_units, const SimControl& ctl);
EstimateWithCI mc_mean_spectral_efficiency(double radius, const LinkModel& link, const SimControl& ctl);

// Poisson-population average of the tagged NR-U station's per-slot success
// rate, each population measured by the slot simulator.
EstimateWithCI mc_success_probability(double load_nru, double load_wigig, const ContentionConfig& cfg,
                                      std::uint64_t populations, std::uint64_t slots_per_population,
                                      std::uint64_t seed);

}  // namespace nru
