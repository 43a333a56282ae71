#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nru/chanstat.hpp"
#include "nru/geometry.hpp"
#include "nru/lbt.hpp"
#include "nru/mcs.hpp"
#include "nru/resq.hpp"

namespace nru {

struct TrafficConfig {
  double session_rate = 0.05;        // lambda_S, sessions/s per active NR-U UE
  double wigig_session_rate = 0.03;  // lambda_S,W
  double nru_active_prob = 0.1;
  double wigig_active_prob = 0.1;
  double service_rate = 0.1;         // mu, 1/s
  double wigig_service_rate = 0.01;  // mu_W, 1/s
  double min_rate_bps = 50e6;

  void validate() const;
};

enum class LossWeight {
  as_printed,   // (lambda1 + lambda2 (1 - pi_sU)) / lambda
  type1_only,   // lambda1 / lambda
};

struct Scenario {
  DeploymentConfig deployment;
  RadioConfig licensed = RadioConfig::nr_licensed();
  RadioConfig unlicensed = RadioConfig::wigig_unlicensed();
  TrafficConfig traffic;
  ContentionConfig contention;  // blockage_prob is overwritten from the geometry
  McsTable licensed_mcs;
  McsTable unlicensed_mcs;
  double resource_unit_bw_hz = 1.44e6;
  unsigned servers = 0;              // K; 0 means K = R
  std::optional<long> fat_threshold;   // R_F; unset means floor of the mean offloadable demand
  std::optional<long> slim_threshold;  // R_S; same default
  UnlicensedMapMode rate_map = UnlicensedMapMode::distance_midpoint;
  LossWeight loss_weight = LossWeight::as_printed;
  bool infeasible_counts_as_violation = false;
  double truncation_mass = 1e-9;

  // Defaults with the shipped MCS tables.
  static Scenario defaults();
  void validate() const;
};

struct Arrivals {
  double lambda = 0.0;
  double lambda1 = 0.0;  // ring, licensed only
  double lambda2 = 0.0;  // disk, offloadable
  double lambda_wigig = 0.0;
};

Arrivals split_arrivals(const DeploymentConfig& dep, const TrafficConfig& traffic, double r_nru, double r_wigig);

// Strategy-independent stages of one cell.
struct PreparedCell {
  CoverageResult licensed_coverage;
  double r_wigig_sinr = 0.0;
  double r_wigig = 0.0;
  std::size_t resources = 0;
  unsigned servers = 0;
  std::optional<DemandPmf> type1;  // absent when the ring is empty
  DemandPmf type2;
  Arrivals arrivals;
  double unlicensed_blockage = 0.0;
  std::vector<double> unlicensed_efficiency;  // m_j
  double wigig_mean_efficiency = 0.0;
};

PreparedCell prepare_cell(const Scenario& sc);

struct StrategyReport {
  Strategy strategy = Strategy::baseline;
  long threshold = 0;
  double bs_density = 0.0;
  double r_nru = 0.0;
  double r_wigig = 0.0;
  std::size_t resources = 0;
  unsigned servers = 0;
  Arrivals arrivals;
  double lambda_su = 0.0;
  double pi_direct = 0.0;
  double pi_sl = 0.0;
  double pi_su = 0.0;
  double success_nru = 0.0;    // Pi_N
  double success_wigig = 0.0;  // Pi_W
  double collision_nru = 0.0;
  double mean_rate_nru = 0.0;  // E[R^N_sU]
  double mean_rate_wigig = 0.0;
  double q_su = 0.0;
  double q_s = 0.0;
  double mean_demand_type1 = 0.0;
  double mean_demand_type2 = 0.0;
  double infeasible_type1 = 0.0;
  double infeasible_type2 = 0.0;
  double unlicensed_blockage = 0.0;
  DiscretePmf offloaded;  // empty when nothing is offloaded
  unsigned fixed_point_iterations = 0;
  double truncated_mass = 0.0;
};

StrategyReport evaluate_strategy(const Scenario& sc, const PreparedCell& cell, Strategy strategy);
StrategyReport evaluate_strategy(const Scenario& sc, Strategy strategy);

// sum of the loss-probability parts, exposed for direct checks.
double eventual_loss(const Arrivals& a, double pi_sl, double pi_su, double q_su, LossWeight weight);

struct DensitySweep {
  std::vector<StrategyReport> reports;  // density-major, strategies in the given order
  // First grid density whose Q_s <= target, per strategy; unset if unattained.
  std::vector<std::optional<double>> minimal_density;
};

DensitySweep density_sweep(const Scenario& sc, const std::vector<double>& densities,
                           const std::vector<Strategy>& strategies, double target_q_s = 0.01, unsigned jobs = 1);

// W-independent inputs of the rate-fairness problem.
struct FairnessInputs {
  double load_nru = 0.0;
  double load_wigig = 0.0;
  double efficiency_nru = 0.0;    // sum_j p_j,sU m_j
  double efficiency_wigig = 0.0;
  double bandwidth_hz = 0.0;
  ContentionConfig contention;
  double truncation_mass = 1e-9;
};

struct FairnessResult {
  unsigned cw_nru = 0;
  double rate_gap = 0.0;  // E[R^N] - E[R^W]
  unsigned evaluations = 0;
};

double rate_gap(const FairnessInputs& in, unsigned cw_nru);
FairnessResult fairness_search(const FairnessInputs& in, double rate_tolerance, unsigned cw_max = 4096);
FairnessInputs fairness_inputs(const Scenario& sc, Strategy strategy = Strategy::baseline);

}  // namespace nru
