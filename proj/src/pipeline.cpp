#include "nru/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "nru/error.hpp"
#include "nru/numeric.hpp"

#ifndef NRU_DATA_DIR
#define NRU_DATA_DIR "data"
#endif

namespace nru {

namespace {

template <class F>
auto staged(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.stage().empty()) throw e.with_stage(name);
    throw;
  }
}

}  // namespace

void TrafficConfig::validate() const {
  require(session_rate > 0.0 && wigig_session_rate > 0.0, ErrorCode::config, "session rates must be positive");
  require(service_rate > 0.0 && wigig_service_rate > 0.0, ErrorCode::config, "service rates must be positive");
  require(min_rate_bps > 0.0, ErrorCode::config, "minimum rate must be positive");
  require(nru_active_prob > 0.0 && nru_active_prob <= 1.0 && wigig_active_prob > 0.0 && wigig_active_prob <= 1.0,
          ErrorCode::config, "active-session probabilities must lie in (0, 1]");
}

Scenario Scenario::defaults() {
  Scenario sc;
  sc.licensed_mcs = McsTable::load(std::string(NRU_DATA_DIR) + "/mcs_nr_28ghz.txt");
  sc.unlicensed_mcs = McsTable::load(std::string(NRU_DATA_DIR) + "/mcs_80211ad.txt");
  return sc;
}

void Scenario::validate() const {
  deployment.validate();
  licensed.validate();
  unlicensed.validate();
  traffic.validate();
  require(resource_unit_bw_hz > 0.0 && resource_unit_bw_hz <= licensed.bandwidth_hz, ErrorCode::config,
          "resource unit bandwidth must lie in (0, licensed bandwidth]");
  require(licensed_mcs.size() > 0 && unlicensed_mcs.size() > 0, ErrorCode::config, "MCS tables must be loaded");
  require(truncation_mass > 0.0 && truncation_mass <= 1e-6, ErrorCode::config, "truncation mass must lie in (0, 1e-6]");
  require(deployment.bs_density > 0.0, ErrorCode::config, "BS density must be positive");
}

Arrivals split_arrivals(const DeploymentConfig& dep, const TrafficConfig& traffic, double r_nru, double r_wigig) {
  require(r_nru > 0.0 && r_wigig > 0.0, ErrorCode::invalid_geometry, "coverage radii must be positive");
  require(r_wigig <= r_nru, ErrorCode::invalid_geometry, "unlicensed radius exceeds the licensed radius");
  Arrivals a;
  a.lambda = dep.nru_ue_density * kPi * r_nru * r_nru * traffic.nru_active_prob * traffic.session_rate;
  const double ratio = r_wigig / r_nru;
  a.lambda2 = a.lambda * ratio * ratio;
  a.lambda1 = a.lambda - a.lambda2;
  a.lambda_wigig =
      dep.wigig_ue_density * kPi * r_wigig * r_wigig * traffic.wigig_active_prob * traffic.wigig_session_rate;
  return a;
}

PreparedCell prepare_cell(const Scenario& sc) {
  sc.validate();
  PreparedCell cell;
  const LinkModel lic = staged("geometry", [&] { return LinkModel(sc.deployment, sc.licensed, sc.deployment.bs_height); });
  const LinkModel unl = staged("geometry", [&] { return LinkModel(sc.deployment, sc.unlicensed, sc.deployment.ap_height); });
  staged("geometry", [&] {
    cell.licensed_coverage = coverage(lic, sc.deployment.bs_density);
    cell.r_wigig_sinr = coverage_radius_sinr(unl);
    return 0;
  });
  const double r_n = cell.licensed_coverage.r_cell;
  cell.r_wigig = std::min(cell.r_wigig_sinr, r_n);
  if (cell.r_wigig >= r_n * (1.0 - 1e-12)) cell.r_wigig = r_n;
  cell.resources = static_cast<std::size_t>(std::floor(sc.licensed.bandwidth_hz / sc.resource_unit_bw_hz + 1e-9));
  cell.servers = sc.servers > 0 ? sc.servers : static_cast<unsigned>(cell.resources);

  staged("chanstat", [&] {
    if (cell.r_wigig < r_n)
      cell.type1 = demand_pmf(Region::annulus(cell.r_wigig, r_n), lic, sc.licensed_mcs, sc.traffic.min_rate_bps,
                              sc.resource_unit_bw_hz, cell.resources);
    const Region disk = Region::disk(cell.r_wigig);
    cell.type2 =
        demand_pmf(disk, lic, sc.licensed_mcs, sc.traffic.min_rate_bps, sc.resource_unit_bw_hz, cell.resources);
    cell.unlicensed_efficiency =
        unlicensed_efficiency_map(cell.type2, disk, lic, unl, sc.unlicensed_mcs, sc.rate_map);
    cell.wigig_mean_efficiency = mean_mcs_efficiency(SinrDistribution(disk, unl), sc.unlicensed_mcs);
    cell.unlicensed_blockage = mean_blockage_probability(cell.r_wigig, sc.deployment, sc.deployment.ap_height);
    return 0;
  });
  cell.arrivals = staged("pipeline", [&] { return split_arrivals(sc.deployment, sc.traffic, r_n, cell.r_wigig); });
  return cell;
}

double eventual_loss(const Arrivals& a, double pi_sl, double pi_su, double q_su, LossWeight weight) {
  if (!(a.lambda > 0.0)) return 0.0;
  const double licensed_weight =
      weight == LossWeight::as_printed ? (a.lambda1 + a.lambda2 * (1.0 - pi_su)) / a.lambda : a.lambda1 / a.lambda;
  return std::clamp(licensed_weight * pi_sl + a.lambda2 * pi_su / a.lambda * q_su, 0.0, 1.0);
}

StrategyReport evaluate_strategy(const Scenario& sc, const PreparedCell& cell, Strategy strategy) {
  StrategyReport rep;
  rep.strategy = strategy;
  rep.bs_density = sc.deployment.bs_density;
  rep.r_nru = cell.licensed_coverage.r_cell;
  rep.r_wigig = cell.r_wigig;
  rep.resources = cell.resources;
  rep.servers = cell.servers;
  rep.arrivals = cell.arrivals;
  rep.unlicensed_blockage = cell.unlicensed_blockage;
  rep.mean_demand_type2 = cell.type2.pmf.mean();
  rep.infeasible_type2 = cell.type2.infeasible_mass;
  if (cell.type1) {
    rep.mean_demand_type1 = cell.type1->pmf.mean();
    rep.infeasible_type1 = cell.type1->infeasible_mass;
  }

  const DiscretePmf& p2 = cell.type2.pmf;
  const DiscretePmf p1 = cell.type1 ? cell.type1->pmf : DiscretePmf{};
  const auto auto_threshold = static_cast<long>(std::floor(p2.mean()));
  long threshold = kInfiniteThreshold;
  if (strategy == Strategy::fat) threshold = sc.fat_threshold.value_or(auto_threshold);
  if (strategy == Strategy::slim) threshold = sc.slim_threshold.value_or(auto_threshold);
  rep.threshold = threshold;

  // Sessions below the first MCS threshold or above R units form a bucket at
  // R+1 units: lost on arrival in the licensed band, routed like any other
  // demand of that size.
  const double phi1 = rep.infeasible_type1;
  const double phi2 = rep.infeasible_type2;
  const StrategySplit split = staged("resq", [&] {
    return make_strategy_split(strategy, p1, p2, cell.arrivals.lambda1 * (1.0 - phi1),
                               cell.arrivals.lambda2 * (1.0 - phi2), sc.traffic.service_rate, threshold);
  });
  const GTable g = staged("resq", [&] {
    return GTable(cell.servers, cell.resources, split.licensed_load(), split.licensed_pmf);
  });
  staged("resq", [&] {
    const bool bucket_direct = split.routed_direct(cell.resources + 1);
    rep.pi_direct = (bucket_direct ? phi2 : 0.0) + (1.0 - phi2) * split.pi_direct;
    rep.pi_su = phi2 + (1.0 - phi2) * offload_probability(split, g);
    if (cell.type1) {
      rep.pi_sl = phi1 + (1.0 - phi1) * class_loss_probability(g, p1);
    } else {
      const double bucket = bucket_direct ? 0.0 : phi2;
      const double feasible = (1.0 - phi2) * (1.0 - split.pi_direct);
      const double loss = class_loss_probability(g, split.licensed_pmf);
      rep.pi_sl = bucket + feasible > 0.0 ? (bucket + feasible * loss) / (bucket + feasible) : loss;
    }
    if (rep.pi_su - phi2 > 0.0) rep.offloaded = offloaded_demand_pmf(split, g);
    return 0;
  });
  rep.lambda_su = cell.arrivals.lambda2 * rep.pi_su;

  staged("lbt", [&] {
    ContentionConfig cc = sc.contention;
    cc.blockage_prob = cell.unlicensed_blockage;
    const ContentionSolver solver(cc);
    const MixedContention mix = mixed_contention(rep.lambda_su / sc.traffic.service_rate,
                                                 cell.arrivals.lambda_wigig / sc.traffic.wigig_service_rate, solver,
                                                 sc.truncation_mass);
    rep.success_nru = mix.success_nru;
    rep.success_wigig = mix.success_wigig;
    rep.collision_nru = mix.collision_nru;
    rep.truncated_mass = mix.truncated_mass;
    rep.fixed_point_iterations = solver.max_iterations_used();
    const double bw = sc.unlicensed.bandwidth_hz;
    rep.mean_rate_wigig = rep.success_wigig * bw * cell.wigig_mean_efficiency;
    if (!rep.offloaded.empty()) {
      const AttainedRates rates = attained_rates(rep.success_nru, rep.offloaded, cell.unlicensed_efficiency, bw);
      rep.mean_rate_nru = rates.mean;
      rep.q_su = qos_violation(rates, rep.offloaded, sc.traffic.min_rate_bps);
    }
    if (sc.infeasible_counts_as_violation)
      rep.q_su = rep.infeasible_type2 + (1.0 - rep.infeasible_type2) * rep.q_su;
    return 0;
  });

  rep.q_s = eventual_loss(cell.arrivals, rep.pi_sl, rep.pi_su, rep.q_su, sc.loss_weight);
  return rep;
}

StrategyReport evaluate_strategy(const Scenario& sc, Strategy strategy) {
  return evaluate_strategy(sc, prepare_cell(sc), strategy);
}

DensitySweep density_sweep(const Scenario& sc, const std::vector<double>& densities,
                           const std::vector<Strategy>& strategies, double target_q_s, unsigned jobs) {
  require(!densities.empty(), ErrorCode::config, "density grid is empty");
  require(!strategies.empty(), ErrorCode::config, "no strategy selected");
  for (std::size_t i = 1; i < densities.size(); ++i)
    require(densities[i] > densities[i - 1], ErrorCode::config, "density grid must be strictly ascending");

  const std::size_t n = densities.size();
  const std::size_t m = strategies.size();
  DensitySweep out;
  out.reports.resize(n * m);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        Scenario point = sc;
        point.deployment.bs_density = densities[i];
        const PreparedCell cell = prepare_cell(point);
        for (std::size_t s = 0; s < m; ++s) out.reports[i * m + s] = evaluate_strategy(point, cell, strategies[s]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  out.minimal_density.assign(m, std::nullopt);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t i = 0; i < n; ++i)
      if (out.reports[i * m + s].q_s <= target_q_s) {
        out.minimal_density[s] = densities[i];
        break;
      }
  return out;
}

double rate_gap(const FairnessInputs& in, unsigned cw_nru) {
  ContentionConfig cc = in.contention;
  cc.cw_nru = cw_nru;
  const ContentionSolver solver(cc);
  const MixedContention mix = mixed_contention(in.load_nru, in.load_wigig, solver, in.truncation_mass);
  return in.bandwidth_hz * (mix.success_nru * in.efficiency_nru - mix.success_wigig * in.efficiency_wigig);
}

FairnessResult fairness_search(const FairnessInputs& in, double rate_tolerance, unsigned cw_max) {
  require(rate_tolerance > 0.0, ErrorCode::domain, "rate tolerance must be positive");
  require(cw_max >= 1, ErrorCode::domain, "window bound must be at least one slot");
  FairnessResult best;
  const auto eval = [&](unsigned w) {
    const double g = rate_gap(in, w);
    ++best.evaluations;
    return g;
  };
  const unsigned w0 = in.contention.cw_nru;
  const double g0 = eval(w0);
  best.cw_nru = w0;
  best.rate_gap = g0;
  if (std::abs(g0) <= rate_tolerance) return best;

  const auto consider = [&](unsigned w, double g) {
    if (std::abs(g) < std::abs(best.rate_gap)) {
      best.cw_nru = w;
      best.rate_gap = g;
    }
  };
  unsigned lo = 1, hi = std::max(cw_max, w0);
  double g_lo = eval(lo), g_hi = eval(hi);
  consider(lo, g_lo);
  consider(hi, g_hi);
  if ((g_lo > 0.0) == (g_hi > 0.0)) return best;
  while (hi - lo > 1) {
    const unsigned mid = lo + (hi - lo) / 2;
    const double g = eval(mid);
    if (std::abs(g) <= rate_tolerance) {
      best.cw_nru = mid;
      best.rate_gap = g;
      return best;
    }
    consider(mid, g);
    if ((g > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g;
    } else {
      hi = mid;
      g_hi = g;
    }
  }
  return best;
}

FairnessInputs fairness_inputs(const Scenario& sc, Strategy strategy) {
  const PreparedCell cell = prepare_cell(sc);
  const StrategyReport rep = evaluate_strategy(sc, cell, strategy);
  FairnessInputs in;
  in.load_nru = rep.lambda_su / sc.traffic.service_rate;
  in.load_wigig = cell.arrivals.lambda_wigig / sc.traffic.wigig_service_rate;
  const DiscretePmf& weights = rep.offloaded.empty() ? cell.type2.pmf : rep.offloaded;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (weights[j] > 0.0) in.efficiency_nru += weights[j] * cell.unlicensed_efficiency[j];
  in.efficiency_wigig = cell.wigig_mean_efficiency;
  in.bandwidth_hz = sc.unlicensed.bandwidth_hz;
  in.contention = sc.contention;
  in.contention.blockage_prob = cell.unlicensed_blockage;
  in.truncation_mass = sc.truncation_mass;
  return in;
}

}  // namespace nru
