#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nru/chanstat.hpp"
#include "nru/geometry.hpp"
#include "nru/lbt.hpp"
#include "nru/numeric.hpp"
#include "nru/oracle.hpp"
#include "nru/report_io.hpp"
#include "nru/resq.hpp"
#include "nru/rng.hpp"

namespace nru::cli {

namespace {

constexpr std::uint64_t kMinChiSquareSamples = 50;

CheckStatus status_of(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

// Batch-means sigma floored by the binomial standard error at the analytical value.
CheckRow proportion_check(std::string stage, std::string check, const EstimateWithCI& est, double analytic,
                          double trials, double sigmas) {
  const double p = std::clamp(analytic, 0.0, 1.0);
  const double binomial = trials > 0.0 ? std::sqrt(p * (1.0 - p) / trials) : 0.0;
  const double tol = sigmas * std::max(est.sigma, binomial);
  return {std::move(stage), std::move(check), est.value, analytic, tol,
          status_of(std::abs(est.value - analytic) <= tol)};
}

CheckRow sigma_check(std::string stage, std::string check, const EstimateWithCI& est, double analytic,
                     double sigmas) {
  return {std::move(stage), std::move(check), est.value, analytic, sigmas * est.sigma,
          status_of(est.within_sigmas(analytic, sigmas))};
}

CheckRow abs_check(std::string stage, std::string check, double value, double reference, double tol) {
  return {std::move(stage), std::move(check), value, reference, tol, status_of(std::abs(value - reference) <= tol)};
}

SimControl control(const ValidateConfig& v, std::uint64_t budget, std::uint64_t salt) {
  SimControl c;
  c.seed = CounterRng::mix64(v.seed + salt);
  c.budget = budget;
  c.batches = v.batches;
  c.confidence = v.confidence;
  return c;
}

void geometry_checks(const Scenario& sc, const PreparedCell& cell, const ValidateConfig& v, const std::string& at,
                     std::vector<CheckRow>& rows) {
  const LinkModel lic(sc.deployment, sc.licensed, sc.deployment.bs_height);
  const double r = cell.licensed_coverage.r_cell;
  const auto est = mc_mean_blockage(r, sc.deployment, sc.deployment.bs_height, control(v, v.mc_samples, 1));
  rows.push_back(sigma_check("geometry", "mean blockage over the cell" + at, est,
                             mean_blockage_probability(r, sc.deployment, sc.deployment.bs_height), v.sigmas));
  const double rs = cell.licensed_coverage.r_sinr;
  const double dh = lic.height_offset();
  const double y = std::sqrt(rs * rs + dh * dh);
  const double s = lic.gain_constant() * std::pow(y, -sc.licensed.exponent_blocked) / lic.fading_margin_blocked();
  rows.push_back(abs_check("geometry", "coverage radius round trip, relative" + at,
                           s / db_to_linear(sc.licensed.outage_sinr_db) - 1.0, 0.0, 1e-9));
}

void chanstat_checks(const Scenario& sc, const PreparedCell& cell, const ValidateConfig& v, const std::string& at,
                     std::vector<CheckRow>& rows) {
  const LinkModel lic(sc.deployment, sc.licensed, sc.deployment.bs_height);
  const Region disk = Region::disk(cell.r_wigig);
  double worst = 0.0;
  for (LinkState st : {LinkState::los, LinkState::blocked}) {
    const PropagationBranch b = propagation_branch(lic, st);
    for (int i = 0; i <= 200; ++i) {
      const double x = -40.0 + 0.5 * i;
      worst = std::max(worst, std::abs(sinr_cdf_with_fading(x, disk, lic.height_offset(), b) -
                                       sinr_cdf_closed_form(x, disk, lic.height_offset(), b)));
    }
  }
  rows.push_back(abs_check("chanstat", "fading CDF quadrature vs erf form, max abs" + at, worst, 0.0, 1e-6));
  const auto est = mc_demand_mean(disk, lic, sc.licensed_mcs, sc.traffic.min_rate_bps, sc.resource_unit_bw_hz,
                                  cell.resources, control(v, v.mc_samples, 2));
  rows.push_back(sigma_check("chanstat", "offloadable demand mean" + at, est, cell.type2.pmf.mean(), v.sigmas));
}

void resq_checks(const Scenario& sc, const PreparedCell& cell, const ValidateConfig& v, const std::string& at,
                 std::uint64_t salt, std::vector<CheckRow>& rows) {
  const SimControl base = control(v, v.resq_arrivals, 0);
  const double measured = static_cast<double>(v.resq_arrivals) * (1.0 - base.warmup_fraction);
  const double lambda = cell.arrivals.lambda1 + cell.arrivals.lambda2;
  for (Strategy s : {Strategy::baseline, Strategy::fat, Strategy::slim}) {
    const StrategyReport rep = evaluate_strategy(sc, cell, s);
    const double phi1 = rep.infeasible_type1;
    const double phi2 = rep.infeasible_type2;
    LossSystem sys;
    sys.servers = cell.servers;
    sys.resources = cell.resources;
    sys.lambda1 = cell.arrivals.lambda1 * (1.0 - phi1);
    sys.lambda2 = cell.arrivals.lambda2 * (1.0 - phi2);
    sys.mu = sc.traffic.service_rate;
    if (cell.type1) sys.p1 = cell.type1->pmf;
    sys.p2 = cell.type2.pmf;
    sys.strategy = s;
    sys.threshold = rep.threshold;
    const auto sim = simulate_resq(sys, control(v, v.resq_arrivals, salt + static_cast<std::uint64_t>(s)));
    const std::string name(to_string(s));
    // Simulated sessions are the feasible ones.
    rows.push_back(proportion_check("resq", name + " offload probability" + at, sim.offload_type2,
                                    (rep.pi_su - phi2) / (1.0 - phi2),
                                    measured * cell.arrivals.lambda2 / lambda, v.sigmas));
    if (cell.type1)
      rows.push_back(proportion_check("resq", name + " type-1 loss" + at, sim.loss_type1,
                                      (rep.pi_sl - phi1) / (1.0 - phi1),
                                      measured * cell.arrivals.lambda1 / lambda, v.sigmas));
    const std::string hist = name + " offloaded demand chi-square" + at;
    if (rep.offloaded.empty()) {
      rows.push_back({"resq", hist, 0.0, 0.0, 0.0, CheckStatus::skip});
      continue;
    }
    const auto chi = chi_square_test(sim.offloaded_histogram, rep.offloaded, 0.99);
    const bool informative = chi.samples >= kMinChiSquareSamples;
    rows.push_back({"resq", hist, chi.statistic, static_cast<double>(chi.dof), chi.critical,
                    informative ? status_of(chi.pass) : CheckStatus::skip});
  }
}

}  // namespace

const char* to_string(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::skip: return "SKIP";
  }
  return "?";
}

std::vector<CheckRow> run_validation(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const ValidateConfig& v = cfg.validate;
  std::vector<CheckRow> rows;

  const PreparedCell cell = prepare_cell(sc);
  geometry_checks(sc, cell, v, "", rows);
  chanstat_checks(sc, cell, v, "", rows);

  double worst = 0.0;
  for (unsigned k = 1; k <= 50; ++k)
    for (double rho : {0.1, 1.0, 10.0}) {
      const GTable g(k, k, rho, DiscretePmf::point_mass(1));
      worst = std::max(worst, std::abs(class_loss_probability(g, DiscretePmf::point_mass(1)) - erlang_b(k, rho)));
    }
  rows.push_back(abs_check("resq", "unit-demand loss vs Erlang-B, max abs", worst, 0.0, 1e-12));
  const DiscretePmf small({0.0, 0.4, 0.35, 0.25});
  const GTable g(3, 6, 1.7, small);
  rows.push_back(abs_check("resq", "product form vs queue CTMC, total variation",
                           total_variation(stationary_distribution(g), exact_ctmc_resq(3, 6, 1.7, small)), 0.0,
                           1e-9));
  resq_checks(sc, cell, v, "", 10, rows);

  if (!cfg.sweep.densities.empty() && cfg.sweep.densities.front() != sc.deployment.bs_density) {
    Scenario loaded = sc;
    loaded.deployment.bs_density = cfg.sweep.densities.front();
    const std::string at = " @ density " + format_number(loaded.deployment.bs_density);
    const PreparedCell lc = prepare_cell(loaded);
    geometry_checks(loaded, lc, v, at, rows);
    resq_checks(loaded, lc, v, at, 20, rows);
  }

  ContentionConfig tiny = sc.contention;
  tiny.cw_nru = tiny.cw_wigig = 2;
  tiny.max_retries = 0;
  tiny.blockage_prob = 0.0;
  const auto exact = exact_lbt_chain(2, 0, tiny);
  const auto sim = simulate_lbt(2, 0, tiny, control(v, v.lbt_slots, 30));
  rows.push_back(sigma_check("lbt", "slot simulator vs exact chain, 2 stations W=2 T=0, p_c", sim.collision_nru,
                             exact.collision_nru, v.sigmas));

  ContentionConfig cc = sc.contention;
  cc.blockage_prob = cell.unlicensed_blockage;
  const ContentionPoint pt = solve_contention(5, 5, cc);
  const auto s55 = simulate_lbt(5, 5, cc, control(v, v.lbt_slots, 31));
  rows.push_back(sigma_check("lbt", "fixed point vs slot simulation at (5,5), NR-U p_c", s55.collision_nru,
                             pt.nru->p_c, v.sigmas));
  rows.push_back(
      sigma_check("lbt", "fixed point vs slot simulation at (5,5), NR-U pi", s55.pi_nru, pt.nru->pi, v.sigmas));
  return rows;
}

void write_validation_csv(std::ostream& out, const std::vector<CheckRow>& rows) {
  out << "stage,check,value,reference,tolerance,status\n";
  for (const auto& r : rows)
    out << r.stage << ",\"" << r.check << "\"," << format_number(r.value) << ',' << format_number(r.reference) << ','
        << format_number(r.tolerance) << ',' << to_string(r.status) << '\n';
}

}  // namespace nru::cli
