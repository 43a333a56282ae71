// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nru/chanstat.hpp"
#include "nru/config.hpp"
#include "nru/error.hpp"
#include "nru/lbt.hpp"
#include "nru/oracle.hpp"
#include "nru/pipeline.hpp"
#include "nru/report_io.hpp"
#include "nru/resq.hpp"
#include "nru/rng.hpp"
#include "reference.hpp"

using namespace nru;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const std::string kDefaultIni = std::string(NRU_SOURCE_DIR) + "/configs/default.ini";

Outcome erlang_b_equivalence() {
  double worst = 0.0;
  const auto d1 = DiscretePmf::point_mass(1);
  for (unsigned k = 1; k <= 50; ++k)
    for (double rho : {0.1, 1.0, 10.0}) {
      const double loss = class_loss_probability(GTable(k, k, rho, d1), d1);
      worst = std::max(worst, std::abs(loss - erlang_b(k, rho)));
      worst = std::max(worst, std::abs(loss - ref::erlang_b_sum(k, rho)));
    }
  return {worst <= 1e-12, "max |loss - Erlang-B| = " + num(worst) + " over K=R in 1..50, rho in {0.1, 1, 10} (tol 1e-12)"};
}

Outcome g_form_vs_direct() {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<unsigned> kr(1, 20);
  std::uniform_real_distribution<double> load(0.0, 20.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const unsigned K = kr(gen);
    const std::size_t R = kr(gen);
    const auto p = ref::random_pmf(gen, R);
    const auto q = ref::random_pmf(gen, R + 3);
    const double rho = load(gen);
    const GTable g(K, R, rho, DiscretePmf(p));
    const double direct = ref::direct_loss(ref::product_form(K, R, rho, p), q);
    worst = std::max(worst, std::abs(class_loss_probability(g, DiscretePmf(q)) - direct));
  }
  return {worst <= 1e-10, "max |G-form - direct sum| = " + num(worst) + " over 200 instances, K,R <= 20 (tol 1e-10)"};
}

Outcome ctmc_agreement() {
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<unsigned> kk(1, 8);
  std::uniform_int_distribution<std::size_t> rr(1, 14);
  std::uniform_real_distribution<double> load(0.05, 10.0);
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    const unsigned K = kk(gen);
    const std::size_t R = rr(gen);
    const DiscretePmf p(ref::random_pmf(gen, std::min<std::size_t>(R, 5)));
    const double rho = load(gen);
    StationaryDistribution exact;
    try {
      exact = exact_ctmc_resq(K, R, rho, p, 200000);
    } catch (const Error&) {
      continue;
    }
    worst = std::max(worst, total_variation(stationary_distribution(GTable(K, R, rho, p)), exact));
    ++done;
  }
  return {worst <= 1e-9, "max total variation = " + num(worst) + " over 50 instances (tol 1e-9)"};
}

struct ChiCase {
  std::string label;
  bool tested = false;
  bool pass = true;
};

Outcome offloaded_pmfs(const RunConfig& cfg) {
  std::mt19937_64 gen(5150);
  std::uniform_int_distribution<unsigned> kk(1, 8);
  std::uniform_real_distribution<double> load(0.2, 8.0);
  std::uniform_int_distribution<long> th(-1, 10);
  const Strategy all[] = {Strategy::baseline, Strategy::fat, Strategy::slim};
  double sum_err = 0.0, form_err = 0.0;
  int instances = 0;
  for (int t = 0; instances < 300 && t < 2000; ++t) {
    const unsigned K = kk(gen);
    const std::size_t R = kk(gen) + 2;
    const DiscretePmf p1(ref::random_pmf(gen, R));
    const DiscretePmf p2(ref::random_pmf(gen, R + 1));
    const auto split = make_strategy_split(all[t % 3], p1, p2, load(gen), load(gen), 1.0, th(gen));
    const GTable g(K, R, split.licensed_load(), split.licensed_pmf);
    if (!(offload_probability(split, g) > 0.0)) continue;
    const auto a = offloaded_demand_pmf(split, g);
    const auto b = offloaded_demand_pmf(split, stationary_distribution(g));
    double s = 0.0;
    for (double v : a.probabilities()) s += v;
    sum_err = std::max(sum_err, std::abs(s - 1.0));
    for (std::size_t j = 0; j < std::max(a.size(), b.size()); ++j) form_err = std::max(form_err, std::abs(a[j] - b[j]));
    ++instances;
  }
  bool ok = sum_err <= 1e-9 && form_err <= 1e-9;

  // Histogram tests at the default density and at the most loaded sweep density.
  std::vector<double> densities{cfg.scenario.deployment.bs_density};
  if (!cfg.sweep.densities.empty()) densities.push_back(*std::min_element(cfg.sweep.densities.begin(), cfg.sweep.densities.end()));
  std::vector<ChiCase> cases;
  std::uint64_t salt = 0;
  for (double density : densities) {
    Scenario sc = cfg.scenario;
    sc.deployment.bs_density = density;
    const PreparedCell cell = prepare_cell(sc);
    for (Strategy s : all) {
      const StrategyReport rep = evaluate_strategy(sc, cell, s);
      ChiCase c{std::string(to_string(s)) + "@" + num(density)};
      ++salt;
      if (rep.offloaded.empty()) {
        cases.push_back(c);
        continue;
      }
      LossSystem sys;
      sys.servers = cell.servers;
      sys.resources = cell.resources;
      sys.lambda1 = cell.arrivals.lambda1 * (1.0 - rep.infeasible_type1);
      sys.lambda2 = cell.arrivals.lambda2 * (1.0 - rep.infeasible_type2);
      sys.mu = sc.traffic.service_rate;
      if (cell.type1) sys.p1 = cell.type1->pmf;
      sys.p2 = cell.type2.pmf;
      sys.strategy = s;
      sys.threshold = rep.threshold;
      SimControl ctl;
      ctl.seed = CounterRng::mix64(cfg.validate.seed + 1000 + salt);
      ctl.budget = cfg.validate.resq_arrivals;
      const auto sim = simulate_resq(sys, ctl);
      const auto split = make_strategy_split(s, cell.type1 ? cell.type1->pmf : DiscretePmf{}, cell.type2.pmf,
                                             sys.lambda1, sys.lambda2, sc.traffic.service_rate, rep.threshold);
      const GTable g(cell.servers, cell.resources, split.licensed_load(), split.licensed_pmf);
      const auto chi = chi_square_test(sim.offloaded_histogram, offloaded_demand_pmf(split, g), 0.99);
      c.tested = chi.samples >= 50;
      c.pass = chi.pass;
      cases.push_back(c);
    }
  }
  std::string chi_detail;
  int tested = 0;
  for (const auto& c : cases) {
    chi_detail += " " + c.label + (c.tested ? (c.pass ? ":pass" : ":FAIL") : ":no-offload");
    if (c.tested) {
      ++tested;
      ok = ok && c.pass;
    }
  }
  ok = ok && tested > 0;
  return {ok, "pmf sum err " + num(sum_err) + ", G vs state-sum " + num(form_err) + " over " +
                  std::to_string(instances) + " instances (tol 1e-9); chi-square 99%:" + chi_detail};
}

Outcome lbt_chain(const RunConfig& cfg) {
  double residual = 0.0;
  for (unsigned T = 0; T <= 10; ++T)
    for (int i = 1; i <= 1000; ++i) {
      const double theta = i / 1000.0;
      residual = std::max(residual, retry_balance_residual(retry_distribution(theta, T), theta));
    }
  double closed = 0.0;
  for (unsigned T = 0; T <= 8; ++T)
    for (unsigned cw : {1u, 4u, 16u, 64u, 256u})
      for (int i = 1; i <= 4000; ++i) {
        const double theta = i / 4000.0;
        if (std::abs(theta - 0.5) < 1e-3) continue;
        closed = std::max(closed, std::abs(transmission_probability(theta, cw, T) -
                                           transmission_probability_closed_form(theta, cw, T)));
      }
  const PreparedCell cell = prepare_cell(cfg.scenario);
  ContentionConfig cc = cfg.scenario.contention;
  cc.blockage_prob = cell.unlicensed_blockage;
  const unsigned nru_grid[] = {1, 2, 3, 5, 8};
  const unsigned wigig_grid[] = {0, 1, 2, 4, 6};
  int agree = 0, points = 0;
  double worst_z = 0.0;
  std::string worst_at;
  for (unsigned n : nru_grid)
    for (unsigned m : wigig_grid) {
      const auto pt = solve_contention(n, m, cc);
      SimControl ctl;
      ctl.seed = CounterRng::mix64(cfg.validate.seed + 97 * n + m);
      ctl.budget = 10'000'000;
      ctl.batches = cfg.validate.batches;
      const auto sim = simulate_lbt(n, m, cc, ctl);
      std::vector<std::pair<const EstimateWithCI*, double>> checks{{&sim.collision_nru, pt.nru->p_c},
                                                                   {&sim.pi_nru, pt.nru->pi}};
      if (pt.wigig) {
        checks.push_back({&sim.collision_wigig, pt.wigig->p_c});
        checks.push_back({&sim.pi_wigig, pt.wigig->pi});
      }
      bool ok = true;
      for (const auto& [est, analytic] : checks) {
        const double z = est->sigma > 0.0 ? std::abs(est->value - analytic) / est->sigma
                                          : (est->value == analytic ? 0.0 : INFINITY);
        if (z > worst_z) {
          worst_z = z;
          worst_at = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
        }
        ok = ok && z <= 3.0;
      }
      ++points;
      agree += ok ? 1 : 0;
    }
  const bool ok = residual < 1e-12 && closed <= 1e-9 && agree == points;
  return {ok, "balance residual " + num(residual) + " (tol 1e-12); direct vs closed form " + num(closed) +
                  " (tol 1e-9); slot simulation at 1e7 slots agrees within 3 sigma at " + std::to_string(agree) +
                  "/" + std::to_string(points) + " populations, worst " + num(worst_z) + " sigma at " + worst_at};
}

Outcome fading_closed_form(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  const PreparedCell cell = prepare_cell(sc);
  const LinkModel lic(sc.deployment, sc.licensed, sc.deployment.bs_height);
  const LinkModel unl(sc.deployment, sc.unlicensed, sc.deployment.ap_height);
  const double rn = cell.licensed_coverage.r_cell, rw = cell.r_wigig;
  struct Case {
    const LinkModel* link;
    Region region;
  };
  std::vector<Case> cases{{&lic, Region::disk(rn)}, {&lic, Region::disk(rw)}, {&unl, Region::disk(rw)}};
  if (rw < rn) cases.push_back({&lic, Region::annulus(rw, rn)});
  double worst = 0.0;
  int evaluations = 0;
  for (const auto& c : cases)
    for (LinkState st : {LinkState::los, LinkState::blocked}) {
      const auto b = propagation_branch(*c.link, st);
      const double dh = c.link->height_offset();
      const double lo = b.gain_db - 5.0 * b.exponent * std::log10(dh * dh + c.region.outer * c.region.outer);
      const double hi = b.gain_db - 5.0 * b.exponent * std::log10(dh * dh + c.region.inner * c.region.inner);
      const double a = lo - 8.0 * b.sigma_db, z = hi + 8.0 * b.sigma_db;
      for (int i = 0; i <= 1000; ++i) {
        const double x = a + (z - a) * i / 1000.0;
        worst = std::max(worst, std::abs(sinr_cdf_with_fading(x, c.region, dh, b) -
                                         sinr_cdf_closed_form(x, c.region, dh, b)));
        ++evaluations;
      }
    }
  return {worst <= 1e-6, "max |quadrature - erf form| = " + num(worst) + " over " + std::to_string(evaluations) +
                             " points spanning the support (tol 1e-6)"};
}

std::vector<StrategyReport> sweep_reports(const RunConfig& cfg, double min_rate) {
  Scenario sc = cfg.scenario;
  sc.traffic.min_rate_bps = min_rate;
  const std::vector<Strategy> all{Strategy::baseline, Strategy::fat, Strategy::slim};
  return density_sweep(sc, cfg.sweep.densities, all, cfg.sweep.target_q_s, 4).reports;
}

Outcome collision_vs_blockers(const RunConfig& cfg) {
  std::vector<double> lambdas, values;
  for (double lb = 0.05; lb <= 1.5 + 1e-9; lb += 0.05) {
    Scenario sc = cfg.scenario;
    sc.deployment.blocker_density = lb;
    lambdas.push_back(lb);
    values.push_back(evaluate_strategy(sc, Strategy::baseline).collision_nru);
  }
  const auto top = std::max_element(values.begin(), values.end()) - values.begin();
  const bool interior = top > 0 && top + 1 < static_cast<long>(values.size()) &&
                        values[top] > values.front() + 1e-12 && values[top] > values.back() + 1e-12;
  return {interior, "NR-U collision over blocker density 0.05..1.5: " + num(values.front()) + " at " +
                        num(lambdas.front()) + ", max " + num(values[top]) + " at " + num(lambdas[top]) + ", " +
                        num(values.back()) + " at " + num(lambdas.back()) +
                        (interior ? "" : "; no interior maximum")};
}

Outcome fat_vs_baseline(const std::vector<StrategyReport>& reps, std::size_t points) {
  int order_bad = 0, gap_bad = 0;
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double b = reps[3 * i].q_s, f = reps[3 * i + 1].q_s;
    if (b > f) ++order_bad;
    const double rel = b > 0.0 ? (f - b) / b : (f > 0.0 ? INFINITY : 0.0);
    worst_rel = std::max(worst_rel, rel);
    if (f > 1.1 * b) ++gap_bad;
  }
  return {order_bad == 0 && gap_bad == 0, "baseline > fat at " + std::to_string(order_bad) + "/" +
                                              std::to_string(points) + " densities; fat above 1.1x baseline at " +
                                              std::to_string(gap_bad) + "/" + std::to_string(points) +
                                              "; worst relative excess " + num(worst_rel)};
}

Outcome slim_worst(const std::vector<StrategyReport>& reps, std::size_t points) {
  int bad = 0;
  for (std::size_t i = 0; i < points; ++i)
    if (!(reps[3 * i + 2].q_s > std::max(reps[3 * i].q_s, reps[3 * i + 1].q_s))) ++bad;
  return {bad == 0, "slim strictly worst at " + std::to_string(points - bad) + "/" + std::to_string(points) +
                        " densities"};
}

Outcome rate_ordering(const RunConfig& cfg, const std::vector<double>& rates,
                      const std::vector<std::vector<StrategyReport>>& by_rate) {
  const std::size_t points = cfg.sweep.densities.size();
  int broken[3] = {0, 0, 0};
  for (std::size_t i = 0; i < points; ++i)
    for (int s = 0; s < 3; ++s)
      for (std::size_t r = 1; r < rates.size(); ++r)
        if (by_rate[r][3 * i + s].q_s < by_rate[r - 1][3 * i + s].q_s) {
          ++broken[s];
          break;
        }
  std::string grid;
  for (double r : rates) grid += (grid.empty() ? "" : ", ") + num(r / 1e6);
  return {broken[0] == 0, "baseline Q_s nondecreasing over R_min {" + grid + "} Mbit/s at " +
                              std::to_string(points - broken[0]) + "/" + std::to_string(points) +
                              " densities (fat " + std::to_string(points - broken[1]) + "/" +
                              std::to_string(points) + ", slim " + std::to_string(points - broken[2]) + "/" +
                              std::to_string(points) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path work = NRU_WORK_DIR;
  fs::remove_all(work);
  fs::create_directories(work);
  std::vector<fs::path> runs{work / "run1", work / "run2"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string cmd = std::string("\"") + NRU_CLI + "\" --config \"" + kDefaultIni + "\" --out \"" +
                            runs[i].string() + "\" --seed 7 --jobs " + (i == 0 ? "1" : "4") +
                            " sweep > \"" + (work / ("log" + std::to_string(i) + ".txt")).string() + "\" 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "sweep run " + std::to_string(i + 1) + " failed"};
  }
  bool same = true;
  std::string detail;
  for (const char* f : {"sweep.csv", "minimal_density.csv"}) {
    const std::string a = slurp(runs[0] / f), b = slurp(runs[1] / f);
    const bool eq = !a.empty() && a == b;
    same = same && eq;
    detail += std::string(detail.empty() ? "" : ", ") + f + " " + std::to_string(a.size()) + " bytes " +
              (eq ? "identical" : "DIFFERENT");
  }
  return {same, detail + " (runs with --jobs 1 and --jobs 4)"};
}

}  // namespace

int main() {
  const RunConfig cfg = load_run_config(kDefaultIni);
  int failures = 0;
  const auto report = [&](const char* id, const char* title, const auto& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << title << ": " << o.detail << " ["
              << num(secs) << " s]" << std::endl;
  };

  report("1", "Erlang-B equivalence", erlang_b_equivalence);
  report("2", "G recursion vs direct sum", g_form_vs_direct);
  report("3", "product form vs exact CTMC", ctmc_agreement);
  report("4", "offloaded demand pmfs", [&] { return offloaded_pmfs(cfg); });
  report("5", "LBT retry chain and fixed point", [&] { return lbt_chain(cfg); });
  report("6", "closed-form fading CDF", [&] { return fading_closed_form(cfg); });

  std::vector<double> rates = cfg.sweep.min_rates;
  if (rates.empty()) rates.push_back(cfg.scenario.traffic.min_rate_bps);
  std::sort(rates.begin(), rates.end());
  std::vector<std::vector<StrategyReport>> by_rate;
  for (double r : rates) by_rate.push_back(sweep_reports(cfg, r));
  const auto at_default =
      std::find(rates.begin(), rates.end(), cfg.scenario.traffic.min_rate_bps) - rates.begin();
  const auto& base_reps = by_rate[static_cast<std::size_t>(at_default) < rates.size() ? at_default : 0];
  const std::size_t points = cfg.sweep.densities.size();

  report("7a", "collision vs blocker density has an interior maximum", [&] { return collision_vs_blockers(cfg); });
  report("7b", "baseline <= fat <= 1.1 baseline", [&] { return fat_vs_baseline(base_reps, points); });
  report("7c", "slim strictly worst", [&] { return slim_worst(base_reps, points); });
  report("7d", "Q_s nondecreasing in R_min", [&] { return rate_ordering(cfg, rates, by_rate); });
  report("8", "sweep determinism", determinism);

  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
