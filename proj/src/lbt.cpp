#include "nru/lbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nru/error.hpp"
#include "nru/numeric.hpp"

namespace nru {

void ContentionConfig::validate() const {
  require(cw_nru >= 1 && cw_wigig >= 1, ErrorCode::domain, "contention windows must be at least one slot");
  require(blockage_prob >= 0.0 && blockage_prob < 1.0, ErrorCode::domain, "blockage probability must lie in [0, 1)");
  require(tolerance > 0.0, ErrorCode::domain, "fixed-point tolerance must be positive");
  require(max_iterations >= 1, ErrorCode::domain, "need at least one fixed-point iteration");
  require(damping > 0.0 && damping <= 1.0, ErrorCode::domain, "damping must lie in (0, 1]");
}

std::vector<double> retry_distribution(double theta, unsigned max_retries) {
  require(theta > 0.0 && theta <= 1.0, ErrorCode::domain, "success probability must lie in (0, 1]");
  std::vector<double> q(max_retries + 1, 0.0);
  if (theta == 1.0) {
    q[0] = 1.0;
    return q;
  }
  const double denom = -std::expm1(static_cast<double>(max_retries + 1) * std::log1p(-theta));
  double fail_pow = 1.0;
  for (unsigned i = 0; i <= max_retries; ++i) {
    q[i] = fail_pow * theta / denom;
    fail_pow *= 1.0 - theta;
  }
  return q;
}

double retry_balance_residual(const std::vector<double>& q, double theta) {
  const std::size_t t = q.size() - 1;
  double inflow0 = q[t];
  for (std::size_t i = 0; i < t; ++i) inflow0 += q[i] * theta;
  double worst = std::abs(q[0] - inflow0);
  for (std::size_t i = 1; i <= t; ++i) worst = std::max(worst, std::abs(q[i] - q[i - 1] * (1.0 - theta)));
  double sum = 0.0;
  for (double v : q) sum += v;
  return std::max(worst, std::abs(sum - 1.0));
}

double mean_backoff_slots(unsigned stage, unsigned cw) {
  return (std::ldexp(static_cast<double>(cw), static_cast<int>(stage)) + 1.0) / 2.0;
}

double transmission_probability(double theta, unsigned cw, unsigned max_retries) {
  require(theta >= 0.0 && theta <= 1.0, ErrorCode::domain, "success probability must lie in [0, 1]");
  require(cw >= 1, ErrorCode::domain, "contention window must be at least one slot");
  double slots = 0.0;
  if (theta == 0.0) {
    // Limit of the retry chain: every stage equally likely.
    for (unsigned j = 0; j <= max_retries; ++j) slots += mean_backoff_slots(j, cw);
    slots /= static_cast<double>(max_retries + 1);
  } else {
    const auto q = retry_distribution(theta, max_retries);
    for (unsigned j = 0; j <= max_retries; ++j) slots += q[j] * mean_backoff_slots(j, cw);
  }
  return 1.0 / slots;
}

double transmission_probability_closed_form(double theta, unsigned cw, unsigned max_retries) {
  const double t1 = static_cast<double>(max_retries + 1);
  const double num = (1.0 - std::pow(2.0 * (1.0 - theta), t1)) * theta * static_cast<double>(cw);
  const double den = 2.0 * (2.0 * theta - 1.0) * (1.0 - std::pow(1.0 - theta, t1));
  return 1.0 / (0.5 + num / den);
}

namespace {

struct Exponents {
  double own;
  double other;
};

double collision(double pi_own, double pi_other, Exponents e) {
  return 1.0 - std::pow(1.0 - pi_own, e.own) * std::pow(1.0 - pi_other, e.other);
}

}  // namespace

ContentionPoint solve_contention(unsigned n_nru, unsigned n_wigig, const ContentionConfig& cfg) {
  cfg.validate();
  ContentionPoint pt;
  pt.n_nru = n_nru;
  pt.n_wigig = n_wigig;
  if (n_nru == 0 && n_wigig == 0) return pt;

  const double self = cfg.literal_collision ? 0.0 : 1.0;
  const Exponents e_nru{static_cast<double>(n_nru) - self, static_cast<double>(n_wigig)};
  const Exponents e_wigig{static_cast<double>(n_wigig) - self, static_cast<double>(n_nru)};
  const double survive = 1.0 - cfg.blockage_prob;
  double pi_n = n_nru > 0 ? 0.1 : 0.0;
  double pi_w = n_wigig > 0 ? 0.1 : 0.0;

  double residual = std::numeric_limits<double>::infinity();
  unsigned it = 0;
  while (it < cfg.max_iterations) {
    ++it;
    double next_n = pi_n;
    double next_w = pi_w;
    if (n_nru > 0) {
      const double theta = (1.0 - collision(pi_n, pi_w, e_nru)) * survive;
      next_n = transmission_probability(theta, cfg.cw_nru, cfg.max_retries);
    }
    if (n_wigig > 0) {
      const double theta = (1.0 - collision(pi_w, pi_n, e_wigig)) * survive;
      next_w = transmission_probability(theta, cfg.cw_wigig, cfg.max_retries);
    }
    next_n = (1.0 - cfg.damping) * pi_n + cfg.damping * next_n;
    next_w = (1.0 - cfg.damping) * pi_w + cfg.damping * next_w;
    residual = std::max(std::abs(next_n - pi_n), std::abs(next_w - pi_w));
    pi_n = next_n;
    pi_w = next_w;
    if (residual < cfg.tolerance) break;
  }
  if (!(residual < cfg.tolerance))
    throw Error(ErrorCode::convergence, "contention fixed point did not converge for (" + std::to_string(n_nru) +
                                            ", " + std::to_string(n_wigig) + "); last residual " +
                                            std::to_string(residual));
  pt.iterations = it;
  pt.residual = residual;

  const auto finish = [&](double pi_own, double pi_other, Exponents e) {
    TechnologyState s;
    s.pi = pi_own;
    s.p_c = std::clamp(collision(pi_own, pi_other, e), 0.0, 1.0);
    s.theta = (1.0 - s.p_c) * survive;
    s.q = s.theta > 0.0 ? retry_distribution(s.theta, cfg.max_retries)
                        : std::vector<double>(cfg.max_retries + 1, 1.0 / (cfg.max_retries + 1));
    return s;
  };
  if (n_nru > 0) pt.nru = finish(pi_n, pi_w, e_nru);
  if (n_wigig > 0) pt.wigig = finish(pi_w, pi_n, e_wigig);
  return pt;
}

ContentionSolver::ContentionSolver(ContentionConfig cfg) : cfg_(cfg) { cfg_.validate(); }

const ContentionPoint& ContentionSolver::at(unsigned n_nru, unsigned n_wigig) const {
  const auto key = std::make_pair(n_nru, n_wigig);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  ContentionPoint pt = solve_contention(n_nru, n_wigig, cfg_);
  std::lock_guard lock(mu_);
  return cache_.emplace(key, std::move(pt)).first->second;
}

unsigned ContentionSolver::max_iterations_used() const {
  std::lock_guard lock(mu_);
  unsigned m = 0;
  for (const auto& [key, pt] : cache_) m = std::max(m, pt.iterations);
  return m;
}

namespace {

// Poisson weights up to the first index past the mean whose upper tail is
// below tail_mass.
std::vector<double> poisson_weights(double load, double tail_mass) {
  std::vector<double> w;
  if (load <= 0.0) return {1.0};
  double cum = 0.0;
  for (unsigned i = 0;; ++i) {
    const double p = std::exp(static_cast<double>(i) * std::log(load) - load - std::lgamma(i + 1.0));
    w.push_back(p);
    cum += p;
    if (static_cast<double>(i) > load && 1.0 - cum < tail_mass) break;
    if (i > 100000) fail(ErrorCode::capacity, "Poisson load too large to mix");
  }
  return w;
}

}  // namespace

MixedContention mixed_contention(double load_nru, double load_wigig, const ContentionSolver& solver,
                                 double truncation_mass) {
  require(load_nru >= 0.0 && load_wigig >= 0.0, ErrorCode::domain, "offered loads must be nonnegative");
  require(truncation_mass > 0.0 && truncation_mass < 1.0, ErrorCode::domain, "truncation mass must lie in (0, 1)");
  const auto wn = poisson_weights(load_nru, 0.5 * truncation_mass);
  const auto ww = poisson_weights(load_wigig, 0.5 * truncation_mass);
  MixedContention out;
  out.max_nru = static_cast<unsigned>(wn.size() - 1);
  out.max_wigig = static_cast<unsigned>(ww.size() - 1);
  double kept = 0.0;
  for (std::size_t i = 0; i < wn.size(); ++i) {
    for (std::size_t j = 0; j < ww.size(); ++j) {
      const double w = wn[i] * ww[j];
      kept += w;
      const auto& tagged_n = solver.at(static_cast<unsigned>(i + 1), static_cast<unsigned>(j));
      out.success_nru += w * tagged_n.nru->pi * tagged_n.nru->theta;
      out.collision_nru += w * tagged_n.nru->p_c;
      const auto& tagged_w = solver.at(static_cast<unsigned>(i), static_cast<unsigned>(j + 1));
      out.success_wigig += w * tagged_w.wigig->pi * tagged_w.wigig->theta;
    }
  }
  out.truncated_mass = std::max(0.0, 1.0 - kept);
  return out;
}

double success_probability(double load_nru, double load_wigig, const ContentionSolver& solver,
                           double truncation_mass) {
  return mixed_contention(load_nru, load_wigig, solver, truncation_mass).success_nru;
}

namespace {

// Largest 2D distance in [inner, outer] whose median SINR is still >= t_db.
double distance_preimage(double t_db, const Region& region, const LinkModel& link) {
  const double dh = link.height_offset();
  const auto sinr_db = [&](double r) { return linear_to_db(median_sinr(std::sqrt(r * r + dh * dh), link)); };
  if (!std::isfinite(t_db) || sinr_db(region.inner) < t_db) return region.inner;
  if (sinr_db(region.outer) >= t_db) return region.outer;
  return bisect([&](double r) { return sinr_db(r) - t_db; }, region.inner, region.outer, 1e-9);
}

}  // namespace

std::vector<double> unlicensed_efficiency_map(const DemandPmf& demand, const Region& region,
                                              const LinkModel& licensed, const LinkModel& unlicensed,
                                              const McsTable& unlicensed_mcs, UnlicensedMapMode mode) {
  region.validate();
  const std::size_t n = demand.pmf.size();
  std::vector<double> m(n, std::numeric_limits<double>::quiet_NaN());
  if (mode == UnlicensedMapMode::mean_efficiency) {
    require(region.is_disk(), ErrorCode::domain, "mean-efficiency mapping needs a disk region");
    const double e = mean_spectral_efficiency(region.outer, unlicensed);
    for (const auto& c : demand.classes)
      if (c.units < n) m[c.units] = e;
    return m;
  }
  std::vector<double> weight(n, 0.0), weighted(n, 0.0), plain(n, 0.0), count(n, 0.0);
  const double dh_u = unlicensed.height_offset();
  for (const auto& c : demand.classes) {
    if (c.units >= n) continue;
    const double near = distance_preimage(c.sinr_hi_db, region, licensed);
    const double far = distance_preimage(c.sinr_lo_db, region, licensed);
    const double mid = 0.5 * (near + far);
    const double s_db = linear_to_db(median_sinr(std::sqrt(mid * mid + dh_u * dh_u), unlicensed));
    const double eff = unlicensed_mcs.efficiency_at(s_db);
    weight[c.units] += c.mass;
    weighted[c.units] += c.mass * eff;
    plain[c.units] += eff;
    count[c.units] += 1.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (count[j] == 0.0) continue;
    m[j] = weight[j] > 0.0 ? weighted[j] / weight[j] : plain[j] / count[j];
  }
  return m;
}

AttainedRates attained_rates(double success, const DiscretePmf& offloaded, const std::vector<double>& efficiency,
                             double bandwidth_hz) {
  require(success >= 0.0 && success <= 1.0, ErrorCode::domain, "success probability must lie in [0, 1]");
  AttainedRates out;
  out.per_class.assign(offloaded.size(), 0.0);
  for (std::size_t j = 0; j < offloaded.size(); ++j) {
    if (offloaded[j] == 0.0) continue;
    if (j >= efficiency.size() || !std::isfinite(efficiency[j]))
      fail(ErrorCode::mapping, "no unlicensed efficiency for demand level " + std::to_string(j));
    out.per_class[j] = success * bandwidth_hz * efficiency[j];
    out.mean += offloaded[j] * out.per_class[j];
  }
  return out;
}

double qos_violation(const AttainedRates& rates, const DiscretePmf& offloaded, double min_rate_bps) {
  double q = 0.0;
  for (std::size_t j = 0; j < offloaded.size(); ++j)
    if (offloaded[j] > 0.0 && rates.per_class[j] < min_rate_bps) q += offloaded[j];
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace nru
