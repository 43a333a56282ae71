#include "nru/chanstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nru/error.hpp"
#include "nru/numeric.hpp"

namespace nru {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kKernelHalfWidth = 8.0;  // in sigmas
constexpr double kSqrt2 = 1.41421356237309504880;

struct Support {
  double y2_lo;  // squared 3D distance at the inner edge
  double y2_hi;  // ... at the outer edge
  double x_lo;   // SINR at the outer edge, dB
  double x_hi;   // SINR at the inner edge, dB
};

Support support_of(const Region& region, double dh, const PropagationBranch& b) {
  Support s;
  s.y2_lo = dh * dh + region.inner * region.inner;
  s.y2_hi = dh * dh + region.outer * region.outer;
  s.x_lo = b.gain_db - 5.0 * b.exponent * std::log10(s.y2_hi);
  s.x_hi = b.gain_db - 5.0 * b.exponent * std::log10(s.y2_lo);
  return s;
}

// erf(a) - erf(b) without cancellation in the tails.
double erf_diff(double a, double b) {
  if (a > 0.0 && b > 0.0) return std::erfc(b) - std::erfc(a);
  if (a < 0.0 && b < 0.0) return std::erfc(-a) - std::erfc(-b);
  return std::erf(a) - std::erf(b);
}

void check_branch(const PropagationBranch& b) {
  require(b.exponent > 0.0, ErrorCode::domain, "path-loss exponent must be positive");
}

}  // namespace

double Region::area() const noexcept { return kPi * (outer * outer - inner * inner); }

void Region::validate() const {
  require(inner >= 0.0 && outer > inner, ErrorCode::domain, "region radii must satisfy 0 <= inner < outer");
}

PropagationBranch propagation_branch(const LinkModel& link, LinkState state) {
  const auto& radio = link.radio();
  PropagationBranch b;
  b.gain_db = linear_to_db(link.gain_constant());
  if (state == LinkState::los) {
    b.exponent = radio.exponent_los;
    b.sigma_db = radio.shadow_sigma_los_db;
  } else {
    b.exponent = radio.exponent_blocked;
    b.sigma_db = radio.shadow_sigma_blocked_db;
  }
  return b;
}

double distance_cdf_3d(double x, const Region& region, double height_offset) {
  region.validate();
  const double inner2 = region.inner * region.inner;
  const double outer2 = region.outer * region.outer;
  const double v = (x * x - height_offset * height_offset - inner2) / (outer2 - inner2);
  return std::clamp(v, 0.0, 1.0);
}

double sinr_cdf_no_fading(double x_db, const Region& region, double height_offset, const PropagationBranch& b) {
  region.validate();
  check_branch(b);
  const Support s = support_of(region, height_offset, b);
  if (x_db <= s.x_lo) return 0.0;
  if (x_db >= s.x_hi) return 1.0;
  const double y2 = std::pow(10.0, (b.gain_db - x_db) / (5.0 * b.exponent));
  return std::clamp((s.y2_hi - y2) / (s.y2_hi - s.y2_lo), 0.0, 1.0);
}

double sinr_cdf_with_fading(double x_db, const Region& region, double height_offset, const PropagationBranch& b) {
  require(b.sigma_db > 0.0, ErrorCode::domain, "shadowing sigma must be positive");
  region.validate();
  const Support s = support_of(region, height_offset, b);
  const double sigma = b.sigma_db;
  const double half = kKernelHalfWidth * sigma;
  if (x_db + half <= s.x_lo) return 0.0;
  const auto integrand = [&](double u) {
    const double z = u / sigma;
    return sinr_cdf_no_fading(x_db + u, region, height_offset, b) * std::exp(-0.5 * z * z) /
           (sigma * std::sqrt(2.0 * kPi));
  };
  std::vector<double> kinks;
  for (double k : {s.x_lo - x_db, s.x_hi - x_db, 0.0})
    if (k > -half && k < half) kinks.push_back(k);
  std::sort(kinks.begin(), kinks.end());
  double v = integrate(integrand, -half, half, 1e-9, 0.0, kinks).value;
  // Kernel mass beyond +8 sigma, where the shifted argument is above the support
  // whenever it is at all relevant.
  v += sinr_cdf_no_fading(x_db + half, region, height_offset, b) * 0.5 * std::erfc(kKernelHalfWidth / kSqrt2);
  return std::clamp(v, 0.0, 1.0);
}

double sinr_cdf_closed_form(double x_db, const Region& region, double height_offset, const PropagationBranch& b) {
  require(b.sigma_db > 0.0, ErrorCode::domain, "shadowing sigma must be positive");
  region.validate();
  check_branch(b);
  const Support s = support_of(region, height_offset, b);
  const double sigma = b.sigma_db;
  const double k = kLn10 / (5.0 * b.exponent);
  const double d = s.y2_hi - s.y2_lo;
  const double root2s = kSqrt2 * sigma;
  const double e_lo = (x_db - s.x_lo) / root2s;
  const double e_hi = (x_db - s.x_hi) / root2s;
  const double l = (s.x_lo - x_db + k * sigma * sigma) / root2s;
  const double h = (s.x_hi - x_db + k * sigma * sigma) / root2s;
  const double log_scale = b.gain_db * k - k * x_db + 0.5 * k * k * sigma * sigma;
  const double diff = erf_diff(l, h);
  const double tail = diff == 0.0 ? 0.0 : std::exp(log_scale + std::log(std::abs(diff))) * (diff < 0 ? -1.0 : 1.0);
  const double v = (tail + s.y2_hi * std::erf(e_lo) - s.y2_lo * std::erf(e_hi) + d) / (2.0 * d);
  return std::clamp(v, 0.0, 1.0);
}

SinrDistribution::SinrDistribution(const Region& region, const LinkModel& link)
    : region_(region),
      dh_(link.height_offset()),
      los_(propagation_branch(link, LinkState::los)),
      blocked_(propagation_branch(link, LinkState::blocked)),
      pb_(0.0) {
  region_.validate();
  pb_ = mean_blockage_probability(region_.inner, region_.outer, link.deployment(), link.site_height());
}

SinrDistribution::SinrDistribution(const Region& region, double height_offset, const PropagationBranch& los,
                                   const PropagationBranch& blocked, double blockage_prob)
    : region_(region), dh_(height_offset), los_(los), blocked_(blocked), pb_(blockage_prob) {
  region_.validate();
  require(pb_ >= 0.0 && pb_ <= 1.0, ErrorCode::domain, "blockage probability must lie in [0, 1]");
}

double SinrDistribution::cdf(double x_db) const {
  double v = 0.0;
  if (pb_ > 0.0) v += pb_ * sinr_cdf_with_fading(x_db, region_, dh_, blocked_);
  if (pb_ < 1.0) v += (1.0 - pb_) * sinr_cdf_with_fading(x_db, region_, dh_, los_);
  return v;
}

double sinr_cdf_mixture(double x_db, const Region& region, const LinkModel& link) {
  return SinrDistribution(region, link).cdf(x_db);
}

std::size_t resource_units(double rate_bps, double efficiency, double unit_bw_hz) {
  require(rate_bps > 0.0 && efficiency > 0.0 && unit_bw_hz > 0.0, ErrorCode::domain,
          "rate, efficiency and unit bandwidth must be positive");
  const double ratio = rate_bps / (efficiency * unit_bw_hz);
  return static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
}

DemandPmf demand_pmf(const std::function<double(double)>& sinr_cdf, const McsTable& mcs, double min_rate_bps,
                     double unit_bw_hz, std::size_t capacity_units) {
  require(min_rate_bps > 0.0, ErrorCode::domain, "minimum rate must be positive");
  require(capacity_units >= 1, ErrorCode::domain, "capacity must be at least one unit");
  require(mcs.size() > 0, ErrorCode::domain, "MCS table is empty");
  const auto& rows = mcs.rows();
  DemandPmf out;
  double below = sinr_cdf(rows.front().sinr_threshold_db);
  double previous = below;
  out.infeasible_mass = below;
  std::vector<double> mass;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    DemandClass c;
    c.sinr_lo_db = rows[i].sinr_threshold_db;
    c.sinr_hi_db = i + 1 < rows.size() ? rows[i + 1].sinr_threshold_db : std::numeric_limits<double>::infinity();
    c.efficiency = rows[i].spectral_efficiency;
    c.units = resource_units(min_rate_bps, c.efficiency, unit_bw_hz);
    const double upper = i + 1 < rows.size() ? sinr_cdf(c.sinr_hi_db) : 1.0;
    c.mass = std::max(0.0, upper - previous);
    previous = upper;
    if (c.units > capacity_units) {
      out.infeasible_mass += c.mass;
    } else {
      if (mass.size() <= c.units) mass.resize(c.units + 1, 0.0);
      mass[c.units] += c.mass;
    }
    out.classes.push_back(c);
  }
  double feasible = 0.0;
  for (double m : mass) feasible += m;
  if (!(feasible > 0.0)) fail(ErrorCode::degenerate_cell, "all demand mass is infeasible");
  out.infeasible_mass = std::clamp(out.infeasible_mass, 0.0, 1.0);
  out.pmf = DiscretePmf::normalized(std::move(mass));
  return out;
}

DemandPmf demand_pmf(const Region& region, const LinkModel& link, const McsTable& mcs, double min_rate_bps,
                     double unit_bw_hz, std::size_t capacity_units) {
  const SinrDistribution dist(region, link);
  return demand_pmf([&dist](double x) { return dist.cdf(x); }, mcs, min_rate_bps, unit_bw_hz, capacity_units);
}

double mean_spectral_efficiency(double radius, const std::function<double(double)>& sinr_of_r) {
  require(radius > 0.0, ErrorCode::domain, "radius must be positive");
  const double r2 = radius * radius;
  const auto integrand = [&](double r) { return 2.0 * r / r2 * std::log2(1.0 + sinr_of_r(r)); };
  return integrate(integrand, 0.0, radius, 0.0, 1e-10).value;
}

double mean_spectral_efficiency(double radius, const LinkModel& link) {
  const double dh = link.height_offset();
  return mean_spectral_efficiency(radius, [&](double r) { return mean_sinr(std::sqrt(r * r + dh * dh), link); });
}

double mean_mcs_efficiency(const SinrDistribution& dist, const McsTable& mcs) {
  const auto& rows = mcs.rows();
  double mean = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double lo = dist.cdf(rows[i].sinr_threshold_db);
    const double hi = i + 1 < rows.size() ? dist.cdf(rows[i + 1].sinr_threshold_db) : 1.0;
    mean += std::max(0.0, hi - lo) * rows[i].spectral_efficiency;
  }
  return mean;
}

std::size_t b_min(double min_rate_bps, double mean_efficiency, double unit_bw_hz) {
  return resource_units(min_rate_bps, mean_efficiency, unit_bw_hz);
}

}  // namespace nru
