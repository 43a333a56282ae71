#include "nru/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "nru/error.hpp"
#include "nru/numeric.hpp"

namespace nru {

void DeploymentConfig::validate() const {
  require(bs_density >= 0 && nru_ue_density >= 0 && wigig_ue_density >= 0 && blocker_density >= 0,
          ErrorCode::invalid_geometry, "densities must be nonnegative");
  require(ue_height > 0.0, ErrorCode::invalid_geometry, "UE height must be positive");
  require(blocker_height > ue_height, ErrorCode::invalid_geometry, "blocker height must exceed UE height");
  require(bs_height > blocker_height && ap_height > blocker_height, ErrorCode::invalid_geometry,
          "site heights must exceed blocker height");
  require(blocker_radius > 0.0, ErrorCode::invalid_geometry, "blocker radius must be positive");
}

RadioConfig RadioConfig::nr_licensed() { return RadioConfig{}; }

RadioConfig RadioConfig::wigig_unlicensed() {
  RadioConfig r;
  r.carrier_freq_ghz = 60.0;
  r.bandwidth_hz = 2160e6;
  r.tx_power_dbm = 23.0;
  r.tx_array = {16, 4};
  r.rx_array = {8, 4};
  r.outage_sinr_db = -6.6;  // 802.11ad control PHY (MCS 0)
  return r;
}

double RadioConfig::pathloss_constant() const noexcept {
  return std::pow(10.0, 2.0 * std::log10(carrier_freq_ghz) + 3.24);
}

void RadioConfig::validate() const {
  require(carrier_freq_ghz > 0.0, ErrorCode::domain, "carrier frequency must be positive");
  require(bandwidth_hz > 0.0, ErrorCode::domain, "bandwidth must be positive");
  require(edge_outage_prob > 0.0 && edge_outage_prob < 1.0, ErrorCode::domain,
          "edge outage probability must lie in (0, 1)");
  require(exponent_los > 0.0 && exponent_blocked > exponent_los, ErrorCode::domain,
          "path-loss exponents must satisfy 0 < los < blocked");
  require(shadow_sigma_blocked_db > 0.0 && shadow_sigma_los_db > 0.0, ErrorCode::domain,
          "shadow-fading sigmas must be positive");
  require(tx_array.horizontal >= 1 && tx_array.vertical >= 1 && rx_array.horizontal >= 1 &&
              rx_array.vertical >= 1,
          ErrorCode::domain, "antenna arrays need at least one element per plane");
}

LinkModel::LinkModel(const DeploymentConfig& dep, const RadioConfig& radio, double site_height)
    : dep_(dep), radio_(radio), site_height_(site_height) {
  dep_.validate();
  radio_.validate();
  require(site_height_ > dep_.blocker_height, ErrorCode::invalid_geometry, "site must be above blockers");
  tx_gain_ = array_gain(radio_.tx_array);
  rx_gain_ = array_gain(radio_.rx_array);
  const double noise_w = dbm_to_watt(radio_.noise_psd_dbm_hz) * radio_.bandwidth_hz;
  const double noise_and_interference = noise_w * db_to_linear(radio_.interference_margin_db);
  gain_constant_ = dbm_to_watt(radio_.tx_power_dbm) * tx_gain_ * rx_gain_ /
                   (noise_and_interference * radio_.pathloss_constant());
  margin_blocked_ = db_to_linear(fading_margin_db(radio_.shadow_sigma_blocked_db, radio_.edge_outage_prob));
  margin_los_ = db_to_linear(fading_margin_db(radio_.shadow_sigma_los_db, radio_.edge_outage_prob));
}

double blockage_probability(double r, const DeploymentConfig& dep, double site_height) {
  require(site_height > dep.ue_height, ErrorCode::invalid_geometry, "site height must exceed UE height");
  require(r >= 0.0, ErrorCode::domain, "distance must be nonnegative");
  const double slope = (dep.blocker_height - dep.ue_height) / (site_height - dep.ue_height);
  const double p =
      1.0 - std::exp(-2.0 * dep.blocker_density * dep.blocker_radius * (r * slope + dep.blocker_radius));
  return std::clamp(p, 0.0, 1.0);
}

double mean_blockage_probability(double inner, double outer, const DeploymentConfig& dep, double site_height) {
  require(outer > 0.0 && inner >= 0.0 && inner < outer, ErrorCode::domain, "region radii must satisfy 0 <= inner < outer");
  const double area = outer * outer - inner * inner;
  const auto weighted = [&](double r) { return blockage_probability(r, dep, site_height) * 2.0 * r / area; };
  return integrate(weighted, inner, outer, 0.0, 1e-8).value;
}

double mean_blockage_probability(double radius, const DeploymentConfig& dep, double site_height) {
  require(radius > 0.0, ErrorCode::domain, "radius must be positive");
  return mean_blockage_probability(0.0, radius, dep, site_height);
}

double path_loss_db(double y, LinkState state, double carrier_freq_ghz) {
  require(y >= 1.0, ErrorCode::domain, "path-loss model is valid for y >= 1 m");
  const double slope = state == LinkState::los ? 21.0 : 31.9;
  return 32.4 + slope * std::log10(y) + 20.0 * std::log10(carrier_freq_ghz);
}

double hpbw_deg(unsigned elements) {
  require(elements >= 1, ErrorCode::domain, "array needs at least one element");
  return 102.0 / static_cast<double>(elements);
}

double antenna_gain(unsigned elements) {
  const double half_width = 0.5 * hpbw_deg(elements) * kPi / 180.0;
  const double n = static_cast<double>(elements);
  const auto array_factor = [n](double theta) {
    const double x = 0.5 * kPi * std::cos(theta);
    const double den = std::sin(x);
    if (std::abs(den) < 1e-12) return n;
    return std::sin(n * x) / den;
  };
  const double lo = 0.5 * kPi - half_width;
  const double hi = 0.5 * kPi + half_width;
  const double broadside[] = {0.5 * kPi};
  return integrate(array_factor, lo, hi, 1e-10, 0.0, broadside).value / (hi - lo);
}

double array_gain(const AntennaArray& array) {
  return antenna_gain(array.horizontal) * antenna_gain(array.vertical);
}

double fading_margin_db(double sigma_db, double outage_prob) {
  require(outage_prob > 0.0 && outage_prob < 1.0, ErrorCode::domain, "outage probability must lie in (0, 1)");
  require(sigma_db > 0.0, ErrorCode::domain, "sigma must be positive");
  return std::sqrt(2.0) * sigma_db * erfc_inv(2.0 * outage_prob);
}

namespace {

double weighted_sinr(double y, const LinkModel& link, double margin_los, double margin_blocked) {
  require(y >= 1.0, ErrorCode::domain, "SINR model is valid for y >= 1 m");
  const double dh = link.height_offset();
  const double r2d = std::sqrt(std::max(0.0, y * y - dh * dh));
  const double pb = blockage_probability(r2d, link.deployment(), link.site_height());
  const auto& radio = link.radio();
  const double c = link.gain_constant();
  return c * std::pow(y, -radio.exponent_los) * (1.0 - pb) / margin_los +
         c * std::pow(y, -radio.exponent_blocked) * pb / margin_blocked;
}

}  // namespace

double mean_sinr(double y, const LinkModel& link) {
  return weighted_sinr(y, link, link.fading_margin_los(), link.fading_margin_blocked());
}

double median_sinr(double y, const LinkModel& link) { return weighted_sinr(y, link, 1.0, 1.0); }

double coverage_radius_sinr(const LinkModel& link) {
  const auto& radio = link.radio();
  const double threshold = db_to_linear(radio.outage_sinr_db);
  const double y2 = std::pow(link.gain_constant() / (threshold * link.fading_margin_blocked()),
                             2.0 / radio.exponent_blocked);
  const double dh = link.height_offset();
  const double radicand = y2 - dh * dh;
  if (!(radicand > 0.0))
    fail(ErrorCode::coverage_infeasible, "outage threshold unreachable even directly below the site");
  return std::sqrt(radicand);
}

double voronoi_radius(double bs_density) {
  require(bs_density > 0.0, ErrorCode::domain, "BS density must be positive");
  return std::sqrt(1.0 / (kPi * bs_density));
}

CoverageResult coverage(const LinkModel& link, double bs_density) {
  CoverageResult out;
  out.r_sinr = coverage_radius_sinr(link);
  out.r_voronoi = voronoi_radius(bs_density);
  out.r_cell = std::min(out.r_sinr, out.r_voronoi);
  return out;
}

}  // namespace nru
