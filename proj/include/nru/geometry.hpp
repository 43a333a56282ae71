#pragma once

namespace nru {

// Spatial layout of sites, users and human blockers. Densities per m^2,
// heights and radii in meters.
struct DeploymentConfig {
  double bs_density = 1e-4;
  double nru_ue_density = 0.02;
  double wigig_ue_density = 0.02;
  double blocker_density = 0.3;
  double bs_height = 10.0;
  double ap_height = 10.0;  // WiGig AP; collocated with the BS by default
  double ue_height = 1.5;
  double blocker_height = 1.7;
  double blocker_radius = 0.2;

  void validate() const;
};

struct AntennaArray {
  unsigned horizontal = 1;
  unsigned vertical = 1;
};

// Per-band radio parameters. dB-valued fields carry a _db/_dbm suffix and
// are converted to linear exactly once, inside LinkModel.
struct RadioConfig {
  double carrier_freq_ghz = 28.0;
  double bandwidth_hz = 400e6;
  double tx_power_dbm = 33.0;
  AntennaArray tx_array{64, 4};
  AntennaArray rx_array{8, 4};
  double interference_margin_db = 3.0;
  double noise_psd_dbm_hz = -174.0;
  double outage_sinr_db = -8.97;
  double edge_outage_prob = 0.1;
  double shadow_sigma_blocked_db = 8.2;
  double shadow_sigma_los_db = 4.0;
  double exponent_los = 2.1;
  double exponent_blocked = 3.19;

  static RadioConfig nr_licensed();
  static RadioConfig wigig_unlicensed();

  // A in L(y) = A y^zeta, linear.
  double pathloss_constant() const noexcept;
  void validate() const;
};

enum class LinkState { los, blocked };

struct CoverageResult {
  double r_sinr = 0.0;
  double r_voronoi = 0.0;
  double r_cell = 0.0;
};

// One band of one site: a deployment plus a radio, seen from a transmitter at
// site_height. Caches the linear link-budget constant C.
class LinkModel {
 public:
  LinkModel(const DeploymentConfig& dep, const RadioConfig& radio, double site_height);

  const DeploymentConfig& deployment() const noexcept { return dep_; }
  const RadioConfig& radio() const noexcept { return radio_; }
  double site_height() const noexcept { return site_height_; }
  // h_site - h_UE
  double height_offset() const noexcept { return site_height_ - dep_.ue_height; }

  double tx_gain() const noexcept { return tx_gain_; }
  double rx_gain() const noexcept { return rx_gain_; }
  // C = P G_tx G_rx / (N0 W M_I A), linear.
  double gain_constant() const noexcept { return gain_constant_; }
  double fading_margin_blocked() const noexcept { return margin_blocked_; }
  double fading_margin_los() const noexcept { return margin_los_; }

 private:
  DeploymentConfig dep_;
  RadioConfig radio_;
  double site_height_;
  double tx_gain_;
  double rx_gain_;
  double gain_constant_;
  double margin_blocked_;
  double margin_los_;
};

double blockage_probability(double r, const DeploymentConfig& dep, double site_height);
// Area-average of blockage_probability over the annulus inner <= r <= outer.
double mean_blockage_probability(double inner, double outer, const DeploymentConfig& dep, double site_height);
double mean_blockage_probability(double radius, const DeploymentConfig& dep, double site_height);

double path_loss_db(double y, LinkState state, double carrier_freq_ghz);

double hpbw_deg(unsigned elements);
// Mean array factor over the half-power beamwidth around broadside.
double antenna_gain(unsigned elements);
double array_gain(const AntennaArray& array);

// sqrt(2) sigma erfc^-1(2 p), in dB.
double fading_margin_db(double sigma_db, double outage_prob);

// Blockage-weighted SINR at 3D distance y (linear).
double mean_sinr(double y, const LinkModel& link);
// Same weighting with the shadowing margins left out (median shadowing).
double median_sinr(double y, const LinkModel& link);
// Blocked-state coverage radius: the 2D distance at which the margin-reduced
// blocked SINR equals the outage threshold.
double coverage_radius_sinr(const LinkModel& link);
double voronoi_radius(double bs_density);
CoverageResult coverage(const LinkModel& link, double bs_density);

}  // namespace nru
