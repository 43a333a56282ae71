#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "nru/geometry.hpp"
#include "nru/mcs.hpp"
#include "nru/pmf.hpp"

namespace nru {

// Disk (inner = 0) or annulus of 2D distances around the site.
struct Region {
  double inner = 0.0;
  double outer = 1.0;

  static Region disk(double radius) { return {0.0, radius}; }
  static Region annulus(double inner, double outer) { return {inner, outer}; }
  bool is_disk() const noexcept { return inner == 0.0; }
  double area() const noexcept;
  void validate() const;
};

// One propagation state of one band: SINR_dB(y) = gain_db - 10 zeta log10(y),
// plus zero-mean Gaussian shadowing with sigma_db.
struct PropagationBranch {
  double gain_db = 0.0;
  double exponent = 2.0;
  double sigma_db = 1.0;
};

PropagationBranch propagation_branch(const LinkModel& link, LinkState state);

// CDF of the 3D link distance for a user uniform on the region.
double distance_cdf_3d(double x, const Region& region, double height_offset);

// SINR (dB) CDF of one branch without shadowing.
double sinr_cdf_no_fading(double x_db, const Region& region, double height_offset, const PropagationBranch& b);
// Same branch convolved with the Gaussian shadowing kernel, by quadrature.
double sinr_cdf_with_fading(double x_db, const Region& region, double height_offset, const PropagationBranch& b);
// The same convolution written with error functions.
double sinr_cdf_closed_form(double x_db, const Region& region, double height_offset, const PropagationBranch& b);

// Blockage-weighted SINR CDF of a region served by `link`. The blockage
// probability is averaged over the region once at construction.
class SinrDistribution {
 public:
  SinrDistribution(const Region& region, const LinkModel& link);
  SinrDistribution(const Region& region, double height_offset, const PropagationBranch& los,
                   const PropagationBranch& blocked, double blockage_prob);

  double cdf(double x_db) const;
  double blockage_probability() const noexcept { return pb_; }
  const Region& region() const noexcept { return region_; }
  const PropagationBranch& los() const noexcept { return los_; }
  const PropagationBranch& blocked() const noexcept { return blocked_; }
  double height_offset() const noexcept { return dh_; }

 private:
  Region region_;
  double dh_;
  PropagationBranch los_;
  PropagationBranch blocked_;
  double pb_;
};

double sinr_cdf_mixture(double x_db, const Region& region, const LinkModel& link);

// One MCS row after discretization into resource units.
struct DemandClass {
  std::size_t units = 0;
  double sinr_lo_db = 0.0;
  double sinr_hi_db = 0.0;  // +inf for the top row
  double efficiency = 0.0;
  double mass = 0.0;        // SINR-CDF mass of the row, before renormalization
};

struct DemandPmf {
  DiscretePmf pmf;
  // Mass below the outage threshold plus mass of rows demanding more than R_cap.
  double infeasible_mass = 0.0;
  std::vector<DemandClass> classes;
};

// Units needed to carry rate_bps at the given efficiency.
std::size_t resource_units(double rate_bps, double efficiency, double unit_bw_hz);

DemandPmf demand_pmf(const std::function<double(double)>& sinr_cdf, const McsTable& mcs, double min_rate_bps,
                     double unit_bw_hz, std::size_t capacity_units);
DemandPmf demand_pmf(const Region& region, const LinkModel& link, const McsTable& mcs, double min_rate_bps,
                     double unit_bw_hz, std::size_t capacity_units);

// Area-weighted mean of log2(1 + SINR(x)) over a disk. The overload taking a
// callable evaluates an arbitrary linear SINR profile of the 2D distance.
double mean_spectral_efficiency(double radius, const std::function<double(double)>& sinr_of_r);
double mean_spectral_efficiency(double radius, const LinkModel& link);
// sum over MCS rows of (row SINR mass) x (row efficiency); outage counts as 0.
double mean_mcs_efficiency(const SinrDistribution& dist, const McsTable& mcs);
std::size_t b_min(double min_rate_bps, double mean_efficiency, double unit_bw_hz);

}  // namespace nru
