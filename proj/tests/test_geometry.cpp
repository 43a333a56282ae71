#include <doctest.h>

#include <cmath>
#include <random>

#include "nru/error.hpp"
#include "nru/geometry.hpp"
#include "nru/numeric.hpp"
#include "nru/oracle.hpp"

using namespace nru;

namespace {

LinkModel licensed_link() {
  DeploymentConfig dep;
  return LinkModel(dep, RadioConfig::nr_licensed(), dep.bs_height);
}

}  // namespace

TEST_CASE("blockage probability examples") {
  DeploymentConfig dep;
  CHECK(blockage_probability(10.0, dep, 10.0) == doctest::Approx(0.0509).epsilon(1e-3));
  CHECK(blockage_probability(0.0, dep, 10.0) == doctest::Approx(1.0 - std::exp(-0.024)).epsilon(1e-12));
  const double direct = 1.0 - std::exp(-2.0 * 0.3 * 0.2 * (10.0 * 0.2 / 8.5 + 0.2));
  CHECK(blockage_probability(10.0, dep, 10.0) == doctest::Approx(direct).epsilon(1e-14));
  dep.blocker_density = 0.0;
  for (double r : {0.0, 1.0, 50.0, 1e3}) CHECK(blockage_probability(r, dep, 10.0) == 0.0);
}

TEST_CASE("blockage probability rejects a site below the UE") {
  DeploymentConfig dep;
  CHECK_THROWS_AS(blockage_probability(10.0, dep, 1.5), Error);
  CHECK_THROWS_AS(blockage_probability(10.0, dep, 1.0), Error);
}

TEST_CASE("blockage probability is bounded and monotone over random draws") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    DeploymentConfig dep;
    dep.blocker_density = 2.0 * u(gen);
    dep.blocker_radius = 0.05 + 0.5 * u(gen);
    dep.ue_height = 1.0 + u(gen);
    dep.blocker_height = dep.ue_height + 0.1 + u(gen);
    const double h = dep.blocker_height + 1.0 + 20.0 * u(gen);
    const double r = 200.0 * u(gen);
    const double dr = 10.0 * u(gen);
    const double p = blockage_probability(r, dep, h);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(blockage_probability(r + dr, dep, h) >= p);
    CHECK(std::abs(blockage_probability(r + 1e-9, dep, h) - p) < 1e-8);
    DeploymentConfig denser = dep;
    denser.blocker_density += u(gen);
    CHECK(blockage_probability(r, denser, h) >= p);
    DeploymentConfig wider = dep;
    wider.blocker_radius += 0.3 * u(gen);
    CHECK(blockage_probability(r, wider, h) >= p);
  }
}

TEST_CASE("mean blockage probability") {
  DeploymentConfig dep;
  SUBCASE("no blockers") {
    dep.blocker_density = 0.0;
    CHECK(mean_blockage_probability(50.0, dep, 10.0) == 0.0);
  }
  SUBCASE("constant profile averages to itself") {
    dep.blocker_height = dep.ue_height + 1e-12;
    const double c = blockage_probability(0.0, dep, 10.0);
    CHECK(mean_blockage_probability(80.0, dep, 10.0) == doctest::Approx(c).epsilon(1e-9));
  }
  SUBCASE("agrees with disk sampling") {
    SimControl ctl;
    ctl.seed = 3;
    ctl.budget = 1'000'000;
    const auto mc = mc_mean_blockage(50.0, dep, 10.0, ctl);
    const double analytic = mean_blockage_probability(50.0, dep, 10.0);
    CHECK(mc.within_sigmas(analytic, 3.0));
  }
  CHECK_THROWS_AS(mean_blockage_probability(0.0, dep, 10.0), Error);
  CHECK_THROWS_AS(mean_blockage_probability(-1.0, dep, 10.0), Error);
}

TEST_CASE("path loss") {
  CHECK(path_loss_db(1.0, LinkState::los, 28.0) == doctest::Approx(32.4 + 20.0 * std::log10(28.0)).epsilon(1e-14));
  CHECK(path_loss_db(100.0, LinkState::los, 28.0) == doctest::Approx(103.34).epsilon(1e-4));
  CHECK(path_loss_db(100.0, LinkState::blocked, 28.0) - path_loss_db(100.0, LinkState::los, 28.0) ==
        doctest::Approx(21.8).epsilon(1e-12));
  for (double y = 1.0; y <= 1e4; y *= 1.7) {
    const double gap = path_loss_db(y, LinkState::blocked, 60.0) - path_loss_db(y, LinkState::los, 60.0);
    CHECK(gap == doctest::Approx(10.9 * std::log10(y)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(path_loss_db(0.5, LinkState::los, 28.0), Error);
}

TEST_CASE("antenna gain and beamwidth") {
  CHECK(antenna_gain(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hpbw_deg(64) == 1.59375);
  CHECK(antenna_gain(16) > antenna_gain(8));
  CHECK(antenna_gain(8) > antenna_gain(4));
  CHECK(array_gain({8, 4}) == doctest::Approx(antenna_gain(8) * antenna_gain(4)).epsilon(1e-14));
  CHECK_THROWS_AS(hpbw_deg(0), Error);
  CHECK_THROWS_AS(antenna_gain(0), Error);
}

TEST_CASE("fading margin") {
  CHECK(std::abs(fading_margin_db(8.2, 0.5)) < 1e-12);
  // 10% outage of a unit Gaussian sits 1.2815515655446004 sigma out.
  CHECK(fading_margin_db(1.0, 0.1) == doctest::Approx(1.2815515655446004).epsilon(1e-10));
  CHECK(fading_margin_db(4.0, 0.1) == doctest::Approx(4.0 * 1.2815515655446004).epsilon(1e-10));
}

TEST_CASE("mean SINR against a dB-domain recomputation") {
  const auto link = licensed_link();
  const double y = 50.0;
  const DeploymentConfig dep;
  const double dh = dep.bs_height - dep.ue_height;
  const double pb = blockage_probability(std::sqrt(y * y - dh * dh), dep, dep.bs_height);
  const double z = 1.2815515655446004;
  const double gains_db = 10.0 * std::log10(antenna_gain(64) * antenna_gain(4) * antenna_gain(8) * antenna_gain(4));
  const double noise_dbm = -174.0 + 10.0 * std::log10(400e6);
  const double base_db = 33.0 + gains_db - noise_dbm - 3.0;
  const double los_db = base_db - path_loss_db(y, LinkState::los, 28.0) - z * 4.0;
  const double blk_db = base_db - path_loss_db(y, LinkState::blocked, 28.0) - z * 8.2;
  const double expected = (1.0 - pb) * std::pow(10.0, los_db / 10.0) + pb * std::pow(10.0, blk_db / 10.0);
  CHECK(mean_sinr(y, link) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("mean SINR limits in the blockage probability") {
  DeploymentConfig clear;
  clear.blocker_density = 0.0;
  const LinkModel link(clear, RadioConfig::nr_licensed(), clear.bs_height);
  for (double y : {10.0, 40.0, 300.0}) {
    const double los = link.gain_constant() * std::pow(y, -2.1) / link.fading_margin_los();
    CHECK(mean_sinr(y, link) == doctest::Approx(los).epsilon(1e-12));
  }
  DeploymentConfig crowded;
  crowded.blocker_density = 1e6;
  const LinkModel blocked(crowded, RadioConfig::nr_licensed(), crowded.bs_height);
  for (double y : {10.0, 40.0, 300.0}) {
    const double blk = blocked.gain_constant() * std::pow(y, -3.19) / blocked.fading_margin_blocked();
    CHECK(mean_sinr(y, blocked) == doctest::Approx(blk).epsilon(1e-12));
  }
}

TEST_CASE("mean SINR decreases with distance") {
  for (const auto& radio : {RadioConfig::nr_licensed(), RadioConfig::wigig_unlicensed()}) {
    DeploymentConfig dep;
    const LinkModel link(dep, radio, dep.bs_height);
    double prev = mean_sinr(8.5, link);
    for (double y = 9.0; y <= 1e3; y += 0.5) {
      const double s = mean_sinr(y, link);
      CHECK(s < prev);
      prev = s;
    }
  }
}

TEST_CASE("coverage radius against a bisection root") {
  const auto link = licensed_link();
  const double r = coverage_radius_sinr(link);
  const DeploymentConfig dep;
  const double dh = dep.bs_height - dep.ue_height;
  const double z = 1.2815515655446004;
  const double base_db = 33.0 +
                         10.0 * std::log10(antenna_gain(64) * antenna_gain(4) * antenna_gain(8) * antenna_gain(4)) -
                         (-174.0 + 10.0 * std::log10(400e6)) - 3.0 - z * 8.2;
  const auto excess = [&](double x) {
    const double y = std::sqrt(x * x + dh * dh);
    return base_db - path_loss_db(y, LinkState::blocked, 28.0) - (-8.97);
  };
  double lo = 0.0, hi = 1e5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  CHECK(std::abs(r - 0.5 * (lo + hi)) < 1e-6);
}

TEST_CASE("coverage radius at median fading and when unreachable") {
  DeploymentConfig dep;
  RadioConfig radio = RadioConfig::nr_licensed();
  radio.edge_outage_prob = 0.5;
  const LinkModel median(dep, radio, dep.bs_height);
  CHECK(median.fading_margin_blocked() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(median.fading_margin_los() == doctest::Approx(1.0).epsilon(1e-12));
  radio.tx_power_dbm = -120.0;
  const LinkModel weak(dep, radio, dep.bs_height);
  try {
    coverage_radius_sinr(weak);
    FAIL("expected coverage_infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::coverage_infeasible);
  }
}

TEST_CASE("Voronoi radius") {
  CHECK(voronoi_radius(1.0 / kPi) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(voronoi_radius(1e-4) == doctest::Approx(56.42).epsilon(1e-4));
  CHECK(voronoi_radius(1e-4) / voronoi_radius(2e-4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(voronoi_radius(0.0), Error);
}

TEST_CASE("cell radius is the smaller radius and shrinks with density") {
  const auto link = licensed_link();
  double prev = INFINITY;
  for (double density = 1e-7; density < 1e-2; density *= 1.5) {
    const auto c = coverage(link, density);
    CHECK(c.r_cell == std::min(c.r_sinr, c.r_voronoi));
    CHECK(c.r_cell > 0.0);
    CHECK(c.r_cell <= prev);
    prev = c.r_cell;
  }
}

TEST_CASE("deployment validation") {
  DeploymentConfig dep;
  dep.blocker_density = -0.1;
  CHECK_THROWS_AS(dep.validate(), Error);
  dep = {};
  dep.blocker_height = 1.2;
  CHECK_THROWS_AS(dep.validate(), Error);
  dep = {};
  dep.bs_height = 1.6;
  CHECK_THROWS_AS(dep.validate(), Error);
  dep = {};
  dep.blocker_radius = 0.0;
  CHECK_THROWS_AS(dep.validate(), Error);
}
