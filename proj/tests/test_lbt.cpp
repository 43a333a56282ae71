#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nru/error.hpp"
#include "nru/lbt.hpp"
#include "nru/oracle.hpp"
#include "nru/pipeline.hpp"

using namespace nru;

namespace {

ContentionConfig default_contention(double pb = 0.0) {
  ContentionConfig cfg;
  cfg.blockage_prob = pb;
  return cfg;
}

}  // namespace

TEST_CASE("retry distribution") {
  const auto sure = retry_distribution(1.0, 3);
  CHECK(sure == std::vector<double>{1.0, 0.0, 0.0, 0.0});
  const auto half = retry_distribution(0.5, 1);
  CHECK(half[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  for (unsigned T = 0; T <= 8; ++T)
    for (double theta = 0.001; theta <= 1.0; theta += 0.0037)
      CHECK(retry_balance_residual(retry_distribution(theta, T), theta) < 1e-12);
  CHECK_THROWS_AS(retry_distribution(0.0, 3), Error);
}

TEST_CASE("mean backoff") {
  CHECK(mean_backoff_slots(0, 16) == 8.5);
  CHECK(mean_backoff_slots(3, 16) == 64.5);
  CHECK(mean_backoff_slots(0, 1) == 1.0);
}

TEST_CASE("transmission probability") {
  for (unsigned T : {0u, 1u, 3u, 6u}) CHECK(transmission_probability(1.0, 16, T) == doctest::Approx(1.0 / 8.5));
  // Limit of the closed form at theta = 1/2.
  for (unsigned T : {0u, 1u, 2u, 3u}) {
    const double t1 = T + 1.0;
    const double limit = 1.0 / (0.5 + 16.0 * 0.5 * t1 / (2.0 * (1.0 - std::pow(0.5, t1))));
    CHECK(std::abs(transmission_probability(0.5, 16, T) - limit) < 1e-9);
  }
  for (double theta : {0.1, 0.5, 0.9})
    for (unsigned cw = 1; cw <= 512; cw *= 2)
      CHECK(transmission_probability(theta, 2 * cw, 3) < transmission_probability(theta, cw, 3));
}

TEST_CASE("direct sum and closed form agree away from theta = 1/2") {
  for (unsigned T = 0; T <= 6; ++T)
    for (unsigned cw : {1u, 2u, 16u, 64u})
      for (int i = 1; i <= 2000; ++i) {
        const double theta = i / 2000.0;
        if (std::abs(theta - 0.5) < 1e-3) continue;
        CHECK(std::abs(transmission_probability(theta, cw, T) - transmission_probability_closed_form(theta, cw, T)) <
              1e-9);
      }
  double worst = 0.0;
  double prev = transmission_probability(0.5 - 1e-3, 16, 3);
  for (int i = 1; i <= 2000; ++i) {
    const double v = transmission_probability(0.5 - 1e-3 + i * 1e-6, 16, 3);
    worst = std::max(worst, std::abs(v - prev));
    prev = v;
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("contention fixed point") {
  SUBCASE("lone station") {
    const auto pt = solve_contention(1, 0, default_contention());
    REQUIRE(pt.nru.has_value());
    CHECK_FALSE(pt.wigig.has_value());
    CHECK(pt.nru->p_c == 0.0);
    CHECK(pt.nru->theta == 1.0);
    CHECK(pt.nru->pi == doctest::Approx(2.0 / 17.0).epsilon(1e-8));
  }
  SUBCASE("lone station under the literal collision count") {
    auto cfg = default_contention();
    cfg.literal_collision = true;
    const auto pt = solve_contention(1, 0, cfg);
    CHECK(pt.nru->p_c > 0.0);
  }
  SUBCASE("empty NR-U population mirrors a WiGig-only system") {
    auto cfg = default_contention(0.1);
    const auto only_w = solve_contention(0, 4, cfg);
    CHECK_FALSE(only_w.nru.has_value());
    ContentionConfig swapped = cfg;
    swapped.cw_nru = cfg.cw_wigig;
    const auto as_nru = solve_contention(4, 0, swapped);
    CHECK(only_w.wigig->pi == doctest::Approx(as_nru.nru->pi).epsilon(1e-9));
    CHECK(only_w.wigig->p_c == doctest::Approx(as_nru.nru->p_c).epsilon(1e-9));
  }
  SUBCASE("consistency of theta, p_c and q") {
    for (unsigned n = 1; n <= 6; ++n)
      for (unsigned m = 0; m <= 6; ++m) {
        const auto cfg = default_contention(0.2);
        const auto pt = solve_contention(n, m, cfg);
        CHECK(pt.residual < cfg.tolerance);
        CHECK(pt.nru->theta == doctest::Approx((1.0 - pt.nru->p_c) * 0.8).epsilon(1e-12));
        double qs = 0.0;
        for (double v : pt.nru->q) qs += v;
        CHECK(qs == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pt.nru->pi ==
              doctest::Approx(transmission_probability(pt.nru->theta, cfg.cw_nru, cfg.max_retries)).epsilon(1e-8));
      }
  }
  SUBCASE("collision grows with either population") {
    const auto cfg = default_contention(0.1);
    for (unsigned n = 1; n <= 12; ++n)
      for (unsigned m = 0; m <= 12; ++m) {
        const auto here = solve_contention(n, m, cfg);
        CHECK(solve_contention(n + 1, m, cfg).nru->p_c >= here.nru->p_c - 1e-12);
        CHECK(solve_contention(n, m + 1, cfg).nru->p_c >= here.nru->p_c - 1e-12);
      }
  }
  SUBCASE("non-convergence is reported") {
    auto cfg = default_contention();
    cfg.max_iterations = 1;
    try {
      solve_contention(8, 8, cfg);
      FAIL("expected convergence error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::convergence);
    }
  }
}

TEST_CASE("contention solver caches identical points") {
  const ContentionSolver solver(default_contention(0.1));
  const auto& a = solver.at(3, 2);
  const auto& b = solver.at(3, 2);
  CHECK(&a == &b);
  const auto direct = solve_contention(3, 2, solver.config());
  CHECK(a.nru->pi == direct.nru->pi);
}

TEST_CASE("mixed success probability") {
  const ContentionSolver idle(default_contention());
  CHECK(success_probability(0.0, 0.0, idle) == doctest::Approx(2.0 / 17.0).epsilon(1e-8));
  const ContentionSolver blocked(default_contention(0.999999));
  CHECK(success_probability(0.5, 0.5, blocked) < 1e-5);
  SUBCASE("nonincreasing in each load and in blockage") {
    const ContentionSolver s(default_contention(0.1));
    double prev = 1.0;
    for (double l = 0.0; l <= 6.0; l += 0.5) {
      const double v = success_probability(l, 1.0, s);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
    prev = 1.0;
    for (double l = 0.0; l <= 6.0; l += 0.5) {
      const double v = success_probability(1.0, l, s);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
    prev = 1.0;
    for (double pb = 0.0; pb < 0.95; pb += 0.05) {
      const ContentionSolver sp(default_contention(pb));
      const double v = success_probability(1.0, 1.0, sp);
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
  SUBCASE("truncation bound") {
    const ContentionSolver s(default_contention(0.1));
    const auto mix = mixed_contention(3.0, 2.0, s, 1e-9);
    CHECK(mix.truncated_mass < 1e-9);
  }
  SUBCASE("agrees with Poisson populations simulated slot by slot") {
    const auto cfg = default_contention(0.1);
    const ContentionSolver s(cfg);
    const auto mc = mc_success_probability(1.0, 1.0, cfg, 2000, 5000, 5);
    CHECK(mc.within_sigmas(success_probability(1.0, 1.0, s), 3.0));
  }
}

TEST_CASE("attained rates and QoS violation") {
  const auto single = DiscretePmf::point_mass(3);
  const std::vector<double> eff{NAN, NAN, NAN, 1.0};
  const auto r = attained_rates(0.1, single, eff, 2.16e9);
  CHECK(r.per_class[3] == doctest::Approx(216e6).epsilon(1e-14));
  CHECK(r.mean == doctest::Approx(216e6).epsilon(1e-14));
  const auto none = attained_rates(0.0, single, eff, 2.16e9);
  CHECK(none.per_class[3] == 0.0);
  CHECK(none.mean == 0.0);
  CHECK_THROWS_AS(attained_rates(0.1, DiscretePmf::point_mass(2), eff, 2.16e9), Error);

  const DiscretePmf two({0.0, 0.3, 0.7});
  const std::vector<double> eff2{NAN, 1.0, 4.0};
  const auto rr = attained_rates(0.05, two, eff2, 2.16e9);
  CHECK(qos_violation(rr, two, 1e6) == 0.0);
  CHECK(qos_violation(rr, two, 1e12) == 1.0);
  CHECK(qos_violation(rr, two, 200e6) == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("unlicensed efficiency map covers every licensed demand level") {
  const auto sc = Scenario::defaults();
  const auto cell = prepare_cell(sc);
  const auto& m = cell.unlicensed_efficiency;
  for (std::size_t j = 0; j < cell.type2.pmf.size(); ++j) {
    if (cell.type2.pmf[j] > 0.0) {
      REQUIRE(j < m.size());
      CHECK(std::isfinite(m[j]));
      CHECK(m[j] >= 0.0);
    }
  }
}
