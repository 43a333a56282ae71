#include "nru/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "nru/error.hpp"

namespace nru {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }
double dbm_to_watt(double dbm) noexcept { return std::pow(10.0, (dbm - 30.0) / 10.0); }

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

// Recursive bisection on top of a fixed 61-point Kronrod rule. Boost's own
// adaptive driver only exposes a relative tolerance.
void integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth, QuadratureResult& acc) {
  double err = 0.0;
  const double v = Kronrod::integrate(f, a, b, 0, 0.0, &err);
  if (err <= tol || depth >= 40 || b - a < 1e-14 * std::max(1.0, std::abs(a))) {
    acc.value += v;
    acc.error_estimate += err;
    return;
  }
  const double m = 0.5 * (a + b);
  integrate_adaptive(f, a, m, 0.5 * tol, depth + 1, acc);
  integrate_adaptive(f, m, b, 0.5 * tol, depth + 1, acc);
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, std::span<const double> breakpoints) {
  if (a == b) return {};
  require(a < b, ErrorCode::domain, "integration bounds must satisfy a < b");
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  double tol = abs_tol;
  if (rel_tol > 0.0) {
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) rough += Kronrod::integrate(f, cuts[i], cuts[i + 1], 0);
    tol = std::max(abs_tol, rel_tol * std::abs(rough));
  }
  QuadratureResult out;
  const double total_len = b - a;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double share = tol * (cuts[i + 1] - cuts[i]) / total_len;
    integrate_adaptive(f, cuts[i], cuts[i + 1], share, 0, out);
  }
  return out;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require((flo < 0.0) != (fhi < 0.0), ErrorCode::domain, "bisection bracket has no sign change");
  for (int it = 0; it < max_iter && hi - lo > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double erfc_inv(double x) {
  require(x > 0.0 && x < 2.0, ErrorCode::domain, "erfc_inv argument outside (0, 2)");
  return boost::math::erfc_inv(x);
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double student_t_quantile(double dof, double p) {
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, p);
}

double chi_squared_quantile(double dof, double p) {
  boost::math::chi_squared dist(dof);
  return boost::math::quantile(dist, p);
}

}  // namespace nru
