#pragma once

#include <functional>
#include <span>

namespace nru {

inline constexpr double kPi = 3.14159265358979323846;

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;
double dbm_to_watt(double dbm) noexcept;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Adaptive Gauss-Kronrod (61-point) on [a, b]. Refines until the error
// estimate is below max(abs_tol, rel_tol * |value|). Optional breakpoints
// split the interval where the integrand has kinks.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol = 0.0, std::span<const double> breakpoints = {});

// Root of a continuous f on [lo, hi] with a sign change, to |hi-lo| <= x_tol.
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol,
              int max_iter = 400);

double erfc_inv(double x);
double normal_cdf(double z) noexcept;
double student_t_quantile(double dof, double p);
double chi_squared_quantile(double dof, double p);

}  // namespace nru
