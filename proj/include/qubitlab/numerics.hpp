#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace qubitlab {

using Cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Wrap an angle to (-pi, pi].
double wrap_angle(double x);

/// Signed angular distance a - b mapped to (-pi, pi].
double angle_distance(double a, double b);

/// Remove 2*pi jumps from a sampled angle series (in place). Assumes the
/// sampling is fine enough that true increments stay below pi.
void unwrap_angles(std::vector<double>& phi);

/// Fourth-order central first derivative of a uniformly sampled series.
/// The two samples at each edge are left as NaN.
std::vector<double> deriv1_series(const std::vector<double>& y, double dt);

/// Fourth-order central second derivative, same edge convention.
std::vector<double> deriv2_series(const std::vector<double>& y, double dt);

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of a complex-valued integrand
/// over [a, b], bisecting until the local error estimate is below
/// rel_tol * |whole| (with a small absolute floor).
Cplx integrate_gk(const std::function<Cplx(double)>& f, double a, double b,
                  double rel_tol = 1e-10);

/// Least-squares fit of a 3-parameter linear model by normal equations.
/// basis[k] holds the three regressors of sample k.
std::array<double, 3> lsq_fit3(const std::vector<std::array<double, 3>>& basis,
                               const std::vector<double>& value);

} // namespace qubitlab
