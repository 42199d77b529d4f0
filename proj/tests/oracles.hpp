#pragma once

#include <cmath>

#include "buspool/equilibrium.hpp"

// Brute-force and quadrature oracles the solvers are checked against. These
// deliberately avoid the solver code paths: the system optimum is checked by
// grid argmin of the objective, the user equilibrium by grid argmin of the
// potential (integral of the delays), gradients by central differences.
namespace oracles {

// argmin of total passenger-hours over a uniform beta grid with `intervals`
// cells (solver and grid must then agree within 2 grid spacings)
inline double pht_grid_argmin(const buspool::Scenario& sc, int intervals) {
  double best_beta = 0.0;
  double best_value = buspool::pht(buspool::Split(0.0), sc).total;
  for (int i = 1; i <= intervals; ++i) {
    const double beta = static_cast<double>(i) / intervals;
    const double value = buspool::pht(buspool::Split(beta), sc).total;
    if (value < best_value) {
      best_value = value;
      best_beta = beta;
    }
  }
  return best_beta;
}

// 4-point Gauss-Legendre on [lo, hi]
template <class F>
inline double gauss4(F&& f, double lo, double hi) {
  constexpr double node1 = 0.33998104358485626;
  constexpr double node2 = 0.86113631159405257;
  constexpr double weight1 = 0.65214515486254614;
  constexpr double weight2 = 0.34785484513745386;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  return half * (weight1 * (f(mid - half * node1) + f(mid + half * node1)) +
                 weight2 * (f(mid - half * node2) + f(mid + half * node2)));
}

// argmin over a uniform beta grid of the equilibrium potential
//   J(beta) = integral_0^{(1-beta) x_rs} t_V + integral_0^{beta x_rs} (t_B + toll).
// Per grid cell, J changes by the quadrature of t_B + toll - t_V over two
// flow segments of equal width, evaluated at matched nodes. The integrand is
// increasing in beta, so J is convex on the grid and its argmin sits exactly
// where the cell increments turn positive; locating that sign change avoids
// accumulating the (possibly enormous) integral itself.
inline double beckmann_grid_argmin(const buspool::Scenario& sc, double toll,
                                   int intervals) {
  const double x_rs = sc.demand.x_rs;
  const auto t_v = [&sc](double s) {
    return buspool::vehicle_delay(s, sc.demand, sc.space, sc.params);
  };
  const auto t_b = [&sc, toll](double s) {
    return buspool::pool_delay(s, sc.demand, sc.space, sc.params, sc.service) +
           toll;
  };
  double best_beta = 0.0;
  for (int i = 1; i <= intervals; ++i) {
    const double beta_prev = static_cast<double>(i - 1) / intervals;
    const double beta = static_cast<double>(i) / intervals;
    const double width = (beta - beta_prev) * x_rs;
    const double pool_base = beta_prev * x_rs;
    const double solo_base = (1.0 - beta) * x_rs;
    const double increment = gauss4(
        [&](double u) { return t_b(pool_base + u) - t_v(solo_base + u); }, 0.0,
        width);
    if (!(increment < 0.0)) break;
    best_beta = beta;
  }
  return best_beta;
}

// central finite difference of total passenger-hours; beta must be at least
// h away from both boundaries
inline double pht_gradient_fd(const buspool::Scenario& sc, double beta,
                              double h = 1e-6) {
  const double up = buspool::pht(buspool::Split(beta + h), sc).total;
  const double down = buspool::pht(buspool::Split(beta - h), sc).total;
  return (up - down) / (2.0 * h);
}

// relative agreement between the closed-form gradient and the finite
// difference, with the denominator floored at the scale below which the
// difference quotient cannot resolve the gradient at all
inline double gradient_rel_error(const buspool::Scenario& sc, double beta) {
  const double closed = buspool::pht_gradient(buspool::Split(beta), sc);
  const double fd = pht_gradient_fd(sc, beta);
  const double scale = std::max({std::abs(closed), std::abs(fd),
                                 1e-4 * buspool::pht(buspool::Split(beta), sc).total});
  return std::abs(closed - fd) / scale;
}

}  // namespace oracles
