#pragma once

#include <cmath>

#include "buspool/equilibrium.hpp"

/// Corrective toll on the pool option that moves the user equilibrium onto
/// the system optimum. Negative values are discounts; in hours of
/// time-equivalent cost (monetary conversion is a display concern).
namespace buspool {

struct TollResult {
  double tau_p;             ///< toll on pooling [h]; negative = discount
  double beta_so;           ///< system-optimal split the toll targets
  double beta_ue_untolled;  ///< user equilibrium before tolling
  double beta_ue_tolled;    ///< user equilibrium under tau_p
  bool restored;            ///< |beta_ue_tolled - beta_so| <= tol_beta
  bool policy_active;       ///< beta_so > 0; a zero split needs no toll
};

/// Closed-form toll at a given system-optimal split: the gap between the
/// marginal vehicle-network cost a solo trip imposes and the marginal
/// bus-network cost a pool trip imposes on pool and bus users. Equals
/// t_V - t_B at an interior system optimum by stationarity.
inline double pool_lane_toll(const Scenario& sc, double beta_so) {
  const auto& p = sc.params;
  const auto& d = sc.demand;
  const auto& s = sc.space;
  const auto& v = sc.service;
  const double veh_ratio =
      (d.x_pv + (1.0 - beta_so) * d.x_rs) / (s.omega * s.alpha * p.C);
  const double bus_cap = s.bus_fraction() * p.C;
  const double bus_ratio = (beta_so * d.x_rs / v.o_p + d.f_b) / bus_cap;
  return -p.t_f * p.a * p.b * std::pow(veh_ratio, p.b)
         + p.t_f * p.a * p.b * v.k / (v.o_p * bus_cap) *
               std::pow(bus_ratio, p.b - 1.0) *
               (beta_so * d.x_rs * v.delta_p + d.x_b * v.delta_b);
}

/// Solve the system optimum, evaluate the toll there, and re-solve the user
/// equilibrium under it. When the system optimum is beta = 0 the allocation
/// policy is off and the toll is zero by convention.
inline TollResult compute_toll(const Scenario& sc, const SolverOptions& opt = {},
                               double beta_lo = 0.0, double beta_hi = 1.0) {
  const SplitSolution so = solve_system_optimum(sc, opt, beta_lo, beta_hi);
  const SplitSolution ue = solve_user_equilibrium(sc, 0.0, opt, beta_lo, beta_hi);
  TollResult out{};
  out.beta_so = so.beta;
  out.beta_ue_untolled = ue.beta;
  out.policy_active = so.beta > 0.0;
  if (!out.policy_active) {
    out.tau_p = 0.0;
    out.beta_ue_tolled = ue.beta;
    out.restored = ue.beta == so.beta;
    return out;
  }
  out.tau_p = pool_lane_toll(sc, so.beta);
  out.beta_ue_tolled =
      solve_user_equilibrium(sc, out.tau_p, opt, beta_lo, beta_hi).beta;
  out.restored = std::abs(out.beta_ue_tolled - so.beta) <= opt.tol_beta;
  return out;
}

}  // namespace buspool
