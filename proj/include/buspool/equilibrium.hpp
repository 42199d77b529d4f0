#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "buspool/model.hpp"

/// System-optimum and user-equilibrium solo/pool split, the passenger-hours
/// objective behind them, sufficient boundary conditions, and the Price of
/// Anarchy. Everything here is a pure function of an immutable Scenario.
namespace buspool {

/// One complete problem instance.
struct Scenario {
  NetworkParams params;
  SpaceAllocation space;
  DemandProfile demand;
  ServiceParams service;

  Scenario(NetworkParams params_, SpaceAllocation space_, DemandProfile demand_,
           ServiceParams service_)
      : params(params_), space(space_), demand(demand_), service(service_) {}

  /// t_V at split beta, i.e. at solo flow (1-beta) * x_rs.
  double vehicle_time(double beta) const {
    return vehicle_delay((1.0 - beta) * demand.x_rs, demand, space, params);
  }
  /// t_B at split beta, i.e. at pool passenger flow beta * x_rs.
  double pool_time(double beta) const {
    return pool_delay(beta * demand.x_rs, demand, space, params, service);
  }
  /// t_b at split beta.
  double bus_time(double beta) const {
    return bus_user_delay(beta * demand.x_rs, demand, space, params, service);
  }
};

struct SolverOptions {
  double tol_beta = 1e-8;  ///< guaranteed bracket width on beta
  double tol_abs = 1e-9;   ///< guaranteed residual on equalized delays [h]
  int max_iter = 200;      ///< bisection iteration cap
};

/// Passenger-hours travelled, by user group.
struct PhtBreakdown {
  double pv;     ///< private-vehicle users
  double rs;     ///< ride-hailing users, solo and pool combined
  double bus;    ///< bus users
  double total;  ///< pv + rs + bus
};

enum class SplitKind { interior, boundary_zero, boundary_one };

inline const char* to_string(SplitKind k) {
  switch (k) {
    case SplitKind::interior: return "interior";
    case SplitKind::boundary_zero: return "boundary_zero";
    case SplitKind::boundary_one: return "boundary_one";
  }
  return "?";
}

/// A solved split with the delays and passenger-hours realized at it.
/// For interior solutions `residual` is the solved stationarity (SO) or
/// delay-equalization (UE) residual; boundary solutions hold the one-sided
/// optimality inequality and carry residual 0.
struct SplitSolution {
  double beta;
  SplitKind kind;
  double t_vehicle;  ///< t_V at the solution [h]
  double t_pool;     ///< t_B at the solution [h]
  double t_bus;      ///< t_b at the solution [h]
  PhtBreakdown pht;
  double residual;
  bool clamped = false;  ///< pinned to a capacity-restricted interval edge
};

/// The four closed-form sufficient conditions, evaluated as printed.
struct ConditionReport {
  bool so_excludes_one;  ///< implies beta_SO < 1
  bool so_forces_zero;   ///< implies beta_SO = 0
  bool ue_excludes_one;  ///< implies beta_UE < 1
  bool ue_forces_zero;   ///< implies beta_UE = 0
};

/// Capacity feasibility over the split range: the vehicle network must carry
/// x_pv + (1-beta) x_rs within omega * alpha * C and the bus network
/// beta * x_rs / o_p + f_b within (1-alpha) * C.
struct FeasibilityReport {
  bool feasible_all_beta;  ///< both constraints hold on all of [0,1]
  bool any_feasible;       ///< the feasible beta interval is non-empty
  double beta_min;         ///< lower end of the feasible interval
  double beta_max;         ///< upper end of the feasible interval
};

/// Passenger-hours at a given split. rs counts solo users at t_V and pool
/// users at t_B; bus users always ride at t_b.
inline PhtBreakdown pht(const Split& split, const Scenario& sc) {
  const double beta = split.beta;
  const double x_s = (1.0 - beta) * sc.demand.x_rs;
  const double x_p = beta * sc.demand.x_rs;
  const double t_v = sc.vehicle_time(beta);
  const double t_p = sc.pool_time(beta);
  const double t_bus = sc.bus_time(beta);
  PhtBreakdown out{};
  out.pv = sc.demand.x_pv * t_v;
  out.rs = x_s * t_v + x_p * t_p;
  out.bus = sc.demand.x_b * t_bus;
  out.total = out.pv + out.rs + out.bus;
  return out;
}

/// Closed-form derivative of total passenger-hours with respect to beta.
/// Four terms: the marginal vehicle-network externality, the solo delay
/// leaving, the pool delay entering, and the congestion pool flow adds onto
/// pool and bus users in the bus network.
inline double pht_gradient(const Split& split, const Scenario& sc) {
  const double beta = split.beta;
  const auto& p = sc.params;
  const auto& d = sc.demand;
  const auto& s = sc.space;
  const auto& v = sc.service;
  const double veh_ratio =
      (d.x_pv + (1.0 - beta) * d.x_rs) / (s.omega * s.alpha * p.C);
  const double bus_cap = s.bus_fraction() * p.C;
  const double bus_ratio = (beta * d.x_rs / v.o_p + d.f_b) / bus_cap;
  const double veh_pow = std::pow(veh_ratio, p.b);
  const double bus_pow = std::pow(bus_ratio, p.b);
  return -p.t_f * p.a * p.b * d.x_rs * veh_pow
         - p.t_f * d.x_rs * (1.0 + p.a * veh_pow)
         + p.t_f * d.x_rs * (1.0 + p.a * bus_pow) * v.delta_p * v.k
         + p.t_f * p.a * p.b * d.x_rs / (v.o_p * bus_cap) *
               std::pow(bus_ratio, p.b - 1.0) * v.k *
               (d.x_b * v.delta_b + beta * d.x_rs * v.delta_p);
}

namespace detail {

/// Bisect a strictly decreasing f with f(lo) > 0 > f(hi). Runs until the
/// bracket reaches machine resolution or max_iter; the options' tolerances
/// are guaranteed upper bounds, not stopping targets.
template <class F>
inline double bisect_decreasing(F&& f, double lo, double hi, int max_iter) {
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline void check_interval(double beta_lo, double beta_hi) {
  require_domain(beta_lo >= 0.0 && beta_hi <= 1.0 && beta_lo <= beta_hi,
                 "solve: beta interval must satisfy 0 <= lo <= hi <= 1");
}

inline SplitSolution make_solution(const Scenario& sc, double beta,
                                   SplitKind kind, double residual,
                                   bool clamped) {
  SplitSolution out{};
  out.beta = beta;
  out.kind = kind;
  out.t_vehicle = sc.vehicle_time(beta);
  out.t_pool = sc.pool_time(beta);
  out.t_bus = sc.bus_time(beta);
  out.pht = pht(Split(beta), sc);
  out.residual = residual;
  out.clamped = clamped;
  return out;
}

}  // namespace detail

/// Minimizer of total passenger-hours over [beta_lo, beta_hi] (the central
/// authority's split). Unique for b > 1 by strict convexity; boundaries are
/// classified by one-sided gradient signs, interior points by bisecting the
/// gradient. boundary_zero/boundary_one refer to the interval ends.
inline SplitSolution solve_system_optimum(const Scenario& sc,
                                          const SolverOptions& opt = {},
                                          double beta_lo = 0.0,
                                          double beta_hi = 1.0) {
  detail::require_domain(sc.params.strictly_convex(),
                         "solve_system_optimum: requires b > 1");
  detail::check_interval(beta_lo, beta_hi);
  const bool clamped = beta_lo > 0.0 || beta_hi < 1.0;
  const auto grad = [&sc](double beta) { return pht_gradient(Split(beta), sc); };
  if (beta_lo == beta_hi)
    return detail::make_solution(sc, beta_lo, SplitKind::interior, 0.0, clamped);
  if (grad(beta_lo) >= 0.0)
    return detail::make_solution(sc, beta_lo, SplitKind::boundary_zero, 0.0,
                                 clamped);
  if (grad(beta_hi) <= 0.0)
    return detail::make_solution(sc, beta_hi, SplitKind::boundary_one, 0.0,
                                 clamped);
  const double beta = detail::bisect_decreasing(
      [&grad](double b) { return -grad(b); }, beta_lo, beta_hi, opt.max_iter);
  return detail::make_solution(sc, beta, SplitKind::interior,
                               std::abs(grad(beta)), clamped);
}

/// Wardrop split of ride-hailing users between solo and pool, optionally
/// under an additive toll (hours) on the pool option. With
/// h(beta) = t_V((1-beta) x_rs) - t_B(beta x_rs) - toll strictly decreasing:
/// h(lo) <= 0 pins the lower boundary, h(hi) >= 0 the upper, otherwise the
/// unique interior root equalizes the two generalized costs.
inline SplitSolution solve_user_equilibrium(const Scenario& sc,
                                            double toll = 0.0,
                                            const SolverOptions& opt = {},
                                            double beta_lo = 0.0,
                                            double beta_hi = 1.0) {
  detail::check_interval(beta_lo, beta_hi);
  const bool clamped = beta_lo > 0.0 || beta_hi < 1.0;
  const auto h = [&sc, toll](double beta) {
    return sc.vehicle_time(beta) - sc.pool_time(beta) - toll;
  };
  if (beta_lo == beta_hi)
    return detail::make_solution(sc, beta_lo, SplitKind::interior, 0.0, clamped);
  if (h(beta_lo) <= 0.0)
    return detail::make_solution(sc, beta_lo, SplitKind::boundary_zero, 0.0,
                                 clamped);
  if (h(beta_hi) >= 0.0)
    return detail::make_solution(sc, beta_hi, SplitKind::boundary_one, 0.0,
                                 clamped);
  const double beta = detail::bisect_decreasing(h, beta_lo, beta_hi, opt.max_iter);
  return detail::make_solution(sc, beta, SplitKind::interior, std::abs(h(beta)),
                               clamped);
}

/// The four sufficient boundary conditions, as closed-form inequalities on
/// the scenario. Each true flag certifies the corresponding solver outcome;
/// false flags certify nothing.
inline ConditionReport sufficient_conditions(const Scenario& sc) {
  const auto& p = sc.params;
  const auto& d = sc.demand;
  const auto& s = sc.space;
  const auto& v = sc.service;
  const double space_ratio = s.omega * s.alpha / s.bus_fraction();
  const double so_factor =
      std::pow((p.b + 1.0) / (p.b / v.o_p + 1.0), 1.0 / p.b);
  ConditionReport r{};
  r.so_excludes_one =
      space_ratio * (d.x_rs / v.o_p + d.f_b) > so_factor * d.x_pv;
  r.so_forces_zero = space_ratio * d.f_b >= so_factor * (d.x_pv + d.x_rs);
  r.ue_excludes_one =
      s.bus_fraction() * d.x_pv < s.omega * s.alpha * (d.x_rs / v.o_p + d.f_b);
  r.ue_forces_zero =
      s.bus_fraction() * (d.x_pv + d.x_rs) < s.omega * s.alpha * d.f_b;
  return r;
}

inline ConditionReport so_conditions(const Scenario& sc) {
  return sufficient_conditions(sc);
}
inline ConditionReport ue_conditions(const Scenario& sc) {
  return sufficient_conditions(sc);
}

/// Ratio of total passenger-hours at the user equilibrium to the system
/// optimum; >= 1 up to solver tolerance, 1 when the two splits coincide.
inline double price_of_anarchy(const Scenario& sc, const SolverOptions& opt = {}) {
  const SplitSolution ue = solve_user_equilibrium(sc, 0.0, opt);
  const SplitSolution so = solve_system_optimum(sc, opt);
  return ue.pht.total / so.pht.total;
}

/// Capacity feasibility of the split range. The vehicle constraint binds from
/// below (small beta keeps ride-hailing in the vehicle network), the bus
/// constraint from above.
inline FeasibilityReport feasibility_check(const Scenario& sc) {
  const auto& p = sc.params;
  const auto& d = sc.demand;
  const auto& s = sc.space;
  const auto& v = sc.service;
  const double veh_cap = s.omega * s.alpha * p.C;
  const double bus_cap = s.bus_fraction() * p.C;
  FeasibilityReport r{};
  const bool vehicle_possible = d.x_pv <= veh_cap;  // best case: beta = 1
  const bool bus_possible = d.f_b <= bus_cap;       // best case: beta = 0
  const double beta_min =
      std::max(0.0, 1.0 - (veh_cap - d.x_pv) / d.x_rs);
  const double beta_max =
      std::min(1.0, (bus_cap - d.f_b) * v.o_p / d.x_rs);
  r.any_feasible = vehicle_possible && bus_possible && beta_min <= beta_max;
  r.beta_min = r.any_feasible ? beta_min : 0.0;
  r.beta_max = r.any_feasible ? beta_max : 0.0;
  r.feasible_all_beta = r.any_feasible && beta_min == 0.0 && beta_max == 1.0;
  return r;
}

}  // namespace buspool
