#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

/// Aggregate two-subnetwork delay model: a vehicle network shared by private
/// cars and solo ride-hailing, and a bus network shared by buses and pooled
/// ride-hailing vehicles. All quantities are network-level averages; flows
/// are passengers/hour unless noted, times are hours.
namespace buspool {

namespace detail {

inline void require_arg(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

inline void require_domain(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace detail

/// Constants of the baseline delay function t(x) = t_f * (1 + a * (x/C)^b).
struct NetworkParams {
  double t_f;  ///< free-flow travel time [h]
  double a;    ///< delay coefficient
  double b;    ///< delay exponent
  double C;    ///< network capacity [pax/h]

  NetworkParams(double t_f_, double a_, double b_, double C_)
      : t_f(t_f_), a(a_), b(b_), C(C_) {
    detail::require_arg(t_f > 0.0, "NetworkParams: t_f must be > 0");
    detail::require_arg(a > 0.0, "NetworkParams: a must be > 0");
    detail::require_arg(b > 0.0, "NetworkParams: b must be > 0");
    detail::require_arg(C > 0.0, "NetworkParams: C must be > 0");
  }

  /// b > 1 makes total passenger-hours strictly convex in the split; the
  /// system-optimum solver requires it.
  bool strictly_convex() const noexcept { return b > 1.0; }
};

/// Fraction of road space given to the vehicle network, plus the capacity
/// drop caused by idle ride-hailing vehicles roaming there.
struct SpaceAllocation {
  double alpha;  ///< vehicle-network space fraction, in (0,1)
  double n_e;    ///< idle ride-hailing vehicle count, >= 0
  double omega;  ///< capacity-reduction factor, in (0,1]; 1 when n_e == 0

  SpaceAllocation(double alpha_, double n_e_, double omega_)
      : alpha(alpha_), n_e(n_e_), omega(omega_) {
    detail::require_arg(alpha > 0.0 && alpha < 1.0,
                        "SpaceAllocation: alpha must be in (0,1)");
    detail::require_arg(n_e >= 0.0, "SpaceAllocation: n_e must be >= 0");
    detail::require_arg(omega > 0.0 && omega <= 1.0,
                        "SpaceAllocation: omega must be in (0,1]");
    detail::require_arg(n_e > 0.0 || omega == 1.0,
                        "SpaceAllocation: omega must be 1 when n_e is 0");
  }

  /// Build from a capacity-drop curve evaluated once at the idle fleet size.
  static SpaceAllocation with_capacity_drop(
      double alpha, double n_e, const std::function<double(double)>& omega_of_ne) {
    return SpaceAllocation(alpha, n_e, omega_of_ne(n_e));
  }

  double bus_fraction() const noexcept { return 1.0 - alpha; }
};

/// Exogenous demand rates per mode and the (constant) bus flow.
struct DemandProfile {
  double x_pv;  ///< private-vehicle demand [pax/h]
  double x_rs;  ///< total ride-hailing demand [pax/h]
  double x_b;   ///< bus-user demand [pax/h]
  double f_b;   ///< average bus flow, same units as the capacity C

  DemandProfile(double x_pv_, double x_rs_, double x_b_, double f_b_)
      : x_pv(x_pv_), x_rs(x_rs_), x_b(x_b_), f_b(f_b_) {
    detail::require_arg(x_pv > 0.0, "DemandProfile: x_pv must be > 0");
    detail::require_arg(x_rs > 0.0, "DemandProfile: x_rs must be > 0");
    detail::require_arg(x_b > 0.0, "DemandProfile: x_b must be > 0");
    detail::require_arg(f_b > 0.0, "DemandProfile: f_b must be > 0");
    detail::require_arg(f_b < x_b, "DemandProfile: f_b must be < x_b");
  }
};

/// Pool/bus service constants: occupancy, detour factors, stop penalty and
/// the bus-interference slowdown on pool vehicles.
struct ServiceParams {
  double o_p;      ///< pool vehicle occupancy [pax/veh], > 1
  double delta_p;  ///< pool detour factor, > 1
  double delta_b;  ///< bus detour factor, > 1
  double gamma;    ///< boarding/alighting penalty [h], > 0
  double k;        ///< bus-interference factor, > 1

  ServiceParams(double o_p_, double delta_p_, double delta_b_, double gamma_,
                double k_)
      : o_p(o_p_), delta_p(delta_p_), delta_b(delta_b_), gamma(gamma_), k(k_) {
    detail::require_arg(o_p > 1.0, "ServiceParams: o_p must be > 1");
    detail::require_arg(delta_p > 1.0, "ServiceParams: delta_p must be > 1");
    detail::require_arg(delta_b > 1.0, "ServiceParams: delta_b must be > 1");
    detail::require_arg(gamma > 0.0, "ServiceParams: gamma must be > 0");
    detail::require_arg(k > 1.0, "ServiceParams: k must be > 1");
  }

  /// Build from an interference curve evaluated once at the fixed bus flow.
  static ServiceParams with_bus_interference(
      double o_p, double delta_p, double delta_b, double gamma,
      const std::function<double(double)>& k_of_fb, double f_b) {
    return ServiceParams(o_p, delta_p, delta_b, gamma, k_of_fb(f_b));
  }
};

/// Fraction of ride-hailing demand that pools. Pool passenger flow is
/// beta * x_rs, solo passenger flow is (1 - beta) * x_rs.
struct Split {
  double beta;

  explicit Split(double beta_) : beta(beta_) {
    detail::require_arg(beta >= 0.0 && beta <= 1.0,
                        "Split: beta must be in [0,1]");
  }

  double pool_flow(const DemandProfile& d) const noexcept { return beta * d.x_rs; }
  double solo_flow(const DemandProfile& d) const noexcept {
    return (1.0 - beta) * d.x_rs;
  }
};

/// Average network travel time t(x) = t_f * (1 + a * (x/C)^b).
inline double base_delay(double x, const NetworkParams& p) {
  detail::require_domain(x >= 0.0, "base_delay: flow must be >= 0");
  return p.t_f * (1.0 + p.a * std::pow(x / p.C, p.b));
}

/// Travel time in the vehicle network at solo flow x_s, with private vehicles
/// on top and capacity omega * alpha * C.
inline double vehicle_delay(double x_s, const DemandProfile& d,
                            const SpaceAllocation& s, const NetworkParams& p) {
  detail::require_domain(x_s >= 0.0 && x_s <= d.x_rs,
                         "vehicle_delay: x_s must be in [0, x_rs]");
  const double ratio = (d.x_pv + x_s) / (s.omega * s.alpha * p.C);
  return p.t_f * (1.0 + p.a * std::pow(ratio, p.b));
}

/// Travel time of pool passengers in the bus network at pool passenger flow
/// x_p: pool vehicle flow x_p/o_p shares the (1-alpha)C capacity with buses,
/// stretched by the detour factor and the bus-interference slowdown.
inline double pool_delay(double x_p, const DemandProfile& d,
                         const SpaceAllocation& s, const NetworkParams& p,
                         const ServiceParams& v) {
  detail::require_domain(x_p >= 0.0 && x_p <= d.x_rs,
                         "pool_delay: x_p must be in [0, x_rs]");
  const double ratio = (x_p / v.o_p + d.f_b) / (s.bus_fraction() * p.C);
  return p.t_f * (1.0 + p.a * std::pow(ratio, p.b)) * v.delta_p * v.k;
}

/// Bus-user travel time: same congestion term as pool_delay with the bus
/// detour factor and an additive boarding/alighting penalty.
inline double bus_user_delay(double x_p, const DemandProfile& d,
                             const SpaceAllocation& s, const NetworkParams& p,
                             const ServiceParams& v) {
  detail::require_domain(x_p >= 0.0 && x_p <= d.x_rs,
                         "bus_user_delay: x_p must be in [0, x_rs]");
  const double ratio = (x_p / v.o_p + d.f_b) / (s.bus_fraction() * p.C);
  return p.t_f * (1.0 + p.a * std::pow(ratio, p.b)) * v.delta_b * v.k + v.gamma;
}

/// Vehicle accumulation sustained by a steady flow x: n(x) = x * t(x).
/// Strictly increasing and convex, hence invertible on the increasing branch.
inline double accumulation(double x, const NetworkParams& p) {
  detail::require_domain(x >= 0.0, "accumulation: flow must be >= 0");
  return x * base_delay(x, p);
}

/// Inverse of accumulation(): the unique flow sustaining accumulation n.
/// Bracketed bisection on [0, C], doubling the bracket when n exceeds the
/// accumulation at capacity; the increasing branch has no upper flow bound.
/// Round-trip guarantee: |accumulation(mfd_flow(n)) - n| <= tol_abs for
/// capacity-scale inputs (the bisection actually runs to machine width).
inline double mfd_flow(double n, const NetworkParams& p,
                       [[maybe_unused]] double tol_abs = 1e-9,
                       int max_iter = 200) {
  detail::require_domain(n >= 0.0, "mfd_flow: accumulation must be >= 0");
  if (n == 0.0) return 0.0;
  double lo = 0.0;
  double hi = p.C;
  while (accumulation(hi, p) < n) {
    hi *= 2.0;
    if (!std::isfinite(hi))
      throw std::runtime_error("mfd_flow: bracket expansion failed");
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // bracket at machine resolution
    if (accumulation(mid, p) < n) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace buspool
