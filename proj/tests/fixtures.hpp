#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "buspool/equilibrium.hpp"

// Shared test fixtures: the published numerical example and a seeded
// generator of scenarios in its neighbourhood.
namespace fixtures {

// Numerical-example scenario (demand assignment x_rs = 35000, x_b = 100000).
inline buspool::Scenario paper_scenario(double alpha = 0.869) {
  return buspool::Scenario(buspool::NetworkParams(0.1, 0.8, 6.0, 150000.0),
                           buspool::SpaceAllocation(alpha, 4000.0, 0.97),
                           buspool::DemandProfile(80000.0, 35000.0, 100000.0, 12000.0),
                           buspool::ServiceParams(1.6, 1.2, 1.4, 0.05, 1.15));
}

// Expected values frozen from an independent 50-digit substitution of the
// model formulas (delay definitions, stationarity bisection, closed-form
// toll). Library results must reproduce them to rounding.
namespace frozen {
constexpr double base_delay_75000 = 0.10125;
constexpr double accumulation_75000 = 7593.75;
constexpr double vehicle_delay_35000_alpha08 = 0.17439763792903177;
constexpr double pool_delay_10000_alpha08 = 0.14359524049100919;
constexpr double bus_user_delay_0_alpha0869 = 0.2176807929293774;
constexpr double pht_bm_total_alpha0869 = 38476.166537873126;
constexpr double grad_beta03_alpha0869 = 68371.227474367456;
constexpr double grad_beta0_alpha0869 = -2257.9491630831897;
constexpr double grad_beta1_alpha0647 = -1339.4462585127167;
constexpr double beta_ue_alpha0869 = 0.010566296511006711;
constexpr double beta_so_alpha0869 = 0.023156842606340158;
constexpr double beta_ue_alpha0647 = 0.86610911756191533;
constexpr double beta_so_alpha08 = 0.35182328563205335;
constexpr double pht_ue_total_alpha0647 = 37989.237737640527;
constexpr double pht_so_total_alpha0647 = 37488.543630612496;
constexpr double poa_alpha0647 = 1.0133559231311182;
constexpr double tau_alpha07 = -0.016596817142568048;
constexpr double tau_alpha0647 = -0.053707195441140372;
constexpr double tau_alpha0869 = -0.0019326297548672863;
constexpr double optimal_alpha_bm = 0.87160278817022402;
constexpr double optimal_alpha_so = 0.65142329345540234;
// targets as published; reproducible only approximately (5 per cent band)
constexpr double table_bm_total_alpha0869 = 38606.0;
constexpr double table_ue_total_alpha0647 = 39414.0;
constexpr double table_so_total_alpha0647 = 38264.0;
constexpr double table_bus_delay_alpha0869 = 0.22717;  // PHT_b / x_b
}  // namespace frozen

// Seeded RNG with a portable uniform-double mapping (the distribution
// classes in <random> are implementation-defined).
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform() { return std::ldexp(static_cast<double>(gen() >> 11), -53); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // log-uniform within one decade either side of the reference value
  double around(double reference) {
    return reference * std::pow(10.0, uniform(-1.0, 1.0));
  }
};

// Random scenario near the published regime: every unconstrained parameter
// is drawn log-uniformly within a decade of its reference value; draws that
// break a type invariant, lose strict convexity, or leave no capacity-
// feasible split are rejected and redrawn.
inline buspool::Scenario random_scenario(Rng& rng) {
  for (int attempt = 0; attempt < 200000; ++attempt) {
    const double t_f = rng.around(0.1);
    const double a = rng.around(0.8);
    const double b = rng.around(6.0);
    const double C = rng.around(150000.0);
    const double alpha = rng.uniform(0.05, 0.95);
    const double omega = rng.uniform(0.75, 1.0);
    const double x_pv = rng.around(80000.0);
    const double x_rs = rng.around(35000.0);
    const double x_b = rng.around(100000.0);
    const double f_b = rng.around(12000.0);
    const double o_p = rng.around(1.6);
    const double delta_p = rng.around(1.2);
    const double delta_b = rng.around(1.4);
    const double gamma = rng.around(0.05);
    const double k = rng.around(1.15);
    if (b <= 1.05) continue;
    if (o_p <= 1.0 || delta_p <= 1.0 || delta_b <= 1.0 || k <= 1.0) continue;
    if (f_b >= x_b) continue;
    buspool::Scenario sc(buspool::NetworkParams(t_f, a, b, C),
                         buspool::SpaceAllocation(alpha, 4000.0, omega),
                         buspool::DemandProfile(x_pv, x_rs, x_b, f_b),
                         buspool::ServiceParams(o_p, delta_p, delta_b, gamma, k));
    if (!buspool::feasibility_check(sc).any_feasible) continue;
    return sc;
  }
  throw std::runtime_error("random_scenario: rejection loop exhausted");
}

}  // namespace fixtures
