#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "buspool/equilibrium.hpp"
#include "buspool/tolling.hpp"

/// Evaluates a scenario family across a grid of space allocations alpha,
/// producing the per-alpha equilibrium/optimum/benchmark comparison and the
/// grid (or refined) alpha minimizing total passenger-hours.
namespace buspool {

struct SweepOutputs {
  bool pht_bm = true;
  bool pht_ue = true;
  bool pht_so = true;
  bool beta_ue = true;
  bool beta_so = true;
  bool poa = true;
  bool toll = true;
};

/// A scenario with alpha left open, plus the alpha grid to evaluate.
struct SweepSpec {
  NetworkParams params;
  double n_e;
  double omega;
  DemandProfile demand;
  ServiceParams service;
  std::vector<double> alpha_grid;
  SolverOptions solver{};
  SweepOutputs outputs{};

  Scenario scenario_at(double alpha) const {
    return Scenario(params, SpaceAllocation(alpha, n_e, omega), demand, service);
  }
};

struct SweepRow {
  double alpha;
  FeasibilityReport feasibility;
  std::optional<PhtBreakdown> benchmark;  ///< absent when beta = 0 is infeasible
  SplitSolution ue;
  SplitSolution so;
  bool ue_feasible;  ///< realized UE split within both capacity limits
  bool so_feasible;
  std::optional<double> poa;  ///< present iff both solutions feasible
  std::optional<TollResult> toll;
};

namespace detail {

inline void check_grid(const std::vector<double>& grid) {
  require_domain(!grid.empty(), "run_sweep: alpha grid must be non-empty");
  double prev = 0.0;
  for (double a : grid) {
    require_domain(a > 0.0 && a < 1.0, "run_sweep: alpha grid values must be in (0,1)");
    require_domain(a > prev, "run_sweep: alpha grid must be strictly increasing");
    prev = a;
  }
}

}  // namespace detail

/// One row per grid alpha. Solvers run on the capacity-feasible beta interval
/// when one exists (unrestricted otherwise, with the row marked infeasible);
/// each row is exactly what the equilibrium module produces standalone.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  detail::check_grid(spec.alpha_grid);
  std::vector<SweepRow> rows;
  rows.reserve(spec.alpha_grid.size());
  for (double alpha : spec.alpha_grid) {
    const Scenario sc = spec.scenario_at(alpha);
    SweepRow row{};
    row.alpha = alpha;
    row.feasibility = feasibility_check(sc);
    const double lo = row.feasibility.any_feasible ? row.feasibility.beta_min : 0.0;
    const double hi = row.feasibility.any_feasible ? row.feasibility.beta_max : 1.0;
    row.so = solve_system_optimum(sc, spec.solver, lo, hi);
    row.ue = solve_user_equilibrium(sc, 0.0, spec.solver, lo, hi);
    row.ue_feasible = row.feasibility.any_feasible;
    row.so_feasible = row.feasibility.any_feasible;
    if (row.feasibility.any_feasible && row.feasibility.beta_min == 0.0)
      row.benchmark = pht(Split(0.0), sc);
    if (row.ue_feasible && row.so_feasible)
      row.poa = row.ue.pht.total / row.so.pht.total;
    if (spec.outputs.toll) row.toll = compute_toll(sc, spec.solver, lo, hi);
    rows.push_back(row);
  }
  return rows;
}

enum class SweepObjective { bm_total, so_total };

struct OptimalAlpha {
  double alpha;
  double total;  ///< the minimized total passenger-hours
};

namespace detail {

inline double sweep_objective(const SweepSpec& spec, SweepObjective obj,
                              double alpha) {
  const Scenario sc = spec.scenario_at(alpha);
  const FeasibilityReport feas = feasibility_check(sc);
  if (!feas.any_feasible) return std::numeric_limits<double>::infinity();
  if (obj == SweepObjective::bm_total) {
    if (feas.beta_min != 0.0) return std::numeric_limits<double>::infinity();
    return pht(Split(0.0), sc).total;
  }
  return solve_system_optimum(sc, spec.solver, feas.beta_min, feas.beta_max)
      .pht.total;
}

// golden-section minimization of a unimodal objective on [lo, hi]
template <class F>
inline double golden_section_min(F&& f, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > 1e-10) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Grid alpha minimizing the chosen total passenger-hours among feasible
/// rows; ties break toward smaller alpha. With refine set, a golden-section
/// pass over the bracketing grid cell returns the continuous minimizer.
/// Empty result when no grid alpha is feasible for the objective.
inline std::optional<OptimalAlpha> find_optimal_alpha(const SweepSpec& spec,
                                                      SweepObjective obj,
                                                      bool refine = false) {
  detail::check_grid(spec.alpha_grid);
  std::optional<std::size_t> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spec.alpha_grid.size(); ++i) {
    const double value = detail::sweep_objective(spec, obj, spec.alpha_grid[i]);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  if (!best) return std::nullopt;
  double alpha = spec.alpha_grid[*best];
  if (refine) {
    const double lo = *best > 0 ? spec.alpha_grid[*best - 1] : alpha;
    const double hi = *best + 1 < spec.alpha_grid.size()
                          ? spec.alpha_grid[*best + 1]
                          : alpha;
    if (hi > lo) {
      alpha = detail::golden_section_min(
          [&](double a) { return detail::sweep_objective(spec, obj, a); }, lo,
          hi);
      best_value = detail::sweep_objective(spec, obj, alpha);
    }
  }
  return OptimalAlpha{alpha, best_value};
}

}  // namespace buspool
