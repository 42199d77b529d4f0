// buspool: solo/pool split equilibria and space-allocation sweeps for a
// two-subnetwork (vehicle + bus lane) urban transport model.
//
// Subcommands: solve | sweep | mfd | toll
// Exit codes:  0 ok, 2 parse/validation error, 3 infeasible configuration,
//              4 output I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "buspool/scenario_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

void kv(const std::string& key, const char* value) {
  std::cout << key << "=" << value << "\n";
}

void kv(const std::string& key, const std::string& value) {
  kv(key, value.c_str());
}

void kv(const std::string& key, double value) {
  kv(key, buspool::detail::fmt_g17(value));
}

void kv(const std::string& key, bool value) { kv(key, value ? "1" : "0"); }

void print_breakdown(const std::string& prefix, const buspool::PhtBreakdown& p) {
  kv(prefix + "_pv", p.pv);
  kv(prefix + "_rs", p.rs);
  kv(prefix + "_b", p.bus);
  kv(prefix + "_total", p.total);
}

// Names the inequality that rules out every split, for the exit-3 diagnostic.
std::string infeasibility_reason(const buspool::Scenario& sc) {
  const double veh_cap = sc.space.omega * sc.space.alpha * sc.params.C;
  const double bus_cap = sc.space.bus_fraction() * sc.params.C;
  using buspool::detail::fmt_g17;
  if (sc.demand.f_b > bus_cap)
    return "bus-network capacity violated for every split: f_b (" +
           fmt_g17(sc.demand.f_b) + ") > (1-alpha)*C (" + fmt_g17(bus_cap) + ")";
  if (sc.demand.x_pv > veh_cap)
    return "vehicle-network capacity violated for every split: x_pv (" +
           fmt_g17(sc.demand.x_pv) + ") > omega*alpha*C (" + fmt_g17(veh_cap) +
           ")";
  return "no split satisfies both capacity limits: the vehicle network needs "
         "beta >= " +
         fmt_g17(1.0 - (veh_cap - sc.demand.x_pv) / sc.demand.x_rs) +
         " but the bus network needs beta <= " +
         fmt_g17((bus_cap - sc.demand.f_b) * sc.service.o_p / sc.demand.x_rs);
}

struct CommonArgs {
  std::string scenario_path;
  std::optional<double> alpha;
  std::optional<double> tol_beta;
  std::optional<double> value_of_time;
  std::string out_path;
};

buspool::Scenario make_scenario(const buspool::ScenarioFile& file,
                                const CommonArgs& args) {
  return args.alpha ? file.to_scenario(*args.alpha) : file.to_scenario();
}

buspool::SolverOptions make_options(const buspool::ScenarioFile& file,
                                    const CommonArgs& args) {
  buspool::SolverOptions opt = file.solver_options();
  if (args.tol_beta) opt.tol_beta = *args.tol_beta;
  return opt;
}

int write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return kExitIo;
  }
  out << payload;
  if (!out) {
    std::cerr << "error: failed while writing '" << path << "'\n";
    return kExitIo;
  }
  return kExitOk;
}

void print_toll_records(const buspool::TollResult& toll,
                        const buspool::SolverOptions& opt,
                        const std::optional<double>& value_of_time) {
  kv("tau_p", toll.tau_p);
  kv("policy_active", toll.policy_active);
  kv("toll_needed",
     toll.policy_active &&
         std::abs(toll.beta_ue_untolled - toll.beta_so) > opt.tol_beta);
  kv("beta_ue_tolled", toll.beta_ue_tolled);
  kv("restored", toll.restored);
  if (value_of_time) kv("toll_cost", toll.tau_p * *value_of_time);
}

int run_solve(const buspool::ScenarioFile& file, const CommonArgs& args) {
  const buspool::Scenario sc = make_scenario(file, args);
  const buspool::SolverOptions opt = make_options(file, args);
  const buspool::FeasibilityReport feas = buspool::feasibility_check(sc);
  if (!feas.any_feasible) {
    std::cerr << "infeasible: " << infeasibility_reason(sc) << "\n";
    return kExitInfeasible;
  }
  const auto so =
      buspool::solve_system_optimum(sc, opt, feas.beta_min, feas.beta_max);
  const auto ue = buspool::solve_user_equilibrium(sc, 0.0, opt, feas.beta_min,
                                                  feas.beta_max);
  kv("alpha", sc.space.alpha);
  kv("beta_min", feas.beta_min);
  kv("beta_max", feas.beta_max);
  kv("feasible_all_beta", feas.feasible_all_beta);
  const bool bm_available = feas.beta_min == 0.0;
  kv("benchmark_available", bm_available);
  if (bm_available)
    print_breakdown("pht_bm", buspool::pht(buspool::Split(0.0), sc));
  kv("beta_ue", ue.beta);
  kv("ue_kind", buspool::to_string(ue.kind));
  kv("ue_residual", ue.residual);
  kv("ue_clamped", ue.clamped);
  kv("t_vehicle_ue", ue.t_vehicle);
  kv("t_pool_ue", ue.t_pool);
  kv("t_bus_ue", ue.t_bus);
  print_breakdown("pht_ue", ue.pht);
  kv("beta_so", so.beta);
  kv("so_kind", buspool::to_string(so.kind));
  kv("so_residual", so.residual);
  kv("so_clamped", so.clamped);
  kv("t_vehicle_so", so.t_vehicle);
  kv("t_pool_so", so.t_pool);
  kv("t_bus_so", so.t_bus);
  print_breakdown("pht_so", so.pht);
  kv("poa", ue.pht.total / so.pht.total);
  print_toll_records(
      buspool::compute_toll(sc, opt, feas.beta_min, feas.beta_max), opt,
      args.value_of_time);
  return kExitOk;
}

int run_toll(const buspool::ScenarioFile& file, const CommonArgs& args) {
  const buspool::Scenario sc = make_scenario(file, args);
  const buspool::SolverOptions opt = make_options(file, args);
  const buspool::FeasibilityReport feas = buspool::feasibility_check(sc);
  if (!feas.any_feasible) {
    std::cerr << "infeasible: " << infeasibility_reason(sc) << "\n";
    return kExitInfeasible;
  }
  const buspool::TollResult toll =
      buspool::compute_toll(sc, opt, feas.beta_min, feas.beta_max);
  kv("alpha", sc.space.alpha);
  kv("beta_so", toll.beta_so);
  kv("beta_ue", toll.beta_ue_untolled);
  print_toll_records(toll, opt, args.value_of_time);
  return kExitOk;
}

int run_sweep(const buspool::ScenarioFile& file, const CommonArgs& args) {
  buspool::SweepSpec spec = file.to_sweep_spec();
  if (args.tol_beta) spec.solver.tol_beta = *args.tol_beta;
  const auto rows = buspool::run_sweep(spec);
  return write_output(args.out_path,
                      buspool::sweep_csv(rows, spec.outputs, spec.solver.tol_beta));
}

int run_mfd(const buspool::ScenarioFile& file, const CommonArgs& args) {
  const double alpha = args.alpha.value_or(file.alpha);
  const buspool::NetworkParams params(file.t_f, file.a, file.b, file.C);
  return write_output(args.out_path, buspool::mfd_csv(params, alpha));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solo/pool split equilibria for a two-subnetwork transport model"};
  app.require_subcommand(1);

  CommonArgs args;
  const auto add_common = [&args](CLI::App* cmd, bool with_out) {
    cmd->add_option("scenario", args.scenario_path, "Scenario file")->required();
    cmd->add_option("--alpha", args.alpha,
                    "Override the scenario's space allocation");
    cmd->add_option("--tol-beta", args.tol_beta,
                    "Override the solver's split tolerance");
    if (with_out)
      cmd->add_option("--out", args.out_path, "Write CSV here instead of stdout");
  };

  CLI::App* solve = app.add_subcommand(
      "solve", "Benchmark, user-equilibrium and system-optimum report");
  add_common(solve, false);
  solve->add_option("--value-of-time", args.value_of_time,
                    "Also report the toll in money per this value of time");

  CLI::App* sweep =
      app.add_subcommand("sweep", "Evaluate the scenario across the alpha grid");
  add_common(sweep, true);

  CLI::App* mfd = app.add_subcommand(
      "mfd", "Flow-accumulation curves for the network and both subnetworks");
  add_common(mfd, true);

  CLI::App* toll =
      app.add_subcommand("toll", "Corrective toll restoring the system optimum");
  add_common(toll, false);
  toll->add_option("--value-of-time", args.value_of_time,
                   "Also report the toll in money per this value of time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const buspool::ScenarioFile file =
        buspool::load_scenario_file(args.scenario_path);
    if (solve->parsed()) return run_solve(file, args);
    if (sweep->parsed()) return run_sweep(file, args);
    if (mfd->parsed()) return run_mfd(file, args);
    if (toll->parsed()) return run_toll(file, args);
  } catch (const buspool::ScenarioParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
