#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "buspool/sweep.hpp"

/// Scenario text format (INI-style sections), its validating loader, and the
/// CSV emitters behind the CLI. All numeric output is full-precision decimal
/// so repeated runs are byte-identical.
namespace buspool {

/// Thrown on malformed or invalid scenario files; the message carries
/// "<source>:<line>:".
class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepRange {
  double alpha_min;
  double alpha_max;
  double alpha_step;
};

/// In-memory form of a scenario document. Sections [network], [space],
/// [demand], [service] are required; [sweep] and [solver] optional.
struct ScenarioFile {
  // [network]
  double t_f, a, b, C;
  // [space]
  double alpha, n_e, omega;
  // [demand]
  double x_pv, x_rs, x_b, f_b;
  // [service]
  double o_p, delta_p, delta_b, gamma, k;

  std::optional<SweepRange> sweep;
  std::optional<SolverOptions> solver;

  SolverOptions solver_options() const { return solver.value_or(SolverOptions{}); }

  Scenario to_scenario() const { return to_scenario(alpha); }

  Scenario to_scenario(double alpha_override) const {
    return Scenario(NetworkParams(t_f, a, b, C),
                    SpaceAllocation(alpha_override, n_e, omega),
                    DemandProfile(x_pv, x_rs, x_b, f_b),
                    ServiceParams(o_p, delta_p, delta_b, gamma, k));
  }

  /// Sweep specification: the file's [sweep] range, or the default grid
  /// alpha in [0.5, 0.95] step 0.005 when the section is absent.
  SweepSpec to_sweep_spec() const {
    const SweepRange r = sweep.value_or(SweepRange{0.5, 0.95, 0.005});
    std::vector<double> grid;
    for (int i = 0;; ++i) {
      double v = r.alpha_min + i * r.alpha_step;
      if (v > r.alpha_max + r.alpha_step * 1e-9) break;
      grid.push_back(std::min(v, r.alpha_max));
    }
    return SweepSpec{NetworkParams(t_f, a, b, C),
                     n_e,
                     omega,
                     DemandProfile(x_pv, x_rs, x_b, f_b),
                     ServiceParams(o_p, delta_p, delta_b, gamma, k),
                     std::move(grid),
                     solver_options(),
                     SweepOutputs{}};
  }

  std::string dump() const;
};

namespace detail {

/// Full-precision decimal rendering; strtod() recovers the exact double.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct RawEntry {
  double value;
  int line;
};

struct RawDocument {
  std::string source;
  std::map<std::string, RawEntry> entries;  // "section.key"
  std::map<std::string, int> section_lines;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ScenarioParseError(source + ":" + std::to_string(line) + ": " + msg);
  }

  bool has_section(const std::string& section) const {
    return section_lines.count(section) != 0;
  }

  const RawEntry& get(const std::string& section, const std::string& key) const {
    const auto it = entries.find(section + "." + key);
    if (it == entries.end())
      throw ScenarioParseError(source + ": missing required key '" + key +
                               "' in section [" + section + "]");
    return it->second;
  }

  double require_with(const std::string& section, const std::string& key,
                      bool (*pred)(double), const char* what) const {
    const RawEntry& e = get(section, key);
    if (!pred(e.value))
      fail(e.line, section + "." + key + " " + what + " (got " +
                       fmt_g17(e.value) + ")");
    return e.value;
  }
};

inline bool is_positive(double v) { return std::isfinite(v) && v > 0.0; }
inline bool is_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }
inline bool is_fraction(double v) { return std::isfinite(v) && v > 0.0 && v < 1.0; }
inline bool is_unit_factor(double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; }
inline bool is_above_one(double v) { return std::isfinite(v) && v > 1.0; }

inline const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"network", {"t_f", "a", "b", "C"}},
      {"space", {"alpha", "n_e", "omega"}},
      {"demand", {"x_pv", "x_rs", "x_b", "f_b"}},
      {"service", {"o_p", "delta_p", "delta_b", "gamma", "k"}},
      {"sweep", {"alpha_min", "alpha_max", "alpha_step"}},
      {"solver", {"tol_beta", "tol_abs", "max_iter"}},
  };
  return keys;
}

inline RawDocument scan_scenario_text(const std::string& text,
                                      const std::string& source_name) {
  RawDocument doc;
  doc.source = source_name;
  std::istringstream in(text);
  std::string raw_line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') doc.fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (known_keys().count(section) == 0)
        doc.fail(line_no, "unknown section [" + section + "]");
      if (!doc.section_lines.emplace(section, line_no).second)
        doc.fail(line_no, "duplicate section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      doc.fail(line_no, "expected 'key = value' or '[section]'");
    if (section.empty()) doc.fail(line_no, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value_text = trim(line.substr(eq + 1));
    const auto& allowed = known_keys().at(section);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      doc.fail(line_no, "unknown key '" + key + "' in section [" + section + "]");
    if (value_text.empty()) doc.fail(line_no, "empty value for '" + key + "'");
    char* end = nullptr;
    const double value = std::strtod(value_text.c_str(), &end);
    if (end != value_text.c_str() + value_text.size())
      doc.fail(line_no, "could not parse '" + value_text + "' as a number");
    if (!doc.entries.emplace(section + "." + key, RawEntry{value, line_no}).second)
      doc.fail(line_no, "duplicate key '" + key + "' in section [" + section + "]");
  }
  for (const char* required : {"network", "space", "demand", "service"}) {
    if (!doc.has_section(required))
      throw ScenarioParseError(doc.source + ": missing required section [" +
                               std::string(required) + "]");
  }
  return doc;
}

}  // namespace detail

inline ScenarioFile parse_scenario_text(const std::string& text,
                                        const std::string& source_name = "<string>") {
  const detail::RawDocument doc = detail::scan_scenario_text(text, source_name);
  ScenarioFile f{};
  f.t_f = doc.require_with("network", "t_f", detail::is_positive, "must be > 0");
  f.a = doc.require_with("network", "a", detail::is_positive, "must be > 0");
  f.b = doc.require_with("network", "b", detail::is_positive, "must be > 0");
  f.C = doc.require_with("network", "C", detail::is_positive, "must be > 0");

  f.alpha = doc.require_with("space", "alpha", detail::is_fraction,
                             "must be in (0,1)");
  f.n_e = doc.require_with("space", "n_e", detail::is_nonnegative, "must be >= 0");
  f.omega = doc.require_with("space", "omega", detail::is_unit_factor,
                             "must be in (0,1]");
  if (f.n_e == 0.0 && f.omega != 1.0)
    doc.fail(doc.get("space", "omega").line,
             "space.omega must be 1 when space.n_e is 0");

  f.x_pv = doc.require_with("demand", "x_pv", detail::is_positive, "must be > 0");
  f.x_rs = doc.require_with("demand", "x_rs", detail::is_positive, "must be > 0");
  f.x_b = doc.require_with("demand", "x_b", detail::is_positive, "must be > 0");
  f.f_b = doc.require_with("demand", "f_b", detail::is_positive, "must be > 0");
  if (f.f_b >= f.x_b)
    doc.fail(doc.get("demand", "f_b").line,
             "demand.f_b must be less than demand.x_b");

  f.o_p = doc.require_with("service", "o_p", detail::is_above_one, "must be > 1");
  f.delta_p = doc.require_with("service", "delta_p", detail::is_above_one,
                               "must be > 1");
  f.delta_b = doc.require_with("service", "delta_b", detail::is_above_one,
                               "must be > 1");
  f.gamma = doc.require_with("service", "gamma", detail::is_positive,
                             "must be > 0");
  f.k = doc.require_with("service", "k", detail::is_above_one, "must be > 1");

  if (doc.has_section("sweep")) {
    SweepRange r{};
    r.alpha_min = doc.require_with("sweep", "alpha_min", detail::is_fraction,
                                   "must be in (0,1)");
    r.alpha_max = doc.require_with("sweep", "alpha_max", detail::is_fraction,
                                   "must be in (0,1)");
    r.alpha_step = doc.require_with("sweep", "alpha_step", detail::is_positive,
                                    "must be > 0");
    if (r.alpha_min >= r.alpha_max)
      doc.fail(doc.get("sweep", "alpha_max").line,
               "sweep.alpha_max must exceed sweep.alpha_min");
    if (r.alpha_step > r.alpha_max - r.alpha_min)
      doc.fail(doc.get("sweep", "alpha_step").line,
               "sweep.alpha_step must not exceed the sweep range");
    f.sweep = r;
  }
  if (doc.has_section("solver")) {
    SolverOptions s{};
    s.tol_beta = doc.require_with("solver", "tol_beta", detail::is_positive,
                                  "must be > 0");
    s.tol_abs = doc.require_with("solver", "tol_abs", detail::is_positive,
                                 "must be > 0");
    const detail::RawEntry& mi = doc.get("solver", "max_iter");
    if (!(std::isfinite(mi.value) && mi.value >= 1.0 &&
          mi.value == std::floor(mi.value) && mi.value <= 1e9))
      doc.fail(mi.line, "solver.max_iter must be a positive integer");
    s.max_iter = static_cast<int>(mi.value);
    f.solver = s;
  }
  return f;
}

inline ScenarioFile load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioParseError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

inline std::string ScenarioFile::dump() const {
  using detail::fmt_g17;
  std::ostringstream out;
  out << "[network]\n"
      << "t_f = " << fmt_g17(t_f) << "\n"
      << "a = " << fmt_g17(a) << "\n"
      << "b = " << fmt_g17(b) << "\n"
      << "C = " << fmt_g17(C) << "\n\n"
      << "[space]\n"
      << "alpha = " << fmt_g17(alpha) << "\n"
      << "n_e = " << fmt_g17(n_e) << "\n"
      << "omega = " << fmt_g17(omega) << "\n\n"
      << "[demand]\n"
      << "x_pv = " << fmt_g17(x_pv) << "\n"
      << "x_rs = " << fmt_g17(x_rs) << "\n"
      << "x_b = " << fmt_g17(x_b) << "\n"
      << "f_b = " << fmt_g17(f_b) << "\n\n"
      << "[service]\n"
      << "o_p = " << fmt_g17(o_p) << "\n"
      << "delta_p = " << fmt_g17(delta_p) << "\n"
      << "delta_b = " << fmt_g17(delta_b) << "\n"
      << "gamma = " << fmt_g17(gamma) << "\n"
      << "k = " << fmt_g17(k) << "\n";
  if (sweep) {
    out << "\n[sweep]\n"
        << "alpha_min = " << fmt_g17(sweep->alpha_min) << "\n"
        << "alpha_max = " << fmt_g17(sweep->alpha_max) << "\n"
        << "alpha_step = " << fmt_g17(sweep->alpha_step) << "\n";
  }
  if (solver) {
    out << "\n[solver]\n"
        << "tol_beta = " << fmt_g17(solver->tol_beta) << "\n"
        << "tol_abs = " << fmt_g17(solver->tol_abs) << "\n"
        << "max_iter = " << solver->max_iter << "\n";
  }
  return out.str();
}

/// Sweep results as CSV. Cells are empty when a quantity is unavailable at
/// that alpha (benchmark over capacity, UE/SO outside every feasible split,
/// toll policy off) or not requested. The toll cell reports the toll actually
/// needed: 0 when the untolled equilibrium already matches the optimum.
inline std::string sweep_csv(const std::vector<SweepRow>& rows,
                             const SweepOutputs& outputs = {},
                             double tol_beta = 1e-8) {
  using detail::fmt_g17;
  std::string out = "alpha,feasible_bm,pht_bm,pht_ue,pht_so,beta_ue,beta_so,poa,toll\n";
  for (const SweepRow& row : rows) {
    out += fmt_g17(row.alpha);
    out += row.benchmark ? ",1" : ",0";
    out += ",";
    if (outputs.pht_bm && row.benchmark) out += fmt_g17(row.benchmark->total);
    out += ",";
    if (outputs.pht_ue && row.ue_feasible) out += fmt_g17(row.ue.pht.total);
    out += ",";
    if (outputs.pht_so && row.so_feasible) out += fmt_g17(row.so.pht.total);
    out += ",";
    if (outputs.beta_ue && row.ue_feasible) out += fmt_g17(row.ue.beta);
    out += ",";
    if (outputs.beta_so && row.so_feasible) out += fmt_g17(row.so.beta);
    out += ",";
    if (outputs.poa && row.poa) out += fmt_g17(*row.poa);
    out += ",";
    if (outputs.toll && row.toll && row.so_feasible && row.toll->policy_active) {
      const bool needed =
          std::abs(row.toll->beta_ue_untolled - row.toll->beta_so) > tol_beta;
      out += fmt_g17(needed ? row.toll->tau_p : 0.0);
    }
    out += "\n";
  }
  return out;
}

/// Flow-accumulation curves as CSV: the full network at capacity C and the
/// two subnetworks at alpha*C and (1-alpha)*C, on a shared accumulation grid
/// from 0 to the full network's accumulation at capacity.
inline std::string mfd_csv(const NetworkParams& p, double alpha, int points = 500) {
  using detail::fmt_g17;
  detail::require_domain(points >= 2, "mfd_csv: need at least 2 grid points");
  detail::require_domain(alpha > 0.0 && alpha < 1.0,
                         "mfd_csv: alpha must be in (0,1)");
  const NetworkParams vehicle(p.t_f, p.a, p.b, alpha * p.C);
  const NetworkParams bus(p.t_f, p.a, p.b, (1.0 - alpha) * p.C);
  const double n_max = accumulation(p.C, p);
  std::string out = "n,x_total,x_vehicle_subnet,x_bus_subnet\n";
  for (int i = 0; i < points; ++i) {
    const double n = n_max * static_cast<double>(i) / (points - 1);
    out += fmt_g17(n);
    out += ",";
    out += fmt_g17(mfd_flow(n, p));
    out += ",";
    out += fmt_g17(mfd_flow(n, vehicle));
    out += ",";
    out += fmt_g17(mfd_flow(n, bus));
    out += "\n";
  }
  return out;
}

}  // namespace buspool
