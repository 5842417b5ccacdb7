#pragma once

// Command dispatch for the clonekit tool: each command maps a resolved task to
// a JSON results object; run() wraps that into a report and exit code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "clonekit/cli/task.hpp"
#include "clonekit/clonekit.hpp"

namespace clonekit::cli {

inline constexpr const char* tool_version = "0.1.0";

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_infeasible = 3;
inline constexpr int exit_numerical = 4;

inline constexpr std::size_t max_axis_points = 10000;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"feasibility", "optimize",  "decompose",
                                              "compose",     "synthesize", "simulate",
                                              "bounds",      "sweep",     "uqcm"};
  return names;
}

namespace detail {

inline json feasibility_json(const FeasibilityReport& rep) {
  json out = json::object();
  out["feasible"] = rep.feasible;
  out["det"] = rep.det;
  out["slack"] = rep.slack;
  out["residual"] = encode(rep.residual);
  out["p_used"] = encode(rep.p_used);
  out["p_optimal"] = rep.p_optimal;
  out["reduced_applicable"] = rep.reduced_applicable;
  return out;
}

inline json run_feasibility(const json& task, real tol) {
  const MachineSpec spec = parse_spec(task, json());
  json out = feasibility_json(feasible(spec, tol));
  if (out["reduced_applicable"].get<bool>()) {
    const auto red = reduced_inequality(spec, tol);
    out["reduced"] = {{"lhs", red.lhs}, {"rhs", red.rhs}, {"holds", red.holds}};
  }
  return out;
}

inline json run_optimize(const json& task, real tol) {
  const OptimizationProblem prob = parse_problem(task);
  const auto res = optimize(prob, tol);
  json out = json::object();
  out["value"] = res.value;
  out["r_star"] = json::array({encode(res.r_star[0]), encode(res.r_star[1])});
  out["p_star"] = encode(res.p_star);
  if (task.contains("oracle_resolution"))
    out["oracle_value"] = grid_oracle(prob, to_real(task["oracle_resolution"], "oracle_resolution"), tol);
  out["method_trace"] = res.method_trace;
  return out;
}

inline json run_decompose(const json& task, real tol) {
  const MachineSpec joint = parse_spec(task, json(), MachineKind::joint);
  const auto plan = decompose_two_step(joint, tol);
  const MachineSpec v = validated(joint, tol);
  json out = json::object();
  out["case"] = to_string(plan.case_tag);
  out["root_t"] = plan.root_t;
  out["joint_success"] = json::array({v.total(0), v.total(1)});
  out["composed_success"] = json::array({plan.composed_success[0], plan.composed_success[1]});
  out["supp"] = encode(plan.supp);
  out["ncm"] = encode(plan.ncm);
  return out;
}

inline json run_compose(const json& task, real tol) {
  const MachineSpec supp = parse_spec(require(task, "supp"), task, MachineKind::supplementary);
  const MachineSpec ncm = parse_spec(require(task, "ncm"), task, MachineKind::ncm);
  const MachineSpec joint = compose(supp, ncm, tol);
  json out = json::object();
  out["joint"] = encode(joint);
  out["feasibility"] = feasibility_json(feasible(joint, tol));
  return out;
}

struct Realized {
  UnitaryRealization rz;
  json summary;
};

inline Realized realize_task(const json& task, real tol) {
  const MachineSpec spec = parse_spec(task, json());
  auto psi = states_with_overlap(spec.alpha);
  auto phi = states_with_overlap(spec.kind == MachineKind::ncm ? complex{1.0, 0.0} : spec.beta);
  if (task.contains("states")) {
    const json& st = task["states"];
    if (st.contains("psi")) psi = parse_state_pair(st["psi"], "states.psi");
    if (st.contains("phi")) phi = parse_state_pair(st["phi"], "states.phi");
  }
  const int depth = get_int(task, "max_copy_depth", default_max_copy_depth);
  Realized out{realize(spec, psi, phi, tol, depth), json::object()};
  const auto& rz = out.rz;
  real gram_defect = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      gram_defect = std::max(gram_defect, std::abs(inner(rz.outputs[i], rz.outputs[j]) -
                                                   inner(rz.inputs[i], rz.inputs[j])));
  json& s = out.summary;
  s["ab_dim"] = rz.layout.ab_dim();
  s["probe_dim"] = rz.layout.probe_dim();
  s["dimension"] = rz.layout.total_dim();
  s["unitarity_defect"] = unitarity_defect(rz.matrix);
  s["gram_defect"] = gram_defect;
  s["p_used"] = encode(*rz.spec.p);
  s["failure_amplitudes"] = encode(rz.failure_amplitudes);
  if (task.contains("include_matrix") && to_bool(task["include_matrix"], "include_matrix"))
    s["matrix"] = encode(rz.matrix);
  return out;
}

inline json run_synthesize(const json& task, real tol) { return realize_task(task, tol).summary; }

inline json run_simulate(const json& task, real tol, std::uint64_t seed) {
  const auto realized = realize_task(task, tol);
  const auto dist = exact_statistics(realized.rz, tol);
  const int n_shots = get_int(task, "shots", 10000);
  if (n_shots < 1) throw ValidationError("'shots' must be >= 1");
  const auto shots = static_cast<std::uint64_t>(n_shots);
  json out = json::object();
  out["unitarity_defect"] = realized.summary["unitarity_defect"];
  json inputs = json::array();
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    json slots = json::array();
    for (std::size_t k = 0; k < dist.slots[ii].size(); ++k)
      slots.push_back({{"slot", k + 1},
                       {"probability", dist.slots[ii][k].probability},
                       {"copy_fidelity", number_or_null(dist.slots[ii][k].copy_fidelity)}});
    const auto counts = sample(realized.rz, i, shots, seed + ii);
    inputs.push_back({{"slots", slots}, {"failure", dist.failure[ii]}, {"counts", counts}});
  }
  out["inputs"] = inputs;
  out["shots"] = shots;
  out["global_success"] = global_success(dist, parse_priors(task), tol);
  return out;
}

inline json run_bounds(const json& task, real tol) {
  const complex alpha = to_complex(require(task, "alpha"), "alpha");
  const complex beta = task.contains("beta") ? to_complex(task["beta"], "beta") : complex{1.0, 0.0};
  require_modulus(alpha, "alpha");
  require_modulus(beta, "beta");
  const real a = std::min(1.0, std::abs(alpha)), b = std::min(1.0, std::abs(beta));
  const int m = get_int(task, "m", 1);
  const real p_m = std::min(1.0, std::abs(task.contains("p_m") ? to_complex(task["p_m"], "p_m")
                                                                : complex{}));
  json out = json::object();
  out["duan_guo"] = a < 1.0 ? json(duan_guo_bound(a)) : json(nullptr);
  out["discrimination_bound"] = discrimination_bound(a, b, m, p_m, tol);
  out["discrimination_limit"] = 1.0 - a * b;
  out["joint_symmetric_m1"] =
      a < 1.0 ? json(std::min(1.0, (1.0 - a * b) / (1.0 - a * a))) : json(nullptr);
  return out;
}

inline json run_uqcm(const json& task, real tol) {
  complex a{1.0, 0.0}, b{0.0, 0.0};
  if (task.contains("state")) {
    const auto amps = to_complex_list(task["state"], "state");
    if (amps.size() != 2) throw ValidationError("'state' must have two amplitudes");
    a = amps[0];
    b = amps[1];
  }
  return {{"distance", uqcm_distance(a, b, tol)}};
}

inline json run_advantage(const json& task, real tol) {
  const complex alpha = to_complex(require(task, "alpha"), "alpha");
  const complex beta = to_complex(require(task, "beta"), "beta");
  require_modulus(alpha, "alpha");
  require_modulus(beta, "beta");
  const auto adv = ncmsi_advantage(alpha, beta, get_int(task, "m", 1), parse_priors(task), tol);
  return {{"joint_opt", adv.joint_opt}, {"ncm_opt", adv.ncm_opt}, {"delta", adv.delta}};
}

// One depth m of the convergence sequence.
inline json run_convergence(const json& task, real tol) {
  const real a = to_real(require(task, "alpha"), "alpha");
  const real b = to_real(require(task, "beta"), "beta");
  const int m = to_int(require(task, "m"), "m");
  const auto pts = discrimination_convergence(a, b, m, tol);
  return {{"optimum", pts.back().optimum}, {"cloning_optimum", pts.back().cloning_optimum}};
}

inline json compute(const std::string& target, const json& task, real tol, std::uint64_t seed);

// Scalar leaves of `v` under dotted names.
inline void flatten(const json& v, const std::string& prefix, json& row_names, json& row_values) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), row_names,
              row_values);
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      flatten(v[i], prefix + "." + std::to_string(i), row_names, row_values);
  } else {
    row_names.push_back(prefix);
    row_values.push_back(v);
  }
}

struct Axis {
  std::string param;
  std::vector<json> values;
};

inline bool integer_param(const std::string& name) {
  return name == "m" || name == "single_slot" || name == "shots" || name == "max_copy_depth";
}

inline Axis parse_axis(const json& a, std::size_t index) {
  const std::string where = "sweep.axes." + std::to_string(index);
  Axis axis;
  const json& param = require(a, "param");
  if (!param.is_string()) throw ValidationError("'" + where + ".param' must be a string");
  axis.param = param.get<std::string>();
  std::vector<real> vals;
  if (a.contains("values")) {
    vals = to_real_list(a["values"], where + ".values");
  } else {
    const real start = to_real(require(a, "start"), where + ".start");
    const real stop = to_real(require(a, "stop"), where + ".stop");
    const int steps = to_int(require(a, "steps"), where + ".steps");
    if (steps < 1) throw ValidationError("'" + where + ".steps' must be >= 1");
    if (static_cast<std::size_t>(steps) > max_axis_points)
      throw ValidationError("axis '" + axis.param + "' exceeds 10000 points");
    for (int i = 0; i < steps; ++i)
      vals.push_back(steps == 1 ? start : start + (stop - start) * i / (steps - 1));
  }
  if (vals.size() > max_axis_points)
    throw ValidationError("axis '" + axis.param + "' exceeds 10000 points");
  std::sort(vals.begin(), vals.end());
  for (real v : vals) {
    if (integer_param(axis.param)) {
      const real r = std::round(v);
      if (std::abs(v - r) > 1e-9)
        throw ValidationError("axis '" + axis.param + "' needs integer values");
      axis.values.emplace_back(static_cast<int>(r));
    } else {
      axis.values.emplace_back(v);
    }
  }
  return axis;
}

inline json run_sweep(const json& task, real tol, std::uint64_t seed) {
  const json& sw = require(task, "sweep");
  const json& target_field = require(sw, "target");
  if (!target_field.is_string()) throw ValidationError("'sweep.target' must be a string");
  const std::string target = target_field.get<std::string>();
  if (target == "sweep") throw ValidationError("sweeps do not nest");
  const json& axes_field = require(sw, "axes");
  if (!axes_field.is_array() || axes_field.empty() || axes_field.size() > 2)
    throw ValidationError("'sweep.axes' must hold one or two axes");
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < axes_field.size(); ++i) axes.push_back(parse_axis(axes_field[i], i));
  std::optional<std::vector<std::string>> keep;
  if (sw.contains("outputs")) keep = sw["outputs"].get<std::vector<std::string>>();

  json base = task;
  base.erase("sweep");
  json columns = json::array();
  for (const auto& a : axes) columns.push_back(a.param);
  json rows = json::array();
  const std::size_t n0 = axes[0].values.size();
  const std::size_t n1 = axes.size() > 1 ? axes[1].values.size() : 1;
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      json point = base;
      json row = json::array({axes[0].values[i]});
      set_path(point, axes[0].param, axes[0].values[i]);
      if (axes.size() > 1) {
        set_path(point, axes[1].param, axes[1].values[j]);
        row.push_back(axes[1].values[j]);
      }
      json names = json::array(), values = json::array();
      flatten(compute(target, point, tol, seed), "", names, values);
      if (keep) {
        json kept_names = json::array(), kept_values = json::array();
        for (const auto& want : *keep) {
          auto it = std::find(names.begin(), names.end(), want);
          if (it == names.end()) throw ValidationError("sweep output '" + want + "' not produced");
          kept_names.push_back(want);
          kept_values.push_back(values[static_cast<std::size_t>(it - names.begin())]);
        }
        names = std::move(kept_names);
        values = std::move(kept_values);
      }
      if (rows.empty()) {
        for (const auto& n : names) columns.push_back(n);
      } else if (columns.size() != axes.size() + names.size()) {
        throw NumericalError("sweep: output columns differ between points");
      }
      for (const auto& v : values) row.push_back(v);
      rows.push_back(std::move(row));
    }
  return {{"target", target}, {"columns", columns}, {"rows", rows}};
}

inline json compute(const std::string& target, const json& task, real tol, std::uint64_t seed) {
  if (target == "feasibility") return run_feasibility(task, tol);
  if (target == "optimize") return run_optimize(task, tol);
  if (target == "decompose") return run_decompose(task, tol);
  if (target == "compose") return run_compose(task, tol);
  if (target == "synthesize") return run_synthesize(task, tol);
  if (target == "simulate") return run_simulate(task, tol, seed);
  if (target == "bounds") return run_bounds(task, tol);
  if (target == "uqcm") return run_uqcm(task, tol);
  if (target == "sweep") return run_sweep(task, tol, seed);
  if (target == "ncmsi_advantage") return run_advantage(task, tol);
  if (target == "discrimination_convergence") return run_convergence(task, tol);
  throw ValidationError("unknown command '" + target + "'");
}

inline std::string csv_cell(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace detail

inline std::string sweep_csv(const json& table) {
  std::string out;
  auto line = [&](const json& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += detail::csv_cell(cells[i]);
    }
    out += '\n';
  };
  line(table["columns"]);
  for (const auto& row : table["rows"]) line(row);
  return out;
}

struct RunOptions {
  std::string command;
  std::string task_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::optional<real> tol;
  std::optional<std::uint64_t> seed;
  /// Value of CLONEKIT_TOL, if set.
  std::optional<std::string> env_tol;
};

struct Rendered {
  std::string text;
  /// --out, else the task's output.path.
  std::optional<std::string> path;
};

/// Resolves the task, runs the command and renders the report text.
/// Throws the library's error types.
inline Rendered render(const RunOptions& opts) {
  if (std::find(command_names().begin(), command_names().end(), opts.command) ==
      command_names().end())
    throw ValidationError("unknown command '" + opts.command + "'");
  json task = load_task(opts.task_path);
  for (const auto& o : opts.overrides) apply_override(task, o);

  if (task.contains("command") && task["command"] != opts.command)
    throw ValidationError("task file is for command '" + task["command"].dump() + "'");
  task["command"] = opts.command;

  real tol = default_tolerance;
  if (opts.env_tol) {
    try {
      std::size_t used = 0;
      tol = std::stod(*opts.env_tol, &used);
      if (used != opts.env_tol->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("CLONEKIT_TOL is not a number");
    }
  }
  if (task.contains("tol")) tol = to_real(task["tol"], "tol");
  if (opts.tol) tol = *opts.tol;
  if (!(tol > 0.0) || tol >= 1e-2 || !std::isfinite(tol))
    throw ValidationError("tolerance must lie in (0, 1e-2)");
  task["tol"] = tol;

  const bool sampling = opts.command == "simulate" ||
                        (opts.command == "sweep" && task.contains("sweep") &&
                         task["sweep"].value("target", std::string()) == "simulate");
  std::uint64_t seed = 0;
  if (task.contains("seed")) {
    const json& s = task["seed"];
    if (!s.is_number_unsigned()) throw ValidationError("'seed' must be a nonnegative integer");
    seed = s.get<std::uint64_t>();
  }
  if (opts.seed) seed = *opts.seed;
  if (sampling) task["seed"] = seed;

  std::string format = "json";
  if (task.contains("output") && task["output"].contains("format"))
    format = task["output"]["format"].get<std::string>();
  if (opts.format) format = *opts.format;
  if (format != "json" && format != "csv")
    throw ValidationError("format must be json or csv");
  if (format == "csv" && opts.command != "sweep")
    throw ValidationError("csv output is only available for sweep");

  std::optional<std::string> path = opts.out_path;
  if (!path && task.contains("output") && task["output"].contains("path"))
    path = task["output"]["path"].get<std::string>();

  const json results = detail::compute(opts.command, task, tol, seed);
  if (format == "csv") return {sweep_csv(results), path};

  json report = json::object();
  report["tool"] = "clonekit";
  report["version"] = tool_version;
  report["command"] = opts.command;
  report["tolerance"] = tol;
  if (sampling) report["seed"] = seed;
  report["task"] = task;
  report["results"] = results;
  return {report.dump(2) + "\n", path};
}

/// Full command execution: report to --out (or the task's output.path, or
/// `out`), diagnostics to `err`, exit code per error class.
inline int run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Rendered r = render(opts);
    if (r.path) {
      std::ofstream f(*r.path, std::ios::binary);
      if (!f) throw ValidationError("cannot write '" + *r.path + "'");
      f << r.text;
    } else {
      out << r.text;
    }
    return exit_ok;
  } catch (const ValidationError& e) {
    err << "clonekit: invalid input: " << e.what() << "\n";
    return exit_validation;
  } catch (const json::exception& e) {
    err << "clonekit: invalid input: " << e.what() << "\n";
    return exit_validation;
  } catch (const InfeasibleError& e) {
    err << "clonekit: infeasible: " << e.what() << "\n";
    return exit_infeasible;
  } catch (const NumericalError& e) {
    err << "clonekit: numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "clonekit: error: " << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace clonekit::cli
