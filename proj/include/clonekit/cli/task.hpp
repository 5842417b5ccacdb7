#pragma once

// Task files: JSON parsing into library types, dotted-path overrides, and the
// JSON encodings used in reports.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "clonekit/analysis.hpp"
#include "clonekit/core.hpp"
#include "clonekit/machine.hpp"
#include "clonekit/states.hpp"

namespace clonekit::cli {

using json = nlohmann::ordered_json;

namespace detail {

inline bool is_index(const std::string& s) {
  if (s.empty() || s.size() > 9) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

inline std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty()) throw ValidationError("override key '" + path + "' has an empty segment");
  return parts;
}

}  // namespace detail

/// Reads a task file. A report written by this tool is accepted too: its
/// "task" echo is the task.
inline json load_task(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open task file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ValidationError("task file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ValidationError("task file must hold a JSON object");
  if (doc.contains("task") && doc.contains("results")) {
    json task = doc["task"];
    if (!task.is_object()) throw ValidationError("report 'task' echo is not an object");
    return task;
  }
  return doc;
}

/// Sets `path` (dotted; numeric segments index arrays) to `value`, creating
/// intermediate objects as needed.
inline void set_path(json& root, const std::string& path, json value) {
  const auto parts = detail::split_path(path);
  json* node = &root;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& key = parts[i];
    json* next = nullptr;
    if (node->is_array()) {
      if (!detail::is_index(key))
        throw ValidationError("override '" + path + "': '" + key + "' does not index an array");
      const auto idx = static_cast<std::size_t>(std::stoul(key));
      if (idx >= node->size())
        throw ValidationError("override '" + path + "': index " + key + " out of range");
      next = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object())
        throw ValidationError("override '" + path + "': '" + key + "' has a scalar parent");
      next = &(*node)[key];
    }
    node = next;
  }
  *node = std::move(value);
}

/// key=value; the value is read as JSON when it parses, else as a string.
inline void apply_override(json& task, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  set_path(task, key, std::move(value));
}

// ---- reading fields

inline const json& require(const json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ValidationError("task is missing field '" + key + "'");
  return obj.at(key);
}

inline real to_real(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError("'" + what + "' must be a number");
  return v.get<real>();
}

inline int to_int(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError("'" + what + "' must be an integer");
  const real x = v.get<real>();
  if (x != std::floor(x) || std::abs(x) > 1e9)
    throw ValidationError("'" + what + "' must be an integer");
  return static_cast<int>(x);
}

inline bool to_bool(const json& v, const std::string& what) {
  if (!v.is_boolean()) throw ValidationError("'" + what + "' must be true or false");
  return v.get<bool>();
}

/// A number, a [re, im] pair, or {"re": .., "im": ..}.
inline complex to_complex(const json& v, const std::string& what) {
  if (v.is_number()) return {v.get<real>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<real>(), v[1].get<real>()};
  if (v.is_object() && v.contains("re") && v.contains("im"))
    return {to_real(v["re"], what + ".re"), to_real(v["im"], what + ".im")};
  throw ValidationError("'" + what + "' must be a number or a [re, im] pair");
}

inline std::vector<real> to_real_list(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ValidationError("'" + what + "' must be a nonempty array");
  std::vector<real> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(to_real(v[i], what + "." + std::to_string(i)));
  return out;
}

inline std::vector<complex> to_complex_list(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw ValidationError("'" + what + "' must be a nonempty array");
  std::vector<complex> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(to_complex(v[i], what + "." + std::to_string(i)));
  return out;
}

inline real get_real(const json& obj, const std::string& key, real fallback) {
  return obj.contains(key) ? to_real(obj[key], key) : fallback;
}

inline int get_int(const json& obj, const std::string& key, int fallback) {
  return obj.contains(key) ? to_int(obj[key], key) : fallback;
}

inline void require_modulus(complex z, const std::string& what) {
  if (std::abs(z) > 1.0 + 1e-12) throw ValidationError("|" + what + "| exceeds 1");
}

/// Spec from an object with fields kind, alpha, beta, m, r, p. r is either a
/// list (same on both inputs) or a pair of lists. Missing alpha, beta and m
/// fall back to `outer`.
inline MachineSpec parse_spec(const json& obj, const json& outer,
                              std::optional<MachineKind> forced = std::nullopt) {
  auto field = [&](const std::string& key) -> const json* {
    if (obj.contains(key)) return &obj[key];
    if (outer.is_object() && outer.contains(key)) return &outer[key];
    return nullptr;
  };
  MachineSpec s;
  if (forced) {
    s.kind = *forced;
    if (obj.contains("kind") && machine_kind_from_string(obj["kind"].get<std::string>()) != *forced)
      throw ValidationError(std::string("expected a ") + to_string(*forced) + " spec");
  } else {
    const json* kind = field("kind");
    if (!kind) throw ValidationError("task is missing field 'kind'");
    if (!kind->is_string()) throw ValidationError("'kind' must be a string");
    s.kind = machine_kind_from_string(kind->get<std::string>());
  }
  const json* alpha = field("alpha");
  if (!alpha) throw ValidationError("task is missing field 'alpha'");
  s.alpha = to_complex(*alpha, "alpha");
  if (const json* beta = field("beta"); beta && s.kind != MachineKind::ncm)
    s.beta = to_complex(*beta, "beta");

  const json& r = require(obj, "r");
  if (!r.is_array() || r.empty()) throw ValidationError("'r' must be a nonempty array");
  if (r[0].is_array()) {
    if (r.size() != 2) throw ValidationError("'r' must hold one list or two lists");
    s.r = {to_real_list(r[0], "r.0"), to_real_list(r[1], "r.1")};
  } else {
    const auto row = to_real_list(r, "r");
    s.r = {row, row};
  }
  s.m = static_cast<int>(s.r[0].size());
  if (const json* m = field("m")) {
    if (to_int(*m, "m") != s.m) throw ValidationError("'m' does not match the length of 'r'");
  }
  if (obj.contains("p")) s.p = to_complex_list(obj["p"], "p");
  return s;
}

inline std::array<real, 2> parse_priors(const json& task) {
  if (!task.contains("priors")) return {0.5, 0.5};
  const auto v = to_real_list(task["priors"], "priors");
  if (v.size() != 2) throw ValidationError("'priors' must have two entries");
  return {v[0], v[1]};
}

inline OptimizationProblem parse_problem(const json& task) {
  OptimizationProblem prob;
  prob.kind = machine_kind_from_string(require(task, "kind").get<std::string>());
  prob.alpha = to_complex(require(task, "alpha"), "alpha");
  require_modulus(prob.alpha, "alpha");
  if (prob.kind != MachineKind::ncm && task.contains("beta")) {
    prob.beta = to_complex(task["beta"], "beta");
    require_modulus(prob.beta, "beta");
  }
  prob.m = to_int(require(task, "m"), "m");
  prob.priors = parse_priors(task);
  if (task.contains("symmetric")) prob.symmetric = to_bool(task["symmetric"], "symmetric");
  if (task.contains("single_slot")) prob.single_slot = to_int(task["single_slot"], "single_slot");
  if (task.contains("p")) prob.fixed_p = to_complex_list(task["p"], "p");
  return prob;
}

/// Canonical qubits with the requested overlap: |0> and a|0> + sqrt(1-|a|^2)|1>.
inline std::array<PureState, 2> states_with_overlap(complex a) {
  require_modulus(a, "overlap");
  const real rest = std::sqrt(std::max(0.0, 1.0 - std::norm(a)));
  return {PureState::zero(), PureState::normalized(CVector{a, rest})};
}

inline std::array<PureState, 2> parse_state_pair(const json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) throw ValidationError("'" + what + "' must hold two states");
  std::array<PureState, 2> out{PureState::zero(), PureState::zero()};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto amps = to_complex_list(v[i], what + "." + std::to_string(i));
    if (amps.size() != 2) throw ValidationError("'" + what + "' states must be qubits");
    out[i] = PureState(CVector(amps));
  }
  return out;
}

// ---- writing

inline json encode(complex z) { return json::array({z.real(), z.imag()}); }

inline json encode(const std::vector<complex>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(encode(z));
  return out;
}

inline json encode(const std::vector<real>& v) {
  json out = json::array();
  for (real x : v) out.push_back(x);
  return out;
}

inline json encode(const CMatrix& a) {
  json out = json::array();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < a.cols(); ++c) row.push_back(encode(a(r, c)));
    out.push_back(row);
  }
  return out;
}

inline json encode(const MachineSpec& s) {
  json out = json::object();
  out["kind"] = to_string(s.kind);
  out["alpha"] = encode(s.alpha);
  if (s.kind != MachineKind::ncm) out["beta"] = encode(s.beta);
  out["m"] = s.m;
  out["r"] = json::array({encode(s.r[0]), encode(s.r[1])});
  if (s.p) out["p"] = encode(*s.p);
  return out;
}

/// NaN becomes null (JSON has no NaN).
inline json number_or_null(real x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace clonekit::cli
