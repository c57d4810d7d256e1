#pragma once

// JSON and CSV output. Doubles are always written with 17 significant digits
// so that equal output implies bit-equal results.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "arbcost/feynman_kac.hpp"
#include "arbcost/hedge.hpp"
#include "arbcost/pde.hpp"
#include "arbcost/rates.hpp"
#include "arbcost/result.hpp"

namespace arbcost::io {

using json = nlohmann::ordered_json;

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {
inline void write_string(std::ostream& os, const std::string& s) { os << json(s).dump(); }

inline void dump(std::ostream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',' << nl;
        first = false;
        os << pad;
        write_string(os, it.key());
        os << (indent > 0 ? ": " : ":");
        dump(os, it.value(), indent, depth + 1);
      }
      os << nl << close_pad << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Numeric arrays stay on one line; they can be long.
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured()) flat = false;
      os << '[';
      if (!flat) os << nl;
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",") << (flat ? "" : nl);
        first = false;
        if (!flat) os << pad;
        dump(os, e, indent, depth + 1);
      }
      if (!flat) os << nl << close_pad;
      os << ']';
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}
}  // namespace detail

inline void dump_json(std::ostream& os, const json& j, int indent = 2) {
  detail::dump(os, j, indent, 0);
  os << '\n';
}

inline std::string to_string(const json& j, int indent = 2) {
  std::ostringstream os;
  dump_json(os, j, indent);
  return os.str();
}

inline json to_json(const PricingResult& r) {
  json j;
  j["price"] = r.price;
  j["method"] = r.method;
  if (r.std_error) j["std_error"] = *r.std_error;
  if (r.paths) j["paths"] = *r.paths;
  if (r.steps) j["steps"] = *r.steps;
  if (r.space_nodes) j["space_nodes"] = *r.space_nodes;
  if (r.risk_neutral_prob) j["risk_neutral_prob"] = *r.risk_neutral_prob;
  if (r.implied_rate) j["implied_rate"] = *r.implied_rate;
  if (r.replication_residual) j["replication_residual"] = *r.replication_residual;
  if (!r.diagnostics.empty()) {
    json d = json::object();
    for (const auto& [k, v] : r.diagnostics) d[k] = v;
    j["diagnostics"] = d;
  }
  return j;
}

inline json to_json(const MCResult& r) {
  return json{{"estimate", r.estimate}, {"std_error", r.std_error}, {"n_paths", r.n_paths},
              {"n_steps", r.n_steps},   {"seed", r.seed},           {"antithetic", r.antithetic}};
}

inline json to_json(const RateResult& r) {
  json j;
  j["rate"] = r.rate;
  if (r.yields) j["yields"] = json::array({r.yields->first, r.yields->second});
  if (r.lambdas) j["lambdas"] = json::array({r.lambdas->first, r.lambdas->second});
  if (r.bond_lambda) j["bond_lambda"] = *r.bond_lambda;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json to_json(const AdjustedParams& a) {
  return json{{"mu_star", a.mu_star},       {"m_star", a.m_star}, {"sigma_star", a.sigma_star},
              {"v_star", a.v_star},         {"r_star", a.r_star}, {"theta_star", a.theta_star}};
}

inline json to_json(const AllocationSolution& s) {
  json j;
  j["roots"] = s.roots;
  j["residuals"] = s.residuals;
  j["discriminant"] = s.discriminant;
  j["no_real_root"] = s.no_real_root;
  j["degenerate"] = s.degenerate;
  return j;
}

inline json to_json(const PnLStats& s) {
  return json{{"mean", s.mean}, {"variance", s.variance}, {"min", s.min},    {"max", s.max},
              {"paths", s.paths}, {"steps", s.steps},     {"initial_capital", s.initial_capital}};
}

inline json to_json(const HedgeStats& h) {
  return json{{"mean_error", h.mean_error}, {"error_variance", h.error_variance}, {"error_std", h.error_std},
              {"mean_cost", h.mean_cost},   {"max_audit", h.max_audit},           {"initial_price", h.initial_price},
              {"lambda", h.lambda},         {"rate", h.rate},                     {"paths", h.paths},
              {"steps", h.steps}};
}

/// Metadata plus full arrays.
inline json to_json(const GridSolution& g) {
  json j;
  j["scheme"] = g.scheme;
  j["theta"] = g.theta;
  j["startup_steps"] = g.startup_steps;
  j["lower_boundary"] = g.lower_boundary;
  j["upper_boundary"] = g.upper_boundary;
  j["time_steps"] = g.times.size() - 1;
  j["space_intervals"] = g.space.size() - 1;
  j["times"] = g.times;
  j["space"] = g.space;
  j["values"] = g.values;
  return j;
}

/// One row per time; the header row lists the space nodes.
inline void write_grid_csv(std::ostream& os, const GridSolution& g) {
  os << "t";
  for (double x : g.space) os << ',' << format_double(x);
  os << '\n';
  for (std::size_t k = 0; k < g.times.size(); ++k) {
    os << format_double(g.times[k]);
    for (double v : g.values[k]) os << ',' << format_double(v);
    os << '\n';
  }
}

inline void write_paths_csv(std::ostream& os, const std::vector<double>& per_path, const char* column) {
  os << "path," << column << '\n';
  for (std::size_t i = 0; i < per_path.size(); ++i) os << i << ',' << format_double(per_path[i]) << '\n';
}

}  // namespace arbcost::io
