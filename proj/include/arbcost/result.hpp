#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace arbcost {

/// Price plus whatever diagnostics the producing method has.
struct PricingResult {
  double price = 0.0;
  std::string method;
  std::optional<double> std_error;            // Monte Carlo
  std::optional<std::size_t> paths;
  std::optional<std::size_t> steps;           // lattice / MC time steps
  std::optional<std::size_t> space_nodes;     // PDE
  std::optional<double> risk_neutral_prob;    // lattice
  std::optional<double> implied_rate;         // lattice, closed form
  std::optional<double> replication_residual; // hedge sim
  std::map<std::string, double> diagnostics;
};

}  // namespace arbcost
