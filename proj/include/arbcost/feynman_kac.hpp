#pragma once

// Monte Carlo for
//   Υ(t,x) = E[ ∫_t^T φ_{t,s} 𝔥(s,Z_s) ds + φ_{t,T} g(Z_T) ],  φ_{t,s} = exp(−∫_t^s λ),
// with dZ = λ Z dt + ρ Z dW simulated in log space.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "arbcost/error.hpp"
#include "arbcost/math.hpp"
#include "arbcost/parallel.hpp"
#include "arbcost/pde.hpp"
#include "arbcost/random.hpp"

namespace arbcost {

struct FKProblem {
  SurfaceFn lambda_fn;
  SurfaceFn rho_fn;
  SurfaceFn source_fn;  // empty reads as zero
  PayoffFn payoff;
  double start_time = 0.0;
  double start_x = 100.0;
  double horizon = 1.0;  // T
};

struct MCBudget {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool antithetic = false;
};

struct MCResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  bool antithetic = false;
};

namespace detail {

inline double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorCode::NonFinitePath, std::string("non-finite ") + what);
  return v;
}

/// One path; `sign` flips every Gaussian draw for the antithetic partner.
inline double fk_path(const FKProblem& p, std::size_t n_steps, std::uint64_t seed, std::uint64_t path,
                      double sign) {
  PathStream rng(seed, path);
  const double dt = (p.horizon - p.start_time) / static_cast<double>(n_steps);
  const double sq = std::sqrt(dt);
  double t = p.start_time;
  double logz = std::log(p.start_x);
  double z = p.start_x;
  double lam = finite_or_throw(p.lambda_fn(t, z), "lambda");
  double h = p.source_fn ? finite_or_throw(p.source_fn(t, z), "source") : 0.0;
  double disc_int = 0.0;  // ∫λ
  double phi = 1.0;
  double source_int = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double rho = finite_or_throw(p.rho_fn(t, z), "rho");
    logz += (lam - 0.5 * rho * rho) * dt + rho * sq * sign * rng.normal();
    t = p.start_time + dt * static_cast<double>(k + 1);
    z = std::exp(logz);
    const double lam_next = finite_or_throw(p.lambda_fn(t, z), "lambda");
    const double h_next = p.source_fn ? finite_or_throw(p.source_fn(t, z), "source") : 0.0;
    disc_int += 0.5 * (lam + lam_next) * dt;
    const double phi_next = std::exp(-disc_int);
    source_int += 0.5 * (phi * h + phi_next * h_next) * dt;
    lam = lam_next;
    h = h_next;
    phi = phi_next;
  }
  return finite_or_throw(source_int + phi * p.payoff(z), "path value");
}

}  // namespace detail

/// Estimate and standard error. Path i draws from substream (seed, i); with
/// antithetics, pair i uses substream i for both members and the standard
/// error comes from the pair averages.
inline MCResult fk_price(const FKProblem& p, const MCBudget& budget) {
  require(static_cast<bool>(p.lambda_fn) && static_cast<bool>(p.rho_fn) && static_cast<bool>(p.payoff),
          "FK problem needs lambda, rho and payoff");
  require(p.horizon > p.start_time, "horizon must exceed start time");
  require(p.start_x > 0.0, "start x must be > 0");
  require(budget.n_paths >= 2, "n_paths must be >= 2");
  require(budget.n_steps >= 1, "n_steps must be >= 1");
  if (budget.antithetic) require(budget.n_paths % 2 == 0, "antithetic runs need an even path count");

  const std::size_t units = budget.antithetic ? budget.n_paths / 2 : budget.n_paths;
  std::vector<double> vals(units);
  parallel_blocks(units, budget.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      if (budget.antithetic)
        vals[i] = 0.5 * (detail::fk_path(p, budget.n_steps, budget.seed, i, 1.0) +
                         detail::fk_path(p, budget.n_steps, budget.seed, i, -1.0));
      else
        vals[i] = detail::fk_path(p, budget.n_steps, budget.seed, i, 1.0);
    }
  });
  const SampleStats s = sample_stats(vals);
  MCResult out;
  out.estimate = s.mean;
  out.std_error = s.std_error();
  out.n_paths = budget.n_paths;
  out.n_steps = budget.n_steps;
  out.seed = budget.seed;
  out.antithetic = budget.antithetic;
  return out;
}

/// Same coefficients as the PDE problem, started at (0, spot).
inline FKProblem to_fk_problem(const PDEProblem& problem, double spot) {
  FKProblem f;
  f.lambda_fn = [problem](double t, double x) { return pde_coefficients(problem, t, x).lambda; };
  f.rho_fn = [problem](double t, double x) { return pde_coefficients(problem, t, x).rho; };
  if (problem.costs.consumption) f.source_fn = problem.costs.consumption;
  f.payoff = problem.payoff;
  f.start_time = 0.0;
  f.start_x = spot;
  f.horizon = problem.maturity;
  return f;
}

struct FKComparison {
  MCResult mc;
  double pde_value = 0.0;
  double pde_residual = 0.0;
  double abs_diff = 0.0;
  double band = 0.0;  // 3 standard errors
  bool agree = false;
};

/// Solves `problem` both ways at (0, grid.spot).
inline FKComparison fk_vs_pde(const PDEProblem& problem, const GridSpec& grid, const MCBudget& budget,
                              const ResidualWindow& win = {}) {
  FKComparison c;
  const GridSolution sol = solve_pde(problem, grid);
  c.pde_value = value_at(sol, grid.spot);
  c.pde_residual = pde_residual(sol, problem, win);
  c.mc = fk_price(to_fk_problem(problem, grid.spot), budget);
  c.abs_diff = std::abs(c.mc.estimate - c.pde_value);
  c.band = 3.0 * c.mc.std_error;
  c.agree = c.abs_diff <= c.band;
  return c;
}

}  // namespace arbcost
