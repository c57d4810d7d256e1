#pragma once

// Backward pricing PDE with cost-adjusted discounting:
//   Υ_t + λ x Υ_x + ½ ρ² x² Υ_xx − λ Υ + 𝔥 = 0,  Υ(T, x) = g(x),
// with λ = r(1−Ψ)/(1−Δ) and ρ = √(1+λΓ)·σ. Solved on a log-uniform grid by
// a θ-scheme with a short fully implicit start.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "arbcost/error.hpp"

namespace arbcost {

using SurfaceFn = std::function<double(double t, double x)>;
using PayoffFn = std::function<double(double x)>;

inline SurfaceFn constant_fn(double c) {
  return [c](double, double) { return c; };
}

/// Discount rate λ = r(1−Ψ)/(1−Δ).
inline double cost_discount_rate(double r, double delta_cost, double bond_cost) {
  if (delta_cost >= 1.0 - 1e-12) fail(ErrorCode::DeltaCostSaturated, "delta cost must stay below 1");
  require(delta_cost >= 0.0, "delta cost must be >= 0");
  require(bond_cost >= 0.0 && bond_cost < 1.0, "bond cost must lie in [0,1)");
  return r * (1.0 - bond_cost) / (1.0 - delta_cost);
}

/// ρ = √(1+λΓ)·σ.
inline double augmented_vol(double sigma, double lambda, double gamma_cost) {
  const double f = 1.0 + lambda * gamma_cost;
  if (f < 0.0) fail(ErrorCode::NegativeVarianceAugmentation, "1 + lambda*Gamma < 0");
  return std::sqrt(f) * sigma;
}

/// κ = Δ/(1−Δ)·(1−Ψ)·r·X, the opportunity cost of financing the delta cost.
inline double opportunity_cost(double delta_cost, double bond_cost, double r, double portfolio_value) {
  if (delta_cost >= 1.0 - 1e-12) fail(ErrorCode::DeltaCostSaturated, "delta cost must stay below 1");
  require(delta_cost >= 0.0, "delta cost must be >= 0");
  return delta_cost / (1.0 - delta_cost) * (1.0 - bond_cost) * r * portfolio_value;
}

/// (Δ, Γ, Ψ, 𝔥) as functions of (t, x). Empty members read as zero.
struct CostQuadruplet {
  SurfaceFn delta_cost;
  SurfaceFn gamma_cost;
  SurfaceFn bond_cost;
  SurfaceFn consumption;
};

struct PDEProblem {
  SurfaceFn rate;
  SurfaceFn vol;
  CostQuadruplet costs;
  PayoffFn payoff;
  double maturity = 1.0;
};

/// Coefficients of the pricing operator at one point.
struct PDECoefficients {
  double lambda = 0.0;
  double rho = 0.0;
  double source = 0.0;
};

inline PDECoefficients pde_coefficients(const PDEProblem& p, double t, double x) {
  auto eval = [&](const SurfaceFn& f) { return f ? f(t, x) : 0.0; };
  const double r = eval(p.rate);
  const double sigma = eval(p.vol);
  const double d = eval(p.costs.delta_cost);
  const double g = eval(p.costs.gamma_cost);
  const double psi = eval(p.costs.bond_cost);
  const double h = eval(p.costs.consumption);
  if (!(std::isfinite(r) && std::isfinite(sigma) && std::isfinite(d) && std::isfinite(g) &&
        std::isfinite(psi) && std::isfinite(h)))
    fail(ErrorCode::InvalidArgument,
         "non-finite PDE coefficient at t=" + std::to_string(t) + ", x=" + std::to_string(x));
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "rate must be > 0 on the grid");
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidArgument, "vol must be > 0 on the grid");
  if (!(g >= 0.0)) fail(ErrorCode::InvalidArgument, "gamma cost must be >= 0");
  PDECoefficients c;
  c.lambda = cost_discount_rate(r, d, psi);
  c.rho = augmented_vol(sigma, c.lambda, g);
  c.source = h;
  return c;
}

struct GridSpec {
  std::size_t space_intervals = 400;
  std::size_t time_steps = 400;
  double spot = 100.0;   // grid centre; a node when space_intervals is even
  double half_width = 6; // in units of ρ√T
  std::optional<double> x_min;
  std::optional<double> x_max;
  double theta = 0.5;
  std::size_t startup_steps = 2;  // fully implicit steps after the payoff
};

struct GridSolution {
  std::vector<double> times;  // increasing, times.back() = maturity
  std::vector<double> space;  // log-uniform prices
  std::vector<std::vector<double>> values;  // values[time][space]
  std::string scheme = "theta";
  double theta = 0.5;
  std::size_t startup_steps = 0;
  std::string lower_boundary = "dirichlet";
  std::string upper_boundary = "linear";

  double log_step() const { return std::log(space[1] / space[0]); }
};

namespace detail {

/// Thomas algorithm; a[0] and c[n−1] are ignored. Overwrites d with the solution.
inline void solve_tridiagonal(const std::vector<double>& a, std::vector<double> b,
                              const std::vector<double>& c, std::vector<double>& d) {
  const std::size_t n = d.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

}  // namespace detail

/// Generic solver. `coef(t, x)` returns PDECoefficients; it is evaluated at
/// the midpoint of each time slice.
template <class CoefFn>
GridSolution solve_pde_with(CoefFn&& coef, const PayoffFn& payoff, double maturity,
                            const GridSpec& grid) {
  require(static_cast<bool>(payoff), "PDE problem needs a payoff");
  require(maturity > 0.0, "maturity must be > 0");
  require(grid.spot > 0.0, "grid spot must be > 0");
  require(grid.theta >= 0.5 && grid.theta <= 1.0, "theta must lie in [0.5, 1]");
  const std::size_t n = grid.space_intervals;
  const std::size_t m = grid.time_steps;
  if (n < 2 || m < 2) fail(ErrorCode::GridTooCoarse, "need at least 3 space nodes and 2 time steps");

  const double sqrt_t = std::sqrt(maturity);
  const double ref_vol = std::max(coef(0.0, grid.spot).rho, coef(maturity, grid.spot).rho);
  const double log_spot = std::log(grid.spot);
  double y_lo, y_hi;
  if (grid.x_min || grid.x_max) {
    require(grid.x_min && grid.x_max, "give both x_min and x_max or neither");
    require(*grid.x_min > 0.0 && *grid.x_max > *grid.x_min, "bad explicit grid bounds");
    y_lo = std::log(*grid.x_min);
    y_hi = std::log(*grid.x_max);
    const double need = 5.0 * ref_vol * sqrt_t;
    if (y_lo > log_spot - need || y_hi < log_spot + need)
      fail(ErrorCode::GridTooCoarse, "explicit bounds must cover spot*exp(+-5 rho sqrt(T))");
  } else {
    if (grid.half_width < 5.0) fail(ErrorCode::GridTooCoarse, "half width must be >= 5 std devs");
    const double w = grid.half_width * ref_vol * sqrt_t;
    y_lo = log_spot - w;
    y_hi = log_spot + w;
  }
  const double dy = (y_hi - y_lo) / static_cast<double>(n);
  const double dtau = maturity / static_cast<double>(m);
  const double kappa = std::exp(dy);

  GridSolution sol;
  sol.theta = grid.theta;
  sol.startup_steps = std::min(grid.startup_steps, m);
  sol.times.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) sol.times[k] = maturity * static_cast<double>(k) / static_cast<double>(m);
  sol.times[m] = maturity;
  sol.space.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n);
    sol.space[i] = std::exp(y_lo + (y_hi - y_lo) * frac);
  }
  if (!grid.x_min && n % 2 == 0) sol.space[n / 2] = grid.spot;
  sol.values.assign(m + 1, std::vector<double>(n + 1));
  for (std::size_t i = 0; i <= n; ++i) sol.values[m][i] = payoff(sol.space[i]);

  std::vector<double> lo(n + 1), di(n + 1), up(n + 1), src(n + 1), lam(n + 1);
  std::vector<double> sa(n - 1), sb(n - 1), sc(n - 1), rhs(n - 1);
  for (std::size_t k = m; k-- > 0;) {
    const std::size_t taken = m - 1 - k;
    const double th = taken < sol.startup_steps ? 1.0 : grid.theta;
    const double t_mid = 0.5 * (sol.times[k] + sol.times[k + 1]);
    for (std::size_t i = 0; i <= n; ++i) {
      const PDECoefficients c = coef(t_mid, sol.space[i]);
      const double diff = 0.5 * c.rho * c.rho / (dy * dy);
      const double drift = c.lambda - 0.5 * c.rho * c.rho;
      if (std::abs(drift) * dy <= c.rho * c.rho) {
        const double adv = drift / (2.0 * dy);
        lo[i] = diff - adv;
        up[i] = diff + adv;
        di[i] = -2.0 * diff - c.lambda;
      } else {
        // Convection-dominated node: one-sided difference toward the inflow
        // side, taken in x so it is exact for payoffs linear in price.
        const double adv = drift > 0.0 ? drift / (kappa - 1.0) : -drift / (1.0 - 1.0 / kappa);
        lo[i] = diff + (drift < 0.0 ? adv : 0.0);
        up[i] = diff + (drift > 0.0 ? adv : 0.0);
        di[i] = -2.0 * diff - adv - c.lambda;
      }
      src[i] = c.source;
      lam[i] = c.lambda;
    }
    const std::vector<double>& old = sol.values[k + 1];
    std::vector<double>& cur = sol.values[k];

    // Lower edge: the same θ-scheme applied to V' = −λV + 𝔥.
    cur[0] = ((1.0 - (1.0 - th) * lam[0] * dtau) * old[0] + dtau * src[0]) / (1.0 + th * lam[0] * dtau);

    for (std::size_t i = 1; i < n; ++i) {
      const std::size_t r = i - 1;
      rhs[r] = old[i] + (1.0 - th) * dtau * (lo[i] * old[i - 1] + di[i] * old[i] + up[i] * old[i + 1]) +
               dtau * src[i];
      sa[r] = -th * dtau * lo[i];
      sb[r] = 1.0 - th * dtau * di[i];
      sc[r] = -th * dtau * up[i];
    }
    rhs[0] -= sa[0] * cur[0];
    // Upper edge: V_n = (1+κ)V_{n−1} − κV_{n−2}, folded into the last row.
    const std::size_t last = n - 2;
    sb[last] += sc[last] * (1.0 + kappa);
    if (last > 0)
      sa[last] -= sc[last] * kappa;
    else
      rhs[last] += sc[last] * kappa * cur[0];
    detail::solve_tridiagonal(sa, sb, sc, rhs);
    for (std::size_t i = 1; i < n; ++i) cur[i] = rhs[i - 1];
    cur[n] = (1.0 + kappa) * cur[n - 1] - kappa * cur[n - 2];
    for (double v : cur)
      if (!std::isfinite(v)) fail(ErrorCode::NonFinitePath, "PDE produced a non-finite value");
  }
  return sol;
}

inline GridSolution solve_pde(const PDEProblem& problem, const GridSpec& grid) {
  require(static_cast<bool>(problem.rate) && static_cast<bool>(problem.vol),
          "PDE problem needs rate and vol");
  return solve_pde_with([&](double t, double x) { return pde_coefficients(problem, t, x); },
                        problem.payoff, problem.maturity, grid);
}

/// Plain Black–Scholes PDE, bypassing the cost quadruplet.
inline GridSolution solve_black_scholes_pde(double r, double sigma, const PayoffFn& payoff,
                                            double maturity, const GridSpec& grid) {
  require(sigma > 0.0, "vol must be > 0");
  return solve_pde_with([r, sigma](double, double) { return PDECoefficients{r, sigma, 0.0}; }, payoff,
                        maturity, grid);
}

/// Cubic Lagrange interpolation in log-price on one time slice.
inline double value_at(const GridSolution& sol, double x, std::size_t time_index = 0) {
  const auto& row = sol.values.at(time_index);
  const std::size_t n = sol.space.size() - 1;
  require(x >= sol.space.front() && x <= sol.space.back(), "x outside the grid");
  const double y0 = std::log(sol.space.front());
  const double dy = (std::log(sol.space.back()) - y0) / static_cast<double>(n);
  const double pos = (std::log(x) - y0) / dy;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-12) return row[static_cast<std::size_t>(nearest)];
  if (n < 3) {
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), n - 1);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * row[i] + w * row[i + 1];
  }
  const auto base = static_cast<std::size_t>(std::clamp(std::floor(pos) - 1.0, 0.0, static_cast<double>(n - 3)));
  double out = 0.0;
  for (std::size_t a = 0; a < 4; ++a) {
    double w = 1.0;
    for (std::size_t b = 0; b < 4; ++b)
      if (a != b) w *= (pos - static_cast<double>(base + b)) / static_cast<double>(static_cast<long>(a) - static_cast<long>(b));
    out += w * row[base + a];
  }
  return out;
}

/// Restricts where pde_residual looks.
struct ResidualWindow {
  double skip_near_maturity = 0.0;  // ignore t > T − skip
  double x_lo = 0.0;
  double x_hi = 1e300;
};

/// Max |Υ_t + (λ−½ρ²)Υ_y + ½ρ²Υ_yy − λΥ + 𝔥| over interior nodes, with
/// y = ln x and central differences in both t and y.
template <class CoefFn>
double pde_residual_with(const GridSolution& sol, CoefFn&& coef, const ResidualWindow& win = {}) {
  const std::size_t m = sol.times.size() - 1;
  const std::size_t n = sol.space.size() - 1;
  require(m >= 2 && n >= 2, "residual needs interior nodes");
  const double dy = sol.log_step();
  const double t_end = sol.times.back();
  double worst = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    if (sol.times[k] > t_end - win.skip_near_maturity) continue;
    const double dt2 = sol.times[k + 1] - sol.times[k - 1];
    for (std::size_t i = 1; i < n; ++i) {
      const double x = sol.space[i];
      if (x < win.x_lo || x > win.x_hi) continue;
      const PDECoefficients c = coef(sol.times[k], x);
      const auto& v = sol.values[k];
      const double vt = (sol.values[k + 1][i] - sol.values[k - 1][i]) / dt2;
      const double vy = (v[i + 1] - v[i - 1]) / (2.0 * dy);
      const double vyy = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (dy * dy);
      const double res = vt + (c.lambda - 0.5 * c.rho * c.rho) * vy + 0.5 * c.rho * c.rho * vyy -
                         c.lambda * v[i] + c.source;
      worst = std::max(worst, std::abs(res));
    }
  }
  return worst;
}

inline double pde_residual(const GridSolution& sol, const PDEProblem& problem,
                           const ResidualWindow& win = {}) {
  return pde_residual_with(sol, [&](double t, double x) { return pde_coefficients(problem, t, x); }, win);
}

}  // namespace arbcost
