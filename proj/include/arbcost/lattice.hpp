#pragma once

// Backward induction on the two-asset lattice with velocity costs. Both
// coordinates share one up/down draw, so node (k, j) is "j ups after k steps"
// for S and V alike.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "arbcost/error.hpp"
#include "arbcost/rates.hpp"
#include "arbcost/result.hpp"

namespace arbcost {

/// How the cost factor (S'/S)^ρ enters the replication equations.
enum class CostMultiplier {
  power,       ///< exact (S'/S)^ρ
  linearized,  ///< 1 + ρ·ln(S'/S)
};

struct LatticeClaim {
  std::function<double(double s, double v)> payoff;
  double maturity = 1.0;
  std::size_t steps = 100;
};

/// Gross one-step returns and their cost-scaled versions.
struct LatticeFactors {
  double s_up = 1.0, s_dn = 1.0;  // S'/S
  double v_up = 1.0, v_dn = 1.0;  // V'/V
  double x_up = 1.0, x_dn = 1.0;  // S'/S times its cost multiplier
  double y_up = 1.0, y_dn = 1.0;  // same for V
  double dt = 0.0;

  /// One-step state price and gross discount implied by the replication
  /// solve: value = (q·f_up + (1−q)·f_dn)/discount.
  double implied_q() const { return (y_dn - x_dn) / (y_dn - x_dn + x_up - y_up); }
  double implied_discount() const {
    return (x_up * y_dn - x_dn * y_up) / (y_dn - x_dn + x_up - y_up);
  }
};

inline double cost_multiplier(double ratio, double rho, CostMultiplier mode) {
  return mode == CostMultiplier::power ? std::pow(ratio, rho) : 1.0 + rho * std::log(ratio);
}

inline LatticeFactors lattice_factors(const LatticeMarket& mkt, double dt,
                                      CostMultiplier mode = CostMultiplier::power) {
  mkt.validate();
  require(dt > 0.0, "dt must be > 0");
  const double sq = std::sqrt(dt);
  LatticeFactors f;
  f.dt = dt;
  f.s_up = 1.0 + mkt.mu * dt + mkt.sigma * sq;
  f.s_dn = 1.0 + mkt.mu * dt - mkt.sigma * sq;
  f.v_up = 1.0 + mkt.m * dt + mkt.v * sq;
  f.v_dn = 1.0 + mkt.m * dt - mkt.v * sq;
  if (!(f.s_dn > 0.0 && f.v_dn > 0.0))
    fail(ErrorCode::StepTooCoarse, "lattice down factor <= 0; reduce dt");
  const double rs = mkt.rho_s(), rv = mkt.rho_v();
  f.x_up = f.s_up * cost_multiplier(f.s_up, rs, mode);
  f.x_dn = f.s_dn * cost_multiplier(f.s_dn, rs, mode);
  f.y_up = f.v_up * cost_multiplier(f.v_up, rv, mode);
  f.y_dn = f.v_dn * cost_multiplier(f.v_dn, rv, mode);
  return f;
}

struct NodeHoldings {
  double a = 0.0;  // units of S
  double b = 0.0;  // units of V
  double value = 0.0;
};

/// Solves a·S·x_up + b·V·y_up = f_up, a·S·x_dn + b·V·y_dn = f_dn.
inline NodeHoldings replicate_node(const LatticeFactors& f, double s, double v, double f_up,
                                   double f_dn) {
  const double det = f.x_up * f.y_dn - f.x_dn * f.y_up;
  const double scale = std::abs(f.x_up * f.y_dn) + std::abs(f.x_dn * f.y_up);
  if (!(std::abs(det) > 1e-12 * scale))
    fail(ErrorCode::SingularReplication, "replication system is singular at this node");
  const double hold_s = (f_up * f.y_dn - f_dn * f.y_up) / det;  // a·S
  const double hold_v = (f.x_up * f_dn - f.x_dn * f_up) / det;  // b·V
  return {hold_s / s, hold_v / v, hold_s + hold_v};
}

/// Root price of the claim plus the one-step Q and implied rate.
inline PricingResult price_lattice(const LatticeMarket& mkt, const LatticeClaim& claim,
                                   CostMultiplier mode = CostMultiplier::power) {
  require(static_cast<bool>(claim.payoff), "lattice claim needs a payoff");
  require(claim.maturity > 0.0, "maturity must be > 0");
  require(claim.steps >= 1, "steps must be >= 1");
  const std::size_t n = claim.steps;
  const double dt = claim.maturity / static_cast<double>(n);
  const LatticeFactors f = lattice_factors(mkt, dt, mode);

  auto s_at = [&](std::size_t k, std::size_t j) {
    return mkt.s0 * std::pow(f.s_up, static_cast<double>(j)) *
           std::pow(f.s_dn, static_cast<double>(k - j));
  };
  auto v_at = [&](std::size_t k, std::size_t j) {
    return mkt.v0 * std::pow(f.v_up, static_cast<double>(j)) *
           std::pow(f.v_dn, static_cast<double>(k - j));
  };

  std::vector<double> slice(n + 1);
  for (std::size_t j = 0; j <= n; ++j) slice[j] = claim.payoff(s_at(n, j), v_at(n, j));

  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = 0; j <= k; ++j)
      slice[j] = replicate_node(f, s_at(k, j), v_at(k, j), slice[j + 1], slice[j]).value;
  }

  PricingResult out;
  out.price = slice[0];
  out.method = "lattice";
  out.steps = n;
  out.risk_neutral_prob = f.implied_q();
  out.implied_rate = (f.implied_discount() - 1.0) / dt;
  out.diagnostics["dt"] = dt;
  out.diagnostics["rho_s"] = mkt.rho_s();
  out.diagnostics["rho_v"] = mkt.rho_v();
  return out;
}

struct QProbe {
  double q = 0.0;              // from the replication solve
  double q_closed_form = 0.0;  // closed-form one-step state price
  double residual = 0.0;
};

/// Closed-form one-step state price
/// q = ½ − (μ* − m*)/(2(σ − v + 𝔠(μ − m)))·√dt.
inline double risk_neutral_prob_closed_form(const LatticeMarket& mkt, double dt) {
  mkt.validate();
  require(dt > 0.0, "dt must be > 0");
  const double c = mkt.cost_const;
  const double den = mkt.sigma - mkt.v + c * (mkt.mu - mkt.m);
  if (std::abs(den) <= 1e-12) fail(ErrorCode::DegenerateVolatility, "adjusted vol gap is zero");
  const double mu_star = mkt.mu * (1.0 + c * mkt.mu / mkt.sigma) * (1.0 + c * mkt.sigma / 2.0);
  const double m_star = mkt.m * (1.0 + c * mkt.m / mkt.v) * (1.0 + c * mkt.v / 2.0);
  const double q = 0.5 - (mu_star - m_star) / (2.0 * den) * std::sqrt(dt);
  if (!(q > 0.0 && q < 1.0))
    fail(ErrorCode::QOutOfRange, "state price " + std::to_string(q) + " outside (0,1)");
  return q;
}

inline QProbe risk_neutral_prob(const LatticeMarket& mkt, double dt,
                                CostMultiplier mode = CostMultiplier::power) {
  QProbe p;
  p.q_closed_form = risk_neutral_prob_closed_form(mkt, dt);
  const LatticeFactors f = lattice_factors(mkt, dt, mode);
  p.q = f.implied_q();
  if (!(p.q > 0.0 && p.q < 1.0))
    fail(ErrorCode::QOutOfRange, "replication-implied state price outside (0,1)");
  p.residual = std::abs(p.q - p.q_closed_form);
  return p;
}

/// |q_closed_form − (½ − ½θ*√dt)| with θ* from adjusted_params.
inline double validate_q_representation(const LatticeMarket& mkt, double dt) {
  const AdjustedParams a = adjusted_params(mkt);
  const double q = risk_neutral_prob_closed_form(mkt, dt);
  return std::abs(q - (0.5 - 0.5 * a.theta_star * std::sqrt(dt)));
}

}  // namespace arbcost
