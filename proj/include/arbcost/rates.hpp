#pragma once

// Implied riskless rates, transaction yields, arb-cost multipliers and the
// wealth-allocation quadratics.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arbcost/error.hpp"
#include "arbcost/math.hpp"
#include "arbcost/trees.hpp"

namespace arbcost {

struct RateResult {
  double rate = 0.0;
  std::optional<std::pair<double, double>> yields;
  std::optional<std::pair<double, double>> lambdas;
  std::optional<double> bond_lambda;
  std::string note;
};

/// Zero-beta rate of a two-risky-asset market without a bond:
/// r = (μ₁σ₂ − μ₂σ₁)/(σ₂ − σ₁).
inline double black72_rate(double mu1, double sigma1, double mu2, double sigma2,
                           double tol_vol = kTolVol) {
  if (std::abs(sigma2 - sigma1) <= tol_vol)
    fail(ErrorCode::DegenerateVolatility, "equal volatilities: the zero-beta rate diverges");
  return (mu1 * sigma2 - mu2 * sigma1) / (sigma2 - sigma1);
}

/// Which (m, v) pair feeds the transaction-yield formula.
enum class MomentSource { exact, simplified };

/// Costed riskless rate r = (μ₁v₂ − μ₂v₁)/(v₂ − v₁) and the two transaction
/// yields C_j = v_j(μ₁−μ₂)/(v₁−v₂) − σ(m₁−m₂)/(v₁−v₂).
inline RateResult costed_rate_and_yields(const CostedView& a, const CostedView& b,
                                         MomentSource source = MomentSource::exact) {
  require(std::abs(a.base.vol - b.base.vol) <= 1e-14 * std::max(1.0, a.base.vol),
          "both views must share the base volatility");
  if (a.trans_rate == b.trans_rate && a.mix == b.mix)
    fail(ErrorCode::HeterogeneityRequired, "views need different transaction rates or mixes");
  const bool lit = source == MomentSource::simplified;
  const double m1 = lit ? a.simplified.drift : a.eff_drift;
  const double m2 = lit ? b.simplified.drift : b.eff_drift;
  const double v1 = lit ? a.simplified.vol : a.eff_vol;
  const double v2 = lit ? b.simplified.vol : b.eff_vol;
  if (std::abs(v1 - v2) <= kTolVol)
    fail(ErrorCode::DegenerateVolatility, "effective volatilities coincide");
  const double mu1 = a.base.drift, mu2 = b.base.drift, sigma = a.base.vol;
  RateResult out;
  out.rate = (mu1 * v2 - mu2 * v1) / (v2 - v1);
  const double dv = v1 - v2;
  out.yields = std::pair{v1 * (mu1 - mu2) / dv - sigma * (m1 - m2) / dv,
                         v2 * (mu1 - mu2) / dv - sigma * (m1 - m2) / dv};
  return out;
}

struct AllocationSolution {
  std::vector<double> roots;      // α₁ values, ascending
  std::vector<double> residuals;  // source-equation residual at each root
  double discriminant = 0.0;
  bool no_real_root = false;
  bool degenerate = false;  // every α solves the equation
};

/// Left side of α₁α₂σ² − C₁α₁ − C₂α₂ with α₂ = 1 − α₁.
inline double allocation_costed_residual(double alpha1, double cy1, double cy2, double sigma) {
  const double alpha2 = 1.0 - alpha1;
  return alpha1 * alpha2 * sigma * sigma - cy1 * alpha1 - cy2 * alpha2;
}

/// Roots of −σ²α² + (σ² − C₁ + C₂)α − C₂ = 0. A negative discriminant is
/// reported through `no_real_root`, not thrown.
inline AllocationSolution solve_allocation_costed(double cy1, double cy2, double sigma) {
  require(sigma > 0.0, "sigma must be > 0");
  const double a = -sigma * sigma;
  const double b = sigma * sigma - cy1 + cy2;
  const double c = -cy2;
  AllocationSolution out;
  out.discriminant = b * b - 4.0 * a * c;
  if (out.discriminant < -1e-12) {
    out.no_real_root = true;
    return out;
  }
  const double sq = std::sqrt(std::max(out.discriminant, 0.0));
  // Citardauq form avoids cancellation in the smaller root.
  const double qv = -0.5 * (b + std::copysign(sq, b));
  if (qv == 0.0) {
    out.roots = {0.0};
  } else {
    out.roots = {qv / a, c / qv};
    if (out.discriminant <= 0.0) out.roots.resize(1);
  }
  std::sort(out.roots.begin(), out.roots.end());
  for (double r : out.roots) out.residuals.push_back(allocation_costed_residual(r, cy1, cy2, sigma));
  return out;
}

/// Non-rate part of the cost-free allocation condition with α₂ = 1 − α₁:
/// −½α₁α₂(σ₁−σ₂)².
inline double allocation_nocost_residual(double alpha1, double sigma1, double sigma2) {
  const double alpha2 = 1.0 - alpha1;
  return 0.5 * alpha1 * (alpha1 - 1.0) * sigma1 * sigma1 +
         0.5 * alpha2 * (alpha2 - 1.0) * sigma2 * sigma2 + alpha1 * alpha2 * sigma1 * sigma2;
}

inline AllocationSolution solve_allocation_nocost(double sigma1, double sigma2,
                                                  double tol_vol = kTolVol) {
  require(sigma1 > 0.0 && sigma2 > 0.0, "volatilities must be > 0");
  AllocationSolution out;
  if (std::abs(sigma1 - sigma2) <= tol_vol) {
    out.degenerate = true;
    return out;
  }
  out.roots = {0.0, 1.0};
  for (double r : out.roots) out.residuals.push_back(allocation_nocost_residual(r, sigma1, sigma2));
  return out;
}

/// Arb-cost riskless rate r* = (√μ₁ + √μ₂)² and multipliers
/// λ_j = (√μ₁ + √μ₂)/√μ_j; the bond multiplier is pinned to 1.
inline RateResult arb_cost_lambdas(double mu1, double mu2) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) fail(ErrorCode::NonPositiveDrift, "both drifts must be > 0");
  const double s1 = std::sqrt(mu1), s2 = std::sqrt(mu2);
  const double sum = s1 + s2;
  RateResult out;
  out.rate = sum * sum;
  out.lambdas = std::pair{sum / s1, sum / s2};
  out.bond_lambda = 1.0;
  if (out.rate > std::max(mu1, mu2)) out.note = "r_star exceeds both drifts";
  return out;
}

/// Rate implied by given multipliers: (μ₂ − μ₁)λ₁λ₂/(λ₁ − λ₂).
inline double rate_from_lambdas(double mu1, double mu2, double lambda1, double lambda2) {
  if (std::abs(lambda1 - lambda2) <= kTolVol)
    fail(ErrorCode::DegenerateVolatility, "equal multipliers leave the rate undetermined");
  return (mu2 - mu1) * lambda1 * lambda2 / (lambda1 - lambda2);
}

/// Parameters of the two-asset lattice market.
struct LatticeMarket {
  double mu = 0.0;
  double sigma = 0.0;
  double m = 0.0;
  double v = 0.0;
  double cost_const = 0.0;
  double s0 = 100.0;
  double v0 = 100.0;

  double rho_s() const { return cost_const * mu / sigma; }
  double rho_v() const { return cost_const * m / v; }

  void validate() const {
    require(sigma > 0.0 && v > 0.0, "lattice vols must be > 0");
    require(s0 > 0.0 && v0 > 0.0, "lattice spots must be > 0");
    require(cost_const >= 0.0, "cost constant must be >= 0");
    require(std::isfinite(mu) && std::isfinite(m) && std::isfinite(rho_s()) && std::isfinite(rho_v()),
            "lattice drifts and cost exponents must be finite");
  }
};

struct AdjustedParams {
  double mu_star = 0.0;
  double m_star = 0.0;
  double sigma_star = 0.0;
  double v_star = 0.0;
  double r_star = 0.0;
  double theta_star = 0.0;
};

/// Cost-adjusted drifts/vols, the induced zero-beta rate and the market
/// price of risk.
inline AdjustedParams adjusted_params(const LatticeMarket& mkt) {
  mkt.validate();
  const double c = mkt.cost_const;
  AdjustedParams a;
  a.mu_star = mkt.mu * (1.0 + c * mkt.mu / mkt.sigma) * (1.0 + c * mkt.sigma / 2.0);
  a.m_star = mkt.m * (1.0 + c * mkt.m / mkt.v) * (1.0 + c * mkt.v / 2.0);
  a.sigma_star = mkt.sigma + c * mkt.mu;
  a.v_star = mkt.v + c * mkt.m;
  if (std::abs(a.v_star - a.sigma_star) <= kTolVol)
    fail(ErrorCode::DegenerateVolatility, "adjusted volatilities coincide");
  a.r_star = (a.mu_star * a.v_star - a.m_star * a.sigma_star) / (a.v_star - a.sigma_star);
  a.theta_star = (a.mu_star - a.r_star) / a.sigma_star;
  return a;
}

}  // namespace arbcost
