#pragma once

// Path simulations: the zero-capital pair trade, the costed delta hedge and the
// two-asset replication of the power claim ω₁^α₁ ω₂^α₂. Every asset in a
// simulation is driven by the same Gaussian draw per step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "arbcost/closed_form.hpp"
#include "arbcost/error.hpp"
#include "arbcost/math.hpp"
#include "arbcost/parallel.hpp"
#include "arbcost/random.hpp"
#include "arbcost/rates.hpp"
#include "arbcost/trees.hpp"

namespace arbcost {

struct PathBudget {
  double horizon = 1.0;
  std::size_t steps = 1000;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool keep_paths = false;

  void validate() const {
    require(horizon > 0.0, "horizon must be > 0");
    require(steps >= 1, "steps must be >= 1");
    require(n_paths >= 1, "n_paths must be >= 1");
  }
};

struct PnLStats {
  double mean = 0.0;
  double variance = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t paths = 0;
  std::size_t steps = 0;
  double initial_capital = 0.0;
  std::vector<double> per_path;  // filled when keep_paths is set
};

namespace detail {
inline PnLStats summarize(std::vector<double>&& xs, const PathBudget& b, double capital) {
  const SampleStats s = sample_stats(xs);
  PnLStats out;
  out.mean = s.mean;
  out.variance = s.variance;
  out.min = s.min;
  out.max = s.max;
  out.paths = xs.size();
  out.steps = b.steps;
  out.initial_capital = capital;
  if (b.keep_paths) out.per_path = std::move(xs);
  return out;
}
}  // namespace detail

/// Long $1 of asset 2, short $1 of asset 1, rebalanced every step, no
/// capital. Both prices are exact GBM steps on one Brownian path.
inline PnLStats simulate_pair_arbitrage(double mu1, double mu2, double sigma, const PathBudget& b) {
  require(sigma > 0.0, "sigma must be > 0");
  b.validate();
  const double dt = b.horizon / static_cast<double>(b.steps);
  const double sq = std::sqrt(dt);
  const double g1 = (mu1 - 0.5 * sigma * sigma) * dt;
  const double g2 = (mu2 - 0.5 * sigma * sigma) * dt;
  std::vector<double> pnl(b.n_paths);
  parallel_blocks(b.n_paths, b.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      PathStream rng(b.seed, i);
      double acc = 0.0;
      for (std::size_t k = 0; k < b.steps; ++k) {
        const double shock = sigma * sq * rng.normal();
        acc += std::expm1(g2 + shock) - std::expm1(g1 + shock);
      }
      pnl[i] = acc;
    }
  });
  return detail::summarize(std::move(pnl), b, 0.0);
}

/// How the nominal holding a is derived from the option delta W_x.
enum class HedgeRule {
  exposure,       ///< a = (2−λ)W_x/λ, so λa − (1−λ)W_x = W_x
  plus_lambda,    ///< a = (2+λ)W_x/λ
};

struct CostedHedgeOptions {
  HedgeRule rule = HedgeRule::exposure;
  int asset = 1;                         // which asset carries the hedge (1 or 2)
  std::optional<double> lambda_override; // e.g. 1 for the cost-free hedge
  std::optional<double> rate_override;   // bond rate and pricing rate
};

struct HedgeStats {
  double mean_error = 0.0;  // P_T − payoff
  double error_variance = 0.0;
  double error_std = 0.0;
  double mean_cost = 0.0;   // Σ (e − a)ΔS, averaged over paths
  double max_audit = 0.0;   // worst per-step self-financing mismatch, relative
  double initial_price = 0.0;
  double lambda = 1.0;
  double rate = 0.0;
  std::size_t paths = 0;
  std::size_t steps = 0;
  std::vector<double> per_path;
};

inline double hedge_nominal(double delta, double lambda, HedgeRule rule) {
  return rule == HedgeRule::exposure ? (2.0 - lambda) * delta / lambda : (2.0 + lambda) * delta / lambda;
}

inline double effective_exposure(double nominal, double delta, double lambda) {
  return lambda * nominal - (1.0 - lambda) * delta;
}

/// Short one option priced at the arb-cost rate, hedged in the chosen asset
/// (drift μ_j, vol σ) plus a bond growing at that rate. The position value
/// moves by e·dS + b·dβ where e is the effective exposure.
inline HedgeStats simulate_costed_hedge(double mu1, double mu2, double sigma, VanillaSpec spec,
                                        const PathBudget& b, const CostedHedgeOptions& opt = {}) {
  b.validate();
  require(opt.asset == 1 || opt.asset == 2, "asset must be 1 or 2");
  const RateResult rr = arb_cost_lambdas(mu1, mu2);
  const double rate = opt.rate_override.value_or(rr.rate);
  const double lambda =
      opt.lambda_override.value_or(opt.asset == 1 ? rr.lambdas->first : rr.lambdas->second);
  require(lambda != 0.0, "lambda must be nonzero");
  const double mu = opt.asset == 1 ? mu1 : mu2;
  spec.vol = sigma;
  spec.rate = rate;
  spec.maturity = b.horizon;
  spec.validate();
  const double price0 = bs_price(spec);

  const double dt = b.horizon / static_cast<double>(b.steps);
  const double sq = std::sqrt(dt);
  const double drift = (mu - 0.5 * sigma * sigma) * dt;
  std::vector<double> err(b.n_paths), cost(b.n_paths), audit(b.n_paths);
  parallel_blocks(b.n_paths, b.threads, [&](std::size_t lo, std::size_t hi) {
    VanillaSpec live = spec;
    for (std::size_t i = lo; i < hi; ++i) {
      PathStream rng(b.seed, i);
      double s = spec.spot;
      double beta = 1.0;
      double p = price0;
      double c = 0.0;
      double worst = 0.0;
      for (std::size_t k = 0; k < b.steps; ++k) {
        live.maturity = b.horizon - dt * static_cast<double>(k);
        live.spot = s;
        const double delta = carry_quote(live, rate).delta;
        const double a = hedge_nominal(delta, lambda, opt.rule);
        const double e = effective_exposure(a, delta, lambda);
        const double bond = (p - e * s) / beta;
        const double s_next = s * std::exp(drift + sigma * sq * rng.normal());
        const double beta_next = std::exp(rate * dt * static_cast<double>(k + 1));
        const double ds = s_next - s;
        const double step_cost = (e - a) * ds;
        const double p_next = p + a * ds + bond * (beta_next - beta) + step_cost;
        const double revalued = e * s_next + bond * beta_next;
        worst = std::max(worst, std::abs(p_next - revalued) / std::max(1.0, std::abs(revalued)));
        c += step_cost;
        p = p_next;
        s = s_next;
        beta = beta_next;
      }
      err[i] = p - intrinsic(spec, s);
      cost[i] = c;
      audit[i] = worst;
    }
  });
  HedgeStats out;
  const SampleStats es = sample_stats(err);
  out.mean_error = es.mean;
  out.error_variance = es.variance;
  out.error_std = std::sqrt(es.variance);
  out.mean_cost = sample_stats(cost).mean;
  out.max_audit = *std::max_element(audit.begin(), audit.end());
  out.initial_price = price0;
  out.lambda = lambda;
  out.rate = rate;
  out.paths = b.n_paths;
  out.steps = b.steps;
  if (b.keep_paths) out.per_path = std::move(err);
  return out;
}

/// Raw inputs of the allocation experiment: both agents see the aggregate
/// process with drift μ_j and vol σ, and trade it with vol v_j.
struct AllocationMarket {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;

  static AllocationMarket from_views(const CostedView& a, const CostedView& b) {
    require(std::abs(a.base.vol - b.base.vol) <= 1e-14 * std::max(1.0, a.base.vol),
            "both views must share the base volatility");
    return {a.base.drift, b.base.drift, a.base.vol, a.eff_vol, b.eff_vol};
  }
};

struct AllocationStats {
  PnLStats error;         // P_T − G_T
  double weight1 = 0.0;   // dollar weight of asset 1 in the replicating portfolio
  double zero_drift_alpha = 0.0;  // α₁ at which portfolio and claim drifts agree
};

/// Replicates G = ω₁^α₁ ω₂^α₂ (ω_j(0) = 1) with the two-asset holdings
/// A_jω_j = w_j·P, w₁ = (σ − v₂)/(v₁ − v₂), w₂ = 1 − w₁, where asset j earns
/// exp((μ_j − ½v_j²)dt + v_j ΔB) per unit over a step.
inline AllocationStats verify_allocation(const AllocationMarket& mkt, std::pair<double, double> alpha,
                                         const PathBudget& b) {
  b.validate();
  require(std::abs(alpha.first + alpha.second - 1.0) <= 1e-12, "allocation weights must sum to 1");
  require(mkt.sigma > 0.0 && mkt.v1 > 0.0 && mkt.v2 > 0.0, "vols must be > 0");
  if (std::abs(mkt.v1 - mkt.v2) <= kTolVol)
    fail(ErrorCode::DegenerateVolatility, "traded vols coincide");
  const double w1 = (mkt.sigma - mkt.v2) / (mkt.v1 - mkt.v2);
  const double w2 = 1.0 - w1;
  const double dt = b.horizon / static_cast<double>(b.steps);
  const double sq = std::sqrt(dt);
  const double s2 = mkt.sigma * mkt.sigma;
  const double gt1 = (mkt.mu1 - 0.5 * mkt.v1 * mkt.v1) * dt;
  const double gt2 = (mkt.mu2 - 0.5 * mkt.v2 * mkt.v2) * dt;
  const double go1 = (mkt.mu1 - 0.5 * s2) * dt;
  const double go2 = (mkt.mu2 - 0.5 * s2) * dt;
  std::vector<double> err(b.n_paths);
  parallel_blocks(b.n_paths, b.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      PathStream rng(b.seed, i);
      double p = 1.0;
      double log_w1 = 0.0, log_w2 = 0.0;
      for (std::size_t k = 0; k < b.steps; ++k) {
        const double db = sq * rng.normal();
        p = w1 * p * std::exp(gt1 + mkt.v1 * db) + w2 * p * std::exp(gt2 + mkt.v2 * db);
        log_w1 += go1 + mkt.sigma * db;
        log_w2 += go2 + mkt.sigma * db;
      }
      err[i] = p - std::exp(alpha.first * log_w1 + alpha.second * log_w2);
    }
  });
  AllocationStats out;
  out.error = detail::summarize(std::move(err), b, 1.0);
  out.weight1 = w1;
  out.zero_drift_alpha = w1;
  return out;
}

inline AllocationStats verify_allocation(const CostedView& a, const CostedView& b,
                                         std::pair<double, double> alpha, const PathBudget& budget) {
  return verify_allocation(AllocationMarket::from_views(a, b), alpha, budget);
}

}  // namespace arbcost
