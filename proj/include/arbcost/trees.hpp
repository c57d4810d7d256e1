#pragma once

// Heterogeneous-belief binomial trees, the four-branch transaction-cost tree,
// their exact one-step moments and their geometric-Brownian-motion limits.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arbcost/error.hpp"
#include "arbcost/math.hpp"
#include "arbcost/parallel.hpp"
#include "arbcost/random.hpp"

namespace arbcost {

/// One trader's beliefs about the aggregate process.
///
/// The probability of an up move is prob_base + prob_tilt·√dt, and up/down
/// factors carry their own drifts. `drift` is always the implied
/// prob_base·up_drift + (1 − prob_base)·down_drift.
struct AgentView {
  double drift = 0.0;
  double vol = 0.0;
  double prob_base = 0.5;
  double prob_tilt = 0.0;  // per √year; not a volatility
  double up_drift = 0.0;
  double down_drift = 0.0;

  /// Full (g, tilt, γ, δ, σ) parameterization.
  static AgentView extended(double prob_base, double prob_tilt, double up_drift, double down_drift,
                            double vol) {
    AgentView a{prob_base * up_drift + (1.0 - prob_base) * down_drift, vol, prob_base, prob_tilt,
                up_drift, down_drift};
    a.validate();
    return a;
  }

  /// Drift/vol only: symmetric probabilities and a common drift on both branches.
  static AgentView simple(double drift, double vol) {
    AgentView a{drift, vol, 0.5, 0.0, drift, drift};
    a.validate();
    return a;
  }

  void validate() const {
    require(std::isfinite(drift) && std::isfinite(up_drift) && std::isfinite(down_drift) &&
                std::isfinite(prob_tilt),
            "agent view has non-finite parameters");
    require(vol > 0.0 && std::isfinite(vol), "agent vol must be > 0");
    require(prob_base > 0.0 && prob_base < 1.0, "prob_base must lie in (0,1)");
  }
};

struct TreeStepParams {
  double p_up = 0.5;
  double up_factor = 1.0;
  double down_factor = 1.0;
  double dt = 0.0;
};

struct GBMParams {
  double drift = 0.0;
  double vol = 0.0;
  double spot = 1.0;
};

/// Which one-step recipe builds (p, u, d).
enum class StepVariant {
  extended,          ///< p = g + tilt·√dt, u/d with √((1−p)/p)σ√dt spreads
  costed_symmetric,  ///< p = ½ + ((μ−σ²/2)/(2σ))√dt, u/d = 1 ± σ√dt + ½σ²dt
  moment_matched,    ///< p = ½ + (μ/(2σ))√dt, u/d = 1 ± σ√dt
};

namespace detail {
inline TreeStepParams checked_step(double p, double u, double d, double dt) {
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::StepTooCoarse, "up probability " + std::to_string(p) + " outside (0,1)");
  if (!(d > 0.0)) fail(ErrorCode::StepTooCoarse, "down factor " + std::to_string(d) + " <= 0");
  if (!(d < u)) fail(ErrorCode::StepTooCoarse, "down factor must stay below up factor");
  return {p, u, d, dt};
}
}  // namespace detail

/// Parameters satisfying both moment conditions E[R] = 1 + μdt and
/// E[R²] = 1 + (2μ+σ²)dt (zero-order drifts in u and d).
inline TreeStepParams moment_match_step(double mu, double sigma, double dt) {
  require(dt > 0.0, "dt must be > 0");
  require(sigma > 0.0, "sigma must be > 0");
  const double sq = std::sqrt(dt);
  const double p = 0.5 + mu / (2.0 * sigma) * sq;
  return detail::checked_step(p, 1.0 + sigma * sq, 1.0 - sigma * sq, dt);
}

inline TreeStepParams step_params(const AgentView& view, double dt,
                                  StepVariant variant = StepVariant::extended) {
  require(dt > 0.0, "dt must be > 0");
  view.validate();
  const double sq = std::sqrt(dt);
  const double s = view.vol;
  switch (variant) {
    case StepVariant::extended: {
      const double p = view.prob_base + view.prob_tilt * sq;
      if (!(p > 0.0 && p < 1.0))
        fail(ErrorCode::StepTooCoarse, "up probability " + std::to_string(p) + " outside (0,1)");
      const double u = 1.0 + view.up_drift * dt + std::sqrt((1.0 - p) / p) * s * sq;
      const double d = 1.0 + view.down_drift * dt - std::sqrt(p / (1.0 - p)) * s * sq;
      return detail::checked_step(p, u, d, dt);
    }
    case StepVariant::costed_symmetric: {
      const double p = 0.5 + (view.drift - 0.5 * s * s) / (2.0 * s) * sq;
      return detail::checked_step(p, 1.0 + s * sq + 0.5 * s * s * dt, 1.0 - s * sq + 0.5 * s * s * dt,
                                  dt);
    }
    case StepVariant::moment_matched:
      return moment_match_step(view.drift, s, dt);
  }
  fail(ErrorCode::InvalidArgument, "unknown step variant");
}

// ---------------------------------------------------------------------------
// Transaction-cost tree
// ---------------------------------------------------------------------------

/// Effective drift/vol of the four-branch cost tree. `exact` comes from the
/// exact one-step moments: E[R] = 1 + m·dt holds identically and
/// Var[R] = v²dt + O(dt²) with
///   m  = μ + ε(c−1)(μ + ½cσ²),
///   v² = σ²(1 + (c²−1)ε).
/// `simplified` is the shorter closed form (m = μ + ½σ²c(c−1)ε,
/// v² = σ²(1+(c−1)ε)) for side-by-side reporting only.
struct CostedLimit {
  GBMParams exact;
  GBMParams simplified;
};

/// Relaxed domain (c ≥ 1, ε ∈ [0,1]) so the cost-free limits can be probed.
inline CostedLimit costed_gbm_limit(double mu, double sigma, double trans_rate, double mix,
                                    double spot = 1.0) {
  require(sigma > 0.0, "sigma must be > 0");
  require(trans_rate >= 1.0, "transaction rate must be >= 1");
  require(mix >= 0.0 && mix <= 1.0, "mix must lie in [0,1]");
  const double c = trans_rate, e = mix, s2 = sigma * sigma;
  CostedLimit out;
  out.exact.drift = mu + e * (c - 1.0) * (mu + 0.5 * c * s2);
  out.exact.vol = std::sqrt(s2 * (1.0 + (c * c - 1.0) * e));
  out.exact.spot = spot;
  out.simplified.drift = mu + 0.5 * s2 * c * (c - 1.0) * e;
  out.simplified.vol = std::sqrt(s2 * (1.0 + (c - 1.0) * e));
  out.simplified.spot = spot;
  return out;
}

struct CostedView {
  AgentView base;
  double trans_rate = 1.0;
  double mix = 0.0;
  double eff_drift = 0.0;
  double eff_vol = 0.0;
  GBMParams simplified;

  static CostedView make(const AgentView& base, double trans_rate, double mix) {
    base.validate();
    require(trans_rate > 1.0, "transaction rate must be > 1");
    require(mix > 0.0 && mix < 1.0, "mix must lie in (0,1)");
    const auto lim = costed_gbm_limit(base.drift, base.vol, trans_rate, mix);
    return {base, trans_rate, mix, lim.exact.drift, lim.exact.vol, lim.simplified};
  }
};

inline GBMParams costed_gbm_limit(const CostedView& view) {
  return costed_gbm_limit(view.base.drift, view.base.vol, view.trans_rate, view.mix).exact;
}

/// One step of the four-branch tree, branches ordered
/// (cost-up, up, down, cost-down).
struct QuadrinomialStep {
  std::array<double, 4> probs{};
  std::array<double, 4> factors{};
  double dt = 0.0;
};

inline QuadrinomialStep quadrinomial_step(double mu, double sigma, double trans_rate, double mix,
                                          double dt) {
  require(dt > 0.0, "dt must be > 0");
  require(sigma > 0.0, "sigma must be > 0");
  require(trans_rate >= 1.0, "transaction rate must be >= 1");
  require(mix >= 0.0 && mix <= 1.0, "mix must lie in [0,1]");
  const double sq = std::sqrt(dt);
  const double p = 0.5 + (mu - 0.5 * sigma * sigma) / (2.0 * sigma) * sq;
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::StepTooCoarse, "up probability " + std::to_string(p) + " outside (0,1)");
  const double cs = trans_rate * sigma;
  QuadrinomialStep q;
  q.dt = dt;
  q.probs = {mix * p, (1.0 - mix) * p, (1.0 - mix) * (1.0 - p), mix * (1.0 - p)};
  q.factors = {1.0 + cs * sq + 0.5 * cs * cs * dt, 1.0 + sigma * sq + 0.5 * sigma * sigma * dt,
               1.0 - sigma * sq + 0.5 * sigma * sigma * dt, 1.0 - cs * sq + 0.5 * cs * cs * dt};
  for (double f : q.factors)
    if (!(f > 0.0)) fail(ErrorCode::StepTooCoarse, "branch factor <= 0");
  return q;
}

inline QuadrinomialStep quadrinomial_step(const CostedView& view, double dt) {
  return quadrinomial_step(view.base.drift, view.base.vol, view.trans_rate, view.mix, dt);
}

/// Mean and variance of the one-step gross return.
struct StepMoments {
  double mean = 0.0;
  double variance = 0.0;
};

inline StepMoments exact_step_moments(const TreeStepParams& s) {
  const double mean = s.p_up * s.up_factor + (1.0 - s.p_up) * s.down_factor;
  const double spread = s.up_factor - s.down_factor;
  return {mean, s.p_up * (1.0 - s.p_up) * spread * spread};
}

inline StepMoments exact_step_moments(const QuadrinomialStep& q) {
  double mean = 0.0;
  for (std::size_t i = 0; i < 4; ++i) mean += q.probs[i] * q.factors[i];
  double var = 0.0;
  for (std::size_t i = 0; i < 4; ++i) var += q.probs[i] * (q.factors[i] - mean) * (q.factors[i] - mean);
  return {mean, var};
}

// ---------------------------------------------------------------------------
// Simulation and limits
// ---------------------------------------------------------------------------

struct SimBudget {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: default cap
};

namespace detail {
inline double draw_factor(const TreeStepParams& s, PathStream& rng) {
  return rng.uniform() < s.p_up ? s.up_factor : s.down_factor;
}

inline double draw_factor(const QuadrinomialStep& q, PathStream& rng) {
  const double u = rng.uniform();
  double acc = q.probs[0];
  if (u < acc) return q.factors[0];
  acc += q.probs[1];
  if (u < acc) return q.factors[1];
  acc += q.probs[2];
  if (u < acc) return q.factors[2];
  return q.factors[3];
}

template <class Step>
std::vector<double> simulate_terminal_impl(const Step& step, double spot, std::size_t steps,
                                           const SimBudget& budget) {
  require(steps >= 1, "steps must be >= 1");
  require(budget.n_paths >= 1, "n_paths must be >= 1");
  std::vector<double> out(budget.n_paths);
  parallel_blocks(budget.n_paths, budget.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      PathStream rng(budget.seed, i);
      double x = spot;
      for (std::size_t k = 0; k < steps; ++k) x *= draw_factor(step, rng);
      out[i] = x;
    }
  });
  return out;
}
}  // namespace detail

/// Terminal prices after `steps` i.i.d. multiplicative steps. Path i uses
/// substream (seed, i), so the sample is independent of the worker count.
inline std::vector<double> simulate_terminal(const TreeStepParams& step, double spot,
                                             std::size_t steps, const SimBudget& budget) {
  return detail::simulate_terminal_impl(step, spot, steps, budget);
}

inline std::vector<double> simulate_terminal(const QuadrinomialStep& step, double spot,
                                             std::size_t steps, const SimBudget& budget) {
  return detail::simulate_terminal_impl(step, spot, steps, budget);
}

/// One-step log-returns of two coordinates moved by a single shared
/// up/down draw. Both trees must agree on the branch probability.
inline std::vector<std::pair<double, double>> joint_step_log_returns(const TreeStepParams& first,
                                                                     const TreeStepParams& second,
                                                                     std::size_t n,
                                                                     std::uint64_t seed) {
  require(std::abs(first.p_up - second.p_up) <= 1e-15,
          "a single risk factor needs a common branch probability");
  std::vector<std::pair<double, double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    PathStream rng(seed, i);
    const bool up = rng.uniform() < first.p_up;
    out[i] = {std::log(up ? first.up_factor : first.down_factor),
              std::log(up ? second.up_factor : second.down_factor)};
  }
  return out;
}

/// Mean and variance of the lognormal terminal law.
inline StepMoments gbm_terminal_moments(const GBMParams& g, double horizon) {
  require(horizon >= 0.0, "horizon must be >= 0");
  require(g.vol > 0.0 && g.spot > 0.0, "GBM needs vol > 0 and spot > 0");
  const double mean = g.spot * std::exp(g.drift * horizon);
  return {mean, mean * mean * std::expm1(g.vol * g.vol * horizon)};
}

}  // namespace arbcost
