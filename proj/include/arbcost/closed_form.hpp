#pragma once

#include <algorithm>
#include <cmath>

#include "arbcost/error.hpp"
#include "arbcost/math.hpp"
#include "arbcost/rates.hpp"
#include "arbcost/result.hpp"

namespace arbcost {

enum class OptionKind { call, put };

struct VanillaSpec {
  double spot = 100.0;
  double strike = 100.0;
  double maturity = 1.0;
  double rate = 0.0;
  double vol = 0.2;
  OptionKind kind = OptionKind::call;

  void validate() const {
    require(spot > 0.0 && strike > 0.0, "spot and strike must be > 0");
    require(maturity >= 0.0, "maturity must be >= 0");
    require(vol > 0.0, "vol must be > 0");
    require(std::isfinite(rate), "rate must be finite");
  }
};

inline double intrinsic(const VanillaSpec& s, double spot) {
  return s.kind == OptionKind::call ? std::max(spot - s.strike, 0.0) : std::max(s.strike - spot, 0.0);
}

/// Value and spot delta of a European option on an asset with cost of carry b
/// (b = r is plain Black–Scholes).
struct CarryQuote {
  double value = 0.0;
  double delta = 0.0;
};

inline CarryQuote carry_quote(const VanillaSpec& s, double carry) {
  s.validate();
  const double t = s.maturity;
  const double disc = std::exp(-s.rate * t);
  const double fwd = s.spot * std::exp(carry * t);
  const double sd = s.vol * std::sqrt(t);
  const bool call = s.kind == OptionKind::call;
  // Degenerate variance: the forward is known, so the value is the discounted
  // intrinsic on the forward.
  if (sd < 1e-12) {
    const double pay = call ? std::max(fwd - s.strike, 0.0) : std::max(s.strike - fwd, 0.0);
    double delta = 0.0;
    if (call && fwd > s.strike) delta = disc * std::exp(carry * t);
    if (!call && fwd < s.strike) delta = -disc * std::exp(carry * t);
    return {disc * pay, delta};
  }
  const double d1 = (std::log(fwd / s.strike) + 0.5 * sd * sd) / sd;
  const double d2 = d1 - sd;
  const double growth = std::exp((carry - s.rate) * t);
  if (call) return {disc * (fwd * normal_cdf(d1) - s.strike * normal_cdf(d2)), growth * normal_cdf(d1)};
  return {disc * (s.strike * normal_cdf(-d2) - fwd * normal_cdf(-d1)), -growth * normal_cdf(-d1)};
}

inline double bs_price(const VanillaSpec& s) { return carry_quote(s, s.rate).value; }
inline double bs_delta(const VanillaSpec& s) { return carry_quote(s, s.rate).delta; }

/// Black–Scholes at the arb-cost rate r* = (√μ₁ + √μ₂)². `spec.rate` is
/// ignored.
inline PricingResult hetero_bs_price(double mu1, double mu2, VanillaSpec spec) {
  const RateResult rr = arb_cost_lambdas(mu1, mu2);
  spec.rate = rr.rate;
  const CarryQuote q = carry_quote(spec, spec.rate);
  PricingResult out;
  out.price = q.value;
  out.method = "closed_form_hetero";
  out.implied_rate = rr.rate;
  out.diagnostics["r_star"] = rr.rate;
  out.diagnostics["lambda1"] = rr.lambdas->first;
  out.diagnostics["lambda2"] = rr.lambdas->second;
  out.diagnostics["delta"] = q.delta;
  return out;
}

/// Generalized Black–Scholes with carry b = μ₁ − μ₂ + r, the solution of
/// f_t + (μ₁ − μ₂ + r)x f_x + ½σ²x² f_xx − r f = 0.
inline double drift_shifted_price(double mu1, double mu2, double r, VanillaSpec spec) {
  spec.rate = r;
  return carry_quote(spec, mu1 - mu2 + r).value;
}

inline double drift_shifted_delta(double mu1, double mu2, double r, VanillaSpec spec) {
  spec.rate = r;
  return carry_quote(spec, mu1 - mu2 + r).delta;
}

}  // namespace arbcost
