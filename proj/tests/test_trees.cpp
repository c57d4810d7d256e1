#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "arbcost/trees.hpp"
#include "oracles.hpp"

using namespace arbcost;

namespace {

// Four-branch tree moments written out independently of the library.
struct QuadOracle {
  long double mean, var;
};
QuadOracle quad_moments(long double mu, long double s, long double c, long double e, long double dt) {
  const long double sq = std::sqrt(dt);
  const long double p = 0.5L + (mu - 0.5L * s * s) / (2.0L * s) * sq;
  const long double pr[4] = {e * p, (1 - e) * p, (1 - e) * (1 - p), e * (1 - p)};
  const long double f[4] = {1 + c * s * sq + 0.5L * c * c * s * s * dt, 1 + s * sq + 0.5L * s * s * dt,
                            1 - s * sq + 0.5L * s * s * dt, 1 - c * s * sq + 0.5L * c * c * s * s * dt};
  long double m = 0, m2 = 0;
  for (int i = 0; i < 4; ++i) {
    m += pr[i] * f[i];
    m2 += pr[i] * f[i] * f[i];
  }
  return {m, m2 - m * m};
}

}  // namespace

TEST(StepParams, CostedSymmetricTilt) {
  const auto s = step_params(AgentView::simple(0.05, 0.2), 0.01, StepVariant::costed_symmetric);
  EXPECT_NEAR(s.p_up, 0.5075, 1e-15);
  const auto z = step_params(AgentView::simple(0.02, 0.2), 0.01, StepVariant::costed_symmetric);
  EXPECT_NEAR(z.p_up, 0.5, 1e-15);
}

TEST(StepParams, CoarseStepIsAnError) {
  try {
    step_params(AgentView::simple(0.05, 0.2), 100.0, StepVariant::costed_symmetric);
    FAIL() << "expected StepTooCoarse";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooCoarse);
  }
  EXPECT_THROW(moment_match_step(0.05, 0.2, 100.0), Error);
}

TEST(StepParams, ExtendedView) {
  const AgentView a = AgentView::extended(0.4, 0.1, 0.08, 0.02, 0.25);
  EXPECT_NEAR(a.drift, 0.4 * 0.08 + 0.6 * 0.02, 1e-15);
  const double dt = 0.01;
  const auto s = step_params(a, dt);
  EXPECT_NEAR(s.p_up, 0.4 + 0.1 * 0.1, 1e-15);
  // The √((1−p)/p) spreads make the one-step variance exactly σ²dt at zero drift.
  const AgentView flat = AgentView::extended(0.3, 0.0, 0.0, 0.0, 0.25);
  const auto sf = step_params(flat, dt);
  EXPECT_NEAR(exact_step_moments(sf).variance, 0.25 * 0.25 * dt, 1e-15);
  EXPECT_NEAR(exact_step_moments(sf).mean, 1.0, 1e-15);
}

TEST(AgentView, RejectsBadInputs) {
  EXPECT_THROW(AgentView::simple(0.05, 0.0), Error);
  EXPECT_THROW(AgentView::extended(1.0, 0.0, 0.0, 0.0, 0.2), Error);
  EXPECT_THROW(AgentView::simple(NAN, 0.2), Error);
}

TEST(MomentMatch, ZeroDriftMean) {
  const auto s = moment_match_step(0.0, 0.2, 0.01);
  EXPECT_NEAR(s.up_factor * s.p_up + s.down_factor * (1 - s.p_up) - 1.0, 0.0, 1e-6);
}

TEST(MomentMatch, SecondMoment) {
  const auto s = moment_match_step(0.05, 0.2, 0.01);
  const double m2 = s.up_factor * s.up_factor * s.p_up + s.down_factor * s.down_factor * (1 - s.p_up);
  EXPECT_LT(std::abs(m2 - 1.0 - (2 * 0.05 + 0.04) * 0.01), 1e-5);
}

TEST(MomentMatch, ResidualsShrinkOnHalving) {
  // Residuals against the exact lognormal one-step moments.
  const double mu = 0.05, sigma = 0.2;
  std::vector<double> r1, r2;
  for (double dt : {0.01, 0.005, 0.0025}) {
    const auto s = moment_match_step(mu, sigma, dt);
    const double m1 = s.up_factor * s.p_up + s.down_factor * (1 - s.p_up);
    const double m2 = s.up_factor * s.up_factor * s.p_up + s.down_factor * s.down_factor * (1 - s.p_up);
    r1.push_back(std::abs(m1 - std::exp(mu * dt)));
    r2.push_back(std::abs(m2 - std::exp((2 * mu + sigma * sigma) * dt)));
  }
  for (int i = 0; i < 2; ++i) {
    EXPECT_GE(r1[i] / r1[i + 1], 2.5);
    EXPECT_GE(r2[i] / r2[i + 1], 2.5);
  }
}

TEST(CostedLimit, IdentityAtUnitRateAndZeroMix) {
  for (double eps : {0.0, 0.3, 1.0}) {
    const auto l = costed_gbm_limit(0.05, 0.2, 1.0, eps);
    EXPECT_DOUBLE_EQ(l.exact.drift, 0.05);
    EXPECT_DOUBLE_EQ(l.exact.vol, 0.2);
  }
  const auto z = costed_gbm_limit(0.05, 0.2, 3.0, 0.0);
  EXPECT_DOUBLE_EQ(z.exact.drift, 0.05);
  EXPECT_DOUBLE_EQ(z.exact.vol, 0.2);
}

TEST(CostedLimit, ContinuousNearIdentity) {
  const auto a = costed_gbm_limit(0.05, 0.2, 1.0 + 1e-9, 0.4);
  const auto b = costed_gbm_limit(0.05, 0.2, 2.0, 1e-9);
  EXPECT_NEAR(a.exact.drift, 0.05, 1e-9);
  EXPECT_NEAR(a.exact.vol, 0.2, 1e-9);
  EXPECT_NEAR(b.exact.drift, 0.05, 1e-9);
  EXPECT_NEAR(b.exact.vol, 0.2, 1e-9);
}

TEST(CostedLimit, MatchesExactMomentOracle) {
  const double mu = 0.05, s = 0.2, c = 2.0, e = 0.5;
  // Richardson-extrapolated drift and variance rate of the four-branch tree.
  const long double dt = 1e-4L;
  const QuadOracle a = quad_moments(mu, s, c, e, dt), b = quad_moments(mu, s, c, e, dt / 2);
  const double drift = static_cast<double>((a.mean - 1) / dt);
  const double var_rate = static_cast<double>(2 * (b.var / (dt / 2)) - a.var / dt);
  const auto lim = costed_gbm_limit(mu, s, c, e);
  EXPECT_NEAR(lim.exact.drift, drift, 1e-9);
  EXPECT_NEAR(lim.exact.vol * lim.exact.vol, var_rate, 1e-9);
  EXPECT_NEAR(var_rate, 0.10, 1e-9);
  // The shorter closed form disagrees with the tree.
  EXPECT_GT(std::abs(lim.simplified.vol * lim.simplified.vol - var_rate), 0.03);
  EXPECT_GT(std::abs(lim.simplified.drift - drift), 0.01);
}

TEST(CostedView, CarriesLimit) {
  const CostedView v = CostedView::make(AgentView::simple(0.05, 0.2), 2.0, 0.5);
  const GBMParams g = costed_gbm_limit(v);
  EXPECT_DOUBLE_EQ(g.drift, v.eff_drift);
  EXPECT_DOUBLE_EQ(g.vol, v.eff_vol);
  EXPECT_THROW(CostedView::make(AgentView::simple(0.05, 0.2), 0.5, 0.5), Error);
  EXPECT_THROW(CostedView::make(AgentView::simple(0.05, 0.2), 2.0, 1.5), Error);
}

TEST(Quadrinomial, ProbabilitiesSumToOne) {
  for (double e : {0.0, 0.1, 0.5, 0.9, 1.0})
    for (double mu : {-0.1, 0.0, 0.05, 0.3}) {
      const auto q = quadrinomial_step(mu, 0.2, 2.0, e, 0.01);
      EXPECT_NEAR(q.probs[0] + q.probs[1] + q.probs[2] + q.probs[3], 1.0, 4e-16);
    }
}

TEST(Quadrinomial, MomentsMatchLimitToSecondOrder) {
  const double mu = 0.05, s = 0.2, c = 2.0, e = 0.5;
  const auto lim = costed_gbm_limit(mu, s, c, e);
  std::vector<double> hs, errs;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
    const auto m = exact_step_moments(quadrinomial_step(mu, s, c, e, dt));
    const QuadOracle o = quad_moments(mu, s, c, e, dt);
    EXPECT_NEAR(m.mean, static_cast<double>(o.mean), 1e-15);
    EXPECT_NEAR(m.variance, static_cast<double>(o.var), 1e-15);
    EXPECT_NEAR(m.mean - 1.0, lim.exact.drift * dt, 1e-15);
    hs.push_back(dt);
    errs.push_back(m.variance - lim.exact.vol * lim.exact.vol * dt);
  }
  EXPECT_GE(oracle::fitted_order(hs, errs), 1.8);
}

TEST(Simulate, DegenerateFactors) {
  const TreeStepParams flat{0.3, 1.0, 1.0, 0.01};
  const auto xs = simulate_terminal(flat, 42.0, 50, {1000, 1, 0});
  for (double x : xs) EXPECT_EQ(x, 42.0);
}

TEST(Simulate, MeanMatchesLognormal) {
  const auto st = moment_match_step(0.05, 0.2, 1.0 / 1000);
  const auto xs = simulate_terminal(st, 100.0, 1000, {100000, 11, 0});
  const auto m = oracle::moments(xs);
  const double se = std::sqrt(m.variance / xs.size());
  EXPECT_LT(std::abs(m.mean - 100.0 * std::exp(0.05)), 3 * se);
}

TEST(Simulate, DeterministicAcrossThreads) {
  const auto q = quadrinomial_step(0.05, 0.2, 2.0, 0.3, 0.01);
  const auto a = simulate_terminal(q, 1.0, 100, {5000, 99, 1});
  const auto b = simulate_terminal(q, 1.0, 100, {5000, 99, 4});
  const auto c = simulate_terminal(q, 1.0, 100, {5000, 99, 3});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  const auto d = simulate_terminal(q, 1.0, 100, {5000, 100, 1});
  EXPECT_NE(a, d);
}

TEST(GbmMoments, Examples) {
  const auto z = gbm_terminal_moments({0.05, 0.2, 100.0}, 0.0);
  EXPECT_EQ(z.mean, 100.0);
  EXPECT_EQ(z.variance, 0.0);
  const auto a = gbm_terminal_moments({0.0, 0.2, 1.0}, 1.0);
  EXPECT_DOUBLE_EQ(a.mean, 1.0);
  EXPECT_NEAR(a.variance, std::exp(0.04) - 1.0, 1e-15);
  EXPECT_NEAR(gbm_terminal_moments({0.05, 0.2, 100.0}, 1.0).mean, 105.127, 1e-3);
}

TEST(JointTree, SharedRiskFactor) {
  const auto a = step_params(AgentView::simple(0.05, 0.2), 0.01, StepVariant::costed_symmetric);
  TreeStepParams b = a;
  b.up_factor = 1.0 + 0.1 * 0.1;
  b.down_factor = 1.0 - 0.1 * 0.1;
  const auto r = joint_step_log_returns(a, b, 20000, 5);
  std::vector<double> x, y;
  for (auto [u, v] : r) {
    x.push_back(u);
    y.push_back(v);
  }
  const auto mx = oracle::moments(x), my = oracle::moments(y);
  double cov = 0;
  for (std::size_t i = 0; i < x.size(); ++i) cov += (x[i] - mx.mean) * (y[i] - my.mean);
  cov /= x.size() - 1;
  EXPECT_NEAR(cov / std::sqrt(mx.variance * my.variance), 1.0, 1e-12);
}
