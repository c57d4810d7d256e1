// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "arbcost/arbcost.hpp"

using namespace arbcost;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... xs) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, xs...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += fmt(" [over budget %.0f s]", budget_s);
  }
  if (!o.pass) ++failures;
  std::printf("%s #%d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

double slope(const std::vector<double>& h, const std::vector<double>& e) {
  std::vector<double> a(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) a[i] = std::abs(e[i]);
  return empirical_order(h, a);
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return "<popen failed>";
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), n);
  const int rc = pclose(f);
  if (rc != 0) out += "<exit " + std::to_string(rc) + ">";
  return out;
}

}  // namespace

int main() {
  criterion(1, "rate identities", 1.0, [] {
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> mu(-0.1, 0.2), sig(0.05, 0.5), cc(0.0, 0.5), pos(0.001, 0.3);
    double worst_adj = 0.0, worst_lam = 0.0;
    for (int n = 0; n < 1000;) {
      const LatticeMarket m{mu(g), sig(g), mu(g), sig(g), cc(g)};
      if (std::abs(m.sigma + m.cost_const * m.mu - m.v - m.cost_const * m.m) < 1e-3) continue;
      const AdjustedParams a = adjusted_params(m);
      worst_adj = std::max(worst_adj, std::abs((a.mu_star - a.r_star) / a.sigma_star - (a.m_star - a.r_star) / a.v_star));
      ++n;
    }
    for (int n = 0; n < 1000;) {
      const double m1 = pos(g), m2 = pos(g);
      if (std::abs(m1 - m2) < 1e-6) continue;
      const RateResult r = arb_cost_lambdas(m1, m2);
      worst_lam = std::max(worst_lam, std::abs(rate_from_lambdas(m1, m2, r.lambdas->first, r.lambdas->second) - r.rate));
      ++n;
    }
    return Outcome{worst_adj < 1e-12 && worst_lam < 1e-12,
                   fmt("price-of-risk residual %.2e, lambda->rate residual %.2e", worst_adj, worst_lam)};
  });

  criterion(2, "tree to GBM", 60.0, [] {
    const double mu = 0.05, sigma = 0.2, T = 1.0;
    const std::size_t paths = 100000;
    const StepMoments ref = gbm_terminal_moments({mu, sigma, 1.0}, T);
    const auto xs = simulate_terminal(moment_match_step(mu, sigma, T / 1000), 1.0, 1000, {paths, 77, 0});
    const SampleStats s = sample_stats(xs);
    double m4 = 0.0;
    for (double x : xs) m4 += std::pow(x - s.mean, 4);
    m4 /= static_cast<double>(paths);
    const double se_mean = std::sqrt(s.variance / paths);
    const double se_var = std::sqrt((m4 - s.variance * s.variance) / paths);
    const double zm = (s.mean - ref.mean) / se_mean, zv = (s.variance - ref.variance) / se_var;
    std::vector<double> ks;
    for (std::size_t n : {50u, 200u, 800u}) {
      const auto ys = simulate_terminal(moment_match_step(mu, sigma, T / n), 1.0, n, {paths, 78, 0});
      std::vector<double> logs(ys.size());
      for (std::size_t i = 0; i < ys.size(); ++i) logs[i] = std::log(ys[i]);
      ks.push_back(ks_distance_normal(logs, (mu - 0.5 * sigma * sigma) * T, sigma * std::sqrt(T)));
    }
    const bool ok = std::abs(zm) < 3 && std::abs(zv) < 3 && ks[0] > ks[1] && ks[1] > ks[2];
    return Outcome{ok, fmt("mean z=%.2f, variance z=%.2f, KS %.4f > %.4f > %.4f", zm, zv, ks[0], ks[1], ks[2])};
  });

  criterion(3, "quadrinomial moments", 1.0, [] {
    const double mu = 0.05, sigma = 0.2, c = 2.0, eps = 0.5;
    const CostedLimit lim = costed_gbm_limit(mu, sigma, c, eps);
    std::vector<double> h, var_res, simp_var;
    double worst_mean = 0.0, simp_mean = 0.0;
    for (double dt : {0.01, 0.005, 0.0025, 0.00125}) {
      const StepMoments mo = exact_step_moments(quadrinomial_step(mu, sigma, c, eps, dt));
      h.push_back(dt);
      worst_mean = std::max(worst_mean, std::abs(mo.mean - 1.0 - lim.exact.drift * dt) / dt);
      var_res.push_back(mo.variance - lim.exact.vol * lim.exact.vol * dt);
      simp_mean = std::abs(mo.mean - 1.0 - lim.simplified.drift * dt) / dt;
      simp_var.push_back(mo.variance - lim.simplified.vol * lim.simplified.vol * dt);
    }
    const double order = slope(h, var_res);
    std::printf("     shorter closed form: drift %.6f vs exact %.6f, vol %.6f vs exact %.6f\n",
                lim.simplified.drift, lim.exact.drift, lim.simplified.vol, lim.exact.vol);
    std::printf("     shorter closed form: mean residual/dt %.3e, variance residual order %.2f\n", simp_mean,
                slope(h, simp_var));
    return Outcome{worst_mean < 1e-12 && order >= 1.8,
                   fmt("mean residual/dt %.1e, variance residual order %.2f", worst_mean, order)};
  });

  criterion(4, "lattice vs Black-Scholes", 30.0, [] {
    const LatticeMarket m{0.05, 0.2, 0.03, 0.1, 0.0};
    const double r = adjusted_params(m).r_star;
    const double ref = bs_price({100.0, 100.0, 1.0, r, 0.2, OptionKind::call});
    auto err = [&](std::size_t n) {
      LatticeClaim c{[](double s, double) { return std::max(s - 100.0, 0.0); }, 1.0, n};
      return price_lattice(m, c).price - ref;
    };
    const double e1 = err(1000), e2 = err(2000);
    const bool ok = std::abs(r - 0.01) < 1e-12 && std::abs(e2) < 5e-3 && std::abs(e1) >= 1.8 * std::abs(e2);
    return Outcome{ok, fmt("r=%.4f, err(1000)=%.3e, err(2000)=%.3e, ratio %.2f", r, e1, e2, std::abs(e1 / e2))};
  });

  criterion(5, "PDE vs closed form", 10.0, [] {
    PDEProblem p;
    p.rate = constant_fn(0.25);
    p.vol = constant_fn(0.2);
    p.payoff = [](double x) { return std::max(x - 100.0, 0.0); };
    const double ref = hetero_bs_price(0.04, 0.09, {100.0, 100.0, 1.0, 0.0, 0.2, OptionKind::call}).price;
    std::vector<double> h, res;
    double rel = 0.0;
    for (std::size_t n : {100u, 200u, 400u}) {
      GridSpec g;
      g.space_intervals = g.time_steps = n;
      const GridSolution s = solve_pde(p, g);
      h.push_back(s.log_step());
      res.push_back(pde_residual(s, p, {0.1, 70.0, 140.0}));
      if (n == 400) rel = std::abs(value_at(s, 100.0) - ref) / ref;
    }
    const double order = slope(h, res);
    return Outcome{rel < 1e-4 && order >= 1.8, fmt("relative error %.2e, residual order %.2f", rel, order)};
  });

  criterion(6, "Feynman-Kac", 60.0, [] {
    FKProblem p;
    p.lambda_fn = constant_fn(0.05);
    p.rho_fn = constant_fn(0.2);
    p.payoff = [](double x) { return std::max(x - 100.0, 0.0); };
    const MCResult c = fk_price(p, {1000000, 1, 2718, 0, false});
    const double ref = bs_price({100.0, 100.0, 1.0, 0.05, 0.2, OptionKind::call});
    const double z = (c.estimate - ref) / c.std_error;
    p.payoff = [](double) { return 0.0; };
    p.source_fn = constant_fn(2.0);
    const MCResult a = fk_price(p, {10000, 200, 31, 0, false});
    const double ann = 2.0 * -std::expm1(-0.05) / 0.05;
    const double rel = std::abs(a.estimate - ann) / ann;
    return Outcome{std::abs(z) < 3 && rel < 1e-3,
                   fmt("call %.5f vs %.5f (z=%.2f), annuity rel error %.1e", c.estimate, ref, z, rel)};
  });

  criterion(7, "MC vs PDE, state-dependent gamma cost", 120.0, [] {
    PDEProblem p;
    p.rate = constant_fn(0.05);
    p.vol = constant_fn(0.2);
    p.payoff = [](double x) { return std::max(x - 100.0, 0.0); };
    p.costs.gamma_cost = [](double, double x) { return x > 100.0 ? 2.0 : 0.0; };
    GridSpec g;
    g.space_intervals = g.time_steps = 1600;
    const FKComparison c = fk_vs_pde(p, g, {200000, 100, 4242, 0, false});
    const double z = (c.mc.estimate - c.pde_value) / c.mc.std_error;
    return Outcome{c.agree, fmt("MC %.5f +- %.5f, PDE %.5f (z=%.2f)", c.mc.estimate, c.mc.std_error, c.pde_value, z)};
  });

  criterion(8, "arbitrage certificate", 60.0, [] {
    PathBudget b;
    b.steps = 10000;
    b.n_paths = 3000;
    b.seed = 8;
    b.keep_paths = true;
    const PnLStats fine = simulate_pair_arbitrage(0.03, 0.07, 0.2, b);
    bool every = true;
    for (double x : fine.per_path) every = every && x > 0.0 && std::abs(x - 0.04) <= 5e-3;
    b.steps = 5000;
    b.seed = 9;
    b.keep_paths = false;
    const PnLStats coarse = simulate_pair_arbitrage(0.03, 0.07, 0.2, b);
    const double ratio = coarse.variance / fine.variance;
    const bool ok = every && fine.variance < 1e-5 && ratio >= 1.8;
    return Outcome{ok, fmt("P&L in [%.5f, %.5f], mean %.6f, variance %.2e, ratio %.2f", fine.min, fine.max, fine.mean,
                           fine.variance, ratio)};
  });

  criterion(9, "cost neutralization", 120.0, [] {
    const VanillaSpec atm{100.0, 100.0, 1.0, 0.0, 0.2, OptionKind::call};
    PathBudget b;
    b.n_paths = 100000;
    b.seed = 90;
    b.steps = 500;
    const HedgeStats h500 = simulate_costed_hedge(0.04, 0.09, 0.2, atm, b);
    b.steps = 2000;
    b.seed = 91;
    const HedgeStats h2000 = simulate_costed_hedge(0.04, 0.09, 0.2, atm, b);
    const double ratio = std::abs(h500.mean_error / h2000.mean_error);
    CostedHedgeOptions classic;
    classic.lambda_override = 1.0;
    std::vector<double> h, sd;
    b.n_paths = 20000;
    for (std::size_t n : {100u, 200u, 400u, 800u}) {
      b.steps = n;
      b.seed = 92 + n;
      h.push_back(1.0 / static_cast<double>(n));
      sd.push_back(simulate_costed_hedge(0.04, 0.09, 0.2, atm, b, classic).error_std);
    }
    const double expo = slope(h, sd);
    const double audit = std::max(h500.max_audit, h2000.max_audit);
    const bool ok = ratio >= 1.5 && std::abs(expo - 0.5) <= 0.15;
    return Outcome{ok, fmt("mean error %.2e (500) -> %.2e (2000), ratio %.2f; classic exponent %.3f; audit %.1e",
                           h500.mean_error, h2000.mean_error, ratio, expo, audit)};
  });

  criterion(10, "allocation", 120.0, [] {
    std::mt19937_64 g(10);
    std::uniform_real_distribution<double> cy(-0.05, 0.05), s(0.05, 0.6);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double c1 = cy(g), c2 = cy(g), sg = s(g);
      for (double r : solve_allocation_costed(c1, c2, sg).roots)
        worst = std::max(worst, std::abs(allocation_costed_residual(r, c1, c2, sg)));
    }
    const CostedView a = CostedView::make(AgentView::simple(0.04, 0.2), 1.5, 0.3);
    const CostedView v = CostedView::make(AgentView::simple(0.09, 0.2), 2.0, 0.5);
    const RateResult rr = costed_rate_and_yields(a, v);
    const AllocationSolution sol = solve_allocation_costed(rr.yields->first, rr.yields->second, 0.2);
    PathBudget b;
    b.steps = 4000;
    b.n_paths = 2000;
    b.seed = 100;
    bool ok = worst < 1e-10 && !sol.roots.empty();
    std::string detail = fmt("substitution residual %.1e", worst);
    for (double r : sol.roots) {
      const double at = std::abs(verify_allocation(a, v, {r, 1.0 - r}, b).error.mean);
      const double off = std::abs(verify_allocation(a, v, {r + 0.1, 0.9 - r}, b).error.mean);
      ok = ok && at <= 0.5 * off;
      detail += fmt("; root %.4f: |mean error| %.3e vs perturbed %.3e", r, at, off);
    }
    return Outcome{ok, detail};
  });

  criterion(11, "determinism across runs and threads", 120.0, [] {
    const std::string bin = ARBCOST_CLI;
    const std::vector<std::string> cmds = {
        "mc-price --paths 20000 --steps 20 --seed 5",
        "arb-demo --paths 500 --steps 2000 --seed 5",
        "hedge-demo --paths 2000 --steps 100 --seed 5",
        "hedge-demo --mode allocation --paths 2000 --steps 100 --seed 5",
        "xcheck --paths 20000 --seed 5",
        "converge --study tree --paths 5000 --start 50 --stop 200 --seed 5",
        "arb-demo --paths 50 --steps 100 --seed 5 --format csv",
    };
    int same = 0;
    std::string bad;
    for (const auto& c : cmds) {
      const std::string a = capture(bin + " --threads 1 " + c);
      const std::string b = capture(bin + " --threads 3 " + c);
      const std::string d = capture("ARBCOST_THREADS=2 " + bin + " " + c);
      const std::string e = capture(bin + " --threads 1 " + c);
      if (a == b && a == d && a == e && a.find("<exit") == std::string::npos && !a.empty()) ++same;
      else bad += " [" + c + "]";
    }
    return Outcome{same == static_cast<int>(cmds.size()),
                   fmt("%d/%zu stochastic invocations byte-identical", same, cmds.size()) + bad};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
