// arbcost: batch front end. Reads flags and/or a JSON scenario, runs one
// module operation and writes JSON (or CSV for tabular output) to stdout.
//
// Exit codes: 0 ok, 1 xcheck disagreement, 2 usage, 3 validation, 4 module error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arbcost/arbcost.hpp"
#include "arbcost/io.hpp"

namespace {

using namespace arbcost;
using io::json;

constexpr const char* kSchemaVersion = "1.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string dashed(std::string s) {
  for (auto& c : s)
    if (c == '_') c = '-';
  return s;
}

/// Named parameters of one subcommand. Values come from defaults, then the
/// scenario file, then explicitly given flags.
class Params {
 public:
  struct Num {
    double value;
    bool integer;
    CLI::Option* opt = nullptr;
    double flag_value = 0.0;
  };
  struct Str {
    std::string value;
    std::vector<std::string> choices;
    CLI::Option* opt = nullptr;
    std::string flag_value;
  };
  struct Flag {
    bool value = false;
    CLI::Option* opt = nullptr;
    bool flag_value = false;
  };

  explicit Params(CLI::App* app) : app_(app) {}

  void num(const std::string& name, double def, const std::string& help) {
    auto& n = nums_[name] = Num{def, false, nullptr, 0.0};
    n.opt = app_->add_option("--" + dashed(name), n.flag_value, help + " [" + io::format_double(def) + "]");
  }
  void count(const std::string& name, double def, const std::string& help) {
    auto& n = nums_[name] = Num{def, true, nullptr, 0.0};
    n.opt = app_->add_option("--" + dashed(name), n.flag_value, help + " [" + io::format_double(def) + "]");
  }
  void str(const std::string& name, const std::string& def, std::vector<std::string> choices,
           const std::string& help) {
    auto& s = strs_[name] = Str{def, choices, nullptr, {}};
    s.opt = app_->add_option("--" + dashed(name), s.flag_value, help + " [" + def + "]")
                ->check(CLI::IsMember(choices));
  }
  void flag(const std::string& name, const std::string& help) {
    auto& f = flags_[name];
    f.opt = app_->add_flag("--" + dashed(name), f.flag_value, help);
  }

  /// Scenario "params" block; unknown keys are rejected.
  void load(const json& block) {
    if (!block.is_object()) throw ValidationError("scenario params must be an object");
    for (auto it = block.begin(); it != block.end(); ++it) {
      const std::string& key = it.key();
      if (key == "seed") {
        if (!it->is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
        seed_ = it->get<std::uint64_t>();
      } else if (auto n = nums_.find(key); n != nums_.end()) {
        if (!it->is_number()) throw ValidationError("parameter '" + key + "' must be a number");
        n->second.value = it->get<double>();
      } else if (auto s = strs_.find(key); s != strs_.end()) {
        if (!it->is_string()) throw ValidationError("parameter '" + key + "' must be a string");
        s->second.value = it->get<std::string>();
      } else if (auto f = flags_.find(key); f != flags_.end()) {
        if (!it->is_boolean()) throw ValidationError("parameter '" + key + "' must be a boolean");
        f->second.value = it->get<bool>();
      } else {
        throw ValidationError("unknown scenario field '" + key + "'");
      }
    }
  }

  /// Applies explicit flags over scenario values and validates.
  void finish() {
    for (auto& [k, n] : nums_)
      if (n.opt->count() > 0) n.value = n.flag_value;
    for (auto& [k, s] : strs_)
      if (s.opt->count() > 0) s.value = s.flag_value;
    for (auto& [k, f] : flags_)
      if (f.opt->count() > 0) f.value = f.flag_value;
    for (auto& [k, n] : nums_) {
      if (!std::isfinite(n.value)) throw ValidationError("parameter '" + k + "' must be finite");
      if (n.integer && (n.value < 1.0 || n.value > 1e9 || n.value != std::floor(n.value)))
        throw ValidationError("parameter '" + k + "' must be a positive integer");
    }
    for (auto& [k, s] : strs_) {
      bool ok = false;
      for (const auto& c : s.choices) ok = ok || c == s.value;
      if (!ok) throw ValidationError("parameter '" + k + "' has invalid value '" + s.value + "'");
    }
  }

  double operator[](const std::string& k) const { return nums_.at(k).value; }
  std::size_t size(const std::string& k) const { return static_cast<std::size_t>(nums_.at(k).value); }
  const std::string& s(const std::string& k) const { return strs_.at(k).value; }
  bool f(const std::string& k) const { return flags_.at(k).value; }

  std::optional<std::uint64_t>& seed() { return seed_; }

 private:
  CLI::App* app_;
  std::map<std::string, Num> nums_;
  std::map<std::string, Str> strs_;
  std::map<std::string, Flag> flags_;
  std::optional<std::uint64_t> seed_;
};

struct Command {
  std::string name;
  CLI::App* app = nullptr;
  std::unique_ptr<Params> params;
  bool stochastic = false;
  bool tabular = false;  // supports --format csv
};

json header(const std::string& command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

void need_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be > 0");
}

OptionKind kind_of(const std::string& k) { return k == "put" ? OptionKind::put : OptionKind::call; }

VanillaSpec vanilla(const Params& p) {
  VanillaSpec v;
  v.spot = p["spot"];
  v.strike = p["strike"];
  v.maturity = p["maturity"];
  v.rate = p["rate"];
  v.vol = p["vol"];
  v.kind = kind_of(p.s("kind"));
  need_positive(v.spot, "spot");
  need_positive(v.strike, "strike");
  need_positive(v.vol, "vol");
  if (v.maturity < 0.0) throw ValidationError("maturity must be >= 0");
  return v;
}

// ---------------------------------------------------------------------------

int run_rates(Params& p, std::ostream& out) {
  json j = header("rates");
  const std::string mode = p.s("mode");
  j["mode"] = mode;
  if (mode == "arb-cost") {
    const RateResult r = arb_cost_lambdas(p["mu1"], p["mu2"]);
    j["r_star"] = r.rate;
    j["lambda1"] = r.lambdas->first;
    j["lambda2"] = r.lambdas->second;
    j["bond_lambda"] = *r.bond_lambda;
    if (p["mu1"] != p["mu2"])
      j["rate_from_lambdas"] = rate_from_lambdas(p["mu1"], p["mu2"], r.lambdas->first, r.lambdas->second);
    if (!r.note.empty()) j["note"] = r.note;
  } else if (mode == "black72") {
    j["rate"] = black72_rate(p["mu1"], p["sigma1"], p["mu2"], p["sigma2"]);
  } else if (mode == "costed") {
    need_positive(p["sigma"], "sigma");
    const CostedView a = CostedView::make(AgentView::simple(p["mu1"], p["sigma"]), p["c1"], p["eps1"]);
    const CostedView b = CostedView::make(AgentView::simple(p["mu2"], p["sigma"]), p["c2"], p["eps2"]);
    const auto src = p.s("moments") == "simplified" ? MomentSource::simplified : MomentSource::exact;
    const RateResult r = costed_rate_and_yields(a, b, src);
    j["moments"] = p.s("moments");
    j["rate"] = r.rate;
    j["yield1"] = r.yields->first;
    j["yield2"] = r.yields->second;
    j["eff_drift"] = json::array({a.eff_drift, b.eff_drift});
    j["eff_vol"] = json::array({a.eff_vol, b.eff_vol});
    j["simplified_drift"] = json::array({a.simplified.drift, b.simplified.drift});
    j["simplified_vol"] = json::array({a.simplified.vol, b.simplified.vol});
  } else {  // adjusted
    LatticeMarket m{p["mu"], p["sigma"], p["m"], p["v"], p["cost_const"], 100.0, 100.0};
    j["adjusted"] = io::to_json(adjusted_params(m));
  }
  io::dump_json(out, j);
  return 0;
}

int run_alloc(Params& p, std::ostream& out) {
  json j = header("alloc");
  const std::string mode = p.s("mode");
  j["mode"] = mode;
  AllocationSolution sol;
  if (mode == "nocost") {
    sol = solve_allocation_nocost(p["sigma1"], p["sigma2"]);
  } else {
    double cy1 = p["cy1"], cy2 = p["cy2"];
    if (mode == "views") {
      const CostedView a = CostedView::make(AgentView::simple(p["mu1"], p["sigma"]), p["c1"], p["eps1"]);
      const CostedView b = CostedView::make(AgentView::simple(p["mu2"], p["sigma"]), p["c2"], p["eps2"]);
      const RateResult r = costed_rate_and_yields(a, b);
      cy1 = r.yields->first;
      cy2 = r.yields->second;
      j["rate"] = r.rate;
    }
    need_positive(p["sigma"], "sigma");
    j["cy1"] = cy1;
    j["cy2"] = cy2;
    sol = solve_allocation_costed(cy1, cy2, p["sigma"]);
  }
  j["solution"] = io::to_json(sol);
  io::dump_json(out, j);
  if (sol.no_real_root) {
    std::cerr << "NoRealRoot: allocation quadratic has negative discriminant\n";
    return 4;
  }
  return 0;
}

LatticeMarket lattice_market(const Params& p) {
  LatticeMarket m{p["mu"], p["sigma"], p["m"], p["v"], p["cost_const"], p["s0"], p["v0"]};
  need_positive(m.sigma, "sigma");
  need_positive(m.v, "v");
  need_positive(m.s0, "s0");
  need_positive(m.v0, "v0");
  if (m.cost_const < 0.0) throw ValidationError("cost_const must be >= 0");
  return m;
}

int run_tree_price(Params& p, std::ostream& out) {
  const LatticeMarket m = lattice_market(p);
  const double k = p["strike"];
  need_positive(k, "strike");
  need_positive(p["maturity"], "maturity");
  const std::string kind = p.s("kind");
  LatticeClaim claim;
  claim.maturity = p["maturity"];
  claim.steps = p.size("steps");
  if (kind == "call") claim.payoff = [k](double s, double) { return std::max(s - k, 0.0); };
  if (kind == "put") claim.payoff = [k](double s, double) { return std::max(k - s, 0.0); };
  if (kind == "digital") claim.payoff = [k](double s, double) { return s > k ? 1.0 : 0.0; };
  if (kind == "forward") claim.payoff = [k](double s, double) { return s - k; };
  const auto mode = p.s("multiplier") == "linearized" ? CostMultiplier::linearized : CostMultiplier::power;
  const PricingResult r = price_lattice(m, claim, mode);
  const double dt = claim.maturity / static_cast<double>(claim.steps);
  json j = header("tree-price");
  j["kind"] = kind;
  j["multiplier"] = p.s("multiplier");
  j["result"] = io::to_json(r);
  const QProbe q = risk_neutral_prob(m, dt, mode);
  j["q_closed_form"] = q.q_closed_form;
  j["q_residual"] = q.residual;
  j["adjusted"] = io::to_json(adjusted_params(m));
  io::dump_json(out, j);
  return 0;
}

PDEProblem pde_problem(const Params& p, const VanillaSpec& v) {
  PDEProblem prob;
  prob.rate = constant_fn(v.rate);
  prob.vol = constant_fn(v.vol);
  const double gam = p["gamma_cost"];
  const double k = v.strike;
  if (p.f("gamma_above_strike"))
    prob.costs.gamma_cost = [gam, k](double, double x) { return x > k ? gam : 0.0; };
  else
    prob.costs.gamma_cost = constant_fn(gam);
  prob.costs.delta_cost = constant_fn(p["delta_cost"]);
  prob.costs.bond_cost = constant_fn(p["bond_cost"]);
  prob.costs.consumption = constant_fn(p["consumption"]);
  const VanillaSpec spec = v;
  if (p.s("kind") == "none")
    prob.payoff = [](double) { return 0.0; };
  else
    prob.payoff = [spec](double x) { return intrinsic(spec, x); };
  prob.maturity = v.maturity;
  need_positive(v.maturity, "maturity");
  return prob;
}

GridSpec grid_spec(const Params& p, double spot) {
  GridSpec g;
  g.space_intervals = p.size("space");
  g.time_steps = p.size("time");
  g.half_width = p["half_width"];
  g.spot = spot;
  return g;
}

int run_pde_price(Params& p, std::ostream& out, bool csv) {
  const VanillaSpec v = vanilla(p);
  const PDEProblem prob = pde_problem(p, v);
  const GridSpec g = grid_spec(p, v.spot);
  const GridSolution sol = solve_pde(prob, g);
  if (csv) {
    io::write_grid_csv(out, sol);
    return 0;
  }
  json j = header("pde-price");
  PricingResult r;
  r.price = value_at(sol, v.spot);
  r.method = "pde";
  r.steps = g.time_steps;
  r.space_nodes = g.space_intervals + 1;
  // Away from the payoff kink at maturity and from the artificial boundaries.
  r.diagnostics["residual"] =
      pde_residual(sol, prob, ResidualWindow{0.1 * v.maturity, 0.7 * v.strike, 1.4 * v.strike});
  r.diagnostics["x_min"] = sol.space.front();
  r.diagnostics["x_max"] = sol.space.back();
  j["result"] = io::to_json(r);
  j["scheme"] = sol.scheme;
  j["theta"] = sol.theta;
  j["startup_steps"] = sol.startup_steps;
  j["lower_boundary"] = sol.lower_boundary;
  j["upper_boundary"] = sol.upper_boundary;
  io::dump_json(out, j);
  return 0;
}

int run_mc_price(Params& p, std::ostream& out, std::uint64_t seed, unsigned threads) {
  const VanillaSpec v = vanilla(p);
  const PDEProblem prob = pde_problem(p, v);
  MCBudget b{p.size("paths"), p.size("steps"), seed, threads, p.f("antithetic")};
  if (b.n_paths < 2) throw ValidationError("paths must be >= 2");
  const MCResult r = fk_price(to_fk_problem(prob, v.spot), b);
  json j = header("mc-price");
  j["result"] = io::to_json(r);
  io::dump_json(out, j);
  return 0;
}

int run_closed_price(Params& p, std::ostream& out) {
  VanillaSpec v = vanilla(p);
  const std::string model = p.s("model");
  json j = header("closed-price");
  j["model"] = model;
  if (model == "bs") {
    j["price"] = bs_price(v);
    j["delta"] = bs_delta(v);
  } else if (model == "hetero") {
    const PricingResult r = hetero_bs_price(p["mu1"], p["mu2"], v);
    j["price"] = r.price;
    j["delta"] = r.diagnostics.at("delta");
    j["r_star"] = r.diagnostics.at("r_star");
    j["lambda1"] = r.diagnostics.at("lambda1");
    j["lambda2"] = r.diagnostics.at("lambda2");
  } else {
    j["price"] = drift_shifted_price(p["mu1"], p["mu2"], v.rate, v);
    j["delta"] = drift_shifted_delta(p["mu1"], p["mu2"], v.rate, v);
    j["carry"] = p["mu1"] - p["mu2"] + v.rate;
    j["bs_price"] = bs_price(v);
  }
  io::dump_json(out, j);
  return 0;
}

PathBudget path_budget(const Params& p, std::uint64_t seed, unsigned threads, bool keep) {
  PathBudget b;
  b.horizon = p["maturity"];
  need_positive(b.horizon, "maturity");
  b.steps = p.size("steps");
  b.n_paths = p.size("paths");
  b.seed = seed;
  b.threads = threads;
  b.keep_paths = keep;
  return b;
}

int run_arb_demo(Params& p, std::ostream& out, std::uint64_t seed, unsigned threads, bool csv) {
  need_positive(p["sigma"], "sigma");
  const PnLStats s = simulate_pair_arbitrage(p["mu1"], p["mu2"], p["sigma"], path_budget(p, seed, threads, csv));
  if (csv) {
    io::write_paths_csv(out, s.per_path, "pnl");
    return 0;
  }
  json j = header("arb-demo");
  j["mean_pnl"] = s.mean;
  j["variance_pnl"] = s.variance;
  j["min_pnl"] = s.min;
  j["max_pnl"] = s.max;
  j["target"] = (p["mu2"] - p["mu1"]) * p["maturity"];
  j["paths"] = s.paths;
  j["steps"] = s.steps;
  j["initial_capital"] = s.initial_capital;
  j["seed"] = seed;
  io::dump_json(out, j);
  return 0;
}

int run_hedge_demo(Params& p, std::ostream& out, std::uint64_t seed, unsigned threads, bool csv) {
  const PathBudget b = path_budget(p, seed, threads, csv);
  json j = header("hedge-demo");
  const std::string mode = p.s("mode");
  j["mode"] = mode;
  if (mode == "allocation") {
    const AllocationMarket m{p["mu1"], p["mu2"], p["sigma"], p["v1"], p["v2"]};
    const AllocationStats s = verify_allocation(m, {p["alpha1"], 1.0 - p["alpha1"]}, b);
    if (csv) {
      io::write_paths_csv(out, s.error.per_path, "replication_error");
      return 0;
    }
    j["alpha1"] = p["alpha1"];
    j["weight1"] = s.weight1;
    j["error"] = io::to_json(s.error);
  } else {
    VanillaSpec v;
    v.spot = p["spot"];
    v.strike = p["strike"];
    v.kind = kind_of(p.s("kind"));
    need_positive(v.spot, "spot");
    need_positive(v.strike, "strike");
    CostedHedgeOptions o;
    o.rule = p.s("rule") == "plus-lambda" ? HedgeRule::plus_lambda : HedgeRule::exposure;
    o.asset = static_cast<int>(p["asset"]);
    if (p["lambda"] != 0.0) o.lambda_override = p["lambda"];
    const HedgeStats h = simulate_costed_hedge(p["mu1"], p["mu2"], p["sigma"], v, b, o);
    if (csv) {
      io::write_paths_csv(out, h.per_path, "replication_error");
      return 0;
    }
    j["rule"] = p.s("rule");
    j["stats"] = io::to_json(h);
  }
  j["seed"] = seed;
  io::dump_json(out, j);
  return 0;
}

/// Convergence tables; rows are emitted as JSON arrays or CSV.
int run_converge(Params& p, std::ostream& out, std::optional<std::uint64_t> seed, unsigned threads,
                 bool csv) {
  const std::string study = p.s("study");
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
  json extra = json::object();
  if (study == "lattice") {
    const LatticeMarket m = lattice_market(p);
    const double k = p["strike"];
    const double r = black72_rate(m.mu, m.sigma, m.m, m.v);
    VanillaSpec v{m.s0, k, p["maturity"], r, m.sigma, OptionKind::call};
    const double ref = bs_price(v);
    cols = {"steps", "price", "error"};
    for (std::size_t n = p.size("start"); n <= p.size("stop"); n *= 2) {
      const PricingResult res =
          price_lattice(m, {[k](double s, double) { return std::max(s - k, 0.0); }, v.maturity, n});
      rows.push_back({static_cast<double>(n), res.price, res.price - ref});
    }
    extra["reference"] = ref;
    extra["rate"] = r;
  } else if (study == "pde") {
    const VanillaSpec v = vanilla(p);
    const double ref = bs_price(v);
    auto payoff = [v](double x) { return intrinsic(v, x); };
    cols = {"nodes", "price", "error", "residual"};
    for (std::size_t n = p.size("start"); n <= p.size("stop"); n *= 2) {
      GridSpec g;
      g.space_intervals = n;
      g.time_steps = n;
      g.spot = v.spot;
      const GridSolution s = solve_black_scholes_pde(v.rate, v.vol, payoff, v.maturity, g);
      const double res = pde_residual_with(
          s, [&](double, double) { return PDECoefficients{v.rate, v.vol, 0.0}; },
          ResidualWindow{0.1 * v.maturity, 0.7 * v.strike, 1.4 * v.strike});
      rows.push_back({static_cast<double>(n), value_at(s, v.spot), value_at(s, v.spot) - ref, res});
    }
    extra["reference"] = ref;
  } else if (study == "quad") {
    const double mu = p["mu"], sigma = p["sigma"], c = p["c"], eps = p["eps"];
    need_positive(sigma, "sigma");
    const CostedLimit lim = costed_gbm_limit(mu, sigma, c, eps);
    cols = {"dt", "mean_residual", "var_residual", "simplified_mean_residual", "simplified_var_residual"};
    for (double dt = p["dt"]; rows.size() < 4; dt /= 2) {
      const QuadrinomialStep q = quadrinomial_step(mu, sigma, c, eps, dt);
      const StepMoments mo = exact_step_moments(q);
      rows.push_back({dt, mo.mean - 1.0 - lim.exact.drift * dt,
                      mo.variance - lim.exact.vol * lim.exact.vol * dt,
                      mo.mean - 1.0 - lim.simplified.drift * dt,
                      mo.variance - lim.simplified.vol * lim.simplified.vol * dt});
    }
    extra["exact"] = {{"drift", lim.exact.drift}, {"vol", lim.exact.vol}};
    extra["simplified"] = {{"drift", lim.simplified.drift}, {"vol", lim.simplified.vol}};
  } else {  // tree
    if (!seed) throw UsageError("--seed is required for the tree study");
    const double mu = p["mu"], sigma = p["sigma"];
    const GBMParams g{mu, sigma, 1.0};
    const double horizon = p["maturity"];
    const StepMoments ref = gbm_terminal_moments(g, horizon);
    cols = {"steps", "mean", "variance", "ks"};
    for (std::size_t n = p.size("start"); n <= p.size("stop"); n *= 4) {
      const TreeStepParams st = moment_match_step(mu, sigma, horizon / static_cast<double>(n));
      const auto xs = simulate_terminal(st, 1.0, n, {p.size("paths"), *seed, threads});
      const SampleStats s = sample_stats(xs);
      std::vector<double> logs(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) logs[i] = std::log(xs[i]);
      const double ks = ks_distance_normal(logs, (mu - 0.5 * sigma * sigma) * horizon, sigma * std::sqrt(horizon));
      rows.push_back({static_cast<double>(n), s.mean, s.variance, ks});
    }
    extra["mean"] = ref.mean;
    extra["variance"] = ref.variance;
    extra["seed"] = *seed;
  }
  if (csv) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << io::format_double(r[c]);
      out << '\n';
    }
    return 0;
  }
  json j = header("converge");
  j["study"] = study;
  j["columns"] = cols;
  j["rows"] = rows;
  j["reference"] = extra;
  io::dump_json(out, j);
  return 0;
}

int run_xcheck(Params& p, std::ostream& out, std::uint64_t seed, unsigned threads) {
  const VanillaSpec v = vanilla(p);
  need_positive(v.maturity, "maturity");
  const double cf = bs_price(v);
  PDEProblem prob;
  prob.rate = constant_fn(v.rate);
  prob.vol = constant_fn(v.vol);
  prob.payoff = [v](double x) { return intrinsic(v, x); };
  prob.maturity = v.maturity;
  const GridSolution sol = solve_pde(prob, grid_spec(p, v.spot));
  const double pde = value_at(sol, v.spot);
  const MCResult mc = fk_price(to_fk_problem(prob, v.spot), {p.size("paths"), p.size("steps"), seed, threads, false});
  const double pde_tol = p["pde_rel_tol"];
  const double mc_k = p["mc_sigmas"];
  const bool pde_ok = std::abs(pde - cf) <= pde_tol * std::abs(cf);
  const bool mc_ok = std::abs(mc.estimate - cf) <= mc_k * mc.std_error;
  const bool mutual_ok = std::abs(mc.estimate - pde) <= mc_k * mc.std_error + pde_tol * std::abs(cf);
  json j = header("xcheck");
  j["closed_form"] = cf;
  j["pde"] = pde;
  j["mc"] = io::to_json(mc);
  j["tolerances"] = {{"pde_rel_tol", pde_tol}, {"mc_sigmas", mc_k}};
  j["pde_ok"] = pde_ok;
  j["mc_ok"] = mc_ok;
  j["mc_vs_pde_ok"] = mutual_ok;
  j["agree"] = pde_ok && mc_ok && mutual_ok;
  io::dump_json(out, j);
  return pde_ok && mc_ok && mutual_ok ? 0 : 1;
}

void vanilla_params(Params& p) {
  p.num("spot", 100, "spot price");
  p.num("strike", 100, "strike");
  p.num("maturity", 1, "maturity in years");
  p.num("rate", 0.05, "riskless rate");
  p.num("vol", 0.2, "volatility");
}

void cost_params(Params& p) {
  p.num("delta_cost", 0, "delta cost (constant)");
  p.num("gamma_cost", 0, "gamma cost (constant)");
  p.flag("gamma_above_strike", "apply gamma cost only where x > strike");
  p.num("bond_cost", 0, "bond-trading cost (constant)");
  p.num("consumption", 0, "source term (constant)");
}

void grid_params(Params& p) {
  p.count("space", 400, "space intervals");
  p.count("time", 400, "time steps");
  p.num("half_width", 6, "domain half width in std devs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arb-cost option pricing toolkit"};
  app.require_subcommand(1);
  std::string scenario_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed_flag;
  unsigned threads = 0;
  app.add_option("--scenario", scenario_path, "JSON scenario file");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed_flag, "64-bit seed (stochastic subcommands)");
  app.add_option("--threads", threads, "worker cap (0: ARBCOST_THREADS or hardware)");
  app.fallthrough();

  std::vector<Command> cmds;
  auto add = [&](const std::string& name, const std::string& help, bool stochastic, bool tabular) -> Params& {
    Command c;
    c.name = name;
    c.app = app.add_subcommand(name, help);
    c.params = std::make_unique<Params>(c.app);
    c.stochastic = stochastic;
    c.tabular = tabular;
    cmds.push_back(std::move(c));
    return *cmds.back().params;
  };

  {
    Params& p = add("rates", "implied riskless rates", false, false);
    p.str("mode", "arb-cost", {"arb-cost", "black72", "costed", "adjusted"}, "which rate");
    p.num("mu1", 0.04, "drift of agent/asset 1");
    p.num("mu2", 0.09, "drift of agent/asset 2");
    p.num("sigma1", 0.2, "vol 1 (black72)");
    p.num("sigma2", 0.3, "vol 2 (black72)");
    p.num("sigma", 0.2, "common vol (costed, adjusted)");
    p.num("c1", 1.5, "transaction rate 1");
    p.num("eps1", 0.3, "mix 1");
    p.num("c2", 2.0, "transaction rate 2");
    p.num("eps2", 0.5, "mix 2");
    p.str("moments", "exact", {"exact", "simplified"}, "effective moments used by costed mode");
    p.num("mu", 0.05, "drift of S (adjusted)");
    p.num("m", 0.03, "drift of V (adjusted)");
    p.num("v", 0.1, "vol of V (adjusted)");
    p.num("cost_const", 0, "cost constant (adjusted)");
  }
  {
    Params& p = add("alloc", "no-arbitrage wealth allocation", false, false);
    p.str("mode", "costed", {"costed", "nocost", "views"}, "which allocation equation");
    p.num("cy1", 0.02, "transaction yield 1");
    p.num("cy2", -0.01, "transaction yield 2");
    p.num("sigma", 0.3, "common vol");
    p.num("sigma1", 0.2, "vol 1 (nocost)");
    p.num("sigma2", 0.3, "vol 2 (nocost)");
    p.num("mu1", 0.04, "drift 1 (views)");
    p.num("mu2", 0.09, "drift 2 (views)");
    p.num("c1", 1.5, "transaction rate 1 (views)");
    p.num("eps1", 0.3, "mix 1 (views)");
    p.num("c2", 2.0, "transaction rate 2 (views)");
    p.num("eps2", 0.5, "mix 2 (views)");
  }
  {
    Params& p = add("tree-price", "two-asset lattice price", false, false);
    p.num("mu", 0.05, "drift of S");
    p.num("sigma", 0.2, "vol of S");
    p.num("m", 0.03, "drift of V");
    p.num("v", 0.1, "vol of V");
    p.num("cost_const", 0, "cost constant");
    p.num("s0", 100, "initial S");
    p.num("v0", 100, "initial V");
    p.num("strike", 100, "strike");
    p.num("maturity", 1, "maturity");
    p.count("steps", 1000, "lattice steps");
    p.str("kind", "call", {"call", "put", "digital", "forward"}, "payoff on S");
    p.str("multiplier", "power", {"power", "linearized"}, "cost multiplier form");
  }
  {
    Params& p = add("pde-price", "finite-difference price", false, true);
    vanilla_params(p);
    p.str("kind", "call", {"call", "put", "none"}, "payoff");
    cost_params(p);
    grid_params(p);
  }
  {
    Params& p = add("mc-price", "Feynman-Kac Monte Carlo price", true, false);
    vanilla_params(p);
    p.str("kind", "call", {"call", "put", "none"}, "payoff");
    cost_params(p);
    p.count("paths", 100000, "paths");
    p.count("steps", 100, "time steps");
    p.flag("antithetic", "antithetic pairs");
  }
  {
    Params& p = add("closed-price", "closed-form prices", false, false);
    vanilla_params(p);
    p.str("kind", "call", {"call", "put"}, "option kind");
    p.str("model", "bs", {"bs", "hetero", "drift-shifted"}, "formula");
    p.num("mu1", 0.04, "drift 1");
    p.num("mu2", 0.09, "drift 2");
  }
  {
    Params& p = add("arb-demo", "zero-capital pair trade", true, true);
    p.num("mu1", 0.03, "drift of the shorted asset");
    p.num("mu2", 0.07, "drift of the held asset");
    p.num("sigma", 0.2, "common vol");
    p.num("maturity", 1, "horizon");
    p.count("steps", 1000, "rebalancing steps");
    p.count("paths", 1000, "paths");
  }
  {
    Params& p = add("hedge-demo", "costed hedge or allocation replication", true, true);
    p.str("mode", "hedge", {"hedge", "allocation"}, "experiment");
    p.num("mu1", 0.04, "drift 1");
    p.num("mu2", 0.09, "drift 2");
    p.num("sigma", 0.2, "vol");
    p.num("spot", 100, "spot");
    p.num("strike", 100, "strike");
    p.num("maturity", 1, "maturity");
    p.str("kind", "call", {"call", "put"}, "option kind");
    p.str("rule", "exposure", {"exposure", "plus-lambda"}, "holding rule");
    p.num("asset", 1, "hedge asset (1 or 2)");
    p.num("lambda", 0, "override lambda (0: from drifts)");
    p.num("v1", 0.25, "traded vol 1 (allocation)");
    p.num("v2", 0.3, "traded vol 2 (allocation)");
    p.num("alpha1", 0.5, "allocation to agent 1 (allocation)");
    p.count("steps", 500, "rebalancing steps");
    p.count("paths", 10000, "paths");
  }
  {
    Params& p = add("converge", "convergence tables", false, true);
    p.str("study", "lattice", {"lattice", "pde", "quad", "tree"}, "which study");
    p.num("mu", 0.05, "drift");
    p.num("sigma", 0.2, "vol");
    p.num("m", 0.03, "drift of V (lattice)");
    p.num("v", 0.1, "vol of V (lattice)");
    p.num("cost_const", 0, "cost constant (lattice)");
    p.num("s0", 100, "initial S (lattice)");
    p.num("v0", 100, "initial V (lattice)");
    p.num("spot", 100, "spot (pde)");
    p.num("strike", 100, "strike");
    p.num("maturity", 1, "maturity");
    p.num("rate", 0.05, "rate (pde)");
    p.num("vol", 0.2, "vol (pde)");
    p.str("kind", "call", {"call", "put"}, "option kind (pde)");
    p.num("c", 2, "transaction rate (quad)");
    p.num("eps", 0.5, "mix (quad)");
    p.num("dt", 0.01, "largest dt (quad)");
    p.count("start", 250, "first size");
    p.count("stop", 2000, "last size");
    p.count("paths", 100000, "paths (tree)");
  }
  {
    Params& p = add("xcheck", "closed form vs PDE vs MC", true, false);
    vanilla_params(p);
    p.str("kind", "call", {"call", "put"}, "option kind");
    grid_params(p);
    p.count("paths", 200000, "MC paths");
    p.count("steps", 10, "MC steps");
    p.num("pde_rel_tol", 1e-3, "PDE relative tolerance");
    p.num("mc_sigmas", 3, "MC band in standard errors");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "UsageError: " << e.what() << '\n';
    return 2;
  }

  Command* cmd = nullptr;
  for (auto& c : cmds)
    if (c.app->parsed()) cmd = &c;

  try {
    Params& p = *cmd->params;
    if (!scenario_path.empty()) {
      std::ifstream in(scenario_path);
      if (!in) throw UsageError("cannot open scenario '" + scenario_path + "'");
      json sc;
      try {
        sc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
      }
      if (!sc.is_object()) throw ValidationError("scenario must be an object");
      for (auto it = sc.begin(); it != sc.end(); ++it)
        if (it.key() != "schema_version" && it.key() != "command" && it.key() != "params")
          throw ValidationError("unknown scenario field '" + it.key() + "'");
      if (!sc.contains("schema_version") || sc["schema_version"] != kSchemaVersion)
        throw ValidationError(std::string("scenario schema_version must be \"") + kSchemaVersion + "\"");
      if (sc.contains("command") && sc["command"] != cmd->name)
        throw ValidationError("scenario is for a different command");
      if (sc.contains("params")) p.load(sc["params"]);
    }
    p.finish();
    if (seed_flag) p.seed() = seed_flag;
    const bool csv = format == "csv";
    if (csv && !cmd->tabular) throw UsageError("--format csv is only available for tabular output");
    if (cmd->stochastic && !p.seed()) throw UsageError("--seed is required for " + cmd->name);

    const std::string& n = cmd->name;
    std::ostringstream out;
    int rc = 0;
    if (n == "rates") rc = run_rates(p, out);
    else if (n == "alloc") rc = run_alloc(p, out);
    else if (n == "tree-price") rc = run_tree_price(p, out);
    else if (n == "pde-price") rc = run_pde_price(p, out, csv);
    else if (n == "mc-price") rc = run_mc_price(p, out, *p.seed(), threads);
    else if (n == "closed-price") rc = run_closed_price(p, out);
    else if (n == "arb-demo") rc = run_arb_demo(p, out, *p.seed(), threads, csv);
    else if (n == "hedge-demo") rc = run_hedge_demo(p, out, *p.seed(), threads, csv);
    else if (n == "converge") rc = run_converge(p, out, p.seed(), threads, csv);
    else if (n == "xcheck") rc = run_xcheck(p, out, *p.seed(), threads);
    std::cout << out.str();
    return rc;
  } catch (const UsageError& e) {
    std::cerr << "UsageError: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "ValidationError: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) {
      std::cerr << "ValidationError: " << e.what() << '\n';
      return 3;
    }
    std::cerr << e.what() << '\n';
    return 4;
  }
}
