#include "splitlangevin/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "splitlangevin/analysis.hpp"
#include "splitlangevin/error.hpp"
#include "splitlangevin/random.hpp"

namespace splitlangevin {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

// Everything an experiment needs besides its own keys.
struct Context {
  const RunConfig& cfg;
  std::string name;
  SchemeSpec scheme;
  PhysParams prm;
  std::uint64_t seed;
  unsigned workers;
  std::filesystem::path out;
  RunSummary summary;
  double tau = 0.0;
  double T = 0.0;

  State initial(double p0, double q0) const {
    return {cfg.get_double("p0", p0), cfg.get_double("q0", q0)};
  }

  void check(const std::string& check_name, bool pass, double margin) {
    summary.checks.push_back({check_name, pass, margin});
  }
};

class CsvWriter {
 public:
  CsvWriter(Context& ctx, const std::string& file, const std::vector<std::string>& columns)
      : path_(ctx.out / file), os_(path_, std::ios::binary) {
    if (!os_) throw Error(ErrorCode::ConfigError, "cannot write " + path_.string());
    os_ << "# splitlangevin experiment=" << ctx.name << '\n';
    os_ << "# generated=" << utc_timestamp() << '\n';
    os_ << "# scheme=" << ctx.scheme.name() << " upsilon=" << format_real(ctx.prm.upsilon())
        << " sigma=" << format_real(ctx.prm.sigma()) << " tau=" << format_real(ctx.tau)
        << " T=" << format_real(ctx.T) << " seed=" << ctx.seed << '\n';
    for (const auto& [k, v] : ctx.cfg.entries()) os_ << "# config " << k << " = " << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << '\n';
    ctx.summary.files.push_back(path_);
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      os_ << (first ? "" : ",") << format_real(v);
      first = false;
    }
    os_ << '\n';
  }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

ConvergenceSetup convergence_setup(Context& ctx, std::vector<double> taus, double ref,
                                   std::size_t paths) {
  ConvergenceSetup s{ctx.scheme, ctx.prm, ctx.initial(1.0, 1.0), ctx.T, {}, 0.0, 0, {}, 0};
  s.taus = ctx.cfg.get_doubles("taus", std::move(taus));
  s.reference_tau = ctx.cfg.get_double("reference_tau", ref);
  s.n_paths = static_cast<std::size_t>(ctx.cfg.get_int("paths", static_cast<std::int64_t>(paths)));
  s.seeds = {ctx.seed};
  s.workers = ctx.workers;
  ctx.tau = s.taus.empty() ? 0.0 : s.taus.back();
  return s;
}

std::vector<double> dyadic(int lo, int hi) {
  std::vector<double> v;
  for (int k = lo; k <= hi; ++k) v.push_back(std::ldexp(1.0, -k));
  return v;
}

void write_order(Context& ctx, const OrderFit& fit, double lo, double hi, double min_r2) {
  CsvWriter csv(ctx, ctx.name + ".csv", {"tau", "error", "std_error"});
  for (const auto& l : fit.levels) csv.row({l.tau, l.error, l.std_error});
  ctx.summary.metrics["slope"] = fit.slope;
  ctx.summary.metrics["intercept"] = fit.intercept;
  ctx.summary.metrics["r_squared"] = fit.r_squared;
  ctx.check("slope_in_band", fit.slope >= lo && fit.slope <= hi,
            std::min(fit.slope - lo, hi - fit.slope));
  if (min_r2 > 0.0) ctx.check("r_squared", fit.r_squared > min_r2, fit.r_squared - min_r2);
}

void exp_simulate(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", std::ldexp(1.0, -10));
  ctx.T = ctx.cfg.get_double("T", 1.0);
  const Trajectory tr = simulate(ctx.initial(1.0, 1.0), ctx.T, ctx.tau, ctx.prm, ctx.scheme,
                                 SeedPolicy{ctx.seed}.path_seed(0));
  CsvWriter csv(ctx, "trajectory.csv", {"t", "p", "q"});
  for (std::size_t n = 0; n < tr.states.size(); ++n) {
    csv.row({tr.times[n], tr.states[n].p, tr.states[n].q});
  }
  ctx.summary.metrics["steps"] = static_cast<double>(tr.states.size() - 1);
  ctx.summary.metrics["final_H"] = energy_H(tr.states.back(), ctx.prm);
}

void exp_strong_order(Context& ctx) {
  ctx.T = ctx.cfg.get_double("T", 1.0);
  const auto setup = convergence_setup(ctx, dyadic(6, 10), std::ldexp(1.0, -13), 1000);
  write_order(ctx, strong_error(setup), ctx.cfg.get_double("slope_lo", 0.85),
              ctx.cfg.get_double("slope_hi", 1.15), 0.98);
}

void exp_weak_order(Context& ctx) {
  ctx.T = ctx.cfg.get_double("T", 1.0);
  const bool strang = ctx.scheme.composition == Composition::Strang;
  const auto setup = strang ? convergence_setup(ctx, dyadic(5, 8), std::ldexp(1.0, -12), 10000)
                            : convergence_setup(ctx, dyadic(6, 10), std::ldexp(1.0, -13), 5000);
  const Observable g =
      named_observable(ctx.cfg.get_string("observable", strang ? "sin_r" : "sin_sin"));
  write_order(ctx, weak_error(setup, g), ctx.cfg.get_double("slope_lo", strang ? 1.7 : 0.8),
              ctx.cfg.get_double("slope_hi", strang ? 2.3 : 1.2), 0.0);
}

void exp_long_time_error(Context& ctx) {
  ctx.T = ctx.cfg.get_double("T", 100.0);
  const auto setup = convergence_setup(ctx, {ctx.cfg.get_double("tau", std::ldexp(1.0, -8))},
                                       std::ldexp(1.0, -11), 200);
  const double every = ctx.cfg.get_double("record_every", 1.0);
  const LongTimeError e =
      long_time_error(setup, named_observable(ctx.cfg.get_string("observable", "sin_1_r")),
                      every);
  CsvWriter csv(ctx, ctx.name + ".csv",
                {"t", "strong_error", "strong_std_error", "weak_error", "weak_std_error"});
  for (std::size_t i = 0; i < e.times.size(); ++i) {
    csv.row({e.times[i], e.strong[i], e.strong_se[i], e.weak[i], e.weak_se[i]});
  }
  // first and final tenth of the horizon, excluding t = 0
  const double decade = 0.1 * ctx.T;
  Moments early;
  Moments late;
  for (std::size_t i = 0; i < e.times.size(); ++i) {
    if (e.times[i] > 0.0 && e.times[i] <= decade) early.add(e.strong[i]);
    if (e.times[i] >= ctx.T - decade) late.add(e.strong[i]);
  }
  ctx.summary.metrics["early_mean_error"] = early.mean;
  ctx.summary.metrics["late_mean_error"] = late.mean;
  ctx.check("late_le_2x_early", late.mean <= 2.0 * early.mean, 2.0 * early.mean - late.mean);
}

void exp_ergodic_average(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", std::ldexp(1.0, -8));
  ctx.T = ctx.cfg.get_double("T", 512.0);
  const ErgodicSetup setup{ctx.scheme,
                           ctx.prm,
                           ctx.initial(0.0, 0.0),
                           ctx.tau,
                           ctx.T,
                           ctx.cfg.get_double("burn_in", 64.0),
                           static_cast<std::size_t>(ctx.cfg.get_int("paths", 100)),
                           {ctx.seed},
                           ctx.workers};
  const GibbsMoments gm = gibbs_moments(ctx.prm);
  const std::vector<std::pair<std::string, double>> obs{
      {"p2", gm.Ep2}, {"q2", gm.Eq2}, {"q4", gm.Eq4}};
  std::vector<Observable> fns;
  for (const auto& o : obs) fns.push_back(named_observable(o.first));
  const EnsembleReport rep = ergodic_averages(setup, fns);
  CsvWriter csv(ctx, ctx.name + ".csv", {"observable", "estimate", "std_error", "reference"});
  const double tol = ctx.cfg.get_double("rel_tol", 0.05);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& r = rep.records[i];
    csv.row({static_cast<double>(i), r.estimate, r.std_error, obs[i].second});
    ctx.summary.metrics[obs[i].first] = r.estimate;
    ctx.summary.metrics[obs[i].first + "_std_error"] = r.std_error;
    ctx.summary.metrics[obs[i].first + "_reference"] = obs[i].second;
    const double rel = std::abs(r.estimate - obs[i].second) / obs[i].second;
    ctx.check(obs[i].first + "_within_rel_tol", rel <= tol, tol - rel);
  }
}

void exp_histogram(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", std::ldexp(1.0, -8));
  const std::vector<double> times = ctx.cfg.get_doubles("times", {0.0, 2.0, 256.0});
  ctx.T = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
  const auto bins = static_cast<std::size_t>(ctx.cfg.get_int("bins", 40));
  const auto pr = ctx.cfg.get_doubles("p_range", {-1.0, 1.0});
  const auto qr = ctx.cfg.get_doubles("q_range", {-1.5, 1.5});
  if (pr.size() != 2 || qr.size() != 2) {
    throw Error(ErrorCode::ConfigError, "p_range and q_range take two values");
  }
  const HistogramRange range{pr[0], pr[1], qr[0], qr[1], bins, bins};
  const auto snaps = ensemble_snapshots(
      ctx.scheme, ctx.prm, ctx.initial(0.0, 0.0), ctx.tau, times,
      static_cast<std::size_t>(ctx.cfg.get_int("paths", 5000)), {ctx.seed}, ctx.workers);
  std::vector<double> dist;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Histogram2D h = empirical_distribution(snaps[i], range);
    char name[64];
    std::snprintf(name, sizeof name, "histogram_t%g.csv", times[i]);
    CsvWriter csv(ctx, name, {"p_lo", "p_hi", "q_lo", "q_hi", "mass"});
    for (std::size_t a = 0; a < range.n_p; ++a) {
      for (std::size_t b = 0; b < range.n_q; ++b) {
        csv.row({h.p_edge(a), h.p_edge(a + 1), h.q_edge(b), h.q_edge(b + 1), h.mass(a, b)});
      }
    }
    dist.push_back(distribution_distance(h, ctx.prm));
    char key[64];
    std::snprintf(key, sizeof key, "distance_t%g", times[i]);
    ctx.summary.metrics[key] = dist.back();
  }
  bool decreasing = true;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < dist.size(); ++i) {
    decreasing = decreasing && dist[i] < dist[i - 1];
    gap = std::min(gap, dist[i - 1] - dist[i]);
  }
  ctx.check("distance_decreasing", decreasing, dist.size() > 1 ? gap : 0.0);
  const double limit = ctx.cfg.get_double("final_distance_max", 0.15);
  if (!dist.empty()) ctx.check("final_distance", dist.back() < limit, limit - dist.back());
}

void exp_msd(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", std::ldexp(1.0, -8));
  ctx.T = ctx.cfg.get_double("T", 512.0);
  const State x0 = ctx.initial(0.0, 0.0);
  const MsdCurve c = msd_ensemble(ctx.scheme, ctx.prm, x0, ctx.tau, ctx.T,
                                  static_cast<std::size_t>(ctx.cfg.get_int("paths", 1000)),
                                  {ctx.seed}, ctx.workers,
                                  static_cast<std::size_t>(ctx.cfg.get_int("stride", 4)));
  CsvWriter csv(ctx, ctx.name + ".csv", {"t", "msd", "std_error"});
  for (std::size_t i = 0; i < c.times.size(); ++i) csv.row({c.times[i], c.msd[i], c.std_error[i]});
  const double plateau = msd_plateau(c);
  ctx.summary.metrics["plateau"] = plateau;
  ctx.check("plateau_finite", std::isfinite(plateau), 0.0);
  if (x0.p == 0.0 && x0.q == 0.0 && ctx.prm.sigma() > 0.0) {
    const GibbsMoments gm = gibbs_moments(ctx.prm);
    const double oracle = gm.Ep2 + gm.Eq2;
    const double rel = std::abs(plateau - oracle) / oracle;
    ctx.summary.metrics["plateau_reference"] = oracle;
    ctx.check("plateau_within_5pct", rel <= 0.05, 0.05 - rel);
  }
  const LineFit fit = msd_relaxation_fit(c, plateau, ctx.cfg.get_double("fit_t_lo", 0.0),
                                         ctx.cfg.get_double("fit_t_hi", 2.0));
  ctx.summary.metrics["relaxation_slope"] = fit.slope;
  ctx.summary.metrics["relaxation_r_squared"] = fit.r_squared;
  ctx.check("relaxation_slope_negative", fit.slope < 0.0, -fit.slope);
  ctx.check("relaxation_r_squared", fit.r_squared > 0.9, fit.r_squared - 0.9);
}

void exp_exp_moment(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", std::ldexp(1.0, -10));
  ctx.T = ctx.cfg.get_double("T", 1.0);
  const ExpMomentReport rep = exp_moment_monitor(
      ctx.scheme, ctx.prm, ctx.initial(0.0, 0.0), ctx.tau, ctx.T,
      static_cast<std::size_t>(ctx.cfg.get_int("paths", 10000)), {ctx.seed}, ctx.workers);
  CsvWriter csv(ctx, ctx.name + ".csv", {"t", "estimate", "std_error"});
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    csv.row({rep.times[i], rep.estimates[i], rep.std_errors[i]});
    worst = std::max(worst, std::log(rep.estimates[i]));
  }
  ctx.summary.metrics["max_exponent"] = rep.max_exponent;
  ctx.summary.metrics["log_envelope"] = rep.log_envelope;
  ctx.summary.metrics["max_log_estimate"] = worst;
  ctx.check("no_overflow", !rep.overflow, 0.0);
  ctx.check("within_envelope", !rep.divergence, rep.log_envelope - worst);
}

void exp_lyapunov(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", std::ldexp(1.0, -8));
  std::vector<State> states;
  for (const auto& item : split(ctx.cfg.get_string("states", "0:0;1:1;2:-1"), ';')) {
    const auto pq = split(item, ':');
    if (pq.size() != 2) throw Error(ErrorCode::ConfigError, "states are written p:q;p:q");
    states.push_back({parse_real(pq[0]), parse_real(pq[1])});
  }
  const auto res = lyapunov_check(ctx.scheme, ctx.prm, ctx.tau, states,
                                  static_cast<std::size_t>(ctx.cfg.get_int("paths", 100000)),
                                  {ctx.seed}, ctx.workers);
  CsvWriter csv(ctx, ctx.name + ".csv",
                {"p", "q", "mean", "std_error", "bound", "margin", "pass"});
  for (const auto& r : res) {
    csv.row({r.state.p, r.state.q, r.mean, r.std_error, r.bound, r.margin, r.pass ? 1.0 : 0.0});
    char name[96];
    std::snprintf(name, sizeof name, "lyapunov_%g_%g", r.state.p, r.state.q);
    ctx.check(name, r.pass, r.margin);
  }
}

void exp_jacobian(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", 1e-4);
  const auto n = static_cast<std::size_t>(ctx.cfg.get_int("paths", 1000));
  const double box = ctx.cfg.get_double("box", 2.0);
  NormalStream normals(SeedPolicy{ctx.seed}.path_seed(0));
  std::mt19937_64 uni_engine(SeedPolicy{ctx.seed}.path_seed(1));
  std::uniform_real_distribution<double> uni(-box, box);
  const double expected = std::exp(-ctx.prm.upsilon() * ctx.tau);
  CsvWriter csv(ctx, ctx.name + ".csv", {"p", "q", "z", "det", "expected"});
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const State s{uni(uni_engine), uni(uni_engine)};
    const double z = normals();
    const double det = jacobian_det(
        [&](const State& x) { return lie_trotter_step(x, ctx.tau, ctx.prm, ctx.scheme, NormalDraw{z}); },
        s);
    worst = std::max(worst, std::abs(det - expected) / expected);
    csv.row({s.p, s.q, z, det, expected});
  }
  ctx.summary.metrics["max_rel_error"] = worst;
  const double tol = ctx.cfg.get_double("rel_tol", 1e-6);
  ctx.check("det_equals_contraction", worst <= tol, tol - worst);
}

void exp_phase_area(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", 1e-4);
  ctx.T = ctx.cfg.get_double("T", 1.0);
  const auto pts = phase_area(ctx.scheme, ctx.prm, ctx.tau, ctx.T,
                              static_cast<std::size_t>(ctx.cfg.get_int("vertices", 10000)),
                              SeedPolicy{ctx.seed}.path_seed(0),
                              static_cast<std::size_t>(ctx.cfg.get_int("record_every", 100)));
  CsvWriter csv(ctx, ctx.name + ".csv", {"t", "area", "reference"});
  for (const auto& a : pts) {
    csv.row({a.t, a.area, std::numbers::pi * std::exp(-ctx.prm.upsilon() * a.t)});
  }
  const double ratio = pts.back().area / (std::numbers::pi * std::exp(-ctx.prm.upsilon() * ctx.T));
  ctx.summary.metrics["final_area"] = pts.back().area;
  ctx.summary.metrics["final_area_ratio"] = ratio;
  ctx.check("final_area_within_0.1pct", std::abs(ratio - 1.0) <= 1e-3, 1e-3 - std::abs(ratio - 1.0));
}

void exp_dissipation_demo(Context& ctx) {
  ctx.tau = ctx.cfg.get_double("tau", 1e-3);
  ctx.T = ctx.cfg.get_double("T", 1.0);
  const State x0 = ctx.initial(0.0, 2.0);
  const auto c = h0_dissipation_compare(ctx.prm, ctx.tau, ctx.T, x0,
                                        static_cast<std::size_t>(ctx.cfg.get_int("paths", 10000)),
                                        {ctx.seed}, ctx.workers);
  CsvWriter csv(ctx, ctx.name + ".csv",
                {"t", "naive_mean", "naive_std_error", "split_mean", "split_std_error"});
  const double h0 = energy_H0(x0, ctx.prm);
  double naive_margin = std::numeric_limits<double>::infinity();
  double split_at = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    csv.row({c.times[i], c.naive_mean[i], c.naive_se[i], c.split_mean[i], c.split_se[i]});
    naive_margin = std::min(naive_margin, c.naive_mean[i] + 3.0 * c.naive_se[i] - h0);
    if (std::isnan(split_at) && c.times[i] >= 0.2 - 1e-12) split_at = c.split_mean[i];
  }
  ctx.summary.metrics["split_mean_t0.2"] = split_at;
  ctx.check("naive_not_dissipative", naive_margin >= 0.0, naive_margin);
  if (!std::isnan(split_at)) {
    ctx.check("split_halves_by_t0.2", split_at < 0.5 * h0, 0.5 * h0 - split_at);
  }
}

using ExperimentFn = void (*)(Context&);

const std::vector<std::pair<std::string, ExperimentFn>>& registry() {
  static const std::vector<std::pair<std::string, ExperimentFn>> table{
      {"simulate", exp_simulate},
      {"strong-order", exp_strong_order},
      {"weak-order", exp_weak_order},
      {"long-time-error", exp_long_time_error},
      {"ergodic-average", exp_ergodic_average},
      {"histogram", exp_histogram},
      {"msd", exp_msd},
      {"exp-moment", exp_exp_moment},
      {"lyapunov", exp_lyapunov},
      {"jacobian", exp_jacobian},
      {"phase-area", exp_phase_area},
      {"dissipation-demo", exp_dissipation_demo},
  };
  return table;
}

// Default (scheme, upsilon) per experiment.
std::pair<std::string, double> scheme_defaults(const std::string& name) {
  if (name == "ergodic-average" || name == "histogram" || name == "msd") return {"SAVF", 15.0};
  if (name == "jacobian" || name == "phase-area") return {"SSE", 2.0};
  return {"SAVF", 10.0};
}

json summary_json(const RunConfig& cfg, const RunSummary& s) {
  json j;
  j["experiment"] = s.experiment;
  json c = json::object();
  for (const auto& [k, v] : cfg.entries()) c[k] = v;
  j["config"] = c;
  json m = json::object();
  for (const auto& [k, v] : s.metrics) m[k] = v;
  j["metrics"] = m;
  j["checks"] = json::array();
  for (const auto& ch : s.checks) {
    j["checks"].push_back({{"name", ch.name}, {"pass", ch.pass}, {"margin", ch.margin}});
  }
  j["files"] = json::array();
  for (const auto& f : s.files) j["files"].push_back(f.filename().string());
  return j;
}

}  // namespace

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("2^", 0) == 0) return std::ldexp(1.0, static_cast<int>(std::stol(t.substr(2))));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) {
    throw Error(ErrorCode::ConfigError, "not a number: '" + text + "'");
  }
  return v;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_real(*v) : fallback;
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const double d = parse_real(*v);
  if (d != std::floor(d)) throw Error(ErrorCode::ConfigError, key + " must be an integer");
  return static_cast<std::int64_t>(d);
}

std::uint64_t RunConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const auto x = std::stoull(*v, &used);
    if (used == v->size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::ConfigError, key + " must be an unsigned integer");
}

std::vector<double> RunConfig::get_doubles(const std::string& key,
                                           std::vector<double> fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split(*v, ',')) out.push_back(parse_real(item));
  return out;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& e : registry()) n.push_back(e.first);
    return n;
  }();
  return names;
}

RunSummary run_experiment(const RunConfig& cfg) {
  const auto name = cfg.get("experiment");
  if (!name) throw Error(ErrorCode::ConfigError, "no experiment given");
  const auto& table = registry();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& e) { return e.first == *name; });
  if (it == table.end()) {
    throw Error(ErrorCode::UnknownExperiment, "unknown experiment '" + *name + "'");
  }
  const auto [scheme_name, upsilon] = scheme_defaults(*name);
  SchemeSpec scheme = parse_scheme(cfg.get_string("scheme", scheme_name));
  scheme.solver.rel_tol = cfg.get_double("solver_rel_tol", scheme.solver.rel_tol);
  scheme.solver.abs_tol = cfg.get_double("solver_abs_tol", scheme.solver.abs_tol);
  scheme.solver.max_iter = static_cast<int>(cfg.get_int("solver_max_iter", scheme.solver.max_iter));
  scheme.solver.validate();
  Context ctx{cfg,
              *name,
              scheme,
              PhysParams(cfg.get_double("upsilon", upsilon), cfg.get_double("sigma", 1.0)),
              cfg.get_uint("seed", 2024),
              static_cast<unsigned>(cfg.get_int("workers", default_workers())),
              cfg.get_string("out", "."),
              {},
              0.0,
              0.0};
  ctx.summary.experiment = *name;
  std::filesystem::create_directories(ctx.out);
  it->second(ctx);
  const std::filesystem::path summary_path = ctx.out / "summary.json";
  std::ofstream os(summary_path, std::ios::binary);
  os << summary_json(cfg, ctx.summary).dump(2) << '\n';
  ctx.summary.files.push_back(summary_path);
  return ctx.summary;
}

std::string error_record_json(const std::exception& e) {
  json j;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = to_string(err->code());
    j["message"] = err->what();
    j["step"] = err->step() ? json(*err->step()) : json(nullptr);
    j["path"] = err->path() ? json(*err->path()) : json(nullptr);
  } else {
    j["error"] = "InternalError";
    j["message"] = e.what();
    j["step"] = nullptr;
    j["path"] = nullptr;
  }
  return j.dump();
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Splitting integrators for the stochastic Langevin equation"};
  std::string experiment;
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  std::vector<std::string> overrides;
  bool list = false;
  app.add_option("--experiment,-e", experiment, "experiment recipe to run");
  app.add_option("--config,-c", config_path, "key = value config file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--out,-o", out, "output directory");
  app.add_option("--set", overrides, "override a config key (key=value)");
  app.add_flag("--list", list, "list experiments and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (list) {
    for (const auto& n : experiment_names()) std::cout << n << '\n';
    return 0;
  }
  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects key=value");
      cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (!experiment.empty()) cfg.set("experiment", experiment);
    if (app.count("--seed") > 0) cfg.set("seed", std::to_string(seed));
    if (app.count("--workers") > 0) cfg.set("workers", std::to_string(workers));
    if (!out.empty()) cfg.set("out", out);
    const RunSummary s = run_experiment(cfg);
    for (const auto& ch : s.checks) {
      std::cout << (ch.pass ? "PASS " : "FAIL ") << ch.name << " (margin " << ch.margin << ")\n";
    }
    for (const auto& f : s.files) std::cout << "wrote " << f.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << error_record_json(e) << '\n';
    return 2;
  }
}

}  // namespace splitlangevin
