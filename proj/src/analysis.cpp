#include "splitlangevin/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "splitlangevin/error.hpp"

namespace splitlangevin {

namespace {

std::size_t steps_between(double tau_coarse, double tau_fine) {
  const double r = tau_coarse / tau_fine;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * r) {
    throw Error(ErrorCode::NonIntegralRatio, "step " + std::to_string(tau_coarse) +
                                                 " is not a multiple of " +
                                                 std::to_string(tau_fine));
  }
  return static_cast<std::size_t>(n);
}

void validate(const ConvergenceSetup& setup) {
  if (setup.taus.empty()) throw Error(ErrorCode::InvalidArgument, "no step-size levels");
  for (double tau : setup.taus) steps_between(tau, setup.reference_tau);
  step_count(setup.T, setup.reference_tau);
}

double sq_distance(const State& a, const State& b) {
  const double dp = a.p - b.p;
  const double dq = a.q - b.q;
  return dp * dp + dq * dq;
}

std::vector<OrderLevel> rms_levels(const std::vector<double>& taus,
                                   const std::vector<Moments>& sq) {
  std::vector<OrderLevel> levels;
  levels.reserve(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double err = std::sqrt(sq[i].mean);
    const double se = err > 0.0 ? sq[i].std_error() / (2.0 * err) : 0.0;
    levels.push_back({taus[i], err, se});
  }
  return levels;
}

}  // namespace

OrderFit fit_order(std::span<const std::pair<double, double>> levels) {
  std::vector<OrderLevel> v;
  v.reserve(levels.size());
  for (const auto& [tau, err] : levels) v.push_back({tau, err, 0.0});
  return fit_order(std::move(v));
}

OrderFit fit_order(std::vector<OrderLevel> levels) {
  if (levels.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "order fit needs at least three levels");
  }
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& l : levels) {
    if (!(l.tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "step sizes must be positive");
    if (!(l.error > 0.0)) {
      throw Error(ErrorCode::NonPositiveError,
                  "error at tau = " + std::to_string(l.tau) +
                      " is not positive; increase the number of paths");
    }
    x.push_back(std::log(l.tau));
    y.push_back(std::log(l.error));
  }
  const LineFit line = fit_line(x, y);
  return {std::move(levels), line.slope, line.intercept, line.r_squared};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "line fit needs two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidArgument, "line fit needs distinct abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.points = n;
  return fit;
}

std::vector<OrderLevel> strong_error_levels(const ConvergenceSetup& setup) {
  validate(setup);
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    const BrownianGrid grid = generate_grid(setup.T, setup.reference_tau, ctx.seed);
    const State ref = propagate_coupled(setup.initial, setup.reference_tau, grid.increments,
                                        grid.dt, setup.prm, setup.scheme);
    for (std::size_t i = 0; i < setup.taus.size(); ++i) {
      const State x = propagate_coupled(setup.initial, setup.taus[i], grid.increments, grid.dt,
                                        setup.prm, setup.scheme);
      out[i] = sq_distance(x, ref);
    }
  };
  const auto sq = reduce_ensemble(job, setup.n_paths, setup.taus.size(), setup.seeds,
                                  setup.workers);
  return rms_levels(setup.taus, sq);
}

OrderFit strong_error(const ConvergenceSetup& setup) {
  return fit_order(strong_error_levels(setup));
}

std::vector<OrderLevel> weak_error_levels(const ConvergenceSetup& setup, const Observable& g) {
  validate(setup);
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    const BrownianGrid grid = generate_grid(setup.T, setup.reference_tau, ctx.seed);
    const State ref = propagate_coupled(setup.initial, setup.reference_tau, grid.increments,
                                        grid.dt, setup.prm, setup.scheme);
    const double g_ref = g(ref);
    for (std::size_t i = 0; i < setup.taus.size(); ++i) {
      const State x = propagate_coupled(setup.initial, setup.taus[i], grid.increments, grid.dt,
                                        setup.prm, setup.scheme);
      out[i] = g(x) - g_ref;
    }
  };
  const auto diff = reduce_ensemble(job, setup.n_paths, setup.taus.size(), setup.seeds,
                                    setup.workers);
  std::vector<OrderLevel> levels;
  for (std::size_t i = 0; i < setup.taus.size(); ++i) {
    levels.push_back({setup.taus[i], std::abs(diff[i].mean), diff[i].std_error()});
  }
  return levels;
}

OrderFit weak_error(const ConvergenceSetup& setup, const Observable& g) {
  return fit_order(weak_error_levels(setup, g));
}

LongTimeError long_time_error(const ConvergenceSetup& setup, const Observable& g,
                              double record_every) {
  validate(setup);
  const double tau = setup.taus.front();
  const std::size_t coarse_stride = steps_between(record_every, tau);
  const std::size_t fine_stride = steps_between(record_every, setup.reference_tau);
  const auto n_records =
      static_cast<std::size_t>(step_count(setup.T, record_every)) + 1;
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    const BrownianGrid grid = generate_grid(setup.T, setup.reference_tau, ctx.seed);
    std::vector<State> ref(n_records);
    propagate_coupled(setup.initial, setup.reference_tau, grid.increments, grid.dt, setup.prm,
                      setup.scheme, [&](std::int64_t n, const State& x) {
                        const auto k = static_cast<std::size_t>(n);
                        if (k % fine_stride == 0) ref[k / fine_stride] = x;
                      });
    propagate_coupled(setup.initial, tau, grid.increments, grid.dt, setup.prm, setup.scheme,
                      [&](std::int64_t n, const State& x) {
                        const auto k = static_cast<std::size_t>(n);
                        if (k % coarse_stride != 0) return;
                        const std::size_t r = k / coarse_stride;
                        out[r] = sq_distance(x, ref[r]);
                        out[n_records + r] = g(x) - g(ref[r]);
                      });
  };
  const auto m = reduce_ensemble(job, setup.n_paths, 2 * n_records, setup.seeds, setup.workers);
  LongTimeError res;
  for (std::size_t r = 0; r < n_records; ++r) {
    res.times.push_back(static_cast<double>(r) * record_every);
    const double err = std::sqrt(m[r].mean);
    res.strong.push_back(err);
    res.strong_se.push_back(err > 0.0 ? m[r].std_error() / (2.0 * err) : 0.0);
    res.weak.push_back(std::abs(m[n_records + r].mean));
    res.weak_se.push_back(m[n_records + r].std_error());
  }
  return res;
}

double time_average(const Trajectory& traj, const Observable& g, double burn_in) {
  if (traj.states.empty()) throw Error(ErrorCode::EmptyWindow, "empty trajectory");
  const double horizon = traj.times.back();
  if (!(burn_in < horizon)) {
    throw Error(ErrorCode::EmptyWindow, "burn-in is not shorter than the horizon");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t n = 0; n + 1 < traj.states.size(); ++n) {
    if (traj.times[n] + 1e-12 * traj.tau < burn_in) continue;
    sum += g(traj.states[n]);
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::EmptyWindow, "no state after the burn-in");
  return sum / static_cast<double>(count);
}

EnsembleReport ergodic_averages(const ErgodicSetup& setup,
                                const std::vector<Observable>& observables) {
  const std::int64_t n_steps = step_count(setup.T, setup.tau);
  if (!(setup.burn_in < setup.T)) {
    throw Error(ErrorCode::EmptyWindow, "burn-in is not shorter than the horizon");
  }
  const auto first = static_cast<std::int64_t>(std::ceil(setup.burn_in / setup.tau - 1e-9));
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    NormalStream normals(ctx.seed);
    std::vector<double> sums(observables.size(), 0.0);
    propagate(setup.initial, n_steps, setup.tau, setup.prm, setup.scheme, normals,
              [&](std::int64_t n, const State& x) {
                if (n < first || n >= n_steps) return;
                for (std::size_t c = 0; c < observables.size(); ++c) sums[c] += observables[c](x);
              });
    const auto count = static_cast<double>(n_steps - first);
    for (std::size_t c = 0; c < observables.size(); ++c) out[c] = sums[c] / count;
  };
  EnsembleReport report = run_ensemble(job, setup.n_seeds, observables.size(), setup.seeds,
                                       setup.workers);
  report.metadata["scheme"] = setup.scheme.name();
  report.metadata["tau"] = std::to_string(setup.tau);
  report.metadata["T"] = std::to_string(setup.T);
  return report;
}

double Histogram2D::bin_area() const {
  return (range.p_hi - range.p_lo) / static_cast<double>(range.n_p) *
         (range.q_hi - range.q_lo) / static_cast<double>(range.n_q);
}

double Histogram2D::mass(std::size_t ip, std::size_t iq) const {
  return static_cast<double>(count(ip, iq)) / static_cast<double>(total);
}

double Histogram2D::p_edge(std::size_t i) const {
  return range.p_lo + (range.p_hi - range.p_lo) * static_cast<double>(i) /
                          static_cast<double>(range.n_p);
}

double Histogram2D::q_edge(std::size_t i) const {
  return range.q_lo + (range.q_hi - range.q_lo) * static_cast<double>(i) /
                          static_cast<double>(range.n_q);
}

Histogram2D empirical_distribution(std::span<const State> states, const HistogramRange& range) {
  if (range.n_p == 0 || range.n_q == 0 || !(range.p_hi > range.p_lo) ||
      !(range.q_hi > range.q_lo)) {
    throw Error(ErrorCode::DegenerateRange, "histogram range is empty");
  }
  if (states.empty()) throw Error(ErrorCode::InvalidArgument, "empty ensemble");
  Histogram2D h;
  h.range = range;
  h.counts.assign(range.n_p * range.n_q, 0);
  h.total = static_cast<std::int64_t>(states.size());
  const double sp = static_cast<double>(range.n_p) / (range.p_hi - range.p_lo);
  const double sq = static_cast<double>(range.n_q) / (range.q_hi - range.q_lo);
  for (const State& s : states) {
    const double fp = (s.p - range.p_lo) * sp;
    const double fq = (s.q - range.q_lo) * sq;
    if (!(fp >= 0.0) || !(fq >= 0.0) || fp > static_cast<double>(range.n_p) ||
        fq > static_cast<double>(range.n_q)) {
      ++h.overflow;
      continue;
    }
    // upper edges are closed
    const auto ip = std::min(static_cast<std::size_t>(fp), range.n_p - 1);
    const auto iq = std::min(static_cast<std::size_t>(fq), range.n_q - 1);
    ++h.counts[ip * range.n_q + iq];
  }
  return h;
}

double distribution_distance(const Histogram2D& h, const PhysParams& prm) {
  const PositionMarginal q_marginal(prm);
  std::vector<double> p_mass(h.range.n_p);
  std::vector<double> q_mass(h.range.n_q);
  for (std::size_t i = 0; i < h.range.n_p; ++i) {
    p_mass[i] = momentum_marginal_mass(prm, h.p_edge(i), h.p_edge(i + 1));
  }
  for (std::size_t j = 0; j < h.range.n_q; ++j) {
    q_mass[j] = q_marginal.mass(h.q_edge(j), h.q_edge(j + 1));
  }
  double dist = 0.0;
  double inside = 0.0;
  for (std::size_t i = 0; i < h.range.n_p; ++i) {
    for (std::size_t j = 0; j < h.range.n_q; ++j) {
      const double ref = p_mass[i] * q_mass[j];
      inside += ref;
      dist += std::abs(h.mass(i, j) - ref);
    }
  }
  const double emp_out = static_cast<double>(h.overflow) / static_cast<double>(h.total);
  return dist + std::abs(emp_out - std::max(0.0, 1.0 - inside));
}

std::vector<std::vector<State>> ensemble_snapshots(const SchemeSpec& scheme,
                                                   const PhysParams& prm, const State& initial,
                                                   double tau, std::span<const double> times,
                                                   std::size_t n_paths, const SeedPolicy& seeds,
                                                   unsigned workers) {
  std::vector<std::int64_t> at;
  for (double t : times) at.push_back(step_count(t, tau));
  const std::int64_t last = at.empty() ? 0 : *std::max_element(at.begin(), at.end());
  const std::size_t width = 2 * at.size();
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    NormalStream normals(ctx.seed);
    propagate(initial, last, tau, prm, scheme, normals, [&](std::int64_t n, const State& x) {
      for (std::size_t i = 0; i < at.size(); ++i) {
        if (at[i] == n) {
          out[2 * i] = x.p;
          out[2 * i + 1] = x.q;
        }
      }
    });
  };
  const auto rows = collect_paths(job, n_paths, width, seeds, workers);
  std::vector<std::vector<State>> snaps(at.size(), std::vector<State>(n_paths));
  for (std::size_t k = 0; k < n_paths; ++k) {
    for (std::size_t i = 0; i < at.size(); ++i) {
      snaps[i][k] = {rows[k * width + 2 * i], rows[k * width + 2 * i + 1]};
    }
  }
  return snaps;
}

MsdCurve msd_curve(std::span<const Trajectory> trajectories, const State& initial) {
  MsdCurve curve;
  if (trajectories.empty()) return curve;
  std::size_t len = trajectories.front().states.size();
  for (const auto& tr : trajectories) len = std::min(len, tr.states.size());
  for (std::size_t n = 0; n < len; ++n) {
    Moments m;
    for (const auto& tr : trajectories) m.add(sq_distance(tr.states[n], initial));
    curve.times.push_back(trajectories.front().times[n]);
    curve.msd.push_back(m.mean);
    curve.std_error.push_back(m.std_error());
  }
  return curve;
}

MsdCurve msd_ensemble(const SchemeSpec& scheme, const PhysParams& prm, const State& initial,
                      double tau, double T, std::size_t n_paths, const SeedPolicy& seeds,
                      unsigned workers, std::size_t stride) {
  const std::int64_t n_steps = step_count(T, tau);
  stride = std::max<std::size_t>(stride, 1);
  const std::size_t width = static_cast<std::size_t>(n_steps) / stride + 1;
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    NormalStream normals(ctx.seed);
    propagate(initial, n_steps, tau, prm, scheme, normals, [&](std::int64_t n, const State& x) {
      const auto k = static_cast<std::size_t>(n);
      if (k % stride == 0 && k / stride < width) out[k / stride] = sq_distance(x, initial);
    });
  };
  const auto m = reduce_ensemble(job, n_paths, width, seeds, workers);
  MsdCurve curve;
  for (std::size_t i = 0; i < width; ++i) {
    curve.times.push_back(static_cast<double>(i * stride) * tau);
    curve.msd.push_back(m[i].mean);
    curve.std_error.push_back(m[i].std_error());
  }
  return curve;
}

double msd_plateau(const MsdCurve& curve) {
  if (curve.times.empty()) throw Error(ErrorCode::EmptyWindow, "empty MSD curve");
  const double t_end = curve.times.back();
  const double t0 = 0.9 * t_end;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] >= t0) {
      sum += curve.msd[i];
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

LineFit msd_relaxation_fit(const MsdCurve& curve, double plateau, double t_lo, double t_hi) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    const double gap = plateau - curve.msd[i];
    if (t < t_lo || t > t_hi || !(gap > 0.0)) continue;
    x.push_back(t);
    y.push_back(std::log(gap));
  }
  return fit_line(x, y);
}

double exp_moment_rate(const PhysParams& prm) {
  const double s2 = prm.sigma() * prm.sigma();
  const double u2 = prm.upsilon() * prm.upsilon();
  return prm.upsilon() * energy_constants(prm).c_H + 0.5 * s2 + s2 * u2 * u2 / 64.0;
}

ExpMomentReport exp_moment_monitor(const SchemeSpec& scheme, const PhysParams& prm,
                                   const State& initial, double tau, double T,
                                   std::size_t n_paths, const SeedPolicy& seeds,
                                   unsigned workers) {
  const std::int64_t n_steps = step_count(T, tau);
  const double c_e = energy_constants(prm).c_e;
  const double s2 = prm.sigma() * prm.sigma();
  const auto width = static_cast<std::size_t>(n_steps) + 1;
  std::vector<double> path_max(n_paths, 0.0);
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    NormalStream normals(ctx.seed);
    double mx = 0.0;
    propagate(initial, n_steps, tau, prm, scheme, normals, [&](std::int64_t n, const State& x) {
      const double t = static_cast<double>(n) * tau;
      const double q2 = x.q * x.q;
      const double expo = c_e * (x.p * x.p + q2 * q2) * std::exp(-s2 * t);
      mx = std::max(mx, expo);
      out[static_cast<std::size_t>(n)] = std::exp(expo);
    });
    path_max[ctx.index] = mx;
  };
  const auto m = reduce_ensemble(job, n_paths, width, seeds, workers);
  ExpMomentReport rep;
  rep.log_envelope = exp_moment_rate(prm) * (T + 1.0) + energy_H(initial, prm);
  rep.max_exponent = path_max.empty() ? 0.0 : *std::max_element(path_max.begin(), path_max.end());
  rep.overflow = !(rep.max_exponent < std::log(std::numeric_limits<double>::max()));
  for (std::size_t n = 0; n < width; ++n) {
    rep.times.push_back(static_cast<double>(n) * tau);
    rep.estimates.push_back(m[n].mean);
    rep.std_errors.push_back(m[n].std_error());
    if (!std::isfinite(m[n].mean)) {
      rep.overflow = true;
    } else if (std::log(m[n].mean) > rep.log_envelope) {
      rep.divergence = true;
    }
  }
  return rep;
}

double jacobian_det(const StepMap& step, const State& s, double h) {
  if (!(h > 0.0)) h = 1e-5 * (1.0 + std::hypot(s.p, s.q));
  const State pp = step({s.p + h, s.q});
  const State pm = step({s.p - h, s.q});
  const State qp = step({s.p, s.q + h});
  const State qm = step({s.p, s.q - h});
  const double inv = 0.5 / h;
  const double a = (pp.p - pm.p) * inv;
  const double c = (pp.q - pm.q) * inv;
  const double b = (qp.p - qm.p) * inv;
  const double d = (qp.q - qm.q) * inv;
  return a * d - b * c;
}

double polygon_area(std::span<const State> v) {
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  // Area is translation invariant; centring on the first vertex limits
  // cancellation.
  const State o = v[0];
  for (std::size_t i = 0; i < n; ++i) {
    const State& a = v[i];
    const State& b = v[(i + 1) % n];
    twice += (a.p - o.p) * (b.q - o.q) - (b.p - o.p) * (a.q - o.q);
  }
  return 0.5 * std::abs(twice);
}

std::vector<AreaPoint> phase_area(const SchemeSpec& scheme, const PhysParams& prm, double tau,
                                  double T, std::size_t n_vertices, std::uint64_t seed,
                                  std::size_t record_every) {
  if (n_vertices < 3) throw Error(ErrorCode::InvalidArgument, "need at least three vertices");
  const std::int64_t n_steps = step_count(T, tau);
  record_every = std::max<std::size_t>(record_every, 1);
  std::vector<State> v(n_vertices);
  for (std::size_t k = 0; k < n_vertices; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) /
                      static_cast<double>(n_vertices);
    v[k] = {std::cos(th), std::sin(th)};
  }
  std::vector<AreaPoint> out;
  out.push_back({0.0, polygon_area(v)});
  NormalStream normals(seed);
  for (std::int64_t n = 0; n < n_steps; ++n) {
    const StepNoise noise = NormalDraw{normals()};
    for (State& x : v) {
      try {
        x = scheme_step(x, tau, prm, scheme, noise);
      } catch (Error& e) {
        e.at_step(n);
        throw;
      }
    }
    const auto k = static_cast<std::size_t>(n + 1);
    if (k % record_every == 0 || n + 1 == n_steps) {
      out.push_back({static_cast<double>(k) * tau, polygon_area(v)});
    }
  }
  return out;
}

DissipationCurves h0_dissipation_compare(const PhysParams& prm, double tau, double T,
                                         const State& initial, std::size_t n_paths,
                                         const SeedPolicy& seeds, unsigned workers) {
  const std::int64_t n_steps = step_count(T, tau);
  const auto width = static_cast<std::size_t>(n_steps) + 1;
  const auto job = [&](const PathContext& ctx, std::span<double> out) {
    NormalStream normals(ctx.seed);
    const OUIncrement inc = OUIncrement::make(tau, prm);
    State naive = initial;
    State split = initial;
    out[0] = energy_H0(naive, prm);
    out[width] = energy_H0(split, prm);
    for (std::size_t n = 1; n < width; ++n) {
      // common random numbers for both flows
      const double z = normals();
      naive = naive_substep_exact(naive, tau, prm, z);
      split = ou_substep_exact(split, inc, z);
      out[n] = energy_H0(naive, prm);
      out[width + n] = energy_H0(split, prm);
    }
  };
  const auto m = reduce_ensemble(job, n_paths, 2 * width, seeds, workers);
  DissipationCurves c;
  for (std::size_t n = 0; n < width; ++n) {
    c.times.push_back(static_cast<double>(n) * tau);
    c.naive_mean.push_back(m[n].mean);
    c.naive_se.push_back(m[n].std_error());
    c.split_mean.push_back(m[width + n].mean);
    c.split_se.push_back(m[width + n].std_error());
  }
  return c;
}

std::vector<LyapunovResult> lyapunov_check(const SchemeSpec& scheme, const PhysParams& prm,
                                           double tau, std::span<const State> states,
                                           std::size_t n_draws, const SeedPolicy& seeds,
                                           unsigned workers) {
  const double c_h = energy_constants(prm).c_H;
  const double contraction = std::exp(-prm.upsilon() * tau);
  const double beta = prm.sigma() * prm.sigma() * -std::expm1(-prm.upsilon() * tau) /
                          (2.0 * prm.upsilon()) +
                      c_h * -std::expm1(-prm.upsilon() * tau);
  std::vector<LyapunovResult> results;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State x0 = states[i];
    const SeedPolicy local{splitmix64(seeds.master_seed + i)};
    const auto job = [&](const PathContext& ctx, std::span<double> out) {
      NormalStream normals(ctx.seed);
      const State x1 = scheme_step(x0, tau, prm, scheme, NormalDraw{normals()});
      out[0] = energy_H(x1, prm) + c_h;
    };
    const auto m = reduce_ensemble(job, n_draws, 1, local, workers);
    LyapunovResult r;
    r.state = x0;
    r.mean = m[0].mean;
    r.std_error = m[0].std_error();
    r.bound = contraction * (energy_H(x0, prm) + c_h) + beta;
    r.margin = r.bound + 3.0 * r.std_error - r.mean;
    // rounding slack for the noiseless equality case
    r.pass = r.margin >= -1e-12 * std::abs(r.bound);
    results.push_back(r);
  }
  return results;
}

Observable named_observable(const std::string& name) {
  if (name == "sin_sin") return [](const State& x) { return std::sin(x.p) * std::sin(x.q); };
  if (name == "sin_r") return [](const State& x) { return std::sin(std::hypot(x.p, x.q)); };
  if (name == "sin_1_r") {
    return [](const State& x) { return std::sin(1.0 + std::hypot(x.p, x.q)); };
  }
  if (name == "p2") return [](const State& x) { return x.p * x.p; };
  if (name == "q2") return [](const State& x) { return x.q * x.q; };
  if (name == "q4") return [](const State& x) { return x.q * x.q * x.q * x.q; };
  throw Error(ErrorCode::ConfigError, "unknown observable '" + name + "'");
}

}  // namespace splitlangevin
