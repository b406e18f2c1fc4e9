#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "splitlangevin/model.hpp"
#include "splitlangevin/montecarlo.hpp"
#include "splitlangevin/splitting.hpp"

namespace splitlangevin {

using Observable = std::function<double(const State&)>;

/// "sin_sin" sin(p) sin(q), "sin_r" sin(r), "sin_1_r" sin(1 + r) with
/// r = |(p, q)|, and the moments "p2", "q2", "q4". Throws Error(ConfigError).
Observable named_observable(const std::string& name);

// ---------------------------------------------------------------------------
// Convergence orders

struct OrderLevel {
  double tau = 0.0;
  double error = 0.0;
  double std_error = 0.0;
};

struct OrderFit {
  std::vector<OrderLevel> levels;
  double slope = 0.0;
  double intercept = 0.0;  // log(error) at log(tau) = 0
  double r_squared = 0.0;
};

/// Least squares of log(error) against log(tau). Needs >= 3 levels; throws
/// Error(NonPositiveError) if an error is <= 0 (usually a Monte Carlo noise
/// floor: more paths are needed).
OrderFit fit_order(std::span<const std::pair<double, double>> levels);
OrderFit fit_order(std::vector<OrderLevel> levels);

/// Coarse levels and a fine reference, all driven by one Brownian grid per
/// path with spacing reference_tau.
struct ConvergenceSetup {
  SchemeSpec scheme;
  PhysParams prm;
  State initial;
  double T = 1.0;
  std::vector<double> taus;
  double reference_tau = 0.0;
  std::size_t n_paths = 1000;
  SeedPolicy seeds{};
  unsigned workers = 1;
};

/// Root-mean-square terminal error per level. std_error by the delta method.
std::vector<OrderLevel> strong_error_levels(const ConvergenceSetup& setup);
OrderFit strong_error(const ConvergenceSetup& setup);

/// |mean(g(X_tau(T)) - g(X_ref(T)))| per level on coupled paths.
std::vector<OrderLevel> weak_error_levels(const ConvergenceSetup& setup, const Observable& g);
OrderFit weak_error(const ConvergenceSetup& setup, const Observable& g);

struct LongTimeError {
  std::vector<double> times;
  std::vector<double> strong;  // RMS error
  std::vector<double> strong_se;
  std::vector<double> weak;  // |mean difference of g|
  std::vector<double> weak_se;
};

/// Strong and weak errors of setup.taus[0] against the reference, sampled
/// every `record_every` time units.
LongTimeError long_time_error(const ConvergenceSetup& setup, const Observable& g,
                              double record_every);

// ---------------------------------------------------------------------------
// Ergodic averages

/// Left-endpoint average of g over states with burn_in <= t_n < t_N.
/// Throws Error(EmptyWindow) when no state qualifies.
double time_average(const Trajectory& traj, const Observable& g, double burn_in);

struct ErgodicSetup {
  SchemeSpec scheme;
  PhysParams prm;
  State initial;
  double tau = 0.0;
  double T = 0.0;
  double burn_in = 0.0;
  std::size_t n_seeds = 100;
  SeedPolicy seeds{};
  unsigned workers = 1;
};

/// One long path per seed; record c holds the across-seed mean and standard
/// error of the time average of observables[c].
EnsembleReport ergodic_averages(const ErgodicSetup& setup,
                                const std::vector<Observable>& observables);

// ---------------------------------------------------------------------------
// Empirical distribution

struct HistogramRange {
  double p_lo = -1.0;
  double p_hi = 1.0;
  double q_lo = -1.5;
  double q_hi = 1.5;
  std::size_t n_p = 40;
  std::size_t n_q = 40;
};

/// Bin counts over a rectangle. Samples outside it are counted in
/// `overflow`, so sum(counts) + overflow == total.
struct Histogram2D {
  HistogramRange range;
  std::vector<std::int64_t> counts;  // row-major, p index major
  std::int64_t overflow = 0;
  std::int64_t total = 0;

  std::int64_t count(std::size_t ip, std::size_t iq) const { return counts[ip * range.n_q + iq]; }
  double mass(std::size_t ip, std::size_t iq) const;
  double bin_area() const;
  double p_edge(std::size_t i) const;
  double q_edge(std::size_t i) const;
};

/// Throws Error(DegenerateRange) for empty or inverted ranges or zero bins,
/// Error(InvalidArgument) for an empty sample.
Histogram2D empirical_distribution(std::span<const State> states, const HistogramRange& range);

/// L1 distance between bin masses and the Gibbs mass of each bin, plus the
/// mismatch of the mass outside the rectangle.
double distribution_distance(const Histogram2D& h, const PhysParams& prm);

/// States of every path at the requested times (multiples of tau);
/// result[i][k] is path k at times[i].
std::vector<std::vector<State>> ensemble_snapshots(const SchemeSpec& scheme,
                                                   const PhysParams& prm, const State& initial,
                                                   double tau, std::span<const double> times,
                                                   std::size_t n_paths, const SeedPolicy& seeds,
                                                   unsigned workers);

// ---------------------------------------------------------------------------
// Mean square displacement

struct MsdCurve {
  std::vector<double> times;
  std::vector<double> msd;
  std::vector<double> std_error;
};

/// MSD over stored trajectories sharing their initial value.
MsdCurve msd_curve(std::span<const Trajectory> trajectories, const State& initial);

/// Streaming MSD over n_paths exact-noise paths, recorded every `stride`
/// steps.
MsdCurve msd_ensemble(const SchemeSpec& scheme, const PhysParams& prm, const State& initial,
                      double tau, double T, std::size_t n_paths, const SeedPolicy& seeds,
                      unsigned workers, std::size_t stride = 1);

/// Mean over the final 10% of the horizon.
double msd_plateau(const MsdCurve& curve);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Fit of log(plateau - MSD(t)) against t over t in [t_lo, t_hi], skipping
/// points where the gap is not positive.
LineFit msd_relaxation_fit(const MsdCurve& curve, double plateau, double t_lo, double t_hi);

// ---------------------------------------------------------------------------
// Exponential integrability

struct ExpMomentReport {
  std::vector<double> times;
  std::vector<double> estimates;  // E[exp(c_e (P^2 + Q^4) / e^{sigma^2 t})]
  std::vector<double> std_errors;
  double max_exponent = 0.0;
  double log_envelope = 0.0;  // C (T + 1) + H(X0)
  bool overflow = false;      // some sample exponent exceeded the double range
  bool divergence = false;    // some estimate exceeded the envelope
};

/// Growth constant upsilon C_H + sigma^2/2 + sigma^2 upsilon^4 / 64 of the
/// exponential moment bound.
double exp_moment_rate(const PhysParams& prm);

ExpMomentReport exp_moment_monitor(const SchemeSpec& scheme, const PhysParams& prm,
                                   const State& initial, double tau, double T,
                                   std::size_t n_paths, const SeedPolicy& seeds,
                                   unsigned workers);

// ---------------------------------------------------------------------------
// Structure diagnostics

using StepMap = std::function<State(const State&)>;

/// Central-difference Jacobian determinant. h <= 0 selects
/// 1e-5 (1 + |s|).
double jacobian_det(const StepMap& step, const State& s, double h = 0.0);

struct AreaPoint {
  double t;
  double area;
};

/// Polygon area enclosed by `vertices` (shoelace formula).
double polygon_area(std::span<const State> vertices);

/// Evolves n_vertices points of the unit circle with one shared noise
/// realization and records the enclosed area every `record_every` steps.
std::vector<AreaPoint> phase_area(const SchemeSpec& scheme, const PhysParams& prm, double tau,
                                  double T, std::size_t n_vertices, std::uint64_t seed,
                                  std::size_t record_every = 1);

struct DissipationCurves {
  std::vector<double> times;
  std::vector<double> naive_mean;  // E[H0] under the classical sub-step
  std::vector<double> naive_se;
  std::vector<double> split_mean;  // E[H0] under the dissipative sub-step
  std::vector<double> split_se;
};

/// E[H0] along both stochastic sub-flows from the same initial value.
DissipationCurves h0_dissipation_compare(const PhysParams& prm, double tau, double T,
                                         const State& initial, std::size_t n_paths,
                                         const SeedPolicy& seeds, unsigned workers);

struct LyapunovResult {
  State state;
  double mean = 0.0;  // Monte Carlo E[H(X_1) + C_H]
  double std_error = 0.0;
  double bound = 0.0;  // e^{-upsilon tau} (H(X_0) + C_H) + beta
  double margin = 0.0;  // bound + 3 SE - mean
  bool pass = false;
};

/// One-step check of E[H(X_1) + C_H | X_0] <= e^{-upsilon tau}(H(X_0) + C_H) + beta,
/// beta = sigma^2 (1 - e^{-upsilon tau}) / (2 upsilon) + C_H (1 - e^{-upsilon tau}),
/// at 3 standard errors. Violations are reported, never thrown.
std::vector<LyapunovResult> lyapunov_check(const SchemeSpec& scheme, const PhysParams& prm,
                                           double tau, std::span<const State> states,
                                           std::size_t n_draws, const SeedPolicy& seeds,
                                           unsigned workers);

}  // namespace splitlangevin
