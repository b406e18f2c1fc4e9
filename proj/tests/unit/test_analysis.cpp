#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "splitlangevin/analysis.hpp"
#include "splitlangevin/error.hpp"

using namespace splitlangevin;

namespace {

std::vector<State> gibbs_samples(const PhysParams& prm, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> p(0.0, prm.sigma() / std::sqrt(2.0 * prm.upsilon()));
  const PositionMarginal pos(prm);
  std::uniform_real_distribution<double> q(-pos.cutoff(), pos.cutoff());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double scale = 2.0 * prm.upsilon() / (prm.sigma() * prm.sigma());
  std::vector<State> out;
  out.reserve(n);
  while (out.size() < n) {
    const double x = q(rng);
    if (u(rng) < std::exp(-scale * std::pow(x, 4) / 4.0)) out.push_back({p(rng), x});
  }
  return out;
}

ConvergenceSetup small_setup() {
  SchemeSpec spec;
  return {spec, PhysParams(10.0, 1.0), State{1.0, 1.0}, 0.25,
          {std::ldexp(1.0, -4), std::ldexp(1.0, -5), std::ldexp(1.0, -6)},
          std::ldexp(1.0, -8), 64, SeedPolicy{11}, 4};
}

}  // namespace

TEST_CASE("fit_order recovers exact power laws") {
  std::vector<std::pair<double, double>> lin;
  std::vector<std::pair<double, double>> quad;
  for (int k = 6; k <= 10; ++k) {
    const double t = std::ldexp(1.0, -k);
    lin.emplace_back(t, 3.0 * t);
    quad.emplace_back(t, t * t);
  }
  const OrderFit a = fit_order(std::span<const std::pair<double, double>>(lin));
  CHECK(a.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  const OrderFit b = fit_order(std::span<const std::pair<double, double>>(quad));
  CHECK(std::abs(b.slope - 2.0) < 1e-12);
}

TEST_CASE("fit_order errors") {
  std::vector<std::pair<double, double>> two{{0.1, 0.1}, {0.05, 0.05}};
  CHECK_THROWS_AS(fit_order(std::span<const std::pair<double, double>>(two)), Error);
  std::vector<std::pair<double, double>> zero{{0.1, 0.1}, {0.05, 0.0}, {0.025, 0.02}};
  try {
    (void)fit_order(std::span<const std::pair<double, double>>(zero));
    FAIL("expected NonPositiveError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveError);
  }
}

TEST_CASE("fit_line") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, -1.0, -3.0, -5.0};
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.points == 4);
}

TEST_CASE("strong error of a scheme against itself is zero") {
  ConvergenceSetup s = small_setup();
  s.taus = {s.reference_tau};
  const auto levels = strong_error_levels(s);
  REQUIRE(levels.size() == 1);
  CHECK(levels[0].error == 0.0);
}

TEST_CASE("strong error decreases with tau and is worker invariant") {
  ConvergenceSetup s = small_setup();
  const auto a = strong_error_levels(s);
  s.workers = 1;
  const auto b = strong_error_levels(s);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].error == b[i].error);
    CHECK(a[i].std_error > 0.0);
  }
  CHECK(a[0].error > a[1].error);
  CHECK(a[1].error > a[2].error);
  s.reference_tau = 0.03;
  CHECK_THROWS_AS(strong_error_levels(s), Error);
}

TEST_CASE("weak error of a constant observable is zero") {
  const auto levels = weak_error_levels(small_setup(), [](const State&) { return 1.5; });
  for (const auto& l : levels) CHECK(l.error == 0.0);
}

TEST_CASE("long-time error sampling grid") {
  ConvergenceSetup s = small_setup();
  s.T = 1.0;
  const LongTimeError e = long_time_error(s, named_observable("sin_1_r"), 0.25);
  REQUIRE(e.times.size() == 5);
  CHECK(e.times.front() == 0.0);
  CHECK(e.strong.front() == 0.0);
  CHECK(e.times.back() == doctest::Approx(1.0));
  CHECK(e.strong.back() > 0.0);
}

TEST_CASE("named observables") {
  CHECK(named_observable("sin_sin")(State{1.0, 2.0}) == doctest::Approx(std::sin(1.0) * std::sin(2.0)));
  CHECK(named_observable("sin_r")(State{3.0, 4.0}) == doctest::Approx(std::sin(5.0)));
  CHECK(named_observable("q4")(State{0.0, 2.0}) == 16.0);
  CHECK_THROWS_AS(named_observable("cos"), Error);
}

TEST_CASE("time_average") {
  Trajectory tr;
  for (int n = 0; n <= 10; ++n) {
    tr.times.push_back(0.1 * n);
    tr.states.push_back({static_cast<double>(n), 0.0});
  }
  CHECK(time_average(tr, [](const State&) { return 2.0; }, 0.0) == 2.0);
  // left endpoint average over t in [0.5, 1)
  CHECK(time_average(tr, [](const State& s) { return s.p; }, 0.5) == doctest::Approx(7.0));
  CHECK_THROWS_AS(time_average(tr, [](const State&) { return 1.0; }, 1.0), Error);
  CHECK_THROWS_AS(time_average(Trajectory{}, [](const State&) { return 1.0; }, 0.0), Error);
}

TEST_CASE("ergodic averages are worker invariant") {
  ErgodicSetup s{SchemeSpec{}, PhysParams(15.0, 1.0), State{0.0, 0.0}, std::ldexp(1.0, -6),
                 4.0, 1.0, 8, SeedPolicy{3}, 1};
  const std::vector<Observable> obs{named_observable("p2"), named_observable("q4")};
  const auto a = ergodic_averages(s, obs);
  s.workers = 4;
  const auto b = ergodic_averages(s, obs);
  REQUIRE(a.records.size() == 2);
  CHECK(a.records[0].estimate == b.records[0].estimate);
  CHECK(a.records[1].std_error == b.records[1].std_error);
  CHECK(a.records[0].estimate > 0.0);
}

TEST_CASE("empirical distribution") {
  const HistogramRange range;
  const std::vector<State> origin(50, State{0.0, 0.0});
  const Histogram2D h = empirical_distribution(origin, range);
  std::size_t nonzero = 0;
  std::int64_t sum = 0;
  for (auto c : h.counts) {
    nonzero += c > 0 ? 1 : 0;
    sum += c;
  }
  CHECK(nonzero == 1);
  CHECK(sum == 50);
  CHECK(h.overflow == 0);

  const std::vector<State> mixed{{0.0, 0.0}, {5.0, 0.0}, {0.5, 1.4}, {-0.99, -1.49}};
  const Histogram2D m = empirical_distribution(mixed, range);
  std::int64_t inside = 0;
  double mass = 0.0;
  for (std::size_t i = 0; i < range.n_p; ++i) {
    for (std::size_t j = 0; j < range.n_q; ++j) {
      inside += m.count(i, j);
      mass += m.mass(i, j);
    }
  }
  CHECK(inside + m.overflow == m.total);
  CHECK(m.overflow == 1);
  CHECK(mass == doctest::Approx(0.75));
  CHECK(m.p_edge(0) == -1.0);
  CHECK(m.q_edge(range.n_q) == 1.5);

  HistogramRange bad = range;
  bad.p_hi = bad.p_lo;
  CHECK_THROWS_AS(empirical_distribution(origin, bad), Error);
  bad = range;
  bad.n_q = 0;
  CHECK_THROWS_AS(empirical_distribution(origin, bad), Error);
  CHECK_THROWS_AS(empirical_distribution(std::vector<State>{}, range), Error);
}

TEST_CASE("distribution distance oracles") {
  const PhysParams prm(15.0, 1.0);
  const HistogramRange range;
  SUBCASE("direct Gibbs samples are close") {
    const auto samples = gibbs_samples(prm, 1000000, 8);
    CHECK(distribution_distance(empirical_distribution(samples, range), prm) < 0.05);
  }
  SUBCASE("a delta histogram is nearly disjoint") {
    const std::vector<State> origin(10, State{0.0, 0.0});
    const Histogram2D h = empirical_distribution(origin, range);
    const double dp = (range.p_hi - range.p_lo) / range.n_p;
    const double dq = (range.q_hi - range.q_lo) / range.n_q;
    const double bin_mass = momentum_marginal_mass(prm, 0.0, dp) * PositionMarginal(prm).mass(0.0, dq);
    CHECK(distribution_distance(h, prm) == doctest::Approx(2.0 * (1.0 - bin_mass)).epsilon(1e-6));
  }
  SUBCASE("distance does not depend on sample order") {
    auto samples = gibbs_samples(prm, 5000, 2);
    const double d1 = distribution_distance(empirical_distribution(samples, range), prm);
    std::reverse(samples.begin(), samples.end());
    CHECK(distribution_distance(empirical_distribution(samples, range), prm) == d1);
  }
}

TEST_CASE("ensemble snapshots") {
  const std::vector<double> times{0.0, 0.5};
  const auto snaps = ensemble_snapshots(SchemeSpec{}, PhysParams(15.0, 1.0), State{0.0, 0.0},
                                        std::ldexp(1.0, -6), times, 32, SeedPolicy{1}, 4);
  REQUIRE(snaps.size() == 2);
  CHECK(snaps[0].size() == 32);
  for (const auto& s : snaps[0]) CHECK(s == State{0.0, 0.0});
  CHECK_FALSE(snaps[1][0] == State{0.0, 0.0});
}

TEST_CASE("MSD") {
  SUBCASE("starts at zero") {
    const MsdCurve c = msd_ensemble(SchemeSpec{}, PhysParams(15.0, 1.0), State{0.5, 0.5},
                                    std::ldexp(1.0, -6), 1.0, 16, SeedPolicy{2}, 2);
    CHECK(c.times.front() == 0.0);
    CHECK(c.msd.front() == 0.0);
    CHECK(c.msd.back() > 0.0);
  }
  SUBCASE("sigma = 0 at the origin stays zero") {
    const MsdCurve c = msd_ensemble(SchemeSpec{}, PhysParams(15.0, 0.0), State{0.0, 0.0},
                                    std::ldexp(1.0, -6), 1.0, 4, SeedPolicy{2}, 2);
    for (double v : c.msd) CHECK(v == 0.0);
  }
  SUBCASE("stored trajectories") {
    std::vector<Trajectory> trs;
    for (std::uint64_t k = 0; k < 3; ++k) {
      trs.push_back(simulate(State{0.0, 0.0}, 0.5, 0.125, PhysParams(10.0, 1.0), SchemeSpec{}, k));
    }
    const MsdCurve c = msd_curve(trs, State{0.0, 0.0});
    CHECK(c.msd.size() == 5);
    double expect = 0.0;
    for (const auto& tr : trs) {
      expect += tr.states.back().p * tr.states.back().p + tr.states.back().q * tr.states.back().q;
    }
    CHECK(c.msd.back() == doctest::Approx(expect / 3.0));
  }
  SUBCASE("plateau and relaxation fit of a synthetic curve") {
    MsdCurve c;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 0.01 * i;
      c.times.push_back(t);
      c.msd.push_back(1.0 - std::exp(-2.0 * t));
      c.std_error.push_back(0.0);
    }
    const LineFit f = msd_relaxation_fit(c, 1.0, 0.0, 2.0);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(msd_plateau(c) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("exponential moment monitor") {
  const PhysParams prm(10.0, 1.0);
  const State x0{0.5, 0.8};
  const auto rep = exp_moment_monitor(SchemeSpec{}, prm, x0, std::ldexp(1.0, -6), 0.25, 200,
                                      SeedPolicy{4}, 4);
  CHECK(rep.estimates.front() == std::exp(0.125 * (0.25 + std::pow(0.8, 4))));
  CHECK(rep.std_errors.front() == 0.0);
  CHECK_FALSE(rep.overflow);
  CHECK_FALSE(rep.divergence);
  CHECK(rep.log_envelope == doctest::Approx(exp_moment_rate(prm) * 1.25 + energy_H(x0, prm)));
  CHECK(exp_moment_rate(prm) == doctest::Approx(10.0 * (1e4 / 64.0 + 1.0) + 0.5 + 1e4 / 64.0));

  const auto quiet = exp_moment_monitor(SchemeSpec{}, PhysParams(10.0, 0.01), State{0.0, 0.0},
                                        std::ldexp(1.0, -6), 0.25, 50, SeedPolicy{4}, 2);
  for (double e : quiet.estimates) CHECK(e == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("jacobian determinants") {
  const PhysParams prm(2.0, 1.0);
  CHECK(jacobian_det([](const State& s) { return s; }, State{0.3, 0.4}) == doctest::Approx(1.0).epsilon(1e-12));
  const double tau = 1e-4;
  CHECK(jacobian_det([&](const State& s) { return ou_substep_exact(s, tau, prm, 0.3); },
                     State{1.0, -1.0}) == doctest::Approx(std::exp(-prm.upsilon() * tau)).epsilon(1e-10));
  SchemeSpec se;
  se.map_kind = MapKind::SymplecticEuler;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z;
  const double expect = std::exp(-2e-4);
  const State s{0.7, -1.3};
  double lo = 1e9;
  double hi = -1e9;
  for (int i = 0; i < 100; ++i) {
    const double zi = z(rng);
    const double d = jacobian_det(
        [&](const State& x) { return lie_trotter_step(x, tau, prm, se, NormalDraw{zi}); }, s);
    CHECK(std::abs(d / expect - 1.0) <= 1e-6);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(hi - lo <= 1e-8);
}

TEST_CASE("phase area") {
  SchemeSpec se;
  se.map_kind = MapKind::SymplecticEuler;
  const std::size_t n = 10000;
  const double ngon = 0.5 * n * std::sin(2.0 * std::numbers::pi / n);
  SUBCASE("initial polygon") {
    const auto pts = phase_area(se, PhysParams(2.0, 1.0), 1e-4, 0.0, n, 1, 1);
    REQUIRE(pts.size() == 1);
    CHECK(std::abs(pts[0].area - std::numbers::pi) < 1e-6);
  }
  SUBCASE("sigma = 0 contracts by exp(-upsilon t)") {
    const auto pts = phase_area(se, PhysParams(2.0, 0.0), 1e-3, 0.2, n, 1, 50);
    REQUIRE(pts.size() == 5);
    for (const auto& p : pts) {
      CHECK(std::abs(p.area / (ngon * std::exp(-2.0 * p.t)) - 1.0) <= 1e-3);
    }
  }
  std::vector<State> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_area(square) == doctest::Approx(1.0));
  CHECK_THROWS_AS(phase_area(se, PhysParams(2.0, 1.0), 1e-4, 0.1, 2, 1, 1), Error);
}

TEST_CASE("dissipation curves in the noiseless limit") {
  const PhysParams prm(2.0, 0.0);
  const State x0{1.0, 1.2};
  const auto c = h0_dissipation_compare(prm, 0.01, 0.5, x0, 4, SeedPolicy{1}, 1);
  REQUIRE(c.times.size() == 51);
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    const double t = c.times[i];
    const double q4 = std::pow(1.2, 4) / 4.0;
    CHECK(c.naive_mean[i] == doctest::Approx(q4 + std::exp(-4.0 * t) * 0.5).epsilon(1e-12));
    CHECK(c.split_mean[i] == doctest::Approx(std::exp(-2.0 * t) * 0.5 + std::exp(-4.0 * t) * q4).epsilon(1e-12));
  }
}

TEST_CASE("dissipation with noise from (0, 2)") {
  const PhysParams prm(10.0, 1.0);
  const State x0{0.0, 2.0};
  const auto c = h0_dissipation_compare(prm, 1e-3, 1.0, x0, 2000, SeedPolicy{5}, 4);
  const double h0 = energy_H0(x0, prm);
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    CHECK(c.naive_mean[i] + 3.0 * c.naive_se[i] >= h0);
    if (c.times[i] >= 0.2 - 1e-12) CHECK(c.split_mean[i] < 0.5 * h0);
  }
}

TEST_CASE("one-step Lyapunov check") {
  const std::vector<State> states{{0.0, 0.0}, {1.0, 1.0}, {2.0, -1.0}};
  SUBCASE("sigma = 0 holds deterministically") {
    const auto res = lyapunov_check(SchemeSpec{}, PhysParams(10.0, 0.0), std::ldexp(1.0, -6),
                                    states, 10, SeedPolicy{1}, 1);
    for (const auto& r : res) {
      CHECK(r.pass);
      CHECK(r.margin >= 0.0);
      CHECK(r.std_error == 0.0);
    }
  }
  SUBCASE("origin: only the noise term") {
    const PhysParams prm(10.0, 1.0);
    const double tau = std::ldexp(1.0, -6);
    const auto res = lyapunov_check(SchemeSpec{}, prm, tau, std::vector<State>{{0.0, 0.0}},
                                    100000, SeedPolicy{2}, 4);
    const double c_h = energy_constants(prm).c_H;
    const double expect = (1.0 - std::exp(-10.0 * tau)) / 20.0;
    CHECK(std::abs(res[0].mean - c_h - expect) < 4.0 * res[0].std_error);
  }
  SUBCASE("all conservative maps pass at (1, 1)") {
    for (MapKind k : {MapKind::AVF, MapKind::DG, MapKind::PAVF}) {
      SchemeSpec spec;
      spec.map_kind = k;
      const auto res = lyapunov_check(spec, PhysParams(10.0, 1.0), std::ldexp(1.0, -8), states,
                                      20000, SeedPolicy{3}, 4);
      for (const auto& r : res) CHECK(r.pass);
    }
  }
}
