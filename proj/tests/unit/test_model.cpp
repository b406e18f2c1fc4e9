#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "splitlangevin/error.hpp"
#include "splitlangevin/model.hpp"

using namespace splitlangevin;

TEST_CASE("grad_U examples") {
  CHECK(grad_U(0.0) == 0.0);
  CHECK(grad_U(1.0) == 1.0);
  CHECK(grad_U(-2.0) == -8.0);
}

TEST_CASE("energy_H0 examples") {
  CHECK(energy_H0(State{0.0, 0.0}) == 0.0);
  CHECK(energy_H0(State{1.0, 0.0}) == 0.5);
  CHECK(energy_H0(State{1.0, 1.0}) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("energy_H examples") {
  CHECK(energy_H(State{0.0, 0.0}, PhysParams(7.0, 1.0)) == 0.0);
  CHECK(energy_H(State{1.0, 1.0}, PhysParams(2.0, 1.0)) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(energy_H(State{0.3, 0.0}, PhysParams(10.0, 1.0)) == doctest::Approx(0.045).epsilon(1e-15));
}

TEST_CASE("H - H0 is the coupling term") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const PhysParams prm(10.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const State s{u(rng), u(rng)};
    const double diff = energy_H(s, prm) - energy_H0(s, prm);
    CHECK(diff == doctest::Approx(5.0 * s.p * s.q).epsilon(1e-9));
  }
}

TEST_CASE("gibbs_log_density examples") {
  CHECK(gibbs_log_density(State{0.0, 0.0}, PhysParams(3.0, 1.0)) == 0.0);
  CHECK(gibbs_log_density(State{1.0, 0.0}, PhysParams(1.0, 1.0)) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(gibbs_log_density(State{1.0, 0.0}, PhysParams(1.0, 0.0)), Error);
}

TEST_CASE("PhysParams rejects invalid values") {
  for (double ups : {0.0, -1.0, std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::infinity()}) {
    try {
      PhysParams(ups, 1.0);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidArgument);
    }
  }
  CHECK_THROWS_AS(PhysParams(1.0, -0.5), Error);
  CHECK_NOTHROW(PhysParams(1.0, 0.0));
  CHECK(PhysParams(2.0, 1.0).with_sigma(0.5).sigma() == 0.5);
}

TEST_CASE("energy constants and the equivalence chain") {
  for (double ups : {2.0, 10.0, 15.0}) {
    const PhysParams prm(ups, 1.0);
    const auto c = energy_constants(prm);
    CHECK(c.c_H == doctest::Approx(std::pow(ups, 4) / 64.0 + 1.0));
    CHECK(c.c_e == 0.125);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    bool lower_ok = true;
    bool shift_ok = true;
    bool upper_ok = true;
    for (int i = 0; i < 1000000; ++i) {
      const State s{u(rng), u(rng)};
      const double h = energy_H(s, prm);
      const double w = s.p * s.p + std::pow(s.q, 4);
      shift_ok = shift_ok && h + c.c_H >= 1.0;
      lower_ok = lower_ok && c.c_e * w <= h + c.c_H + std::pow(ups, 4) / 8.0;
      upper_ok = upper_ok && h <= (0.5 + ups / 4.0) * (w + 1.0);
    }
    CHECK(shift_ok);
    CHECK(lower_ok);
    CHECK(upper_ok);
  }
}

TEST_CASE("gibbs_moments at upsilon = 15") {
  const auto g = gibbs_moments(PhysParams(15.0, 1.0));
  CHECK(g.Ep2 == doctest::Approx(1.0 / 30.0).epsilon(1e-14));
  CHECK(g.Eq4 == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
  const double gamma_ratio = std::tgamma(0.75) / std::tgamma(0.25);
  CHECK(g.Eq2 == doctest::Approx(gamma_ratio * std::sqrt(2.0 / 15.0)).epsilon(1e-10));
}

TEST_CASE("gibbs_moments scales with sigma") {
  const auto g = gibbs_moments(PhysParams(10.0, 2.0));
  CHECK(g.Ep2 == doctest::Approx(4.0 / 20.0));
  // E[q^4] = sigma^2 / (2 upsilon) for the quartic potential
  CHECK(g.Eq4 == doctest::Approx(4.0 / 20.0).epsilon(1e-10));
}

TEST_CASE("Ep2 matches the sample variance of Gaussian draws") {
  const PhysParams prm(15.0, 1.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, std::sqrt(1.0 / 30.0));
  double s2 = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double x = n(rng);
    s2 += x * x;
  }
  const double var = s2 / count;
  // relative standard error of a variance estimate is sqrt(2 / n)
  CHECK(std::abs(var - gibbs_moments(prm).Ep2) < 4.0 * std::sqrt(2.0 / count) / 30.0);
}

TEST_CASE("position and momentum marginals are normalized") {
  const PhysParams prm(15.0, 1.0);
  const PositionMarginal pos(prm);
  CHECK(pos.mass(-pos.cutoff(), pos.cutoff()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pos.mass(0.0, pos.cutoff()) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(pos.density(0.0) == doctest::Approx(1.0 / pos.normalizer()));
  CHECK(momentum_marginal_mass(prm, -10.0, 10.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(momentum_marginal_mass(prm, 0.0, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("quartic potential closed forms") {
  const auto& u = *quartic_potential();
  CHECK(u.value(2.0) == 4.0);
  CHECK(u.hess(2.0) == 12.0);
  CHECK(u.avg_grad(0.0, 1.0) == doctest::Approx(0.25));
  CHECK(u.avg_grad(2.0, 2.0) == doctest::Approx(8.0));
  CHECK(u.avg_grad(-1.0, 1.0) == 0.0);
  for (double a : {-1.3, 0.0, 0.7}) {
    for (double b : {-0.4, 0.9, 2.0}) {
      const double h = 1e-6;
      const double fd = (u.avg_grad(a, b + h) - u.avg_grad(a, b - h)) / (2 * h);
      CHECK(u.avg_grad_db(a, b) == doctest::Approx(fd).epsilon(1e-7));
      const double mid = u.avg_grad(a, b) - u.grad(0.5 * (a + b));
      CHECK(u.midpoint_defect(a, b) == doctest::Approx(mid).epsilon(1e-12));
      const double fdd = (u.midpoint_defect(a, b + h) - u.midpoint_defect(a, b - h)) / (2 * h);
      CHECK(u.midpoint_defect_db(a, b) == doctest::Approx(fdd).epsilon(1e-6));
    }
  }
}
