#include "splitlangevin/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "splitlangevin/error.hpp"

namespace splitlangevin {

namespace {

constexpr double kQuadratureRelTol = 1e-10;
// exp(-37) < 1e-16
constexpr double kTailExponent = 37.0;

double integrate(const auto& f, double a, double b) {
  double err = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, kQuadratureRelTol * 1e-2, &err, &l1);
  if (!std::isfinite(value) || err > kQuadratureRelTol * std::max(l1, 1e-300)) {
    throw Error(ErrorCode::QuadratureFailure,
                "quadrature did not reach relative tolerance: error estimate " +
                    std::to_string(err) + " on integral " + std::to_string(value));
  }
  return value;
}

void require_noise(const PhysParams& prm) {
  if (!(prm.sigma() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "Gibbs measure requires sigma > 0");
  }
}

}  // namespace

bool is_finite(const State& s) noexcept {
  return std::isfinite(s.p) && std::isfinite(s.q);
}

double Potential::midpoint_defect(double a, double b) const {
  return avg_grad(a, b) - grad(0.5 * (a + b));
}

double Potential::midpoint_defect_db(double a, double b) const {
  return avg_grad_db(a, b) - 0.5 * hess(0.5 * (a + b));
}

double QuarticPotential::value(double q) const {
  const double q2 = q * q;
  return 0.25 * q2 * q2;
}

double QuarticPotential::grad(double q) const { return q * q * q; }

double QuarticPotential::hess(double q) const { return 3.0 * q * q; }

// (b^4 - a^4) / (4 (b - a)) without the removable singularity.
double QuarticPotential::avg_grad(double a, double b) const {
  return 0.25 * (a + b) * (a * a + b * b);
}

double QuarticPotential::avg_grad_db(double a, double b) const {
  return 0.25 * (a * a + 2.0 * a * b + 3.0 * b * b);
}

double QuarticPotential::midpoint_defect(double a, double b) const {
  const double d = b - a;
  return 0.125 * (a + b) * d * d;
}

double QuarticPotential::midpoint_defect_db(double a, double b) const {
  return 0.125 * (b - a) * (a + 3.0 * b);
}

std::shared_ptr<const Potential> quartic_potential() {
  static const auto instance = std::make_shared<const QuarticPotential>();
  return instance;
}

PhysParams::PhysParams(double upsilon, double sigma,
                       std::shared_ptr<const Potential> potential)
    : upsilon_(upsilon), sigma_(sigma), potential_(std::move(potential)) {
  if (!(upsilon > 0.0) || !std::isfinite(upsilon)) {
    throw Error(ErrorCode::InvalidArgument, "upsilon must be positive and finite");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative and finite");
  }
  if (!potential_) {
    throw Error(ErrorCode::InvalidArgument, "potential must not be null");
  }
}

PhysParams PhysParams::with_sigma(double sigma) const {
  return PhysParams(upsilon_, sigma, potential_);
}

double grad_U(double q) { return q * q * q; }

double energy_H0(const State& s, const PhysParams& prm) {
  return 0.5 * s.p * s.p + prm.potential().value(s.q);
}

double energy_H0(const State& s) {
  const double q2 = s.q * s.q;
  return 0.5 * s.p * s.p + 0.25 * q2 * q2;
}

double energy_H(const State& s, const PhysParams& prm) {
  return energy_H0(s, prm) + 0.5 * prm.upsilon() * s.p * s.q;
}

double gibbs_log_density(const State& s, const PhysParams& prm) {
  require_noise(prm);
  return -2.0 * prm.upsilon() / (prm.sigma() * prm.sigma()) * energy_H0(s, prm);
}

EnergyConstants energy_constants(const PhysParams& prm) {
  const double u2 = prm.upsilon() * prm.upsilon();
  return {u2 * u2 / 64.0 + 1.0, 1.0 / 8.0};
}

PositionMarginal::PositionMarginal(const PhysParams& prm)
    : prm_(prm), scale_(0.0), q_max_(1.0), z_(0.0) {
  require_noise(prm);
  scale_ = 2.0 * prm.upsilon() / (prm.sigma() * prm.sigma());
  const Potential& pot = prm.potential();
  while (scale_ * (pot.value(q_max_) - pot.value(0.0)) < kTailExponent) {
    q_max_ *= 1.25;
  }
  // The density is even for the shipped potential, but integrate both halves
  // so asymmetric potentials stay correct.
  z_ = integrate([this](double q) { return density_unnormalized(q); }, -q_max_, 0.0) +
       integrate([this](double q) { return density_unnormalized(q); }, 0.0, q_max_);
}

double PositionMarginal::density_unnormalized(double q) const {
  return std::exp(-scale_ * (prm_.potential().value(q) - prm_.potential().value(0.0)));
}

double PositionMarginal::density(double q) const { return density_unnormalized(q) / z_; }

double PositionMarginal::mass(double a, double b) const {
  if (b < a) return -mass(b, a);
  a = std::max(a, -q_max_);
  b = std::min(b, q_max_);
  if (b <= a) return 0.0;
  return integrate([this](double q) { return density_unnormalized(q); }, a, b) / z_;
}

double momentum_marginal_mass(const PhysParams& prm, double a, double b) {
  require_noise(prm);
  const double sd = prm.sigma() / std::sqrt(2.0 * prm.upsilon());
  const double s = 1.0 / (sd * std::sqrt(2.0));
  return 0.5 * (std::erf(b * s) - std::erf(a * s));
}

GibbsMoments gibbs_moments(const PhysParams& prm) {
  require_noise(prm);
  const double var = prm.sigma() * prm.sigma() / (2.0 * prm.upsilon());
  const PositionMarginal marginal(prm);
  const double qmax = marginal.cutoff();
  const auto second = [&](double q) { return q * q * marginal.density(q); };
  const double eq2 = integrate(second, -qmax, 0.0) + integrate(second, 0.0, qmax);
  if (dynamic_cast<const QuarticPotential*>(&prm.potential()) != nullptr) {
    // int q^4 e^{-c q^4} / int e^{-c q^4} = 1/(4c), c = upsilon / (2 sigma^2)
    return {var, eq2, var};
  }
  const auto fourth = [&](double q) { return q * q * q * q * marginal.density(q); };
  return {var, eq2, integrate(fourth, -qmax, 0.0) + integrate(fourth, 0.0, qmax)};
}

}  // namespace splitlangevin
