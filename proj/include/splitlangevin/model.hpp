#pragma once

#include <memory>

namespace splitlangevin {

/// Phase point of the one-dimensional Langevin system.
struct State {
  double p = 0.0;  // momentum
  double q = 0.0;  // position

  friend bool operator==(const State&, const State&) = default;
};

bool is_finite(const State& s) noexcept;

/// Confining potential U(q). Besides value and gradient, the conservative
/// maps need the chord average of U' and its derivative in the moving
/// endpoint.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual double value(double q) const = 0;
  virtual double grad(double q) const = 0;
  virtual double hess(double q) const = 0;

  /// int_0^1 U'(a + s (b - a)) ds, i.e. (U(b) - U(a)) / (b - a) for a != b.
  virtual double avg_grad(double a, double b) const = 0;
  /// d/db of avg_grad(a, b).
  virtual double avg_grad_db(double a, double b) const = 0;

  /// avg_grad(a, b) - U'((a + b) / 2), the gap closed by the discrete
  /// gradient correction. Override when a cancellation-free form exists.
  virtual double midpoint_defect(double a, double b) const;
  virtual double midpoint_defect_db(double a, double b) const;
};

/// U(q) = q^4 / 4.
class QuarticPotential final : public Potential {
 public:
  double value(double q) const override;
  double grad(double q) const override;
  double hess(double q) const override;
  double avg_grad(double a, double b) const override;
  double avg_grad_db(double a, double b) const override;
  double midpoint_defect(double a, double b) const override;
  double midpoint_defect_db(double a, double b) const override;
};

std::shared_ptr<const Potential> quartic_potential();

/// Friction, noise amplitude and potential of
///   dP = -upsilon P dt - U'(Q) dt + sigma dW,  dQ = P dt.
class PhysParams {
 public:
  /// Throws Error(InvalidArgument) unless upsilon > 0 and sigma >= 0.
  /// sigma = 0 is accepted so the deterministic limits can be exercised.
  PhysParams(double upsilon, double sigma,
             std::shared_ptr<const Potential> potential = quartic_potential());

  double upsilon() const noexcept { return upsilon_; }
  double sigma() const noexcept { return sigma_; }
  const Potential& potential() const noexcept { return *potential_; }
  const std::shared_ptr<const Potential>& potential_ptr() const noexcept {
    return potential_;
  }

  PhysParams with_sigma(double sigma) const;

 private:
  double upsilon_;
  double sigma_;
  std::shared_ptr<const Potential> potential_;
};

double grad_U(double q);

/// H0(p, q) = p^2/2 + U(q).
double energy_H0(const State& s, const PhysParams& prm);
/// Quartic convenience overload.
double energy_H0(const State& s);

/// Modified Hamiltonian H = H0 + (upsilon/2) p q, conserved by the
/// deterministic part of the splitting.
double energy_H(const State& s, const PhysParams& prm);

/// Unnormalized log of the Gibbs density exp(-(2 upsilon / sigma^2) H0).
double gibbs_log_density(const State& s, const PhysParams& prm);

struct EnergyConstants {
  double c_H;  // H + c_H >= 1
  double c_e;  // c_e (p^2 + q^4) <= H + c_H + upsilon^4 / 8
};

EnergyConstants energy_constants(const PhysParams& prm);

struct GibbsMoments {
  double Ep2;
  double Eq2;
  double Eq4;
};

/// Stationary moments of the Gibbs measure. Ep2 and Eq4 are closed form;
/// Eq2 comes from adaptive Gauss-Kronrod quadrature at relative tolerance
/// 1e-10 and throws Error(QuadratureFailure) if that is not reached.
GibbsMoments gibbs_moments(const PhysParams& prm);

/// Position marginal of the Gibbs measure, proportional to
/// exp(-(2 upsilon / sigma^2) U(q)). Integrals of the normalized density.
class PositionMarginal {
 public:
  explicit PositionMarginal(const PhysParams& prm);

  double density(double q) const;
  /// Mass of [a, b].
  double mass(double a, double b) const;
  double normalizer() const noexcept { return z_; }
  /// Beyond this radius the unnormalized integrand is below 1e-16.
  double cutoff() const noexcept { return q_max_; }

 private:
  double density_unnormalized(double q) const;

  PhysParams prm_;
  double scale_;  // 2 upsilon / sigma^2
  double q_max_;
  double z_;
};

/// Momentum marginal: N(0, sigma^2 / (2 upsilon)). Mass of [a, b].
double momentum_marginal_mass(const PhysParams& prm, double a, double b);

}  // namespace splitlangevin
