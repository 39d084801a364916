#pragma once

#include <vector>

#include "mfglab/ode.hpp"
#include "mfglab/simplex_core.hpp"

namespace mfglab {

// The master equation reduces to a scalar conservation law for
//   Z(tau, m) = U(T - tau, -1, m) - U(T - tau, 1, m)
// in remaining time tau:
//   Z_tau + d/dm ( m Z|Z|/2 - Z^2/2 ) = 0,   Z(0, m) = 2m.
// Its entropy solution follows the sign-matched root of the consistency
// cubic and jumps at m = 0 once tau > 1/2.

/// Root of T^2 M^3 + T(2-T) M|M| + (1-2T) M - m = 0 (with T = tau) sharing
/// the sign of m; 0 at m = 0.
double sign_root(double tau, MeanState m);

/// lim_{m -> 0+} sign_root(tau, m) (side > 0) or lim_{m -> 0-} (side < 0),
/// from the quadratic factor of the cubic at m = 0. Zero for tau <= 1/2.
double branch_limit(double tau, int side);

/// Z(tau, m) = 2 M / (tau |M| + 1) with M = sign_root(tau, m).
double entropy_Z(double tau, MeanState m);

/// Flux g(m, z) = m z|z|/2 - z^2/2 of the conservation law.
double entropy_flux(double m, double z);

struct JumpCheck {
  double tau;
  double z_plus;
  double z_minus;
  bool jump_ok;
  /// |g(0, Z-) - g(0, Z+)|; zero for the stationary shock.
  double rh_residual;
};

/// Shock diagnostics at m = 0. Throws std::domain_error for tau <= 1/2,
/// where the two branches merge and no discontinuity exists.
JumpCheck check_entropy_jump(double tau);

/// Value U(t, x, m) of the master equation built along the selected branch.
double value_U(double t, PlayerState x, MeanState m, double T);

/// U*(t, mu) = U(t, 1, 2 mu - 1).
double u_star(double t, double mu, double T);

/// Entropy solution on a fixed horizon.
class EntropyField {
 public:
  explicit EntropyField(double horizon);

  double horizon() const { return T_; }
  double M(double tau, MeanState m) const { return sign_root(tau, m); }
  double Z(double tau, MeanState m) const { return entropy_Z(tau, m); }
  double U(double t, PlayerState x, MeanState m) const { return value_U(t, x, m, T_); }
  double Ustar(double t, double mu) const { return u_star(t, mu, T_); }

 private:
  double T_;
};

/// Central-difference residual of the conservation law at (tau, m) with
/// step h in both variables. Throws std::domain_error if the m-stencil
/// touches m = 0 or leaves [-1, 1], or if tau < h.
double pde_residual(const EntropyField& field, double tau, double m, double h);

/// Solution of m' = -m |Z(T-t, m)| + Z(T-t, m), m(0) = m0 != 0, sampled on a grid.
class InducedFlow {
 public:
  double initial_mean() const { return m0_; }
  double horizon() const { return grid_.horizon(); }
  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& samples() const { return m_; }

  /// Linear interpolation between grid samples.
  double m_at(double t) const;
  /// Z(T - t, m*(t)), the flip intensity of the limit process.
  double z_at(double t) const;
  double terminal() const { return m_.back(); }

 private:
  friend InducedFlow induced_flow(MeanState m0, double T, const TimeGrid& grid, OdeTolerances tol);
  InducedFlow(double m0, TimeGrid grid, std::vector<double> m, std::vector<double> z)
      : m0_(m0), grid_(std::move(grid)), m_(std::move(m)), z_(std::move(z)) {}

  double m0_;
  TimeGrid grid_;
  std::vector<double> m_;
  std::vector<double> z_;
};

/// Rejects m0 = 0, where the induced equation has several solutions.
InducedFlow induced_flow(MeanState m0, double T, const TimeGrid& grid, OdeTolerances tol = {});

}  // namespace mfglab
