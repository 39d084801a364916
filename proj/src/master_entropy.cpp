#include "mfglab/master_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfglab/mfg_solutions.hpp"

namespace mfglab {

double sign_root(double tau, MeanState m_state) {
  if (tau < 0.0) throw std::invalid_argument("sign_root: tau must be nonnegative");
  const double m = m_state.value();
  if (m == 0.0) return 0.0;
  if (m < 0.0) return -sign_root(tau, MeanState(-m));
  if (tau == 0.0) return m;
  // On [0, 1] the cubic starts at -m < 0, decreases to the fold
  // (2tau-1)/(3tau) when that is positive, then increases to 1 - m >= 0.
  const double lo = std::max(0.0, (2.0 * tau - 1.0) / (3.0 * tau));
  return solve_monotone_piece(lo, 1.0, tau, m);
}

double branch_limit(double tau, int side) {
  if (tau <= 0.5) return 0.0;
  const double root = std::sqrt(tau * tau + 4.0 * tau);
  if (side > 0) {
    // tau^2 M^2 + tau(2-tau) M + (1-2tau) = 0, positive root.
    return std::max(0.0, ((tau - 2.0) + root) / (2.0 * tau));
  }
  // tau^2 M^2 - tau(2-tau) M + (1-2tau) = 0, negative root.
  return std::min(0.0, ((2.0 - tau) - root) / (2.0 * tau));
}

double entropy_Z(double tau, MeanState m) {
  const double M = sign_root(tau, m);
  return 2.0 * M / (tau * std::abs(M) + 1.0);
}

double entropy_flux(double m, double z) { return 0.5 * m * z * std::abs(z) - 0.5 * z * z; }

JumpCheck check_entropy_jump(double tau) {
  if (!(tau > 0.5)) {
    std::ostringstream os;
    os << "check_entropy_jump: no discontinuity at tau=" << tau << " <= 1/2";
    throw std::domain_error(os.str());
  }
  const double m_plus = branch_limit(tau, +1);
  const double m_minus = branch_limit(tau, -1);
  JumpCheck out{};
  out.tau = tau;
  out.z_plus = 2.0 * m_plus / (tau * std::abs(m_plus) + 1.0);
  out.z_minus = 2.0 * m_minus / (tau * std::abs(m_minus) + 1.0);
  out.jump_ok = std::abs(out.z_plus + out.z_minus) <= 1e-10 && out.z_plus >= 0.0;
  out.rh_residual = std::abs(entropy_flux(0.0, out.z_minus) - entropy_flux(0.0, out.z_plus));
  return out;
}

double value_U(double t, PlayerState x, MeanState m, double T) {
  if (t < -kBoundTolerance || t > T + kBoundTolerance) {
    throw std::invalid_argument("value_U: t outside [0, T]");
  }
  const double tau = std::clamp(T - t, 0.0, T);
  if (m.value() == 0.0) return 0.0;
  if (m.value() < 0.0) return value_U(t, flipped(x), MeanState(-m.value()), T);
  // Along the positive branch z > 0, so a player at +1 never flips and pays
  // only the terminal cost -M; a player at -1 is worse off by z.
  const double M = sign_root(tau, m);
  if (x == PlayerState::kPlus) return -M;
  return -M + 2.0 * M / (tau * M + 1.0);
}

double u_star(double t, double mu, double T) {
  return value_U(t, PlayerState::kPlus, fraction_to_mean(mu), T);
}

EntropyField::EntropyField(double horizon) : T_(horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("EntropyField: horizon must be positive");
}

double pde_residual(const EntropyField& field, double tau, double m, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("pde_residual: h must be positive");
  if (std::abs(m) - h <= 1e-12 || std::abs(m) + h > 1.0) {
    throw std::domain_error("pde_residual: stencil leaves the smooth region");
  }
  if (tau < h) throw std::domain_error("pde_residual: tau - h is negative");
  const double dz_dtau =
      (field.Z(tau + h, MeanState(m)) - field.Z(tau - h, MeanState(m))) / (2.0 * h);
  const double flux_hi = entropy_flux(m + h, field.Z(tau, MeanState(m + h)));
  const double flux_lo = entropy_flux(m - h, field.Z(tau, MeanState(m - h)));
  return std::abs(dz_dtau + (flux_hi - flux_lo) / (2.0 * h));
}

double InducedFlow::m_at(double t) const {
  const std::size_t i = grid_.segment(t);
  const double t0 = grid_[i];
  const double t1 = grid_[i + 1];
  const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  return (1.0 - w) * m_[i] + w * m_[i + 1];
}

double InducedFlow::z_at(double t) const {
  const std::size_t i = grid_.segment(t);
  const double t0 = grid_[i];
  const double t1 = grid_[i + 1];
  const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  return (1.0 - w) * z_[i] + w * z_[i + 1];
}

InducedFlow induced_flow(MeanState m0, double T, const TimeGrid& grid, OdeTolerances tol) {
  if (m0.value() == 0.0) {
    throw std::invalid_argument("induced_flow: m0 = 0 has no unique induced solution");
  }
  if (std::abs(grid.horizon() - T) > 1e-12) {
    throw std::invalid_argument("induced_flow: grid horizon does not match T");
  }
  auto field = [T](double t, double m) {
    const double z = entropy_Z(std::max(0.0, T - t), MeanState(std::clamp(m, -1.0, 1.0)));
    return -m * std::abs(z) + z;
  };
  auto rhs = [&field](const OdeState& y, OdeState& dydt, double t) { dydt[0] = field(t, y[0]); };

  std::vector<double> m(grid.size());
  std::vector<double> z(grid.size());
  OdeState y{m0.value()};
  m[0] = y[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    integrate_rk45(rhs, y, grid[i - 1], grid[i], tol, 0.25 * (grid[i] - grid[i - 1]));
    m[i] = y[0];
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    z[i] = entropy_Z(std::max(0.0, T - grid[i]), MeanState(std::clamp(m[i], -1.0, 1.0)));
  }
  return InducedFlow(m0.value(), grid, std::move(m), std::move(z));
}

}  // namespace mfglab
