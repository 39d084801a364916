#pragma once

#include <vector>

#include "mfglab/ode.hpp"
#include "mfglab/simplex_core.hpp"

namespace mfglab {

struct ValueSolveOptions {
  OdeTolerances tol{};
  /// Storage grid step; <= 0 selects min(1e-3, T/1000).
  double max_step = 0.0;
};

/// Reduced value V^N(t, mu) = V^N(t, 1, mu) of the N+1-player game on a
/// dense time grid, mu = k/N ranging over S_N. The value of a player at -1
/// follows from V^N(t, -1, mu) = V^N(t, 1, 1 - mu).
class ValueTable {
 public:
  int players_minus_one() const { return N_; }
  double horizon() const { return grid_.horizon(); }
  const TimeGrid& grid() const { return grid_; }

  /// Value at grid node i and count k.
  double at_node(std::size_t i, int k) const { return values_[i * stride() + k]; }
  /// Linear interpolation in t.
  double value(double t, int k) const;
  double value(double t, SimplexFraction mu) const;
  /// V^N(t, x, mu) for either player state.
  double value(double t, PlayerState x, SimplexFraction mu) const;

 private:
  friend ValueTable solve_value(int N, double T, ValueSolveOptions options);
  ValueTable(int N, TimeGrid grid, std::vector<double> values)
      : N_(N), grid_(std::move(grid)), values_(std::move(values)) {}
  std::size_t stride() const { return static_cast<std::size_t>(N_) + 1; }

  int N_;
  TimeGrid grid_;
  std::vector<double> values_;
};

/// Right-hand side dV/dt of the closed N-player HJB system at one instant.
void value_rhs(int N, const std::vector<double>& V, std::vector<double>& dVdt);

/// Integrates the HJB system backward from V^N(T, mu) = -(2 mu - 1).
ValueTable solve_value(int N, double T, ValueSolveOptions options = {});

/// Z^N(t, mu) = V^N(t, 1 - mu) - V^N(t, mu).
double z_n(const ValueTable& table, double t, SimplexFraction mu);

/// Nash flip rate of a player in state x who sees a fraction mu of the
/// other N players at +1: [Z^N]^- for x = 1, [Z^N]^+ for x = -1.
double nash_rate(const ValueTable& table, double t, PlayerState x, SimplexFraction mu);

/// W^N(t, mu) = V^N(t, mu) - V^N(t, mu + 1/N). Throws for mu = 1.
double w_n(const ValueTable& table, double t, SimplexFraction mu);

/// Largest violation over grid nodes of Z^N >= 0 on mu >= 1/2 and
/// Z^N <= 0 on mu <= 1/2.
double verify_sign_property(const ValueTable& table);

/// Largest violation of W^N >= 0 over mu > 1/2 on grid nodes.
double verify_w_nonnegative(const ValueTable& table);

/// True when |mu - 1/2| >= eps, i.e. mu lies in S_N^eps.
bool outside_shock_band(int k, int N, double eps);

/// max over grid nodes and mu in S_N^eps of |V^N(t, mu) - U*(t, mu)|.
double convergence_error(const ValueTable& table, double eps);
double convergence_error(int N, double T, double eps, ValueSolveOptions options = {});

/// max over grid nodes of N |V^N(t, mu + 1/N) - V^N(t, mu)| with both
/// points in S_N^eps: a discrete Lipschitz constant away from the shock.
double discrete_lipschitz(const ValueTable& table, double eps);

}  // namespace mfglab
