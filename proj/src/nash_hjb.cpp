#include "mfglab/nash_hjb.hpp"

#include <algorithm>
#include <cmath>

#include "mfglab/master_entropy.hpp"

namespace mfglab {

double ValueTable::value(double t, int k) const {
  const std::size_t i = grid_.segment(t);
  const double t0 = grid_[i];
  const double t1 = grid_[i + 1];
  const double w = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
  return (1.0 - w) * at_node(i, k) + w * at_node(i + 1, k);
}

double ValueTable::value(double t, SimplexFraction mu) const {
  if (mu.denominator() != N_) throw std::invalid_argument("ValueTable: fraction has wrong denominator");
  return value(t, mu.count());
}

double ValueTable::value(double t, PlayerState x, SimplexFraction mu) const {
  return x == PlayerState::kPlus ? value(t, mu) : value(t, mu.complement());
}

void value_rhs(int N, const std::vector<double>& V, std::vector<double>& dVdt) {
  for (int k = 0; k <= N; ++k) {
    const double z = V[N - k] - V[k];
    double d = hamiltonian(z);
    // Couplings to mu -/+ 1/N carry the factors N mu = k and N(1-mu) = N-k,
    // which vanish exactly where the neighbour leaves S_N.
    if (k > 0) d -= k * negative_part(z) * (V[k - 1] - V[k]);
    if (k < N) d -= (N - k) * negative_part(V[k + 1] - V[N - k - 1]) * (V[k + 1] - V[k]);
    dVdt[k] = d;
  }
}

ValueTable solve_value(int N, double T, ValueSolveOptions options) {
  if (N < 1) throw std::invalid_argument("solve_value: N must be at least 1");
  if (!(T > 0.0)) throw std::invalid_argument("solve_value: T must be positive");
  const double step = options.max_step > 0.0 ? options.max_step : std::min(1e-3, T / 1000.0);
  TimeGrid grid = TimeGrid::uniform(T, step);

  const std::size_t width = static_cast<std::size_t>(N) + 1;
  std::vector<double> values(grid.size() * width);
  OdeState V(width);
  for (int k = 0; k <= N; ++k) {
    V[k] = -(2.0 * static_cast<double>(k) - N) / N;
    values[(grid.size() - 1) * width + k] = V[k];
  }

  auto rhs = [N](const OdeState& y, OdeState& dydt, double) { value_rhs(N, y, dydt); };
  for (std::size_t i = grid.size() - 1; i > 0; --i) {
    integrate_rk45(rhs, V, grid[i], grid[i - 1], options.tol, 0.5 * (grid[i] - grid[i - 1]));
    std::copy(V.begin(), V.end(), values.begin() + static_cast<std::ptrdiff_t>((i - 1) * width));
  }
  return ValueTable(N, std::move(grid), std::move(values));
}

double z_n(const ValueTable& table, double t, SimplexFraction mu) {
  return table.value(t, mu.complement()) - table.value(t, mu);
}

double nash_rate(const ValueTable& table, double t, PlayerState x, SimplexFraction mu) {
  const double z = z_n(table, t, mu);
  return x == PlayerState::kPlus ? negative_part(z) : positive_part(z);
}

double w_n(const ValueTable& table, double t, SimplexFraction mu) {
  if (!mu.has_next()) throw std::invalid_argument("w_n: mu + 1/N leaves S_N");
  return table.value(t, mu) - table.value(t, mu.next());
}

double verify_sign_property(const ValueTable& table) {
  const int N = table.players_minus_one();
  double worst = 0.0;
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    for (int k = 0; k <= N; ++k) {
      const double z = table.at_node(i, N - k) - table.at_node(i, k);
      if (2 * k >= N) worst = std::max(worst, negative_part(z));
      if (2 * k <= N) worst = std::max(worst, positive_part(z));
    }
  }
  return worst;
}

double verify_w_nonnegative(const ValueTable& table) {
  const int N = table.players_minus_one();
  double worst = 0.0;
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    for (int k = 0; k < N; ++k) {
      if (2 * k <= N) continue;
      worst = std::max(worst, negative_part(table.at_node(i, k) - table.at_node(i, k + 1)));
    }
  }
  return worst;
}

bool outside_shock_band(int k, int N, double eps) {
  return std::abs(2.0 * k - N) >= 2.0 * eps * N - 1e-9;
}

double convergence_error(const ValueTable& table, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("convergence_error: eps must be positive");
  const int N = table.players_minus_one();
  const double T = table.horizon();
  double worst = 0.0;
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    const double t = table.grid()[i];
    for (int k = 0; k <= N; ++k) {
      if (!outside_shock_band(k, N, eps)) continue;
      const double mu = static_cast<double>(k) / N;
      worst = std::max(worst, std::abs(table.at_node(i, k) - u_star(t, mu, T)));
    }
  }
  return worst;
}

double convergence_error(int N, double T, double eps, ValueSolveOptions options) {
  return convergence_error(solve_value(N, T, options), eps);
}

double discrete_lipschitz(const ValueTable& table, double eps) {
  const int N = table.players_minus_one();
  double worst = 0.0;
  for (std::size_t i = 0; i < table.grid().size(); ++i) {
    for (int k = 0; k < N; ++k) {
      if (!outside_shock_band(k, N, eps) || !outside_shock_band(k + 1, N, eps)) continue;
      // Skip the pair that straddles the shock.
      if ((2 * k - N) * (2 * (k + 1) - N) < 0) continue;
      worst = std::max(worst, N * std::abs(table.at_node(i, k + 1) - table.at_node(i, k)));
    }
  }
  return worst;
}

}  // namespace mfglab
