#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mfglab/master_entropy.hpp"
#include "mfglab/nash_hjb.hpp"

namespace mfglab {

/// Dominating flip rate of the uniformized clocks. Every rate in the model
/// is bounded by sup |Z^N| <= 2.
inline constexpr double kDominatingRate = 2.0;

struct SimConfig {
  /// Number of players minus one (the game has N + 1 players).
  int N = 1;
  double T = 2.0;
  /// P(xi_i = +1) of the i.i.d. initial law.
  double mu0 = 0.5;
  /// Explicit initial states in {-1, +1}; overrides mu0 when set.
  std::optional<std::vector<int>> initial;
  std::uint64_t seed = 0;
  int replications = 1;
  /// Negate the sampled initial configuration while keeping every clock
  /// and mark; used to check the sign-flip symmetry.
  bool mirror = false;

  int players() const { return N + 1; }
  void validate() const;
};

struct JumpEvent {
  double t;
  int player;
  /// State after the jump.
  int state;
};

/// Right-continuous piecewise-constant trajectories of all players.
struct ParticlePath {
  std::vector<int> initial;
  std::vector<JumpEvent> jumps;

  int players() const { return static_cast<int>(initial.size()); }
  std::vector<int> states_at(double t) const;
  std::vector<int> terminal() const;
  /// #{i : x_i = +1} at time t.
  int count_at(double t) const;
  int jump_count(int player) const;
  /// Empirical mean (1/(N+1)) sum_i x_i at time t.
  double empirical_mean(double t) const;
};

/// Nash dynamics Y and limit process X~ driven by the same clocks and marks.
struct CoupledPaths {
  ParticlePath nash;
  ParticlePath limit;
  /// sup_t |Y_i(t) - X~_i(t)| per player, each 0 or 2.
  std::vector<int> sup_distance;
  std::int64_t clock_ticks = 0;
};

/// Initial configuration of one replication; draws the first uniform of
/// every player stream.
std::vector<int> sample_initial(const SimConfig& cfg, int replication);

std::vector<ParticlePath> simulate_nash(const SimConfig& cfg, const ValueTable& table);
ParticlePath simulate_nash_replication(const SimConfig& cfg, const ValueTable& table, int replication);

std::vector<ParticlePath> simulate_iid_limit(const SimConfig& cfg, const EntropyField& field,
                                             const InducedFlow& flow);

std::vector<CoupledPaths> simulate_coupled(const SimConfig& cfg, const ValueTable& table,
                                           const EntropyField& field, const InducedFlow& flow);
CoupledPaths simulate_coupled_replication(const SimConfig& cfg, const ValueTable& table,
                                          const InducedFlow& flow, int replication);

/// Steps along a Nash path that break the absorbing bands: a decrease of
/// k after k >= N/2 + 1 was reached, or an increase after k <= N/2 - 1.
int absorbing_band_violations(const ParticlePath& path, int N);

struct ChaosEstimate {
  int N;
  /// Estimate of E[sup_t |Y_i - X~_i|], averaged over the exchangeable players.
  double estimate;
  double standard_error;
  int replications;
};

/// Runs the coupled simulation for every N and estimates the propagation
/// of chaos distance. Requires mu0 != 1/2.
std::vector<ChaosEstimate> chaos_metric(const std::vector<int>& Ns, double mu0, double T, int replications,
                                        std::uint64_t seed, ValueSolveOptions options = {});
ChaosEstimate chaos_metric(const SimConfig& cfg, const ValueTable& table);

/// Least-squares slope of log(estimate) against log(N).
double loglog_slope(const std::vector<ChaosEstimate>& estimates);

struct ZeroStartCheckpoint {
  double t;
  /// Average over replications of |empirical mean at t|.
  double mean_abs_empirical;
  /// Branch m_+(t) of the MFG solution from m0 = 0.
  double m_plus;
};

struct ZeroStartResult {
  int N;
  double T;
  int replications;
  int plus = 0;
  int minus = 0;
  int zero = 0;
  double mean_abs_terminal = 0.0;
  std::vector<ZeroStartCheckpoint> checkpoints;

  double frequency_plus() const { return static_cast<double>(plus) / replications; }
  double frequency_minus() const { return static_cast<double>(minus) / replications; }
  double frequency_zero() const { return static_cast<double>(zero) / replications; }
};

/// Sign of the terminal empirical mean with a dead band |mean| < 1/N.
int classify_terminal_sign(double mean, int N);

/// Nash dynamics from the symmetric i.i.d. start mu0 = 1/2.
ZeroStartResult zero_start_experiment(const SimConfig& cfg, const ValueTable& table, int checkpoints = 10);

/// Whether a configuration with `plus` players at +1 out of N + 1 avoids
/// the band (N/2 - N eps, N/2 + N eps + 1) around the shock.
bool configuration_in_band_complement(int plus, int N, double eps);

/// Fraction of sampled initial configurations outside Sigma_N^eps.
double initial_outside_fraction(const SimConfig& cfg, double eps);

/// Chebyshev bound on P(xi not in Sigma_N^eps) for mu0 = 1/2 + 2 eps,
/// valid when N >= 2 / eps.
double initial_outside_bound(int N, double eps);

/// Runs body(i) for i in [0, count) on a pool of threads. Each index is
/// visited exactly once; results must be written to per-index slots.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace mfglab
