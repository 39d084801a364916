#include "mfglab/ctmc_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

#include "mfglab/mfg_solutions.hpp"
#include "mfglab/rng.hpp"

namespace mfglab {

void parallel_for(int count, const std::function<void(int)>& body) {
  if (count <= 0) return;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void SimConfig::validate() const {
  if (N < 1) throw std::invalid_argument("SimConfig: N must be at least 1");
  if (!(T > 0.0)) throw std::invalid_argument("SimConfig: T must be positive");
  if (!(mu0 >= 0.0 && mu0 <= 1.0)) throw std::invalid_argument("SimConfig: mu0 must lie in [0, 1]");
  if (replications < 1) throw std::invalid_argument("SimConfig: replications must be at least 1");
  if (initial) {
    if (static_cast<int>(initial->size()) != players()) {
      throw std::invalid_argument("SimConfig: explicit initial configuration has wrong size");
    }
    for (int x : *initial) player_state_from_int(x);
  }
}

std::vector<int> ParticlePath::states_at(double t) const {
  std::vector<int> x = initial;
  for (const auto& e : jumps) {
    if (e.t > t) break;
    x[e.player] = e.state;
  }
  return x;
}

std::vector<int> ParticlePath::terminal() const {
  std::vector<int> x = initial;
  for (const auto& e : jumps) x[e.player] = e.state;
  return x;
}

int ParticlePath::count_at(double t) const {
  const auto x = states_at(t);
  return static_cast<int>(std::count(x.begin(), x.end(), 1));
}

int ParticlePath::jump_count(int player) const {
  return static_cast<int>(
      std::count_if(jumps.begin(), jumps.end(), [player](const JumpEvent& e) { return e.player == player; }));
}

double ParticlePath::empirical_mean(double t) const {
  const auto x = states_at(t);
  double s = 0.0;
  for (int v : x) s += v;
  return s / static_cast<double>(x.size());
}

namespace {

double checked_rate(double r) {
  if (r > kDominatingRate * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "flip rate " << r << " exceeds the dominating rate " << kDominatingRate;
    throw NumericalError(os.str());
  }
  return r;
}

// One replication of the uniformized dynamics. Each player owns a Poisson
// clock of rate 2 and a stream of uniform marks; at a tick, every active
// process flips that player iff mark * 2 < its own rate. The Nash process
// and the limit process therefore share clocks and marks.
CoupledPaths run_replication(const SimConfig& cfg, const ValueTable* table, const InducedFlow* flow,
                             int replication) {
  const int players = cfg.players();
  std::vector<PlayerStream> streams;
  streams.reserve(static_cast<std::size_t>(players));
  std::vector<int> x0(static_cast<std::size_t>(players));
  for (int i = 0; i < players; ++i) {
    streams.emplace_back(cfg.seed, static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(i));
    const double u = streams.back().uniform();
    x0[i] = cfg.initial ? (*cfg.initial)[i] : (u < cfg.mu0 ? 1 : -1);
    if (cfg.mirror) x0[i] = -x0[i];
  }

  CoupledPaths out;
  out.nash.initial = x0;
  out.limit.initial = x0;
  out.sup_distance.assign(static_cast<std::size_t>(players), 0);
  std::vector<int> y = x0;
  std::vector<int> x = x0;
  int plus_count = static_cast<int>(std::count(y.begin(), y.end(), 1));

  using Tick = std::pair<double, int>;
  std::priority_queue<Tick, std::vector<Tick>, std::greater<>> clocks;
  for (int i = 0; i < players; ++i) clocks.emplace(streams[i].exponential(kDominatingRate), i);

  while (!clocks.empty()) {
    const auto [t, i] = clocks.top();
    clocks.pop();
    if (t > cfg.T) break;
    ++out.clock_ticks;
    const double mark = streams[i].uniform() * kDominatingRate;

    if (table != nullptr) {
      const SimplexFraction others(plus_count - (y[i] == 1 ? 1 : 0), cfg.N);
      const double r = checked_rate(nash_rate(*table, t, player_state_from_int(y[i]), others));
      if (mark < r) {
        y[i] = -y[i];
        plus_count += y[i];
        out.nash.jumps.push_back({t, i, y[i]});
      }
    }
    if (flow != nullptr) {
      const double z = flow->z_at(t);
      const double r = checked_rate(x[i] == 1 ? negative_part(z) : positive_part(z));
      if (mark < r) {
        x[i] = -x[i];
        out.limit.jumps.push_back({t, i, x[i]});
      }
    }
    if (table != nullptr && flow != nullptr && x[i] != y[i]) out.sup_distance[i] = 2;
    clocks.emplace(t + streams[i].exponential(kDominatingRate), i);
  }
  return out;
}

void check_table(const SimConfig& cfg, const ValueTable& table) {
  if (table.players_minus_one() != cfg.N || std::abs(table.horizon() - cfg.T) > 1e-12) {
    throw std::invalid_argument("simulation: value table solved for a different (N, T)");
  }
}

void check_flow(const SimConfig& cfg, const InducedFlow& flow) {
  if (std::abs(cfg.mu0 - 0.5) <= kBoundTolerance && !cfg.initial) {
    throw std::invalid_argument("simulation: the limit process needs mu0 != 1/2");
  }
  if (std::abs(flow.horizon() - cfg.T) > 1e-12) {
    throw std::invalid_argument("simulation: induced flow has a different horizon");
  }
}

}  // namespace

std::vector<int> sample_initial(const SimConfig& cfg, int replication) {
  cfg.validate();
  std::vector<int> x0(static_cast<std::size_t>(cfg.players()));
  for (int i = 0; i < cfg.players(); ++i) {
    PlayerStream s(cfg.seed, static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(i));
    const double u = s.uniform();
    x0[i] = cfg.initial ? (*cfg.initial)[i] : (u < cfg.mu0 ? 1 : -1);
    if (cfg.mirror) x0[i] = -x0[i];
  }
  return x0;
}

ParticlePath simulate_nash_replication(const SimConfig& cfg, const ValueTable& table, int replication) {
  cfg.validate();
  check_table(cfg, table);
  return run_replication(cfg, &table, nullptr, replication).nash;
}

std::vector<ParticlePath> simulate_nash(const SimConfig& cfg, const ValueTable& table) {
  cfg.validate();
  check_table(cfg, table);
  std::vector<ParticlePath> out(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, [&](int r) { out[r] = run_replication(cfg, &table, nullptr, r).nash; });
  return out;
}

std::vector<ParticlePath> simulate_iid_limit(const SimConfig& cfg, const EntropyField& field,
                                             const InducedFlow& flow) {
  cfg.validate();
  check_flow(cfg, flow);
  if (std::abs(field.horizon() - cfg.T) > 1e-12) {
    throw std::invalid_argument("simulate_iid_limit: entropy field has a different horizon");
  }
  std::vector<ParticlePath> out(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, [&](int r) { out[r] = run_replication(cfg, nullptr, &flow, r).limit; });
  return out;
}

CoupledPaths simulate_coupled_replication(const SimConfig& cfg, const ValueTable& table,
                                          const InducedFlow& flow, int replication) {
  cfg.validate();
  check_table(cfg, table);
  check_flow(cfg, flow);
  return run_replication(cfg, &table, &flow, replication);
}

std::vector<CoupledPaths> simulate_coupled(const SimConfig& cfg, const ValueTable& table,
                                           const EntropyField& field, const InducedFlow& flow) {
  cfg.validate();
  check_table(cfg, table);
  check_flow(cfg, flow);
  if (std::abs(field.horizon() - cfg.T) > 1e-12) {
    throw std::invalid_argument("simulate_coupled: entropy field has a different horizon");
  }
  std::vector<CoupledPaths> out(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, [&](int r) { out[r] = run_replication(cfg, &table, &flow, r); });
  return out;
}

int absorbing_band_violations(const ParticlePath& path, int N) {
  int k = static_cast<int>(std::count(path.initial.begin(), path.initial.end(), 1));
  bool upper = 2 * k >= N + 2;
  bool lower = 2 * k <= N - 2;
  int violations = 0;
  for (const auto& e : path.jumps) {
    const int next = k + (e.state == 1 ? 1 : -1);
    if ((upper && next < k) || (lower && next > k)) ++violations;
    k = next;
    upper = upper || 2 * k >= N + 2;
    lower = lower || 2 * k <= N - 2;
  }
  return violations;
}

ChaosEstimate chaos_metric(const SimConfig& cfg, const ValueTable& table) {
  cfg.validate();
  if (std::abs(cfg.mu0 - 0.5) <= kBoundTolerance) {
    throw std::invalid_argument("chaos_metric: mu0 = 1/2 is excluded");
  }
  check_table(cfg, table);
  const InducedFlow flow = induced_flow(fraction_to_mean(cfg.mu0), cfg.T, table.grid());
  std::vector<double> per_rep(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, [&](int r) {
    const CoupledPaths p = run_replication(cfg, &table, &flow, r);
    double s = 0.0;
    for (int d : p.sup_distance) s += d;
    per_rep[r] = s / cfg.players();
  });
  double mean = 0.0;
  for (double v : per_rep) mean += v;
  mean /= cfg.replications;
  double var = 0.0;
  for (double v : per_rep) var += (v - mean) * (v - mean);
  var = cfg.replications > 1 ? var / (cfg.replications - 1) : 0.0;
  return {cfg.N, mean, std::sqrt(var / cfg.replications), cfg.replications};
}

std::vector<ChaosEstimate> chaos_metric(const std::vector<int>& Ns, double mu0, double T, int replications,
                                        std::uint64_t seed, ValueSolveOptions options) {
  std::vector<ChaosEstimate> out;
  for (int N : Ns) {
    SimConfig cfg;
    cfg.N = N;
    cfg.T = T;
    cfg.mu0 = mu0;
    cfg.seed = seed;
    cfg.replications = replications;
    out.push_back(chaos_metric(cfg, solve_value(N, T, options)));
  }
  return out;
}

double loglog_slope(const std::vector<ChaosEstimate>& estimates) {
  if (estimates.size() < 2) throw std::invalid_argument("loglog_slope: need at least two estimates");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& e : estimates) {
    if (!(e.estimate > 0.0)) throw std::domain_error("loglog_slope: estimates must be positive");
    const double lx = std::log(static_cast<double>(e.N));
    const double ly = std::log(e.estimate);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(estimates.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int classify_terminal_sign(double mean, int N) {
  if (std::abs(mean) < 1.0 / N) return 0;
  return mean > 0.0 ? 1 : -1;
}

ZeroStartResult zero_start_experiment(const SimConfig& cfg, const ValueTable& table, int checkpoints) {
  cfg.validate();
  if (std::abs(cfg.mu0 - 0.5) > kBoundTolerance || cfg.initial) {
    throw std::invalid_argument("zero_start_experiment: requires the i.i.d. start mu0 = 1/2");
  }
  check_table(cfg, table);
  if (checkpoints < 1) throw std::invalid_argument("zero_start_experiment: need at least one checkpoint");

  std::vector<double> times(static_cast<std::size_t>(checkpoints) + 1);
  for (int j = 0; j <= checkpoints; ++j) times[j] = cfg.T * j / checkpoints;

  std::vector<std::vector<double>> abs_means(static_cast<std::size_t>(cfg.replications));
  std::vector<int> signs(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, [&](int r) {
    const ParticlePath p = run_replication(cfg, &table, nullptr, r).nash;
    auto& row = abs_means[r];
    row.resize(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) row[j] = std::abs(p.empirical_mean(times[j]));
    signs[r] = classify_terminal_sign(p.empirical_mean(cfg.T), cfg.N);
  });

  ZeroStartResult out{cfg.N, cfg.T, cfg.replications, 0, 0, 0, 0.0, {}};
  for (int s : signs) {
    if (s > 0) ++out.plus;
    if (s < 0) ++out.minus;
    if (s == 0) ++out.zero;
  }
  std::optional<MfgTrajectory> branch;
  const auto roots = enumerate_terminal_means(cfg.T, MeanState(0.0));
  if (roots.count() == 3) branch = build_trajectory(cfg.T, MeanState(0.0), roots.at(Branch::M3).M);
  for (std::size_t j = 0; j < times.size(); ++j) {
    double acc = 0.0;
    for (const auto& row : abs_means) acc += row[j];
    out.checkpoints.push_back({times[j], acc / cfg.replications, branch ? branch->m(times[j]) : 0.0});
  }
  out.mean_abs_terminal = out.checkpoints.back().mean_abs_empirical;
  return out;
}

bool configuration_in_band_complement(int plus, int N, double eps) {
  const double lo = 0.5 * N - N * eps;
  const double hi = 0.5 * N + N * eps + 1.0;
  return !(plus > lo && plus < hi);
}

double initial_outside_fraction(const SimConfig& cfg, double eps) {
  cfg.validate();
  std::vector<char> outside(static_cast<std::size_t>(cfg.replications));
  parallel_for(cfg.replications, [&](int r) {
    const auto x0 = sample_initial(cfg, r);
    const int plus = static_cast<int>(std::count(x0.begin(), x0.end(), 1));
    outside[r] = configuration_in_band_complement(plus, cfg.N, eps) ? 0 : 1;
  });
  const auto hits = std::count(outside.begin(), outside.end(), 1);
  return static_cast<double>(hits) / cfg.replications;
}

double initial_outside_bound(int N, double eps) {
  if (N < 1 || !(eps > 0.0)) throw std::invalid_argument("initial_outside_bound: need N >= 1, eps > 0");
  const double n1 = N + 1.0;
  const double gap = 2.0 * eps - (N / n1) * (0.5 + eps) - 1.0 / n1 + 0.5;
  if (N < 2.0 / eps || !(gap > 0.0)) return 1.0;
  const double bound = (0.5 + 2.0 * eps) * (0.5 - 2.0 * eps) / (n1 * gap * gap);
  return std::min(1.0, bound);
}

}  // namespace mfglab
