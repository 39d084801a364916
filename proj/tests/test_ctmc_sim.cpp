#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mfglab/ctmc_sim.hpp"

using namespace mfglab;

namespace {

struct Moments {
  double mean;
  double se;
};

Moments moments(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1) / n)};
}

SimConfig config(int N, double T, double mu0, int reps, std::uint64_t seed) {
  SimConfig cfg;
  cfg.N = N;
  cfg.T = T;
  cfg.mu0 = mu0;
  cfg.replications = reps;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("ctmc_sim") {
  TEST_CASE("config validation") {
    SimConfig cfg = config(4, 1.0, 1.2, 10, 0);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.mu0 = 0.5;
    cfg.replications = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.replications = 1;
    cfg.initial = std::vector<int>{1, 1, 0, 1, 1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.initial = std::vector<int>{1, 1, 1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(simulate_nash(config(4, 1.0, 0.5, 1, 0), solve_value(5, 1.0)), std::invalid_argument);
  }

  TEST_CASE("aligned start never moves") {
    const ValueTable table = solve_value(8, 2.0);
    SimConfig cfg = config(8, 2.0, 0.5, 50, 3);
    cfg.initial = std::vector<int>(9, 1);
    for (const auto& path : simulate_nash(cfg, table)) {
      CHECK(path.jumps.empty());
      CHECK(path.count_at(2.0) == 9);
    }
  }

  TEST_CASE("path accessors") {
    ParticlePath p;
    p.initial = {1, -1, -1};
    p.jumps = {{0.5, 1, 1}, {1.0, 0, -1}, {1.5, 0, 1}};
    CHECK(p.count_at(0.0) == 1);
    CHECK(p.count_at(0.5) == 2);
    CHECK(p.count_at(1.2) == 1);
    CHECK(p.terminal() == std::vector<int>{1, 1, -1});
    CHECK(p.jump_count(0) == 2);
    CHECK(p.empirical_mean(2.0) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("absorbing bands hold on every path") {
    for (int N : {8, 15}) {
      const ValueTable table = solve_value(N, 2.0);
      for (double mu0 : {0.5, 0.6}) {
        int violations = 0;
        for (const auto& path : simulate_nash(config(N, 2.0, mu0, 300, 11), table)) {
          violations += absorbing_band_violations(path, N);
        }
        CHECK(violations == 0);
      }
    }
    ParticlePath bad;
    bad.initial = {1, 1, 1, -1, -1};
    bad.jumps = {{0.1, 0, -1}};
    CHECK(absorbing_band_violations(bad, 4) == 1);
  }

  TEST_CASE("two players: jump probability matches the solved table") {
    const double T = 0.5;
    const ValueTable table = solve_value(1, T);
    // Both players flip at rate (V(t,0) - V(t,1))^+ until the first flip,
    // after which they agree and freeze.
    auto rate = [&](double t) { return std::max(0.0, table.value(t, 0) - table.value(t, 1)); };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(rate, 0.0, T, 15, 1e-12);
    const double expected = 1.0 - std::exp(-2.0 * integral);

    SimConfig cfg = config(1, T, 0.5, 20000, 5);
    cfg.initial = std::vector<int>{1, -1};
    std::vector<double> jumps;
    for (const auto& path : simulate_nash(cfg, table)) {
      CHECK(path.jumps.size() <= 1);
      jumps.push_back(static_cast<double>(path.jumps.size()));
    }
    const Moments m = moments(jumps);
    CHECK(std::abs(m.mean - expected) <= 4.0 * m.se);
  }

  TEST_CASE("limit process follows the induced flow") {
    const double T = 2.0;
    const double mu0 = 0.6;
    const EntropyField field(T);
    const InducedFlow flow = induced_flow(MeanState(2 * mu0 - 1), T, TimeGrid::uniform(T, 1e-3));
    const SimConfig cfg = config(9, T, mu0, 2000, 17);
    const auto paths = simulate_iid_limit(cfg, field, flow);
    for (int c = 1; c <= 10; ++c) {
      const double t = T * c / 10.0;
      std::vector<double> means;
      for (const auto& p : paths) means.push_back(p.empirical_mean(t));
      const Moments m = moments(means);
      CHECK(std::abs(m.mean - flow.m_at(t)) <= 3.0 * m.se);
    }

    // Terminal states of two players are uncorrelated.
    std::vector<double> a, b, ab;
    for (const auto& p : paths) {
      const auto x = p.terminal();
      a.push_back(x[0]);
      b.push_back(x[1]);
      ab.push_back(x[0] * x[1]);
    }
    const double ma = moments(a).mean, mb = moments(b).mean;
    const double cov = moments(ab).mean - ma * mb;
    const double se = std::sqrt((1 - ma * ma) * (1 - mb * mb) / static_cast<double>(paths.size()));
    CHECK(std::abs(cov) <= 4.0 * se);
  }

  TEST_CASE("limit process is frozen at full consensus") {
    const EntropyField field(2.0);
    const InducedFlow flow = induced_flow(MeanState(1.0), 2.0, TimeGrid::uniform(2.0, 1e-3));
    for (const auto& p : simulate_iid_limit(config(5, 2.0, 1.0, 100, 2), field, flow)) CHECK(p.jumps.empty());
  }

  TEST_CASE("coupling shares the Nash path and distances are 0 or 2") {
    const int N = 10;
    const double T = 2.0;
    const ValueTable table = solve_value(N, T);
    const EntropyField field(T);
    const InducedFlow flow = induced_flow(MeanState(0.5), T, table.grid());
    const SimConfig cfg = config(N, T, 0.75, 200, 21);
    const auto coupled = simulate_coupled(cfg, table, field, flow);
    const auto nash = simulate_nash(cfg, table);
    for (int r = 0; r < cfg.replications; ++r) {
      const auto& c = coupled[r];
      REQUIRE(c.nash.jumps.size() == nash[r].jumps.size());
      for (std::size_t j = 0; j < c.nash.jumps.size(); ++j) {
        CHECK(c.nash.jumps[j].t == nash[r].jumps[j].t);
        CHECK(c.nash.jumps[j].player == nash[r].jumps[j].player);
      }
      CHECK(c.nash.initial == c.limit.initial);
      for (int d : c.sup_distance) CHECK((d == 0 || d == 2));
      // A player never separated from its limit twin ends in the same state.
      const auto y = c.nash.terminal();
      const auto x = c.limit.terminal();
      for (int i = 0; i < cfg.players(); ++i) {
        if (c.sup_distance[i] == 0) CHECK(x[i] == y[i]);
      }
    }

    const InducedFlow frozen_flow = induced_flow(MeanState(1.0), T, table.grid());
    const SimConfig frozen = config(N, T, 1.0, 50, 4);
    for (const auto& c : simulate_coupled(frozen, table, field, frozen_flow)) {
      CHECK(c.nash.jumps.empty());
      CHECK(c.limit.jumps.empty());
    }
  }

  TEST_CASE("identical seeds reproduce identical events") {
    const ValueTable table = solve_value(12, 2.0);
    const SimConfig cfg = config(12, 2.0, 0.5, 40, 99);
    const auto a = simulate_nash(cfg, table);
    const auto b = simulate_nash(cfg, table);
    for (int r = 0; r < cfg.replications; ++r) {
      REQUIRE(a[r].jumps.size() == b[r].jumps.size());
      CHECK(a[r].initial == b[r].initial);
      for (std::size_t j = 0; j < a[r].jumps.size(); ++j) {
        CHECK(a[r].jumps[j].t == b[r].jumps[j].t);
        CHECK(a[r].jumps[j].player == b[r].jumps[j].player);
        CHECK(a[r].jumps[j].state == b[r].jumps[j].state);
      }
      const auto single = simulate_nash_replication(cfg, table, r);
      CHECK(single.jumps.size() == a[r].jumps.size());
    }
    SimConfig other = cfg;
    other.seed = 100;
    const auto c = simulate_nash(other, table);
    int differing = 0;
    for (int r = 0; r < cfg.replications; ++r) differing += a[r].initial != c[r].initial ? 1 : 0;
    CHECK(differing > 0);
  }

  TEST_CASE("sign flip symmetry") {
    const ValueTable table = solve_value(12, 2.0);
    SimConfig cfg = config(12, 2.0, 0.5, 100, 8);
    const auto a = simulate_nash(cfg, table);
    cfg.mirror = true;
    const auto b = simulate_nash(cfg, table);
    for (int r = 0; r < cfg.replications; ++r) {
      REQUIRE(a[r].jumps.size() == b[r].jumps.size());
      for (std::size_t j = 0; j < a[r].jumps.size(); ++j) {
        CHECK(a[r].jumps[j].t == b[r].jumps[j].t);
        CHECK(a[r].jumps[j].state == -b[r].jumps[j].state);
      }
      CHECK(a[r].empirical_mean(2.0) == -b[r].empirical_mean(2.0));
    }
  }

  TEST_CASE("players are exchangeable") {
    const int N = 10;
    const ValueTable table = solve_value(N, 2.0);
    const SimConfig cfg = config(N, 2.0, 0.6, 4000, 31);
    const auto paths = simulate_nash(cfg, table);
    // Disjoint halves of the replications give independent samples.
    std::vector<double> jumps0, jumpsN, term0, termN;
    for (int r = 0; r < cfg.replications; ++r) {
      const auto& p = paths[r];
      if (r % 2 == 0) {
        jumps0.push_back(p.jump_count(0));
        term0.push_back(p.terminal()[0]);
      } else {
        jumpsN.push_back(p.jump_count(N));
        termN.push_back(p.terminal()[N]);
      }
    }
    auto z_stat = [](const std::vector<double>& x, const std::vector<double>& y) {
      const Moments a = moments(x), b = moments(y);
      return std::abs(a.mean - b.mean) / std::sqrt(a.se * a.se + b.se * b.se);
    };
    CHECK(z_stat(jumps0, jumpsN) < 2.576);
    CHECK(z_stat(term0, termN) < 2.576);
  }

  TEST_CASE("initial configurations rarely start inside the shock band") {
    const double eps = 0.1;
    for (int N : {20, 40, 80}) {
      const SimConfig cfg = config(N, 1.0, 0.5 + 2 * eps, 4000, 12);
      const double fraction = initial_outside_fraction(cfg, eps);
      CHECK(fraction <= initial_outside_bound(N, eps));
    }
    CHECK(initial_outside_bound(10, 0.1) == 1.0);
    CHECK(configuration_in_band_complement(9, 10, 0.1));
    CHECK_FALSE(configuration_in_band_complement(6, 10, 0.1));
  }

  TEST_CASE("terminal sign classification") {
    CHECK(classify_terminal_sign(0.5, 10) == 1);
    CHECK(classify_terminal_sign(-0.5, 10) == -1);
    CHECK(classify_terminal_sign(0.05, 10) == 0);
  }

  TEST_CASE("chaos metric") {
    const int N = 8;
    const ValueTable table = solve_value(N, 2.0);
    const ChaosEstimate frozen = chaos_metric(config(N, 2.0, 1.0, 50, 0), table);
    CHECK(frozen.estimate == 0.0);
    CHECK(frozen.standard_error == 0.0);
    const ChaosEstimate est = chaos_metric(config(N, 2.0, 0.75, 400, 0), table);
    CHECK(est.estimate > 0.0);
    CHECK(est.estimate <= 2.0);
    CHECK(est.standard_error > 0.0);
    CHECK_THROWS_AS(chaos_metric(config(N, 2.0, 0.5, 10, 0), table), std::invalid_argument);

    const std::vector<ChaosEstimate> line = {{8, 0.4, 0, 1}, {16, 0.2, 0, 1}, {32, 0.1, 0, 1}};
    CHECK(loglog_slope(line) == doctest::Approx(-1.0));
  }

  TEST_CASE("parallel_for visits each index once and rethrows") {
    std::vector<int> hits(257, 0);
    parallel_for(257, [&](int i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, [](int i) { if (i == 7) throw std::runtime_error("x"); }), std::runtime_error);
  }
}
