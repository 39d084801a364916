#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfglab/experiments.hpp"
#include "mfglab/simplex_core.hpp"

namespace ex = mfglab::experiments;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCheckFailed = 4;

struct Options {
  double T = 2.0;
  std::vector<double> m0{0.0};
  std::vector<int> N;
  double mu0 = 0.75;
  double eps = 0.2;
  int reps = 1000;
  std::uint64_t seed = 0;
  std::string out;
  bool check = false;
  int samples = 21;
  int tau_points = 21;
  int m_points = 41;
};

std::string output_dir(const Options& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("MFGLAB_OUT_DIR")) return env;
  return {};
}

int emit(const ex::CommandResult& result, const Options& o, double secs) {
  const std::string dir = output_dir(o);
  if (dir.empty()) {
    for (std::size_t i = 0; i < result.tables.size(); ++i) {
      if (i > 0) std::cout << '\n';
      result.tables[i].write(std::cout);
    }
  } else {
    ex::write_outputs(result, dir, secs);
    std::cout << dir << "/" << result.command << ".manifest.json\n";
  }
  for (const auto& name : result.failed_checks) std::cerr << "check failed: " << name << '\n';
  return o.check && !result.checks_passed() ? kExitCheckFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-state mean field game experiments"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "Directory for CSV tables and the run manifest");
    cmd->add_flag("--check", o.check, "Exit with status 4 when a property check fails");
  };
  auto horizon = [&o](CLI::App* cmd) { cmd->add_option("--T", o.T, "Horizon")->capture_default_str(); };

  auto* roots = app.add_subcommand("roots", "Consistency roots, threshold time and branch trajectories");
  horizon(roots);
  roots->add_option("--m0", o.m0, "Initial mean")->expected(1);
  roots->add_option("--samples", o.samples, "Trajectory samples per branch")->capture_default_str();
  common(roots);

  auto* entropy = app.add_subcommand("entropy", "Entropy field Z, value U* and shock diagnostics");
  horizon(entropy);
  entropy->add_option("--tau-points", o.tau_points, "Remaining-time grid points")->capture_default_str();
  entropy->add_option("--m-points", o.m_points, "Mean grid points on [-1, 1]")->capture_default_str();
  common(entropy);

  auto* converge = app.add_subcommand("converge", "Convergence of the N-player value to U*");
  horizon(converge);
  converge->add_option("--N", o.N, "Player counts minus one (default 16 32 64 128)");
  converge->add_option("--eps", o.eps, "Distance from the shock")->capture_default_str();
  common(converge);

  auto* chaos = app.add_subcommand("chaos", "Propagation of chaos estimates");
  horizon(chaos);
  chaos->add_option("--N", o.N, "Player counts minus one (default 8 16 32 64)");
  chaos->add_option("--mu0", o.mu0, "Initial probability of +1")->capture_default_str();
  chaos->add_option("--reps", o.reps, "Replications")->capture_default_str();
  chaos->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  common(chaos);

  auto* zero = app.add_subcommand("zero-start", "Terminal sign histogram from the symmetric start");
  horizon(zero);
  zero->add_option("--N", o.N, "Player count minus one (default 64)")->expected(1);
  zero->add_option("--reps", o.reps, "Replications")->capture_default_str();
  zero->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  common(zero);

  auto* potential = app.add_subcommand("potential", "Branch costs of the control problem");
  horizon(potential);
  potential->add_option("--m0", o.m0, "Initial means (default 0 0.05 0.2 0.5)");
  common(potential);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    ex::CommandResult result;
    if (*roots) {
      result = ex::run_roots(o.T, o.m0.at(0), o.samples);
    } else if (*entropy) {
      result = ex::run_entropy(o.T, o.tau_points, o.m_points);
    } else if (*converge) {
      result = ex::run_converge(o.N.empty() ? std::vector<int>{16, 32, 64, 128} : o.N, o.T, o.eps);
    } else if (*chaos) {
      result = ex::run_chaos(o.N.empty() ? std::vector<int>{8, 16, 32, 64} : o.N, o.mu0, o.T, o.reps, o.seed);
    } else if (*zero) {
      result = ex::run_zero_start(o.N.empty() ? 64 : o.N.at(0), o.T, o.reps, o.seed);
    } else {
      const bool defaulted = potential->count("--m0") == 0;
      result = ex::run_potential(o.T, defaulted ? std::vector<double>{0.0, 0.05, 0.2, 0.5} : o.m0);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(result, o, secs);
  } catch (const mfglab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitInvalid;
  }
}
