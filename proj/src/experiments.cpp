#include "mfglab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mfglab/ctmc_sim.hpp"
#include "mfglab/master_entropy.hpp"
#include "mfglab/mfg_solutions.hpp"
#include "mfglab/nash_hjb.hpp"
#include "mfglab/potential_control.hpp"

namespace mfglab::experiments {

namespace {

std::string flag(bool b) { return b ? "true" : "false"; }

void require(CommandResult& result, bool ok, const std::string& check) {
  if (!ok) result.failed_checks.push_back(check);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::write(std::ostream& os) const {
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

CommandResult run_roots(double T, double m0_value, int samples) {
  require_positive(T, "T");
  if (samples < 2) throw std::invalid_argument("samples must be at least 2");
  const MeanState m0(m0_value);
  CommandResult out;
  out.command = "roots";
  out.parameters = {{"T", T}, {"m0", m0_value}, {"samples", samples}};

  const double threshold = threshold_time(m0);
  const ConsistencyRoots roots = enumerate_terminal_means(T, m0);
  CsvTable table{"", schema::kRoots, {}};
  CsvTable paths{"trajectories", schema::kRootTrajectories, {}};
  for (const auto& r : roots.roots) {
    const std::string label(branch_name(r.label));
    table.rows.push_back({format_double(T), format_double(m0_value), format_double(threshold), label,
                          format_double(r.M), format_double(r.residual), flag(r.double_root)});
    require(out, r.residual <= 1e-10, "residual " + label);
    const MfgTrajectory traj = build_trajectory(T, m0, r.M);
    for (int j = 0; j < samples; ++j) {
      const double t = T * j / (samples - 1);
      paths.rows.push_back({label, format_double(t), format_double(traj.z(t)), format_double(traj.m(t))});
    }
  }
  if (std::abs(T - threshold) > kDegeneracyBand) {
    const std::size_t expected = T < threshold ? 1 : 3;
    // For m0 = 0 the boundary T = 1/2 itself still has a single root.
    require(out, roots.count() == expected, "root count");
  } else if (m0_value != 0.0) {
    require(out, roots.count() == 2, "root count at threshold");
  }
  out.tables = {std::move(table), std::move(paths)};
  return out;
}

CommandResult run_entropy(double T, int tau_points, int m_points) {
  require_positive(T, "T");
  if (tau_points < 2 || m_points < 3) throw std::invalid_argument("entropy grid needs tau_points >= 2, m_points >= 3");
  CommandResult out;
  out.command = "entropy";
  out.parameters = {{"T", T}, {"tau_points", tau_points}, {"m_points", m_points}};
  const EntropyField field(T);

  CsvTable z_table{"", schema::kEntropyField, {}};
  CsvTable u_table{"value", schema::kEntropyValue, {}};
  CsvTable jumps{"jumps", schema::kEntropyJumps, {}};
  double init_err = 0.0;
  double odd_err = 0.0;
  for (int i = 0; i < tau_points; ++i) {
    const double tau = T * i / (tau_points - 1);
    for (int j = 0; j < m_points; ++j) {
      const double m = -1.0 + 2.0 * j / (m_points - 1);
      const double Z = field.Z(tau, MeanState(m));
      const double odd = std::abs(Z + field.Z(tau, MeanState(-m)));
      odd_err = std::max(odd_err, odd);
      if (i == 0) init_err = std::max(init_err, std::abs(Z - 2.0 * m));
      z_table.rows.push_back({format_double(tau), format_double(m), format_double(Z), format_double(odd)});

      const double t = T - tau;
      const double mu = 0.5 * (1.0 + m);
      u_table.rows.push_back({format_double(t), format_double(mu), format_double(field.Ustar(t, mu))});
    }
    if (tau > 0.5) {
      const JumpCheck jc = check_entropy_jump(tau);
      jumps.rows.push_back({format_double(tau), format_double(jc.z_plus), format_double(jc.z_minus),
                            flag(jc.jump_ok), format_double(jc.rh_residual)});
      require(out, jc.jump_ok && jc.z_plus > 0.0, "jump at tau=" + format_double(tau));
      require(out, jc.rh_residual <= 1e-12, "rankine-hugoniot at tau=" + format_double(tau));
    }
  }
  require(out, init_err == 0.0, "initial condition Z(0,m)=2m");
  require(out, odd_err <= 1e-12, "odd symmetry");
  out.tables = {std::move(z_table), std::move(u_table), std::move(jumps)};
  return out;
}

CommandResult run_converge(const std::vector<int>& Ns, double T, double eps) {
  require_positive(T, "T");
  require_positive(eps, "eps");
  if (Ns.empty()) throw std::invalid_argument("N list is empty");
  for (int N : Ns) {
    if (N < 1) throw std::invalid_argument("N must be at least 1");
  }
  CommandResult out;
  out.command = "converge";
  out.parameters = {{"N", Ns}, {"T", T}, {"eps", eps}};

  std::vector<double> errors(Ns.size());
  std::vector<double> terminal(Ns.size());
  parallel_for(static_cast<int>(Ns.size()), [&](int i) {
    const ValueTable table = solve_value(Ns[i], T);
    errors[i] = convergence_error(table, eps);
    double term = 0.0;
    const std::size_t last = table.grid().size() - 1;
    for (int k = 0; k <= Ns[i]; ++k) {
      if (!outside_shock_band(k, Ns[i], eps)) continue;
      term = std::max(term, std::abs(table.at_node(last, k) - u_star(T, static_cast<double>(k) / Ns[i], T)));
    }
    terminal[i] = term;
  });

  CsvTable table{"", schema::kConverge, {}};
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    std::string ratio;
    if (i > 0) {
      const double r = errors[i] / errors[i - 1];
      ratio = format_double(r);
      if (Ns[i - 1] >= 32 && Ns[i] == 2 * Ns[i - 1]) {
        require(out, r <= 0.67, "first-order ratio at N=" + std::to_string(Ns[i]));
      }
    }
    require(out, terminal[i] == 0.0, "terminal slice at N=" + std::to_string(Ns[i]));
    table.rows.push_back({std::to_string(Ns[i]), format_double(T), format_double(eps), format_double(errors[i]),
                          ratio, format_double(terminal[i])});
  }
  out.tables = {std::move(table)};
  return out;
}

CommandResult run_chaos(const std::vector<int>& Ns, double mu0, double T, int replications, std::uint64_t seed) {
  require_positive(T, "T");
  if (Ns.empty()) throw std::invalid_argument("N list is empty");
  if (replications < 2) throw std::invalid_argument("reps must be at least 2");
  if (!(mu0 >= 0.0 && mu0 <= 1.0) || mu0 == 0.5) throw std::invalid_argument("mu0 must lie in [0,1] \\ {1/2}");
  CommandResult out;
  out.command = "chaos";
  out.parameters = {{"N", Ns}, {"mu0", mu0}, {"T", T}, {"reps", replications}, {"seed", seed}};

  const auto estimates = chaos_metric(Ns, mu0, T, replications, seed);
  CsvTable table{"", schema::kChaos, {}};
  for (const auto& e : estimates) {
    table.rows.push_back({std::to_string(e.N), format_double(mu0), format_double(T), std::to_string(e.replications),
                          format_double(e.estimate), format_double(e.standard_error)});
  }
  const bool all_zero = std::all_of(estimates.begin(), estimates.end(),
                                    [](const ChaosEstimate& e) { return e.estimate == 0.0; });
  if (!all_zero) {
    for (std::size_t i = 1; i < estimates.size(); ++i) {
      const auto& a = estimates[i - 1];
      const auto& b = estimates[i];
      const double se = std::hypot(a.standard_error, b.standard_error);
      require(out, a.estimate - b.estimate > 2.0 * se, "decrease from N=" + std::to_string(a.N));
    }
    if (estimates.size() >= 2) {
      const double slope = loglog_slope(estimates);
      out.parameters["loglog_slope"] = slope;
      require(out, slope >= -1.0 && slope <= -0.3, "log-log slope");
    }
  }
  out.tables = {std::move(table)};
  return out;
}

CommandResult run_zero_start(int N, double T, int replications, std::uint64_t seed) {
  require_positive(T, "T");
  if (N < 1) throw std::invalid_argument("N must be at least 1");
  if (replications < 1) throw std::invalid_argument("reps must be at least 1");
  CommandResult out;
  out.command = "zero-start";
  out.parameters = {{"N", N}, {"T", T}, {"reps", replications}, {"seed", seed}};

  SimConfig cfg;
  cfg.N = N;
  cfg.T = T;
  cfg.mu0 = 0.5;
  cfg.seed = seed;
  cfg.replications = replications;
  const ZeroStartResult res = zero_start_experiment(cfg, solve_value(N, T));

  CsvTable hist{"", schema::kZeroStart, {}};
  hist.rows.push_back({"+", std::to_string(res.plus), format_double(res.frequency_plus())});
  hist.rows.push_back({"-", std::to_string(res.minus), format_double(res.frequency_minus())});
  hist.rows.push_back({"0", std::to_string(res.zero), format_double(res.frequency_zero())});
  CsvTable path{"path", schema::kZeroStartPath, {}};
  for (const auto& c : res.checkpoints) {
    path.rows.push_back({format_double(c.t), format_double(c.mean_abs_empirical), format_double(c.m_plus)});
  }
  out.parameters["mean_abs_terminal"] = res.mean_abs_terminal;
  require(out, res.frequency_plus() >= 0.45 && res.frequency_plus() <= 0.55, "frequency of +");
  require(out, res.frequency_minus() >= 0.45 && res.frequency_minus() <= 0.55, "frequency of -");
  if (!res.checkpoints.empty() && res.checkpoints.back().m_plus > 0.0) {
    require(out, std::abs(res.mean_abs_terminal - res.checkpoints.back().m_plus) <= 0.1, "terminal concentration");
  }
  out.tables = {std::move(hist), std::move(path)};
  return out;
}

CommandResult run_potential(double T, const std::vector<double>& m0s) {
  require_positive(T, "T");
  if (m0s.empty()) throw std::invalid_argument("m0 list is empty");
  CommandResult out;
  out.command = "potential";
  out.parameters = {{"T", T}, {"m0", m0s}};
  CsvTable table{"", schema::kPotential, {}};
  for (double m0_value : m0s) {
    const MeanState m0(m0_value);
    const BranchCosts costs = branch_costs(T, m0);
    const bool three = costs.branches.size() == 3;
    for (const auto& b : costs.branches) {
      const double quad = cost_quadrature(build_trajectory(T, m0, b.M));
      const double residual = std::abs(quad - b.cost);
      const std::string label(branch_name(b.label));
      table.rows.push_back({format_double(T), format_double(m0_value), label, format_double(b.M),
                            format_double(b.cost), format_double(quad), format_double(residual),
                            flag(b.label == costs.argmin), flag(costs.strictly_ordered), flag(costs.tie)});
      require(out, residual <= 1e-8, "quadrature at m0=" + format_double(m0_value) + " " + label);
    }
    if (three && m0_value != 0.0) {
      require(out, costs.strictly_ordered, "ordering at m0=" + format_double(m0_value));
      require(out, costs.argmin == Branch::M3, "argmin at m0=" + format_double(m0_value));
    }
    if (three && m0_value == 0.0) require(out, costs.tie, "tie at m0=0");
  }
  out.tables = {std::move(table)};
  return out;
}

nlohmann::json make_manifest(const CommandResult& result, const std::vector<std::string>& outputs,
                             double wall_clock_seconds) {
  nlohmann::json manifest;
  manifest["command"] = result.command;
  manifest["schema_version"] = kSchemaVersion;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["parameters"] = result.parameters;
  manifest["seed"] = result.parameters.contains("seed") ? result.parameters["seed"] : nlohmann::json(nullptr);
  manifest["outputs"] = outputs;
  manifest["wall_clock_seconds"] = wall_clock_seconds;
  manifest["checks"] = {{"passed", result.checks_passed()}, {"failed", result.failed_checks}};
  return manifest;
}

nlohmann::json write_outputs(const CommandResult& result, const std::filesystem::path& dir,
                             double wall_clock_seconds) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> outputs;
  for (const auto& table : result.tables) {
    const std::string stem = table.name.empty() ? result.command : result.command + "_" + table.name;
    const std::filesystem::path file = dir / (stem + ".csv");
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    table.write(os);
    outputs.push_back(file.string());
  }
  nlohmann::json manifest = make_manifest(result, outputs, wall_clock_seconds);
  const std::filesystem::path mfile = dir / (result.command + ".manifest.json");
  std::ofstream ms(mfile);
  if (!ms) throw std::runtime_error("cannot write " + mfile.string());
  ms << manifest.dump(2) << '\n';
  return manifest;
}

}  // namespace mfglab::experiments
