#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfglab::experiments {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Column layouts of every table the commands emit. A change here is a
/// schema change and must bump kSchemaVersion.
namespace schema {
inline const std::vector<std::string> kRoots = {"T", "m0", "threshold_time", "label", "M", "residual", "double_root"};
inline const std::vector<std::string> kRootTrajectories = {"label", "t", "z", "m"};
inline const std::vector<std::string> kEntropyField = {"tau", "m", "Z", "odd_residual"};
inline const std::vector<std::string> kEntropyValue = {"t", "mu", "Ustar"};
inline const std::vector<std::string> kEntropyJumps = {"tau", "z_plus", "z_minus", "jump_ok", "rh_residual"};
inline const std::vector<std::string> kConverge = {"N", "T", "eps", "error", "ratio", "terminal_error"};
inline const std::vector<std::string> kChaos = {"N", "mu0", "T", "replications", "estimate", "standard_error"};
inline const std::vector<std::string> kZeroStart = {"outcome", "count", "frequency"};
inline const std::vector<std::string> kZeroStartPath = {"t", "mean_abs_empirical", "m_plus"};
inline const std::vector<std::string> kPotential = {"T",   "m0",         "label",        "M",       "phi",
                                                    "quadrature", "abs_residual", "is_argmin", "ordered", "tie"};
}  // namespace schema

/// Doubles are written with 17 significant digits so they round-trip.
std::string format_double(double v);

struct CsvTable {
  /// File stem suffix; the primary table of a command has an empty name.
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const;
};

struct CommandResult {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<CsvTable> tables;
  /// Names of property checks that did not hold; empty when all passed.
  std::vector<std::string> failed_checks;

  bool checks_passed() const { return failed_checks.empty(); }
};

CommandResult run_roots(double T, double m0, int samples);
CommandResult run_entropy(double T, int tau_points, int m_points);
CommandResult run_converge(const std::vector<int>& Ns, double T, double eps);
CommandResult run_chaos(const std::vector<int>& Ns, double mu0, double T, int replications, std::uint64_t seed);
CommandResult run_zero_start(int N, double T, int replications, std::uint64_t seed);
CommandResult run_potential(double T, const std::vector<double>& m0s);

/// Writes every table as <command>[_<name>].csv under dir plus one
/// <command>.manifest.json listing them. Returns the manifest.
nlohmann::json write_outputs(const CommandResult& result, const std::filesystem::path& dir,
                             double wall_clock_seconds);

nlohmann::json make_manifest(const CommandResult& result, const std::vector<std::string>& outputs,
                             double wall_clock_seconds);

}  // namespace mfglab::experiments
