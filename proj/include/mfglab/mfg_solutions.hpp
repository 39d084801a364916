#pragma once

#include <string_view>
#include <vector>

#include "mfglab/simplex_core.hpp"

namespace mfglab {

/// Branch labels of the consistency roots. M3 is always the root sharing
/// the sign of m0; for m0 < 0 the labels mirror those of -m0.
enum class Branch { M1, M2, M3 };

std::string_view branch_name(Branch b);

struct LabeledRoot {
  Branch label;
  double M;
  double residual;
  /// True for the merged double root at T = T(m0).
  bool double_root = false;
};

/// Terminal means of all solutions of the two-state MFG system for one
/// (T, m0), sorted ascending by value.
struct ConsistencyRoots {
  double horizon;
  double m0;
  std::vector<LabeledRoot> roots;

  std::size_t count() const { return roots.size(); }
  /// Root carrying the given label; throws if absent.
  const LabeledRoot& at(Branch b) const;
  bool has(Branch b) const;
};

/// Width of the band in T around T(m0) treated as the double-root case.
inline constexpr double kDegeneracyBand = 1e-6;
/// Roots closer than this are reported once.
inline constexpr double kRootMergeTolerance = 1e-9;

/// T^2 M^3 + T(2-T) M|M| + (1-2T) M - m0.
double consistency_poly(double M, double T, double m0);

/// d/dM of consistency_poly.
double consistency_poly_slope(double M, double T);

/// Unique T in [1/2, 2] with |m0| = (2T-1)^2 (T+4) / (27 T).
double threshold_time(MeanState m0);

ConsistencyRoots enumerate_terminal_means(double T, MeanState m0);

/// Closed-form branch solution (z, m) of the forward-backward system.
class MfgTrajectory {
 public:
  double horizon() const { return T_; }
  double terminal_mean() const { return M_; }
  double initial_mean() const { return m0_; }

  /// z(t) = 2M / (|M|(T-t) + 1).
  double z(double t) const;
  /// m(t) = (m0 - sgn M)((|M|(T-t)+1)/(|M|T+1))^2 + sgn M.
  double m(double t) const;

 private:
  friend MfgTrajectory build_trajectory(double T, MeanState m0, double M);
  MfgTrajectory(double T, double m0, double M) : T_(T), m0_(m0), M_(M) {}

  double T_;
  double m0_;
  double M_;
};

/// Rejects M whose consistency residual exceeds 1e-8, and M = 0 unless m0 = 0.
MfgTrajectory build_trajectory(double T, MeanState m0, double M);

/// Max over interior grid nodes of the central-difference residuals of
/// z' = z|z|/2 and m' = -m|z| + z.
double verify_mfg_residual(const MfgTrajectory& traj, const TimeGrid& grid);

/// Root of the sign-split cubic on one monotone piece [lo, hi] of
/// consistency_poly, bisected then Newton-polished. Requires a sign change
/// (or a zero endpoint).
double solve_monotone_piece(double lo, double hi, double T, double m0);

}  // namespace mfglab
