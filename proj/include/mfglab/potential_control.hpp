#pragma once

#include <vector>

#include "mfglab/mfg_solutions.hpp"

namespace mfglab {

/// Cost of the MFG branch with terminal mean M in the deterministic
/// control problem over the simplex: phi(M) = M^2 (T - 1/2 - T|M|).
double phi(double M, double T);

struct BranchCost {
  Branch label;
  double M;
  double cost;
};

struct BranchCosts {
  double horizon;
  double m0;
  std::vector<BranchCost> branches;
  /// Label of the cheapest branch. At m0 = 0 the two nonzero branches tie
  /// and this is M3.
  Branch argmin;
  /// m0 = 0 with three branches: phi(M+) = phi(M-) < phi(0) = 0.
  bool tie = false;
  /// Three branches and phi(M3) < phi(M1) < phi(M2).
  bool strictly_ordered = false;

  const BranchCost& at(Branch b) const;
};

BranchCosts branch_costs(double T, MeanState m0);

/// Adaptive Gauss-Kronrod evaluation of the control cost along a branch:
///   int_0^T [ m_1 a_1^2/2 + m_{-1} a_{-1}^2/2 ] dt - (m_1 - m_{-1})^2/2 at T
/// with a_1 = z^-, a_{-1} = z^+, m_{+-1} = (1 +- m)/2.
double cost_quadrature(const MfgTrajectory& traj);

}  // namespace mfglab
