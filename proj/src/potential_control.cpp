#include "mfglab/potential_control.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace mfglab {

double phi(double M, double T) { return M * M * (T - 0.5 - T * std::abs(M)); }

const BranchCost& BranchCosts::at(Branch b) const {
  for (const auto& c : branches) {
    if (c.label == b) return c;
  }
  throw std::out_of_range("no branch labeled " + std::string(branch_name(b)));
}

BranchCosts branch_costs(double T, MeanState m0) {
  const ConsistencyRoots roots = enumerate_terminal_means(T, m0);
  BranchCosts out{T, m0.value(), {}, Branch::M3};
  for (const auto& r : roots.roots) out.branches.push_back({r.label, r.M, phi(r.M, T)});

  const auto best = std::min_element(out.branches.begin(), out.branches.end(),
                                     [](const BranchCost& a, const BranchCost& b) { return a.cost < b.cost; });
  out.argmin = best->label;
  if (roots.count() == 3) {
    const double c1 = out.at(Branch::M1).cost;
    const double c2 = out.at(Branch::M2).cost;
    const double c3 = out.at(Branch::M3).cost;
    if (m0.value() == 0.0) {
      out.tie = std::abs(c1 - c3) <= 1e-14 && c3 < c2;
      out.argmin = Branch::M3;
    } else {
      out.strictly_ordered = c3 < c1 && c1 < c2;
    }
  }
  return out;
}

double cost_quadrature(const MfgTrajectory& traj) {
  auto running = [&traj](double t) {
    const double z = traj.z(t);
    const double m = traj.m(t);
    const double a_plus = negative_part(z);
    const double a_minus = positive_part(z);
    return 0.5 * (1.0 + m) * 0.5 * a_plus * a_plus + 0.5 * (1.0 - m) * 0.5 * a_minus * a_minus;
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      running, 0.0, traj.horizon(), 20, 1e-13, &error);
  const double mT = traj.m(traj.horizon());
  return integral - 0.5 * mT * mT;
}

}  // namespace mfglab
