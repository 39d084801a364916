#pragma once

#include <vector>

#include <boost/numeric/odeint.hpp>

#include "mfglab/simplex_core.hpp"

namespace mfglab {

struct OdeTolerances {
  double abs = 1e-9;
  double rel = 1e-8;
};

using OdeState = std::vector<double>;

/// Adaptive Dormand-Prince 5(4) from t0 to t1 (t1 < t0 integrates backward).
/// rhs(y, dydt, t) follows the odeint system signature.
template <class Rhs>
void integrate_rk45(Rhs&& rhs, OdeState& y, double t0, double t1, OdeTolerances tol,
                    double initial_step) {
  namespace odeint = boost::numeric::odeint;
  if (t0 == t1) return;
  const double dt = t1 > t0 ? initial_step : -initial_step;
  try {
    odeint::integrate_adaptive(
        odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(tol.abs, tol.rel),
        rhs, y, t0, t1, dt);
  } catch (const odeint::odeint_error& e) {
    throw NumericalError(std::string("rk45 integration failed: ") + e.what());
  }
}

}  // namespace mfglab
