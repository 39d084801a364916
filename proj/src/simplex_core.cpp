#include "mfglab/simplex_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mfglab {

double check_interval(double value, double lo, double hi, const char* what) {
  if (!std::isfinite(value) || value < lo - kBoundTolerance || value > hi + kBoundTolerance) {
    std::ostringstream os;
    os << what << " = " << value << " outside [" << lo << ", " << hi << "]";
    throw std::invalid_argument(os.str());
  }
  return std::clamp(value, lo, hi);
}

MeanState::MeanState(double m) : m_(check_interval(m, -1.0, 1.0, "mean")) {}

PlayerState player_state_from_int(int x) {
  if (x == 1) return PlayerState::kPlus;
  if (x == -1) return PlayerState::kMinus;
  throw std::invalid_argument("player state must be -1 or +1, got " + std::to_string(x));
}

SimplexFraction::SimplexFraction(int k, int n) : k_(k), n_(n) {
  if (n < 1 || k < 0 || k > n) {
    throw std::invalid_argument("simplex fraction " + std::to_string(k) + "/" +
                                std::to_string(n) + " is not in S_n");
  }
}

TimeGrid TimeGrid::uniform(double horizon, double max_step) {
  if (!(horizon > 0.0) || !(max_step > 0.0)) {
    throw std::invalid_argument("uniform grid needs positive horizon and step");
  }
  const auto segments = static_cast<std::size_t>(std::ceil(horizon / max_step - 1e-9));
  std::vector<double> nodes(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) {
    nodes[i] = horizon * static_cast<double>(i) / static_cast<double>(segments);
  }
  nodes.back() = horizon;
  return TimeGrid(std::move(nodes));
}

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2 || nodes_.front() != 0.0) {
    throw std::invalid_argument("time grid must start at 0 and have at least two nodes");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const double gap = nodes_[i] - nodes_[i - 1];
    if (!(gap > 0.0)) throw std::invalid_argument("time grid nodes must be strictly increasing");
    max_step_ = std::max(max_step_, gap);
  }
}

std::size_t TimeGrid::segment(double t) const {
  if (t <= nodes_.front()) return 0;
  if (t >= nodes_.back()) return nodes_.size() - 2;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

double hamiltonian(double p) {
  const double a = optimal_rate(p);
  return 0.5 * a * a;
}

double optimal_rate(double p) { return negative_part(p); }

double terminal_cost(PlayerState x, MeanState m) { return -m.value() * sign_of(x); }

double monotonicity_gap(MeanState m, MeanState m2) {
  const double d = m.value() - m2.value();
  return -d * d;
}

double mean_to_fraction(MeanState m) { return 0.5 * (1.0 + m.value()); }

MeanState fraction_to_mean(double mu) {
  return MeanState(2.0 * check_interval(mu, 0.0, 1.0, "fraction") - 1.0);
}

}  // namespace mfglab
