#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mfglab {

/// Slack allowed on structural bounds such as |m| <= 1. Inputs outside the
/// bound by less than this are clamped; anything further out is rejected.
inline constexpr double kBoundTolerance = 1e-12;

/// Raised when an iterative solver cannot meet its contract (step size
/// underflow, missing bracket, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean m = m_1 - m_{-1} of a probability on {-1, 1}.
class MeanState {
 public:
  explicit MeanState(double m);

  double value() const { return m_; }
  operator double() const { return m_; }

 private:
  double m_;
};

enum class PlayerState : int { kMinus = -1, kPlus = 1 };

inline int sign_of(PlayerState x) { return static_cast<int>(x); }
inline PlayerState flipped(PlayerState x) {
  return x == PlayerState::kPlus ? PlayerState::kMinus : PlayerState::kPlus;
}
PlayerState player_state_from_int(int x);

/// Exact point k/n of the discrete simplex S_n = {0, 1/n, ..., 1}.
class SimplexFraction {
 public:
  SimplexFraction(int k, int n);

  int count() const { return k_; }
  int denominator() const { return n_; }
  double value() const { return static_cast<double>(k_) / n_; }

  /// 1 - k/n.
  SimplexFraction complement() const { return {n_ - k_, n_}; }
  bool has_next() const { return k_ < n_; }
  bool has_prev() const { return k_ > 0; }
  SimplexFraction next() const { return {k_ + 1, n_}; }
  SimplexFraction prev() const { return {k_ - 1, n_}; }

  friend bool operator==(const SimplexFraction&, const SimplexFraction&) = default;

 private:
  int k_;
  int n_;
};

/// Strictly increasing nodes from 0 to a horizon.
class TimeGrid {
 public:
  /// Uniform grid with the fewest segments whose width does not exceed max_step.
  static TimeGrid uniform(double horizon, double max_step);

  explicit TimeGrid(std::vector<double> nodes);

  double horizon() const { return nodes_.back(); }
  double max_step() const { return max_step_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }

  /// Index i with nodes[i] <= t <= nodes[i+1], t clamped into [0, T].
  std::size_t segment(double t) const;

 private:
  std::vector<double> nodes_;
  double max_step_ = 0.0;
};

/// H(p) = (p^-)^2 / 2.
double hamiltonian(double p);

/// p^- = max(-p, 0), the maximizing flip rate in H.
double optimal_rate(double p);

inline double negative_part(double p) { return p < 0.0 ? -p : 0.0; }
inline double positive_part(double p) { return p > 0.0 ? p : 0.0; }

/// G(x, m) = -m x.
double terminal_cost(PlayerState x, MeanState m);

/// Lasry-Lions pairing sum_x (G(x,m) - G(x,m2)) (m_x - m2_x) = -(m - m2)^2.
double monotonicity_gap(MeanState m, MeanState m2);

/// mu = (1 + m) / 2.
double mean_to_fraction(MeanState m);

/// m = 2 mu - 1. Rejects mu outside [0, 1] beyond kBoundTolerance.
MeanState fraction_to_mean(double mu);

/// Clamp-or-reject helper shared by the bound checks.
double check_interval(double value, double lo, double hi, const char* what);

}  // namespace mfglab
