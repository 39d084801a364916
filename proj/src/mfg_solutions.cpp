#include "mfglab/mfg_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfglab {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// (2T-1)^2 (T+4) / (27T), the level of |m0| at which the fold root appears.
double fold_level(double T) { return (2.0 * T - 1.0) * (2.0 * T - 1.0) * (T + 4.0) / (27.0 * T); }

// Rounding level of consistency_poly at (M, T, m0): values below it are
// indistinguishable from zero.
double poly_noise(double M, double T, double m0) {
  const double a = std::abs(M);
  const double scale = T * T * a * a * a + std::abs(T * (2.0 - T)) * a * a + std::abs(1.0 - 2.0 * T) * a +
                       std::abs(m0);
  return 8.0 * std::numeric_limits<double>::epsilon() * scale;
}

bool is_root_value(double f, double M, double T, double m0) { return std::abs(f) <= poly_noise(M, T, m0); }

struct Piece {
  double lo;
  double hi;
};

// Monotone pieces of the sign-split cubic on [-1, 1]. The critical points
// of the nonnegative half are (2T-1)/(3T) and -1/T; only the first can
// fall inside [0, 1]. The nonpositive half mirrors it.
std::vector<Piece> monotone_pieces(double T) {
  const double fold = (2.0 * T - 1.0) / (3.0 * T);
  std::vector<Piece> pieces;
  if (fold > 0.0) {
    pieces = {{-1.0, -fold}, {-fold, 0.0}, {0.0, fold}, {fold, 1.0}};
  } else {
    pieces = {{-1.0, 0.0}, {0.0, 1.0}};
  }
  return pieces;
}

}  // namespace

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::M1: return "M1";
    case Branch::M2: return "M2";
    case Branch::M3: return "M3";
  }
  return "?";
}

const LabeledRoot& ConsistencyRoots::at(Branch b) const {
  for (const auto& r : roots) {
    if (r.label == b) return r;
  }
  throw std::out_of_range("no root labeled " + std::string(branch_name(b)));
}

bool ConsistencyRoots::has(Branch b) const {
  return std::any_of(roots.begin(), roots.end(), [b](const LabeledRoot& r) { return r.label == b; });
}

double consistency_poly(double M, double T, double m0) {
  return T * T * M * M * M + T * (2.0 - T) * M * std::abs(M) + (1.0 - 2.0 * T) * M - m0;
}

double consistency_poly_slope(double M, double T) {
  return 3.0 * T * T * M * M + 2.0 * T * (2.0 - T) * std::abs(M) + (1.0 - 2.0 * T);
}

double threshold_time(MeanState m0) {
  const double level = std::abs(m0.value());
  if (level == 0.0) return 0.5;
  double lo = 0.5;
  double hi = 2.0;
  if (!(fold_level(lo) - level < 0.0 && fold_level(hi) - level >= 0.0)) {
    throw NumericalError("threshold_time: no sign change on [1/2, 2]");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fold_level(mid) - level < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double solve_monotone_piece(double lo, double hi, double T, double m0) {
  const double a = lo;
  const double b = hi;
  double flo = consistency_poly(lo, T, m0);
  const double fhi = consistency_poly(hi, T, m0);
  if (is_root_value(flo, lo, T, m0)) return lo;
  if (is_root_value(fhi, hi, T, m0)) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw NumericalError("solve_monotone_piece: no sign change on bracket");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = consistency_poly(mid, T, m0);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  // Newton polish, kept inside the original bracket.
  double x = 0.5 * (lo + hi);
  double fx = consistency_poly(x, T, m0);
  for (int it = 0; it < 8 && std::abs(fx) > 1e-15; ++it) {
    const double slope = consistency_poly_slope(x, T);
    if (slope == 0.0) break;
    const double y = x - fx / slope;
    if (y < a || y > b) break;
    const double fy = consistency_poly(y, T, m0);
    if (std::abs(fy) >= std::abs(fx)) break;
    x = y;
    fx = fy;
  }
  return x;
}

ConsistencyRoots enumerate_terminal_means(double T, MeanState m0_state) {
  if (!(T > 0.0)) throw std::invalid_argument("enumerate_terminal_means: T must be positive");
  const double m0 = m0_state.value();
  const double fold = (2.0 * T - 1.0) / (3.0 * T);

  // Near T = T(m0) the two roots opposite in sign to m0 coalesce at the
  // fold point; report that point once when it is a root to 1e-10.
  bool fold_is_double_root = false;
  double fold_root = 0.0;
  if (m0 != 0.0 && fold > 0.0 && std::abs(T - threshold_time(m0_state)) <= kDegeneracyBand) {
    fold_root = -sgn(m0) * fold;
    fold_is_double_root = std::abs(consistency_poly(fold_root, T, m0)) <= 1e-10;
  }

  std::vector<double> found;
  for (const auto& p : monotone_pieces(T)) {
    if (fold_is_double_root && (p.lo == fold_root || p.hi == fold_root)) continue;
    const double flo = consistency_poly(p.lo, T, m0);
    const double fhi = consistency_poly(p.hi, T, m0);
    if (is_root_value(flo, p.lo, T, m0) || is_root_value(fhi, p.hi, T, m0) || (flo < 0.0) != (fhi < 0.0)) {
      found.push_back(solve_monotone_piece(p.lo, p.hi, T, m0));
    }
  }
  if (fold_is_double_root) found.push_back(fold_root);

  std::sort(found.begin(), found.end());
  std::vector<double> merged;
  for (double M : found) {
    if (!merged.empty() && M - merged.back() <= kRootMergeTolerance) {
      if (std::abs(consistency_poly(M, T, m0)) < std::abs(consistency_poly(merged.back(), T, m0))) {
        merged.back() = M;
      }
      continue;
    }
    merged.push_back(M);
  }

  ConsistencyRoots out{T, m0, {}};
  // Labels are assigned in order of increasing value for m0 >= 0 and of
  // decreasing value for m0 < 0, so M3 is always the sign-matched root.
  std::vector<Branch> labels;
  switch (merged.size()) {
    case 1: labels = {Branch::M3}; break;
    case 2: labels = {Branch::M1, Branch::M3}; break;
    case 3: labels = {Branch::M1, Branch::M2, Branch::M3}; break;
    default: {
      std::ostringstream os;
      os << "enumerate_terminal_means: found " << merged.size() << " roots at T=" << T << ", m0=" << m0;
      throw NumericalError(os.str());
    }
  }
  if (m0 < 0.0) std::reverse(labels.begin(), labels.end());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    const double M = merged[i];
    const bool is_double = fold_is_double_root && M == fold_root;
    out.roots.push_back({labels[i], M, std::abs(consistency_poly(M, T, m0)), is_double});
  }
  return out;
}

double MfgTrajectory::z(double t) const { return 2.0 * M_ / (std::abs(M_) * (T_ - t) + 1.0); }

double MfgTrajectory::m(double t) const {
  const double s = sgn(M_);
  const double ratio = (std::abs(M_) * (T_ - t) + 1.0) / (std::abs(M_) * T_ + 1.0);
  return (m0_ - s) * ratio * ratio + s;
}

MfgTrajectory build_trajectory(double T, MeanState m0, double M) {
  if (!(T > 0.0)) throw std::invalid_argument("build_trajectory: T must be positive");
  const double residual = std::abs(consistency_poly(M, T, m0.value()));
  if (!(residual <= 1e-8)) {
    std::ostringstream os;
    os << "build_trajectory: M=" << M << " is not a consistency root (residual " << residual << ")";
    throw std::invalid_argument(os.str());
  }
  if (M == 0.0 && m0.value() != 0.0) {
    throw std::invalid_argument("build_trajectory: M = 0 is a root only for m0 = 0");
  }
  return MfgTrajectory(T, m0.value(), M);
}

double verify_mfg_residual(const MfgTrajectory& traj, const TimeGrid& grid) {
  double worst = 0.0;
  const auto& t = grid.nodes();
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i - 1];
    const double dz = (traj.z(t[i + 1]) - traj.z(t[i - 1])) / h;
    const double dm = (traj.m(t[i + 1]) - traj.m(t[i - 1])) / h;
    const double z = traj.z(t[i]);
    const double m = traj.m(t[i]);
    worst = std::max(worst, std::abs(dz - 0.5 * z * std::abs(z)));
    worst = std::max(worst, std::abs(dm - (-m * std::abs(z) + z)));
  }
  return worst;
}

}  // namespace mfglab
