#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfglab/master_entropy.hpp"
#include "mfglab/mfg_solutions.hpp"

using namespace mfglab;

namespace {

const double kSqrt3Half = std::sqrt(3.0) / 2.0;

double golden_root(double T) { return ((T - 2.0) + std::sqrt(T * T + 4.0 * T)) / (2.0 * T); }

}  // namespace

TEST_SUITE("mfg_solutions") {
  TEST_CASE("consistency polynomial examples") {
    CHECK(consistency_poly(0.0, 2.0, 0.0) == 0.0);
    CHECK(std::abs(consistency_poly(kSqrt3Half, 2.0, 0.0)) < 1e-15);
    CHECK(consistency_poly(1.0, 1.0, 0.0) == 1.0);

    // The slope matches a central difference away from M = 0.
    for (double M : {-0.8, -0.3, 0.2, 0.7}) {
      const double h = 1e-6;
      const double fd = (consistency_poly(M + h, 1.3, 0.1) - consistency_poly(M - h, 1.3, 0.1)) / (2 * h);
      CHECK(consistency_poly_slope(M, 1.3) == doctest::Approx(fd).epsilon(1e-7));
    }
  }

  TEST_CASE("threshold time") {
    CHECK(threshold_time(MeanState(0.0)) == 0.5);
    CHECK(threshold_time(MeanState(1.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(threshold_time(MeanState(5.0 / 27.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(threshold_time(MeanState(-5.0 / 27.0)) == doctest::Approx(1.0).epsilon(1e-12));
    for (double m0 : {0.05, 0.2, 0.4, 0.7, 0.95}) {
      const double T = threshold_time(MeanState(m0));
      CHECK((2 * T - 1) * (2 * T - 1) * (T + 4) / (27 * T) == doctest::Approx(m0).epsilon(1e-11));
    }
  }

  TEST_CASE("enumerate terminal means examples") {
    const auto r = enumerate_terminal_means(2.0, MeanState(0.0));
    REQUIRE(r.count() == 3);
    CHECK(r.roots[0].M == doctest::Approx(-kSqrt3Half).epsilon(1e-14));
    CHECK(r.roots[1].M == 0.0);
    CHECK(r.roots[2].M == doctest::Approx(kSqrt3Half).epsilon(1e-14));
    CHECK(r.at(Branch::M3).M > 0.0);

    const auto u = enumerate_terminal_means(0.4, MeanState(0.3));
    REQUIRE(u.count() == 1);
    CHECK(u.roots[0].label == Branch::M3);
    CHECK(u.roots[0].M > 0.0);
    CHECK(std::abs(consistency_poly(u.roots[0].M, 0.4, 0.3)) <= 1e-12);

    const auto g = enumerate_terminal_means(1.0, MeanState(0.0));
    REQUIRE(g.count() == 3);
    CHECK(g.roots[2].M == doctest::Approx(golden_root(1.0)).epsilon(1e-13));
    CHECK(g.roots[0].M == doctest::Approx(-golden_root(1.0)).epsilon(1e-13));
  }

  TEST_CASE("roots are sorted, labeled and accurate") {
    for (double T : {0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0}) {
      for (double m0 = -1.0; m0 <= 1.0 + 1e-12; m0 += 0.05) {
        const double m = std::abs(m0) < 1e-12 ? 0.0 : std::clamp(m0, -1.0, 1.0);
        const auto r = enumerate_terminal_means(T, MeanState(m));
        REQUIRE(r.count() >= 1);
        for (std::size_t i = 0; i < r.count(); ++i) {
          CHECK(std::abs(consistency_poly(r.roots[i].M, T, m)) <= 1e-10);
          CHECK(std::abs(r.roots[i].M) <= 1.0);
          if (i > 0) CHECK(r.roots[i - 1].M < r.roots[i].M);
        }
        if (m != 0.0) {
          CHECK(r.has(Branch::M3));
          CHECK(r.at(Branch::M3).M * m > 0.0);
        }
      }
    }
  }

  TEST_CASE("sign symmetry") {
    for (double T : {0.4, 1.0, 2.0, 2.5}) {
      for (double m0 : {0.01, 0.1, 0.3, 0.6, 0.9, 1.0}) {
        const auto p = enumerate_terminal_means(T, MeanState(m0));
        const auto n = enumerate_terminal_means(T, MeanState(-m0));
        REQUIRE(p.count() == n.count());
        const std::size_t c = p.count();
        for (std::size_t i = 0; i < c; ++i) {
          CHECK(n.roots[c - 1 - i].M == doctest::Approx(-p.roots[i].M).epsilon(1e-10));
          CHECK(n.roots[c - 1 - i].label == p.roots[i].label);
        }
      }
    }
  }

  TEST_CASE("count classification around the threshold") {
    for (double m0 : {0.02, 0.1, 0.3, 0.6, 0.9}) {
      for (double sign : {1.0, -1.0}) {
        const MeanState m(sign * m0);
        const double Tc = threshold_time(m);
        CHECK(enumerate_terminal_means(0.9 * Tc, m).count() == 1);
        CHECK(enumerate_terminal_means(Tc - 1e-4, m).count() == 1);
        const auto at = enumerate_terminal_means(Tc, m);
        CHECK(at.count() == 2);
        int doubles = 0;
        for (const auto& root : at.roots) doubles += root.double_root ? 1 : 0;
        CHECK(doubles == 1);
        CHECK(enumerate_terminal_means(Tc + 1e-4, m).count() == 3);
        CHECK(enumerate_terminal_means(1.5 * Tc, m).count() == 3);
        CHECK(enumerate_terminal_means(2.0, m).count() == (Tc < 2.0 ? 3u : 2u));
      }
    }
    CHECK(enumerate_terminal_means(0.45, MeanState(0.0)).count() == 1);
    CHECK(enumerate_terminal_means(0.5, MeanState(0.0)).count() == 1);
    CHECK(enumerate_terminal_means(0.5 + 1e-4, MeanState(0.0)).count() == 3);
    CHECK(enumerate_terminal_means(2.0, MeanState(1.0)).count() == 2);
  }

  TEST_CASE("sign structure and ordering chain of the branches") {
    const double T = 2.0;
    const double q = -(2 * T - 1) / (3 * T);
    const double m_plus = golden_root(T);
    for (double m0 : {0.2, 0.5, 0.9}) {
      double prev1 = -2.0, prev2 = 2.0, prev3 = -2.0;
      for (int i = 1; i <= 40; ++i) {
        const double m = m0 * i / 40.0;
        const auto r = enumerate_terminal_means(T, MeanState(m));
        REQUIRE(r.count() == 3);
        const double M1 = r.at(Branch::M1).M;
        const double M2 = r.at(Branch::M2).M;
        const double M3 = r.at(Branch::M3).M;
        CHECK(M3 > 0.0);
        CHECK(M1 < 0.0);
        CHECK(M2 < 0.0);
        CHECK(M3 >= prev3);
        CHECK(M1 >= prev1);
        CHECK(M2 <= prev2);
        prev1 = M1;
        prev2 = M2;
        prev3 = M3;
        CHECK(M3 > m_plus);
        CHECK(m_plus > std::abs(M1));
        CHECK(std::abs(M1) > std::abs(M2));
        CHECK(M1 < q);
        CHECK(q < M2);
        CHECK(std::abs(M2 - q) > std::abs(M1 - q));
      }
    }
  }

  TEST_CASE("trajectory closed forms") {
    const auto zero = build_trajectory(2.0, MeanState(0.0), 0.0);
    for (double t : {0.0, 0.7, 2.0}) {
      CHECK(zero.z(t) == 0.0);
      CHECK(zero.m(t) == 0.0);
    }
    CHECK(verify_mfg_residual(zero, TimeGrid::uniform(2.0, 1e-2)) == 0.0);

    const auto plus = build_trajectory(2.0, MeanState(0.0), kSqrt3Half);
    CHECK(plus.z(2.0) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(plus.m(2.0) == doctest::Approx(kSqrt3Half).epsilon(1e-14));
    CHECK(plus.z(0.0) == doctest::Approx(std::sqrt(3.0) / (std::sqrt(3.0) + 1.0)).epsilon(1e-14));
    CHECK(plus.m(0.0) == 0.0);

    const double r1 = verify_mfg_residual(plus, TimeGrid::uniform(2.0, 1e-3));
    const double r2 = verify_mfg_residual(plus, TimeGrid::uniform(2.0, 5e-4));
    CHECK(r1 <= 1e-5);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("trajectory endpoint consistency on every branch") {
    for (double T : {1.0, 2.0, 3.0}) {
      for (double m0 : {-0.7, -0.1, 0.0, 0.05, 0.4}) {
        const auto r = enumerate_terminal_means(T, MeanState(m0));
        for (const auto& root : r.roots) {
          const auto tr = build_trajectory(T, MeanState(m0), root.M);
          CHECK(tr.m(T) == doctest::Approx(root.M).epsilon(1e-9));
          CHECK(tr.z(T) == doctest::Approx(2.0 * tr.m(T)).epsilon(1e-9));
          CHECK(tr.m(0.0) == doctest::Approx(m0).epsilon(1e-12));
          CHECK(verify_mfg_residual(tr, TimeGrid::uniform(T, 1e-3)) <= 1e-5);
        }
      }
    }
  }

  TEST_CASE("build trajectory rejects inconsistent terminal means") {
    CHECK_THROWS_AS(build_trajectory(2.0, MeanState(0.3), 0.5), std::invalid_argument);
    CHECK_THROWS_AS(build_trajectory(2.0, MeanState(0.3), 0.0), std::invalid_argument);
  }

  TEST_CASE("sign-matched root agrees with the labeled branch") {
    for (double T : {0.3, 1.0, 2.0}) {
      for (double m0 : {-0.8, -0.2, 0.1, 0.6}) {
        CHECK(sign_root(T, MeanState(m0)) ==
              doctest::Approx(enumerate_terminal_means(T, MeanState(m0)).at(Branch::M3).M).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("monotone piece solver needs a bracket") {
    CHECK_THROWS_AS(solve_monotone_piece(0.9, 1.0, 2.0, 0.0), NumericalError);
    CHECK(solve_monotone_piece(0.5, 1.0, 2.0, 0.0) == doctest::Approx(kSqrt3Half).epsilon(1e-15));
  }
}
