#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latlab/counting.hpp"
#include "latlab/oracle/oracles.hpp"

using namespace latlab;

namespace {

// #{g in SL3(Z) : |entries| <= T, g = I mod N} by looping over all 9 entries.
std::uint64_t sl3_principal_oracle(std::int64_t N, std::int64_t T) {
  std::vector<std::int64_t> diag, off;
  for (std::int64_t v = -T; v <= T; ++v) {
    if (floor_mod(v - 1, N) == 0) diag.push_back(v);
    if (floor_mod(v, N) == 0) off.push_back(v);
  }
  std::uint64_t count = 0;
  for (auto a : diag)
    for (auto b : off)
      for (auto c : off)
        for (auto d : off)
          for (auto e : diag)
            for (auto f : off)
              for (auto g : off)
                for (auto h : off)
                  for (auto i : diag)
                    count += a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g) == 1;
  return count;
}

}  // namespace

TEST(CountBruteforce, BelowLevelOnlyIdentity) {
  for (std::int64_t N = 3; N <= 8; ++N)
    for (std::int64_t T = 1; T < N - 1; ++T)
      EXPECT_EQ(count_bruteforce(SubgroupSpec::principal(N), T).count, 1u) << N << " " << T;
}

TEST(CountBruteforce, FullGroupGrowsQuadratically) {
  std::vector<double> ratios;
  for (std::int64_t T : {50, 100, 200}) {
    auto c = count_bruteforce(SubgroupSpec::principal(1), T).count;
    ratios.push_back(static_cast<double>(c) / static_cast<double>(T * T));
  }
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LE(*hi / *lo, 2.0);
}

TEST(CountBruteforce, FullGroupMatchesOracle) {
  for (std::int64_t T : {0, 1, 2, 5, 17, 40})
    EXPECT_EQ(count_bruteforce(SubgroupSpec::principal(1), T).count, oracle::sl2_ball_size(T)) << T;
}

TEST(CountBruteforce, LineEnumerationAgrees) {
  for (std::int64_t T : {3, 11, 30}) {
    std::uint64_t n = 0;
    for_each_sl2_in_box(T, [&](const Sl2&) { ++n; });
    EXPECT_EQ(n, oracle::sl2_ball_size(T));
  }
}

TEST(CountBruteforce, NestedSubgroupsGiveSmallerCounts) {
  for (std::int64_t T : {20, 60}) {
    auto c1 = count_bruteforce(SubgroupSpec::principal(1), T).count;
    auto c0 = count_bruteforce(SubgroupSpec::gamma0(6), T).count;
    auto c3 = count_bruteforce(SubgroupSpec::gamma0(3), T).count;
    auto p6 = count_bruteforce(SubgroupSpec::principal(6), T).count;
    auto p3 = count_bruteforce(SubgroupSpec::principal(3), T).count;
    EXPECT_LE(c0, c3);
    EXPECT_LE(c3, c1);
    EXPECT_LE(p6, p3);
    EXPECT_LE(p6, c0);
  }
}

TEST(CountBruteforce, ConjugatorMatchesDirectEnumeration) {
  const IntMatrix y{{1, 1}, {0, 1}};
  const auto spec = SubgroupSpec::gamma0(3);
  const std::int64_t T = 10;
  // delta ranges over the box; gamma = y delta y^{-1} must lie in the subgroup.
  std::uint64_t direct = 0;
  for (const auto& delta : sl2_box(T)) direct += subgroup_contains(spec, y * delta.to_int_matrix() * y.inverse());
  EXPECT_EQ(count_bruteforce(spec, T, y).count, direct);
}

TEST(CountBruteforce, SlThreeSmallBoxes) {
  EXPECT_EQ(count_bruteforce(SubgroupSpec::principal(1, Ambient::sl3), 1).count, sl3_principal_oracle(1, 1));
  EXPECT_EQ(count_bruteforce(SubgroupSpec::principal(2, Ambient::sl3), 3).count, sl3_principal_oracle(2, 3));
  EXPECT_EQ(count_bruteforce(SubgroupSpec::principal(3, Ambient::sl3), 4).count, sl3_principal_oracle(3, 4));
}

TEST(CountBruteforce, SlThreeConjugatorTrivialForPrincipal) {
  // Gamma(N) is normal, so conjugation does not change the count.
  const IntMatrix y{{1, 1, 0}, {0, 1, 1}, {0, 0, 1}};
  auto spec = SubgroupSpec::principal(2, Ambient::sl3);
  EXPECT_EQ(count_bruteforce(spec, 2, y).count, count_bruteforce(spec, 2).count);
}

TEST(CountBruteforce, Caps) {
  EXPECT_THROW(count_bruteforce(SubgroupSpec::principal(2), 1001), ResourceError);
  EXPECT_THROW(count_bruteforce(SubgroupSpec::principal(2, Ambient::sl3), 41), ResourceError);
  EXPECT_THROW(count_bruteforce(SubgroupSpec::principal(2), -1), InputError);
  EXPECT_THROW(count_bruteforce(SubgroupSpec::principal(2), 3, IntMatrix::identity(3)), InputError);
}

TEST(CountFast, Examples) {
  EXPECT_EQ(count_sarnak_xue_fast(2, 10).count, count_bruteforce(SubgroupSpec::principal(2), 10).count);
  EXPECT_EQ(count_sarnak_xue_fast(5, 4).count, 1u);
  EXPECT_EQ(count_sarnak_xue_fast(1, 100).count, count_bruteforce(SubgroupSpec::principal(1), 100).count);
}

TEST(CountFast, AgreesWithBruteForceOnAGrid) {
  for (std::int64_t N = 1; N <= 8; ++N)
    for (std::int64_t T : {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 25, 64, 127, 200})
      EXPECT_EQ(count_sarnak_xue_fast(N, T).count, count_bruteforce(SubgroupSpec::principal(N), T).count)
          << "N=" << N << " T=" << T;
}

TEST(CountFast, LargerLevels) {
  for (auto [N, T] : std::vector<std::pair<std::int64_t, std::int64_t>>{{11, 400}, {13, 600}, {17, 900}})
    EXPECT_EQ(count_sarnak_xue_fast(N, T).count, count_bruteforce(SubgroupSpec::principal(N), T).count);
}

TEST(CountFast, ThreadIndependent) {
  EXPECT_EQ(count_sarnak_xue_fast(7, 5000, 1).count, count_sarnak_xue_fast(7, 5000, 3).count);
}

TEST(CountFast, LowerBoundFromUnipotents) {
  for (std::int64_t N : {2, 5, 9})
    for (std::int64_t T : {10, 100, 1000})
      EXPECT_GE(count_sarnak_xue_fast(N, T).count, sl_n_lower_bound(2, N, T));
  EXPECT_EQ(sl_n_lower_bound(2, 5, 12), 5u);
  EXPECT_EQ(sl_n_lower_bound(3, 2, 4), 125u);
}

TEST(LoglogSlope, RecoversPowerLaw) {
  std::vector<double> x, y;
  for (double v = 1; v < 1000; v *= 1.7) {
    x.push_back(v);
    y.push_back(3 * v * v);
  }
  EXPECT_NEAR(loglog_slope(x, y), 2.0, 1e-12);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), InputError);
}

TEST(FixedPoints, Examples) {
  auto q = enumerate_quotient(SubgroupSpec::gamma0(5));
  EXPECT_EQ(fixed_point_count(q, IntMatrix::identity(2)), q.index());
  EXPECT_EQ(fixed_point_count(q, IntMatrix{{1, 1}, {0, 1}}), 1u);
  EXPECT_EQ(fixed_point_count(q, IntMatrix{{0, -1}, {1, 0}}), 2u);
  EXPECT_THROW(fixed_point_count(q, IntMatrix::identity(3)), InputError);
}

TEST(FixedPoints, MatchProjectiveLineOracle) {
  std::mt19937_64 rng(41);
  for (std::int64_t N : {5, 7, 9, 12}) {
    auto q = enumerate_quotient(SubgroupSpec::gamma0(N));
    for (const auto& g : sl2_box(3)) {
      if (rng() % 3) continue;
      EXPECT_EQ(fixed_point_count(q, g.to_int_matrix()), oracle::projective_fixed_points(N, g.a, g.b, g.c, g.d))
          << "N=" << N;
    }
  }
}

TEST(FixedPoints, PrincipalSubgroupIsNormal) {
  // A coset is fixed iff gamma is conjugate into Gamma(N); normality makes that all or nothing.
  auto q = enumerate_quotient(SubgroupSpec::principal(4));
  for (const auto& g : sl2_box(4)) {
    auto f = fixed_point_count(q, g.to_int_matrix());
    EXPECT_TRUE(f == 0 || f == q.index());
    EXPECT_EQ(f == q.index(), reduce_mod(g.to_int_matrix(), 4).is_identity());
  }
}

TEST(RadiusProfile, MethodsAgree) {
  std::vector<double> grid{0, 1, 2, 3, 4, 5, 6, 7, 8};
  for (const auto& spec : {SubgroupSpec::gamma0(5), SubgroupSpec::gamma0(7), SubgroupSpec::principal(3)}) {
    auto q = enumerate_quotient(spec);
    for (auto kind : {LengthKind::cartan, LengthKind::log_norm}) {
      auto a = radius_profile(q, grid, kind, ProfileMethod::conjugator_average);
      auto b = radius_profile(q, grid, kind, ProfileMethod::fixed_points);
      ASSERT_EQ(a.rows.size(), b.rows.size());
      for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].total, b.rows[i].total) << spec.name();
    }
  }
}

TEST(RadiusProfile, IndependentOfCosetLifts) {
  // Replacing a lift y by g y with g in the subgroup permutes the subgroup under conjugation.
  auto spec = SubgroupSpec::gamma0(7);
  auto q = enumerate_quotient(spec);
  auto lifts = minimal_lifts(q);
  const Sl2 g{1, 3, 7, 22};
  ASSERT_TRUE(subgroup_contains(spec, g.to_int_matrix()));
  std::vector<Sl2> other;
  for (const auto& y : lifts) other.push_back(mul(g, y));
  std::vector<double> grid{2, 4, 6, 8};
  auto a = radius_profile(q, grid, LengthKind::cartan, ProfileMethod::conjugator_average, &lifts);
  auto b = radius_profile(q, grid, LengthKind::cartan, ProfileMethod::conjugator_average, &other);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(a.rows[i].total, b.rows[i].total);
}

TEST(RadiusProfile, MinimalLiftsRepresentEveryCoset) {
  auto q = enumerate_quotient(SubgroupSpec::principal(5));
  auto lifts = minimal_lifts(q);
  ASSERT_EQ(lifts.size(), q.index());
  for (std::uint32_t c = 0; c < q.index(); ++c) EXPECT_EQ(q.coset_of(lifts[c].to_int_matrix()), c);
}

TEST(RadiusProfile, FullGroupGrowsLikeExponential) {
  auto q = enumerate_quotient(SubgroupSpec::principal(1));
  std::vector<double> grid{4, 5, 6, 7, 8};
  auto prof = radius_profile(q, grid, LengthKind::cartan, ProfileMethod::fixed_points);
  double lo = 1e300, hi = 0;
  for (const auto& r : prof.rows) {
    double v = static_cast<double>(r.total) / std::exp(r.d0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LE(hi / lo, 4.0);
}

TEST(RadiusProfile, OnlyIdentityBelowTheSystole) {
  const std::int64_t N = 7;
  auto q = enumerate_quotient(SubgroupSpec::principal(N));
  std::vector<double> grid{0.5, 1, 2, 3, 2 * std::log(N - 1.0) - 1e-6};
  auto prof = radius_profile(q, grid, LengthKind::cartan, ProfileMethod::fixed_points);
  for (const auto& r : prof.rows) EXPECT_DOUBLE_EQ(r.averaged, 1.0) << r.d0;
}

TEST(RadiusProfile, RejectsBadGrids) {
  auto q = enumerate_quotient(SubgroupSpec::gamma0(3));
  EXPECT_THROW(radius_profile(q, {}, LengthKind::cartan, ProfileMethod::fixed_points), InputError);
  EXPECT_THROW(radius_profile(q, {-1}, LengthKind::cartan, ProfileMethod::fixed_points), InputError);
  EXPECT_THROW(radius_profile(q, {25}, LengthKind::cartan, ProfileMethod::fixed_points), ResourceError);
  auto q3 = enumerate_quotient(SubgroupSpec::gamma0(3, Ambient::sl3));
  EXPECT_THROW(radius_profile(q3, {1}, LengthKind::cartan, ProfileMethod::fixed_points), InputError);
}
