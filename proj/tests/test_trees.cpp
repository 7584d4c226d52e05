#include <gtest/gtest.h>

#include <cmath>

#include "latlab/oracle/oracles.hpp"
#include "latlab/trees.hpp"

using namespace latlab;

TEST(TreeModel, SpheresAndBalls) {
  TreeModel t(2);
  EXPECT_EQ(t.degree(), 3);
  EXPECT_EQ(t.sphere_size(0), 1u);
  EXPECT_EQ(t.sphere_size(1), 3u);
  EXPECT_EQ(t.sphere_size(2), 6u);
  EXPECT_EQ(t.ball_size(2), 10u);
  EXPECT_EQ(TreeModel(3).ball_size(3), 1u + 4 + 12 + 36);
  EXPECT_THROW(TreeModel(0), InputError);
}

TEST(TreeConvolution, Examples) {
  EXPECT_EQ(tree_convolution(2, 1, 1, 0), 4u);
  EXPECT_EQ(tree_convolution(2, 1, 1, 2), 1u);
  EXPECT_EQ(tree_convolution(2, 1, 1, 3), 0u);
  EXPECT_EQ(tree_convolution(2, 2, 2, 0), TreeModel(2).ball_size(2));
}

TEST(TreeConvolution, MatchesBfsOracle) {
  for (int q : {2, 3})
    for (int r1 = 0; r1 <= 8; ++r1)
      for (int r2 = 0; r2 <= 8; ++r2)
        for (int d = 0; d <= r1 + r2 + 1; ++d)
          EXPECT_EQ(tree_convolution(q, r1, r2, d), oracle::tree_ball_intersection(q, r1, r2, d))
              << "q=" << q << " r1=" << r1 << " r2=" << r2 << " d=" << d;
}

TEST(TreeConvolution, FourRegularWithRadiusFour) {
  for (int d = 0; d <= 8; ++d) EXPECT_EQ(tree_convolution(3, 4, 4, d), oracle::tree_ball_intersection(3, 4, 4, d));
}

TEST(TreeConvolution, SymmetricAndSupported) {
  for (int q : {1, 2, 5})
    for (int r1 = 0; r1 <= 6; ++r1)
      for (int r2 = 0; r2 <= 6; ++r2)
        for (int d = 0; d <= 14; ++d) {
          EXPECT_EQ(tree_convolution(q, r1, r2, d), tree_convolution(q, r2, r1, d));
          if (d > r1 + r2) EXPECT_EQ(tree_convolution(q, r1, r2, d), 0u);
        }
}

TEST(TreeConvolution, LineCase) {
  // q = 1 is the bi-infinite path.
  for (int r = 0; r <= 6; ++r)
    for (int d = 0; d <= 2 * r; ++d) EXPECT_EQ(tree_convolution(1, r, r, d), static_cast<std::uint64_t>(2 * r + 1 - d));
}

TEST(ConvolutionLemma, WithinConstant) {
  for (int q : {2, 3, 4})
    for (int r = 0; r <= 10; ++r) {
      auto rep = check_convolution_lemma(q, r, kConvolutionConstant);
      EXPECT_TRUE(rep.within_slack) << "q=" << q << " r=" << r << " max=" << rep.max_ratio;
    }
  for (int r = 0; r <= 8; ++r) EXPECT_LE(check_convolution_lemma(2, r, 4.0).max_ratio, 4.0);
}

TEST(ConvolutionLemma, FarApartIsSinglePoint) {
  for (int q : {2, 3})
    for (int r = 1; r <= 8; ++r) {
      auto rep = check_convolution_lemma(q, r, kConvolutionConstant);
      EXPECT_EQ(rep.rows.back().count, 1u);
      EXPECT_LE(rep.rows.back().ratio, 1.0);
    }
}

TEST(ConvolutionLemma, DegenerateLineIsFlagged) {
  double previous = 0;
  for (int r = 1; r <= 10; ++r) {
    auto rep = check_convolution_lemma(1, r, kConvolutionConstant);
    EXPECT_GT(rep.max_ratio, previous);
    previous = rep.max_ratio;
  }
  EXPECT_FALSE(check_convolution_lemma(1, 10, kConvolutionConstant).within_slack);
}

TEST(ConvolutionLemma, RadiusCap) { EXPECT_THROW(check_convolution_lemma(2, 13, 3.0), ResourceError); }

TEST(ConvolutionLemma, CatchesOffByOneConvolution) {
  auto broken = +[](int q, int r1, int r2, int d) { return tree_convolution(q, r1, r2, d) + (d == 2 * r1 ? 1u : 0u); };
  for (int q : {2, 3})
    for (int r = 1; r <= 8; ++r)
      for (int d = 0; d <= 2 * r; ++d)
        if (broken(q, r, r, d) != oracle::tree_ball_intersection(q, r, r, d)) goto caught;
  FAIL() << "oracle did not detect the mutation";
caught:
  SUCCEED();
}

TEST(EigenDictionary, Examples) {
  EXPECT_DOUBLE_EQ(eigen_to_p(2 * std::sqrt(2.0), 2), 2.0);
  EXPECT_EQ(eigen_to_p(3.0, 2), kInfinity);
  EXPECT_NEAR(p_to_eigen(2.0, 5), 2 * std::sqrt(5.0), 1e-12);
  EXPECT_DOUBLE_EQ(p_to_eigen(kInfinity, 5), 6.0);
  EXPECT_DOUBLE_EQ(eigen_to_p(0.5, 3), 2.0);
}

TEST(EigenDictionary, RoundTripAndMonotone) {
  for (int q : {2, 3, 5, 13}) {
    double previous = 0;
    for (double p = 2.0; p < 60; p *= 1.13) {
      double lambda = p_to_eigen(p, q);
      EXPECT_GT(lambda, previous);
      previous = lambda;
      EXPECT_NEAR(eigen_to_p(lambda, q), p, 1e-6 * p) << q << " " << p;
      EXPECT_NEAR(eigen_to_p(-lambda, q), p, 1e-6 * p);
    }
  }
}

TEST(EigenDictionary, NonBacktrackingModulus) {
  for (int q : {2, 5})
    for (double p : {2.5, 3.0, 7.0}) EXPECT_NEAR(nb_modulus_to_p(std::pow(q, 1 - 1 / p), q), p, 1e-9);
  EXPECT_DOUBLE_EQ(nb_modulus_to_p(1.0, 3), 2.0);
}

TEST(EigenDictionary, DomainErrors) {
  EXPECT_THROW(eigen_to_p(4.5, 3), DomainError);
  EXPECT_THROW(eigen_to_p(1.0, 1), DomainError);
  EXPECT_THROW(p_to_eigen(1.5, 3), DomainError);
  EXPECT_THROW(p_to_eigen(3.0, 1), DomainError);
}

TEST(XiTree, Basics) {
  EXPECT_DOUBLE_EQ(xi_tree(0, 3.0, 4), 1.0);
  for (int d = 0; d <= 20; ++d) EXPECT_NEAR(xi_tree(d, kInfinity, 3), 1.0, 1e-9);
  EXPECT_THROW(xi_tree(-1, 2.0, 3), InputError);
}

TEST(XiTree, TemperedClosedForm) {
  // At p = 2 the spherical function is q^{-d/2} (1 + d (q-1)/(q+1)).
  for (int q : {2, 3, 7}) {
    auto phi = spherical_function(2.0, q, 40);
    for (int d = 0; d <= 40; ++d) {
      double expected = std::pow(q, -d / 2.0) * (1 + d * (q - 1.0) / (q + 1.0));
      EXPECT_NEAR(phi[d], expected, 1e-12 * (1 + d));
      EXPECT_LE(phi[d] * std::pow(q, d / 2.0), d + 1.0);
      EXPECT_GE(phi[d], std::pow(q, -d / 2.0) * (1 - 1e-12));
    }
  }
}

TEST(XiTree, DecayRateAboveTwo) {
  for (int q : {2, 3})
    for (double p : {3.0, 5.0}) {
      auto phi = spherical_function(p, q, 40);
      for (int d = 0; d <= 40; ++d) {
        double scaled = phi[d] * std::pow(q, d / p);
        EXPECT_GT(scaled, 0.1);
        EXPECT_LE(scaled, d + 1.0);
      }
      EXPECT_LT(spherical_recursion_residual(phi, p, q), 1e-12);
    }
}
