#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "leximin/core.hpp"

using namespace leximin;

namespace {

const UtilityVector kX{1, 10, 15};
const UtilityVector kY{1, 40, 60};
const UtilityVector kZ{2, 20, 30};

UtilityVector random_vector(std::mt19937_64& rng, std::size_t n, int hi) {
  std::uniform_int_distribution<int> d(0, hi);
  std::vector<double> v(n);
  for (auto& e : v) e = d(rng);
  return UtilityVector(v);
}

}  // namespace

TEST(SortOutcomes, AscendingAndStable) {
  EXPECT_EQ(sort_outcomes(UtilityVector{15, 1, 10}).vector(), (std::vector<double>{1, 10, 15}));
  EXPECT_EQ(sort_outcomes(UtilityVector{5}).vector(), (std::vector<double>{5}));
  EXPECT_EQ(sort_outcomes(UtilityVector{2, 2, 2}).vector(), (std::vector<double>{2, 2, 2}));
}

TEST(UtilityVector, RejectsBadInput) {
  EXPECT_THROW(UtilityVector(std::vector<double>{}), InputError);
  EXPECT_THROW(UtilityVector({1.0, -1.0}), InputError);
  EXPECT_THROW(UtilityVector({NAN}), InputError);
  EXPECT_THROW(ApproxFactors(0.0, 0.0), InputError);
  EXPECT_THROW(ApproxFactors(1.5, 0.0), InputError);
  EXPECT_THROW(ApproxFactors(1.0, -0.1), InputError);
}

TEST(Preferred, WitnessExamples) {
  auto w = is_leximin_preferred(kZ, kX, ApproxFactors(0.75, 1));
  ASSERT_TRUE(w);
  EXPECT_EQ(w->k, 2u);
  EXPECT_NEAR(w->margin, 20 - 11 / 0.75, 1e-12);
  EXPECT_FALSE(is_leximin_preferred(kZ, kY, ApproxFactors(0.75, 1)));
  EXPECT_FALSE(is_leximin_preferred(kZ, kZ, ApproxFactors(1, 0)));

  auto probe = is_leximin_preferred(UtilityVector{105.5, 94.5}, UtilityVector{94.5, 94.5}, ApproxFactors(0.9, 0));
  ASSERT_TRUE(probe);
  EXPECT_EQ(probe->k, 2u);
  EXPECT_THROW(is_leximin_preferred(UtilityVector{1}, UtilityVector{1, 2}, ApproxFactors()), InputError);
}

TEST(RelationSet, TableExamples) {
  const std::vector<UtilityVector> c{kX, kY, kZ};
  using P = std::set<std::pair<std::size_t, std::size_t>>;
  EXPECT_EQ(relation_set(c, ApproxFactors(1, 0)), (P{{2, 0}, {2, 1}, {1, 0}}));
  EXPECT_EQ(relation_set(c, ApproxFactors(0.25, 0)), P{});
  EXPECT_EQ(relation_set(c, ApproxFactors(1, 15)), (P{{1, 0}}));
}

TEST(ApproxOptimal, Examples) {
  const std::vector<UtilityVector> c{kX, kY, kZ};
  EXPECT_TRUE(is_approx_leximin_optimal(kZ, c, ApproxFactors(1, 0)));
  EXPECT_FALSE(is_approx_leximin_optimal(kX, c, ApproxFactors(0.5, 0)));
  EXPECT_TRUE(is_approx_leximin_optimal(kX, {}, ApproxFactors(1, 0)));
}

TEST(Egalitarian, Examples) {
  EXPECT_EQ(egalitarian_value(kY), 1);
  EXPECT_EQ(egalitarian_value(UtilityVector{5}), 5);
  EXPECT_EQ(egalitarian_value(UtilityVector{0, 3}), 0);
}

TEST(FactorTransform, Examples) {
  EXPECT_EQ(factor_transform(ApproxFactors(1, 0)), ApproxFactors(1, 0));
  EXPECT_NEAR(factor_transform(ApproxFactors(0.5, 0)).alpha, 1.0 / 3.0, 1e-15);
  const double e = std::exp(1.0);
  EXPECT_NEAR(factor_transform(ApproxFactors(1 - 1 / e, 0)).alpha, (e - 1) * (e - 1) / (e * e - e + 1), 1e-15);
  EXPECT_NEAR(factor_transform(ApproxFactors(0.9, 0)).alpha, 81.0 / 91.0, 1e-15);
  EXPECT_EQ(factor_transform(ApproxFactors(1, 0.3)), ApproxFactors(1, 0.3));
}

TEST(OrderProperties, IrreflexiveAsymmetricTransitive) {
  std::mt19937_64 rng(7);
  const std::vector<ApproxFactors> fs{{1, 0}, {0.9, 0}, {0.75, 1}, {0.5, 2}, {1, 3}};
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 1 + trial % 4;
    auto a = random_vector(rng, n, 6), b = random_vector(rng, n, 6), c = random_vector(rng, n, 6);
    for (const auto& f : fs) {
      EXPECT_FALSE(is_leximin_preferred(a, a, f));
      EXPECT_FALSE(is_leximin_preferred(a, b, f) && is_leximin_preferred(b, a, f));
      if (is_leximin_preferred(a, b, f) && is_leximin_preferred(b, c, f)) {
        EXPECT_TRUE(is_leximin_preferred(a, c, f));
      }
    }
  }
}

TEST(OrderProperties, MonotoneInFactors) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<UtilityVector> c;
    for (int i = 0; i < 6; ++i) c.push_back(random_vector(rng, 3, 20));
    std::uniform_real_distribution<double> ua(0.3, 1.0), ue(0.0, 5.0);
    double a1 = ua(rng), a2 = ua(rng), e1 = ue(rng), e2 = ue(rng);
    if (a1 < a2) std::swap(a1, a2);
    if (e1 > e2) std::swap(e1, e2);
    const auto loose = relation_set(c, ApproxFactors(a1, e1));
    for (const auto& p : relation_set(c, ApproxFactors(a2, e2))) EXPECT_TRUE(loose.count(p));
  }
}

TEST(OrderProperties, ExactOrderIsLexicographic) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    auto a = random_vector(rng, 3, 4), b = random_vector(rng, 3, 4);
    const auto sa = sort_outcomes(a), sb = sort_outcomes(b);
    if (sa == sb) continue;
    EXPECT_EQ(is_leximin_preferred(a, b, ApproxFactors()).has_value(),
              leximin_compare(sa, sb) == std::strong_ordering::greater);
  }
}

TEST(OrderProperties, OptimumSurvivesAndEgalitarianBound) {
  std::mt19937_64 rng(5);
  const std::vector<ApproxFactors> fs{{0.9, 0}, {0.5, 1}, {0.75, 0}, {1, 2}};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<UtilityVector> c;
    for (int i = 0; i < 8; ++i) c.push_back(random_vector(rng, 3, 10));
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i)
      if (leximin_compare(sort_outcomes(c[i]), sort_outcomes(c[best])) == std::strong_ordering::greater) best = i;
    double max_egal = 0;
    for (const auto& u : c) max_egal = std::max(max_egal, egalitarian_value(u));
    for (const auto& f : fs) {
      EXPECT_TRUE(is_approx_leximin_optimal(c[best], c, f));
      for (const auto& u : c)
        if (is_approx_leximin_optimal(u, c, f)) {
          EXPECT_GE(egalitarian_value(u), f.alpha * max_egal - f.epsilon - 1e-9);
        }
    }
  }
}
