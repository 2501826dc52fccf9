#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <random>

#include "leximin/linprog.hpp"

using namespace leximin;
using Rational = boost::multiprecision::cpp_rational;

namespace {

LinearProgram random_lp(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<int> coef(-3, 5), rhs(1, 10), obj(-2, 6);
  LinearProgram lp(n, Direction::maximize);
  for (auto& c : lp.objective) c = obj(rng);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(n);
    for (auto& a : row) a = coef(rng);
    lp.add_constraint(row, Relation::less_equal, rhs(rng));
  }
  // Keeps the region bounded.
  lp.add_constraint(std::vector<double>(n, 1.0), Relation::less_equal, 20);
  return lp;
}

template <class T>
BasicLinearProgram<T> convert(const LinearProgram& lp) {
  BasicLinearProgram<T> out(lp.num_vars(), lp.direction);
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    out.objective[j] = T(static_cast<long long>(lp.objective[j]));
    if (lp.bounds[j].lower) out.bounds[j].lower = T(static_cast<long long>(*lp.bounds[j].lower));
    else out.bounds[j].lower.reset();
    if (lp.bounds[j].upper) out.bounds[j].upper = T(static_cast<long long>(*lp.bounds[j].upper));
  }
  for (const auto& c : lp.constraints) {
    std::vector<T> row;
    for (double a : c.coeffs) row.push_back(T(static_cast<long long>(a)));
    out.add_constraint(row, c.rel, T(static_cast<long long>(c.rhs)));
  }
  return out;
}

}  // namespace

TEST(Simplex, IntroductionMaxMin) {
  // variables x1, x2, z
  LinearProgram lp(3);
  lp.objective = {0, 0, 1};
  lp.add_constraint({-1, 0, 1}, Relation::less_equal, 0);
  lp.add_constraint({0, -1, 1}, Relation::less_equal, 0);
  lp.add_constraint({1, 1, 0}, Relation::less_equal, 1);
  const auto s = solve(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, 0.5, 1e-12);
}

TEST(Simplex, SingleBound) {
  LinearProgram lp(1);
  lp.objective = {1};
  lp.add_constraint({1}, Relation::less_equal, 100);
  EXPECT_NEAR(solve(lp).objective_value, 100, 1e-12);
}

TEST(Simplex, InfeasibleAndUnbounded) {
  LinearProgram lp(1, Direction::minimize);
  lp.add_constraint({1}, Relation::less_equal, -1);
  EXPECT_EQ(solve(lp).status, LpStatus::infeasible);

  LinearProgram un(2);
  un.objective = {1, 1};
  un.add_constraint({1, -1}, Relation::less_equal, 1);
  EXPECT_EQ(solve(un).status, LpStatus::unbounded);
}

TEST(Simplex, BoundsFreeAndEquality) {
  // min x + y, x free, -3 <= y <= 4, x - y = -5 -> x = y - 5, minimize 2y - 5 -> y = -3
  LinearProgram lp(2, Direction::minimize);
  lp.objective = {1, 1};
  lp.bounds[0] = Bound<double>::free();
  lp.bounds[1] = Bound<double>::between(-3, 4);
  lp.add_constraint({1, -1}, Relation::equal, -5);
  const auto s = solve(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.x[0], -8, 1e-12);
  EXPECT_NEAR(s.x[1], -3, 1e-12);

  BasicLinearProgram<double> up(1);
  up.objective = {-1};
  up.bounds[0] = Bound<double>{std::nullopt, 2.0};
  up.add_constraint({1}, Relation::greater_equal, -7);
  EXPECT_NEAR(solve(up).x[0], -7, 1e-12);
}

TEST(Simplex, RedundantEqualityRows) {
  LinearProgram lp(2);
  lp.objective = {1, 2};
  lp.add_constraint({1, 1}, Relation::equal, 3);
  lp.add_constraint({2, 2}, Relation::equal, 6);
  lp.add_constraint({1, 0}, Relation::greater_equal, 1);
  const auto s = solve(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, 5, 1e-12);
}

TEST(Simplex, DimensionMismatch) {
  LinearProgram lp(2);
  EXPECT_THROW(lp.add_constraint({1}, Relation::less_equal, 1), InputError);
  lp.bounds.pop_back();
  EXPECT_THROW(solve(lp), InputError);
}

TEST(Simplex, DegenerateCyclingExample) {
  // Beale's example; cycles under naive Dantzig without anti-cycling.
  LinearProgram lp(4, Direction::minimize);
  lp.objective = {-0.75, 150, -0.02, 6};
  lp.add_constraint({0.25, -60, -0.04, 9}, Relation::less_equal, 0);
  lp.add_constraint({0.5, -90, -0.02, 3}, Relation::less_equal, 0);
  lp.add_constraint({0, 0, 1, 0}, Relation::less_equal, 1);
  const auto s = solve(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, -0.05, 1e-9);
}

TEST(Duality, OneDimensional) {
  LinearProgram lp(1, Direction::minimize);
  lp.objective = {1};
  lp.add_constraint({1}, Relation::greater_equal, 3);
  const auto d = dual_of(lp);
  ASSERT_EQ(d.num_vars(), 1u);
  EXPECT_EQ(d.direction, Direction::maximize);
  EXPECT_EQ(d.objective[0], 3);
  ASSERT_EQ(d.num_constraints(), 1u);
  EXPECT_EQ(d.constraints[0].coeffs[0], 1);
  EXPECT_EQ(d.constraints[0].rhs, 1);
  EXPECT_NEAR(solve(d).objective_value, 3, 1e-12);
}

TEST(Duality, EqualityRowSplits) {
  LinearProgram lp(2, Direction::minimize);
  lp.objective = {1, 1};
  lp.add_constraint({1, 2}, Relation::equal, 4);
  const auto d = dual_of(lp);
  EXPECT_EQ(d.num_vars(), 2u);  // y+ and y- for the equality row
  EXPECT_NEAR(solve(d).objective_value, solve(lp).objective_value, 1e-12);
}

TEST(Duality, StrongDualityRandom) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto lp = random_lp(rng, 1 + trial % 8, 1 + (trial / 8) % 8);
    if (trial % 3 == 0) lp.direction = Direction::minimize;
    if (trial % 5 == 0) lp.bounds[0] = Bound<double>::between(-2, 3);
    const auto p = solve(lp);
    if (!p.optimal()) continue;
    ++checked;
    EXPECT_LE(max_violation(lp, p.x), 1e-8);
    EXPECT_NEAR(p.objective_value, dot(lp.objective, p.x), 1e-9);
    const auto d = solve(dual_of(lp));
    ASSERT_TRUE(d.optimal());
    const double sign = lp.direction == Direction::maximize ? -1.0 : 1.0;
    EXPECT_NEAR(sign * p.objective_value, d.objective_value, 1e-7);
    const auto dd = solve(dual_of(dual_of(lp)));
    ASSERT_TRUE(dd.optimal());
    EXPECT_NEAR(dd.objective_value, -d.objective_value, 1e-7);
  }
  EXPECT_GT(checked, 200);
}

TEST(Simplex, ExactRationalAgreesWithDouble) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const auto lp = random_lp(rng, 2 + trial % 5, 2 + trial % 6);
    const auto p = solve(lp);
    const auto q = solve(convert<Rational>(lp));
    ASSERT_EQ(p.status, q.status);
    if (!p.optimal()) continue;
    EXPECT_EQ(max_violation(convert<Rational>(lp), q.x), Rational(0));
    EXPECT_NEAR(p.objective_value, q.objective_value.convert_to<double>(), 1e-9);
  }
}

TEST(Simplex, Deterministic) {
  std::mt19937_64 rng(1);
  const auto lp = random_lp(rng, 6, 6);
  const auto a = solve(lp), b = solve(lp);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.pivots, b.pivots);
}
