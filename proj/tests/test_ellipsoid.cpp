#include <gtest/gtest.h>

#include <random>

#include "leximin/ellipsoid.hpp"
#include "leximin/random.hpp"
#include "oracles.hpp"

using namespace leximin;

namespace {

// max b.y  s.t.  rows.y <= rhs, y >= 0, solved by simplex.
double simplex_reference(const std::vector<double>& b, const std::vector<std::vector<double>>& rows,
                         const std::vector<double>& rhs) {
  LinearProgram lp(b.size());
  lp.objective = b;
  for (std::size_t i = 0; i < rows.size(); ++i) lp.add_constraint(rows[i], Relation::less_equal, rhs[i]);
  const auto s = solve(lp);
  EXPECT_TRUE(s.optimal());
  return s.objective_value;
}

struct DenseLp {
  std::vector<double> b;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  double radius;
};

// Bounded packing-type dual: positive rows guarantee every coordinate is bounded.
DenseLp random_dense(std::mt19937_64& rng, std::size_t d, std::size_t m) {
  std::uniform_int_distribution<int> a(0, 4), c(2, 9), obj(1, 5);
  DenseLp lp;
  for (std::size_t j = 0; j < d; ++j) lp.b.push_back(obj(rng));
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> r(d);
    for (auto& e : r) e = a(rng);
    lp.rows.push_back(r);
    lp.rhs.push_back(c(rng));
  }
  lp.rows.emplace_back(d, 1.0);
  lp.rhs.push_back(c(rng));
  lp.radius = 1.01 * std::sqrt(static_cast<double>(d)) * lp.rhs.back();
  return lp;
}

// min c.x s.t. A x >= b, x >= 0 with its columns exposed one by one.
ColumnPrimal covering_primal(const std::vector<std::vector<double>>& cols, const std::vector<double>& cost,
                             const std::vector<double>& demand) {
  ColumnPrimal p;
  p.base = LinearProgram(0, Direction::minimize);
  for (double d : demand) p.base.add_constraint({}, Relation::greater_equal, d);
  p.column = [cols, cost](std::size_t id) { return PrimalColumn{cost[id], cols[id]}; };
  return p;
}

}  // namespace

TEST(Ellipsoid, ExactOracleBox) {
  const std::vector<double> b{3, 2};
  auto oracle = relaxed_row_oracle({{1, 0}, {0, 1}}, {1, 1}, 0.0);
  const auto r = ellipsoid_maximize(b, oracle, {{}, 2.0});
  EXPECT_NEAR(r.best_value, 5.0, 1e-4);
  EXPECT_LE(r.best_value, 5.0 + 1e-12);
}

TEST(Ellipsoid, RelaxedOracleOvershoots) {
  const std::vector<double> b{3, 2};
  auto oracle = relaxed_row_oracle({{1, 0}, {0, 1}}, {1, 1}, 0.1);
  const auto r = ellipsoid_maximize(b, oracle, {{}, 3.0});
  EXPECT_GE(r.best_value, 5.0 - 1e-6);
  EXPECT_LE(r.best_point[0], 1.1 + 1e-12);
  EXPECT_LE(r.best_point[1], 1.1 + 1e-12);
}

TEST(Ellipsoid, EmptyRegion) {
  auto oracle = relaxed_row_oracle({{1, 1}}, {-1}, 0.0);
  EXPECT_THROW(ellipsoid_maximize({1, 1}, oracle, {{}, 5.0, 200}), NoFeasiblePoint);
}

TEST(Ellipsoid, OneDimensional) {
  auto oracle = relaxed_row_oracle({{2}}, {3}, 0.0);
  const auto r = ellipsoid_maximize({1}, oracle, {{}, 4.0});
  EXPECT_NEAR(r.best_value, 1.5, 1e-5);
}

TEST(Ellipsoid, CutsKeepFeasiblePointsAndVolumeShrinks) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lp = random_dense(rng, 2 + trial % 3, 3);
    std::vector<oracle::HalfSpace> hs;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) hs.push_back({lp.rows[i], lp.rhs[i]});
    for (std::size_t j = 0; j < lp.b.size(); ++j) {
      std::vector<double> e(lp.b.size(), 0.0);
      e[j] = -1;
      hs.push_back({e, 0});
    }
    const auto verts = oracle::vertices(hs, lp.b.size());
    EllipsoidConfig cfg{{}, lp.radius};
    cfg.record_volume = true;
    std::vector<std::vector<double>> centers;
    auto base = relaxed_row_oracle(lp.rows, lp.rhs, 0.0);
    auto logging = [&](const std::vector<double>& y) {
      centers.push_back(y);
      return base(y);
    };
    const auto r = ellipsoid_maximize(lp.b, logging, cfg);
    for (const auto& cut : r.cuts.feasibility) {
      EXPECT_GT(dot(cut.row, centers[cut.iteration]), cut.rhs);
      for (const auto& v : verts) EXPECT_LE(dot(cut.row, v), cut.rhs + 1e-9);
    }
    for (std::size_t k = 1; k < r.log_volume.size(); ++k) EXPECT_LT(r.log_volume[k], r.log_volume[k - 1]);
  }
}

TEST(Ellipsoid, MatchesSimplexOnRandomDenseLps) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const auto lp = random_dense(rng, 1 + trial % 5, 1 + trial % 6);
    const double ref = simplex_reference(lp.b, lp.rows, lp.rhs);
    const auto r = ellipsoid_maximize(lp.b, relaxed_row_oracle(lp.rows, lp.rhs, 0.0), {{}, lp.radius});
    EXPECT_NEAR(r.best_value, ref, 1e-4);
  }
}

TEST(Ellipsoid, ThinOptimalFaceDoesNotCollapse) {
  // The unfactored shape update lost definiteness here after a few hundred cuts.
  const std::vector<std::vector<double>> rows{{0, 0, 0, 1, 0}, {2, 1, 4, 2, 1}, {1, 1, 1, 1, 1}};
  const std::vector<double> rhs{7, 8, 4}, b{4, 1, 2, 2, 4};
  const double radius = 1.01 * std::sqrt(5.0) * 4.0;
  const auto r = ellipsoid_maximize(b, relaxed_row_oracle(rows, rhs, 0.0), {{}, radius});
  EXPECT_EQ(r.iterations, default_iterations(5));
  EXPECT_NEAR(r.best_value, 16.0, 1e-4);
}

TEST(ReducedPrimal, CoveringToy) {
  // Primal: min x0 + x1 + x2 s.t. x0 + x2 >= 1, x1 + x2 >= 1. Columns indexed 0..2.
  const std::vector<std::vector<double>> cols{{1, 0}, {0, 1}, {1, 1}};
  const std::vector<double> cost{1, 1, 1.5}, demand{1, 1};
  const auto primal = covering_primal(cols, cost, demand);
  // Dual rows are the columns.
  const auto r = ellipsoid_maximize(demand, relaxed_row_oracle(cols, cost, 0.0), {{}, 2.0});
  const auto rp = recover_reduced_primal(primal, r.cuts);
  const auto s = solve(rp.lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective_value, 1.5, 1e-9);
  EXPECT_LE(rp.column_ids.size(), r.cuts.feasibility.size());

  const auto sparse = extend_with_zeros(s, rp);
  EXPECT_NEAR(sparse.objective, s.objective_value, 1e-12);
  double obj = 0;
  std::vector<double> cover(2, 0.0);
  for (const auto& [id, v] : sparse.columns) {
    obj += cost[id] * v;
    for (int i = 0; i < 2; ++i) cover[i] += cols[id][i] * v;
  }
  EXPECT_NEAR(obj, s.objective_value, 1e-12);
  for (double c : cover) EXPECT_GE(c, 1 - 1e-9);
  EXPECT_LE(sparse.columns.size(), 2u);
}

TEST(ReducedPrimal, DuplicatesCollapse) {
  const std::vector<std::vector<double>> cols{{1, 0}, {0, 1}};
  const auto primal = covering_primal(cols, {1, 1}, {1, 1});
  CutLog log;
  for (std::size_t id : {0, 1, 0, 1, 1}) log.feasibility.push_back({0, cols[id], 1.0, id});
  const auto rp = recover_reduced_primal(primal, log, {1, 0});
  EXPECT_EQ(rp.column_ids, (std::vector<std::size_t>{0, 1}));
  EXPECT_NEAR(solve(rp.lp).objective_value, 2, 1e-12);
}

TEST(ReducedPrimal, AllZeroSolutionIsEmpty) {
  const auto primal = covering_primal({{1}}, {1}, {0});
  CutLog log;
  log.feasibility.push_back({0, {1}, 1, 0});
  const auto rp = recover_reduced_primal(primal, log);
  const auto s = solve(rp.lp);
  EXPECT_TRUE(extend_with_zeros(s, rp).columns.empty());
}

TEST(ReducedPrimal, ApproximationChainOnRandomCovering) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rowsn = 1 + trial % 4, ncols = 3 + trial % 5;
    std::uniform_int_distribution<int> a(0, 3), c(1, 6);
    std::vector<std::vector<double>> cols(ncols, std::vector<double>(rowsn));
    std::vector<double> cost(ncols), demand(rowsn);
    for (auto& col : cols)
      for (auto& e : col) e = a(rng);
    for (std::size_t i = 0; i < rowsn; ++i) cols[i % ncols][i] = std::max(1.0, cols[i % ncols][i]);
    for (auto& e : cost) e = c(rng);
    for (auto& e : demand) e = c(rng);
    const auto primal = covering_primal(cols, cost, demand);
    LinearProgram full(ncols, Direction::minimize);
    full.objective = cost;
    for (std::size_t i = 0; i < rowsn; ++i) {
      std::vector<double> row(ncols);
      for (std::size_t j = 0; j < ncols; ++j) row[j] = cols[j][i];
      full.add_constraint(row, Relation::greater_equal, demand[i]);
    }
    const double opt = solve(full).objective_value;
    double radius = 0;
    for (std::size_t i = 0; i < rowsn; ++i) {
      double bound = 1e9;
      for (std::size_t j = 0; j < ncols; ++j)
        if (cols[j][i] > 0) bound = std::min(bound, 1.1 * cost[j] / cols[j][i]);
      radius += bound * bound;
    }
    radius = 1.01 * std::sqrt(radius);
    for (double beta : {0.0, 0.1}) {
      const auto r = ellipsoid_maximize(demand, relaxed_row_oracle(cols, cost, beta), {{}, radius});
      const auto s = solve(recover_reduced_primal(primal, r.cuts).lp);
      ASSERT_TRUE(s.optimal());
      EXPECT_GE(s.objective_value, opt - 1e-7);
      EXPECT_LE(s.objective_value, (1 + beta) * opt + 1e-6);
      if (beta == 0.0) {
        EXPECT_NEAR(s.objective_value, opt, 1e-6);
      }
    }
  }
}

TEST(ReducedPrimal, HalfRandomizedOracleStaysFeasible) {
  std::mt19937_64 rng(4);
  const std::vector<std::vector<double>> cols{{1, 0}, {0, 1}, {1, 1}, {2, 1}};
  const std::vector<double> cost{1, 1, 1.5, 2.5}, demand{2, 1};
  const auto primal = covering_primal(cols, cost, demand);
  auto exact = relaxed_row_oracle(cols, cost, 0.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto noise = std::make_shared<std::mt19937_64>(derive_seed(trial, "half-randomized"));
    SeparationOracle flaky = [&, noise](const std::vector<double>& y) {
      auto r = exact(y);
      // Violations on y >= 0 are always reported; column violations are missed with probability 0.3.
      if (r.violated && r.column && std::uniform_real_distribution<double>(0, 1)(*noise) < 0.3)
        return SeparationResponse::approx_feasible();
      return r;
    };
    const auto r = ellipsoid_maximize(demand, flaky, {{}, 4.0, 300});
    const auto rp = recover_reduced_primal(primal, r.cuts);
    const auto s = solve(rp.lp);
    if (!s.optimal()) continue;
    const auto sp = extend_with_zeros(s, rp);
    std::vector<double> cover(2, 0.0);
    for (const auto& [id, v] : sp.columns) {
      EXPECT_GE(v, -1e-12);
      for (int i = 0; i < 2; ++i) cover[i] += cols[id][i] * v;
    }
    for (int i = 0; i < 2; ++i) EXPECT_GE(cover[i], demand[i] - 1e-9);
  }
}

TEST(RepeatOracle, Counts) {
  EXPECT_EQ(repeat_count(1.0, 5, 100), 1u);
  EXPECT_EQ(repeat_count(0.5, 2, 4), 4u);
  EXPECT_EQ(repeat_count(0.9, 10, 10), 3u);
  EXPECT_THROW(repeat_count(0.0, 1, 1), InputError);
}

TEST(RepeatOracle, BoostsDetection) {
  int calls = 0;
  SeparationOracle sometimes = [&](const std::vector<double>&) {
    ++calls;
    return calls % 4 == 0 ? SeparationResponse::violated_by({1.0}, 0.0) : SeparationResponse::approx_feasible();
  };
  auto boosted = repeat_oracle(sometimes, 0.5, 2, 4);
  EXPECT_TRUE(boosted({1.0}).violated);
  EXPECT_EQ(calls, 4);
}
