#include "fuzzyburst/fanny.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fuzzyburst;

namespace {

DistanceMatrix to_matrix(const oracle::Dense& d) {
  std::vector<double> full;
  for (const auto& row : d)
    full.insert(full.end(), row.begin(), row.end());
  return DistanceMatrix::from_full(full, d.size());
}

oracle::Dense to_dense(const MembershipMatrix& m) {
  oracle::Dense out(m.n(), std::vector<double>(m.k()));
  for (std::size_t i = 0; i < m.n(); ++i)
    for (std::size_t v = 0; v < m.k(); ++v)
      out[i][v] = m(i, v);
  return out;
}

oracle::Dense line_distances(const std::vector<double>& xs) {
  std::vector<std::vector<double>> pts;
  for (double x : xs)
    pts.push_back({x});
  return oracle::distances(pts);
}

void expect_row_stochastic(const MembershipMatrix& m) {
  for (std::size_t i = 0; i < m.n(); ++i) {
    double s = 0.0;
    for (std::size_t v = 0; v < m.k(); ++v) {
      EXPECT_GE(m(i, v), 0.0);
      s += m(i, v);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

} // namespace

TEST(FannyObjective, ZeroDistancesGiveZero) {
  std::mt19937_64 rng(1);
  const auto m = MembershipMatrix::from_rows(oracle::random_memberships(rng, 6, 3));
  EXPECT_EQ(fanny_objective(m, DistanceMatrix(6), 1.3), 0.0);
}

TEST(FannyObjective, HardSingletonsHaveNoWithinPairs) {
  DistanceMatrix d(2);
  d.set(0, 1, 4.0);
  const auto m = MembershipMatrix::from_rows({{1, 0}, {0, 1}});
  EXPECT_EQ(fanny_objective(m, d, 1.3), 0.0);
}

TEST(FannyObjective, MatchesTripleLoop) {
  const oracle::Dense mrows = {{.8, .2}, {.6, .4}, {.1, .9}};
  const auto dd = line_distances({0, 1, 3});
  const double expected = oracle::objective(mrows, dd, 2.0);
  EXPECT_NEAR(fanny_objective(MembershipMatrix::from_rows(mrows), to_matrix(dd), 2.0),
              expected, 1e-12);
}

TEST(FannyObjective, RandomMatchesTripleLoop) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto dd = oracle::distances(oracle::random_points(rng, 9, 3));
    const auto mrows = oracle::random_memberships(rng, 9, 3);
    EXPECT_NEAR(fanny_objective(MembershipMatrix::from_rows(mrows), to_matrix(dd), 1.7),
                oracle::objective(mrows, dd, 1.7), 1e-12);
  }
}

TEST(FannyObjective, DimensionMismatchThrows) {
  EXPECT_THROW(fanny_objective(MembershipMatrix::uniform(3, 2), DistanceMatrix(4), 1.3),
               Error);
  EXPECT_THROW(fanny_objective(MembershipMatrix::uniform(3, 2), DistanceMatrix(3), 1.0),
               Error);
}

TEST(FannyIterate, HardPairClustersAreAFixedPoint) {
  // Objects 0,1 coincide, 2,3 coincide, the two pairs 10 apart.
  const auto dd = line_distances({0, 0, 10, 10});
  const auto d = to_matrix(dd);
  const oracle::Dense hard = {{1, 0}, {1, 0}, {0, 1}, {0, 1}};
  const auto next = fanny_iterate(MembershipMatrix::from_rows(hard), d, 1.3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t v = 0; v < 2; ++v)
      EXPECT_NEAR(next(i, v), hard[i][v], 1e-12);

  // Stationarity: no feasible single-row perturbation lowers the objective.
  const double f0 = oracle::objective(hard, dd, 1.3);
  for (std::size_t i = 0; i < 4; ++i)
    for (int step = 1; step <= 100; ++step) {
      auto p = hard;
      const double eps = step / 100.0;
      const std::size_t from = hard[i][0] > 0 ? 0 : 1;
      p[i][from] -= eps;
      p[i][1 - from] += eps;
      EXPECT_GE(oracle::objective(p, dd, 1.3), f0 - 1e-12);
    }
}

TEST(FannyIterate, UniformStaysUniformOnEquidistantData) {
  DistanceMatrix d(5);
  for (std::size_t i = 1; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j)
      d.set(i, j, 2.0);
  const auto next = fanny_iterate(MembershipMatrix::uniform(5, 3), d, 1.3);
  for (double v : next.values())
    EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(FannyIterate, RandomStartStrictlyDecreases) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto dd = oracle::distances(oracle::random_points(rng, 5, 2));
    const auto mrows = oracle::random_memberships(rng, 5, 2);
    const auto d = to_matrix(dd);
    const auto next = fanny_iterate(MembershipMatrix::from_rows(mrows), d, 1.3);
    EXPECT_LT(oracle::objective(to_dense(next), dd, 1.3),
              oracle::objective(mrows, dd, 1.3));
    expect_row_stochastic(next);
  }
}

TEST(FannySolve, TightSeparatedGroupsMatchGridOptimum) {
  // Two tight groups far apart.
  const auto dd = line_distances({0.0, 0.1, 20.0, 20.15});
  FannyConfig cfg;
  cfg.k = 2;
  cfg.r = 1.3;
  const auto res = fanny_solve(to_matrix(dd), cfg);
  const int a = res.hard_labels[0];
  EXPECT_EQ(res.hard_labels[1], a);
  EXPECT_EQ(res.hard_labels[2], 3 - a);
  EXPECT_EQ(res.hard_labels[3], 3 - a);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_GT(res.memberships(i, static_cast<std::size_t>(res.hard_labels[i] - 1)),
              0.95);
  oracle::SimplexGrid2 grid(dd, 1.3, 100);
  EXPECT_LE(res.objective(), grid.minimum() + 1e-9);
}

TEST(FannySolve, EquidistantDataIsFullyFuzzy) {
  DistanceMatrix d(8);
  for (std::size_t i = 1; i < 8; ++i)
    for (std::size_t j = 0; j < i; ++j)
      d.set(i, j, 1.0);
  FannyConfig cfg;
  cfg.k = 2;
  cfg.r = 2.0;
  const auto res = fanny_solve(d, cfg);
  EXPECT_NEAR(res.n_dpc, 0.0, 1e-6);
}

TEST(FannySolve, EquidistantDataSplitsBelowUniformAtSmallFuzzifier) {
  // With r = 1.3 the uniform matrix is stationary but not minimal: a partly
  // crisp split of the 8 objects scores lower.
  DistanceMatrix d(8);
  for (std::size_t i = 1; i < 8; ++i)
    for (std::size_t j = 0; j < i; ++j)
      d.set(i, j, 1.0);
  FannyConfig cfg;
  cfg.k = 2;
  const auto res = fanny_solve(d, cfg);
  EXPECT_LT(res.objective(),
            fanny_objective(MembershipMatrix::uniform(8, 2), d, 1.3) - 1e-3);
  EXPECT_GT(res.n_dpc, 0.1);
}

TEST(FannySolve, RejectsBadInputs) {
  DistanceMatrix d(3);
  d.set(1, 0, 1.0);
  d.set(2, 0, 2.0);
  d.set(2, 1, 1.0);
  FannyConfig cfg;
  cfg.k = 3;
  EXPECT_THROW(fanny_solve(d, cfg), Error);
  cfg.k = 2;
  cfg.r = 1.0;
  EXPECT_THROW(fanny_solve(d, cfg), Error);
  cfg.r = 1.3;
  DistanceMatrix inf(3);
  inf.set(1, 0, std::numeric_limits<double>::infinity());
  EXPECT_THROW(fanny_solve(inf, cfg), Error);
}

TEST(FannySolve, DeterministicGivenSeed) {
  std::mt19937_64 rng(4);
  const auto d = to_matrix(oracle::distances(oracle::random_points(rng, 30, 3)));
  FannyConfig cfg;
  cfg.k = 3;
  cfg.seed = 99;
  const auto a = fanny_solve(d, cfg);
  const auto b = fanny_solve(d, cfg);
  EXPECT_EQ(a.memberships.values(), b.memberships.values());
  EXPECT_EQ(a.objective_trace, b.objective_trace);
}

TEST(FannySolve, TraceMonotoneAndRowsStochastic) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto d = to_matrix(oracle::distances(oracle::random_points(rng, 25, 4)));
    FannyConfig cfg;
    cfg.k = 2 + t % 3;
    cfg.seed = rng();
    const auto res = fanny_solve(d, cfg);
    expect_row_stochastic(res.memberships);
    for (std::size_t s = 1; s < res.objective_trace.size(); ++s)
      EXPECT_LE(res.objective_trace[s], res.objective_trace[s - 1] + 1e-12);
    EXPECT_EQ(res.n_iter + 1, static_cast<int>(res.objective_trace.size()));
  }
}

TEST(FannySolve, LabelPermutationEquivariance) {
  std::mt19937_64 rng(6);
  const auto d = to_matrix(oracle::distances(oracle::random_points(rng, 20, 3)));
  const auto init = oracle::random_memberships(rng, 20, 3);
  const std::vector<std::size_t> perm = {2, 0, 1};
  oracle::Dense permuted = init;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t v = 0; v < 3; ++v)
      permuted[i][v] = init[i][perm[v]];
  FannyConfig cfg;
  cfg.k = 3;
  const auto a = fanny_solve(d, cfg, MembershipMatrix::from_rows(init));
  const auto b = fanny_solve(d, cfg, MembershipMatrix::from_rows(permuted));
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t v = 0; v < 3; ++v)
      EXPECT_NEAR(b.memberships(i, v), a.memberships(i, perm[v]), 1e-9);
}

TEST(FannySolve, DistanceScalingLeavesMembershipsUnchanged) {
  std::mt19937_64 rng(7);
  const auto dd = oracle::distances(oracle::random_points(rng, 20, 3));
  auto scaled = dd;
  for (auto& row : scaled)
    for (auto& x : row)
      x *= 7.5;
  FannyConfig cfg;
  cfg.k = 3;
  const auto a = fanny_solve(to_matrix(dd), cfg);
  const auto b = fanny_solve(to_matrix(scaled), cfg);
  EXPECT_NEAR(b.objective(), 7.5 * a.objective(), 1e-9 * b.objective());
  for (std::size_t i = 0; i < a.memberships.values().size(); ++i)
    EXPECT_NEAR(a.memberships.values()[i], b.memberships.values()[i], 1e-8);
}

TEST(FannySolve, NeverWorseThanCoarseGridOnTinyProblems) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 8; ++t) {
    const std::size_t n = 3 + t % 3;
    const auto dd = oracle::distances(oracle::random_points(rng, n, 2));
    FannyConfig cfg;
    cfg.k = 2;
    cfg.seed = rng();
    const auto res = fanny_solve(to_matrix(dd), cfg);
    oracle::SimplexGrid2 grid(dd, 1.3, 50);
    EXPECT_LE(res.objective(), grid.minimum() + 1e-6) << "instance " << t;
  }
}

TEST(FannySolve, SingleStartMatchesExplicitInitialization) {
  std::mt19937_64 rng(12);
  const auto dd = oracle::distances(oracle::random_points(rng, 15, 3));
  const DistanceMatrix d = to_matrix(dd);
  FannyConfig cfg;
  cfg.k = 3;
  cfg.seed = 77;
  cfg.starts = 1;
  const auto a = fanny_solve(d, cfg);
  const auto b = fanny_solve(
      d, cfg, initial_memberships(15, 3, InitMode::SeededRandom, 77));
  EXPECT_EQ(a.memberships.values(), b.memberships.values());
  EXPECT_EQ(a.objective_trace, b.objective_trace);
}

TEST(FannySolve, MoreStartsNeverWorse) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    const auto dd = oracle::distances(oracle::random_points(rng, 5, 2));
    FannyConfig one;
    one.k = 2;
    one.seed = rng();
    one.starts = 1;
    FannyConfig many = one;
    many.starts = 8;
    EXPECT_LE(fanny_solve(to_matrix(dd), many).objective(),
              fanny_solve(to_matrix(dd), one).objective())
        << "instance " << t;
  }
}

TEST(FannySolve, StartSeedsAreDistinct) {
  EXPECT_EQ(start_seed(5, 0), 5u);
  EXPECT_NE(start_seed(5, 1), start_seed(5, 2));
  EXPECT_NE(start_seed(5, 1), start_seed(6, 1));
  FannyConfig cfg;
  cfg.starts = 0;
  EXPECT_THROW(cfg.validate(10), Error);
}

TEST(ClosestHard, ArgmaxWithLowestIndexTies) {
  EXPECT_EQ(closest_hard_clustering(MembershipMatrix::from_rows({{0.1, 0.2, 0.7}})),
            std::vector<int>{3});
  EXPECT_EQ(closest_hard_clustering(MembershipMatrix::from_rows({{0.5, 0.5}})),
            std::vector<int>{1});
  EXPECT_EQ(closest_hard_clustering(
                MembershipMatrix::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}})),
            (std::vector<int>{2, 1, 3}));
}

TEST(PartitionCoefficient, Extremes) {
  EXPECT_NEAR(normalized_dunn_partition_coefficient(
                  MembershipMatrix::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}, {1, 0, 0}})),
              1.0, 1e-12);
  EXPECT_NEAR(normalized_dunn_partition_coefficient(MembershipMatrix::uniform(7, 3)),
              0.0, 1e-12);
  // (2/2)(0.5625 + 0.0625 + 0.25 + 0.25) - 1 = 0.125, over K-1 = 1.
  EXPECT_NEAR(normalized_dunn_partition_coefficient(
                  MembershipMatrix::from_rows({{0.75, 0.25}, {0.5, 0.5}})),
              0.125, 1e-12);
  EXPECT_THROW(normalized_dunn_partition_coefficient(
                   MembershipMatrix::from_rows({{1.0}, {1.0}})),
               Error);
}

TEST(PartitionCoefficient, BoundedOnRandomMatrices) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + t % 4;
    const double v = normalized_dunn_partition_coefficient(
        MembershipMatrix::from_rows(oracle::random_memberships(rng, 15, k)));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Initialization, StripesAndSeeded) {
  const auto s = initial_memberships(5, 3, InitMode::DeterministicStripes, 0);
  EXPECT_DOUBLE_EQ(s(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(s(0, 1), 0.05);
  EXPECT_DOUBLE_EQ(s(4, 1), 0.9);
  const auto a = initial_memberships(10, 4, InitMode::SeededRandom, 42);
  const auto b = initial_memberships(10, 4, InitMode::SeededRandom, 42);
  const auto c = initial_memberships(10, 4, InitMode::SeededRandom, 43);
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), c.values());
  expect_row_stochastic(a);
}

TEST(MembershipMatrix, ValidatesRows) {
  EXPECT_THROW(MembershipMatrix::from_rows({{0.5, 0.6}}), Error);
  EXPECT_THROW(MembershipMatrix::from_rows({{1.2, -0.2}}), Error);
  EXPECT_THROW(MembershipMatrix::from_rows({{1.0}, {0.5, 0.5}}), Error);
}
