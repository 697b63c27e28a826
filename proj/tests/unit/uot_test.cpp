#include "uoterrant/uot.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uoterrant/errors.hpp"

using namespace uoterrant;

namespace {

CostMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  CostMatrix c(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) = rows[i][j];
  return c;
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

UotConfig config(double eps, double l1, double l2) {
  UotConfig cfg;
  cfg.epsilon = eps;
  cfg.lambda1 = l1;
  cfg.lambda2 = l2;
  return cfg;
}

struct Instance {
  std::vector<double> a, b;
  CostMatrix C;
};

Instance random_instance(std::mt19937_64& rng, std::size_t max_n, double mass_lo, double mass_hi, double c_hi) {
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::uniform_real_distribution<double> mass(mass_lo, mass_hi), cost(0.0, c_hi);
  Instance in;
  in.a.resize(size(rng));
  in.b.resize(size(rng));
  for (auto& x : in.a) x = mass(rng);
  for (auto& x : in.b) x = mass(rng);
  in.C = CostMatrix(in.a.size(), in.b.size());
  for (std::size_t i = 0; i < in.a.size(); ++i)
    for (std::size_t j = 0; j < in.b.size(); ++j) in.C(i, j) = cost(rng);
  return in;
}

}  // namespace

TEST(UotConfig, RejectsNonPositiveParameters) {
  EXPECT_NO_THROW(UotConfig{}.validate());
  EXPECT_THROW(config(0.0, 0.1, 0.1).validate(), Error);
  EXPECT_THROW(config(0.1, -1.0, 0.1).validate(), Error);
  EXPECT_THROW(config(0.1, 0.1, 0.0).validate(), Error);
}

TEST(Objective, HandComputedValues) {
  // Empty plan: only the marginal terms remain, l1 * sum a + l2 * sum b.
  EXPECT_NEAR(objective(Matrix(2, 1), {1.0, 2.0}, {4.0}, to_matrix({{0.0}, {0.0}}), config(0.1, 0.1, 0.2)),
              0.1 * 3.0 + 0.2 * 4.0, 1e-15);
  // Single cell with T = a = b = 1 and cost 2: 2 + eps * (0 - 1).
  Matrix T(1, 1, 1.0);
  EXPECT_NEAR(objective(T, {1.0}, {1.0}, to_matrix({{2.0}}), config(0.5, 0.1, 0.1)), 1.5, 1e-15);
}

TEST(SolveUot, OneByOneMatchesTheClosedFormAndANumericMinimizer) {
  for (double a : {0.1, 0.5, 1.0, 3.0}) {
    for (double b : {0.2, 1.0, 2.5}) {
      for (double c : {0.0, 0.7, 2.0}) {
        for (double eps : {0.05, 0.1, 1.0}) {
          for (double lam : {0.1, 0.5, 2.0}) {
            auto cfg = config(eps, lam, lam * 1.5);
            const double sigma = eps + cfg.lambda1 + cfg.lambda2;
            const double closed =
                std::pow(a, cfg.lambda1 / sigma) * std::pow(b, cfg.lambda2 / sigma) * std::exp(-c / sigma);
            auto f = [&](double logt) {
              Matrix T(1, 1, std::exp(logt));
              return oracles::uot_objective({{T(0, 0)}}, {a}, {b}, {{c}}, eps, cfg.lambda1, cfg.lambda2);
            };
            const double numeric = std::exp(oracles::golden_min(f, -30.0, 5.0));
            ASSERT_NEAR(closed, numeric, 1e-6 * std::max(1.0, closed));
            auto plan = solve_uot({a}, {b}, to_matrix({{c}}), cfg);
            ASSERT_TRUE(plan.converged);
            ASSERT_NEAR(plan.T(0, 0), closed, 1e-6 * std::max(1.0, closed)) << a << " " << b << " " << c;
          }
        }
      }
    }
  }
}

TEST(SolveUot, EmptySideGivesZeroPlan) {
  auto cfg = config(0.1, 0.2, 0.3);
  auto p = solve_uot({}, {1.0, 2.0}, CostMatrix(0, 2), cfg);
  EXPECT_EQ(p.T.rows(), 0u);
  EXPECT_EQ(p.T.cols(), 2u);
  EXPECT_EQ(p.total(), 0.0);
  EXPECT_NEAR(p.objective, 0.3 * 3.0, 1e-15);
  auto q = solve_uot({1.0}, {}, CostMatrix(1, 0), cfg);
  EXPECT_EQ(q.T.rows(), 1u);
  EXPECT_NEAR(q.objective, 0.2, 1e-15);
}

TEST(SolveUot, RejectsBadInput) {
  EXPECT_THROW(solve_uot({1.0}, {1.0}, CostMatrix(2, 1)), ShapeMismatch);
  EXPECT_THROW(solve_uot({0.0}, {1.0}, CostMatrix(1, 1)), NumericalError);
  EXPECT_THROW(solve_uot({1.0}, {1.0}, to_matrix({{NAN}})), NumericalError);
}

TEST(SolveUot, AgreesWithCoordinateDescentOracle) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    auto in = random_instance(rng, 3, 0.1, 1.0, 2.0);
    auto cfg = config(0.1, 0.1, 0.1);
    auto plan = solve_uot(in.a, in.b, in.C, cfg);
    auto ref = oracles::uot_coordinate_descent(in.a, in.b, to_rows(in.C), 0.1, 0.1, 0.1);
    for (std::size_t i = 0; i < in.a.size(); ++i)
      for (std::size_t j = 0; j < in.b.size(); ++j) ASSERT_NEAR(plan.T(i, j), ref[i][j], 1e-6);
    const double oracle_obj = oracles::uot_objective(ref, in.a, in.b, to_rows(in.C), 0.1, 0.1, 0.1);
    ASSERT_NEAR(plan.objective, oracle_obj, 1e-9 * std::max(1.0, std::abs(oracle_obj)));
  }
}

TEST(BruteForce, AgreesWithCoordinateDescentOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = random_instance(rng, 2, 0.1, 1.0, 2.0);
    auto cfg = config(0.1, 0.1, 0.1);
    auto bf = brute_force_uot(in.a, in.b, in.C, cfg);
    auto ref = oracles::uot_coordinate_descent(in.a, in.b, to_rows(in.C), 0.1, 0.1, 0.1);
    const double oracle_obj = oracles::uot_objective(ref, in.a, in.b, to_rows(in.C), 0.1, 0.1, 0.1);
    ASSERT_NEAR(bf.objective, oracle_obj, 1e-6 * std::max(1.0, std::abs(oracle_obj)));
  }
}

TEST(BruteForce, RefusesLargeInstances) {
  EXPECT_THROW(brute_force_uot({1, 1, 1}, {1, 1}, CostMatrix(3, 2), UotConfig{}), TooLarge);
}

TEST(SolveUot, TransposingTheProblemTransposesThePlan) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = random_instance(rng, 4, 0.1, 2.0, 3.0);
    auto p = solve_uot(in.a, in.b, in.C, config(0.1, 0.3, 0.3));
    auto q = solve_uot(in.b, in.a, in.C.transposed(), config(0.1, 0.3, 0.3));
    for (std::size_t i = 0; i < in.a.size(); ++i)
      for (std::size_t j = 0; j < in.b.size(); ++j) ASSERT_NEAR(p.T(i, j), q.T(j, i), 1e-8);
  }
}

TEST(SolveUot, LargeLambdaApproachesBalancedTransport) {
  std::vector<double> a = {0.3, 0.7}, b = {0.6, 0.4};
  auto C = to_matrix({{0.0, 1.0}, {1.0, 0.0}});
  auto cfg = config(0.01, 100.0, 100.0);
  cfg.max_iters = 100000;
  auto plan = solve_uot(a, b, C, cfg);
  auto r = plan.row_sums(), c = plan.col_sums();
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(r[i], a[i], 1e-2);
    EXPECT_NEAR(c[i], b[i], 1e-2);
  }
  auto bot = solve_bot(a, b, C, 0.01);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(plan.T(i, j), bot.T(i, j), 1e-2);
}

TEST(SolveUot, AbsorptionThresholdDoesNotChangeTheAnswer) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto in = random_instance(rng, 5, 0.1, 1.0, 50.0);
    auto lo = config(0.1, 0.1, 0.1);
    lo.absorb_threshold = 1e6;
    auto hi = config(0.1, 0.1, 0.1);
    hi.absorb_threshold = 1e10;
    auto p = solve_uot(in.a, in.b, in.C, lo);
    auto q = solve_uot(in.a, in.b, in.C, hi);
    ASSERT_TRUE(p.converged);
    ASSERT_TRUE(q.converged);
    for (double x : p.T.data()) ASSERT_TRUE(std::isfinite(x));
    for (std::size_t i = 0; i < in.a.size(); ++i)
      for (std::size_t j = 0; j < in.b.size(); ++j)
        ASSERT_NEAR(p.T(i, j), q.T(i, j), 1e-8 * std::max(1.0, q.T(i, j)));
  }
}

TEST(SolveUot, IterationCapReportsNonConvergence) {
  auto cfg = config(0.01, 10.0, 10.0);
  cfg.max_iters = 1;
  auto plan = solve_uot({0.3, 0.7}, {0.6, 0.4}, to_matrix({{0.0, 1.0}, {1.0, 0.0}}), cfg);
  EXPECT_FALSE(plan.converged);
  EXPECT_EQ(plan.iterations, 1);
}

TEST(SolveBot, KnownPlans) {
  auto uniform = solve_bot({0.5, 0.5}, {0.5, 0.5}, to_matrix({{0.0, 0.0}, {0.0, 0.0}}), 0.1);
  for (double x : uniform.T.data()) EXPECT_NEAR(x, 0.25, 1e-10);

  auto single = solve_bot({1.0}, {1.0}, to_matrix({{3.0}}), 0.1);
  EXPECT_NEAR(single.T(0, 0), 1.0, 1e-12);

  auto diag = solve_bot({0.5, 0.5}, {0.5, 0.5}, to_matrix({{0.0, 10.0}, {10.0, 0.0}}), 0.05);
  EXPECT_NEAR(diag.T(0, 0), 0.5, 1e-9);
  EXPECT_NEAR(diag.T(1, 1), 0.5, 1e-9);
  EXPECT_LT(diag.T(0, 1), 1e-9);
}

TEST(SolveBot, MarginalsAreMet) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    auto in = random_instance(rng, 8, 0.1, 1.0, 2.0);
    double sa = 0, sb = 0;
    for (double x : in.a) sa += x;
    for (double x : in.b) sb += x;
    for (auto& x : in.b) x *= sa / sb;
    auto plan = solve_bot(in.a, in.b, in.C, 0.1);
    ASSERT_TRUE(plan.converged);
    auto r = plan.row_sums(), c = plan.col_sums();
    for (std::size_t i = 0; i < r.size(); ++i) ASSERT_NEAR(r[i], in.a[i], 1e-6);
    for (std::size_t j = 0; j < c.size(); ++j) ASSERT_NEAR(c[j], in.b[j], 1e-6);
  }
}

TEST(SolveBot, UnequalTotalsThrow) {
  EXPECT_THROW(solve_bot({1.0}, {2.0}, CostMatrix(1, 1), 0.1), MassMismatch);
}
