#include <gtest/gtest.h>

#include <random>

#include "qmb/lp.hpp"
#include "support.hpp"

using namespace qmb;

namespace {

struct RandomLp {
  std::vector<std::vector<double>> a;  // dense rows
  std::vector<double> b, c;
};

// Feasible by construction (b = A x0 with x0 >= 0); the last row fixes
// sum x, which keeps the feasible set bounded.
RandomLp random_lp(std::mt19937_64& rng, int m, int n, bool degenerate) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  RandomLp lp;
  lp.a.assign(m, std::vector<double>(n, 0.0));
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    x0[j] = (degenerate && rng() % 2) ? 0.0 : pos(rng);
  }
  for (int i = 0; i < m - 1; ++i) {
    for (int j = 0; j < n; ++j) {
      if (rng() % 3) lp.a[i][j] = std::round(coef(rng) * 4.0) / 2.0;
    }
  }
  for (int j = 0; j < n; ++j) lp.a[m - 1][j] = 1.0;
  lp.b.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) lp.b[i] += lp.a[i][j] * x0[j];
  }
  lp.c.resize(n);
  for (double& v : lp.c) v = std::round(coef(rng) * 8.0) / 4.0;
  return lp;
}

LpModel to_model(const RandomLp& lp) {
  LpModel m;
  for (double b : lp.b) m.add_row(RowSense::equal, b);
  for (std::size_t j = 0; j < lp.c.size(); ++j) {
    std::vector<int> rows;
    std::vector<double> vals;
    for (std::size_t i = 0; i < lp.a.size(); ++i) {
      if (lp.a[i][j] != 0.0) {
        rows.push_back(static_cast<int>(i));
        vals.push_back(lp.a[i][j]);
      }
    }
    m.add_column(lp.c[j], 0.0, kInf, rows, vals);
  }
  return m;
}

void expect_certificate(const LpModel& m, const LpSolution& s) {
  // Primal feasibility, dual feasibility and a zero duality gap.
  double dual_obj = 0.0;
  for (int i = 0; i < m.num_rows(); ++i) dual_obj += m.rhs[i] * s.duals[i];
  for (int j = 0; j < m.num_cols(); ++j) {
    EXPECT_GE(s.x[j], -1e-9);
    double rc = m.cost[j];
    for (std::size_t k = m.col_start[j]; k < m.col_start[j + 1]; ++k) {
      rc -= s.duals[m.row_index[k]] * m.value[k];
    }
    EXPECT_GE(rc, -1e-8);
    EXPECT_LE(std::abs(rc * s.x[j]), 1e-8);
  }
  EXPECT_NEAR(dual_obj, s.objective, 1e-8);
}

}  // namespace

TEST(Lp, RandomProgramsMatchTableau) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 6);
    const int n = m + 1 + static_cast<int>(rng() % 10);
    const RandomLp lp = random_lp(rng, m, n, trial % 3 == 0);
    const double want = qmbt::tableau_lp(lp.a, lp.b, lp.c);
    ASSERT_TRUE(std::isfinite(want));
    const LpModel model = to_model(lp);
    for (bool big_m : {false, true}) {
      SimplexOptions opt;
      opt.big_m = big_m;
      const LpSolution s = solve_lp(model, opt);
      ASSERT_EQ(s.status, LpStatus::optimal) << trial;
      EXPECT_NEAR(s.objective, want, 1e-8) << trial;
      expect_certificate(model, s);
    }
  }
}

TEST(Lp, InequalityRowsAndUpperBounds) {
  // max x + y s.t. x + 2y <= 4, 3x + y <= 6, y <= 1.5 (bound)
  LpModel m;
  m.add_row(RowSense::less_equal, 4.0);
  m.add_row(RowSense::less_equal, 6.0);
  const int r[2] = {0, 1};
  const double cx[2] = {1.0, 3.0}, cy[2] = {2.0, 1.0};
  m.add_column(-1.0, 0.0, kInf, r, cx);
  m.add_column(-1.0, 0.0, 1.5, r, cy);
  const LpSolution s = solve_lp(m);
  ASSERT_EQ(s.status, LpStatus::optimal);
  // Vertex x = 1.6, y = 1.2.
  EXPECT_NEAR(s.objective, -2.8, 1e-12);
  EXPECT_NEAR(s.x[0], 1.6, 1e-12);
  EXPECT_NEAR(s.x[1], 1.2, 1e-12);
}

TEST(Lp, GreaterEqualRows) {
  // min 2x + 3y s.t. x + y >= 2, x - y >= -1, x <= 1.5
  LpModel m;
  m.add_row(RowSense::greater_equal, 2.0);
  m.add_row(RowSense::greater_equal, -1.0);
  const int r[2] = {0, 1};
  const double cx[2] = {1.0, 1.0}, cy[2] = {1.0, -1.0};
  m.add_column(2.0, 0.0, 1.5, r, cx);
  m.add_column(3.0, 0.0, kInf, r, cy);
  const LpSolution s = solve_lp(m);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective, 2 * 1.5 + 3 * 0.5, 1e-12);
}

TEST(Lp, ReportsInfeasible) {
  LpModel m;
  m.add_row(RowSense::equal, 1.0);
  m.add_row(RowSense::equal, 3.0);
  const int r[2] = {0, 1};
  const double v[2] = {1.0, 1.0};
  m.add_column(1.0, 0.0, 2.0, r, v);
  for (bool big_m : {false, true}) {
    SimplexOptions opt;
    opt.big_m = big_m;
    EXPECT_EQ(solve_lp(m, opt).status, LpStatus::infeasible);
  }
}

TEST(Lp, ReportsUnbounded) {
  LpModel m;
  m.add_row(RowSense::equal, 1.0);
  const int r[1] = {0};
  const double p[1] = {1.0}, n[1] = {-1.0};
  m.add_column(0.0, 0.0, kInf, r, p);
  m.add_column(-1.0, 0.0, kInf, r, n);
  m.add_column(-1.0, 0.0, kInf, r, p);
  EXPECT_EQ(solve_lp(m).status, LpStatus::unbounded);
}

TEST(Lp, DegenerateCyclingExample) {
  // Beale's example, which cycles under the textbook rule.
  LpModel m;
  m.add_row(RowSense::less_equal, 0.0);
  m.add_row(RowSense::less_equal, 0.0);
  m.add_row(RowSense::less_equal, 1.0);
  const int r3[3] = {0, 1, 2};
  const int r2[2] = {0, 1};
  const double c1[2] = {0.25, 0.5};
  const double c2[2] = {-60.0, -90.0};
  const double c3[3] = {-1.0 / 25.0, -1.0 / 50.0, 1.0};
  const double c4[2] = {9.0, 3.0};
  m.add_column(-0.75, 0.0, kInf, r2, c1);
  m.add_column(150.0, 0.0, kInf, r2, c2);
  m.add_column(-1.0 / 50.0, 0.0, kInf, r3, c3);
  m.add_column(6.0, 0.0, kInf, r2, c4);
  SimplexOptions opt;
  opt.bland_after = 1;
  const LpSolution s = solve_lp(m, opt);
  ASSERT_EQ(s.status, LpStatus::optimal);
  EXPECT_NEAR(s.objective, -0.05, 1e-12);
}

TEST(Lp, Deterministic) {
  std::mt19937_64 rng(7);
  const RandomLp lp = random_lp(rng, 6, 14, true);
  const LpModel m = to_model(lp);
  const LpSolution a = solve_lp(m), b = solve_lp(m);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Lp, IterationLimit) {
  std::mt19937_64 rng(8);
  const RandomLp lp = random_lp(rng, 6, 14, false);
  SimplexOptions opt;
  opt.max_iterations = 1;
  const LpSolution s = solve_lp(to_model(lp), opt);
  EXPECT_TRUE(s.status == LpStatus::iteration_limit ||
              s.status == LpStatus::optimal);
}
