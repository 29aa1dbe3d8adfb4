#include <gtest/gtest.h>

#include <random>

#include "qmb/oracle.hpp"
#include "qmb/solve.hpp"
#include "support.hpp"

using namespace qmb;

namespace {

const InterventionalQuery kQuery{{{"Y", 1}}, {{"X", 1}}};

QuerySpec spec_of(const InterventionalQuery& q) {
  QuerySpec s;
  s.target = q.target;
  s.intervention = q.intervention;
  return s;
}

// Bounds from the dense tableau solver over columns rebuilt from the graph.
std::pair<double, double> reference_bounds(const BoundProblem& bp,
                                           const Objective& o) {
  const ConstraintSystem& cs = *bp.constraints;
  const qmbt::ReferenceColumns ref(o.graph, *o.component);
  const std::uint64_t n = std::uint64_t{1} << ref.bits;
  std::vector<std::vector<double>> a(cs.num_rows(), std::vector<double>(n));
  std::vector<double> c(n);
  for (std::uint64_t u = 0; u < n; ++u) {
    for (int r = 0; r < ref.rows(); ++r) a[r][u] = ref.entry(r, u);
    a[ref.rows()][u] = 1.0;
    c[u] = bp.gamma.eval(BitString::from_index(u, ref.bits));
  }
  const double lo = qmbt::tableau_lp(a, cs.rhs, c);
  for (double& v : c) v = -v;
  const double hi = -qmbt::tableau_lp(a, cs.rhs, c);
  return {lo, hi};
}

double brute_min_rc(const ConstraintSystem& cs, const BitPolynomial& gamma,
                    const std::vector<double>& duals, Sense sense) {
  double best = kInf;
  const int bits = cs.total_bits();
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << bits); ++u) {
    best = std::min(best, reduced_cost(cs, gamma, duals, sense,
                                       BitString::from_index(u, bits)));
  }
  return best;
}

}  // namespace

TEST(Solve, MethodsMatchReferenceLp) {
  for (const auto& name : {"fig1a", "fig2-left", "fig2-right"}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto in = make_instance(fixture_graph(name), kQuery, seed);
      const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
      ASSERT_TRUE(bp.constraints);
      const auto [lo, hi] = reference_bounds(bp, bp.objectives[0]);
      for (Method m : {Method::direct_lp, Method::cg, Method::single_milp}) {
        BoundOptions opt;
        opt.method = m;
        const BoundResult r = bound_polynomial(&*bp.constraints, bp.gamma, opt);
        EXPECT_NEAR(r.lower, lo, 1e-9) << name << " " << method_name(m);
        EXPECT_NEAR(r.upper, hi, 1e-9) << name << " " << method_name(m);
        EXPECT_EQ(r.lower_run->status, "optimal");
        EXPECT_EQ(r.upper_run->status, "optimal");
      }
    }
  }
}

TEST(Solve, BranchAndBoundStrategyAgrees) {
  const auto in = make_instance(fixture_graph("fig1a"), kQuery, 17);
  const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
  BoundOptions lp;
  lp.method = Method::direct_lp;
  BoundOptions bb;
  bb.method = Method::single_milp;
  bb.milp_strategy = MilpStrategy::branch_and_bound;
  const BoundResult a = bound_polynomial(&*bp.constraints, bp.gamma, lp);
  const BoundResult b = bound_polynomial(&*bp.constraints, bp.gamma, bb);
  EXPECT_NEAR(a.lower, b.lower, 1e-7);
  EXPECT_NEAR(a.upper, b.upper, 1e-7);
}

TEST(Solve, ColumnGenerationInvariants) {
  for (const auto& name : fixture_names()) {
    const auto in = make_instance(fixture_graph(name), kQuery, 9);
    const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
    for (Sense sense : {Sense::minimize, Sense::maximize}) {
      for (bool phase_one : {false, true}) {
        CgOptions opt;
        opt.phase_one = phase_one;
        const CgReport rep =
            column_generation(*bp.constraints, bp.gamma, sense, opt);
        ASSERT_TRUE(rep.converged) << name;
        const auto& rc = rep.reduced_costs;
        ASSERT_FALSE(rc.empty());
        for (std::size_t k = 0; k + 1 < rc.size(); ++k) {
          EXPECT_LT(rc[k], -opt.epsilon);
        }
        EXPECT_GE(rc.back(), -opt.epsilon);
        EXPECT_GE(brute_min_rc(*bp.constraints, bp.gamma, rep.duals, sense),
                  -1e-8);
        // The master objective never gets worse.
        for (std::size_t k = 1; k < rep.objectives.size(); ++k) {
          const double step = sense_sign(sense) *
                              (rep.objectives[k] - rep.objectives[k - 1]);
          EXPECT_LE(step, 1e-9);
        }
        // The primal solution is a probability vector over the columns.
        double mass = 0.0;
        for (double w : rep.weights) {
          EXPECT_GE(w, -1e-12);
          mass += w;
        }
        EXPECT_NEAR(mass, 1.0, 1e-9);
      }
    }
  }
}

TEST(Solve, PricingMatchesBruteForce) {
  std::mt19937_64 rng(77);
  for (const auto& name : fixture_names()) {
    const auto in = make_instance(fixture_graph(name), kQuery, 3);
    const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
    const ConstraintSystem& cs = *bp.constraints;
    for (Sense sense : {Sense::minimize, Sense::maximize}) {
      Pricer pricer(cs, bp.gamma, sense);
      for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> duals(cs.num_rows());
        for (double& d : duals) d = std::uniform_real_distribution<>(-1, 1)(rng);
        const PricingResult pr = pricer.price(duals);
        EXPECT_EQ(pr.reduced_cost,
                  reduced_cost(cs, bp.gamma, duals, sense, pr.column));
        EXPECT_NEAR(pr.reduced_cost, brute_min_rc(cs, bp.gamma, duals, sense),
                    1e-12)
            << name;
      }
    }
  }
}

TEST(Solve, SingleMilpPointIsFeasible) {
  const auto in = make_instance(fixture_graph("fig2-right"), kQuery, 5);
  const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
  const ConstraintSystem& cs = *bp.constraints;
  for (Sense sense : {Sense::minimize, Sense::maximize}) {
    const IntegerProgramSpec ip = build_single_milp(cs, bp.gamma, sense);
    const SingleMilpSolution s = solve_single_milp(ip, cs, bp.gamma, sense);
    ASSERT_EQ(s.status, LpStatus::optimal);
    EXPECT_LE(ip.violation(s.x), 1e-7);
    EXPECT_NEAR(s.objective, s.bound, 1e-7);
    EXPECT_LE(s.copies_used, cs.num_rows());
  }
}

TEST(Solve, InfeasibleRowsAreReported) {
  const auto in = make_instance(fixture_graph("fig2-right"), kQuery, 5);
  BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
  bp.constraints->rhs[0] += 0.5;  // rows no longer sum to one
  for (Method m : {Method::direct_lp, Method::cg, Method::single_milp}) {
    BoundOptions opt;
    opt.method = m;
    const BoundResult r = bound_polynomial(&*bp.constraints, bp.gamma, opt);
    EXPECT_EQ(r.lower_run->status, "infeasible") << method_name(m);
    EXPECT_TRUE(std::isnan(r.lower)) << method_name(m);
  }
}

TEST(Solve, IterationCapIsFlagged) {
  const auto in = family_instance(2, 1, 4);
  const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
  int finite = 0;
  for (bool phase_one : {false, true}) {
    BoundOptions full;
    full.method = Method::cg;
    full.cg.phase_one = phase_one;
    const BoundResult exact =
        bound_polynomial(&*bp.constraints, bp.gamma, full);
    ASSERT_EQ(exact.lower_run->status, "optimal");
    for (int cap = 1; cap < exact.lower_run->iterations; ++cap) {
      BoundOptions opt = full;
      opt.cg.max_iterations = cap;
      const BoundResult r = bound_polynomial(&*bp.constraints, bp.gamma, opt);
      EXPECT_EQ(r.lower_run->status, "non-converged") << cap;
      // Best-so-far values exist only for a feasible master and are attained
      // by a law, so they cannot beat the optimum.
      if (std::isfinite(r.lower)) {
        ++finite;
        EXPECT_GE(r.lower, exact.lower - 1e-9);
      }
      if (std::isfinite(r.upper)) EXPECT_LE(r.upper, exact.upper + 1e-9);
    }
  }
  EXPECT_GT(finite, 0);
}

TEST(Solve, TimeLimitIsFlagged) {
  const auto in = family_instance(2, 2, 4);
  const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
  BoundOptions opt;
  opt.method = Method::cg;
  opt.time_limit_s = 0.0;
  const BoundResult r = bound_polynomial(&*bp.constraints, bp.gamma, opt);
  EXPECT_EQ(r.lower_run->status, "time-limit");
}

TEST(Solve, AutoPicksByColumnCount) {
  const auto in = family_instance(1, 1, 4);
  const BoundProblem bp = prepare(in.graph, in.dist, spec_of(in.query));
  BoundOptions opt;
  EXPECT_EQ(bound_polynomial(&*bp.constraints, bp.gamma, opt).method,
            "direct-lp");
  opt.column_limit = 4;
  EXPECT_EQ(bound_polynomial(&*bp.constraints, bp.gamma, opt).method, "cg");
  opt.method = Method::direct_lp;
  EXPECT_THROW(bound_polynomial(&*bp.constraints, bp.gamma, opt),
               SizeLimitError);
}

TEST(Solve, DirectionSelection) {
  const auto in = make_instance(fixture_graph("fig1a"), kQuery, 5);
  BoundOptions opt;
  opt.direction = Direction::upper;
  const BoundResult r = bound(in.graph, in.dist, spec_of(in.query), opt);
  EXPECT_FALSE(r.lower_run);
  EXPECT_TRUE(r.upper_run);
  EXPECT_TRUE(std::isnan(r.lower));
}

TEST(Solve, AteBoundsContainTruth) {
  for (const auto& name : fixture_names()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto in = make_instance(fixture_graph(name), kQuery, seed);
      QuerySpec q;
      q.kind = QuerySpec::Kind::ate;
      q.target = {{"Y", 1}};
      q.intervention = {{"X", 1}};
      const double truth =
          exact_interventional(in.scm, {{{"Y", 1}}, {{"X", 1}}}) -
          exact_interventional(in.scm, {{{"Y", 1}}, {{"X", 0}}});
      const BoundResult r = bound(in.graph, in.dist, q);
      EXPECT_LE(r.lower, truth + 1e-7);
      EXPECT_GE(r.upper, truth - 1e-7);
      EXPECT_GE(r.lower, -1.0 - 1e-9);
      EXPECT_LE(r.upper, 1.0 + 1e-9);
    }
  }
}

TEST(Solve, IdentifiedQueryShortCircuits) {
  const auto in = make_instance(fixture_graph("fig1a"), {{{"Y", 1}}, {}}, 5);
  const BoundResult r = bound(in.graph, in.dist, spec_of(in.query));
  EXPECT_EQ(r.method, "identified");
  EXPECT_EQ(r.lower, r.upper);
  EXPECT_NEAR(r.lower, qmbt::prob(in.dist, {{"Y", 1}}), 1e-12);
}
