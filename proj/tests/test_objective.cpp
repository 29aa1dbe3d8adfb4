#include <gtest/gtest.h>

#include <map>

#include "qmb/error.hpp"
#include "qmb/objective.hpp"
#include "qmb/oracle.hpp"
#include "support.hpp"

using namespace qmb;

namespace {

const InterventionalQuery kQuery{{{"Y", 1}}, {{"X", 1}}};

std::vector<StepCase> cases(const Objective& o) {
  std::vector<StepCase> out;
  for (const auto& s : o.trace.steps) out.push_back(s.kind);
  return out;
}

// Coefficients keyed by printed literal product, after canonical sort.
std::map<std::string, double> terms_of(BitPolynomial p) {
  p.canonicalize();
  std::map<std::string, double> out;
  for (const Term& t : p.terms()) {
    std::string key;
    for (const BitLiteral& l : t.literals) {
      key += p.encoding()->literal_name(l);
    }
    out[key] += t.coefficient;
  }
  return out;
}

void expect_terms(const std::map<std::string, double>& got,
                  const std::map<std::string, double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (const auto& [k, v] : want) {
    ASSERT_TRUE(got.count(k)) << k;
    EXPECT_NEAR(got.at(k), v, tol) << k;
  }
}

double expectation(const Objective& o, const ComponentLaw& law) {
  double s = 0.0;
  for (auto [u, p] : law.support) {
    s += p * o.gamma.eval(BitString::from_index(u, o.encoding->total_bits()));
  }
  return s;
}

}  // namespace

TEST(Objective, Fig1aExpansion) {
  const auto in = make_instance(fixture_graph("fig1a"), kQuery, 21);
  const Objective o = build_objective(in.graph, in.dist, in.query);
  EXPECT_EQ(cases(o),
            (std::vector<StepCase>{StepCase::C3, StepCase::C2, StepCase::C1a}));
  // sum_w P^(y|x,w) [f_W(x,u)=w]; f_W(1,u) = b1_1.
  expect_terms(terms_of(o.gamma),
               {{"(1-b1_1)", qmbt::cond(in.dist, {{"Y", 1}}, {{"W", 0}, {"X", 1}})},
                {"b1_1", qmbt::cond(in.dist, {{"Y", 1}}, {{"W", 1}, {"X", 1}})}},
               1e-14);
}

TEST(Objective, Fig2LeftLeavesROut) {
  const auto in = make_instance(fixture_graph("fig2-left"), kQuery, 22);
  const Objective o = build_objective(in.graph, in.dist, in.query);
  EXPECT_EQ(cases(o),
            (std::vector<StepCase>{StepCase::C2, StepCase::C3, StepCase::C1a}));
  const NodeId r = o.graph.id("R");
  for (const auto& s : o.trace.steps) {
    EXPECT_FALSE(s.summed.contains(r));
    EXPECT_FALSE(s.separator.contains(r));
    EXPECT_FALSE(s.conditioning.contains(r));
    EXPECT_EQ(s.equation.find("r"), std::string::npos) << s.equation;
  }
  // sum_z P^(z|x) [f_Y(z,x,u1)=y]; Y's parents (X,Z) index b2_{2x+z}.
  expect_terms(terms_of(o.gamma),
               {{"b2_2", qmbt::cond(in.dist, {{"Z", 0}}, {{"X", 1}})},
                {"b2_3", qmbt::cond(in.dist, {{"Z", 1}}, {{"X", 1}})}},
               1e-14);
}

TEST(Objective, SupplementaryFourGroups) {
  const auto in = make_instance(fixture_graph("supplementary"), kQuery, 23);
  const Objective o = build_objective(in.graph, in.dist, in.query);
  const auto& d = in.dist;
  std::map<std::string, double> want;
  const char* t_lit[2] = {"(1-b1_1)", "b1_1"};
  const char* w_lit[2][2] = {{"(1-b2_2)", "(1-b2_3)"}, {"b2_2", "b2_3"}};
  for (int w = 0; w < 2; ++w) {
    for (int t = 0; t < 2; ++t) {
      const double py = qmbt::cond(d, {{"Y", 1}}, {{"W", w}, {"T", t}});
      for (int z = 0; z < 2; ++z) {
        const double pz = qmbt::cond(d, {{"Z", z}}, {{"X", 1}});
        want[std::string(t_lit[t]) + w_lit[w][z]] += py * pz;
      }
    }
  }
  // The generated factors condition on more variables; they coincide with
  // the grouped form on the population distribution.
  expect_terms(terms_of(o.gamma), want, 1e-12);
}

TEST(Objective, ExpectationOfGammaIsTheTruth) {
  for (const auto& name : fixture_names()) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto in = make_instance(fixture_graph(name), kQuery, seed);
      const Objective o = build_objective(in.graph, in.dist, in.query);
      ASSERT_TRUE(o.encoding);
      const ComponentLaw& law = in.scm.law_of(in.graph.id("X"));
      ASSERT_TRUE(*o.encoding == *law.encoding);
      EXPECT_NEAR(expectation(o, law), in.truth, 1e-10) << name << seed;
    }
  }
  for (int m = 1; m <= 2; ++m) {
    for (int n = 1; n <= 2; ++n) {
      const auto in = family_instance(m, n, 40 + m * 3 + n);
      const Objective o = build_objective(in.graph, in.dist, in.query);
      const ComponentLaw& law = in.scm.law_of(in.graph.id("X"));
      EXPECT_NEAR(expectation(o, law), in.truth, 1e-10);
    }
  }
}

TEST(Objective, TwoTargets) {
  const auto in =
      make_instance(fixture_graph("fig2-right"), {{{"Y", 1}, {"W", 0}}, {{"X", 1}}},
                    31);
  const Objective o = build_objective(in.graph, in.dist, in.query);
  const ComponentLaw& law = in.scm.law_of(in.graph.id("X"));
  EXPECT_NEAR(expectation(o, law), in.truth, 1e-10);
}

TEST(Objective, NoInterventionIsObservational) {
  const auto in = make_instance(fixture_graph("fig1a"), {{{"Y", 1}}, {}}, 4);
  const Objective o = build_objective(in.graph, in.dist, in.query);
  EXPECT_TRUE(o.identified());
  EXPECT_NEAR(o.gamma.constant_part(), qmbt::prob(in.dist, {{"Y", 1}}), 1e-12);
}

TEST(Objective, TargetNotDescendantIsIdentified) {
  // W is not affected by do(Y).
  const auto in = make_instance(fixture_graph("fig1a"), {{{"W", 1}}, {{"Y", 0}}},
                                6);
  const Objective o = build_objective(in.graph, in.dist, in.query);
  EXPECT_TRUE(o.identified());
  EXPECT_NEAR(o.gamma.constant_part(), in.truth, 1e-12);
}

TEST(Objective, RejectsBadQueries) {
  const auto in = make_instance(fixture_graph("fig1a"), kQuery, 4);
  EXPECT_THROW(build_objective(in.graph, in.dist, {{{"Y", 1}}, {{"Y", 1}}}),
               Error);
  EXPECT_THROW(build_objective(in.graph, in.dist, {{{"Q", 1}}, {{"X", 1}}}),
               Error);
  EXPECT_THROW(build_objective(in.graph, in.dist, {{{"Y", 1}}, {{"U1", 1}}}),
               Error);
}
