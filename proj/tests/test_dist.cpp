#include <gtest/gtest.h>

#include <random>

#include "qmb/dist.hpp"
#include "qmb/error.hpp"
#include "qmb/oracle.hpp"
#include "support.hpp"

using namespace qmb;

TEST(Dist, SamplesGiveRelativeFrequencies) {
  const auto d = EmpiricalDistribution::from_samples(
      {"A", "B"}, {"00", "10", "10", "11"});
  // Character k is variable k; table bit k is variable k.
  EXPECT_DOUBLE_EQ(d.table()[0b00], 0.25);
  EXPECT_DOUBLE_EQ(d.table()[0b01], 0.5);
  EXPECT_DOUBLE_EQ(d.table()[0b11], 0.25);
  EXPECT_DOUBLE_EQ(d.table()[0b10], 0.0);
}

TEST(Dist, MissingEntriesDefaultToZero) {
  const auto d = EmpiricalDistribution::from_entries(
      {"A", "B"}, {{"00", 0.5}, {"11", 0.5}});
  EXPECT_DOUBLE_EQ(d.table()[0b01], 0.0);
  EXPECT_DOUBLE_EQ(d.table()[0b10], 0.0);
}

TEST(Dist, RejectsBadTables) {
  EXPECT_THROW(EmpiricalDistribution::from_entries({"A"}, {{"0", 0.4},
                                                           {"1", 0.5}}),
               InputError);
  EXPECT_THROW(EmpiricalDistribution({"A"}, {1.2, -0.2}), InputError);
  EXPECT_THROW(EmpiricalDistribution::from_entries({"A"}, {{"2", 1.0}}),
               InputError);
  EXPECT_THROW(EmpiricalDistribution::from_entries({"A"}, {{"01", 1.0}}),
               InputError);
  EXPECT_THROW(EmpiricalDistribution::from_samples({"A", "A"}, {"00"}),
               InputError);
  EXPECT_THROW(EmpiricalDistribution::from_samples({"A"}, {}), InputError);
}

TEST(Dist, NormalizationTolerance) {
  EXPECT_NO_THROW(EmpiricalDistribution({"A"}, {0.5, 0.5 + 5e-10}));
  EXPECT_THROW(EmpiricalDistribution({"A"}, {0.5, 0.5 + 1e-8}), InputError);
}

TEST(Dist, ConditionalMatchesDirectCount) {
  std::mt19937_64 rng(3);
  std::vector<double> t(16);
  double s = 0;
  for (double& x : t) s += (x = std::uniform_real_distribution<>(0, 1)(rng));
  for (double& x : t) x /= s;
  const EmpiricalDistribution d({"A", "B", "C", "D"}, t);
  // P(A=1 | B=0, D=1), variables at table bits 0..3.
  const Conditional c = d.conditional(0b0001, 0b0001, 0b1010, 0b1000);
  EXPECT_FALSE(c.zero_conditioning);
  EXPECT_NEAR(c.value, qmbt::cond(d, {{"A", 1}}, {{"B", 0}, {"D", 1}}),
              1e-15);
  EXPECT_THROW(d.conditional(0b1, 0, 0b1, 0), PreconditionError);
}

TEST(Dist, ZeroConditioningIsFlagged) {
  const auto d = EmpiricalDistribution::from_entries({"A", "B"},
                                                     {{"00", 1.0}});
  const Conditional c = d.conditional(0b01, 0b01, 0b10, 0b10);
  EXPECT_TRUE(c.zero_conditioning);
  EXPECT_EQ(c.value, 0.0);
}

TEST(Dist, MarginalSumsOut) {
  const auto in = make_instance(fixture_graph("fig1a"), {{{"Y", 1}}, {{"X", 1}}},
                                5);
  const EmpiricalDistribution m = in.dist.marginal({"Y", "X"});
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      EXPECT_NEAR(m.table()[y | (x << 1)],
                  qmbt::prob(in.dist, {{"Y", y}, {"X", x}}), 1e-15);
    }
  }
}

TEST(Dist, ViewTranslatesGraphIds) {
  const CausalGraph g = fixture_graph("fig1a");
  const auto in = make_instance(g, {{{"Y", 1}}, {{"X", 1}}}, 9);
  const DistributionView view(g, in.dist);
  Assignment a;
  a.set(g.id("W"), 1);
  a.set(g.id("Y"), 0);
  EXPECT_NEAR(view.probability(a), qmbt::prob(in.dist, {{"W", 1}, {"Y", 0}}),
              1e-15);
  const EmpiricalDistribution wrong({"A"}, {0.5, 0.5});
  EXPECT_THROW(DistributionView(g, wrong), InputError);
}
