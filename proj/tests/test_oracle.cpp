#include <gtest/gtest.h>

#include "qmb/oracle.hpp"
#include "qmb/solve.hpp"
#include "support.hpp"

using namespace qmb;

namespace {

// P(y | do(x)) by simulating every combination of exogenous values and
// running the mechanisms in topological order, with x forced.
double simulate(const FullScm& s, const std::vector<Literal>& y,
                const std::vector<Literal>& x) {
  const CausalGraph& g = s.graph;
  std::vector<qmbt::ReferenceColumns> layouts;
  for (const ComponentLaw& l : s.laws) layouts.emplace_back(g, l.component);
  std::vector<std::size_t> idx(s.laws.size(), 0);
  double total = 0.0;
  while (true) {
    double p = 1.0;
    std::map<std::string, int> val;
    for (const Literal& l : x) val[l.name] = l.value;
    for (NodeId v : g.topological_order()) {
      if (g.is_exogenous(v) || val.count(g.name(v))) continue;
      for (std::size_t c = 0; c < s.laws.size(); ++c) {
        if (!s.laws[c].component.members.contains(v)) continue;
        const auto& lay = layouts[c];
        const std::uint64_t u = s.laws[c].support[idx[c]].first;
        const auto m = std::find(lay.members.begin(), lay.members.end(),
                                 g.name(v)) -
                       lay.members.begin();
        int cfg = 0;
        for (const auto& par : lay.parents[m]) cfg = (cfg << 1) | val.at(par);
        val[g.name(v)] = static_cast<int>((u >> (lay.offset[m] + cfg)) & 1U);
      }
    }
    bool hit = true;
    for (const Literal& l : y) hit = hit && val.at(l.name) == l.value;
    for (std::size_t c = 0; c < s.laws.size(); ++c) {
      p *= s.laws[c].support[idx[c]].second;
    }
    if (hit) total += p;
    std::size_t c = 0;
    while (c < idx.size() && ++idx[c] == s.laws[c].support.size()) {
      idx[c++] = 0;
    }
    if (c == idx.size()) break;
  }
  return total;
}

}  // namespace

TEST(Oracle, TruthMatchesSimulation) {
  for (const auto& name : fixture_names()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const FullScm s = random_scm(fixture_graph(name), seed);
      for (int xv = 0; xv < 2; ++xv) {
        const double want = simulate(s, {{"Y", 1}}, {{"X", xv}});
        EXPECT_NEAR(exact_interventional(s, {{{"Y", 1}}, {{"X", xv}}}), want,
                    1e-12)
            << name;
      }
    }
  }
}

TEST(Oracle, JointMatchesSimulation) {
  const FullScm s = random_scm(fixture_graph("fig2-right"), 5);
  const EmpiricalDistribution d = exact_joint(s);
  double sum = 0.0;
  for (double p : d.table()) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  for (int w = 0; w < 2; ++w) {
    for (int y = 0; y < 2; ++y) {
      EXPECT_NEAR(qmbt::prob(d, {{"W", w}, {"Y", y}}),
                  simulate(s, {{"W", w}, {"Y", y}}, {}), 1e-12);
    }
  }
}

TEST(Oracle, SeedsAreReproducible) {
  const FullScm a = random_scm(fixture_graph("fig1a"), 42);
  const FullScm b = random_scm(fixture_graph("fig1a"), 42);
  EXPECT_EQ(exact_joint(a), exact_joint(b));
  const FullScm c = random_scm(fixture_graph("fig1a"), 43);
  EXPECT_FALSE(exact_joint(a) == exact_joint(c));
}

TEST(Oracle, DeterministicScmIsPointMass) {
  const CausalGraph g = fixture_graph("fig1a");
  // Component {X,W}: f_X = 1, f_W(x) = x (bits: W_0 W_1 X_0 -> 0 1 1).
  // Component {Z,Y}: f_Y(z) = z, f_Z(w) = 1 - w (Y_0 Y_1 Z_0 Z_1 -> 0 1 1 0).
  const FullScm s = deterministic_scm(g, {0b110, 0b0110});
  const EmpiricalDistribution d = exact_joint(s);
  EXPECT_NEAR(qmbt::prob(d, {{"X", 1}, {"W", 1}, {"Z", 0}, {"Y", 0}}), 1.0,
              1e-15);
  EXPECT_NEAR(exact_interventional(s, {{{"Y", 1}}, {{"X", 0}}}), 1.0, 1e-15);
}

TEST(Oracle, FamilyShape) {
  const CausalGraph g = family_graph(2, 3);
  EXPECT_EQ(g.endogenous().size(), 2 + 3 + 2);
  EXPECT_EQ(g.parents(g.id("Y")), g.set_of({"W3", "U2"}));
  EXPECT_EQ(g.parents(g.id("W1")), g.set_of({"X", "Z1", "Z2", "U1"}));
  EXPECT_EQ(g.parents(g.id("W2")), g.set_of({"W1", "Z1", "Z2", "U1"}));
  EXPECT_THROW(family_graph(0, 1), InputError);
}

TEST(Oracle, DegenerateInstancesAreFlagged) {
  // Without positivity the conditionals on unseen contexts read as 0, so the
  // bounds lose their guarantee. Such runs must carry the flag, may end
  // infeasible, and must stay sound whenever the flag is clear.
  RandomScmOptions opt;
  opt.degenerate = true;
  int flagged = 0, clean = 0;
  for (const auto& name : fixture_names()) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      const Instance in =
          make_instance(fixture_graph(name), {{{"Y", 1}}, {{"X", 1}}}, seed, opt);
      QuerySpec q;
      q.target = in.query.target;
      q.intervention = in.query.intervention;
      const BoundResult r = bound(in.graph, in.dist, q);
      for (const auto* run : {&r.lower_run, &r.upper_run}) {
        const std::string& st = (*run)->status;
        EXPECT_TRUE(st == "optimal" || st == "infeasible") << name << seed;
        if (st == "infeasible") EXPECT_GT(r.zero_conditioning, 0);
      }
      if (r.zero_conditioning > 0) {
        ++flagged;
        continue;
      }
      ++clean;
      EXPECT_LE(r.lower, in.truth + 1e-7) << name << seed;
      EXPECT_GE(r.upper, in.truth - 1e-7) << name << seed;
    }
  }
  EXPECT_GT(flagged, 0);
}

TEST(Oracle, MarkovianizedVariantsCollapse) {
  for (const auto& name : fixture_names()) {
    const CausalGraph g = markovianized(fixture_graph(name));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Instance in = make_instance(g, {{{"Y", 1}}, {{"X", 1}}}, seed);
      QuerySpec q;
      q.target = in.query.target;
      q.intervention = in.query.intervention;
      const BoundResult r = bound(in.graph, in.dist, q);
      EXPECT_LE(r.upper - r.lower, 1e-7);
      EXPECT_NEAR(r.lower, in.truth, 1e-7);
    }
  }
}
