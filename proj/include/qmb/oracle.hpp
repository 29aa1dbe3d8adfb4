#pragma once

// Fully specified SCMs with canonical exogenous variables, and exact
// inference on them by enumeration.

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmb/canon.hpp"
#include "qmb/dist.hpp"
#include "qmb/error.hpp"
#include "qmb/graph.hpp"
#include "qmb/objective.hpp"

namespace qmb {

inline constexpr std::uint64_t kOracleEnumerationLimit = std::uint64_t{1}
                                                         << 26;
inline constexpr int kDenseSupportBits = 20;
inline constexpr int kSparseSupportSize = 64;
inline constexpr double kProbabilityFloor = 1e-6;

// Distribution over the canonical values of one component's exogenous
// variable, kept as its support.
struct ComponentLaw {
  CComponent component;
  std::shared_ptr<const BitEncoding> encoding;
  std::vector<std::pair<std::uint64_t, double>> support;
};

struct FullScm {
  CausalGraph graph;
  std::vector<ComponentLaw> laws;  // aligned with c_components(graph)
  std::uint64_t seed = 0;

  const ComponentLaw& law_of(NodeId v) const {
    for (const ComponentLaw& l : laws) {
      if (l.component.members.contains(v)) return l;
    }
    throw PreconditionError("node has no component");
  }
};

struct RandomScmOptions {
  // Without the floor, weights can be arbitrarily small and supports are
  // sparse, which produces zero-probability contexts.
  bool degenerate = false;
};

namespace detail {

// Output of member v's mechanism under exogenous value u and endogenous
// values `values` (indexed by node id).
inline int mechanism_output(const CausalGraph& g, const BitEncoding& enc,
                            int block, std::uint64_t u,
                            std::uint64_t values) {
  const MechanismBlock& b = enc.block(block);
  int j = 0;
  for (NodeId p : b.parents) j = (j << 1) | int((values >> p) & 1U);
  (void)g;
  return int((u >> (b.offset + j)) & 1U);
}

inline std::vector<double> dirichlet(std::mt19937_64& rng, std::size_t n,
                                     bool floor) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - unif(rng));
    s += x;
  }
  for (double& x : w) x /= s;
  if (floor) {
    s = 0.0;
    for (double& x : w) {
      x = std::max(x, kProbabilityFloor);
      s += x;
    }
    for (double& x : w) x /= s;
  }
  return w;
}

}  // namespace detail

inline FullScm random_scm(const CausalGraph& g, std::uint64_t seed,
                          RandomScmOptions opt = {}) {
  g.require_quasi_markovian();
  FullScm s;
  s.graph = g;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  for (const CComponent& c : c_components(g)) {
    ComponentLaw law;
    law.component = c;
    law.encoding = std::make_shared<const BitEncoding>(g, c);
    const int bits = law.encoding->total_bits();
    if (bits > 63) throw SizeLimitError("component layout exceeds 63 bits");
    const std::uint64_t mask =
        bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    if (!c.exogenous) {
      law.support.emplace_back(rng() & mask, 1.0);
    } else if (opt.degenerate) {
      std::uniform_int_distribution<int> k(1, 4);
      const int n = k(rng);
      std::vector<std::uint64_t> us;
      while (static_cast<int>(us.size()) < n) {
        std::uint64_t u = rng() & mask;
        if (std::find(us.begin(), us.end(), u) == us.end()) us.push_back(u);
        if (bits < 3 && us.size() >= (std::size_t{1} << bits)) break;
      }
      std::vector<double> w = detail::dirichlet(rng, us.size(), false);
      for (std::size_t i = 0; i < us.size(); ++i) {
        law.support.emplace_back(us[i], w[i]);
      }
    } else if (bits <= kDenseSupportBits) {
      std::vector<double> w =
          detail::dirichlet(rng, std::size_t{1} << bits, true);
      for (std::size_t u = 0; u < w.size(); ++u) {
        law.support.emplace_back(u, w[u]);
      }
    } else {
      std::vector<std::uint64_t> us;
      while (static_cast<int>(us.size()) < kSparseSupportSize) {
        std::uint64_t u = rng() & mask;
        if (std::find(us.begin(), us.end(), u) == us.end()) us.push_back(u);
      }
      std::vector<double> w = detail::dirichlet(rng, us.size(), true);
      for (std::size_t i = 0; i < us.size(); ++i) {
        law.support.emplace_back(us[i], w[i]);
      }
    }
    s.laws.push_back(std::move(law));
  }
  return s;
}

// SCM whose exogenous values are point masses on the given canonical values
// (one per component, in c_components order).
inline FullScm deterministic_scm(const CausalGraph& g,
                                 const std::vector<std::uint64_t>& us) {
  FullScm s;
  s.graph = g;
  auto comps = c_components(g);
  if (us.size() != comps.size()) {
    throw PreconditionError("one exogenous value per component expected");
  }
  for (std::size_t i = 0; i < comps.size(); ++i) {
    ComponentLaw law;
    law.component = comps[i];
    law.encoding = std::make_shared<const BitEncoding>(g, comps[i]);
    law.support.emplace_back(us[i], 1.0);
    s.laws.push_back(std::move(law));
  }
  return s;
}

namespace detail {

// Product over component members outside `skip` of [f_V(pa, u) = v].
inline bool consistent(const CausalGraph& g, const ComponentLaw& law,
                       std::uint64_t u, std::uint64_t values, NodeSet skip) {
  const BitEncoding& enc = *law.encoding;
  for (int b = 0; b < enc.num_blocks(); ++b) {
    const NodeId v = enc.block(b).member;
    if (skip.contains(v)) continue;
    if (mechanism_output(g, enc, b, u, values) != int((values >> v) & 1U)) {
      return false;
    }
  }
  return true;
}

inline double component_factor(const CausalGraph& g, const ComponentLaw& law,
                               std::uint64_t values, NodeSet skip) {
  double q = 0.0;
  for (const auto& [u, p] : law.support) {
    if (consistent(g, law, u, values, skip)) q += p;
  }
  return q;
}

// Distribution with variables in name order, filled from a function of the
// endogenous values (indexed by node id).
template <typename F>
EmpiricalDistribution tabulate(const CausalGraph& g, F&& f) {
  const std::vector<NodeId> vars = g.sorted_by_name(g.endogenous());
  std::vector<std::string> names;
  for (NodeId v : vars) names.push_back(g.name(v));
  if (vars.size() > static_cast<std::size_t>(kMaxDistributionVariables)) {
    throw SizeLimitError("too many endogenous variables to tabulate");
  }
  std::vector<double> table(std::size_t{1} << vars.size(), 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::uint64_t values = 0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if ((i >> k) & 1U) values |= std::uint64_t{1} << vars[k];
    }
    table[i] = f(values);
  }
  double s = 0.0;
  for (double p : table) s += p;
  if (std::abs(s - 1.0) > 1e-12) {
    throw std::logic_error("tabulated distribution sums to " +
                           std::to_string(s));
  }
  for (double& p : table) p /= s;
  return EmpiricalDistribution(std::move(names), std::move(table));
}

inline std::uint64_t enumeration_size(const FullScm& s) {
  long double n = 1.0L;
  for (const ComponentLaw& l : s.laws) n *= l.support.size();
  return n > static_cast<long double>(~std::uint64_t{0} >> 1)
             ? ~std::uint64_t{0}
             : static_cast<std::uint64_t>(n);
}

// Joint (or truncated joint when `x` is non-empty) by enumerating every
// combination of exogenous values and evaluating the mechanisms in
// topological order.
inline std::vector<double> enumerate_mechanisms(const FullScm& s,
                                                const Assignment& x) {
  const CausalGraph& g = s.graph;
  const std::vector<NodeId> vars = g.sorted_by_name(g.endogenous());
  std::vector<int> slot(g.size(), -1);
  for (std::size_t k = 0; k < vars.size(); ++k) slot[vars[k]] = int(k);
  struct Eval {
    NodeId v;
    int law;
    int block;
  };
  std::vector<Eval> order;
  for (NodeId v : g.topological_order()) {
    if (g.is_exogenous(v)) continue;
    for (std::size_t l = 0; l < s.laws.size(); ++l) {
      if (s.laws[l].component.members.contains(v)) {
        order.push_back({v, int(l), s.laws[l].encoding->block_of(v)});
      }
    }
  }
  std::vector<double> table(std::size_t{1} << vars.size(), 0.0);
  std::vector<std::size_t> idx(s.laws.size(), 0);
  while (true) {
    double p = 1.0;
    for (std::size_t l = 0; l < s.laws.size(); ++l) {
      p *= s.laws[l].support[idx[l]].second;
    }
    if (p > 0.0) {
      std::uint64_t values = 0;
      std::size_t cell = 0;
      for (const Eval& e : order) {
        int out;
        if (x.vars.contains(e.v)) {
          out = x.value(e.v);
        } else {
          out = mechanism_output(g, *s.laws[e.law].encoding, e.block,
                                 s.laws[e.law].support[idx[e.law]].first,
                                 values);
        }
        if (out) {
          values |= std::uint64_t{1} << e.v;
          cell |= std::size_t{1} << slot[e.v];
        }
      }
      table[cell] += p;
    }
    std::size_t l = 0;
    while (l < idx.size() && ++idx[l] == s.laws[l].support.size()) {
      idx[l++] = 0;
    }
    if (l == idx.size()) break;
  }
  return table;
}

}  // namespace detail

// Observational joint, variables in name order. Computed from the product of
// component factors and, when the enumeration fits the limit, cross-checked
// against direct enumeration of all exogenous combinations.
inline EmpiricalDistribution exact_joint(
    const FullScm& s, std::uint64_t limit = kOracleEnumerationLimit) {
  const CausalGraph& g = s.graph;
  if (detail::enumeration_size(s) > limit) {
    throw SizeLimitError("exogenous enumeration exceeds the oracle limit");
  }
  EmpiricalDistribution joint =
      detail::tabulate(g, [&](std::uint64_t values) {
        double p = 1.0;
        for (const ComponentLaw& l : s.laws) {
          p *= detail::component_factor(g, l, values, NodeSet{});
          if (p == 0.0) break;
        }
        return p;
      });
  const std::vector<double> direct = detail::enumerate_mechanisms(s, {});
  for (std::size_t i = 0; i < direct.size(); ++i) {
    if (std::abs(direct[i] - joint.table()[i]) > 1e-12) {
      throw std::logic_error("component factorization disagrees with "
                             "exogenous enumeration");
    }
  }
  return joint;
}

// Sum over assignments v consistent with y and x of
//   prod_{intervened C} sum_u P(u) prod_{V in C \ X} [f_V(pa, u) = v]
//   * prod_{V in other components} P^(v | w_V),
// i.e. the factorization over the intervened semi-marginal graph, with the
// laws of the intervened components taken from `s` and the remaining
// factors from `dist` (which must be over the endogenous nodes of s.graph).
inline double semi_marginal_value(const FullScm& s,
                                  const EmpiricalDistribution& dist,
                                  const Assignment& y, const Assignment& x,
                                  bool* zero_conditioning = nullptr) {
  const CausalGraph& g = s.graph;
  const DistributionView view(g, dist);
  std::vector<const ComponentLaw*> intervened;
  std::vector<std::pair<NodeId, NodeSet>> observed;
  for (const ComponentLaw& l : s.laws) {
    if (l.component.members.intersects(x.vars)) {
      intervened.push_back(&l);
    } else {
      for (const auto& pr : l.component.prefix) observed.push_back(pr);
    }
  }
  const NodeSet free = g.endogenous() - y.vars - x.vars;
  double total = 0.0;
  for_each_assignment(free, [&](const Assignment& z) {
    const Assignment v = z.merged(y).merged(x);
    double p = 1.0;
    for (const ComponentLaw* l : intervened) {
      p *= detail::component_factor(g, *l, v.values, x.vars);
      if (p == 0.0) return;
    }
    for (const auto& [node, prefix] : observed) {
      Assignment ev;
      ev.set(node, v.value(node));
      const Conditional c = view.conditional(ev, v.restricted(prefix));
      if (c.zero_conditioning && zero_conditioning) *zero_conditioning = true;
      p *= c.value;
      if (p == 0.0) return;
    }
    total += p;
  });
  return total;
}

// P(y | do(x)) by truncated factorization. Cross-checked against the
// semi-marginal factorization when every conditional it reads has support,
// and against exhaustive enumeration of the truncated SCM when that fits.
inline double exact_interventional(const FullScm& s, const Assignment& y,
                                   const Assignment& x) {
  const CausalGraph& g = s.graph;
  if (!(y.vars | x.vars).subset_of(g.endogenous())) {
    throw PreconditionError("queries range over endogenous variables");
  }
  if (!y.consistent_with(x)) return 0.0;
  const Assignment yy = y.restricted(y.vars - x.vars);
  const NodeSet free = g.endogenous() - yy.vars - x.vars;
  double truncated = 0.0;
  for_each_assignment(free, [&](const Assignment& z) {
    const Assignment v = z.merged(yy).merged(x);
    double p = 1.0;
    for (const ComponentLaw& l : s.laws) {
      p *= detail::component_factor(g, l, v.values, x.vars);
      if (p == 0.0) return;
    }
    truncated += p;
  });

  const EmpiricalDistribution joint = exact_joint(s);
  bool unsupported = false;
  const double semi = semi_marginal_value(s, joint, yy, x, &unsupported);
  if (!unsupported && std::abs(semi - truncated) > 1e-10) {
    throw std::logic_error("semi-marginal factorization disagrees with the "
                           "truncated SCM");
  }
  if (detail::enumeration_size(s) <= kOracleEnumerationLimit) {
    const std::vector<double> direct = detail::enumerate_mechanisms(s, x);
    const std::vector<NodeId> vars = g.sorted_by_name(g.endogenous());
    double e = 0.0;
    for (std::size_t i = 0; i < direct.size(); ++i) {
      bool ok = true;
      for (std::size_t k = 0; k < vars.size() && ok; ++k) {
        if (yy.vars.contains(vars[k])) {
          ok = int((i >> k) & 1U) == yy.value(vars[k]);
        }
      }
      if (ok) e += direct[i];
    }
    if (std::abs(e - truncated) > 1e-10) {
      throw std::logic_error("truncated factorization disagrees with "
                             "enumeration");
    }
  }
  return truncated;
}

inline double exact_interventional(const FullScm& s,
                                   const InterventionalQuery& q) {
  return exact_interventional(s, to_assignment(s.graph, q.target),
                              to_assignment(s.graph, q.intervention));
}

inline CausalGraph family_graph(int m, int n) {
  if (m < 1 || n < 1) throw InputError("family parameters must be >= 1");
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  auto endo = [&](const std::string& s) {
    nodes.push_back({s, NodeKind::endogenous});
  };
  endo("X");
  for (int j = 1; j <= m; ++j) endo("Z" + std::to_string(j));
  for (int i = 1; i <= n; ++i) endo("W" + std::to_string(i));
  endo("Y");
  nodes.push_back({"U1", NodeKind::exogenous});
  nodes.push_back({"U2", NodeKind::exogenous});
  for (int j = 1; j <= m; ++j) {
    const std::string z = "Z" + std::to_string(j);
    edges.emplace_back("X", z);
    for (int i = 1; i <= n; ++i) edges.emplace_back(z, "W" + std::to_string(i));
    edges.emplace_back("U2", z);
  }
  edges.emplace_back("X", "W1");
  for (int i = 2; i <= n; ++i) {
    edges.emplace_back("W" + std::to_string(i - 1), "W" + std::to_string(i));
  }
  edges.emplace_back("W" + std::to_string(n), "Y");
  edges.emplace_back("U1", "X");
  for (int i = 1; i <= n; ++i) edges.emplace_back("U1", "W" + std::to_string(i));
  edges.emplace_back("U2", "Y");
  return CausalGraph(nodes, edges);
}

// Named fixture diagrams; each is queried with P(Y=1 | do(X=1)).
inline std::vector<std::string> fixture_names() {
  return {"fig1a", "fig2-left", "fig2-right", "supplementary"};
}

inline CausalGraph fixture_graph(const std::string& name) {
  auto build = [](const std::vector<std::string>& endo,
                  const std::vector<std::string>& exo,
                  const std::vector<Edge>& edges) {
    std::vector<Node> nodes;
    for (const auto& n : endo) nodes.push_back({n, NodeKind::endogenous});
    for (const auto& n : exo) nodes.push_back({n, NodeKind::exogenous});
    return CausalGraph(nodes, edges);
  };
  if (name == "fig1a") {
    return build({"X", "W", "Z", "Y"}, {"U1", "U2"},
                 {{"U1", "X"}, {"U1", "W"}, {"X", "W"}, {"W", "Z"},
                  {"U2", "Z"}, {"U2", "Y"}, {"Z", "Y"}});
  }
  if (name == "fig2-left") {
    return build({"X", "R", "Z", "Y"}, {"U1", "U2"},
                 {{"X", "Z"}, {"Z", "Y"}, {"X", "R"}, {"R", "Z"}, {"U1", "X"},
                  {"U1", "Y"}, {"U2", "R"}, {"U2", "Z"}, {"X", "Y"}});
  }
  if (name == "fig2-right") {
    return build({"X", "Z", "W", "Y"}, {"U1", "U2"},
                 {{"X", "Z"}, {"Z", "W"}, {"W", "Y"}, {"X", "W"}, {"U1", "X"},
                  {"U1", "W"}, {"U2", "Z"}, {"U2", "Y"}});
  }
  if (name == "supplementary") {
    return build({"S", "X", "Z", "W", "T", "Y"}, {"U1", "U2", "U3"},
                 {{"S", "Z"}, {"X", "Z"}, {"X", "W"}, {"Z", "W"}, {"W", "Y"},
                  {"X", "T"}, {"T", "Y"}, {"U1", "X"}, {"U1", "W"}, {"U1", "T"},
                  {"U2", "Y"}, {"U3", "S"}, {"U3", "Z"}});
  }
  throw InputError("unknown fixture '" + name + "'");
}

// Same endogenous structure with every c-component a singleton: each
// endogenous variable gets a private exogenous parent.
inline CausalGraph markovianized(const CausalGraph& g) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (g.is_endogenous(v)) nodes.push_back(g.node(v));
  }
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!g.is_endogenous(v)) continue;
    nodes.push_back({"U_" + g.name(v), NodeKind::exogenous});
    edges.emplace_back("U_" + g.name(v), g.name(v));
  }
  for (const auto& [a, b] : g.named_edges()) {
    if (g.is_endogenous(g.id(a))) edges.emplace_back(a, b);
  }
  return CausalGraph(nodes, edges);
}

struct Instance {
  CausalGraph graph;
  EmpiricalDistribution dist;
  InterventionalQuery query;
  FullScm scm;
  double truth = 0.0;
};

inline Instance make_instance(const CausalGraph& g, InterventionalQuery q,
                              std::uint64_t seed, RandomScmOptions opt = {}) {
  Instance in;
  in.graph = g;
  in.scm = random_scm(g, seed, opt);
  in.dist = exact_joint(in.scm);
  in.query = std::move(q);
  in.truth = exact_interventional(in.scm, in.query);
  return in;
}

// Template family: X -> Z_j -> W_i, X -> W_1, W chain, W_N -> Y, with U1
// confounding X and all W_i, and U2 confounding all Z_j and Y. The query is
// P(Y=1 | do(X=1)).
inline Instance family_instance(int m, int n, std::uint64_t seed,
                                RandomScmOptions opt = {}) {
  return make_instance(family_graph(m, n), {{{"Y", 1}}, {{"X", 1}}}, seed,
                       opt);
}

}  // namespace qmb
