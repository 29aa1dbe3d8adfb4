#pragma once

// Causal diagrams over endogenous and exogenous nodes: construction,
// c-components, edge surgery, d-separation, intervened semi-marginal graphs,
// ancestral pruning and the separator search used by the objective builder.

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "qmb/error.hpp"
#include "qmb/node_set.hpp"

namespace qmb {

enum class NodeKind { endogenous, exogenous };

struct Node {
  std::string name;
  NodeKind kind = NodeKind::endogenous;
};

using Edge = std::pair<std::string, std::string>;

class CausalGraph {
 public:
  CausalGraph() = default;

  // Validates names, edge endpoints, exogenous roots and acyclicity.
  // Duplicate edges are collapsed.
  CausalGraph(std::vector<Node> nodes, const std::vector<Edge>& edges)
      : nodes_(std::move(nodes)) {
    if (static_cast<int>(nodes_.size()) > kMaxNodes) {
      throw InputError("graph has " + std::to_string(nodes_.size()) +
                       " nodes; at most " + std::to_string(kMaxNodes) +
                       " are supported");
    }
    for (NodeId i = 0; i < size(); ++i) {
      const std::string& n = nodes_[i].name;
      if (n.empty()) throw InputError("empty node name");
      if (!index_.emplace(n, i).second) {
        throw InputError("duplicate node name '" + n + "'");
      }
    }
    parents_.assign(nodes_.size(), NodeSet{});
    children_.assign(nodes_.size(), NodeSet{});
    for (const auto& [from, to] : edges) {
      NodeId a = id(from);
      NodeId b = id(to);
      if (a == b) throw InputError("self-loop on '" + from + "'");
      if (is_exogenous(b)) {
        throw InputError("exogenous node '" + to + "' has an incoming edge");
      }
      parents_[b].insert(a);
      children_[a].insert(b);
    }
    compute_topological_order();
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(NodeId i) const { return nodes_.at(i); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::string& name(NodeId i) const { return nodes_.at(i).name; }
  bool is_exogenous(NodeId i) const {
    return nodes_.at(i).kind == NodeKind::exogenous;
  }
  bool is_endogenous(NodeId i) const { return !is_exogenous(i); }

  std::optional<NodeId> find(const std::string& n) const {
    auto it = index_.find(n);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  NodeId id(const std::string& n) const {
    auto found = find(n);
    if (!found) throw InputError("unknown node '" + n + "'");
    return *found;
  }

  NodeSet set_of(const std::vector<std::string>& names) const {
    NodeSet s;
    for (const auto& n : names) s.insert(id(n));
    return s;
  }

  // Names of the set members, sorted lexicographically.
  std::vector<std::string> names_of(NodeSet s) const {
    std::vector<std::string> out;
    for (NodeId i : s) out.push_back(name(i));
    std::sort(out.begin(), out.end());
    return out;
  }

  // Ids sorted by node name.
  std::vector<NodeId> sorted_by_name(NodeSet s) const {
    std::vector<NodeId> out = s.ids();
    std::sort(out.begin(), out.end(),
              [this](NodeId a, NodeId b) { return name(a) < name(b); });
    return out;
  }

  NodeSet all() const { return NodeSet::first(size()); }

  NodeSet endogenous() const {
    NodeSet s;
    for (NodeId i = 0; i < size(); ++i) {
      if (is_endogenous(i)) s.insert(i);
    }
    return s;
  }

  NodeSet exogenous() const { return all() - endogenous(); }

  NodeSet parents(NodeId i) const { return parents_.at(i); }
  NodeSet children(NodeId i) const { return children_.at(i); }
  NodeSet endogenous_parents(NodeId i) const {
    return parents_.at(i) & endogenous();
  }

  std::optional<NodeId> exogenous_parent(NodeId i) const {
    NodeSet ex = parents_.at(i) & exogenous();
    if (ex.empty()) return std::nullopt;
    return *ex.begin();
  }

  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId v : topo_) {
      for (NodeId c : sorted_by_name(children_[v])) out.emplace_back(v, c);
    }
    return out;
  }

  std::vector<Edge> named_edges() const {
    std::vector<Edge> out;
    for (auto [a, b] : edges()) out.emplace_back(name(a), name(b));
    return out;
  }

  // Kahn's algorithm with lexicographic tie-breaking on names.
  const std::vector<NodeId>& topological_order() const { return topo_; }
  int topo_rank(NodeId i) const { return rank_.at(i); }

  // Endogenous nodes with more than one exogenous parent.
  std::vector<std::string> non_quasi_markovian_nodes() const {
    std::vector<std::string> bad;
    for (NodeId v : endogenous()) {
      if ((parents_[v] & exogenous()).size() > 1) bad.push_back(name(v));
    }
    std::sort(bad.begin(), bad.end());
    return bad;
  }

  bool is_quasi_markovian() const {
    return non_quasi_markovian_nodes().empty();
  }

  void require_quasi_markovian() const {
    auto bad = non_quasi_markovian_nodes();
    if (bad.empty()) return;
    std::string msg = "graph is not quasi-Markovian; nodes with several "
                      "exogenous parents:";
    for (const auto& n : bad) msg += " " + n;
    throw InputError(msg);
  }

  // Ancestors of `s`, including `s` itself.
  NodeSet ancestors(NodeSet s) const {
    NodeSet result = s;
    std::vector<NodeId> stack = s.ids();
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId p : parents_[v]) {
        if (!result.contains(p)) {
          result.insert(p);
          stack.push_back(p);
        }
      }
    }
    return result;
  }

  // Descendants of `s`, including `s` itself.
  NodeSet descendants(NodeSet s) const {
    NodeSet result = s;
    std::vector<NodeId> stack = s.ids();
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId c : children_[v]) {
        if (!result.contains(c)) {
          result.insert(c);
          stack.push_back(c);
        }
      }
    }
    return result;
  }

  bool operator==(const CausalGraph& o) const {
    if (size() != o.size()) return false;
    for (NodeId i = 0; i < size(); ++i) {
      if (nodes_[i].name != o.nodes_[i].name ||
          nodes_[i].kind != o.nodes_[i].kind || parents_[i] != o.parents_[i]) {
        return false;
      }
    }
    return true;
  }

 private:
  void compute_topological_order() {
    std::vector<int> indegree(nodes_.size());
    using Entry = std::pair<std::string, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
    for (NodeId i = 0; i < size(); ++i) {
      indegree[i] = parents_[i].size();
      if (indegree[i] == 0) ready.emplace(nodes_[i].name, i);
    }
    topo_.clear();
    while (!ready.empty()) {
      NodeId v = ready.top().second;
      ready.pop();
      topo_.push_back(v);
      for (NodeId c : children_[v]) {
        if (--indegree[c] == 0) ready.emplace(nodes_[c].name, c);
      }
    }
    if (static_cast<int>(topo_.size()) != size()) {
      throw InputError("graph contains a directed cycle");
    }
    rank_.assign(nodes_.size(), 0);
    for (int r = 0; r < size(); ++r) rank_[topo_[r]] = r;
  }

  std::vector<Node> nodes_;
  std::map<std::string, NodeId> index_;
  std::vector<NodeSet> parents_;
  std::vector<NodeSet> children_;
  std::vector<NodeId> topo_;
  std::vector<int> rank_;
};

// Confounded component of a quasi-Markovian graph.
struct CComponent {
  NodeSet members;
  std::optional<NodeId> exogenous;
  // Members plus all their endogenous parents.
  NodeSet extended;
  // Members in topological order, each paired with the part of `extended`
  // that precedes it topologically.
  std::vector<std::pair<NodeId, NodeSet>> prefix;

  NodeSet prefix_of(NodeId v) const {
    for (const auto& [m, s] : prefix) {
      if (m == v) return s;
    }
    throw PreconditionError("node is not a member of the c-component");
  }
};

// Partition of the endogenous nodes into c-components: two endogenous nodes
// share a component iff they are connected through exogenous nodes only.
// Components are ordered by their topologically first member.
inline std::vector<CComponent> c_components(const CausalGraph& g) {
  const int n = g.size();
  std::vector<NodeId> root(n);
  for (NodeId i = 0; i < n; ++i) root[i] = i;
  auto find = [&](NodeId x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (NodeId u : g.exogenous()) {
    for (NodeId c : g.children(u)) root[find(c)] = find(u);
  }

  std::vector<CComponent> out;
  std::map<NodeId, std::size_t> slot;
  for (NodeId v : g.topological_order()) {
    if (!g.is_endogenous(v)) continue;
    NodeId r = find(v);
    auto [it, fresh] = slot.emplace(r, out.size());
    if (fresh) out.emplace_back();
    CComponent& c = out[it->second];
    c.members.insert(v);
    c.extended.insert(v);
    c.extended |= g.endogenous_parents(v);
    if (auto u = g.exogenous_parent(v)) c.exogenous = *u;
  }
  for (CComponent& c : out) {
    for (NodeId v : c.members.ids()) {
      NodeSet before;
      for (NodeId w : c.extended) {
        if (g.topo_rank(w) < g.topo_rank(v)) before.insert(w);
      }
      c.prefix.emplace_back(v, before);
    }
    std::sort(c.prefix.begin(), c.prefix.end(), [&](auto& a, auto& b) {
      return g.topo_rank(a.first) < g.topo_rank(b.first);
    });
  }
  return out;
}

// Component containing endogenous node `v`.
inline CComponent component_of(const CausalGraph& g, NodeId v) {
  for (CComponent& c : c_components(g)) {
    if (c.members.contains(v)) return c;
  }
  throw PreconditionError("node '" + g.name(v) + "' is not endogenous");
}

// Removes edges entering `remove_incoming` and edges leaving
// `remove_outgoing`. Node ids are preserved.
inline CausalGraph mutilate(const CausalGraph& g, NodeSet remove_incoming,
                            NodeSet remove_outgoing) {
  if (!(remove_incoming | remove_outgoing).subset_of(g.all())) {
    throw InputError("surgery names a node outside the graph");
  }
  std::vector<Edge> kept;
  for (auto [a, b] : g.edges()) {
    if (remove_incoming.contains(b) || remove_outgoing.contains(a)) continue;
    kept.emplace_back(g.name(a), g.name(b));
  }
  return CausalGraph(g.nodes(), kept);
}

inline CausalGraph mutilate(const CausalGraph& g,
                            const std::vector<std::string>& remove_incoming,
                            const std::vector<std::string>& remove_outgoing) {
  return mutilate(g, g.set_of(remove_incoming), g.set_of(remove_outgoing));
}

// d-separation of `a` and `b` given `s`, via the reachability ("Bayes ball")
// procedure over (node, direction) pairs.
inline bool d_separated(const CausalGraph& g, NodeSet a, NodeSet b,
                        NodeSet s) {
  if (a.intersects(b) || a.intersects(s) || b.intersects(s)) {
    throw PreconditionError("d-separation sets must be disjoint");
  }
  const NodeSet observed_anc = g.ancestors(s);
  // Direction: 0 = arrived from a child (moving up), 1 = from a parent.
  std::vector<char> visited(static_cast<std::size_t>(g.size()) * 2, 0);
  std::vector<std::pair<NodeId, int>> stack;
  for (NodeId x : a) stack.emplace_back(x, 0);
  while (!stack.empty()) {
    auto [v, dir] = stack.back();
    stack.pop_back();
    auto& seen = visited[static_cast<std::size_t>(v) * 2 + dir];
    if (seen) continue;
    seen = 1;
    if (b.contains(v)) return false;
    const bool in_s = s.contains(v);
    if (dir == 0 && !in_s) {
      for (NodeId p : g.parents(v)) stack.emplace_back(p, 0);
      for (NodeId c : g.children(v)) stack.emplace_back(c, 1);
    } else if (dir == 1) {
      if (!in_s) {
        for (NodeId c : g.children(v)) stack.emplace_back(c, 1);
      }
      if (observed_anc.contains(v)) {
        for (NodeId p : g.parents(v)) stack.emplace_back(p, 0);
      }
    }
  }
  return true;
}

// Graph with the exogenous parents of non-intervened c-components
// marginalized (each member V gains edges from its prefix set W_V) and with
// the incoming edges of intervened nodes removed.
inline CausalGraph intervened_semi_marginal(const CausalGraph& g,
                                            NodeSet intervened) {
  g.require_quasi_markovian();
  if (!intervened.subset_of(g.endogenous())) {
    throw PreconditionError("intervened nodes must be endogenous");
  }
  NodeSet dropped;
  std::vector<std::pair<NodeId, NodeId>> edges = g.edges();
  for (const CComponent& c : c_components(g)) {
    if (c.members.intersects(intervened)) continue;
    if (c.exogenous) dropped.insert(*c.exogenous);
    for (const auto& [v, before] : c.prefix) {
      for (NodeId w : before) edges.emplace_back(w, v);
    }
  }
  std::vector<Node> nodes;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (!dropped.contains(i)) nodes.push_back(g.node(i));
  }
  std::vector<Edge> named;
  for (auto [a, b] : edges) {
    if (dropped.contains(a) || intervened.contains(b)) continue;
    named.emplace_back(g.name(a), g.name(b));
  }
  return CausalGraph(std::move(nodes), named);
}

// Induced subgraph on the ancestors of `targets` (targets included).
// Node ids are renumbered; relative order is preserved.
inline CausalGraph ancestral_prune(const CausalGraph& g, NodeSet targets) {
  const NodeSet keep = g.ancestors(targets);
  std::vector<Node> nodes;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (keep.contains(i)) nodes.push_back(g.node(i));
  }
  std::vector<Edge> named;
  for (auto [a, b] : g.edges()) {
    if (keep.contains(a) && keep.contains(b)) {
      named.emplace_back(g.name(a), g.name(b));
    }
  }
  return CausalGraph(std::move(nodes), named);
}

// Subsets of `pool` in order of increasing size, ties broken by the sorted
// member names. Calls `f(NodeSet)` until it returns true; returns the
// accepted set.
template <typename F>
std::optional<NodeSet> first_subset_by_size(const CausalGraph& g, NodeSet pool,
                                            F&& f) {
  const std::vector<NodeId> order = g.sorted_by_name(pool);
  const int n = static_cast<int>(order.size());
  std::vector<int> pick;
  for (int k = 0; k <= n; ++k) {
    // Lexicographic k-combinations of positions in `order`.
    pick.resize(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      NodeSet s;
      for (int i : pick) s.insert(order[i]);
      if (f(s)) return s;
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return std::nullopt;
}

// Endogenous set W such that, with S = (W ∪ carried) \ {y, U} and U the
// exogenous parent of the intervened set x:
//   (i)  y is d-separated from x given S once x's outgoing edges are removed;
//   (ii) y is d-separated from U given S ∪ x.
// Candidates are the endogenous ancestors of carried ∪ {y} outside
// x ∪ carried ∪ {y}; the smallest qualifying set wins.
inline NodeSet find_c3_separator(const CausalGraph& g, NodeId y, NodeSet x,
                                 NodeSet carried) {
  if (x.empty()) throw PreconditionError("separator search needs x");
  std::optional<NodeId> u;
  for (NodeId xi : x) {
    if (auto p = g.exogenous_parent(xi)) u = *p;
  }
  const NodeSet exo_u = u ? NodeSet::single(*u) : NodeSet{};
  const CausalGraph cut = mutilate(g, NodeSet{}, x);
  NodeSet pool = g.ancestors(carried | NodeSet::single(y)) & g.endogenous();
  pool -= x | carried | NodeSet::single(y);

  auto accepts = [&](NodeSet w) {
    NodeSet s = (w | carried) - (NodeSet::single(y) | exo_u);
    if (s.intersects(x)) return false;
    if (!d_separated(cut, NodeSet::single(y), x, s)) return false;
    if (u && !d_separated(g, NodeSet::single(y), exo_u, s | x)) return false;
    return true;
  };
  auto found = first_subset_by_size(g, pool, accepts);
  if (!found) {
    throw PreconditionError("no separator exists for '" + g.name(y) + "'");
  }
  return *found;
}

}  // namespace qmb
