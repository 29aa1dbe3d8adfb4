#pragma once

// Builds the objective coefficients gamma(u) = P(y | do(x), U* = u) as a
// polynomial in the bits of the intervened component's exogenous value.
//
// Targets are processed one variable at a time, always picking a variable
// with no descendants among the remaining targets. Each step rewrites
// P(y_t | do(x)) in terms of P(y_{t+1} | do(x)):
//   C1a  exogenous target:            P(u, rest) = P(rest) P(u)
//   C1b  non-descendant of x:          P(y, rest) = P^(y | rest) P(rest)
//   C2   descendant in x's component:  sum_z [f_Y(pa) = y] P(rest, z)
//   C3   descendant elsewhere:         sum_z P^(y | x, s) P(rest, z)
// where P^ is the input distribution. The step equations are evaluated
// backwards with memoization over target assignments.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmb/canon.hpp"
#include "qmb/dist.hpp"
#include "qmb/error.hpp"
#include "qmb/graph.hpp"
#include "qmb/polynomial.hpp"

namespace qmb {

struct Literal {
  std::string name;
  int value = 1;

  bool operator==(const Literal&) const = default;
};

// P(target | do(intervention)).
struct InterventionalQuery {
  std::vector<Literal> target;
  std::vector<Literal> intervention;
};

inline Assignment to_assignment(const CausalGraph& g,
                                const std::vector<Literal>& lits) {
  Assignment a;
  for (const Literal& l : lits) {
    NodeId v = g.id(l.name);
    if (a.vars.contains(v) && a.value(v) != l.value) {
      throw InputError("conflicting values for '" + l.name + "'");
    }
    a.set(v, l.value);
  }
  return a;
}

enum class StepCase { C1a, C1b, C2, C3 };

inline const char* case_name(StepCase c) {
  switch (c) {
    case StepCase::C1a: return "C1a";
    case StepCase::C1b: return "C1b";
    case StepCase::C2: return "C2";
    case StepCase::C3: return "C3";
  }
  return "?";
}

struct DerivationStep {
  NodeId selected = 0;
  StepCase kind = StepCase::C1b;
  NodeSet targets;      // Y_t
  NodeSet next;         // Y_{t+1}
  NodeSet summed;       // Z_t
  NodeSet separator;    // W_t (C1b with exogenous carry, C3)
  NodeSet conditioning; // S_t for P^ factors
  std::string equation;
};

struct DerivationTrace {
  std::vector<DerivationStep> steps;

  std::string str() const {
    std::ostringstream os;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      os << "[" << case_name(steps[t].kind) << "] " << steps[t].equation
         << "\n";
    }
    return os.str();
  }
};

// Objective together with the pruned model it refers to.
struct Objective {
  CausalGraph graph;            // ancestral graph of the target
  EmpiricalDistribution dist;   // marginal of the input on `graph`
  Assignment intervention;      // surviving intervention, ids of `graph`
  Assignment target;            // ids of `graph`
  std::optional<CComponent> component;  // intervened c-component
  std::shared_ptr<const BitEncoding> encoding;
  BitPolynomial gamma;
  DerivationTrace trace;
  int zero_conditioning = 0;

  // True when gamma does not depend on the exogenous value.
  bool identified() const { return gamma.is_constant(); }
};

namespace detail {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

inline std::string join_values(const CausalGraph& g, NodeSet s) {
  std::string out;
  for (const auto& n : g.names_of(s)) {
    if (!out.empty()) out += ",";
    out += lower(n);
  }
  return out;
}

inline std::string prob_do(const CausalGraph& g, NodeSet s, NodeSet x) {
  if (s.empty()) return "1";
  return "P(" + join_values(g, s) + "|do(" + join_values(g, x) + "))";
}

inline std::string hat(const CausalGraph& g, NodeId y, NodeSet given) {
  std::string s = "P^(" + lower(g.name(y));
  if (!given.empty()) s += "|" + join_values(g, given);
  return s + ")";
}

inline std::string sum_over(const CausalGraph& g, NodeSet z) {
  if (z.empty()) return "";
  return "sum_{" + join_values(g, z) + "} ";
}

inline std::string bracket(const CausalGraph& g, NodeId y) {
  std::string args;
  for (NodeId p : g.sorted_by_name(g.endogenous_parents(y))) {
    if (!args.empty()) args += ",";
    args += lower(g.name(p));
  }
  if (auto u = g.exogenous_parent(y)) {
    if (!args.empty()) args += ",";
    args += lower(g.name(*u));
  }
  return "[f_" + g.name(y) + "(" + args + ")=" + lower(g.name(y)) + "]";
}

// Picks the next target: among members with no descendants in the target
// set, prefer descendants of x, then endogenous nodes, then the largest
// topological position.
inline NodeId select_target(const CausalGraph& g, NodeSet targets,
                            NodeSet x_descendants) {
  std::optional<NodeId> best;
  auto key = [&](NodeId v) {
    return std::tuple(x_descendants.contains(v), g.is_endogenous(v),
                      g.topo_rank(v));
  };
  for (NodeId v : targets) {
    NodeSet below = g.descendants(NodeSet::single(v)) - NodeSet::single(v);
    if (below.intersects(targets)) continue;
    if (!best || key(v) > key(*best)) best = v;
  }
  return *best;
}

}  // namespace detail

// Derivation steps for `target` under the intervention `x`, without
// evaluating them. `component` is x's c-component.
inline DerivationTrace plan_derivation(const CausalGraph& g, NodeSet target,
                                       NodeSet x,
                                       const CComponent& component) {
  using detail::bracket;
  using detail::hat;
  using detail::prob_do;
  using detail::sum_over;

  DerivationTrace trace;
  const NodeSet desc = g.descendants(x) - x;
  const std::optional<NodeId> u_star = component.exogenous;
  const NodeSet u_set = u_star ? NodeSet::single(*u_star) : NodeSet{};

  NodeSet current = target;
  while (!current.empty()) {
    DerivationStep step;
    const NodeId y = detail::select_target(g, current, desc);
    const NodeSet ys = NodeSet::single(y);
    const NodeSet carried = current - ys;
    step.selected = y;
    step.targets = current;

    if (g.is_exogenous(y)) {
      if (!u_set.contains(y)) {
        throw PreconditionError("unexpected exogenous target '" + g.name(y) +
                                "'");
      }
      step.kind = StepCase::C1a;
      step.next = carried;
      step.equation = prob_do(g, current, x) + " = " +
                      (carried.empty() ? "" : prob_do(g, carried, x) + " ") +
                      "P(" + detail::lower(g.name(y)) + ")";
    } else if (component.members.contains(y) &&
               (desc.contains(y) || carried.intersects(u_set))) {
      // Mechanism expansion; applies to members that depend on x and to
      // members whose exogenous value is already part of the carried set.
      step.kind = StepCase::C2;
      step.summed = g.parents(y) - (current | x);
      step.next = carried | step.summed;
      step.equation = prob_do(g, current, x) + " = " +
                      sum_over(g, step.summed) + bracket(g, y) + " " +
                      prob_do(g, step.next, x);
    } else if (desc.contains(y)) {
      step.kind = StepCase::C3;
      step.separator = find_c3_separator(g, y, x, carried);
      step.conditioning = (step.separator | carried) - (ys | u_set);
      step.summed = step.separator - current;
      step.next = carried | step.summed;
      step.equation = prob_do(g, current, x) + " = " +
                      sum_over(g, step.summed) +
                      hat(g, y, x | step.conditioning) + " " +
                      prob_do(g, step.next, x);
    } else {
      step.kind = StepCase::C1b;
      if (carried.intersects(u_set)) {
        // The carried exogenous value must be separated from y before the
        // conditional can be read off the input distribution.
        NodeSet pool = g.ancestors(current) & g.endogenous();
        pool -= x | current;
        auto accepts = [&](NodeSet w) {
          NodeSet s = (w | carried) - u_set;
          return d_separated(g, ys, u_set, s);
        };
        auto found = first_subset_by_size(g, pool, accepts);
        if (!found) {
          throw PreconditionError("no separator exists for '" + g.name(y) +
                                  "'");
        }
        step.separator = *found;
      }
      step.conditioning = (step.separator | carried) - u_set;
      step.summed = step.separator - current;
      step.next = carried | step.summed;
      step.equation = prob_do(g, current, x) + " = " +
                      sum_over(g, step.summed) + hat(g, y, step.conditioning) +
                      " " + prob_do(g, step.next, x);
    }
    trace.steps.push_back(step);
    current = step.next;
  }
  return trace;
}

namespace detail {

class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const CausalGraph& g, const DistributionView& view,
                     const DerivationTrace& trace, const Assignment& x,
                     std::shared_ptr<const BitEncoding> enc)
      : g_(g), view_(view), trace_(trace), x_(x), enc_(std::move(enc)),
        memo_(trace.steps.size()) {}

  BitPolynomial value(std::size_t t, const Assignment& e) {
    if (t == trace_.steps.size()) return BitPolynomial::constant(1.0, enc_);
    auto& memo = memo_[t];
    if (auto it = memo.find(e.values); it != memo.end()) return it->second;

    const DerivationStep& s = trace_.steps[t];
    const NodeSet endo = g_.endogenous();
    const NodeSet next_endo = s.next & endo;
    BitPolynomial total(enc_);
    for_each_assignment(s.summed & endo, [&](const Assignment& z) {
      const Assignment full = e.merged(z).merged(x_);
      BitPolynomial rest = value(t + 1, full.restricted(next_endo));
      switch (s.kind) {
        case StepCase::C1a:
          total.add(rest);
          break;
        case StepCase::C2:
          total.add(rest.times(
              enc_->literal(s.selected, full, full.value(s.selected))));
          break;
        case StepCase::C1b:
        case StepCase::C3: {
          Assignment event;
          event.set(s.selected, full.value(s.selected));
          NodeSet cond = s.conditioning;
          if (s.kind == StepCase::C3) cond |= x_.vars;
          Conditional c = view_.conditional(event, full.restricted(cond));
          if (c.zero_conditioning) ++zero_conditioning;
          if (c.value != 0.0) total.add(rest, c.value);
          break;
        }
      }
    });
    total.canonicalize();
    memo.emplace(e.values, total);
    return total;
  }

  int zero_conditioning = 0;

 private:
  const CausalGraph& g_;
  const DistributionView& view_;
  const DerivationTrace& trace_;
  Assignment x_;
  std::shared_ptr<const BitEncoding> enc_;
  std::vector<std::map<std::uint64_t, BitPolynomial>> memo_;
};

}  // namespace detail

// Builds gamma for P(target | do(intervention)). The graph is first pruned to
// the ancestors of the target; intervened variables that are not ancestors
// of the target are dropped. All surviving intervened variables must share
// one c-component.
inline Objective build_objective(const CausalGraph& graph,
                                 const EmpiricalDistribution& dist,
                                 const InterventionalQuery& query) {
  graph.require_quasi_markovian();
  if (query.target.empty()) throw InputError("query has no target");
  const Assignment y_full = to_assignment(graph, query.target);
  const Assignment x_full = to_assignment(graph, query.intervention);
  if (!(y_full.vars | x_full.vars).subset_of(graph.endogenous())) {
    throw InputError("queries may only mention endogenous variables");
  }
  if (y_full.vars.intersects(x_full.vars)) {
    throw InputError("target and intervention overlap");
  }

  Objective obj;
  obj.graph = ancestral_prune(graph, y_full.vars);
  const CausalGraph& g = obj.graph;
  obj.dist = dist.marginal(g.names_of(g.endogenous()));
  for (const Literal& l : query.target) obj.target.set(g.id(l.name), l.value);
  for (const Literal& l : query.intervention) {
    if (auto v = g.find(l.name)) obj.intervention.set(*v, l.value);
  }
  const NodeSet x = obj.intervention.vars;
  const DistributionView view(g, obj.dist);

  if (x.empty()) {
    // No intervened variable is an ancestor of the target.
    Conditional c = view.conditional(obj.target, Assignment{});
    obj.gamma = BitPolynomial::constant(c.value, nullptr);
    DerivationStep s;
    s.kind = StepCase::C1b;
    s.targets = obj.target.vars;
    s.equation = detail::prob_do(g, obj.target.vars, NodeSet{}) + " = P^(" +
                 detail::join_values(g, obj.target.vars) + ")";
    obj.trace.steps.push_back(s);
    return obj;
  }

  std::optional<CComponent> comp;
  for (const CComponent& c : c_components(g)) {
    if (!c.members.intersects(x)) continue;
    if (comp) {
      throw PreconditionError(
          "intervened variables span several c-components");
    }
    comp = c;
  }
  obj.component = comp;
  if (comp->exogenous) {
    obj.encoding = std::make_shared<const BitEncoding>(g, *comp);
  }
  obj.trace = plan_derivation(g, obj.target.vars, x, *comp);
  detail::ObjectiveEvaluator eval(g, view, obj.trace, obj.intervention,
                                  obj.encoding);
  obj.gamma = eval.value(0, obj.target);
  obj.zero_conditioning = eval.zero_conditioning;
  return obj;
}

}  // namespace qmb
