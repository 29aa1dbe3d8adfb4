#pragma once

// Optimization programs over the exogenous value of the intervened
// c-component: constraint rows, the enumerated LP, the pricing program for
// column generation and the monolithic integer program.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <iomanip>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qmb/canon.hpp"
#include "qmb/dist.hpp"
#include "qmb/error.hpp"
#include "qmb/graph.hpp"
#include "qmb/lp.hpp"
#include "qmb/objective.hpp"
#include "qmb/polynomial.hpp"

namespace qmb {

enum class Sense { minimize, maximize };

inline double sense_sign(Sense s) { return s == Sense::minimize ? 1.0 : -1.0; }

inline constexpr std::uint64_t kDefaultColumnLimit = std::uint64_t{1} << 22;

// Rows of the observational constraints: one per configuration of the
// extended component W*, plus a trailing normalization row.
struct ConstraintSystem {
  std::shared_ptr<const BitEncoding> encoding;
  CComponent component;
  // W* in name order; the first variable is the most significant bit of the
  // row index.
  std::vector<NodeId> row_vars;
  std::vector<std::string> row_names;
  std::vector<Assignment> configurations;
  std::vector<ColumnEntry> entries;
  std::vector<MaskedProduct> masks;  // filled when the layout fits a word
  std::vector<double> rhs;           // configurations + normalization
  std::vector<char> zero_conditioning_row;
  int zero_conditioning = 0;

  int num_rows() const { return static_cast<int>(rhs.size()); }
  int num_configurations() const {
    return static_cast<int>(configurations.size());
  }
  int normalization_row() const { return num_configurations(); }
  int total_bits() const { return encoding->total_bits(); }

  // Row label such as "wxz=011".
  std::string row_label(int r) const {
    if (r == normalization_row()) return "norm";
    std::string names, values;
    for (std::size_t k = 0; k < row_names.size(); ++k) {
      names += detail::lower(row_names[k]);
      values += configurations[r].value(row_vars[k]) ? '1' : '0';
    }
    return names + "=" + values;
  }

  // Rows where column u has entry 1, normalization row included.
  std::vector<int> column_rows(std::uint64_t u) const {
    std::vector<int> out;
    if (!masks.empty()) {
      for (int r = 0; r < num_configurations(); ++r) {
        if (masks[r].eval(u)) out.push_back(r);
      }
      out.push_back(normalization_row());
      return out;
    }
    return column_rows(BitString::from_index(u, total_bits()));
  }

  std::vector<int> column_rows(const BitString& u) const {
    std::vector<int> out;
    for (int r = 0; r < num_configurations(); ++r) {
      if (eval_entry(*encoding, entries[r], u)) out.push_back(r);
    }
    out.push_back(normalization_row());
    return out;
  }

  // Dense 0/1 column, normalization row included.
  std::vector<int> column(const BitString& u) const {
    std::vector<int> col(num_rows(), 0);
    for (int r : column_rows(u)) col[r] = 1;
    return col;
  }
};

// q_w = prod_{V in C*} P^(v | w_V).
inline ConstraintSystem build_constraints(
    const CausalGraph& g, const EmpiricalDistribution& d,
    const CComponent& c, std::shared_ptr<const BitEncoding> enc) {
  if (!enc) throw PreconditionError("component has no exogenous parent");
  const DistributionView view(g, d);
  ConstraintSystem cs;
  cs.encoding = std::move(enc);
  cs.component = c;
  cs.row_vars = g.sorted_by_name(c.extended);
  for (NodeId v : cs.row_vars) cs.row_names.push_back(g.name(v));
  const int n = static_cast<int>(cs.row_vars.size());
  if (n > 30) throw SizeLimitError("too many constraint rows");
  const std::size_t count = std::size_t{1} << n;
  const bool word = cs.encoding->total_bits() <= 63;
  for (std::size_t r = 0; r < count; ++r) {
    Assignment w;
    for (int k = 0; k < n; ++k) {
      w.set(cs.row_vars[k], static_cast<int>((r >> (n - 1 - k)) & 1U));
    }
    double q = 1.0;
    bool zero = false;
    for (const auto& [v, prefix] : c.prefix) {
      Assignment ev;
      ev.set(v, w.value(v));
      Conditional p = view.conditional(ev, w.restricted(prefix));
      zero = zero || p.zero_conditioning;
      q *= p.value;
    }
    cs.configurations.push_back(w);
    cs.entries.push_back(symbolic_column_entry(*cs.encoding, w));
    if (word) {
      cs.masks.push_back(masked(*cs.encoding, cs.entries.back().literals()));
    }
    cs.rhs.push_back(q);
    cs.zero_conditioning_row.push_back(zero ? 1 : 0);
    cs.zero_conditioning += zero ? 1 : 0;
  }
  cs.rhs.push_back(1.0);
  cs.zero_conditioning_row.push_back(0);
  return cs;
}

inline ConstraintSystem build_constraints(const Objective& obj) {
  if (!obj.component) throw PreconditionError("objective has no component");
  return build_constraints(obj.graph, obj.dist, *obj.component, obj.encoding);
}

// Enumerated LP: one column per exogenous value. The model minimizes
// sign * gamma, so maximization runs report -objective.
struct LinearProgramSpec {
  Sense sense = Sense::minimize;
  LpModel model;
  std::vector<std::uint64_t> column_u;
  std::vector<double> gamma;  // unsigned objective coefficients

  int num_columns() const { return static_cast<int>(column_u.size()); }
};

inline LinearProgramSpec build_direct_lp(
    const ConstraintSystem& cs, const BitPolynomial& gamma, Sense sense,
    std::uint64_t column_limit = kDefaultColumnLimit,
    bool include_normalization = true) {
  const int bits = cs.total_bits();
  if (bits > 62 || (std::uint64_t{1} << bits) > column_limit) {
    throw SizeLimitError("direct LP needs 2^" + std::to_string(bits) +
                         " columns, above the enumeration limit; use column "
                         "generation");
  }
  LinearProgramSpec spec;
  spec.sense = sense;
  const int rows = include_normalization ? cs.num_rows()
                                         : cs.num_configurations();
  for (int r = 0; r < rows; ++r) spec.model.add_row(RowSense::equal, cs.rhs[r]);
  const MaskedPolynomial g(gamma);
  const double sign = sense_sign(sense);
  const std::uint64_t n = std::uint64_t{1} << bits;
  spec.column_u.reserve(n);
  spec.gamma.reserve(n);
  std::vector<int> idx;
  std::vector<double> ones;
  for (std::uint64_t u = 0; u < n; ++u) {
    idx = cs.column_rows(u);
    if (!include_normalization) idx.pop_back();
    ones.assign(idx.size(), 1.0);
    const double c = g.eval(u);
    spec.model.add_column(sign * c, 0.0, kInf, idx, ones);
    spec.column_u.push_back(u);
    spec.gamma.push_back(c);
  }
  return spec;
}

enum class VarType { binary, continuous };

struct IpVariable {
  std::string name;
  VarType type = VarType::continuous;
  double lower = 0.0;
  double upper = 1.0;
};

struct LinearExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinearExpr& add(int var, double c) {
    if (c != 0.0) terms.emplace_back(var, c);
    return *this;
  }
  LinearExpr& add(const LinearExpr& o, double w = 1.0) {
    for (auto [v, c] : o.terms) add(v, w * c);
    constant += w * o.constant;
    return *this;
  }
  double eval(const std::vector<double>& x) const {
    double s = constant;
    for (auto [v, c] : terms) s += c * x[v];
    return s;
  }
};

struct IpConstraint {
  std::string name;
  LinearExpr expr;  // constant part is moved to the right-hand side
  RowSense sense = RowSense::less_equal;
  double rhs = 0.0;
  // Implied by the other rows; solvers may leave it out of relaxations.
  bool implied = false;
};

// Variable standing for a product of bit literals of one copy.
struct ProductVar {
  int var = -1;
  int copy = 0;
  std::vector<BitLiteral> literals;
};

// Linear program with binary and continuous variables; minimizes
// `objective`.
struct IntegerProgramSpec {
  std::vector<IpVariable> vars;
  std::vector<IpConstraint> constraints;
  LinearExpr objective;

  // Bookkeeping for programs built over an encoding.
  std::vector<std::vector<int>> bit_vars;    // per copy, per bit position
  std::vector<std::vector<int>> entry_vars;  // per copy, per configuration
  std::vector<int> weight_vars;              // per copy (single program)
  std::vector<LinearExpr> gamma_forms;       // per copy, linearized gamma
  std::vector<ProductVar> products;
  // alpha = factor * weight, one per linearized bilinear product.
  struct WeightedProduct {
    int var = -1;
    LinearExpr factor;
    int weight = -1;
  };
  std::vector<WeightedProduct> weighted_products;

  int add_var(std::string name, VarType t, double lo = 0.0, double hi = 1.0) {
    vars.push_back({std::move(name), t, lo, hi});
    return static_cast<int>(vars.size()) - 1;
  }

  // expr (sense) rhs
  void add_constraint(std::string name, LinearExpr expr, RowSense s,
                      double rhs, bool implied = false) {
    rhs -= expr.constant;
    expr.constant = 0.0;
    constraints.push_back({std::move(name), std::move(expr), s, rhs, implied});
  }

  bool is_binary(int v) const { return vars[v].type == VarType::binary; }

  // Largest violation of a bound, an integrality requirement or a row.
  double violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int v = 0; v < num_vars(); ++v) {
      worst = std::max({worst, vars[v].lower - x[v], x[v] - vars[v].upper});
      if (is_binary(v)) worst = std::max(worst, std::abs(x[v] - std::round(x[v])));
    }
    for (const IpConstraint& c : constraints) {
      const double lhs = c.expr.eval(x);
      if (c.sense != RowSense::greater_equal) worst = std::max(worst, lhs - c.rhs);
      if (c.sense != RowSense::less_equal) worst = std::max(worst, c.rhs - lhs);
    }
    return worst;
  }
  int num_vars() const { return static_cast<int>(vars.size()); }

  LpModel relaxation(bool skip_implied = false) const {
    LpModel m;
    std::vector<std::vector<std::pair<int, double>>> cols(vars.size());
    for (const auto& c : constraints) {
      if (skip_implied && c.implied) continue;
      const int r = m.add_row(c.sense, c.rhs);
      for (auto [v, a] : c.expr.terms) cols[v].emplace_back(r, a);
    }
    std::vector<double> cost(vars.size(), 0.0);
    for (auto [v, c] : objective.terms) cost[v] += c;
    std::vector<int> rows;
    std::vector<double> vals;
    for (std::size_t v = 0; v < vars.size(); ++v) {
      rows.clear();
      vals.clear();
      std::sort(cols[v].begin(), cols[v].end());
      for (auto [r, c] : cols[v]) {
        if (!rows.empty() && rows.back() == r) {
          vals.back() += c;
        } else {
          rows.push_back(r);
          vals.push_back(c);
        }
      }
      m.add_column(cost[v], vars[v].lower, vars[v].upper, rows, vals);
    }
    return m;
  }

  // CPLEX LP-format text.
  std::string to_lp_format() const {
    std::ostringstream os;
    os << std::setprecision(17);
    auto write = [&](const LinearExpr& e) {
      bool first = true;
      for (auto [v, c] : e.terms) {
        if (c < 0) {
          os << (first ? "- " : " - ") << -c << " " << vars[v].name;
        } else {
          os << (first ? "" : " + ") << c << " " << vars[v].name;
        }
        first = false;
      }
      if (first) os << "0 " << (vars.empty() ? "x" : vars[0].name);
    };
    os << "\\ objective constant " << objective.constant << "\n";
    os << "Minimize\n obj: ";
    write(objective);
    os << "\nSubject To\n";
    for (const auto& c : constraints) {
      os << " " << c.name << ": ";
      write(c.expr);
      os << (c.sense == RowSense::equal          ? " = "
             : c.sense == RowSense::less_equal ? " <= "
                                               : " >= ")
         << c.rhs << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : vars) {
      os << " " << v.lower << " <= " << v.name << " <= ";
      if (v.upper == kInf) {
        os << "+inf\n";
      } else {
        os << v.upper << "\n";
      }
    }
    os << "Binary\n";
    for (const auto& v : vars) {
      if (v.type == VarType::binary) os << " " << v.name << "\n";
    }
    os << "End\n";
    return os.str();
  }
};

inline std::string lp_format(const LinearProgramSpec& s) {
  std::ostringstream os;
  os << std::setprecision(17) << "Minimize\n obj:";
  for (int j = 0; j < s.num_columns(); ++j) {
    os << " + " << s.model.cost[j] << " p" << s.column_u[j];
  }
  os << "\nSubject To\n";
  for (int r = 0; r < s.model.num_rows(); ++r) {
    os << " r" << r << ":";
    for (int j = 0; j < s.num_columns(); ++j) {
      for (std::size_t p = s.model.col_start[j]; p < s.model.col_start[j + 1];
           ++p) {
        if (s.model.row_index[p] == r) os << " + p" << s.column_u[j];
      }
    }
    os << " = " << s.model.rhs[r] << "\n";
  }
  os << "End\n";
  return os.str();
}

namespace detail {

inline LinearExpr literal_expr(int var, bool positive) {
  LinearExpr e;
  if (positive) {
    e.add(var, 1.0);
  } else {
    e.constant = 1.0;
    e.add(var, -1.0);
  }
  return e;
}

// z = prod(lits): z <= l_i for each literal, z >= sum(l_i) - (k - 1).
inline void add_product_constraints(IntegerProgramSpec& ip, int z,
                                    const std::vector<LinearExpr>& lits,
                                    const std::string& tag,
                                    bool implied = false) {
  LinearExpr lower;
  lower.add(z, 1.0);
  for (std::size_t i = 0; i < lits.size(); ++i) {
    LinearExpr up;
    up.add(z, 1.0).add(lits[i], -1.0);
    ip.add_constraint(tag + "_u" + std::to_string(i), up,
                      RowSense::less_equal, 0.0, implied);
    lower.add(lits[i], -1.0);
  }
  ip.add_constraint(tag + "_l", lower, RowSense::greater_equal,
                    1.0 - static_cast<double>(lits.size()), implied);
}

// For a fixed context of the parents outside the component, the members'
// mechanisms form a decision tree over the members in topological order:
// the product of the literals along a path prefix splits into the products
// for its two extensions. Leaves are the column entries. These equalities
// hold at every integer point and tighten the relaxation; together with
// 0 <= t <= 1 they imply the product rows of every variable on the tree.
// Returns the tree's product variables keyed by literal set.
inline std::map<std::vector<BitLiteral>, int> add_tree_rows(IntegerProgramSpec& ip, const ConstraintSystem& cs,
                          const std::vector<int>& bits,
                          const std::vector<int>& entries,
                          const std::string& suffix) {
  const BitEncoding& enc = *cs.encoding;
  std::vector<NodeId> order;
  for (const auto& pr : cs.component.prefix) order.push_back(pr.first);
  std::map<std::vector<BitLiteral>, int> product;
  for (int r = 0; r < cs.num_configurations(); ++r) {
    product.emplace(cs.entries[r].literals(), entries[r]);
  }
  std::set<std::vector<int>> seen;
  int fresh = 0;
  auto var_for = [&](const std::vector<BitLiteral>& lits) {
    auto it = product.find(lits);
    if (it != product.end()) return it->second;
    const std::string name = "t" + std::to_string(fresh++) + suffix;
    const int t = ip.add_var(name, VarType::continuous);
    std::vector<LinearExpr> ls;
    for (const BitLiteral& l : lits) {
      ls.push_back(literal_expr(bits[enc.position(l)], l.positive));
    }
    add_product_constraints(ip, t, ls, name, true);
    ip.products.push_back({t, static_cast<int>(ip.bit_vars.size()), lits});
    product.emplace(lits, t);
    return t;
  };
  const NodeSet outside = cs.component.extended - cs.component.members;
  std::function<void(std::size_t, const Assignment&,
                     const std::vector<BitLiteral>&, int)>
      expand = [&](std::size_t level, const Assignment& a,
                   const std::vector<BitLiteral>& lits, int parent) {
        if (level == order.size()) return;
        const NodeId v = order[level];
        const int block = enc.block_of(v);
        const int j = enc.configuration(block, a);
        int child[2];
        std::vector<BitLiteral> next[2];
        for (int val = 0; val < 2; ++val) {
          next[val] = lits;
          BitLiteral l{block, j, val == 1};
          next[val].insert(
              std::upper_bound(next[val].begin(), next[val].end(), l), l);
          child[val] = var_for(next[val]);
        }
        if (seen.insert({parent, child[0], child[1]}).second) {
          LinearExpr e;
          e.add(child[0], 1.0).add(child[1], 1.0);
          if (parent >= 0) e.add(parent, -1.0);
          const std::string tag = "tree" + std::to_string(seen.size());
          ip.add_constraint(tag + suffix, e, RowSense::equal,
                            parent >= 0 ? 0.0 : 1.0);
          for (int val = 0; val < 2; ++val) {
            LinearExpr cap;
            cap.add(child[val], 1.0)
                .add(literal_expr(bits[enc.position({block, j, val == 1})],
                                  val == 1),
                     -1.0);
            ip.add_constraint(tag + "_" + std::to_string(val) + suffix, cap,
                              RowSense::less_equal, 0.0);
          }
        }
        for (int val = 0; val < 2; ++val) {
          expand(level + 1, a.with(v, val), next[val], child[val]);
        }
      };
  for_each_assignment(outside, [&](const Assignment& e) {
    expand(0, e, {}, -1);
  });
  return product;
}

// Bits, column entries and gamma products for one copy of the exogenous
// value. Returns the linear form of gamma over the copy's variables.
inline LinearExpr add_copy(IntegerProgramSpec& ip, const ConstraintSystem& cs,
                           const BitPolynomial& gamma,
                           const std::string& suffix, bool tree_rows) {
  const BitEncoding& enc = *cs.encoding;
  const int copy = static_cast<int>(ip.bit_vars.size());
  std::vector<int> bits(enc.total_bits());
  for (int b = 0; b < enc.num_blocks(); ++b) {
    for (int j = 0; j < enc.block(b).width; ++j) {
      const int pos = enc.block(b).offset + j;
      bits[pos] = ip.add_var("b" + std::to_string(b + 1) + "_" +
                                 std::to_string(j) + suffix,
                             VarType::binary);
    }
  }
  auto lit = [&](const BitLiteral& l) {
    return literal_expr(bits[enc.position(l)], l.positive);
  };

  std::vector<int> entries;
  const std::size_t first_entry_row = ip.constraints.size();
  for (int r = 0; r < cs.num_configurations(); ++r) {
    const std::string name = "a" + std::to_string(r) + suffix;
    const int a = ip.add_var(name, VarType::binary);
    std::vector<LinearExpr> ls;
    for (const BitLiteral& l : cs.entries[r].literals()) ls.push_back(lit(l));
    add_product_constraints(ip, a, ls, name);
    ip.products.push_back({a, copy, cs.entries[r].literals()});
    entries.push_back(a);
  }

  std::map<std::vector<BitLiteral>, int> tree;
  if (tree_rows) {
    for (std::size_t c = first_entry_row; c < ip.constraints.size(); ++c) {
      ip.constraints[c].implied = true;
    }
    tree = add_tree_rows(ip, cs, bits, entries, suffix);
  }

  LinearExpr g;
  int beta = 0;
  for (const Term& t : gamma.terms()) {
    if (t.literals.empty()) {
      g.constant += t.coefficient;
    } else if (t.literals.size() == 1) {
      g.add(lit(t.literals[0]), t.coefficient);
    } else {
      const std::string name = "beta" + std::to_string(beta++) + suffix;
      const int z = ip.add_var(name, VarType::binary);
      std::vector<LinearExpr> ls;
      for (const BitLiteral& l : t.literals) ls.push_back(lit(l));
      std::vector<BitLiteral> key = t.literals;
      std::sort(key.begin(), key.end());
      const auto on_tree = tree.find(key);
      add_product_constraints(ip, z, ls, name, on_tree != tree.end());
      ip.products.push_back({z, copy, t.literals});
      if (on_tree != tree.end()) {
        LinearExpr same;
        same.add(z, 1.0).add(on_tree->second, -1.0);
        ip.add_constraint(name + "_t", same, RowSense::equal, 0.0);
      }
      g.add(z, t.coefficient);
    }
  }
  ip.bit_vars.push_back(std::move(bits));
  ip.entry_vars.push_back(std::move(entries));
  return g;
}

}  // namespace detail

// sign*gamma - sum_w d_w a_w - d_norm over the first copy of `ip`.
inline LinearExpr pricing_objective(const IntegerProgramSpec& ip,
                                    const ConstraintSystem& cs,
                                    const std::vector<double>& duals,
                                    Sense sense) {
  LinearExpr obj;
  obj.add(ip.gamma_forms.at(0), sense_sign(sense));
  for (int r = 0; r < cs.num_configurations(); ++r) {
    obj.add(ip.entry_vars[0][r], -duals[r]);
  }
  obj.constant -= duals[cs.normalization_row()];
  return obj;
}

// Pricing program: minimize sign*gamma(b) - sum_w d_w a_w. The normalization
// dual enters as a constant since every column has a 1 there.
inline IntegerProgramSpec build_pricing_milp(const ConstraintSystem& cs,
                                             const BitPolynomial& gamma,
                                             const std::vector<double>& duals,
                                             Sense sense,
                                             bool tree_rows = true) {
  if (static_cast<int>(duals.size()) != cs.num_rows()) {
    throw PreconditionError("dual vector does not match the row count");
  }
  IntegerProgramSpec ip;
  ip.gamma_forms.push_back(detail::add_copy(ip, cs, gamma, "", tree_rows));
  ip.objective = pricing_objective(ip, cs, duals, sense);
  return ip;
}

// alpha = m * p for a binary expression m and p in [0,1]:
// 0 <= alpha <= m, p + m - 1 <= alpha <= p.
inline int add_weighted_product(IntegerProgramSpec& ip, const LinearExpr& m,
                                int p, const std::string& name) {
  const int alpha = ip.add_var(name, VarType::continuous, 0.0, 1.0);
  ip.weighted_products.push_back({alpha, m, p});
  LinearExpr e1;
  e1.add(alpha, 1.0).add(m, -1.0);
  ip.add_constraint(name + "_m", e1, RowSense::less_equal, 0.0);
  LinearExpr e2;
  e2.add(alpha, 1.0).add(p, -1.0);
  ip.add_constraint(name + "_p", e2, RowSense::less_equal, 0.0);
  LinearExpr e3;
  e3.add(alpha, 1.0).add(p, -1.0).add(m, -1.0);
  ip.add_constraint(name + "_l", e3, RowSense::greater_equal, -1.0);
  return alpha;
}

// Monolithic program with one copy of the exogenous bits per row
// (configurations plus normalization) and a weight per copy.
inline IntegerProgramSpec build_single_milp(const ConstraintSystem& cs,
                                            const BitPolynomial& gamma,
                                            Sense sense,
                                            bool tree_rows = true,
                                            int max_variables = 200000) {
  const int copies = cs.num_rows();
  IntegerProgramSpec ip;
  std::vector<LinearExpr> row_sum(cs.num_rows());
  const double sign = sense_sign(sense);
  for (int k = 0; k < copies; ++k) {
    const std::string suffix = "_" + std::to_string(k);
    LinearExpr g = detail::add_copy(ip, cs, gamma, suffix, tree_rows);
    ip.gamma_forms.push_back(g);
    const int p = ip.add_var("p" + suffix, VarType::continuous, 0.0, 1.0);
    ip.weight_vars.push_back(p);
    for (int r = 0; r < cs.num_configurations(); ++r) {
      LinearExpr m;
      m.add(ip.entry_vars[k][r], 1.0);
      row_sum[r].add(add_weighted_product(
                         ip, m, p,
                         "alpha_a" + std::to_string(r) + suffix),
                     1.0);
    }
    row_sum[cs.normalization_row()].add(p, 1.0);
    // gamma * p: the constant part is linear in p; every other part of the
    // linear form is a binary expression times p.
    ip.objective.add(p, sign * g.constant);
    int t = 0;
    for (auto [v, c] : g.terms) {
      LinearExpr m;
      m.add(v, 1.0);
      const int alpha = add_weighted_product(
          ip, m, p, "alpha_g" + std::to_string(t++) + suffix);
      ip.objective.add(alpha, sign * c);
    }
    if (ip.num_vars() > max_variables) {
      throw SizeLimitError("single integer program exceeds the size limit");
    }
  }
  for (int r = 0; r < cs.num_rows(); ++r) {
    ip.add_constraint("row" + std::to_string(r), row_sum[r], RowSense::equal,
                      cs.rhs[r]);
  }
  return ip;
}

}  // namespace qmb
