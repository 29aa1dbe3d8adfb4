#pragma once

// Branch and bound over binary variables, the column-generation driver and
// the lower/upper bound dispatcher.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmb/lp.hpp"
#include "qmb/lpform.hpp"
#include "qmb/objective.hpp"

namespace qmb {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct MilpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = kInf;
  std::vector<double> x;
  long nodes = 0;
  long lp_iterations = 0;
};

struct MilpOptions {
  double integrality_tol = 1e-7;
  // Nodes whose relaxation is within this of the incumbent are pruned.
  double prune_tol = 1e-12;
  long max_nodes = 50'000'000;
  std::optional<Clock::time_point> deadline;
  SimplexOptions lp;
  // Stop as soon as an integer solution with objective below this is known.
  std::optional<double> stop_below;
  // Known upper bound on the optimum (nodes must beat it).
  std::optional<double> cutoff;
  // Maps a relaxation solution to an integer-feasible point with its
  // objective, or nothing.
  std::function<std::optional<std::pair<double, std::vector<double>>>(
      const std::vector<double>&)>
      heuristic;
  // Binaries tried first when choosing a branching variable; the most
  // fractional of them is taken. Other binaries are branched on only when
  // all of these are integral.
  std::vector<int> branch_first;
};

// Depth-first branch and bound; branches on the most fractional preferred
// binary (else the lowest-index fractional one), exploring the 1-branch
// first. Child relaxations warm-start from the parent basis with the dual
// simplex. The relaxation is kept between solves,
// so re-solving after an objective change starts from the last root basis.
class MilpSolver {
 public:
  explicit MilpSolver(const IntegerProgramSpec& ip, MilpOptions opt = {})
      : opt_(std::move(opt)), lp_(ip.relaxation(true), lp_options(opt_)),
        constant_(ip.objective.constant) {
    for (int v = 0; v < ip.num_vars(); ++v) {
      lower_.push_back(ip.vars[v].lower);
      upper_.push_back(ip.vars[v].upper);
      if (ip.is_binary(v)) binaries_.push_back(v);
    }
  }

  MilpOptions& options() { return opt_; }

  void set_objective(const LinearExpr& obj) {
    std::vector<double> c(lower_.size(), 0.0);
    for (auto [v, w] : obj.terms) c[v] += w;
    for (std::size_t v = 0; v < c.size(); ++v) lp_.set_cost(int(v), c[v]);
    constant_ = obj.constant;
  }

  MilpSolution solve() {
    lp_.set_deadline(opt_.deadline);
    MilpSolution best;
    double incumbent = opt_.cutoff ? *opt_.cutoff - constant_ : kInf;
    bool have_incumbent = false;

    struct Pending {
      std::vector<std::pair<int, double>> fixes;
      Simplex::Basis basis;
      double bound;
    };
    std::vector<Pending> stack;
    std::vector<std::pair<int, double>> fixes;

    auto accept = [&](double obj, std::vector<double> x) {
      if (have_incumbent ? obj >= incumbent : obj > incumbent) return;
      incumbent = obj;
      best.x = std::move(x);
      best.objective = obj + constant_;
      have_incumbent = true;
    };
    auto done_early = [&] {
      return opt_.stop_below && have_incumbent &&
             incumbent + constant_ < *opt_.stop_below;
    };

    LpSolution sol = lp_.solve();
    best.lp_iterations += sol.iterations;
    bool timed_out = false;
    while (true) {
      ++best.nodes;
      bool branch = false;
      int var = -1;
      if (sol.status == LpStatus::time_limit ||
          sol.status == LpStatus::iteration_limit) {
        timed_out = true;
        break;
      }
      if (sol.status == LpStatus::unbounded) {
        reset(fixes);
        best.status = LpStatus::unbounded;
        return best;
      }
      if (sol.status == LpStatus::optimal &&
          sol.objective < incumbent - opt_.prune_tol) {
        double most = opt_.integrality_tol;
        for (int v : opt_.branch_first) {
          const double f = std::abs(sol.x[v] - std::round(sol.x[v]));
          if (f > most) {
            most = f;
            var = v;
          }
        }
        if (var < 0) {
          for (int v : binaries_) {
            const double f = sol.x[v];
            if (std::abs(f - std::round(f)) > opt_.integrality_tol) {
              var = v;
              break;
            }
          }
        }
        if (var < 0) {
          std::vector<double> x = sol.x;
          for (int v : binaries_) x[v] = std::round(x[v]);
          accept(sol.objective, std::move(x));
        } else {
          branch = true;
          if (opt_.heuristic) {
            if (auto h = opt_.heuristic(sol.x)) {
              accept(h->first - constant_, std::move(h->second));
            }
          }
        }
      }
      if (done_early()) break;
      if (best.nodes >= opt_.max_nodes) {
        timed_out = true;
        break;
      }

      if (branch) {
        // Dive on the 1-branch; the other side waits.
        const double near = 1.0;
        auto later = fixes;
        later.emplace_back(var, 1.0 - near);
        stack.push_back({std::move(later), lp_.basis(), sol.objective});
        fixes.emplace_back(var, near);
        lp_.set_bounds(var, near, near);
        sol = lp_.solve_dual();
        best.lp_iterations += sol.iterations;
        continue;
      }

      while (!stack.empty() &&
             stack.back().bound >= incumbent - opt_.prune_tol) {
        stack.pop_back();
      }
      if (stack.empty()) break;
      Pending next = std::move(stack.back());
      stack.pop_back();
      reset(fixes);
      fixes = std::move(next.fixes);
      for (auto [v, val] : fixes) lp_.set_bounds(v, val, val);
      // Restart from the current basis when bound flips make it dual
      // feasible; otherwise go back to the parent's basis.
      if (!lp_.make_dual_feasible()) lp_.restore(next.basis);
      sol = lp_.solve_dual();
      best.lp_iterations += sol.iterations;
    }
    reset(fixes);

    if (have_incumbent) {
      best.status = timed_out && !done_early() ? LpStatus::time_limit
                                               : LpStatus::optimal;
    } else {
      best.status = timed_out ? LpStatus::time_limit : LpStatus::infeasible;
    }
    return best;
  }

 private:
  static SimplexOptions lp_options(const MilpOptions& o) {
    SimplexOptions so = o.lp;
    so.deadline = o.deadline;
    so.big_m = false;
    return so;
  }

  void reset(const std::vector<std::pair<int, double>>& fixes) {
    for (auto [v, val] : fixes) lp_.set_bounds(v, lower_[v], upper_[v]);
  }

  MilpOptions opt_;
  Simplex lp_;
  double constant_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<int> binaries_;
};

inline MilpSolution solve_milp(const IntegerProgramSpec& ip,
                               const MilpOptions& opt = {}) {
  MilpSolver s(ip, opt);
  return s.solve();
}

// Reduced cost of column u: sign*gamma(u) - d.a_u.
inline double reduced_cost(const ConstraintSystem& cs,
                           const BitPolynomial& gamma,
                           const std::vector<double>& duals, Sense sense,
                           const BitString& u) {
  double rc = sense_sign(sense) * gamma.eval(u);
  for (int r : cs.column_rows(u)) rc -= duals[r];
  return rc;
}

struct CgOptions {
  double epsilon = 1e-9;
  int max_iterations = 100000;
  double big_m = 1e4;
  // Phase-one start instead of big-M penalties.
  bool phase_one = false;
  // Accept any improving column found during pricing.
  bool early_stop = false;
  std::optional<Clock::time_point> deadline;
};

struct CgReport {
  int iterations = 0;
  std::vector<BitString> columns;
  std::vector<double> reduced_costs;  // per iteration, at pricing
  std::vector<double> objectives;     // master objective per iteration
  double objective = 0.0;             // final, in the caller's sense
  std::vector<double> duals;
  std::vector<double> weights;  // master primal values, per column
  double wall_ms = 0.0;
  long pricing_nodes = 0;
  bool converged = false;
  bool infeasible = false;
  bool timed_out = false;
  // The last master point carries no artificial mass, so `objective` is
  // attained by a law over the generated columns.
  bool master_feasible = false;
};

namespace detail {

// Integer point of the pricing program for a given bit string.
// Sets the bits of one copy to u and every product variable of that copy
// to its literal product.
inline void set_copy(const IntegerProgramSpec& ip, const BitEncoding& enc,
                     int copy, const BitString& u, std::vector<double>& x) {
  for (int p = 0; p < u.size(); ++p) {
    x[ip.bit_vars[copy][p]] = u.get(p) ? 1.0 : 0.0;
  }
  for (const ProductVar& pv : ip.products) {
    if (pv.copy != copy) continue;
    bool v = true;
    for (const BitLiteral& l : pv.literals) {
      v = v && u.get(enc.position(l)) == l.positive;
    }
    x[pv.var] = v ? 1.0 : 0.0;
  }
}

// Integer point of the pricing program for a given bit string.
inline std::vector<double> pricing_point(const IntegerProgramSpec& ip,
                                         const ConstraintSystem& cs,
                                         const BitString& u) {
  std::vector<double> x(ip.num_vars(), 0.0);
  set_copy(ip, *cs.encoding, 0, u, x);
  return x;
}

inline BitString bits_of(const IntegerProgramSpec& ip, int copy,
                         const std::vector<double>& x) {
  BitString u(static_cast<int>(ip.bit_vars[copy].size()));
  for (int p = 0; p < u.size(); ++p) u.set(p, x[ip.bit_vars[copy][p]] > 0.5);
  return u;
}

}  // namespace detail

struct PricingResult {
  BitString column;
  double reduced_cost = 0.0;
  long nodes = 0;
  bool timed_out = false;
};

// Pricing program kept across column-generation iterations: constraints
// are fixed, only the dual-dependent objective changes.
class Pricer {
 public:
  Pricer(const ConstraintSystem& cs, const BitPolynomial& gamma, Sense sense)
      : cs_(cs), gamma_(gamma), sense_(sense),
        ip_(build_pricing_milp(cs, gamma,
                               std::vector<double>(cs.num_rows(), 0.0),
                               sense)),
        solver_(ip_) {
    solver_.options().branch_first = ip_.bit_vars[0];
    solver_.options().heuristic = [this](const std::vector<double>& x)
        -> std::optional<std::pair<double, std::vector<double>>> {
      BitString u = detail::bits_of(ip_, 0, x);
      const double rc = improve(u);
      return std::make_pair(rc, detail::pricing_point(ip_, cs_, u));
    };
  }

  const IntegerProgramSpec& program() const { return ip_; }

  // Minimizes the reduced cost; the returned value is recomputed exactly
  // from the column.
  PricingResult price(const std::vector<double>& duals,
                      double stop_below = -kInf,
                      std::optional<Clock::time_point> deadline = {}) {
    duals_ = duals;
    solver_.set_objective(pricing_objective(ip_, cs_, duals, sense_));
    MilpOptions& mo = solver_.options();
    mo.deadline = deadline;
    mo.stop_below.reset();
    if (stop_below > -kInf) mo.stop_below = stop_below;
    const MilpSolution s = solver_.solve();
    if (s.status != LpStatus::optimal && s.status != LpStatus::time_limit) {
      throw std::runtime_error(std::string("pricing program ended ") +
                               status_name(s.status));
    }
    PricingResult out;
    out.nodes = s.nodes;
    out.timed_out = s.status == LpStatus::time_limit;
    if (s.x.empty()) {
      out.reduced_cost = kInf;
      return out;
    }
    out.column = detail::bits_of(ip_, 0, s.x);
    out.reduced_cost = reduced_cost(cs_, gamma_, duals, sense_, out.column);
    return out;
  }

 private:
  double evaluate(const BitString& u) const {
    if (cs_.masks.empty()) return reduced_cost(cs_, gamma_, duals_, sense_, u);
    const std::uint64_t w = u.to_index();
    double rc = sense_sign(sense_) * fast_gamma_.eval(w) - duals_.back();
    for (int r = 0; r < cs_.num_configurations(); ++r) {
      if (cs_.masks[r].eval(w)) rc -= duals_[r];
    }
    return rc;
  }

  // Rounded relaxation points are polished by single-bit flips.
  double improve(BitString& u) const {
    double best = evaluate(u);
    for (bool moved = true; moved;) {
      moved = false;
      for (int p = 0; p < u.size(); ++p) {
        u.set(p, !u.get(p));
        const double rc = evaluate(u);
        if (rc < best - 1e-15) {
          best = rc;
          moved = true;
        } else {
          u.set(p, !u.get(p));
        }
      }
    }
    return best;
  }

  const ConstraintSystem& cs_;
  const BitPolynomial& gamma_;
  Sense sense_;
  MaskedPolynomial fast_gamma_{gamma_};
  IntegerProgramSpec ip_;
  MilpSolver solver_;
  std::vector<double> duals_;
};

inline PricingResult price(const ConstraintSystem& cs,
                           const BitPolynomial& gamma,
                           const std::vector<double>& duals, Sense sense,
                           double stop_below = -kInf,
                           std::optional<Clock::time_point> deadline = {}) {
  Pricer p(cs, gamma, sense);
  return p.price(duals, stop_below, deadline);
}

inline CgReport column_generation(const ConstraintSystem& cs,
                                  const BitPolynomial& gamma, Sense sense,
                                  const CgOptions& opt = {}) {
  if (!(opt.epsilon > 0.0)) throw PreconditionError("epsilon must be positive");
  const auto t0 = Clock::now();
  CgReport rep;
  LpModel master;
  for (int r = 0; r < cs.num_rows(); ++r) {
    master.add_row(RowSense::equal, cs.rhs[r]);
  }
  SimplexOptions so;
  so.big_m = !opt.phase_one;
  so.big_m_penalty = opt.big_m;
  so.deadline = opt.deadline;
  Simplex lp(std::move(master), so);
  std::set<BitString> in_master;
  const double sign = sense_sign(sense);
  Pricer pricer(cs, gamma, sense);
  const BitPolynomial zero(cs.encoding);
  std::optional<Pricer> phase_one_pricer;
  auto feasibility_pricer = [&]() -> Pricer& {
    if (!phase_one_pricer) phase_one_pricer.emplace(cs, zero, Sense::minimize);
    return *phase_one_pricer;
  };

  while (true) {
    LpSolution sol = lp.solve();
    if (sol.status == LpStatus::time_limit) {
      rep.timed_out = true;
      break;
    }
    if (sol.status == LpStatus::infeasible && opt.phase_one) {
      // Phase one: price against the infeasibility duals with a zero
      // objective; no improving column proves the rows infeasible.
      if (sol.duals.empty()) {
        rep.infeasible = true;
        break;
      }
      if (rep.iterations >= opt.max_iterations) break;
      const PricingResult pr =
          feasibility_pricer().price(sol.duals, -kInf, opt.deadline);
      if (pr.timed_out && !(pr.reduced_cost < -opt.epsilon)) {
        rep.timed_out = true;
        break;
      }
      rep.pricing_nodes += pr.nodes;
      ++rep.iterations;
      if (!(pr.reduced_cost < -opt.epsilon) ||
          !in_master.insert(pr.column).second) {
        rep.infeasible = true;
        break;
      }
      std::vector<int> rows = cs.column_rows(pr.column);
      std::vector<double> ones(rows.size(), 1.0);
      lp.add_column(sign * gamma.eval(pr.column), 0.0, kInf, rows, ones);
      rep.columns.push_back(pr.column);
      continue;
    }
    if (sol.status != LpStatus::optimal && sol.status != LpStatus::infeasible) {
      throw std::runtime_error(std::string("master program ended ") +
                               status_name(sol.status));
    }
    rep.objective = sign * sol.objective;
    rep.objectives.push_back(rep.objective);
    if (sol.status == LpStatus::infeasible) {
      rep.infeasible = true;
      break;
    }
    if (sol.duals.empty()) {
      rep.infeasible = true;
      break;
    }
    rep.duals = sol.duals;
    rep.weights = sol.x;
    if (rep.iterations >= opt.max_iterations) break;

    const PricingResult pr = pricer.price(
        sol.duals, opt.early_stop ? -opt.epsilon : -kInf, opt.deadline);
    rep.pricing_nodes += pr.nodes;
    rep.reduced_costs.push_back(pr.reduced_cost);
    ++rep.iterations;
    if (pr.timed_out && !(pr.reduced_cost < -opt.epsilon)) {
      rep.timed_out = true;
      break;
    }
    if (!(pr.reduced_cost < -opt.epsilon)) {
      rep.converged = true;
      break;
    }
    if (!in_master.insert(pr.column).second) {
      throw std::logic_error("pricing returned column " + pr.column.str() +
                             " already in the master program");
    }
    std::vector<int> rows = cs.column_rows(pr.column);
    std::vector<double> ones(rows.size(), 1.0);
    lp.add_column(sign * gamma.eval(pr.column), 0.0, kInf, rows, ones);
    rep.columns.push_back(pr.column);
  }
  rep.master_feasible = !rep.objectives.empty() &&
                        lp.artificial_mass() <= so.artificial_tol;
  if (rep.converged && !rep.master_feasible) rep.infeasible = true;
  if (rep.infeasible) rep.converged = false;
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

struct SingleMilpSolution {
  LpStatus status = LpStatus::optimal;
  double objective = 0.0;  // program objective (sign * gamma)
  double bound = 0.0;      // proven lower bound on the program objective
  std::vector<double> x;
  long iterations = 0;
  int copies_used = 0;
  double violation = 0.0;
};

// Exact solve of the single integer program by decomposition. The copies
// are interchangeable, so the program's linear relaxation in Dantzig-Wolfe
// form is the column-generation master; its optimal basic solution uses at
// most one column per row, which is placed into the copies as an integer
// point. The point is checked against every row of `ip`, and its objective
// meets the master's dual bound, so it is optimal.
inline SingleMilpSolution solve_single_milp(const IntegerProgramSpec& ip,
                                            const ConstraintSystem& cs,
                                            const BitPolynomial& gamma,
                                            Sense sense,
                                            const CgOptions& opt = {},
                                            double feasibility_tol = 1e-7) {
  SingleMilpSolution out;
  const CgReport rep = column_generation(cs, gamma, sense, opt);
  out.iterations = rep.iterations;
  if (rep.infeasible) {
    out.status = LpStatus::infeasible;
    return out;
  }
  if (!rep.converged) {
    out.status = rep.timed_out ? LpStatus::time_limit
                               : LpStatus::iteration_limit;
    return out;
  }
  const int copies = static_cast<int>(ip.weight_vars.size());
  std::vector<std::pair<BitString, double>> used;
  for (std::size_t c = 0; c < rep.columns.size(); ++c) {
    if (rep.weights[c] > 0.0) used.emplace_back(rep.columns[c], rep.weights[c]);
  }
  if (static_cast<int>(used.size()) > copies) {
    throw std::logic_error("basic solution uses more columns than copies");
  }
  const BitEncoding& enc = *cs.encoding;
  out.x.assign(ip.num_vars(), 0.0);
  const BitString idle = used.empty() ? BitString(cs.total_bits())
                                      : used.front().first;
  for (int k = 0; k < copies; ++k) {
    const bool active = k < static_cast<int>(used.size());
    detail::set_copy(ip, enc, k, active ? used[k].first : idle, out.x);
    out.x[ip.weight_vars[k]] = active ? used[k].second : 0.0;
  }
  for (const auto& wp : ip.weighted_products) {
    out.x[wp.var] = wp.factor.eval(out.x) * out.x[wp.weight];
  }
  out.copies_used = static_cast<int>(used.size());
  out.violation = ip.violation(out.x);
  if (out.violation > feasibility_tol) {
    throw std::logic_error("recovered integer point violates the program by " +
                           std::to_string(out.violation));
  }
  out.objective = ip.objective.eval(out.x);
  out.bound = sense_sign(sense) * rep.objective;
  if (std::abs(out.objective - out.bound) > feasibility_tol) {
    throw std::logic_error("recovered integer point misses the dual bound");
  }
  return out;
}

enum class Method { direct_lp, cg, single_milp, auto_select };
enum class Direction { lower, upper, both };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::direct_lp: return "direct-lp";
    case Method::cg: return "cg";
    case Method::single_milp: return "single-milp";
    case Method::auto_select: return "auto";
  }
  return "?";
}

// How the single integer program is solved: exactly through its
// decomposition, or by plain LP-based branch and bound (small programs only).
enum class MilpStrategy { decomposition, branch_and_bound };

struct BoundOptions {
  Method method = Method::auto_select;
  MilpStrategy milp_strategy = MilpStrategy::decomposition;
  Direction direction = Direction::both;
  CgOptions cg;
  std::uint64_t column_limit = kDefaultColumnLimit;
  std::optional<double> time_limit_s;
};

// One optimization run in one direction.
struct SenseResult {
  Sense sense = Sense::minimize;
  std::string method;
  double value = std::numeric_limits<double>::quiet_NaN();
  // optimal | infeasible | non-converged | time-limit
  std::string status = "optimal";
  long iterations = 0;
  long columns = 0;
  double wall_ms = 0.0;
  std::optional<CgReport> cg;
};

struct BoundResult {
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
  std::string method;
  std::optional<SenseResult> lower_run;
  std::optional<SenseResult> upper_run;
  int total_bits = 0;
  int rows = 0;
  // Conditionals read from zero-probability contexts. Nonzero means P̂ lacks
  // positivity and the bounds hold only for laws agreeing with those zeros.
  int zero_conditioning = 0;
};

inline SenseResult optimize(const ConstraintSystem& cs,
                            const BitPolynomial& gamma, Sense sense,
                            Method method, const BoundOptions& opt = {}) {
  const auto t0 = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (opt.time_limit_s) {
    deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double>(*opt.time_limit_s));
  }
  if (method == Method::auto_select) {
    const int bits = cs.total_bits();
    method = bits <= 62 && (std::uint64_t{1} << bits) <= opt.column_limit
                 ? Method::direct_lp
                 : Method::cg;
  }
  SenseResult out;
  out.sense = sense;
  out.method = method_name(method);
  const double sign = sense_sign(sense);
  switch (method) {
    case Method::direct_lp: {
      LinearProgramSpec spec =
          build_direct_lp(cs, gamma, sense, opt.column_limit);
      SimplexOptions so;
      so.deadline = deadline;
      LpSolution s = solve_lp(spec.model, so);
      out.iterations = s.iterations;
      out.columns = spec.num_columns();
      if (s.status == LpStatus::optimal) {
        out.value = sign * s.objective;
      } else {
        out.status = s.status == LpStatus::time_limit ? "time-limit"
                                                      : status_name(s.status);
      }
      break;
    }
    case Method::cg: {
      CgOptions co = opt.cg;
      if (deadline) co.deadline = deadline;
      CgReport rep = column_generation(cs, gamma, sense, co);
      out.iterations = rep.iterations;
      out.columns = static_cast<long>(rep.columns.size());
      out.value = rep.objective;
      if (rep.infeasible) {
        out.status = "infeasible";
        out.value = std::numeric_limits<double>::quiet_NaN();
      } else if (rep.timed_out) {
        out.status = "time-limit";
      } else if (!rep.converged) {
        out.status = "non-converged";
      }
      // A stopped master still paying for artificials has no valid value.
      if (!rep.converged && !rep.master_feasible) {
        out.value = std::numeric_limits<double>::quiet_NaN();
      }
      out.cg = std::move(rep);
      break;
    }
    case Method::single_milp: {
      const IntegerProgramSpec ip = build_single_milp(cs, gamma, sense);
      out.columns = static_cast<long>(ip.weight_vars.size());
      if (opt.milp_strategy == MilpStrategy::branch_and_bound) {
        MilpOptions mo;
        mo.deadline = deadline;
        const MilpSolution s = solve_milp(ip, mo);
        out.iterations = s.nodes;
        if (!s.x.empty()) out.value = sign * s.objective;
        if (s.status != LpStatus::optimal) {
          out.status = s.status == LpStatus::time_limit ? "time-limit"
                                                        : status_name(s.status);
        }
        break;
      }
      CgOptions co = opt.cg;
      co.deadline = deadline;
      const SingleMilpSolution s = solve_single_milp(ip, cs, gamma, sense, co);
      out.iterations = s.iterations;
      if (s.status == LpStatus::optimal) {
        out.value = sign * s.objective;
      } else {
        out.status = s.status == LpStatus::time_limit       ? "time-limit"
                     : s.status == LpStatus::iteration_limit ? "non-converged"
                                                             : status_name(s.status);
      }
      break;
    }
    case Method::auto_select: break;
  }
  out.wall_ms = elapsed_ms(t0);
  return out;
}

// Bounds for a weighted combination of objectives sharing one constraint
// system; `cs` may be null only when gamma is constant.
inline BoundResult bound_polynomial(const ConstraintSystem* cs,
                                    const BitPolynomial& gamma,
                                    const BoundOptions& opt = {}) {
  BoundResult res;
  const bool lower = opt.direction != Direction::upper;
  const bool upper = opt.direction != Direction::lower;
  if (gamma.is_constant()) {
    res.method = "identified";
    const double c = gamma.constant_part();
    SenseResult s;
    s.method = res.method;
    s.value = c;
    if (lower) {
      res.lower = c;
      s.sense = Sense::minimize;
      res.lower_run = s;
    }
    if (upper) {
      res.upper = c;
      s.sense = Sense::maximize;
      res.upper_run = s;
    }
    return res;
  }
  if (!cs) throw PreconditionError("non-constant objective needs constraints");
  res.total_bits = cs->total_bits();
  res.rows = cs->num_rows();
  if (lower) {
    res.lower_run = optimize(*cs, gamma, Sense::minimize, opt.method, opt);
    res.lower = res.lower_run->value;
    res.method = res.lower_run->method;
  }
  if (upper) {
    res.upper_run = optimize(*cs, gamma, Sense::maximize, opt.method, opt);
    res.upper = res.upper_run->value;
    res.method = res.upper_run->method;
  }
  return res;
}

// P(target | do(intervention)) or an average treatment effect.
struct QuerySpec {
  enum class Kind { probability, ate };
  Kind kind = Kind::probability;
  std::vector<Literal> target;
  std::vector<Literal> intervention;  // for ATE: the treatment, value ignored

  std::string str() const {
    auto lits = [](const std::vector<Literal>& ls) {
      std::string s;
      for (std::size_t i = 0; i < ls.size(); ++i) {
        if (i) s += ",";
        s += ls[i].name + "=" + std::to_string(ls[i].value);
      }
      return s;
    };
    if (kind == Kind::ate) {
      return "ATE(" + lits(target) + " ; " + intervention.at(0).name + ")";
    }
    if (intervention.empty()) return "P(" + lits(target) + ")";
    return "P(" + lits(target) + " | do(" + lits(intervention) + "))";
  }
};

// Objective plus constraints, ready to optimize.
struct BoundProblem {
  std::vector<Objective> objectives;
  BitPolynomial gamma;
  std::optional<ConstraintSystem> constraints;

  int zero_conditioning() const {
    int n = constraints ? constraints->zero_conditioning : 0;
    for (const Objective& o : objectives) n += o.zero_conditioning;
    return n;
  }
};

inline BoundProblem prepare(const CausalGraph& g,
                            const EmpiricalDistribution& d,
                            const QuerySpec& q) {
  BoundProblem bp;
  if (q.kind == QuerySpec::Kind::probability) {
    bp.objectives.push_back(build_objective(g, d, {q.target, q.intervention}));
    bp.gamma = bp.objectives[0].gamma;
  } else {
    if (q.intervention.size() != 1) {
      throw InputError("ATE needs exactly one treatment variable");
    }
    const std::string x = q.intervention[0].name;
    bp.objectives.push_back(build_objective(g, d, {q.target, {{x, 1}}}));
    bp.objectives.push_back(build_objective(g, d, {q.target, {{x, 0}}}));
    bp.gamma = combine_linear(
        {{1.0, bp.objectives[0].gamma}, {-1.0, bp.objectives[1].gamma}});
  }
  const Objective& o = bp.objectives[0];
  if (!bp.gamma.is_constant() && o.component && o.encoding) {
    bp.constraints = build_constraints(o);
  }
  return bp;
}

inline BoundResult bound(const CausalGraph& g, const EmpiricalDistribution& d,
                         const QuerySpec& q, const BoundOptions& opt = {}) {
  BoundProblem bp = prepare(g, d, q);
  BoundResult r = bound_polynomial(bp.constraints ? &*bp.constraints : nullptr,
                                   bp.gamma, opt);
  r.zero_conditioning = bp.zero_conditioning();
  return r;
}

}  // namespace qmb
