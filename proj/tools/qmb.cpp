// qmb: bounds on interventional probabilities from observational data.
//
//   qmb analyze --model m.json [--query "P(Y=1 | do(X=1))"] [--data d.json]
//   qmb bound   --model m.json --data d.json --query ... [--method cg]
//   qmb bench   --pairs 1,1 --pairs 2,2 [--methods lp,cg,milp]
//   qmb gen     --graph fig2-right --seed 3 --out dir/
//
// Exit codes: 0 ok, 1 malformed input, 2 infeasible, 3 not converged,
// 4 size limit.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmb/io.hpp"
#include "qmb/oracle.hpp"
#include "qmb/solve.hpp"

namespace {

using namespace qmb;

enum Exit { kOk = 0, kMalformed = 1, kInfeasible = 2, kNotConverged = 3,
            kSizeLimit = 4 };

struct SolveFlags {
  std::string method = "auto";
  std::string direction = "both";
  double tol = 1e-9;
  int max_iter = 100000;
  std::optional<double> time_limit;
  std::optional<std::uint64_t> seed;
  bool degenerate = false;
};

void add_solve_flags(CLI::App* app, SolveFlags& f) {
  app->add_option("--method", f.method, "lp | cg | milp | auto")
      ->check(CLI::IsMember({"lp", "cg", "milp", "auto"}));
  app->add_option("--direction", f.direction, "lower | upper | both")
      ->check(CLI::IsMember({"lower", "upper", "both"}));
  app->add_option("--tol", f.tol, "reduced-cost tolerance for column generation");
  app->add_option("--max-iter", f.max_iter, "column-generation iteration cap");
  app->add_option("--time-limit", f.time_limit, "seconds per bound");
  app->add_option("--seed", f.seed, "random seed");
  app->add_flag("--degenerate", f.degenerate,
                "sparse exogenous laws without a probability floor");
}

Method parse_method(const std::string& m) {
  if (m == "lp") return Method::direct_lp;
  if (m == "cg") return Method::cg;
  if (m == "milp") return Method::single_milp;
  return Method::auto_select;
}

BoundOptions bound_options(const SolveFlags& f) {
  BoundOptions o;
  o.method = parse_method(f.method);
  o.direction = f.direction == "lower"   ? Direction::lower
                : f.direction == "upper" ? Direction::upper
                                         : Direction::both;
  o.cg.epsilon = f.tol;
  o.cg.max_iterations = f.max_iter;
  o.time_limit_s = f.time_limit;
  return o;
}

int status_code(const std::string& status) {
  if (status == "infeasible") return kInfeasible;
  if (status == "optimal") return kOk;
  return kNotConverged;
}

std::string to_dot(const CausalGraph& g, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (const Node& n : g.nodes()) {
    os << "  " << n.name
       << (n.kind == NodeKind::exogenous ? " [style=dashed];\n" : ";\n");
  }
  for (const auto& [a, b] : g.named_edges()) os << "  " << a << " -> " << b << ";\n";
  os << "}\n";
  return os.str();
}

// Uniform table over the endogenous variables; the derivation is symbolic,
// so any positive table yields the same trace.
EmpiricalDistribution uniform_over(const CausalGraph& g) {
  std::vector<std::string> vars;
  for (NodeId v : g.endogenous()) vars.push_back(g.name(v));
  const std::size_t n = std::size_t{1} << vars.size();
  return EmpiricalDistribution(vars, std::vector<double>(n, 1.0 / double(n)));
}

struct AnalyzeArgs {
  std::string model;
  std::string data;
  std::string query;
};

int run_analyze(const AnalyzeArgs& a) {
  const CausalGraph g = load_model(a.model);
  std::cout << "quasi-Markovian: " << (g.is_quasi_markovian() ? "yes" : "no");
  if (!g.is_quasi_markovian()) {
    std::cout << " (nodes with several exogenous parents:";
    for (const auto& n : g.non_quasi_markovian_nodes()) std::cout << " " << n;
    std::cout << ")";
  }
  std::cout << "\nc-components:\n";
  for (const CComponent& c : c_components(g)) {
    std::cout << "  {";
    const auto names = g.names_of(c.members);
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::cout << (i ? "," : "") << names[i];
    }
    std::cout << "}";
    if (c.exogenous) std::cout << " via " << g.name(*c.exogenous);
    std::cout << "\n";
  }
  if (a.query.empty()) return kOk;
  const QuerySpec q = parse_query(a.query);
  validate_query(g, q);
  std::vector<std::string> xs;
  for (const Literal& l : q.intervention) xs.push_back(l.name);
  std::cout << "intervened semi-marginal graph:\n"
            << to_dot(intervened_semi_marginal(g, g.set_of(xs)), "intervened");
  const EmpiricalDistribution d =
      a.data.empty() ? uniform_over(g) : load_distribution(a.data);
  const BoundProblem bp = prepare(g, d, q);
  for (const Objective& o : bp.objectives) {
    std::cout << "derivation:\n" << o.trace.str();
  }
  if (!a.data.empty()) {
    std::cout << "gamma: " << bp.gamma.str() << "\n";
    std::cout << "identified: " << (bp.gamma.is_constant() ? "yes" : "no") << "\n";
  }
  return kOk;
}

struct BoundArgs {
  std::string model;
  std::string data;
  std::string query;
  std::string dump_lp;
  SolveFlags flags;
};

void dump_programs(const std::string& path, const ConstraintSystem& cs,
                   const BitPolynomial& gamma, Method method) {
  std::ostringstream os;
  if (method == Method::direct_lp || method == Method::auto_select) {
    os << lp_format(build_direct_lp(cs, gamma, Sense::minimize));
  } else if (method == Method::cg) {
    os << build_pricing_milp(cs, gamma, std::vector<double>(cs.num_rows(), 0.0),
                             Sense::minimize)
              .to_lp_format();
  } else {
    os << build_single_milp(cs, gamma, Sense::minimize).to_lp_format();
  }
  write_file(path, os.str());
}

int run_bound(const BoundArgs& a) {
  const CausalGraph g = load_model(a.model);
  const EmpiricalDistribution d = load_distribution(a.data);
  const QuerySpec q = parse_query(a.query);
  validate_query(g, q);
  const BoundOptions opt = bound_options(a.flags);
  const BoundProblem bp = prepare(g, d, q);
  const ConstraintSystem* cs = bp.constraints ? &*bp.constraints : nullptr;
  if (!a.dump_lp.empty() && cs) dump_programs(a.dump_lp, *cs, bp.gamma, opt.method);
  const BoundResult r = bound_polynomial(cs, bp.gamma, opt);
  const RunInfo info{a.flags.seed, a.flags.tol, bp.zero_conditioning()};
  if (info.zero_conditioning > 0) {
    std::cerr << "warning: " << info.zero_conditioning
              << " conditional(s) read from zero-probability contexts\n";
  }
  int code = kOk;
  for (const auto* run : {&r.lower_run, &r.upper_run}) {
    if (!*run) continue;
    std::cout << result_record(q, **run, info).dump() << "\n";
    code = std::max(code, status_code((*run)->status));
  }
  return code;
}

struct BenchArgs {
  std::vector<std::string> pairs;
  std::string methods = "lp,cg,milp";
  std::string out;
  SolveFlags flags;
};

std::pair<int, int> parse_pair(const std::string& s) {
  int m = 0, n = 0;
  char sep = 0;
  std::istringstream is(s);
  if (!(is >> m >> sep >> n) || sep != ',' || m < 1 || n < 1 || !is.eof()) {
    throw InputError("pair '" + s + "' is not of the form M,N");
  }
  return {m, n};
}

int run_bench(const BenchArgs& a) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& p : a.pairs) pairs.push_back(parse_pair(p));
  if (pairs.empty()) pairs = {{1, 1}, {1, 2}, {2, 1}, {2, 2}};
  std::vector<std::string> methods;
  std::stringstream ms(a.methods);
  for (std::string m; std::getline(ms, m, ',');) {
    if (m != "lp" && m != "cg" && m != "milp") {
      throw InputError("unknown method '" + m + "'");
    }
    methods.push_back(m);
  }
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw InputError("cannot write '" + a.out + "'");
  }
  std::ostream& os = a.out.empty() ? std::cout : file;
  os << "M,N,method,direction,value,wall_ms,iterations,status\n";
  RandomScmOptions ro;
  ro.degenerate = a.flags.degenerate;
  const std::uint64_t seed = a.flags.seed.value_or(1);
  int code = kOk;
  for (auto [m, n] : pairs) {
    const Instance in = family_instance(m, n, seed, ro);
    QuerySpec q;
    q.target = in.query.target;
    q.intervention = in.query.intervention;
    const BoundProblem bp = prepare(in.graph, in.dist, q);
    const ConstraintSystem& cs = *bp.constraints;
    std::cerr << "M=" << m << " N=" << n << " bits=" << cs.total_bits()
              << " columns=" << (std::uint64_t{1} << cs.total_bits())
              << " rows=" << cs.num_rows()
              << " truth=" << in.truth << "\n";
    for (const auto& method : methods) {
      SolveFlags f = a.flags;
      f.method = method;
      BoundOptions opt = bound_options(f);
      opt.column_limit = std::numeric_limits<std::uint64_t>::max();
      BoundResult r;
      try {
        r = bound_polynomial(&cs, bp.gamma, opt);
      } catch (const SizeLimitError& e) {
        for (const char* dir : {"lower", "upper"}) {
          os << m << "," << n << "," << method << "," << dir
             << ",,,0,size-limit\n";
        }
        continue;
      }
      for (const auto* run : {&r.lower_run, &r.upper_run}) {
        if (!*run) continue;
        const SenseResult& s = **run;
        os << m << "," << n << "," << method << ","
           << (s.sense == Sense::minimize ? "lower" : "upper") << ","
           << std::setprecision(12) << s.value << "," << std::setprecision(6)
           << s.wall_ms << "," << s.iterations << "," << s.status << "\n";
        code = std::max(code, status_code(s.status));
      }
      os.flush();
    }
  }
  return code;
}

struct GenArgs {
  std::string graph = "fig2-right";
  std::string model;
  std::string query = "P(Y=1 | do(X=1))";
  int m = 1;
  int n = 1;
  std::string out = ".";
  SolveFlags flags;
};

int run_gen(const GenArgs& a) {
  const CausalGraph g =
      !a.model.empty()     ? load_model(a.model)
      : a.graph == "family" ? family_graph(a.m, a.n)
                            : fixture_graph(a.graph);
  const QuerySpec q = parse_query(a.query);
  if (q.kind != QuerySpec::Kind::probability) {
    throw InputError("gen takes a P(...) query");
  }
  validate_query(g, q);
  RandomScmOptions ro;
  ro.degenerate = a.flags.degenerate;
  const std::uint64_t seed = a.flags.seed.value_or(1);
  const Instance in = make_instance(g, {q.target, q.intervention}, seed, ro);
  std::filesystem::create_directories(a.out);
  const std::filesystem::path dir(a.out);
  write_file((dir / "model.json").string(), write_model(in.graph));
  write_file((dir / "distribution.json").string(), write_distribution(in.dist));
  Json truth;
  truth["query"] = q.str();
  truth["truth"] = in.truth;
  truth["seed"] = seed;
  truth["degenerate"] = a.flags.degenerate;
  write_file((dir / "truth.json").string(), truth.dump(2) + "\n");
  std::cout << truth.dump() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounds on interventional probabilities in quasi-Markovian models"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "c-components, intervened graph, derivation");
  analyze->add_option("--model", aa.model, "model file")->required();
  analyze->add_option("--data", aa.data, "distribution file");
  analyze->add_option("--query", aa.query, "query such as \"P(Y=1 | do(X=1))\"");

  BoundArgs ba;
  auto* bound_cmd = app.add_subcommand("bound", "lower and upper bounds for a query");
  bound_cmd->add_option("--model", ba.model, "model file")->required();
  bound_cmd->add_option("--data", ba.data, "distribution file")->required();
  bound_cmd->add_option("--query", ba.query, "query")->required();
  bound_cmd->add_option("--dump-lp", ba.dump_lp, "write the program in LP format");
  add_solve_flags(bound_cmd, ba.flags);

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "template-family sweep as CSV");
  bench->add_option("--pairs", be.pairs, "M,N pairs (repeatable)");
  bench->add_option("--methods", be.methods, "comma-separated lp,cg,milp");
  bench->add_option("--out", be.out, "CSV path (default stdout)");
  add_solve_flags(bench, be.flags);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "random instance with ground truth");
  gen->add_option("--graph", ga.graph,
                  "fig1a | fig2-left | fig2-right | supplementary | family");
  gen->add_option("--model", ga.model, "model file instead of --graph");
  gen->add_option("--query", ga.query, "query");
  gen->add_option("--M", ga.m, "family parameter M");
  gen->add_option("--N", ga.n, "family parameter N");
  gen->add_option("--out", ga.out, "output directory");
  add_solve_flags(gen, ga.flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kMalformed;
  }
  try {
    if (*analyze) return run_analyze(aa);
    if (*bound_cmd) return run_bound(ba);
    if (*bench) return run_bench(be);
    if (*gen) return run_gen(ga);
  } catch (const SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return kSizeLimit;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kMalformed;
  } catch (const PreconditionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kMalformed;
  }
  return kMalformed;
}
