#pragma once

// File formats and the query grammar.
//
// Model (JSON):
//   {"nodes": [{"name": "X", "kind": "endogenous"}, {"name": "U1",
//              "kind": "exogenous"}, ...],
//    "edges": [["U1", "X"], ...]}
//
// Distribution, either JSON
//   {"variables": ["W", "X", ...],
//    "table": {"0110": 0.125, ...}}        (missing assignments are 0)
// or
//   {"variables": [...], "samples": ["0110", "1010", ...]}
// or plain text: a header line of variable names, then one assignment
// string per line. Character k of an assignment string is the value of
// variable k in the declared order.
//
// Queries: "P(Y=1 | do(X=1))", "P(Y=1, Z=0 | do(X=1, W=0))", "P(Y=1)",
// "ATE(Y=1 ; X)". Whitespace is ignored.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmb/dist.hpp"
#include "qmb/error.hpp"
#include "qmb/graph.hpp"
#include "qmb/solve.hpp"

namespace qmb {

using Json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

namespace detail {

inline Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

inline const Json& member(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string(what) + " lacks '" + key + "'");
  }
  return j.at(key);
}

inline std::string as_string(const Json& j, const char* what) {
  if (!j.is_string()) throw InputError(std::string(what) + " must be a string");
  return j.get<std::string>();
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) {
    std::size_t start = 0;
    for (std::size_t p = 0; p <= tok.size(); ++p) {
      if (p == tok.size() || tok[p] == ',') {
        if (p > start) out.push_back(tok.substr(start, p - start));
        start = p + 1;
      }
    }
  }
  return out;
}

}  // namespace detail

inline CausalGraph parse_model(const std::string& text) {
  const Json j = detail::parse_json(text, "model");
  std::vector<Node> nodes;
  for (const Json& n : detail::member(j, "nodes", "model")) {
    Node node;
    node.name = detail::as_string(detail::member(n, "name", "node"), "name");
    const std::string kind =
        n.contains("kind") ? detail::as_string(n.at("kind"), "kind")
                           : "endogenous";
    if (kind == "endogenous") {
      node.kind = NodeKind::endogenous;
    } else if (kind == "exogenous") {
      node.kind = NodeKind::exogenous;
    } else {
      throw InputError("node kind must be endogenous or exogenous, got '" +
                       kind + "'");
    }
    nodes.push_back(std::move(node));
  }
  std::vector<Edge> edges;
  if (j.contains("edges")) {
    for (const Json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) {
        throw InputError("edges must be [from, to] pairs");
      }
      edges.emplace_back(detail::as_string(e[0], "edge endpoint"),
                         detail::as_string(e[1], "edge endpoint"));
    }
  }
  return CausalGraph(std::move(nodes), edges);
}

inline CausalGraph load_model(const std::string& path) {
  return parse_model(read_file(path));
}

inline std::string write_model(const CausalGraph& g) {
  Json j;
  j["nodes"] = Json::array();
  for (const Node& n : g.nodes()) {
    j["nodes"].push_back(
        {{"name", n.name},
         {"kind", n.kind == NodeKind::exogenous ? "exogenous" : "endogenous"}});
  }
  j["edges"] = Json::array();
  for (const auto& [a, b] : g.named_edges()) j["edges"].push_back({a, b});
  return j.dump(2) + "\n";
}

inline EmpiricalDistribution parse_distribution(const std::string& text) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw InputError("empty distribution file");
  if (text[first] != '{') {
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> vars;
    std::vector<std::string> rows;
    while (std::getline(is, line)) {
      auto toks = detail::split_ws(line);
      if (toks.empty() || toks[0][0] == '#') continue;
      if (vars.empty()) {
        vars = std::move(toks);
      } else if (toks.size() == 1) {
        rows.push_back(toks[0]);
      } else {
        throw InputError("sample line '" + line + "' is not one assignment");
      }
    }
    return EmpiricalDistribution::from_samples(std::move(vars), rows);
  }
  const Json j = detail::parse_json(text, "distribution");
  std::vector<std::string> vars;
  for (const Json& v : detail::member(j, "variables", "distribution")) {
    vars.push_back(detail::as_string(v, "variable"));
  }
  if (j.contains("table")) {
    const Json& t = j.at("table");
    if (!t.is_object()) throw InputError("table must map assignments to numbers");
    std::vector<std::pair<std::string, double>> entries;
    for (const auto& [key, p] : t.items()) {
      if (!p.is_number()) throw InputError("probability for '" + key + "' is not a number");
      entries.emplace_back(key, p.get<double>());
    }
    return EmpiricalDistribution::from_entries(std::move(vars), entries);
  }
  if (j.contains("samples")) {
    std::vector<std::string> rows;
    for (const Json& r : j.at("samples")) rows.push_back(detail::as_string(r, "sample"));
    return EmpiricalDistribution::from_samples(std::move(vars), rows);
  }
  throw InputError("distribution needs a 'table' or 'samples' member");
}

inline EmpiricalDistribution load_distribution(const std::string& path) {
  return parse_distribution(read_file(path));
}

// Table form; zero entries are omitted. Numbers are written so that they
// read back bit-identically.
inline std::string write_distribution(const EmpiricalDistribution& d) {
  Json j;
  j["variables"] = d.variables();
  j["table"] = Json::object();
  for (std::size_t i = 0; i < d.table().size(); ++i) {
    if (d.table()[i] != 0.0) j["table"][d.assignment_string(i)] = d.table()[i];
  }
  return j.dump(2) + "\n";
}

namespace detail {

inline std::vector<Literal> parse_literals(const std::string& s,
                                           const std::string& query) {
  std::vector<Literal> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string::npos) end = s.size();
    const std::string item = s.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 2 != item.size() ||
        (item[eq + 1] != '0' && item[eq + 1] != '1')) {
      throw InputError("bad literal '" + item + "' in query '" + query + "'");
    }
    out.push_back({item.substr(0, eq), item[eq + 1] - '0'});
    start = end + 1;
  }
  return out;
}

}  // namespace detail

inline QuerySpec parse_query(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  auto bad = [&](const std::string& why) {
    return InputError("query '" + text + "': " + why);
  };
  QuerySpec q;
  if (s.rfind("ATE(", 0) == 0) {
    if (s.back() != ')') throw bad("missing ')'");
    const std::string body = s.substr(4, s.size() - 5);
    const std::size_t semi = body.find(';');
    if (semi == std::string::npos) throw bad("expected 'ATE(Y=y ; X)'");
    q.kind = QuerySpec::Kind::ate;
    q.target = detail::parse_literals(body.substr(0, semi), text);
    const std::string x = body.substr(semi + 1);
    if (x.empty() || x.find_first_of("=,()") != std::string::npos) {
      throw bad("ATE takes a single treatment variable name");
    }
    q.intervention = {{x, 1}};
  } else if (s.rfind("P(", 0) == 0) {
    if (s.back() != ')') throw bad("missing ')'");
    const std::string body = s.substr(2, s.size() - 3);
    const std::size_t bar = body.find('|');
    q.target = detail::parse_literals(body.substr(0, bar), text);
    if (bar != std::string::npos) {
      const std::string cond = body.substr(bar + 1);
      if (cond.rfind("do(", 0) != 0 || cond.back() != ')') {
        throw bad("conditioning must be do(...)");
      }
      q.intervention =
          detail::parse_literals(cond.substr(3, cond.size() - 4), text);
    }
  } else {
    throw bad("expected P(...) or ATE(...)");
  }
  if (q.target.empty()) throw bad("no target literal");
  for (const Literal& t : q.target) {
    for (const Literal& x : q.intervention) {
      if (t.name == x.name) throw bad("'" + t.name + "' is both target and treatment");
    }
  }
  return q;
}

// Checks that every query variable is an endogenous node.
inline void validate_query(const CausalGraph& g, const QuerySpec& q) {
  for (const auto* ls : {&q.target, &q.intervention}) {
    for (const Literal& l : *ls) {
      const auto id = g.find(l.name);
      if (!id) throw InputError("query names unknown variable '" + l.name + "'");
      if (g.is_exogenous(*id)) {
        throw InputError("query variable '" + l.name + "' is exogenous");
      }
    }
  }
}

// Provenance carried by every result record.
struct RunInfo {
  std::optional<std::uint64_t> seed;
  double epsilon = 1e-9;
  int zero_conditioning = 0;
};

inline Json result_record(const QuerySpec& q, const SenseResult& r,
                          const RunInfo& info) {
  Json j;
  j["query"] = q.str();
  j["method"] = r.method;
  j["direction"] = r.sense == Sense::minimize ? "lower" : "upper";
  if (std::isfinite(r.value)) {
    j["value"] = r.value;
  } else {
    j["value"] = nullptr;
  }
  j["iterations"] = r.iterations;
  j["columns_generated"] = r.columns;
  j["wall_ms"] = r.wall_ms;
  j["status"] = r.status;
  if (info.seed) {
    j["seed"] = *info.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["epsilon"] = info.epsilon;
  j["zero_conditioning"] = info.zero_conditioning;
  return j;
}

}  // namespace qmb
