#pragma once

// Joint distribution over binary endogenous variables, queried as a
// conditional-probability oracle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qmb/error.hpp"
#include "qmb/graph.hpp"
#include "qmb/node_set.hpp"

namespace qmb {

inline constexpr double kNormalizationTolerance = 1e-9;
inline constexpr int kMaxDistributionVariables = 26;

// Result of a conditional query. `zero_conditioning` is raised when the
// conditioning event has probability zero; `value` is then 0.
struct Conditional {
  double value = 0.0;
  bool zero_conditioning = false;
};

class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  // Dense table; entry `i` holds the probability of the assignment whose
  // variable k takes bit k of `i`.
  EmpiricalDistribution(std::vector<std::string> variables,
                        std::vector<double> table)
      : vars_(std::move(variables)), table_(std::move(table)) {
    validate_names();
    if (table_.size() != (std::size_t{1} << vars_.size())) {
      throw InputError("table size does not match the variable count");
    }
    double total = 0.0;
    for (double p : table_) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw InputError("table entries must be finite and non-negative");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw InputError("table sums to " + std::to_string(total) +
                       ", expected 1");
    }
  }

  // Entries keyed by assignment strings ('0'/'1' per variable, in declared
  // order). Missing assignments have probability 0.
  static EmpiricalDistribution from_entries(
      std::vector<std::string> variables,
      const std::vector<std::pair<std::string, double>>& entries) {
    check_count(variables.size());
    std::vector<double> table(std::size_t{1} << variables.size(), 0.0);
    std::vector<char> seen(table.size(), 0);
    for (const auto& [key, p] : entries) {
      std::size_t idx = parse_assignment(key, variables.size());
      if (seen[idx]) throw InputError("duplicate table entry '" + key + "'");
      seen[idx] = 1;
      table[idx] = p;
    }
    return EmpiricalDistribution(std::move(variables), std::move(table));
  }

  // Relative frequencies of the given assignment strings.
  static EmpiricalDistribution from_samples(
      std::vector<std::string> variables,
      const std::vector<std::string>& rows) {
    check_count(variables.size());
    if (rows.empty()) throw InputError("sample file has no rows");
    std::vector<double> table(std::size_t{1} << variables.size(), 0.0);
    for (const auto& r : rows) {
      table[parse_assignment(r, variables.size())] += 1.0;
    }
    for (double& p : table) p /= static_cast<double>(rows.size());
    return EmpiricalDistribution(std::move(variables), std::move(table));
  }

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<double>& table() const { return table_; }
  int num_variables() const { return static_cast<int>(vars_.size()); }

  int index_of(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw InputError("unknown variable '" + name + "'");
    return static_cast<int>(it - vars_.begin());
  }

  // Assignment string for table entry `idx`.
  std::string assignment_string(std::size_t idx) const {
    std::string s(vars_.size(), '0');
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      if ((idx >> k) & 1U) s[k] = '1';
    }
    return s;
  }

  // Probability that the variables selected by `mask` take `values`
  // (both in table-index bit positions).
  double probability(std::uint64_t mask, std::uint64_t values) const {
    double total = 0.0;
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if ((i & mask) == values) total += table_[i];
    }
    return total;
  }

  // P(event | given) over table-index masks. Overlap is rejected.
  Conditional conditional(std::uint64_t event_mask, std::uint64_t event_values,
                          std::uint64_t given_mask,
                          std::uint64_t given_values) const {
    if ((event_mask & given_mask) != 0) {
      throw PreconditionError("event and conditioning sets overlap");
    }
    if (event_mask == 0) return {1.0, false};
    double denom = probability(given_mask, given_values);
    if (denom <= 0.0) return {0.0, true};
    double num = probability(event_mask | given_mask,
                             event_values | given_values);
    return {num / denom, false};
  }

  // Marginal over the named subset, in the given order.
  EmpiricalDistribution marginal(const std::vector<std::string>& keep) const {
    std::vector<int> pos;
    for (const auto& n : keep) pos.push_back(index_of(n));
    std::vector<double> table(std::size_t{1} << keep.size(), 0.0);
    for (std::size_t i = 0; i < table_.size(); ++i) {
      std::size_t j = 0;
      for (std::size_t k = 0; k < pos.size(); ++k) {
        if ((i >> pos[k]) & 1U) j |= std::size_t{1} << k;
      }
      table[j] += table_[i];
    }
    return EmpiricalDistribution(keep, std::move(table));
  }

  bool operator==(const EmpiricalDistribution&) const = default;

 private:
  static void check_count(std::size_t n) {
    if (n > static_cast<std::size_t>(kMaxDistributionVariables)) {
      throw SizeLimitError("distribution over " + std::to_string(n) +
                           " variables exceeds the dense-table limit");
    }
  }

  static std::size_t parse_assignment(const std::string& s, std::size_t n) {
    if (s.size() != n) {
      throw InputError("assignment '" + s + "' has wrong length");
    }
    std::size_t idx = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (s[k] == '1') {
        idx |= std::size_t{1} << k;
      } else if (s[k] != '0') {
        throw InputError("assignment '" + s + "' must contain only 0/1");
      }
    }
    return idx;
  }

  void validate_names() const {
    check_count(vars_.size());
    std::vector<std::string> sorted = vars_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw InputError("duplicate variable in distribution");
    }
  }

  std::vector<std::string> vars_;
  std::vector<double> table_;
};

// A distribution bound to a graph: answers queries phrased as assignments
// over graph node ids.
class DistributionView {
 public:
  DistributionView(const CausalGraph& g, const EmpiricalDistribution& d)
      : dist_(&d), position_(static_cast<std::size_t>(g.size()), -1) {
    if (static_cast<int>(d.variables().size()) != g.endogenous().size()) {
      throw InputError(
          "distribution variables do not match the endogenous nodes");
    }
    for (NodeId v : g.endogenous()) {
      position_[v] = d.index_of(g.name(v));
    }
  }

  const EmpiricalDistribution& distribution() const { return *dist_; }

  double probability(const Assignment& a) const {
    auto [m, val] = translate(a);
    return dist_->probability(m, val);
  }

  Conditional conditional(const Assignment& event,
                          const Assignment& given) const {
    if (event.vars.intersects(given.vars)) {
      throw PreconditionError("event and conditioning sets overlap");
    }
    auto [em, ev] = translate(event);
    auto [gm, gv] = translate(given);
    return dist_->conditional(em, ev, gm, gv);
  }

 private:
  std::pair<std::uint64_t, std::uint64_t> translate(const Assignment& a) const {
    std::uint64_t mask = 0;
    std::uint64_t val = 0;
    for (NodeId v : a.vars) {
      int p = position_.at(v);
      if (p < 0) throw PreconditionError("query mentions an exogenous node");
      mask |= std::uint64_t{1} << p;
      if (a.value(v)) val |= std::uint64_t{1} << p;
    }
    return {mask, val};
  }

  const EmpiricalDistribution* dist_;
  std::vector<int> position_;
};

}  // namespace qmb
