#pragma once

// Independent reference computations shared by the tests. Nothing here
// calls into the bounding pipeline; each helper recomputes its quantity
// from first principles.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmb/dist.hpp"
#include "qmb/graph.hpp"

namespace qmbt {

using Event = std::vector<std::pair<std::string, int>>;

// P(event) by scanning the table.
inline double prob(const qmb::EmpiricalDistribution& d, const Event& e) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.table().size(); ++i) {
    bool ok = true;
    for (const auto& [name, v] : e) {
      ok = ok && static_cast<int>((i >> d.index_of(name)) & 1U) == v;
    }
    if (ok) s += d.table()[i];
  }
  return s;
}

inline double cond(const qmb::EmpiricalDistribution& d, const Event& event,
                   const Event& given) {
  Event both = event;
  both.insert(both.end(), given.begin(), given.end());
  return prob(d, both) / prob(d, given);
}

// Column of the constraint matrix for exogenous value u of the component
// containing `member`, recomputed from the graph alone: mechanisms are laid
// out by member name, each with 2^|parents| bits indexed by the parent
// values (parents by name, last parent least significant). Rows enumerate
// the extended component by name, first name most significant.
struct ReferenceColumns {
  std::vector<std::string> row_vars;
  std::vector<std::string> members;
  std::vector<std::vector<std::string>> parents;  // per member
  std::vector<int> offset;
  int bits = 0;

  ReferenceColumns(const qmb::CausalGraph& g, const qmb::CComponent& c) {
    for (qmb::NodeId v : c.members) members.push_back(g.name(v));
    std::sort(members.begin(), members.end());
    std::vector<std::string> ext;
    for (const auto& m : members) {
      std::vector<std::string> ps;
      for (qmb::NodeId p : g.endogenous_parents(g.id(m))) {
        ps.push_back(g.name(p));
      }
      std::sort(ps.begin(), ps.end());
      parents.push_back(ps);
      offset.push_back(bits);
      bits += 1 << ps.size();
      ext.push_back(m);
      ext.insert(ext.end(), ps.begin(), ps.end());
    }
    std::sort(ext.begin(), ext.end());
    ext.erase(std::unique(ext.begin(), ext.end()), ext.end());
    row_vars = ext;
  }

  int rows() const { return 1 << row_vars.size(); }

  int value_of(const std::string& v, int row) const {
    const auto k = std::find(row_vars.begin(), row_vars.end(), v) -
                   row_vars.begin();
    return (row >> (row_vars.size() - 1 - k)) & 1;
  }

  // Entry (row, u); bit p of u is bit position p.
  int entry(int row, std::uint64_t u) const {
    for (std::size_t m = 0; m < members.size(); ++m) {
      int cfg = 0;
      for (const auto& p : parents[m]) cfg = (cfg << 1) | value_of(p, row);
      const int bit = static_cast<int>((u >> (offset[m] + cfg)) & 1U);
      if (bit != value_of(members[m], row)) return 0;
    }
    return 1;
  }
};

// Dense two-phase tableau simplex with Bland's rule for
//   min c.x  s.t.  A x = b,  x >= 0.
// Returns NaN when infeasible and -inf when unbounded.
inline double tableau_lp(std::vector<std::vector<double>> a,
                         std::vector<double> b, const std::vector<double>& c) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0) {
      b[i] = -b[i];
      for (double& v : a[i]) v = -v;
    }
  }
  // Columns: n structurals, m artificials, then rhs.
  const int w = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(w, 0.0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][w - 1] = b[i];
    basis[i] = n + i;
  }
  const double eps = 1e-11;
  auto pivot = [&](int r, int q) {
    const double p = t[r][q];
    for (double& v : t[r]) v /= p;
    for (int i = 0; i <= m; ++i) {
      if (i == r || t[i][q] == 0.0) continue;
      const double f = t[i][q];
      for (int j = 0; j < w; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = q;
  };
  auto run = [&](int limit) {
    while (true) {
      int q = -1;
      for (int j = 0; j < limit; ++j) {
        if (t[m][j] < -eps) {
          q = j;
          break;
        }
      }
      if (q < 0) return true;
      int r = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t[i][q] > eps) {
          const double ratio = t[i][w - 1] / t[i][q];
          if (r < 0 || ratio < best - 1e-13 ||
              (std::abs(ratio - best) <= 1e-13 && basis[i] < basis[r])) {
            r = i;
            best = ratio;
          }
        }
      }
      if (r < 0) return false;
      pivot(r, q);
    }
  };
  // Phase one: minimize the sum of artificials.
  for (int j = 0; j < w; ++j) t[m][j] = 0.0;
  for (int i = 0; i < m; ++i) t[m][n + i] = 1.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < w; ++j) t[m][j] -= t[i][j];
  }
  run(n + m);
  if (-t[m][w - 1] > 1e-9) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(t[i][j]) > eps) {
        pivot(i, j);
        break;
      }
    }
  }
  // Phase two over structurals only.
  for (int j = 0; j < w; ++j) t[m][j] = 0.0;
  for (int j = 0; j < n; ++j) t[m][j] = c[j];
  for (int i = 0; i < m; ++i) {
    const int k = basis[i];
    if (k < n && c[k] != 0.0) {
      const double f = c[k];
      for (int j = 0; j < w; ++j) t[m][j] -= f * t[i][j];
    }
  }
  if (!run(n)) return -std::numeric_limits<double>::infinity();
  return -t[m][w - 1];
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace qmbt
