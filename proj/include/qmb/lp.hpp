#pragma once

// Dense revised simplex for small-row linear programs
//
//   minimize    c'x
//   subject to  row_i(x) {=,<=,>=} b_i
//               lower <= x <= upper
//
// The basis inverse is kept explicitly (m x m) and refactored periodically,
// which suits the programs in this library: few rows (at most a few
// thousand) and possibly very many columns. Columns may be appended between
// solves (column generation) and bounds may be changed between solves
// (branch and bound, warm-started with the dual simplex).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmb/error.hpp"

namespace qmb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { equal, less_equal, greater_equal };

// Column-major sparse LP.
struct LpModel {
  std::vector<RowSense> sense;
  std::vector<double> rhs;
  std::vector<std::size_t> col_start{0};
  std::vector<int> row_index;
  std::vector<double> value;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;

  int num_rows() const { return static_cast<int>(rhs.size()); }
  int num_cols() const { return static_cast<int>(cost.size()); }

  int add_row(RowSense s, double b) {
    sense.push_back(s);
    rhs.push_back(b);
    return num_rows() - 1;
  }

  int add_column(double c, double lo, double hi, std::span<const int> rows,
                 std::span<const double> vals) {
    if (rows.size() != vals.size()) {
      throw std::invalid_argument("column rows/values size mismatch");
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (rows[k] < 0 || rows[k] >= num_rows()) {
        throw std::invalid_argument("column references a missing row");
      }
      row_index.push_back(rows[k]);
      value.push_back(vals[k]);
    }
    col_start.push_back(row_index.size());
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_cols() - 1;
  }
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit,
                      time_limit };

inline const char* status_name(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::time_limit: return "time_limit";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;      // structural values
  // One per row; reduced cost = c_j - duals.A_j. When phase one ends
  // infeasible these are the phase-one duals and `objective` is the
  // remaining infeasibility.
  std::vector<double> duals;
  long iterations = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-10;
  double pivot_tol = 1e-9;
  // Bland's rule is engaged after this many consecutive degenerate pivots.
  int bland_after = 50;
  int refactor_every = 100;
  long max_iterations = 50'000'000;
  // Start from a penalized artificial basis instead of a phase-one solve.
  bool big_m = false;
  double big_m_penalty = 1e4;
  // Artificial values above this are reported as infeasibility (big-M).
  double artificial_tol = 1e-7;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

class Simplex {
 public:
  enum class VarKind : std::uint8_t { logical, structural, artificial };
  enum class VarStatus : std::uint8_t { basic, at_lower, at_upper, free_zero };

  // Snapshot of a basis, restorable with `restore`.
  struct Basis {
    std::vector<int> basic;
    std::vector<VarStatus> status;
    std::vector<double> inverse;  // empty: refactor on restore
    int since_refactor = 0;
  };

  explicit Simplex(LpModel model, SimplexOptions opt = {})
      : model_(std::move(model)), opt_(opt), m_(model_.num_rows()) {
    for (int i = 0; i < m_; ++i) {
      double lo = 0.0, hi = 0.0;
      switch (model_.sense[i]) {
        case RowSense::equal: break;
        case RowSense::less_equal: hi = kInf; break;
        case RowSense::greater_equal: lo = -kInf; break;
      }
      push_var(VarKind::logical, i, 1.0, 0.0, lo, hi);
    }
    for (int j = 0; j < model_.num_cols(); ++j) {
      structural_.push_back(push_var(VarKind::structural, j, 1.0,
                                     model_.cost[j], model_.lower[j],
                                     model_.upper[j]));
    }
  }

  const LpModel& model() const { return model_; }
  int num_rows() const { return m_; }
  int num_cols() const { return model_.num_cols(); }
  const SimplexOptions& options() const { return opt_; }
  void set_deadline(std::optional<std::chrono::steady_clock::time_point> d) {
    opt_.deadline = d;
  }

  // Appends a structural column. It enters as nonbasic at its lower bound,
  // so a primal-feasible basis stays primal feasible.
  int add_column(double c, double lo, double hi, std::span<const int> rows,
                 std::span<const double> vals) {
    int j = model_.add_column(c, lo, hi, rows, vals);
    int k = push_var(VarKind::structural, j, 1.0, c, lo, hi);
    structural_.push_back(k);
    if (have_basis_) {
      status_[k] = initial_status(k);
      x_[k] = nonbasic_value(k);
      if (x_[k] != 0.0) refresh_primal();
    }
    return j;
  }

  void set_bounds(int j, double lo, double hi) {
    int k = structural_.at(j);
    model_.lower[j] = lo;
    model_.upper[j] = hi;
    lo_[k] = lo;
    hi_[k] = hi;
    if (have_basis_ && status_[k] != VarStatus::basic) {
      // Keep the current value when it sits on one of the new bounds.
      if (x_[k] == lo && lo > -kInf) {
        status_[k] = VarStatus::at_lower;
        return;
      }
      if (x_[k] == hi && hi < kInf) {
        status_[k] = VarStatus::at_upper;
        return;
      }
      if (status_[k] == VarStatus::at_upper && hi == kInf) {
        status_[k] = VarStatus::at_lower;
      }
      if (status_[k] == VarStatus::at_lower && lo == -kInf) {
        status_[k] = hi == kInf ? VarStatus::free_zero : VarStatus::at_upper;
      }
      shift_nonbasic(k, nonbasic_value(k));
    }
  }

  // Changes an objective coefficient; the basis stays primal feasible.
  void set_cost(int j, double c) {
    duals_valid_ = false;
    model_.cost[j] = c;
    cost_[structural_.at(j)] = c;
  }

  double lower(int j) const { return model_.lower[j]; }
  double upper(int j) const { return model_.upper[j]; }

  // Primal simplex. Warm-starts from the current basis when it is primal
  // feasible; otherwise starts from a logical/artificial basis.
  LpSolution solve() {
    const long start_iter = iterations_;
    if (primal_stale_ && have_basis_) refresh_primal();
    if (!have_basis_ || !primal_feasible()) cold_start();

    LpStatus st = LpStatus::optimal;
    if (!opt_.big_m && any_artificial_positive()) {
      phase_ = Phase::one;
      duals_valid_ = false;
      st = run_primal();
      if (st == LpStatus::optimal && any_artificial_positive()) {
        st = LpStatus::infeasible;
      }
      if (st != LpStatus::optimal) return finish(st, start_iter);
      retire_artificials();
    }
    // With big-M penalties a positive artificial at optimum signals
    // infeasibility; callers inspect `artificial_mass`.
    phase_ = Phase::two;
    duals_valid_ = false;
    st = run_primal();
    return finish(st, start_iter);
  }

  // Dual simplex from the current basis; requires a dual-feasible basis,
  // as left by a previous optimal solve followed by bound changes on
  // structural variables. Falls back to `solve()` otherwise.
  LpSolution solve_dual() {
    const long start_iter = iterations_;
    if (!have_basis_ || phase_ != Phase::two) return solve();
    if (primal_stale_) refresh_primal();
    ensure_duals();
    if (!dual_feasible()) return solve();
    LpStatus st = run_dual();
    if (st == LpStatus::iteration_limit) return solve();
    return finish(st, start_iter);
  }

  // Moves nonbasic boxed variables to the bound their reduced cost favors,
  // making the current basis dual feasible for a dual simplex restart.
  // Returns false when an unboxed variable has the wrong sign.
  bool make_dual_feasible() {
    if (!have_basis_ || phase_ != Phase::two) return false;
    if (primal_stale_) refresh_primal();
    ensure_duals();
    const double tol = 1e-7;
    for (std::size_t k = 0; k < kind_.size(); ++k) {
      if (status_[k] == VarStatus::basic || lo_[k] == hi_[k]) continue;
      const double d = reduced_cost(int(k));
      VarStatus want = status_[k];
      if (d < -tol) want = VarStatus::at_upper;
      if (d > tol) want = VarStatus::at_lower;
      if (want == status_[k]) continue;
      if ((want == VarStatus::at_upper && hi_[k] == kInf) ||
          (want == VarStatus::at_lower && lo_[k] == -kInf)) {
        return false;
      }
      status_[k] = want;
      shift_nonbasic(int(k), nonbasic_value(int(k)));
    }
    return true;
  }

  Basis basis(bool with_inverse = false) const {
    Basis b{basis_, status_, {}, since_refactor_};
    if (with_inverse) b.inverse = binv_;
    return b;
  }

  void restore(const Basis& b) {
    basis_ = b.basic;
    status_ = b.status;
    status_.resize(kind_.size(), VarStatus::at_lower);
    for (std::size_t k = b.status.size(); k < kind_.size(); ++k) {
      status_[k] = initial_status(static_cast<int>(k));
    }
    pos_.assign(kind_.size(), -1);
    for (int r = 0; r < m_; ++r) pos_[basis_[r]] = r;
    for (std::size_t k = 0; k < kind_.size(); ++k) {
      if (status_[k] != VarStatus::basic) x_[k] = nonbasic_value(int(k));
    }
    have_basis_ = true;
    phase_ = Phase::two;
    duals_valid_ = false;
    if (b.inverse.size() == binv_.size() && b.basic.size() == basis_.size()) {
      binv_ = b.inverse;
      since_refactor_ = b.since_refactor;
      refresh_primal();
    } else {
      refactor();
    }
  }


  long iterations() const { return iterations_; }

  // Structural indices currently basic.
  std::vector<int> basic_structurals() const {
    std::vector<int> out;
    for (int k : basis_) {
      if (kind_[k] == VarKind::structural) out.push_back(ref_[k]);
    }
    return out;
  }

  double artificial_mass() const {
    double s = 0.0;
    for (std::size_t k = 0; k < kind_.size(); ++k) {
      if (kind_[k] == VarKind::artificial) s += std::abs(x_[k]);
    }
    return s;
  }

 private:
  enum class Phase { one, two };

  int push_var(VarKind kind, int ref, double sign, double cost, double lo,
               double hi) {
    kind_.push_back(kind);
    ref_.push_back(ref);
    sign_.push_back(sign);
    cost_.push_back(cost);
    lo_.push_back(lo);
    hi_.push_back(hi);
    x_.push_back(0.0);
    status_.push_back(VarStatus::at_lower);
    pos_.push_back(-1);
    return static_cast<int>(kind_.size()) - 1;
  }

  template <typename F>
  void for_each_entry(int k, F&& f) const {
    if (kind_[k] == VarKind::structural) {
      const int j = ref_[k];
      for (std::size_t p = model_.col_start[j]; p < model_.col_start[j + 1];
           ++p) {
        f(model_.row_index[p], model_.value[p]);
      }
    } else {
      f(ref_[k], sign_[k]);
    }
  }

  double phase_cost(int k) const {
    if (phase_ == Phase::one) {
      return kind_[k] == VarKind::artificial ? 1.0 : 0.0;
    }
    if (kind_[k] == VarKind::artificial) {
      return opt_.big_m ? opt_.big_m_penalty : 0.0;
    }
    return cost_[k];
  }

  VarStatus initial_status(int k) const {
    if (lo_[k] > -kInf) return VarStatus::at_lower;
    if (hi_[k] < kInf) return VarStatus::at_upper;
    return VarStatus::free_zero;
  }

  double nonbasic_value(int k) const {
    switch (status_[k]) {
      case VarStatus::at_lower: return lo_[k];
      case VarStatus::at_upper: return hi_[k];
      default: return 0.0;
    }
  }

  // Rebuilds a starting basis from logicals and artificials.
  void cold_start() {
    const int total = static_cast<int>(kind_.size());
    std::vector<double> r = model_.rhs;
    for (int k = 0; k < total; ++k) {
      if (kind_[k] == VarKind::artificial) {
        lo_[k] = 0.0;
        hi_[k] = kInf;
      }
      status_[k] = initial_status(k);
      x_[k] = kind_[k] == VarKind::structural ? nonbasic_value(k) : 0.0;
      if (kind_[k] == VarKind::structural && x_[k] != 0.0) {
        for_each_entry(k, [&](int i, double a) { r[i] -= a * x_[k]; });
      }
      pos_[k] = -1;
    }
    if (artificial_.empty()) artificial_.assign(m_, -1);
    basis_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
      const int slack = i;
      if (r[i] >= lo_[slack] - opt_.feasibility_tol &&
          r[i] <= hi_[slack] + opt_.feasibility_tol) {
        basis_[i] = slack;
        x_[slack] = r[i];
      } else {
        x_[slack] = std::clamp(0.0, lo_[slack], hi_[slack]);
        status_[slack] = lo_[slack] == 0.0 ? VarStatus::at_lower
                                           : VarStatus::at_upper;
        double rest = r[i] - x_[slack];
        double sign = rest >= 0 ? 1.0 : -1.0;
        if (artificial_[i] < 0) {
          artificial_[i] =
              push_var(VarKind::artificial, i, sign, 0.0, 0.0, kInf);
        }
        int a = artificial_[i];
        sign_[a] = sign;
        lo_[a] = 0.0;
        hi_[a] = kInf;
        basis_[i] = a;
        x_[a] = std::abs(rest);
      }
    }
    for (int k = 0; k < static_cast<int>(kind_.size()); ++k) {
      if (kind_[k] == VarKind::artificial && std::find(basis_.begin(),
                                                       basis_.end(), k) ==
                                                 basis_.end()) {
        // Unused artificial: keep nonbasic at zero.
        status_[k] = VarStatus::at_lower;
        x_[k] = 0.0;
        if (!opt_.big_m) hi_[k] = 0.0;
      }
    }
    for (int r2 = 0; r2 < m_; ++r2) {
      status_[basis_[r2]] = VarStatus::basic;
      pos_[basis_[r2]] = r2;
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = sign_[basis_[i]];
    since_refactor_ = 0;
    have_basis_ = true;
    primal_stale_ = false;
    phase_ = Phase::two;
    duals_valid_ = false;
  }

  bool any_artificial_positive() const {
    for (std::size_t k = 0; k < kind_.size(); ++k) {
      if (kind_[k] == VarKind::artificial &&
          x_[k] > opt_.artificial_tol) {
        return true;
      }
    }
    return false;
  }

  void retire_artificials() {
    for (std::size_t k = 0; k < kind_.size(); ++k) {
      if (kind_[k] == VarKind::artificial) {
        hi_[k] = 0.0;
        if (status_[k] != VarStatus::basic) x_[k] = 0.0;
      }
    }
  }

  bool primal_feasible() const {
    for (int r = 0; r < m_; ++r) {
      int k = basis_[r];
      if (x_[k] < lo_[k] - opt_.feasibility_tol ||
          x_[k] > hi_[k] + opt_.feasibility_tol) {
        return false;
      }
    }
    return true;
  }

  std::size_t idx(int r, int c) const {
    return static_cast<std::size_t>(r) * m_ + c;
  }

  // Gauss-Jordan inversion of the basis matrix.
  void refactor() {
    duals_valid_ = false;
    std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int c = 0; c < m_; ++c) {
      for_each_entry(basis_[c], [&](int i, double a) { b[idx(i, c)] += a; });
    }
    binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = 1.0;
    std::vector<int> nz_b, nz_i;
    for (int c = 0; c < m_; ++c) {
      int piv = c;
      for (int r = c + 1; r < m_; ++r) {
        if (std::abs(b[idx(r, c)]) > std::abs(b[idx(piv, c)])) piv = r;
      }
      if (std::abs(b[idx(piv, c)]) < 1e-13) {
        throw std::runtime_error("simplex basis became singular");
      }
      if (piv != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(b[idx(piv, k)], b[idx(c, k)]);
          std::swap(binv_[idx(piv, k)], binv_[idx(c, k)]);
        }
      }
      const double inv = 1.0 / b[idx(c, c)];
      for (int k = 0; k < m_; ++k) {
        b[idx(c, k)] *= inv;
        binv_[idx(c, k)] *= inv;
      }
      nz_b.clear();
      nz_i.clear();
      for (int k = 0; k < m_; ++k) {
        if (b[idx(c, k)] != 0.0) nz_b.push_back(k);
        if (binv_[idx(c, k)] != 0.0) nz_i.push_back(k);
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = b[idx(r, c)];
        if (f == 0.0) continue;
        for (int k : nz_b) b[idx(r, k)] -= f * b[idx(c, k)];
        for (int k : nz_i) binv_[idx(r, k)] -= f * binv_[idx(c, k)];
      }
    }
    // Column c of B was reduced to e_c, so row c of binv_ belongs to the
    // basic variable of column c.
    since_refactor_ = 0;
    refresh_primal();
  }

  // x_B = B^{-1} (b - N x_N).
  void refresh_primal() {
    std::vector<double> r = model_.rhs;
    for (std::size_t k = 0; k < kind_.size(); ++k) {
      if (status_[k] == VarStatus::basic) continue;
      x_[k] = nonbasic_value(static_cast<int>(k));
      if (x_[k] != 0.0) {
        for_each_entry(int(k), [&](int i, double a) { r[i] -= a * x_[k]; });
      }
    }
    for (int row = 0; row < m_; ++row) {
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += binv_[idx(row, i)] * r[i];
      x_[basis_[row]] = s;
    }
    primal_stale_ = false;
  }

  void ensure_duals() {
    if (!duals_valid_) compute_duals();
  }

  // Moves a nonbasic variable and updates the basic values: x_B -= delta *
  // B^{-1} a_k.
  void shift_nonbasic(int k, double value) {
    const double delta = value - x_[k];
    x_[k] = value;
    if (delta == 0.0 || primal_stale_) return;
    const std::vector<double> alpha = ftran(k);
    for (int i = 0; i < m_; ++i) {
      if (alpha[i] != 0.0) x_[basis_[i]] -= delta * alpha[i];
    }
  }

  void compute_duals() {
    duals_valid_ = true;
    y_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      const double c = phase_cost(basis_[r]);
      if (c == 0.0) continue;
      for (int i = 0; i < m_; ++i) y_[i] += c * binv_[idx(r, i)];
    }
  }

  double reduced_cost(int k) const {
    double d = phase_cost(k);
    for_each_entry(k, [&](int i, double a) { d -= y_[i] * a; });
    return d;
  }

  bool dual_feasible() const {
    const double tol = 1e-7;
    for (std::size_t k = 0; k < kind_.size(); ++k) {
      if (status_[k] == VarStatus::basic || lo_[k] == hi_[k]) continue;
      const double d = reduced_cost(int(k));
      if (status_[k] == VarStatus::at_lower && d < -tol) return false;
      if (status_[k] == VarStatus::at_upper && d > tol) return false;
      if (status_[k] == VarStatus::free_zero && std::abs(d) > tol) return false;
    }
    return true;
  }

  std::vector<double> ftran(int k) const {
    std::vector<double> alpha(m_, 0.0);
    for_each_entry(k, [&](int i, double a) {
      for (int r = 0; r < m_; ++r) alpha[r] += binv_[idx(r, i)] * a;
    });
    return alpha;
  }

  void pivot(int r, const std::vector<double>& alpha) {
    duals_valid_ = false;
    const double inv = 1.0 / alpha[r];
    double* row_r = &binv_[idx(r, 0)];
    for (int c = 0; c < m_; ++c) row_r[c] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == r || alpha[i] == 0.0) continue;
      const double f = alpha[i];
      double* row_i = &binv_[idx(i, 0)];
      for (int c = 0; c < m_; ++c) row_i[c] -= f * row_r[c];
    }
  }

  bool out_of_time() const {
    return opt_.deadline && std::chrono::steady_clock::now() > *opt_.deadline;
  }

  LpStatus run_primal() {
    int degenerate = 0;
    bool bland = false;
    const long start = iterations_;
    while (true) {
      if (iterations_ - start > opt_.max_iterations) {
        return LpStatus::iteration_limit;
      }
      if ((iterations_ & 63) == 0 && out_of_time()) return LpStatus::time_limit;
      if (since_refactor_ >= opt_.refactor_every) refactor();
      compute_duals();

      // Pricing.
      int q = -1;
      double best = 0.0;
      double dq = 0.0;
      const int total = static_cast<int>(kind_.size());
      for (int k = 0; k < total; ++k) {
        const VarStatus s = status_[k];
        if (s == VarStatus::basic || lo_[k] == hi_[k]) continue;
        const double d = reduced_cost(k);
        double score = 0.0;
        if (s == VarStatus::at_lower && d < -opt_.optimality_tol) {
          score = -d;
        } else if (s == VarStatus::at_upper && d > opt_.optimality_tol) {
          score = d;
        } else if (s == VarStatus::free_zero &&
                   std::abs(d) > opt_.optimality_tol) {
          score = std::abs(d);
        } else {
          continue;
        }
        if (bland) {
          q = k;
          dq = d;
          break;
        }
        if (score > best) {
          best = score;
          q = k;
          dq = d;
        }
      }
      if (q < 0) return LpStatus::optimal;

      const double dir = dq < 0 ? 1.0 : -1.0;
      const std::vector<double> alpha = ftran(q);

      // Ratio test. Basic variable r moves at rate -dir*alpha[r].
      double theta = hi_[q] - lo_[q];  // bound flip
      int leave = -1;
      double leave_alpha = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = alpha[r];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const int k = basis_[r];
        const double rate = -dir * a;
        double limit;
        if (rate < 0) {
          if (lo_[k] == -kInf) continue;
          limit = std::max(0.0, x_[k] - lo_[k]) / -rate;
        } else {
          if (hi_[k] == kInf) continue;
          limit = std::max(0.0, hi_[k] - x_[k]) / rate;
        }
        bool take = false;
        if (leave < 0 && limit < theta) {
          take = true;
        } else if (leave >= 0 || limit < theta) {
          if (limit < theta - 1e-12) {
            take = true;
          } else if (limit <= theta + 1e-12 && leave >= 0) {
            take = bland ? basis_[r] < basis_[leave]
                         : std::abs(a) > std::abs(leave_alpha);
          }
        }
        if (take) {
          theta = limit;
          leave = r;
          leave_alpha = a;
        }
      }
      if (theta == kInf) return LpStatus::unbounded;

      ++iterations_;
      if (theta <= 1e-12) {
        if (++degenerate >= opt_.bland_after) bland = true;
      } else {
        degenerate = 0;
      }

      // Move.
      const double step = dir * theta;
      if (step != 0.0) {
        for (int r = 0; r < m_; ++r) {
          if (alpha[r] != 0.0) x_[basis_[r]] -= step * alpha[r];
        }
      }
      if (leave < 0) {
        // Bound flip.
        status_[q] = status_[q] == VarStatus::at_lower ? VarStatus::at_upper
                                                       : VarStatus::at_lower;
        x_[q] = nonbasic_value(q);
        continue;
      }
      x_[q] += step;
      const int out = basis_[leave];
      const double rate = -dir * alpha[leave];
      status_[out] = rate < 0 ? VarStatus::at_lower : VarStatus::at_upper;
      if (lo_[out] == -kInf && status_[out] == VarStatus::at_lower) {
        status_[out] = VarStatus::free_zero;
      }
      if (hi_[out] == kInf && status_[out] == VarStatus::at_upper) {
        status_[out] = VarStatus::free_zero;
      }
      x_[out] = nonbasic_value(out);
      pos_[out] = -1;
      basis_[leave] = q;
      pos_[q] = leave;
      status_[q] = VarStatus::basic;
      pivot(leave, alpha);
      ++since_refactor_;
    }
  }

  LpStatus run_dual() {
    const long cap = iterations_ + 20L * (m_ + 10) + 1000;
    ensure_duals();
    while (true) {
      if (iterations_ > cap) return LpStatus::iteration_limit;
      if ((iterations_ & 63) == 0 && out_of_time()) return LpStatus::time_limit;
      if (since_refactor_ >= opt_.refactor_every) {
        refactor();
        compute_duals();
      }

      // Leaving row: largest bound violation.
      int r = -1;
      double worst = opt_.feasibility_tol;
      for (int i = 0; i < m_; ++i) {
        const int k = basis_[i];
        double v = 0.0;
        if (x_[k] < lo_[k]) v = lo_[k] - x_[k];
        if (x_[k] > hi_[k]) v = x_[k] - hi_[k];
        if (v > worst) {
          worst = v;
          r = i;
        }
      }
      if (r < 0) return LpStatus::optimal;
      const int out = basis_[r];
      const bool to_lower = x_[out] < lo_[out];
      const double target = to_lower ? lo_[out] : hi_[out];

      const double* rho = &binv_[idx(r, 0)];
      int q = -1;
      double best_ratio = kInf;
      double best_alpha = 0.0;
      const int total = static_cast<int>(kind_.size());
      for (int k = 0; k < total; ++k) {
        const VarStatus s = status_[k];
        if (s == VarStatus::basic || lo_[k] == hi_[k]) continue;
        double a = 0.0;
        for_each_entry(k, [&](int i, double v) { a += rho[i] * v; });
        if (std::abs(a) <= opt_.pivot_tol) continue;
        // x_out = beta - a * x_k: raising x_out needs a < 0 for a variable
        // that may increase, a > 0 for one that may decrease.
        bool can_increase = s == VarStatus::at_lower || s == VarStatus::free_zero;
        bool can_decrease = s == VarStatus::at_upper || s == VarStatus::free_zero;
        bool ok = to_lower ? ((a < 0 && can_increase) || (a > 0 && can_decrease))
                           : ((a > 0 && can_increase) || (a < 0 && can_decrease));
        if (!ok) continue;
        const double d = reduced_cost(k);
        const double ratio = std::abs(d) / std::abs(a);
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && std::abs(a) > std::abs(best_alpha))) {
          best_ratio = ratio;
          q = k;
          best_alpha = a;
        }
      }
      if (q < 0) return LpStatus::infeasible;

      ++iterations_;
      // y' = y + (d_q / alpha_rq) rho_r keeps d_q' = 0.
      const double step = reduced_cost(q) / best_alpha;
      for (int i = 0; i < m_; ++i) y_[i] += step * rho[i];
      const std::vector<double> alpha = ftran(q);
      const double delta = (x_[out] - target) / alpha[r];
      for (int i = 0; i < m_; ++i) {
        if (alpha[i] != 0.0) x_[basis_[i]] -= delta * alpha[i];
      }
      x_[q] += delta;
      status_[out] = to_lower ? VarStatus::at_lower : VarStatus::at_upper;
      x_[out] = target;
      pos_[out] = -1;
      basis_[r] = q;
      pos_[q] = r;
      status_[q] = VarStatus::basic;
      pivot(r, alpha);
      duals_valid_ = true;
      ++since_refactor_;
    }
  }

  LpSolution finish(LpStatus st, long start_iter) {
    LpSolution sol;
    sol.status = st;
    sol.iterations = iterations_ - start_iter;
    sol.x.resize(model_.num_cols());
    for (int j = 0; j < model_.num_cols(); ++j) sol.x[j] = x_[structural_[j]];
    if (st == LpStatus::optimal) {
      ensure_duals();
      sol.duals = y_;
      double obj = 0.0;
      for (int j = 0; j < model_.num_cols(); ++j) {
        obj += model_.cost[j] * sol.x[j];
      }
      if (opt_.big_m) {
        for (std::size_t k = 0; k < kind_.size(); ++k) {
          if (kind_[k] == VarKind::artificial) {
            obj += opt_.big_m_penalty * x_[k];
          }
        }
      }
      sol.objective = obj;
    } else if (st == LpStatus::infeasible && phase_ == Phase::one) {
      // Phase-one duals: a column with c - y.a < 0 under zero structural
      // costs would reduce the infeasibility.
      ensure_duals();
      sol.duals = y_;
      for (std::size_t k = 0; k < kind_.size(); ++k) {
        if (kind_[k] == VarKind::artificial) sol.objective += x_[k];
      }
    }
    return sol;
  }

  LpModel model_;
  SimplexOptions opt_;
  int m_;

  std::vector<VarKind> kind_;
  std::vector<int> ref_;
  std::vector<double> sign_;
  std::vector<double> cost_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  std::vector<VarStatus> status_;
  std::vector<int> pos_;
  std::vector<int> structural_;
  std::vector<int> artificial_;

  std::vector<int> basis_;
  std::vector<double> binv_;
  std::vector<double> y_;
  int since_refactor_ = 0;
  bool duals_valid_ = false;
  long iterations_ = 0;
  bool have_basis_ = false;
  bool primal_stale_ = false;
  Phase phase_ = Phase::two;
};

inline LpSolution solve_lp(const LpModel& model, SimplexOptions opt = {}) {
  Simplex s(model, opt);
  LpSolution sol = s.solve();
  if (opt.big_m && sol.status == LpStatus::optimal &&
      s.artificial_mass() > opt.artificial_tol) {
    sol.status = LpStatus::infeasible;
  }
  return sol;
}

}  // namespace qmb
