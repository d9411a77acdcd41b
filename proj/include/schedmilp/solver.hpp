// Exact MILP solving at desk scale: a two-phase bounded-variable primal
// simplex on a dense tableau, plus best-bound branch and bound over the
// integer variables. Determinism comes from fixed pivot and node rules.
#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "schedmilp/solver_types.hpp"

namespace schedmilp {
namespace detail {

constexpr double kPivotEps = 1e-9;
constexpr double kReducedCostEps = 1e-9;
constexpr int kDegenerateStreakForBland = 12;

// Dense two-phase simplex over 0-shifted columns with explicit lower/upper
// bounds per column. Nonbasic columns rest at one of their bounds; the rhs
// column of the tableau stays B^-1 b and actual basic values are computed
// against the nonbasic bound values each iteration.
class BoundedSimplex {
 public:
  // lo/hi may be +-infinity except where noted; artificial columns are
  // appended internally.
  BoundedSimplex(const std::vector<std::vector<double>>& rows_eq,
                 const std::vector<double>& rhs, std::vector<double> lo, std::vector<double> hi,
                 long iteration_limit)
      : m_(rows_eq.size()),
        n_(lo.size()),
        lo_(std::move(lo)),
        hi_(std::move(hi)),
        iteration_limit_(iteration_limit) {
    total_ = n_ + m_;  // structural+slack columns, then artificials
    T_.assign(m_, std::vector<double>(total_ + 1, 0.0));
    basis_.resize(m_);
    at_upper_.assign(total_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) T_[i][j] = rows_eq[i][j];
      T_[i][total_] = rhs[i];
    }
    // Start every original column at a finite bound (lower when finite,
    // otherwise upper, otherwise zero via a pinned free split -- free
    // columns are not produced by this library).
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j]))
        at_upper_[j] = 0;
      else if (std::isfinite(hi_[j]))
        at_upper_[j] = 1;
    }
    // Residual r = b - A x_N decides the artificial signs.
    std::vector<double> r(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double acc = T_[i][total_];
      for (std::size_t j = 0; j < n_; ++j) acc -= T_[i][j] * nonbasic_value(j);
      r[i] = acc;
    }
    lo_.resize(total_, 0.0);
    hi_.resize(total_, kInfinity);
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t col = n_ + i;
      T_[i][col] = r[i] < 0 ? -1.0 : 1.0;
      basis_[i] = static_cast<int>(col);
    }
  }

  // Phase 1 then phase 2. Returns false when infeasible; throws on
  // unbounded phase-2 rays via the flag below.
  enum class Outcome { optimal, infeasible, unbounded };

  Outcome solve(const std::vector<double>& costs) {
    std::vector<double> phase1(total_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) phase1[n_ + i] = 1.0;
    if (run(phase1) == RunResult::unbounded)
      throw SolverError("phase-1 objective unbounded; tableau corrupt");
    if (phase1_value() > 1e-7) return Outcome::infeasible;

    // Artificials are pinned to zero for phase 2.
    for (std::size_t i = 0; i < m_; ++i) hi_[n_ + i] = 0.0;
    std::vector<double> phase2(total_, 0.0);
    for (std::size_t j = 0; j < costs.size() && j < n_; ++j) phase2[j] = costs[j];
    if (run(phase2) == RunResult::unbounded) return Outcome::unbounded;
    return Outcome::optimal;
  }

  // Current value of every original column (structural + slack).
  std::vector<double> values() const {
    std::vector<double> x(total_, 0.0);
    for (std::size_t j = 0; j < total_; ++j)
      if (!is_basic(j)) x[j] = nonbasic_value(j);
    std::vector<double> beta = basic_values();
    for (std::size_t i = 0; i < m_; ++i) x[basis_[i]] = beta[i];
    return x;
  }

 private:
  std::size_t m_, n_, total_;
  std::vector<std::vector<double>> T_;
  std::vector<int> basis_;
  std::vector<std::uint8_t> at_upper_;
  std::vector<double> lo_, hi_;
  long iteration_limit_;

  bool is_basic(std::size_t j) const {
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] == static_cast<int>(j)) return true;
    return false;
  }

  double nonbasic_value(std::size_t j) const {
    if (at_upper_[j]) return std::isfinite(hi_[j]) ? hi_[j] : 0.0;
    return std::isfinite(lo_[j]) ? lo_[j] : 0.0;
  }

  std::vector<double> basic_values() const {
    std::vector<double> beta(m_);
    for (std::size_t i = 0; i < m_; ++i) beta[i] = T_[i][total_];
    for (std::size_t j = 0; j < total_; ++j) {
      if (is_basic(j)) continue;
      double v = nonbasic_value(j);
      if (v == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) beta[i] -= T_[i][j] * v;
    }
    return beta;
  }

  double phase1_value() const {
    std::vector<double> beta = basic_values();
    double total = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= static_cast<int>(n_)) total += beta[i];
    for (std::size_t j = n_; j < total_; ++j)
      if (!is_basic(j)) total += nonbasic_value(j);
    return total;
  }

  double objective_of(const std::vector<double>& c) const {
    std::vector<double> x = values();
    double acc = 0.0;
    for (std::size_t j = 0; j < total_; ++j) acc += c[j] * x[j];
    return acc;
  }

  enum class RunResult { optimal, unbounded };

  RunResult run(const std::vector<double>& c) {
    int degenerate_streak = 0;
    double last_obj = objective_of(c);
    for (long iter = 0; iter < iteration_limit_; ++iter) {
      // Reduced costs computed fresh each iteration.
      std::vector<double> y(m_);
      for (std::size_t i = 0; i < m_; ++i) y[i] = c[basis_[i]];
      std::vector<double> d(total_, 0.0);
      bool use_bland = degenerate_streak >= kDegenerateStreakForBland;

      int enter = -1;
      int direction = 0;  // +1 entering rises from lower, -1 falls from upper
      double best_score = kReducedCostEps;
      for (std::size_t j = 0; j < total_; ++j) {
        if (is_basic(j)) continue;
        if (hi_[j] - lo_[j] == 0.0) continue;  // fixed column
        double dj = c[j];
        for (std::size_t i = 0; i < m_; ++i) dj -= y[i] * T_[i][j];
        d[j] = dj;
        int dir = 0;
        if (!at_upper_[j] && dj < -kReducedCostEps)
          dir = +1;
        else if (at_upper_[j] && dj > kReducedCostEps)
          dir = -1;
        if (dir == 0) continue;
        if (use_bland) {
          enter = static_cast<int>(j);
          direction = dir;
          break;
        }
        if (std::abs(dj) > best_score) {
          best_score = std::abs(dj);
          enter = static_cast<int>(j);
          direction = dir;
        }
      }
      if (enter < 0) return RunResult::optimal;

      // Ratio test: basics hitting a bound, or the entering column reaching
      // its opposite bound.
      std::vector<double> beta = basic_values();
      double t_own = hi_[enter] - lo_[enter];  // may be infinity
      double t_best = t_own;
      int leave_row = -1;
      bool leave_at_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        double w = direction * T_[i][enter];
        int bcol = basis_[i];
        if (w > kPivotEps) {  // basic value falls toward its lower bound
          if (!std::isfinite(lo_[bcol])) continue;
          double t = (beta[i] - lo_[bcol]) / w;
          if (t < t_best - kPivotEps || (t < t_best + kPivotEps && leave_row >= 0 &&
                                         basis_[i] < basis_[leave_row])) {
            t_best = std::min(t, t_best);
            leave_row = static_cast<int>(i);
            leave_at_upper = false;
          }
        } else if (w < -kPivotEps) {  // basic value rises toward its upper bound
          if (!std::isfinite(hi_[bcol])) continue;
          double t = (hi_[bcol] - beta[i]) / (-w);
          if (t < t_best - kPivotEps || (t < t_best + kPivotEps && leave_row >= 0 &&
                                         basis_[i] < basis_[leave_row])) {
            t_best = std::min(t, t_best);
            leave_row = static_cast<int>(i);
            leave_at_upper = true;
          }
        }
      }

      if (!std::isfinite(t_best)) return RunResult::unbounded;

      if (leave_row < 0 || t_own < t_best - kPivotEps) {
        // Bound flip: the entering column runs to its other bound.
        at_upper_[enter] ^= 1;
      } else {
        int leaving = basis_[leave_row];
        at_upper_[leaving] = leave_at_upper ? 1 : 0;
        pivot(static_cast<std::size_t>(leave_row), static_cast<std::size_t>(enter));
      }

      double obj = objective_of(c);
      if (obj < last_obj - 1e-12)
        degenerate_streak = 0;
      else
        ++degenerate_streak;
      last_obj = obj;
    }
    throw SolverError("simplex iteration limit reached");
  }

  void pivot(std::size_t row, std::size_t col) {
    double p = T_[row][col];
    if (std::abs(p) < kPivotEps) throw SolverError("numerically zero pivot");
    for (std::size_t j = 0; j <= total_; ++j) T_[row][j] /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      double f = T_[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= total_; ++j) T_[i][j] -= f * T_[row][j];
    }
    basis_[row] = static_cast<int>(col);
  }
};

// Equality form with slack columns: row a.x {<=,=,>=} b becomes
// a.x + s = b with s in [0,inf), [0,0] or (-inf,0] respectively.
struct EqualityForm {
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<double> lo, hi;
  std::vector<double> costs;
  std::size_t structurals = 0;
};

inline EqualityForm to_equality_form(const StandardForm& sf, const std::vector<double>& lb,
                                     const std::vector<double>& ub) {
  EqualityForm eq;
  const std::size_t n = sf.num_vars();
  const std::size_t m = sf.rows.size();
  eq.structurals = n;
  eq.lo = lb;
  eq.hi = ub;
  eq.costs.assign(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    eq.costs[j] = sf.minimize ? sf.objective[j] : -sf.objective[j];
  eq.rows.assign(m, std::vector<double>(n + m, 0.0));
  eq.rhs.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) eq.rows[i][j] = sf.rows[i].coefs[j];
    eq.rows[i][n + i] = 1.0;
    eq.rhs[i] = sf.rows[i].rhs;
    switch (sf.rows[i].sense) {
      case ConstraintSense::le:
        eq.lo.push_back(0.0);
        eq.hi.push_back(kInfinity);
        break;
      case ConstraintSense::eq:
        eq.lo.push_back(0.0);
        eq.hi.push_back(0.0);
        break;
      case ConstraintSense::ge:
        eq.lo.push_back(-kInfinity);
        eq.hi.push_back(0.0);
        break;
    }
  }
  return eq;
}

struct LpOutcome {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;        // in the original sense
  std::vector<double> solution;  // structural variables only
};

inline LpOutcome solve_lp_bounds(const StandardForm& sf, const std::vector<double>& lb,
                                 const std::vector<double>& ub, const SolverOptions& opts) {
  for (std::size_t j = 0; j < sf.num_vars(); ++j)
    if (lb[j] > ub[j] + 1e-12) return {SolveStatus::infeasible, 0.0, {}};

  EqualityForm eq = to_equality_form(sf, lb, ub);
  BoundedSimplex simplex(eq.rows, eq.rhs, eq.lo, eq.hi, opts.iteration_limit);
  auto outcome = simplex.solve(eq.costs);
  if (outcome == BoundedSimplex::Outcome::infeasible) return {SolveStatus::infeasible, 0.0, {}};
  if (outcome == BoundedSimplex::Outcome::unbounded) return {SolveStatus::unbounded, 0.0, {}};

  std::vector<double> all = simplex.values();
  LpOutcome out;
  out.status = SolveStatus::optimal;
  out.solution.assign(all.begin(), all.begin() + eq.structurals);
  double obj = 0.0;
  for (std::size_t j = 0; j < sf.num_vars(); ++j) obj += sf.objective[j] * out.solution[j];
  out.objective = obj;
  return out;
}

// Finite caps for unbounded integer variables. Valid for the nonnegative
// covering-style rows this engine generates: no useful column exceeds the
// total of the per-row requirements, so the per-row candidates are summed
// rather than maxed.
inline double auto_upper_bound(const StandardForm& sf) {
  double total = 0.0;
  for (const auto& row : sf.rows) {
    if (row.rhs <= 0) continue;
    double min_pos = kInfinity;
    for (double a : row.coefs)
      if (a > 0 && a < min_pos) min_pos = a;
    if (!std::isfinite(min_pos)) continue;
    total += std::ceil(row.rhs / min_pos);
  }
  return total;
}

struct BnbNode {
  std::vector<double> lb, ub;
  double bound = -kInfinity;
  long seq = 0;
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;                              // FIFO on ties
  }
};

}  // namespace detail

// LP relaxation solve (integrality ignored).
inline SolveResult solve_lp(const StandardForm& sf, const SolverOptions& opts = {}) {
  detail::LpOutcome lp = detail::solve_lp_bounds(sf, sf.lb, sf.ub, opts);
  SolveResult res;
  res.status = lp.status;
  res.objective = lp.objective;
  res.best_bound = lp.objective;
  if (lp.status == SolveStatus::optimal)
    for (std::size_t j = 0; j < sf.num_vars(); ++j) res.assignment[sf.var_names[j]] = lp.solution[j];
  return res;
}

// Exact branch and bound: best-bound node selection, most-fractional
// branching, lower branch first on ties.
inline SolveResult solve_milp(const StandardForm& sf, const SolverOptions& opts = {}) {
  SolveResult res;

  std::vector<double> root_lb = sf.lb, root_ub = sf.ub;
  const double cap = detail::auto_upper_bound(sf);
  for (std::size_t j = 0; j < sf.num_vars(); ++j) {
    if (sf.integer[j] && !std::isfinite(root_ub[j])) {
      root_ub[j] = std::max(root_lb[j], cap);
      res.applied_auto_bounds.emplace_back(sf.var_names[j], root_ub[j]);
    }
  }

  std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::BnbNodeOrder> open;
  long seq = 0;
  open.push({root_lb, root_ub, -kInfinity, seq++});

  bool have_incumbent = false;
  double incumbent_obj = kInfinity;
  std::vector<double> incumbent;
  bool root_unbounded = false;

  while (!open.empty()) {
    if (res.nodes_explored >= opts.node_limit) break;
    detail::BnbNode node = open.top();
    open.pop();
    if (have_incumbent && node.bound >= incumbent_obj - 1e-9) continue;
    ++res.nodes_explored;

    detail::LpOutcome lp = detail::solve_lp_bounds(sf, node.lb, node.ub, opts);
    if (lp.status == SolveStatus::infeasible) continue;
    if (lp.status == SolveStatus::unbounded) {
      root_unbounded = true;
      break;
    }
    const double node_obj = sf.minimize ? lp.objective : -lp.objective;
    if (have_incumbent && node_obj >= incumbent_obj - 1e-9) continue;

    // Most-fractional integer variable; ties to the lowest index.
    int branch_var = -1;
    double best_frac_dist = 0.5;
    for (std::size_t j = 0; j < sf.num_vars(); ++j) {
      if (!sf.integer[j]) continue;
      double v = lp.solution[j];
      double frac = v - std::floor(v);
      double dist = std::abs(frac - 0.5);
      if (std::min(frac, 1.0 - frac) <= opts.integrality_tol) continue;
      if (branch_var < 0 || dist < best_frac_dist - 1e-12) {
        best_frac_dist = dist;
        branch_var = static_cast<int>(j);
      }
    }

    if (branch_var < 0) {
      if (!have_incumbent || node_obj < incumbent_obj - 1e-12) {
        have_incumbent = true;
        incumbent_obj = node_obj;
        incumbent = lp.solution;
        for (std::size_t j = 0; j < sf.num_vars(); ++j)
          if (sf.integer[j]) incumbent[j] = std::round(incumbent[j]);
      }
      continue;
    }

    double v = lp.solution[branch_var];
    detail::BnbNode down{node.lb, node.ub, node_obj, seq++};
    down.ub[branch_var] = std::floor(v);
    detail::BnbNode up{node.lb, node.ub, node_obj, seq++};
    up.lb[branch_var] = std::ceil(v);
    open.push(std::move(down));  // lower branch first on equal bounds
    open.push(std::move(up));
  }

  if (root_unbounded) {
    res.status = SolveStatus::unbounded;
    return res;
  }

  const double sense = sf.minimize ? 1.0 : -1.0;
  if (!open.empty() && res.nodes_explored >= opts.node_limit) {
    res.status = SolveStatus::node_limit;
    res.best_bound = sense * std::min(open.top().bound, incumbent_obj);
  } else {
    res.status = have_incumbent ? SolveStatus::optimal : SolveStatus::infeasible;
    res.best_bound = sense * incumbent_obj;
  }
  if (have_incumbent) {
    res.objective = sense * incumbent_obj;
    for (std::size_t j = 0; j < sf.num_vars(); ++j)
      res.assignment[sf.var_names[j]] = incumbent[j];
    if (res.status == SolveStatus::optimal) res.best_bound = res.objective;
  }
  return res;
}

inline SolveResult solve_model(const ModelIR& m, const SolverOptions& opts = {}) {
  return solve_milp(to_standard_form(m), opts);
}

}  // namespace schedmilp
