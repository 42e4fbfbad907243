#ifndef LINKFLOW_SIMPLEX_HPP
#define LINKFLOW_SIMPLEX_HPP

// Dense two-phase tableau simplex for
//
//   minimize c'x  subject to  A x = b,  x >= 0.
//
// Bland's rule is used for both entering and leaving choices, so the method
// terminates on degenerate problems. Intended for the exact oracles on
// desk-scale instances (a few hundred rows at most).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "linkflow/error.hpp"
#include "linkflow/linalg.hpp"

namespace linkflow {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = std::numeric_limits<double>::infinity();
  Vector x;
  std::size_t pivots = 0;
};

struct LpOptions {
  double tolerance = 1e-9;
  std::size_t max_pivots = 200000;
};

namespace detail {

class Tableau {
 public:
  Tableau(Index rows, Index cols) : t_(Matrix::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  double& at(Index r, Index c) { return t_(r, c); }
  double rhs(Index r) const { return t_(r, t_.cols() - 1); }
  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  Index basic(Index r) const { return basis_[r]; }
  void set_basic(Index r, Index var) { basis_[r] = var; }
  double cost(Index c) const { return t_(rows(), c); }
  double objective() const { return -t_(rows(), cols()); }
  Matrix& raw() { return t_; }

  void pivot(Index r, Index c) {
    t_.row(r) /= t_(r, c);
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[r] = c;
  }

  // Runs Bland-rule iterations over columns [0, active_cols).
  LpStatus optimize(Index active_cols, const LpOptions& opt, std::size_t& pivots) {
    while (true) {
      Index enter = -1;
      for (Index c = 0; c < active_cols; ++c) {
        if (cost(c) < -opt.tolerance) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      double best = std::numeric_limits<double>::infinity();
      for (Index r = 0; r < rows(); ++r) {
        const double a = t_(r, enter);
        if (a > opt.tolerance) best = std::min(best, std::max(0.0, rhs(r)) / a);
      }
      Index leave = -1;
      for (Index r = 0; r < rows(); ++r) {
        const double a = t_(r, enter);
        if (a > opt.tolerance && std::max(0.0, rhs(r)) / a <= best + opt.tolerance &&
            (leave < 0 || basis_[r] < basis_[leave])) {
          leave = r;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
      if (++pivots > opt.max_pivots) return LpStatus::IterationLimit;
    }
  }

 private:
  Matrix t_;
  std::vector<Index> basis_;
};

}  // namespace detail

inline LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c,
                         const LpOptions& opt = {}) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (b.size() != m || c.size() != n) {
    throw Error(Errc::DimensionMismatch, "LP data dimensions disagree");
  }
  LpResult res;
  // Phase 1 tableau: columns = n structural + m artificial.
  detail::Tableau tab(m, n + m);
  for (Index r = 0; r < m; ++r) {
    const double sign = b(r) < 0.0 ? -1.0 : 1.0;
    tab.raw().row(r).head(n) = sign * a.row(r);
    tab.at(r, n + r) = 1.0;
    tab.at(r, n + m) = sign * b(r);
    tab.set_basic(r, n + r);
  }
  // Phase 1 objective: sum of artificials, expressed in non-basic terms.
  for (Index r = 0; r < m; ++r) tab.raw().row(m) -= tab.raw().row(r);
  for (Index r = 0; r < m; ++r) tab.at(m, n + r) = 0.0;

  const double feas_tol = opt.tolerance * (1.0 + b.cwiseAbs().maxCoeff());
  auto st = tab.optimize(n + m, opt, res.pivots);
  if (st == LpStatus::IterationLimit) {
    res.status = st;
    return res;
  }
  if (tab.objective() > feas_tol) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  // Drive remaining artificials out of the basis; rows that cannot be
  // pivoted are redundant and get zeroed.
  std::vector<bool> redundant(static_cast<std::size_t>(m), false);
  for (Index r = 0; r < m; ++r) {
    if (tab.basic(r) < n) continue;
    Index col = -1;
    for (Index j = 0; j < n; ++j) {
      if (std::abs(tab.at(r, j)) > opt.tolerance) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      tab.pivot(r, col);
    } else {
      redundant[static_cast<std::size_t>(r)] = true;
    }
  }
  // Phase 2: zero artificial columns out of play and install the real costs.
  for (Index r = 0; r <= m; ++r) {
    for (Index j = n; j < n + m; ++j) tab.at(r, j) = 0.0;
  }
  for (Index r = 0; r < m; ++r) {
    if (redundant[static_cast<std::size_t>(r)]) tab.raw().row(r).setZero();
  }
  tab.raw().row(m).setZero();
  tab.raw().row(m).head(n) = c.transpose();
  for (Index r = 0; r < m; ++r) {
    if (redundant[static_cast<std::size_t>(r)]) continue;
    const Index v = tab.basic(r);
    const double cv = tab.cost(v);
    if (cv != 0.0) tab.raw().row(m) -= cv * tab.raw().row(r);
  }
  st = tab.optimize(n, opt, res.pivots);
  if (st != LpStatus::Optimal) {
    res.status = st;
    return res;
  }

  // Recover x from a fresh solve with the optimal basis so round-off from the
  // tableau updates does not leak into the reported solution.
  std::vector<Index> rows;
  std::vector<Index> cols;
  for (Index r = 0; r < m; ++r) {
    if (!redundant[static_cast<std::size_t>(r)]) {
      rows.push_back(r);
      cols.push_back(tab.basic(r));
    }
  }
  res.x = Vector::Zero(n);
  bool refined = false;
  if (!rows.empty()) {
    try {
      Matrix basis = select_cols(select_rows(a, rows), cols);
      Vector xb = solve_square(basis, select(b, rows), 1e-12).x;
      for (std::size_t i = 0; i < cols.size(); ++i) res.x(cols[i]) = std::max(0.0, xb(static_cast<Index>(i)));
      refined = true;
    } catch (const Error&) {
      refined = false;
    }
  }
  if (!refined) {
    res.x.setZero();
    for (Index r = 0; r < m; ++r) {
      if (!redundant[static_cast<std::size_t>(r)]) res.x(tab.basic(r)) = std::max(0.0, tab.rhs(r));
    }
  }
  res.objective = c.dot(res.x);
  res.status = LpStatus::Optimal;
  return res;
}

}  // namespace linkflow

#endif  // LINKFLOW_SIMPLEX_HPP
