#ifndef LINKFLOW_LINALG_HPP
#define LINKFLOW_LINALG_HPP

// Small dense linear-algebra kernels shared by the kernel-basis, correction
// and recoverability code. Matrices here are at most a few thousand wide and
// entries of the incidence matrix are -1/0/+1, so plain partial pivoting is
// sufficient.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>
#include <vector>

#include "linkflow/error.hpp"

namespace linkflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Absolute pivot tolerance used when classifying incidence sub-matrices.
inline constexpr double kPivotTolerance = 1e-9;
/// Absolute pivot tolerance for general square solves.
inline constexpr double kSolveTolerance = 1e-12;

/// In-place LU factorization P*A = L*U with partial (row) pivoting.
class LuFactorization {
 public:
  LuFactorization(const Matrix& a, double tolerance) : lu_(a), perm_(a.rows()) {
    if (a.rows() != a.cols()) {
      throw Error(Errc::DimensionMismatch, "LU factorization needs a square matrix");
    }
    const Index n = a.rows();
    std::iota(perm_.begin(), perm_.end(), Index{0});
    min_pivot_ = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; ++k) {
      Index p = k;
      for (Index i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
      }
      const double pivot = lu_(p, k);
      min_pivot_ = std::min(min_pivot_, std::abs(pivot));
      if (!(std::abs(pivot) > tolerance)) {
        std::ostringstream os;
        os << "pivot " << std::abs(pivot) << " at column " << k << " is below tolerance "
           << tolerance;
        throw Error(Errc::Singular, os.str());
      }
      if (p != k) {
        lu_.row(p).swap(lu_.row(k));
        std::swap(perm_[p], perm_[k]);
      }
      for (Index i = k + 1; i < n; ++i) {
        const double factor = lu_(i, k) / pivot;
        lu_(i, k) = factor;
        if (factor != 0.0) {
          lu_.row(i).tail(n - k - 1) -= factor * lu_.row(k).tail(n - k - 1);
        }
      }
    }
  }

  Matrix solve(const Matrix& b) const {
    const Index n = lu_.rows();
    if (b.rows() != n) {
      throw Error(Errc::DimensionMismatch, "right-hand side row count differs from system order");
    }
    Matrix x(n, b.cols());
    for (Index i = 0; i < n; ++i) x.row(i) = b.row(perm_[i]);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < i; ++j) x.row(i) -= lu_(i, j) * x.row(j);
    }
    for (Index i = n - 1; i >= 0; --i) {
      for (Index j = i + 1; j < n; ++j) x.row(i) -= lu_(i, j) * x.row(j);
      x.row(i) /= lu_(i, i);
    }
    return x;
  }

  double min_pivot() const noexcept { return min_pivot_; }

 private:
  Matrix lu_;
  std::vector<Index> perm_;
  double min_pivot_ = 0.0;
};

struct SquareSolve {
  Matrix x;
  /// max-norm of (Asub * X - B)
  double residual = 0.0;
};

/// Solves Asub * X = B by LU with partial pivoting. Throws Errc::Singular
/// when a pivot magnitude does not exceed `tolerance`.
inline SquareSolve solve_square(const Matrix& asub, const Matrix& b,
                                double tolerance = kSolveTolerance) {
  if (asub.rows() != asub.cols()) {
    throw Error(Errc::DimensionMismatch, "solve_square needs a square coefficient matrix");
  }
  LuFactorization lu(asub, tolerance);
  SquareSolve out;
  out.x = lu.solve(b);
  out.residual = b.size() == 0 ? 0.0 : (asub * out.x - b).cwiseAbs().maxCoeff();
  return out;
}

/// Rank by Gaussian elimination with partial pivoting; a column whose best
/// remaining pivot does not exceed `tolerance` is skipped.
inline Index matrix_rank(Matrix work, double tolerance = kPivotTolerance) {
  const Index rows = work.rows();
  const Index cols = work.cols();
  Index rank = 0;
  for (Index c = 0; c < cols && rank < rows; ++c) {
    Index p = rank;
    for (Index i = rank + 1; i < rows; ++i) {
      if (std::abs(work(i, c)) > std::abs(work(p, c))) p = i;
    }
    if (!(std::abs(work(p, c)) > tolerance)) continue;
    work.row(p).swap(work.row(rank));
    for (Index i = rank + 1; i < rows; ++i) {
      const double factor = work(i, c) / work(rank, c);
      if (factor != 0.0) work.row(i) -= factor * work.row(rank);
    }
    ++rank;
  }
  return rank;
}

/// Operator norm induced by the l1 vector norm: the largest absolute column sum.
inline double operator_one_norm(const Matrix& m) {
  if (m.size() == 0) {
    throw Error(Errc::DimensionMismatch, "operator_one_norm of an empty matrix");
  }
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

/// Gathers the listed rows of `m` in the given order.
inline Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

inline Matrix select_cols(const Matrix& m, const std::vector<Index>& cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
  return out;
}

inline Vector select(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = v(idx[i]);
  return out;
}

}  // namespace linkflow

#endif  // LINKFLOW_LINALG_HPP
