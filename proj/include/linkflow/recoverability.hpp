#ifndef LINKFLOW_RECOVERABILITY_HPP
#define LINKFLOW_RECOVERABILITY_HPP

// Recoverability of a monitored subset S:
//
//   Rec(S; A, M) = inf_{v : Z_S v != 0}  ||Z_{M\S} v||_1 / ||Z_S v||_1
//
// Rec > 1 means arbitrary miscounts confined to S are removed exactly by the
// l1 correction, and with small noise elsewhere the correction error is at
// most lambda(alpha, A, M) * ||e_{M\S}||_1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "linkflow/correction.hpp"
#include "linkflow/error.hpp"
#include "linkflow/kernel.hpp"
#include "linkflow/linalg.hpp"
#include "linkflow/network.hpp"
#include "linkflow/simplex.hpp"

namespace linkflow {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// The rows of Z split into the numerator block Z_{M\S} and denominator
/// block Z_S of the recoverability quotient.
struct QuotientBlocks {
  Matrix numer;
  Matrix denom;
};

inline QuotientBlocks split_blocks(const Matrix& z, const std::vector<Index>& monitored,
                                   const std::vector<Index>& subset) {
  if (subset.empty()) throw Error(Errc::InvalidArgument, "subset S must be nonempty");
  std::vector<Index> m = monitored;
  std::sort(m.begin(), m.end());
  std::vector<Index> s = subset;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (Index j : s) {
    if (!std::binary_search(m.begin(), m.end(), j)) {
      throw Error(Errc::InvalidArgument, "subset S must lie inside the monitored set");
    }
  }
  for (Index j : m) {
    if (j < 0 || j >= z.rows()) throw Error(Errc::DimensionMismatch, "link index out of range");
  }
  std::vector<Index> rest;
  std::set_difference(m.begin(), m.end(), s.begin(), s.end(), std::back_inserter(rest));
  return {select_rows(z, rest), select_rows(z, s)};
}

inline double quotient(const QuotientBlocks& q, const Vector& v) {
  const double den = (q.denom * v).lpNorm<1>();
  if (!(den > 1e-12)) {
    throw Error(Errc::DegenerateDirection, "Z_S v vanishes; the quotient is undefined");
  }
  return (q.numer * v).lpNorm<1>() / den;
}

/// ||Z_{M\S} v||_1 / ||Z_S v||_1
inline double recoverability_quotient(const Matrix& z, const std::vector<Index>& monitored,
                                      const std::vector<Index>& subset, const Vector& v) {
  if (v.size() != z.cols()) throw Error(Errc::DimensionMismatch, "direction length != l - n");
  return quotient(split_blocks(z, monitored, subset), v);
}

struct InnerAdmmConfig {
  double delta = 1.0;
  std::size_t max_iters = 5000;
  double tol = 1e-10;
};

struct InversePowerConfig {
  std::size_t outer_iters = 100;
  InnerAdmmConfig inner;
  std::size_t restarts = 8;
  std::uint64_t seed = 20180101;

  void validate() const {
    if (outer_iters < 1 || restarts < 1 || inner.max_iters < 1) {
      throw Error(Errc::InvalidArgument, "inverse power iteration counts must be >= 1");
    }
    if (!(inner.delta > 0.0) || !(inner.tol > 0.0)) {
      throw Error(Errc::InvalidArgument, "inner ADMM delta and tolerance must be positive");
    }
  }
};

struct InversePowerResult {
  double value = kInfinity;
  Vector v_star;
  /// Quotient after every accepted outer step of the best restart.
  std::vector<double> trace;
  std::size_t restarts_run = 0;
  std::size_t inner_nonconverged = 0;
  std::size_t rejected_steps = 0;
};

namespace detail {

inline Vector signum(const Vector& y) {
  const double eps = 1e-12 * (1.0 + y.cwiseAbs().maxCoeff());
  return y.unaryExpr([eps](double t) { return t > eps ? 1.0 : (t < -eps ? -1.0 : 0.0); });
}

// ADMM for  min ||Z_N v||_1 - <b, v>  subject to ||v||_2 <= 1, splitting
// z = Z_N v. The x-step solves the normal equations, then projects onto the
// unit ball, then shrinks, then takes the scaled dual step.
class BallConstrainedL1 {
 public:
  BallConstrainedL1(const Matrix& zn, const InnerAdmmConfig& cfg)
      : zn_(zn), znt_(zn.transpose()), normal_(znt_ * zn), cfg_(cfg) {}

  bool ok() const { return normal_.info() == Eigen::Success; }

  Vector solve(const Vector& b, const Vector& v0, bool& converged) const {
    const double d = cfg_.delta;
    Vector v = v0;
    Vector z = zn_ * v;
    Vector u = Vector::Zero(z.size());
    converged = false;
    for (std::size_t j = 0; j < cfg_.max_iters; ++j) {
      v = normal_.solve(znt_ * (z + u / d) + b / d);
      const double nv = v.norm();
      if (nv > 1.0) v /= nv;
      const Vector zv = zn_ * v;
      const Vector z_prev = z;
      z = shrink(zv - u / d, 1.0 / d);
      u += d * (z - zv);
      if ((z - zv).norm() <= cfg_.tol && (d * (znt_ * (z - z_prev))).norm() <= cfg_.tol) {
        converged = true;
        break;
      }
    }
    return v;
  }

 private:
  Matrix zn_;
  Matrix znt_;
  Eigen::LLT<Matrix> normal_;
  InnerAdmmConfig cfg_;
};

}  // namespace detail

/// Inverse power iteration for the recoverability quotient, restarted from
/// several initial directions; the smallest final quotient wins.
inline InversePowerResult recoverability_inverse_power(const Matrix& z,
                                                       const std::vector<Index>& monitored,
                                                       const std::vector<Index>& subset,
                                                       const InversePowerConfig& cfg = {}) {
  cfg.validate();
  const QuotientBlocks q = split_blocks(z, monitored, subset);
  const Index k = z.cols();
  if (!(q.denom.cwiseAbs().maxCoeff() > 0.0)) {
    throw Error(Errc::DegenerateSubset, "every row of Z_S is zero; Rec is +infinity");
  }
  InversePowerResult res;

  // A kernel direction of Z_{M\S} gives quotient 0 (it cannot also vanish on
  // S because Z_M has full column rank).
  if (q.numer.rows() == 0 || matrix_rank(q.numer, 1e-9) < k) {
    Eigen::FullPivLU<Matrix> lu(q.numer.rows() == 0 ? Matrix::Zero(1, k) : q.numer);
    lu.setThreshold(1e-9);
    const Matrix ker = lu.kernel();
    for (Index c = 0; c < ker.cols(); ++c) {
      Vector v = ker.col(c).normalized();
      if ((q.denom * v).lpNorm<1>() > 1e-12) {
        res.value = quotient(q, v);
        res.v_star = v;
        res.trace = {res.value};
        res.restarts_run = 0;
        return res;
      }
    }
    throw Error(Errc::NotFullColumnRank, "Z_M does not have full column rank");
  }

  const detail::BallConstrainedL1 inner(q.numer, cfg.inner);
  if (!inner.ok()) throw Error(Errc::NotFullColumnRank, "Z_{M\\S}'Z_{M\\S} is singular");

  // Initial directions: canonical axes with the largest ||Z_S e_j||_1, then
  // seeded Gaussian directions.
  std::vector<Vector> starts;
  std::vector<Index> axes;
  for (Index j = 0; j < k; ++j) {
    if (q.denom.col(j).lpNorm<1>() > 0.0) axes.push_back(j);
  }
  std::stable_sort(axes.begin(), axes.end(), [&](Index a, Index b) {
    return q.denom.col(a).lpNorm<1>() > q.denom.col(b).lpNorm<1>();
  });
  const std::size_t n_axes = std::min(axes.size(), (cfg.restarts + 1) / 2);
  for (std::size_t i = 0; i < n_axes; ++i) starts.push_back(Vector::Unit(k, axes[i]));
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::size_t attempts = 0;
  while (starts.size() < cfg.restarts && attempts < 100 * cfg.restarts) {
    ++attempts;
    Vector v(k);
    for (Index j = 0; j < k; ++j) v(j) = gauss(rng);
    if ((q.denom * v).lpNorm<1>() > 1e-9 * v.norm()) starts.push_back(v);
  }

  for (const Vector& start : starts) {
    Vector v = start.normalized();
    double lam = quotient(q, v);
    std::vector<double> trace{lam};
    for (std::size_t it = 0; it < cfg.outer_iters; ++it) {
      const Vector b = lam * (q.denom.transpose() * detail::signum(q.denom * v));
      bool conv = false;
      const Vector next = inner.solve(b, v, conv);
      if (!conv) ++res.inner_nonconverged;
      if (!((q.denom * next).lpNorm<1>() > 1e-12)) break;
      const double lam_next = quotient(q, next);
      if (!(lam_next < lam - 1e-12 * (1.0 + lam))) {
        if (lam_next > lam) ++res.rejected_steps;
        break;
      }
      v = next;
      lam = lam_next;
      trace.push_back(lam);
    }
    ++res.restarts_run;
    if (lam < res.value) {
      res.value = lam;
      res.v_star = v;
      res.trace = std::move(trace);
    }
  }
  return res;
}

struct ExactRecoverability {
  double value = kInfinity;
  Vector v_star;
  std::size_t feasible_patterns = 0;
};

/// Largest |S| handled by the sign-pattern oracle.
inline constexpr std::size_t kExactRecoverabilityMaxSubset = 12;

/// Exact Rec by enumerating sign patterns s of Z_S v (first entry fixed to +1,
/// since v and -v give the same quotient). Each pattern is the LP
///   min ||Z_{M\S} v||_1  s.t.  s_i (Z_S v)_i >= 0,  sum_i s_i (Z_S v)_i = 1.
inline ExactRecoverability recoverability_exact(const Matrix& z,
                                                const std::vector<Index>& monitored,
                                                const std::vector<Index>& subset) {
  const QuotientBlocks q = split_blocks(z, monitored, subset);
  const auto ns = static_cast<std::size_t>(q.denom.rows());
  if (ns > kExactRecoverabilityMaxSubset) {
    throw Error(Errc::OracleTooLarge, "sign-pattern oracle is capped at |S| <= " +
                                          std::to_string(kExactRecoverabilityMaxSubset));
  }
  if (!(q.denom.cwiseAbs().maxCoeff() > 0.0)) {
    throw Error(Errc::DegenerateSubset, "every row of Z_S is zero; Rec is +infinity");
  }
  const Index k = z.cols();
  const Index r = q.numer.rows();
  const Index s = q.denom.rows();
  // variables: v+ (k), v- (k), p (r), q (r), y (s)
  const Index nv = 2 * k + 2 * r + s;
  const Index rows = r + s + 1;
  ExactRecoverability out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (ns - 1)); ++mask) {
    Vector sign = Vector::Ones(s);
    for (std::size_t i = 1; i < ns; ++i) {
      if (mask & (std::uint64_t{1} << (i - 1))) sign(static_cast<Index>(i)) = -1.0;
    }
    Matrix a = Matrix::Zero(rows, nv);
    Vector b = Vector::Zero(rows);
    a.block(0, 0, r, k) = q.numer;
    a.block(0, k, r, k) = -q.numer;
    a.block(0, 2 * k, r, r) = -Matrix::Identity(r, r);
    a.block(0, 2 * k + r, r, r) = Matrix::Identity(r, r);
    const Matrix signed_denom = sign.asDiagonal() * q.denom;
    a.block(r, 0, s, k) = signed_denom;
    a.block(r, k, s, k) = -signed_denom;
    a.block(r, 2 * k + 2 * r, s, s) = -Matrix::Identity(s, s);
    a.block(r + s, 2 * k + 2 * r, 1, s).setOnes();
    b(r + s) = 1.0;
    Vector c = Vector::Zero(nv);
    c.segment(2 * k, 2 * r).setOnes();
    const LpResult lp = solve_lp(a, b, c);
    if (lp.status != LpStatus::Optimal) continue;
    ++out.feasible_patterns;
    const Vector v = lp.x.head(k) - lp.x.segment(k, k);
    const double den = (q.denom * v).lpNorm<1>();
    if (!(den > 1e-12)) continue;
    const double val = (q.numer * v).lpNorm<1>() / den;
    if (val < out.value) {
      out.value = val;
      out.v_star = v;
    }
  }
  return out;
}

struct StabilityBound {
  double lambda = 0.0;
  /// min over examined K of ||(A^{K^c})^{-1} A^K||_1 + 1
  double min_norm_plus_one = 0.0;
  BaseSet k_star;
  std::size_t base_sets_examined = 0;
  bool truncated = false;
};

/// lambda(alpha, A, M) = 2(alpha+1)/(alpha-1) * min_K (||(A^{K^c})^{-1}A^K||_1 + 1)
/// over base sets K inside M. With alpha = +inf the prefactor is 2.
inline StabilityBound stability_constant(const IncidenceMatrix& a,
                                         const std::vector<Index>& monitored, double alpha,
                                         std::size_t limit = 10000) {
  if (!(alpha > 1.0)) {
    throw Error(Errc::InvalidAlpha, "the error bound needs alpha > 1");
  }
  const BaseSetEnumeration all = enumerate_base_sets(a, monitored, limit);
  StabilityBound out;
  out.truncated = all.truncated;
  out.min_norm_plus_one = kInfinity;
  for (const BaseSet& k : all.sets) {
    const KernelBasis kb = kernel_basis(a, k);
    const double val = operator_one_norm(complement_block(kb)) + 1.0;
    ++out.base_sets_examined;
    if (val < out.min_norm_plus_one) {
      out.min_norm_plus_one = val;
      out.k_star = k;
    }
  }
  const double factor = std::isinf(alpha) ? 2.0 : 2.0 * (alpha + 1.0) / (alpha - 1.0);
  out.lambda = factor * out.min_norm_plus_one;
  return out;
}

enum class OracleMode { Auto, Always, Never };
enum class RecMethod { InversePower, ExactOracle };

inline constexpr double kCertificationMargin = 1e-6;

struct CertifyConfig {
  InversePowerConfig inverse_power;
  OracleMode oracle = OracleMode::Auto;
  std::size_t lambda_limit = 10000;
};

struct RecoverabilityReport {
  std::vector<Index> subset;
  double value = kInfinity;
  RecMethod method = RecMethod::InversePower;
  std::optional<double> inverse_power_value;
  std::optional<double> exact_value;
  bool certified_exact_recovery = false;
  /// Z_S = 0: Rec is +infinity and certification is vacuous.
  bool degenerate = false;
  std::optional<double> lambda;
  std::optional<BaseSet> lambda_base_set;
  std::size_t bound_base_sets_examined = 0;
  bool truncated = false;
  std::vector<double> trace;
  BaseSet base_set;
};

inline RecoverabilityReport certify(const Network& net, const MonitoredSet& monitored,
                                    const std::vector<Index>& subset,
                                    const CertifyConfig& cfg = {}) {
  RecoverabilityReport rep;
  rep.subset = subset;
  std::sort(rep.subset.begin(), rep.subset.end());
  rep.subset.erase(std::unique(rep.subset.begin(), rep.subset.end()), rep.subset.end());
  const IncidenceMatrix a = build_incidence(net);
  rep.base_set = find_base_set(a, monitored.indices());
  const KernelBasis kb = kernel_basis(a, rep.base_set);
  const auto& m = monitored.indices();
  const QuotientBlocks q = split_blocks(kb.z, m, rep.subset);

  if (!(q.denom.cwiseAbs().maxCoeff() > 0.0)) {
    rep.degenerate = true;
    rep.value = kInfinity;
    rep.certified_exact_recovery = true;
  } else {
    const bool within_cap = rep.subset.size() <= kExactRecoverabilityMaxSubset;
    if (cfg.oracle == OracleMode::Always && !within_cap) {
      throw Error(Errc::OracleTooLarge, "subset too large for the exact recoverability oracle");
    }
    if (cfg.oracle != OracleMode::Always) {
      const InversePowerResult ip = recoverability_inverse_power(kb.z, m, rep.subset,
                                                                 cfg.inverse_power);
      rep.inverse_power_value = ip.value;
      rep.trace = ip.trace;
      rep.value = ip.value;
      rep.method = RecMethod::InversePower;
    }
    if (cfg.oracle == OracleMode::Always || (cfg.oracle == OracleMode::Auto && within_cap)) {
      const ExactRecoverability ex = recoverability_exact(kb.z, m, rep.subset);
      rep.exact_value = ex.value;
      rep.value = ex.value;
      rep.method = RecMethod::ExactOracle;
    }
    rep.certified_exact_recovery = rep.value > 1.0 + kCertificationMargin;
  }
  if (rep.certified_exact_recovery) {
    const StabilityBound sb = stability_constant(a, m, rep.value, cfg.lambda_limit);
    rep.lambda = sb.lambda;
    rep.lambda_base_set = sb.k_star;
    rep.bound_base_sets_examined = sb.base_sets_examined;
    rep.truncated = sb.truncated;
  }
  return rep;
}

}  // namespace linkflow

#endif  // LINKFLOW_RECOVERABILITY_HPP
