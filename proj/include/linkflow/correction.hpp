#ifndef LINKFLOW_CORRECTION_HPP
#define LINKFLOW_CORRECTION_HPP

// Two-step link-flow correction:
//
//   1. x* = argmin_x || Z_M x - f_M ||_1      (ADMM, or the exact LP oracle)
//   2. f* = Z x*
//
// followed by rounding, residual analysis and suspect-link ranking.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "linkflow/error.hpp"
#include "linkflow/kernel.hpp"
#include "linkflow/linalg.hpp"
#include "linkflow/network.hpp"
#include "linkflow/simplex.hpp"

namespace linkflow {

/// Component-wise soft thresholding sign(z_i) * max(|z_i| - r, 0).
inline Vector shrink(const Vector& z, double r) {
  if (!(r > 0.0)) throw Error(Errc::InvalidArgument, "shrink threshold must be positive");
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z(i)) - r;
    out(i) = mag > 0.0 ? std::copysign(mag, z(i)) : 0.0;
  }
  return out;
}

struct AdmmConfig {
  /// Augmented-Lagrangian penalty. 0.1 reproduces the reference I-405
  /// estimates; the limit point on tied l1 problems depends on it.
  double delta = 0.1;
  std::size_t max_iters = 50000;
  /// Stopping thresholds, multiplied by (1 + ||f_M||_2).
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  /// Residual balancing: rescale delta by 2 whenever one residual exceeds
  /// the other tenfold. Converges far faster when gross errors dwarf the
  /// clean counts, but the limit on tied problems no longer follows `delta`.
  bool adaptive = false;

  void validate() const {
    if (!(delta > 0.0)) throw Error(Errc::InvalidArgument, "ADMM delta must be positive");
    if (max_iters < 1) throw Error(Errc::InvalidArgument, "ADMM max_iters must be >= 1");
    if (!(primal_tol > 0.0) || !(dual_tol > 0.0)) {
      throw Error(Errc::InvalidArgument, "ADMM tolerances must be positive");
    }
  }
};

struct AdmmResult {
  Vector x;
  std::size_t iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
};

inline double l1_objective(const Matrix& zm, const Vector& fm, const Vector& x) {
  return (zm * x - fm).lpNorm<1>();
}

/// ADMM for min ||Z_M x - f_M||_1. The x-step reuses one Cholesky
/// factorization of Z_M' Z_M; initialization is the least-squares fit.
inline AdmmResult solve_l1_admm(const Matrix& zm, const Vector& fm, const AdmmConfig& cfg = {}) {
  cfg.validate();
  if (zm.rows() != fm.size()) {
    throw Error(Errc::DimensionMismatch, "Z_M rows must match the observation length");
  }
  if (zm.rows() < zm.cols() || matrix_rank(zm, 1e-9) < zm.cols()) {
    throw Error(Errc::NotFullColumnRank, "Z_M does not have full column rank");
  }
  const Matrix zt = zm.transpose();
  Eigen::LLT<Matrix> normal(zt * zm);
  if (normal.info() != Eigen::Success) {
    throw Error(Errc::NotFullColumnRank, "normal matrix Z_M'Z_M is not positive definite");
  }
  const double scale = 1.0 + fm.norm();
  double delta = cfg.delta;

  AdmmResult res;
  Vector x = normal.solve(zt * fm);
  Vector z = zm * x - fm;
  Vector u = Vector::Zero(fm.size());
  Vector best_x = x;
  double best_obj = l1_objective(zm, fm, x);

  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    x = normal.solve(zt * (fm + z - u));
    const Vector zx = zm * x - fm;
    const Vector z_prev = z;
    z = shrink(zx + u, 1.0 / delta);
    u += zx - z;
    res.iterations = it + 1;
    res.primal_residual = (zx - z).norm();
    res.dual_residual = delta * (zt * (z - z_prev)).norm();

    const double obj = zx.lpNorm<1>();
    if (obj < best_obj) {
      best_obj = obj;
      best_x = x;
    }
    if (res.primal_residual <= cfg.primal_tol * scale && res.dual_residual <= cfg.dual_tol * scale) {
      res.converged = true;
      break;
    }
    if (cfg.adaptive) {
      // u is the scaled dual y / delta, so it scales inversely with delta
      if (res.primal_residual > 10.0 * res.dual_residual) {
        delta *= 2.0;
        u /= 2.0;
      } else if (res.dual_residual > 10.0 * res.primal_residual) {
        delta /= 2.0;
        u *= 2.0;
      }
    }
  }
  res.x = res.converged ? x : best_x;
  res.objective = l1_objective(zm, fm, res.x);
  return res;
}

struct ExactL1Result {
  Vector x;
  double objective = 0.0;
  /// Set when a uniqueness check ran and found a non-degenerate optimal face.
  std::optional<bool> unique;
};

/// Largest Z_M row count accepted by the LP oracle.
inline constexpr Index kExactOracleMaxRows = 400;

namespace detail {

// Standard form of min ||Z x - f||_1 over [x+, x-, p, q] >= 0:
//   Z x+ - Z x- - p + q = f,  cost 1 on p and q.
struct L1Lp {
  Matrix a;
  Vector b;
  Vector c;
};

inline L1Lp l1_standard_form(const Matrix& zm, const Vector& fm) {
  const Index m = zm.rows();
  const Index k = zm.cols();
  L1Lp lp;
  lp.a = Matrix::Zero(m, 2 * k + 2 * m);
  lp.a.leftCols(k) = zm;
  lp.a.middleCols(k, k) = -zm;
  lp.a.middleCols(2 * k, m) = -Matrix::Identity(m, m);
  lp.a.rightCols(m) = Matrix::Identity(m, m);
  lp.b = fm;
  lp.c = Vector::Zero(2 * k + 2 * m);
  lp.c.tail(2 * m).setOnes();
  return lp;
}

}  // namespace detail

/// Exact l1 fit through the simplex oracle. With `check_uniqueness`, every
/// coordinate of x is minimized and maximized over the optimal face.
inline ExactL1Result solve_l1_exact(const Matrix& zm, const Vector& fm,
                                    bool check_uniqueness = false) {
  if (zm.rows() != fm.size()) {
    throw Error(Errc::DimensionMismatch, "Z_M rows must match the observation length");
  }
  if (zm.rows() > kExactOracleMaxRows) {
    throw Error(Errc::OracleTooLarge, "exact l1 oracle is capped at " +
                                          std::to_string(kExactOracleMaxRows) + " rows");
  }
  const Index k = zm.cols();
  const auto lp = detail::l1_standard_form(zm, fm);
  const LpResult r = solve_lp(lp.a, lp.b, lp.c);
  if (r.status != LpStatus::Optimal) {
    throw Error(Errc::NotFullColumnRank, "exact l1 oracle did not reach an optimum");
  }
  ExactL1Result out;
  out.x = r.x.head(k) - r.x.segment(k, k);
  out.objective = l1_objective(zm, fm, out.x);

  if (check_uniqueness) {
    // Optimal face: original constraints plus  sum(p+q) + s = opt + slack.
    const double slack = 1e-9 * (1.0 + out.objective);
    const Index nv = lp.a.cols();
    Matrix fa = Matrix::Zero(lp.a.rows() + 1, nv + 1);
    fa.topLeftCorner(lp.a.rows(), nv) = lp.a;
    fa.row(lp.a.rows()).head(nv) = lp.c.transpose();
    fa(lp.a.rows(), nv) = 1.0;
    Vector fb(lp.b.size() + 1);
    fb << lp.b, out.objective + slack;
    const double xscale = 1.0 + out.x.cwiseAbs().maxCoeff();
    bool unique = true;
    for (Index j = 0; j < k && unique; ++j) {
      Vector c = Vector::Zero(nv + 1);
      c(j) = 1.0;
      c(k + j) = -1.0;
      const LpResult lo = solve_lp(fa, fb, c);
      const LpResult hi = solve_lp(fa, fb, -c);
      if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal) {
        unique = false;
        break;
      }
      const double range = -hi.objective - lo.objective;
      if (range > 1e-5 * xscale) unique = false;
    }
    out.unique = unique;
  }
  return out;
}

enum class L1Solver { Admm, Exact };

struct CorrectionOptions {
  AdmmConfig admm;
  L1Solver solver = L1Solver::Admm;
  /// Round the reported estimate (only honoured when every observation is an integer).
  bool round = true;
  /// Run the exact oracle as a tie check when the instance is within its cap.
  bool tie_check = false;
  /// Use this base set instead of the greedy search result.
  std::optional<std::vector<Index>> base_set;
};

struct Suspect {
  Index link = 0;
  double abs_residual = 0.0;
  bool flagged = false;
};

struct CorrectionResult {
  IncidenceMatrix incidence;
  KernelBasis kernel;
  Vector x_star;
  Vector f_star_raw;
  /// Reported estimate; equals f_star_raw unless `rounded`.
  Vector f_star;
  bool rounded = false;
  /// f*_i - f_i for each monitored link, in MonitoredSet order (pre-rounding).
  Vector residuals;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
  L1Solver solver = L1Solver::Admm;
  bool possibly_nonunique = false;
  std::vector<Suspect> suspects;
  Vector node_residuals_raw;
  Vector node_residuals_reported;
};

/// Round half to even, independent of the caller's floating-point environment.
inline double round_half_even(double v) {
  const double fl = std::floor(v);
  const double diff = v - fl;
  if (diff < 0.5) return fl;
  if (diff > 0.5) return fl + 1.0;
  return std::fmod(fl, 2.0) == 0.0 ? fl : fl + 1.0;
}

/// Ranks monitored links by |residual| (descending, ties by link order) and
/// flags those above 5x the median nonzero |residual|.
inline std::vector<Suspect> rank_suspects(const MonitoredSet& monitored, const Vector& observed,
                                          const Vector& residuals) {
  const auto& idx = monitored.indices();
  std::vector<Suspect> out;
  std::vector<double> nonzero;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double r = std::abs(residuals(static_cast<Index>(i)));
    out.push_back({idx[i], r, false});
    if (r > 1e-6 * (1.0 + std::abs(observed(static_cast<Index>(i))))) nonzero.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Suspect& a, const Suspect& b) { return a.abs_residual > b.abs_residual; });
  if (!nonzero.empty()) {
    std::sort(nonzero.begin(), nonzero.end());
    const std::size_t h = nonzero.size() / 2;
    const double median =
        nonzero.size() % 2 == 1 ? nonzero[h] : 0.5 * (nonzero[h - 1] + nonzero[h]);
    for (auto& s : out) s.flagged = s.abs_residual > 5.0 * median;
  }
  return out;
}

inline CorrectionResult correct_flows(const Network& net, const MonitoredSet& monitored,
                                      const FlowObservation& observation,
                                      const CorrectionOptions& opt = {}) {
  if (observation.values().size() != monitored.size()) {
    throw Error(Errc::DimensionMismatch, "observation does not match the monitored set");
  }
  CorrectionResult res;
  res.incidence = build_incidence(net);
  const BaseSet bs = opt.base_set ? make_base_set(res.incidence, *opt.base_set)
                                  : find_base_set(res.incidence, monitored.indices());
  res.kernel = kernel_basis(res.incidence, bs);
  const Matrix zm = select_rows(res.kernel.z, monitored.indices());
  const Vector& fm = observation.values();

  res.solver = opt.solver;
  if (opt.solver == L1Solver::Admm) {
    const AdmmResult a = solve_l1_admm(zm, fm, opt.admm);
    res.x_star = a.x;
    res.iterations = a.iterations;
    res.converged = a.converged;
  } else {
    res.x_star = solve_l1_exact(zm, fm).x;
  }
  if (opt.tie_check && zm.rows() <= kExactOracleMaxRows) {
    const ExactL1Result ex = solve_l1_exact(zm, fm, true);
    res.possibly_nonunique = ex.unique.has_value() && !*ex.unique;
  }

  res.f_star_raw = res.kernel.z * res.x_star;
  res.objective = l1_objective(zm, fm, res.x_star);
  res.residuals = select(res.f_star_raw, monitored.indices()) - fm;
  res.rounded = opt.round && observation.all_integer();
  res.f_star = res.f_star_raw;
  if (res.rounded) res.f_star = res.f_star_raw.unaryExpr(&round_half_even);
  res.node_residuals_raw = conservation_residual(res.incidence, res.f_star_raw);
  res.node_residuals_reported = conservation_residual(res.incidence, res.f_star);
  res.suspects = rank_suspects(monitored, fm, res.residuals);
  return res;
}

}  // namespace linkflow

#endif  // LINKFLOW_CORRECTION_HPP
