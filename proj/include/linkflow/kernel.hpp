#ifndef LINKFLOW_KERNEL_HPP
#define LINKFLOW_KERNEL_HPP

// Base sets and the kernel basis of the incidence matrix.
//
// A base set K has |K| = l - n links such that the columns of A outside K form
// an invertible n x n matrix. For such K the matrix
//
//        [ I                     ]  rows in K
//   Z =  [ -(A^{K^c})^{-1} A^K   ]  rows in K^c
//
// spans Ker(A), and flows on K determine every other link flow.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "linkflow/error.hpp"
#include "linkflow/linalg.hpp"
#include "linkflow/network.hpp"

namespace linkflow {

struct BaseSet {
  std::vector<Index> links;       // K, ascending
  std::vector<Index> complement;  // K^c, ascending

  friend bool operator==(const BaseSet&, const BaseSet&) = default;
};

struct KernelBasis {
  Matrix z;  // l x (l - n)
  BaseSet base_set;
};

namespace detail {

inline std::vector<Index> complement_of(const std::vector<Index>& k, Index l) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(l) - k.size());
  for (Index j = 0; j < l; ++j) {
    if (!std::binary_search(k.begin(), k.end(), j)) out.push_back(j);
  }
  return out;
}

inline bool complement_invertible(const Matrix& a, const std::vector<Index>& kc) {
  try {
    LuFactorization lu(select_cols(a, kc), kPivotTolerance);
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline std::vector<Index> sorted_unique(std::vector<Index> v, Index l) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (!v.empty() && (v.front() < 0 || v.back() >= l)) {
    throw Error(Errc::DimensionMismatch, "link index out of range");
  }
  return v;
}

}  // namespace detail

/// Validates K as a base set of `a` and returns it with its complement.
/// Throws Errc::NoBaseSet when K has the wrong size or A^{K^c} is singular.
inline BaseSet make_base_set(const IncidenceMatrix& a, std::vector<Index> k) {
  const Index l = a.cols();
  const Index n = a.rows();
  k = detail::sorted_unique(std::move(k), l);
  if (static_cast<Index>(k.size()) != l - n) {
    throw Error(Errc::NoBaseSet, "a base set needs exactly l - n = " + std::to_string(l - n) +
                                     " links, got " + std::to_string(k.size()));
  }
  BaseSet bs{k, detail::complement_of(k, l)};
  if (!detail::complement_invertible(a.entries, bs.complement)) {
    throw Error(Errc::NoBaseSet, "complement columns of the proposed base set are singular");
  }
  return bs;
}

/// Greedy base-set search. Columns are offered to K^c in the order
/// "non-candidates first (ascending), then candidates in descending index
/// order" and kept when they raise the rank, so K falls inside `candidates`
/// whenever any base set there exists.
inline BaseSet find_base_set(const IncidenceMatrix& a, const std::vector<Index>& candidates) {
  const Index l = a.cols();
  const Index n = a.rows();
  const auto cand = detail::sorted_unique(candidates, l);
  if (static_cast<Index>(cand.size()) < l - n) {
    throw Error(Errc::NoBaseSet, "only " + std::to_string(cand.size()) +
                                     " candidate links, a base set needs " +
                                     std::to_string(l - n) +
                                     "; some link flows cannot be estimated, the problem is "
                                     "unsolvable");
  }
  std::vector<Index> order;
  for (Index j = 0; j < l; ++j) {
    if (!std::binary_search(cand.begin(), cand.end(), j)) order.push_back(j);
  }
  for (auto it = cand.rbegin(); it != cand.rend(); ++it) order.push_back(*it);

  // Incremental elimination against the columns already accepted into K^c.
  std::vector<Vector> reduced;
  std::vector<Index> pivot_rows;
  std::vector<Index> kc;
  for (Index j : order) {
    if (static_cast<Index>(kc.size()) == n) break;
    Vector col = a.entries.col(j);
    for (std::size_t r = 0; r < reduced.size(); ++r) {
      const double coeff = col(pivot_rows[r]) / reduced[r](pivot_rows[r]);
      if (coeff != 0.0) col -= coeff * reduced[r];
    }
    Index p = 0;
    const double mag = col.cwiseAbs().maxCoeff(&p);
    if (!(mag > kPivotTolerance)) continue;
    reduced.push_back(col);
    pivot_rows.push_back(p);
    kc.push_back(j);
  }
  std::sort(kc.begin(), kc.end());
  std::vector<Index> k = detail::complement_of(kc, l);
  const bool inside = std::all_of(k.begin(), k.end(), [&](Index j) {
    return std::binary_search(cand.begin(), cand.end(), j);
  });
  if (static_cast<Index>(kc.size()) != n || !inside) {
    throw Error(Errc::NoBaseSet,
                "the monitored links contain no base set; some link flows cannot be estimated, "
                "the problem is unsolvable");
  }
  return BaseSet{std::move(k), std::move(kc)};
}

struct BaseSetEnumeration {
  std::vector<BaseSet> sets;
  bool truncated = false;
};

/// All base sets K inside `candidates` in lexicographic order, stopping after
/// `limit` of them. `truncated` is set when at least one more exists.
inline BaseSetEnumeration enumerate_base_sets(const IncidenceMatrix& a,
                                              const std::vector<Index>& candidates,
                                              std::size_t limit) {
  if (limit < 1) throw Error(Errc::InvalidArgument, "enumeration limit must be >= 1");
  const Index l = a.cols();
  const Index n = a.rows();
  const auto cand = detail::sorted_unique(candidates, l);
  const std::size_t c = cand.size();
  const std::size_t k = static_cast<std::size_t>(l - n);
  BaseSetEnumeration out;
  if (c >= k) {
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::vector<Index> links(k);
      for (std::size_t i = 0; i < k; ++i) links[i] = cand[pick[i]];
      auto kc = detail::complement_of(links, l);
      if (detail::complement_invertible(a.entries, kc)) {
        if (out.sets.size() == limit) {
          out.truncated = true;
          break;
        }
        out.sets.push_back(BaseSet{std::move(links), std::move(kc)});
      }
      // next combination
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == c - k + (i - 1)) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t t = i; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
  if (out.sets.empty()) {
    throw Error(Errc::NoBaseSet, "no base set inside the candidate links");
  }
  return out;
}

/// Kernel basis for a valid base set. Rows in K form the identity (exact 0/1
/// entries); rows in K^c come from an LU solve, never an explicit inverse.
inline KernelBasis kernel_basis(const IncidenceMatrix& a, const BaseSet& k) {
  const Index l = a.cols();
  const Index dim = l - a.rows();
  if (static_cast<Index>(k.links.size()) != dim ||
      static_cast<Index>(k.complement.size()) != a.rows()) {
    throw Error(Errc::DimensionMismatch, "base set size does not match the incidence matrix");
  }
  Matrix solved;
  try {
    solved = solve_square(select_cols(a.entries, k.complement), select_cols(a.entries, k.links),
                          kPivotTolerance)
                 .x;
  } catch (const Error& e) {
    throw Error(Errc::SingularComplement, e.what());
  }
  KernelBasis out;
  out.base_set = k;
  out.z = Matrix::Zero(l, dim);
  for (Index i = 0; i < dim; ++i) out.z(k.links[i], i) = 1.0;
  for (std::size_t r = 0; r < k.complement.size(); ++r) {
    out.z.row(k.complement[r]) = -solved.row(static_cast<Index>(r));
  }
  return out;
}

/// The n x (l-n) block (A^{K^c})^{-1} A^K of a kernel basis, up to sign.
inline Matrix complement_block(const KernelBasis& kb) {
  return select_rows(kb.z, kb.base_set.complement);
}

}  // namespace linkflow

#endif  // LINKFLOW_KERNEL_HPP
