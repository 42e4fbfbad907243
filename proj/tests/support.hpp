#ifndef LINKFLOW_TESTS_SUPPORT_HPP
#define LINKFLOW_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "linkflow/linkflow.hpp"

namespace testing_support {

using namespace linkflow;

inline NetworkDocument fixture(const std::string& name) {
  return load_network_file(std::string(LINKFLOW_FIXTURE_DIR) + "/" + name + ".json");
}

inline std::vector<Index> ids_to_indices(const Network& net, const std::vector<std::string>& ids) {
  std::vector<Index> out;
  for (const auto& id : ids) out.push_back(*net.link_index(id));
  return out;
}

/// 0-based indices for 1-based link labels that coincide with positions.
inline std::vector<Index> links(std::initializer_list<int> one_based) {
  std::vector<Index> out;
  for (int j : one_based) out.push_back(j - 1);
  return out;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

/// Base sets inside `cand` by brute force: every (l-n)-subset whose
/// complement columns have a nonzero determinant. Independent of the
/// library's elimination-based search.
inline std::vector<std::vector<Index>> brute_force_base_sets(const Matrix& a,
                                                             const std::vector<Index>& cand) {
  const Index n = a.rows();
  const Index l = a.cols();
  const Index k = l - n;
  std::vector<std::vector<Index>> out;
  if (k > static_cast<Index>(cand.size())) return out;
  std::vector<bool> pick(cand.size(), false);
  std::fill(pick.begin(), pick.begin() + k, true);
  do {
    std::vector<Index> ks;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (pick[i]) ks.push_back(cand[i]);
    }
    Matrix comp(n, n);
    Index c = 0;
    for (Index j = 0; j < l; ++j) {
      if (!std::binary_search(ks.begin(), ks.end(), j)) comp.col(c++) = a.col(j);
    }
    if (std::abs(comp.determinant()) > 1e-9) out.push_back(ks);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  std::sort(out.begin(), out.end());
  return out;
}

/// A small random network with every node reachable from and to the outside;
/// built here rather than through the generator so tests do not depend on it.
inline Network random_network(std::mt19937_64& rng, int n, int l) {
  auto pick = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::vector<std::string> nodes;
  for (int i = 1; i <= n; ++i) nodes.push_back("v" + std::to_string(i));
  std::vector<Link> ls;
  auto add = [&](int t, int h) {
    Link k{std::to_string(ls.size() + 1), std::nullopt, std::nullopt};
    if (t) k.tail = nodes[static_cast<std::size_t>(t - 1)];
    if (h) k.head = nodes[static_cast<std::size_t>(h - 1)];
    ls.push_back(k);
  };
  add(0, 1);
  for (int i = 2; i <= n; ++i) add(pick(1, i - 1), i);
  add(n, 0);
  while (static_cast<int>(ls.size()) < l) {
    const int t = pick(0, n);
    int h = pick(0, n);
    if (t == 0 && h == 0) continue;
    if (t == h) continue;
    add(t, h);
  }
  return Network(nodes, ls, "random");
}

/// A random monitored set containing at least one base set.
inline std::vector<Index> random_observable_subset(std::mt19937_64& rng, const IncidenceMatrix& a,
                                                   Index size) {
  std::vector<Index> all(static_cast<std::size_t>(a.cols()));
  for (Index j = 0; j < a.cols(); ++j) all[static_cast<std::size_t>(j)] = j;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Index> m(all.begin(), all.begin() + size);
    std::sort(m.begin(), m.end());
    if (!brute_force_base_sets(a.entries, m).empty()) return m;
  }
  return {};
}

}  // namespace testing_support

#endif  // LINKFLOW_TESTS_SUPPORT_HPP
