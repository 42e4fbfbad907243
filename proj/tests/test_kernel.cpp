#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "support.hpp"

using namespace linkflow;
using testing_support::brute_force_base_sets;
using testing_support::fixture;
using testing_support::links;

namespace {

IncidenceMatrix toy_a() { return build_incidence(fixture("toy").network); }

bool is_identity_rows(const KernelBasis& kb) {
  const auto& k = kb.base_set.links;
  for (std::size_t r = 0; r < k.size(); ++r) {
    for (Index c = 0; c < kb.z.cols(); ++c) {
      // bit-exact: the identity block is written, not computed
      if (kb.z(k[r], c) != (static_cast<Index>(r) == c ? 1.0 : 0.0)) return false;
    }
  }
  return true;
}

}  // namespace

TEST(BaseSet, ToyKernelForLinks236MatchesKnownBasis) {
  Matrix expected(6, 3);
  expected << -1, 0, 1,
              1, 0, 0,
              0, 1, 0,
              0, -1, 1,
              0, 1, 0,
              0, 0, 1;
  const IncidenceMatrix a = toy_a();
  const KernelBasis kb = kernel_basis(a, make_base_set(a, links({2, 3, 6})));
  EXPECT_LT((kb.z - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(is_identity_rows(kb));
}

TEST(BaseSet, GreedySearchFillsComplementFromHighestIndices) {
  // The complement is built from non-candidates first, then candidates from
  // the highest index down, so K keeps the lowest-index links that work.
  // {2,3,6} is also a base set; it is the one whose kernel is checked above.
  const IncidenceMatrix a = toy_a();
  const BaseSet k = find_base_set(a, links({1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(k.links, links({1, 2, 3}));
  EXPECT_EQ(k.complement, links({4, 5, 6}));
  const auto all = brute_force_base_sets(a.entries, links({1, 2, 3, 4, 5, 6}));
  EXPECT_NE(std::find(all.begin(), all.end(), k.links), all.end());
  EXPECT_NE(std::find(all.begin(), all.end(), links({2, 3, 6})), all.end());
}

TEST(BaseSet, ToyMonitoredSetGivesComplement356) {
  const IncidenceMatrix a = toy_a();
  const BaseSet k = find_base_set(a, links({1, 2, 4, 5, 6}));
  EXPECT_EQ(k.links, links({1, 2, 4}));
  EXPECT_EQ(k.complement, links({3, 5, 6}));
}

TEST(BaseSet, DependentMonitoredSetIsUnsolvable) {
  // f6 = f1 + f2 always, so {1, 2, 6} carries only two independent counts.
  const IncidenceMatrix a = toy_a();
  try {
    find_base_set(a, links({1, 2, 6}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoBaseSet);
    EXPECT_NE(std::string(e.what()).find("the problem is unsolvable"), std::string::npos);
  }
  EXPECT_THROW(find_base_set(a, links({1, 2})), Error);
}

TEST(BaseSet, MakeBaseSetValidates) {
  const IncidenceMatrix a = toy_a();
  EXPECT_THROW(make_base_set(a, links({1, 2})), Error);
  EXPECT_THROW(make_base_set(a, links({1, 2, 6})), Error);
  EXPECT_THROW(make_base_set(a, {0, 1, 9}), Error);
  EXPECT_EQ(make_base_set(a, links({6, 2, 3})).links, links({2, 3, 6}));
}

TEST(BaseSet, EnumerationMatchesDeterminantOracle) {
  for (const char* name : {"toy", "parallel", "i405"}) {
    const NetworkDocument d = fixture(name);
    const IncidenceMatrix a = build_incidence(d.network);
    const auto& m = d.monitored.indices();
    const auto oracle = brute_force_base_sets(a.entries, m);
    const BaseSetEnumeration e = enumerate_base_sets(a, m, 1000000);
    EXPECT_FALSE(e.truncated);
    ASSERT_EQ(e.sets.size(), oracle.size()) << name;
    for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_EQ(e.sets[i].links, oracle[i]);
  }
}

TEST(BaseSet, EnumerationLimitTruncates) {
  const IncidenceMatrix a = toy_a();
  const BaseSetEnumeration e = enumerate_base_sets(a, links({1, 2, 3, 4, 5, 6}), 2);
  EXPECT_EQ(e.sets.size(), 2u);
  EXPECT_TRUE(e.truncated);
  EXPECT_THROW(enumerate_base_sets(a, links({1, 2, 3, 4, 5, 6}), 0), Error);
  EXPECT_THROW(enumerate_base_sets(a, links({1, 2, 6}), 10), Error);
}

TEST(Kernel, EveryBaseSetOfEveryFixtureSpansTheKernel) {
  for (const char* name : {"toy", "parallel", "i405"}) {
    const NetworkDocument d = fixture(name);
    const IncidenceMatrix a = build_incidence(d.network);
    for (const BaseSet& k : enumerate_base_sets(a, d.monitored.indices(), 200).sets) {
      const KernelBasis kb = kernel_basis(a, k);
      EXPECT_LE((a.entries * kb.z).cwiseAbs().maxCoeff(), 1e-10) << name;
      EXPECT_TRUE(is_identity_rows(kb)) << name;
      EXPECT_EQ(Eigen::FullPivLU<Matrix>(kb.z).rank(), a.cols() - a.rows());
    }
  }
}

TEST(Kernel, RangeDoesNotDependOnBaseSet) {
  // Z_K2 has identity rows on K2, so Z_K2 = Z_K1 * inverse(rows K2 of Z_K1).
  const NetworkDocument d = fixture("i405");
  const IncidenceMatrix a = build_incidence(d.network);
  const auto sets = enumerate_base_sets(a, d.monitored.indices(), 20).sets;
  const KernelBasis first = kernel_basis(a, sets.front());
  for (const BaseSet& k : sets) {
    const KernelBasis kb = kernel_basis(a, k);
    const Matrix t = select_rows(first.z, k.links).fullPivLu().inverse();
    EXPECT_LT((first.z * t - kb.z).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Kernel, RandomNetworks) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = std::uniform_int_distribution<int>(1, 7)(rng);
    const int l = n + std::uniform_int_distribution<int>(1, 6)(rng);
    const Network net = testing_support::random_network(rng, n, std::max(l, n + 1));
    const IncidenceMatrix a = build_incidence(net);
    std::vector<Index> all(static_cast<std::size_t>(a.cols()));
    std::iota(all.begin(), all.end(), Index{0});
    const BaseSet k = find_base_set(a, all);
    const KernelBasis kb = kernel_basis(a, k);
    EXPECT_LE((a.entries * kb.z).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE(is_identity_rows(kb));
    Matrix comp = select_cols(a.entries, k.complement);
    EXPECT_GT(std::abs(comp.determinant()), 0.5);  // incidence submatrices are unimodular
  }
}

TEST(Kernel, ComplementBlockIsNegatedSolve) {
  const IncidenceMatrix a = toy_a();
  const KernelBasis kb = kernel_basis(a, make_base_set(a, links({1, 2, 4})));
  const Matrix expected =
      -select_cols(a.entries, links({3, 5, 6})).fullPivLu().solve(select_cols(a.entries, links({1, 2, 4})));
  EXPECT_LT((complement_block(kb) - expected).cwiseAbs().maxCoeff(), 1e-12);
}
