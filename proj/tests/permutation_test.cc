// Copyright 2026 The Riffle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "riffle/permutation.h"

namespace riffle {
namespace {

// All permutations of {0..n-1} via std::next_permutation, lexicographic.
std::vector<std::vector<int>> brute_sn(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

std::vector<int> as_vector(const Ranking& s) { return {s.ranks().begin(), s.ranks().end()}; }

// Subsets of {0..n-1} of size k, each sorted.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::vector<int> s;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    out.push_back(s);
  }
  return out;
}

TEST_CASE("ranking validation") {
  CHECK_THROWS_AS(Ranking({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Ranking({0, 3, 1}), std::invalid_argument);
  CHECK_NOTHROW(Ranking({2, 0, 1}));
  CHECK(Ranking::from_one_based({3, 1, 2}) == Ranking({2, 0, 1}));
  CHECK(Ranking({2, 0, 1}).one_based() == std::vector<int>{3, 1, 2});
}

TEST_CASE("ordering view round trips") {
  // Corn, Peas, Lemon, Orange, Fig, Grapes ranked (3,1,5,6,2,4) is the
  // ordering P, F, C, G, L, O.
  Ranking s = Ranking::from_one_based({3, 1, 5, 6, 2, 4});
  CHECK(s.ordering() == std::vector<int>{1, 4, 0, 5, 2, 3});
  CHECK(Ranking::from_ordering(s.ordering()) == s);
  for (const auto& v : brute_sn(5)) {
    Ranking r(v);
    CHECK(Ranking::from_ordering(r.ordering()) == r);
  }
}

TEST_CASE("compose") {
  Ranking s = Ranking::from_one_based({2, 3, 1, 4, 5, 6});
  Ranking t = Ranking::from_one_based({2, 1, 4, 6, 5, 3});
  CHECK(compose(s, t) == Ranking::from_one_based({3, 2, 4, 6, 5, 1}));
  CHECK(compose(Ranking::identity(6), t) == t);
  CHECK(compose(t, inverse(t)) == Ranking::identity(6));
  CHECK_THROWS_AS(compose(Ranking::identity(3), Ranking::identity(4)), std::invalid_argument);
}

TEST_CASE("inverse") {
  CHECK(inverse(Ranking::identity(5)) == Ranking::identity(5));
  CHECK(inverse(Ranking::from_one_based({3, 1, 5, 6, 2, 4})) ==
        Ranking::from_one_based({2, 5, 1, 6, 3, 4}));
  std::mt19937_64 rng(11);
  std::vector<int> v(7);
  std::iota(v.begin(), v.end(), 0);
  for (int rep = 0; rep < 100; ++rep) {
    std::shuffle(v.begin(), v.end(), rng);
    Ranking s(v);
    CHECK(inverse(inverse(s)) == s);
    Ranking inv = inverse(s);
    for (int i = 0; i < 7; ++i) CHECK(inv[s[i]] == i);
  }
}

TEST_CASE("rank_index matches lexicographic enumeration") {
  CHECK(rank_index(Ranking::identity(4)) == 0);
  CHECK(from_index(4, 23) == Ranking::from_one_based({4, 3, 2, 1}));
  for (int n = 1; n <= 7; ++n) {
    auto all = brute_sn(n);
    REQUIRE(all.size() == factorial(n));
    for (std::uint64_t i = 0; i < all.size(); ++i) {
      Ranking s(all[i]);
      REQUIRE(rank_index(s) == i);
      REQUIRE(from_index(n, i) == s);
    }
  }
  CHECK_THROWS_AS(from_index(4, 24), std::out_of_range);
}

TEST_CASE("enumerate_sn") {
  CHECK(enumerate_sn(3).size() == 6);
  CHECK(enumerate_sn(5).size() == 120);
  CHECK(enumerate_sn(5).front() == Ranking::identity(5));
  auto all = enumerate_sn(6);
  auto brute = brute_sn(6);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(as_vector(all[i]) == brute[i]);
  CHECK_THROWS_AS(enumerate_sn(max_dense_n() + 1), std::length_error);
}

TEST_CASE("dense cap override") {
  CHECK(max_dense_n() == kDefaultMaxDenseN);
  setenv("RIFFLE_MAX_N", "4", 1);
  CHECK(max_dense_n() == 4);
  CHECK_THROWS_AS(enumerate_sn(5), std::length_error);
  setenv("RIFFLE_MAX_N", "99", 1);
  CHECK_THROWS(max_dense_n());
  unsetenv("RIFFLE_MAX_N");
  CHECK(max_dense_n() == kDefaultMaxDenseN);
}

TEST_CASE("interleavings match the sortedness filter of S_n") {
  for (int p = 1; p <= 5; ++p) {
    for (int q = 1; p + q <= 7; ++q) {
      std::vector<std::vector<int>> filtered;
      for (const auto& v : brute_sn(p + q)) {
        if (std::is_sorted(v.begin(), v.begin() + p) && std::is_sorted(v.begin() + p, v.end())) {
          filtered.push_back(v);
        }
      }
      auto got = enumerate_interleavings(p, q);
      REQUIRE(got.size() == filtered.size());
      REQUIRE(got.size() == binomial(p + q, p));
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(as_vector(got[i].ranking()) == filtered[i]);
        CHECK(got[i].index() == i);
        CHECK(Interleaving::from_index(p, q, i) == got[i]);
        CHECK(Interleaving::from_pattern(got[i].pattern()) == got[i]);
      }
    }
  }
}

TEST_CASE("small interleaving sets") {
  auto w = enumerate_interleavings(2, 4);
  CHECK(w.size() == 15);
  std::set<Ranking> taus;
  for (const auto& t : w) taus.insert(t.ranking());
  CHECK(taus.size() == 15);
  CHECK(taus.count(Ranking::from_one_based({1, 2, 3, 4, 5, 6})) == 1);
  CHECK(taus.count(Ranking::from_one_based({5, 6, 1, 2, 3, 4})) == 1);

  auto one = enumerate_interleavings(1, 1);
  REQUIRE(one.size() == 2);
  CHECK(one[0].ranking() == Ranking::from_one_based({1, 2}));
  CHECK(one[1].ranking() == Ranking::from_one_based({2, 1}));
  CHECK(enumerate_interleavings(3, 3).size() == 20);

  CHECK(Interleaving::a_first(2, 3).ranking() == Ranking::identity(5));
  CHECK(Interleaving::b_first(2, 3).ranking() == Ranking::from_one_based({4, 5, 1, 2, 3}));
  CHECK_THROWS_AS(Interleaving(Ranking::from_one_based({2, 1, 3}), 2), std::invalid_argument);
}

TEST_CASE("interleaving and relative ranking of the running example") {
  // Items C, P, L, O, F, G; sigma = [P, L, F, G, C, O], A = {C, P}.
  Ranking s = Ranking::from_ordering({1, 2, 4, 5, 0, 3});
  ItemPartition part(6, {0, 1});
  Interleaving tau = interleaving_map(s, part);
  // [Veg, Fruit, Fruit, Fruit, Veg, Fruit]
  CHECK(tau.pattern() == std::vector<bool>{true, false, false, false, true, false});
  CHECK(tau.ranking() == Ranking::from_one_based({1, 5, 2, 3, 4, 6}));

  const std::vector<int> veg{0, 1}, fruit{2, 3, 4, 5};
  // phi_A = [P, C]: Corn is fifth overall and second among vegetables.
  CHECK(relative_rank_map(s, veg) == Ranking::from_ordering({1, 0}));
  CHECK(relative_rank_map(s, veg)[0] == 1);
  // phi_B = [L, F, G, O]
  CHECK(relative_rank_map(s, fruit) == Ranking::from_ordering({0, 2, 3, 1}));
  CHECK(relative_rank_map(s, std::vector<int>{0, 1, 2, 3, 4, 5}) == s);
}

TEST_CASE("relative ranks by sorting the restriction") {
  Ranking s = Ranking::from_one_based({3, 1, 5, 6, 2, 4});
  const std::vector<int> fruit{2, 3, 4, 5};
  std::vector<int> order = fruit;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return s[x] < s[y]; });
  std::vector<int> expect(fruit.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    expect[std::find(fruit.begin(), fruit.end(), order[r]) - fruit.begin()] = static_cast<int>(r);
  }
  CHECK(as_vector(relative_rank_map(s, fruit)) == expect);
  CHECK(relative_rank_map(s, fruit) == Ranking::from_one_based({3, 4, 1, 2}));
}

TEST_CASE("interleaving map fibers have p! q! elements") {
  ItemPartition part = ItemPartition::contiguous(2, 3);
  std::map<std::uint64_t, int> hist;
  for (const auto& s : enumerate_sn(5)) ++hist[interleaving_map(s, part).index()];
  CHECK(hist.size() == 10);
  for (const auto& [idx, c] : hist) CHECK(c == 12);
  CHECK(interleaving_map(Ranking::identity(5), part) == Interleaving::a_first(2, 3));
}

TEST_CASE("decompose the running example") {
  Ranking s = Ranking::from_one_based({3, 2, 4, 6, 5, 1});
  ItemPartition part(6, {0, 1});
  Decomposition d = decompose(s, part);
  CHECK(d.interleaving.ranking() == Ranking::from_one_based({2, 3, 1, 4, 5, 6}));
  CHECK(d.a == Ranking::from_one_based({2, 1}));
  CHECK(d.b == Ranking::from_one_based({2, 4, 3, 1}));
  CHECK(recompose(d.interleaving, d.a, d.b, part) == s);
  CHECK(recompose(d.interleaving, d.a, d.b) == s);

  Decomposition id = decompose(Ranking::identity(6), part);
  CHECK(id.interleaving == Interleaving::a_first(2, 4));
  CHECK(id.a == Ranking::identity(2));
  CHECK(id.b == Ranking::identity(4));
}

TEST_CASE("decompose and recompose are inverse on S_6") {
  for (int k = 1; k <= 5; ++k) {
    for (const auto& a : subsets(6, k)) {
      ItemPartition part(6, a);
      for (const auto& s : enumerate_sn(6)) {
        Decomposition d = decompose(s, part);
        REQUIRE(recompose(d.interleaving, d.a, d.b, part) == s);
        CHECK(d.interleaving == interleaving_map(s, part));
        CHECK(d.a == relative_rank_map(s, part.a_items()));
        CHECK(d.b == relative_rank_map(s, part.b_items()));
      }
    }
  }
  for (const auto& tau : enumerate_interleavings(2, 3)) {
    for (const auto& a : enumerate_sn(2)) {
      for (const auto& b : enumerate_sn(3)) {
        ItemPartition part(5, {1, 3});
        Decomposition d = decompose(recompose(tau, a, b, part), part);
        CHECK(d.interleaving == tau);
        CHECK(d.a == a);
        CHECK(d.b == b);
      }
    }
  }
}

TEST_CASE("interleavings preserve relative order within blocks") {
  for (int p = 1; p < 6; ++p) {
    const int q = 6 - p;
    for (const auto& tau : enumerate_interleavings(p, q)) {
      const Ranking& t = tau.ranking();
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          if ((i < p) != (j < p)) continue;
          CHECK((i < j) == (t[i] < t[j]));
        }
      }
    }
  }
}

TEST_CASE("item partition relabeling") {
  ItemPartition part(5, {3, 1});
  CHECK(part.a_items() == std::vector<int>{1, 3});
  CHECK(part.b_items() == std::vector<int>{0, 2, 4});
  for (int i = 0; i < 5; ++i) CHECK(part.from_contiguous(part.to_contiguous(i)) == i);
  CHECK(part.to_contiguous(1) == 0);
  CHECK(part.to_contiguous(3) == 1);
  CHECK(part.to_contiguous(0) == 2);
  CHECK_THROWS_AS(ItemPartition(3, {}), std::invalid_argument);
  CHECK_THROWS_AS(ItemPartition(3, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(ItemPartition(3, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(ItemPartition(3, {5}), std::invalid_argument);
}

}  // namespace
}  // namespace riffle
