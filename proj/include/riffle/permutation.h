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

// Rankings, item partitions and interleavings.
//
// Conventions used throughout the library:
//  * Items and ranks are 0-based internally. A Ranking stores, for each item
//    j, its rank sigma(j). The "ordering" view lists items from most to least
//    preferred and is the inverse permutation.
//  * Composition: compose(s, t)[i] = s[t[i]], i.e. t is applied first. A
//    ranking tau * sigma that re-ranks the output of sigma is compose(tau,
//    sigma).

#ifndef RIFFLE_PERMUTATION_H_
#define RIFFLE_PERMUTATION_H_

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace riffle {

// Hard ceiling on n for anything that enumerates S_n. Overridable through the
// RIFFLE_MAX_N environment variable (validated to lie in [1, 12]).
inline constexpr int kDefaultMaxDenseN = 10;
int max_dense_n();
// Throws std::length_error naming `what` when n exceeds max_dense_n().
void check_dense_cap(int n, const char* what);

std::uint64_t factorial(int n);
std::uint64_t binomial(int n, int k);

class Ranking {
 public:
  Ranking() = default;
  // `ranks[j]` is the 0-based rank of item j. Throws std::invalid_argument if
  // `ranks` is not a permutation of {0, ..., n-1}.
  explicit Ranking(std::vector<int> ranks);

  static Ranking identity(int n);
  // 1-based one-line ranking notation, e.g. {3, 1, 5, 6, 2, 4}.
  static Ranking from_one_based(std::initializer_list<int> ranks);
  static Ranking from_one_based(std::span<const int> ranks);
  // Builds a ranking from an ordering: `items[r]` is the item at rank r.
  static Ranking from_ordering(std::vector<int> items);

  int size() const { return static_cast<int>(ranks_.size()); }
  int operator[](int item) const { return ranks_[item]; }
  std::span<const int> ranks() const { return ranks_; }
  // Items listed from rank 0 to rank n-1.
  std::vector<int> ordering() const;
  std::vector<int> one_based() const;
  std::string to_string() const;

  friend bool operator==(const Ranking&, const Ranking&) = default;
  friend auto operator<=>(const Ranking&, const Ranking&) = default;

 private:
  std::vector<int> ranks_;
};

Ranking compose(const Ranking& s, const Ranking& t);
Ranking inverse(const Ranking& s);

// Lexicographic Lehmer-code index in [0, n!).
std::uint64_t rank_index(const Ranking& s);
Ranking from_index(int n, std::uint64_t index);
// All of S_n in lexicographic order (consistent with rank_index).
std::vector<Ranking> enumerate_sn(int n);

// A split of an item set {0..n-1} into two nonempty blocks A and B. Carries
// the relabeling to the contiguous form A' = {0..p-1}, B' = {p..n-1}: items
// of A keep their relative order and come first.
class ItemPartition {
 public:
  ItemPartition(int n, std::vector<int> a_items);
  static ItemPartition contiguous(int p, int q);

  int n() const { return n_; }
  int p() const { return static_cast<int>(a_.size()); }
  int q() const { return static_cast<int>(b_.size()); }
  const std::vector<int>& a_items() const { return a_; }
  const std::vector<int>& b_items() const { return b_; }
  bool in_a(int item) const { return in_a_[item] != 0; }
  int to_contiguous(int item) const { return to_contiguous_[item]; }
  int from_contiguous(int label) const { return from_contiguous_[label]; }

 private:
  int n_ = 0;
  std::vector<int> a_, b_;
  std::vector<char> in_a_;
  std::vector<int> to_contiguous_, from_contiguous_;
};

// An element tau of Omega_{p,q}: tau(0) < ... < tau(p-1) and
// tau(p) < ... < tau(n-1).
class Interleaving {
 public:
  Interleaving(Ranking tau, int p);
  // Builds from a rank-ordered block pattern: `a_at_rank[r]` is true when
  // rank r is held by the A block.
  static Interleaving from_pattern(const std::vector<bool>& a_at_rank);
  static Interleaving from_index(int p, int q, std::uint64_t index);
  static Interleaving a_first(int p, int q);
  static Interleaving b_first(int p, int q);

  const Ranking& ranking() const { return tau_; }
  int p() const { return p_; }
  int q() const { return tau_.size() - p_; }
  int n() const { return tau_.size(); }
  std::vector<bool> pattern() const;
  // Position of this interleaving in enumerate_interleavings(p, q).
  std::uint64_t index() const;

  friend bool operator==(const Interleaving&, const Interleaving&) = default;

 private:
  Ranking tau_;
  int p_ = 0;
};

bool is_interleaving(const Ranking& tau, int p);
// All C(p+q, p) interleavings, in lexicographic order of the ranking tau.
std::vector<Interleaving> enumerate_interleavings(int p, int q);

Interleaving interleaving_map(const Ranking& s, const ItemPartition& part);
// Relative ranking of `items` (sorted, distinct) within s.
Ranking relative_rank_map(const Ranking& s, std::span<const int> items);

struct Decomposition {
  Interleaving interleaving;
  Ranking a;
  Ranking b;
};

Decomposition decompose(const Ranking& s, const ItemPartition& part);
// Inverse of decompose: item a_items[i] gets rank tau(a[i]) and item
// b_items[j] gets rank tau(p + b[j]).
Ranking recompose(const Interleaving& tau, const Ranking& a, const Ranking& b,
                  const ItemPartition& part);
// Contiguous form: sigma = tau (a, b + p).
Ranking recompose(const Interleaving& tau, const Ranking& a, const Ranking& b);

}  // namespace riffle

#endif  // RIFFLE_PERMUTATION_H_
