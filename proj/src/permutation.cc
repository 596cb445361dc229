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

#include "riffle/permutation.h"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace riffle {

int max_dense_n() {
  const char* env = std::getenv("RIFFLE_MAX_N");
  if (env == nullptr || *env == '\0') return kDefaultMaxDenseN;
  char* end = nullptr;
  long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1 || value > 12) {
    throw std::invalid_argument(std::string("RIFFLE_MAX_N must be an integer in [1, 12], got '") +
                                env + "'");
  }
  return static_cast<int>(value);
}

void check_dense_cap(int n, const char* what) {
  int cap = max_dense_n();
  if (n > cap) {
    throw std::length_error(std::string(what) + ": n = " + std::to_string(n) +
                            " exceeds the dense enumeration cap of " + std::to_string(cap) +
                            " (set RIFFLE_MAX_N to raise it)");
  }
}

std::uint64_t factorial(int n) {
  if (n < 0 || n > 20) throw std::out_of_range("factorial: n out of range");
  std::uint64_t r = 1;
  for (int i = 2; i <= n; ++i) r *= static_cast<std::uint64_t>(i);
  return r;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Ranking

Ranking::Ranking(std::vector<int> ranks) : ranks_(std::move(ranks)) {
  const int n = size();
  std::vector<int> seen(n, -1);
  for (int j = 0; j < n; ++j) {
    int r = ranks_[j];
    if (r < 0 || r >= n) {
      throw std::invalid_argument("ranking value " + std::to_string(r + 1) +
                                  " out of range 1.." + std::to_string(n));
    }
    if (seen[r] >= 0) {
      throw std::invalid_argument("duplicate value " + std::to_string(r + 1) +
                                  " in ranking (not a permutation)");
    }
    seen[r] = j;
  }
}

Ranking Ranking::identity(int n) {
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 0);
  return Ranking(std::move(r));
}

Ranking Ranking::from_one_based(std::initializer_list<int> ranks) {
  return from_one_based(std::span<const int>(ranks.begin(), ranks.size()));
}

Ranking Ranking::from_one_based(std::span<const int> ranks) {
  std::vector<int> r(ranks.begin(), ranks.end());
  for (int& v : r) --v;
  return Ranking(std::move(r));
}

Ranking Ranking::from_ordering(std::vector<int> items) {
  const int n = static_cast<int>(items.size());
  std::vector<int> ranks(n, -1);
  for (int r = 0; r < n; ++r) {
    int item = items[r];
    if (item < 0 || item >= n) {
      throw std::invalid_argument("ordering value " + std::to_string(item + 1) +
                                  " out of range 1.." + std::to_string(n));
    }
    if (ranks[item] >= 0) {
      throw std::invalid_argument("duplicate value " + std::to_string(item + 1) +
                                  " in ordering (not a permutation)");
    }
    ranks[item] = r;
  }
  return Ranking(std::move(ranks));
}

std::vector<int> Ranking::ordering() const {
  std::vector<int> items(ranks_.size());
  for (int j = 0; j < size(); ++j) items[ranks_[j]] = j;
  return items;
}

std::vector<int> Ranking::one_based() const {
  std::vector<int> r(ranks_);
  for (int& v : r) ++v;
  return r;
}

std::string Ranking::to_string() const {
  std::ostringstream os;
  os << '(';
  for (int j = 0; j < size(); ++j) os << (j ? "," : "") << ranks_[j] + 1;
  os << ')';
  return os.str();
}

Ranking compose(const Ranking& s, const Ranking& t) {
  if (s.size() != t.size()) {
    throw std::invalid_argument("compose: size mismatch (" + std::to_string(s.size()) + " vs " +
                                std::to_string(t.size()) + ")");
  }
  std::vector<int> r(s.size());
  for (int i = 0; i < s.size(); ++i) r[i] = s[t[i]];
  return Ranking(std::move(r));
}

Ranking inverse(const Ranking& s) { return Ranking(s.ordering()); }

// ---------------------------------------------------------------------------
// Lehmer indexing

std::uint64_t rank_index(const Ranking& s) {
  const int n = s.size();
  std::uint64_t index = 0;
  std::vector<char> used(n, 0);
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int v = 0; v < s[i]; ++v) smaller += used[v] ? 0 : 1;
    used[s[i]] = 1;
    index = index * static_cast<std::uint64_t>(n - i) + static_cast<std::uint64_t>(smaller);
  }
  return index;
}

Ranking from_index(int n, std::uint64_t index) {
  if (n < 0 || n > 20 || index >= factorial(n)) {
    throw std::out_of_range("from_index: index " + std::to_string(index) + " out of range for n = " +
                            std::to_string(n));
  }
  std::vector<int> digits(n);
  for (int i = n - 1; i >= 0; --i) {
    std::uint64_t base = static_cast<std::uint64_t>(n - i);
    digits[i] = static_cast<int>(index % base);
    index /= base;
  }
  std::vector<int> avail(n);
  std::iota(avail.begin(), avail.end(), 0);
  std::vector<int> r(n);
  for (int i = 0; i < n; ++i) {
    r[i] = avail[digits[i]];
    avail.erase(avail.begin() + digits[i]);
  }
  return Ranking(std::move(r));
}

std::vector<Ranking> enumerate_sn(int n) {
  check_dense_cap(n, "enumerate_sn");
  std::vector<Ranking> out;
  out.reserve(factorial(n));
  std::vector<int> r(n);
  std::iota(r.begin(), r.end(), 0);
  do {
    out.emplace_back(r);
  } while (std::next_permutation(r.begin(), r.end()));
  return out;
}

// ---------------------------------------------------------------------------
// ItemPartition

ItemPartition::ItemPartition(int n, std::vector<int> a_items) : n_(n), a_(std::move(a_items)) {
  std::sort(a_.begin(), a_.end());
  if (std::adjacent_find(a_.begin(), a_.end()) != a_.end()) {
    throw std::invalid_argument("ItemPartition: duplicate item in A");
  }
  in_a_.assign(n, 0);
  for (int a : a_) {
    if (a < 0 || a >= n) throw std::invalid_argument("ItemPartition: item out of range");
    in_a_[a] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (!in_a_[i]) b_.push_back(i);
  }
  if (a_.empty() || b_.empty()) {
    throw std::invalid_argument("ItemPartition: both blocks must be nonempty");
  }
  to_contiguous_.assign(n, 0);
  from_contiguous_.reserve(n);
  for (int a : a_) from_contiguous_.push_back(a);
  for (int b : b_) from_contiguous_.push_back(b);
  for (int l = 0; l < n; ++l) to_contiguous_[from_contiguous_[l]] = l;
}

ItemPartition ItemPartition::contiguous(int p, int q) {
  std::vector<int> a(p);
  std::iota(a.begin(), a.end(), 0);
  return ItemPartition(p + q, std::move(a));
}

// ---------------------------------------------------------------------------
// Interleavings

bool is_interleaving(const Ranking& tau, int p) {
  const int n = tau.size();
  if (p < 0 || p > n) return false;
  for (int i = 1; i < p; ++i) {
    if (tau[i - 1] > tau[i]) return false;
  }
  for (int i = p + 1; i < n; ++i) {
    if (tau[i - 1] > tau[i]) return false;
  }
  return true;
}

Interleaving::Interleaving(Ranking tau, int p) : tau_(std::move(tau)), p_(p) {
  if (!is_interleaving(tau_, p_)) {
    throw std::invalid_argument("Interleaving: " + tau_.to_string() + " is not a (" +
                                std::to_string(p_) + "," + std::to_string(tau_.size() - p_) +
                                ")-interleaving");
  }
}

Interleaving Interleaving::from_pattern(const std::vector<bool>& a_at_rank) {
  const int n = static_cast<int>(a_at_rank.size());
  int p = static_cast<int>(std::count(a_at_rank.begin(), a_at_rank.end(), true));
  std::vector<int> r(n);
  int ia = 0, ib = p;
  for (int rank = 0; rank < n; ++rank) {
    if (a_at_rank[rank]) {
      r[ia++] = rank;
    } else {
      r[ib++] = rank;
    }
  }
  return Interleaving(Ranking(std::move(r)), p);
}

std::vector<bool> Interleaving::pattern() const {
  std::vector<bool> pat(n(), false);
  for (int i = 0; i < p_; ++i) pat[tau_[i]] = true;
  return pat;
}

// Lexicographic rank of the sorted A-rank subset among all p-subsets of
// {0..n-1}; lex order of these subsets coincides with lex order of tau.
std::uint64_t Interleaving::index() const {
  const int n = this->n();
  std::uint64_t idx = 0;
  int prev = -1;
  for (int i = 0; i < p_; ++i) {
    for (int v = prev + 1; v < tau_[i]; ++v) idx += binomial(n - 1 - v, p_ - 1 - i);
    prev = tau_[i];
  }
  return idx;
}

Interleaving Interleaving::from_index(int p, int q, std::uint64_t index) {
  const int n = p + q;
  if (p < 0 || q < 0 || index >= binomial(n, p)) {
    throw std::out_of_range("Interleaving::from_index: index out of range");
  }
  std::vector<bool> pat(n, false);
  int v = 0;
  for (int i = 0; i < p; ++i) {
    while (true) {
      std::uint64_t block = binomial(n - 1 - v, p - 1 - i);
      if (index < block) break;
      index -= block;
      ++v;
    }
    pat[v++] = true;
  }
  return from_pattern(pat);
}

Interleaving Interleaving::a_first(int p, int q) { return Interleaving(Ranking::identity(p + q), p); }

Interleaving Interleaving::b_first(int p, int q) {
  std::vector<bool> pat(p + q, false);
  for (int r = q; r < p + q; ++r) pat[r] = true;
  return from_pattern(pat);
}

std::vector<Interleaving> enumerate_interleavings(int p, int q) {
  if (p < 0 || q < 0) throw std::invalid_argument("enumerate_interleavings: negative size");
  const int n = p + q;
  if (n > 62) throw std::length_error("enumerate_interleavings: n too large");
  std::uint64_t count = binomial(n, p);
  if (count > 50'000'000ULL) {
    throw std::length_error("enumerate_interleavings: C(" + std::to_string(n) + "," +
                            std::to_string(p) + ") exceeds the enumeration cap");
  }
  std::vector<Interleaving> out;
  out.reserve(count);
  // Lexicographic p-combinations of {0..n-1}.
  std::vector<int> comb(p);
  std::iota(comb.begin(), comb.end(), 0);
  while (true) {
    std::vector<bool> pat(n, false);
    for (int c : comb) pat[c] = true;
    out.push_back(Interleaving::from_pattern(pat));
    int i = p - 1;
    while (i >= 0 && comb[i] == n - p + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < p; ++j) comb[j] = comb[j - 1] + 1;
  }
  return out;
}

Interleaving interleaving_map(const Ranking& s, const ItemPartition& part) {
  if (s.size() != part.n()) throw std::invalid_argument("interleaving_map: size mismatch");
  std::vector<bool> pat(s.size(), false);
  for (int a : part.a_items()) pat[s[a]] = true;
  return Interleaving::from_pattern(pat);
}

Ranking relative_rank_map(const Ranking& s, std::span<const int> items) {
  const int k = static_cast<int>(items.size());
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return s[items[x]] < s[items[y]]; });
  std::vector<int> r(k);
  for (int pos = 0; pos < k; ++pos) r[order[pos]] = pos;
  return Ranking(std::move(r));
}

Decomposition decompose(const Ranking& s, const ItemPartition& part) {
  return Decomposition{interleaving_map(s, part), relative_rank_map(s, part.a_items()),
                       relative_rank_map(s, part.b_items())};
}

Ranking recompose(const Interleaving& tau, const Ranking& a, const Ranking& b,
                  const ItemPartition& part) {
  if (tau.p() != part.p() || a.size() != part.p() || b.size() != part.q()) {
    throw std::invalid_argument("recompose: size mismatch");
  }
  const Ranking& t = tau.ranking();
  std::vector<int> r(part.n());
  for (int i = 0; i < part.p(); ++i) r[part.a_items()[i]] = t[a[i]];
  for (int j = 0; j < part.q(); ++j) r[part.b_items()[j]] = t[part.p() + b[j]];
  return Ranking(std::move(r));
}

Ranking recompose(const Interleaving& tau, const Ranking& a, const Ranking& b) {
  return recompose(tau, a, b, ItemPartition::contiguous(a.size(), b.size()));
}

}  // namespace riffle
