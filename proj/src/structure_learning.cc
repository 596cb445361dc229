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

#include "riffle/structure_learning.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace riffle {
namespace {

constexpr double kTieTolerance = 1e-12;
// Estimates below this are rounding residue of an exact zero.
constexpr double kMiFloor = 1e-13;

double xlogx_ratio(double pxy, double px, double py) {
  return pxy > 0.0 ? pxy * std::log(pxy / (px * py)) : 0.0;
}

std::vector<char> membership(int n, const std::vector<int>& a) {
  std::vector<char> in(n, 0);
  for (int x : a) {
    if (x < 0 || x >= n || in[x]) throw std::invalid_argument("item set has invalid entries");
    in[x] = 1;
  }
  return in;
}

std::vector<int> complement(int n, const std::vector<int>& a) {
  std::vector<char> in = membership(n, a);
  std::vector<int> b;
  for (int x = 0; x < n; ++x) {
    if (!in[x]) b.push_back(x);
  }
  return b;
}

void check_split(int n, const std::vector<int>& a) {
  if (a.empty() || static_cast<int>(a.size()) >= n) {
    throw std::invalid_argument("split needs 1 <= |A| <= n-1");
  }
}

double score(const TripletMITensor& t, const std::vector<int>& a, Objective o) {
  return o == Objective::kCross ? objective_cross(t, a) : objective_balanced(t, a);
}

// Keeps the best candidate, resolving near-ties to the lexicographically
// smallest set.
struct Best {
  std::vector<int> a;
  double value = std::numeric_limits<double>::infinity();

  void offer(const std::vector<int>& cand, double v) {
    if (a.empty() || v < value - kTieTolerance || (v <= value + kTieTolerance && cand < a)) {
      a = cand;
      value = v;
    }
  }
};

WeightedRankings restrict_to(const WeightedRankings& data, const std::vector<int>& items) {
  std::map<Ranking, double> acc;
  for (std::size_t i = 0; i < data.rankings.size(); ++i) {
    acc[relative_rank_map(data.rankings[i], items)] += data.weights[i];
  }
  WeightedRankings out;
  out.n = static_cast<int>(items.size());
  for (auto& [s, w] : acc) {
    out.rankings.push_back(s);
    out.weights.push_back(w);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Mutual information

TripletMITensor estimate_triplet_mi(const WeightedRankings& data, std::optional<double> smoothing) {
  const int n = data.n;
  const double total = data.total_weight();
  if (data.rankings.empty() || !(total > 0.0)) {
    throw std::invalid_argument("estimate_triplet_mi: no data");
  }
  const double s = smoothing.value_or(1.0 / total);
  if (s < 0.0) throw std::invalid_argument("estimate_triplet_mi: negative smoothing");

  // cnt[i*n + r]: weight with sigma(i) = r. c1[((i*n + j)*n + k)*n + r]:
  // weight with sigma(i) = r and sigma(j) < sigma(k), for j < k.
  std::vector<double> cnt(n * n, 0.0);
  std::vector<double> c1(static_cast<std::size_t>(n) * n * n * n, 0.0);
  for (std::size_t m = 0; m < data.rankings.size(); ++m) {
    const Ranking& sig = data.rankings[m];
    const double w = data.weights[m];
    for (int i = 0; i < n; ++i) {
      const int r = sig[i];
      cnt[i * n + r] += w;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        for (int k = j + 1; k < n; ++k) {
          if (k == i) continue;
          if (sig[j] < sig[k]) c1[((static_cast<std::size_t>(i) * n + j) * n + k) * n + r] += w;
        }
      }
    }
  }

  TripletMITensor t;
  t.n = n;
  t.sample_weight = total;
  t.smoothing = s;
  t.values.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  const double z = total + 2.0 * n * s;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      for (int k = j + 1; k < n; ++k) {
        if (k == i) continue;
        const double* row = &c1[((static_cast<std::size_t>(i) * n + j) * n + k) * n];
        double y1 = 0.0;
        for (int r = 0; r < n; ++r) y1 += row[r];
        const double py1 = (y1 + n * s) / z;
        const double py0 = 1.0 - py1;
        double mi = 0.0;
        for (int r = 0; r < n; ++r) {
          const double px = (cnt[i * n + r] + 2.0 * s) / z;
          mi += xlogx_ratio((row[r] + s) / z, px, py1);
          mi += xlogx_ratio((cnt[i * n + r] - row[r] + s) / z, px, py0);
        }
        if (mi < kMiFloor) mi = 0.0;
        t.values[(i * n + j) * n + k] = mi;
        t.values[(i * n + k) * n + j] = mi;
      }
    }
  }
  return t;
}

TripletMITensor estimate_triplet_mi(const SampleSet& samples, std::optional<double> smoothing) {
  return estimate_triplet_mi(WeightedRankings::from_samples(samples), smoothing);
}

TripletMITensor estimate_triplet_mi(const DenseDistribution& h) {
  return estimate_triplet_mi(h.support(), 0.0);
}

std::uint64_t cross_triplet_count(int n, int k) {
  const std::uint64_t a = k, b = n - k;
  return a * b * (b > 0 ? b - 1 : 0) + b * a * (a > 0 ? a - 1 : 0);
}

double objective_cross(const TripletMITensor& t, const std::vector<int>& a) {
  const int n = t.n;
  check_split(n, a);
  std::vector<int> b = complement(n, a);
  double total = 0.0;
  std::uint64_t terms = 0;
  auto add = [&](const std::vector<int>& from, const std::vector<int>& to) {
    for (int i : from) {
      for (int j : to) {
        for (int k : to) {
          if (j == k) continue;
          total += t.at(i, j, k);
          ++terms;
        }
      }
    }
  };
  add(a, b);
  add(b, a);
  if (terms != cross_triplet_count(n, static_cast<int>(a.size()))) {
    throw std::logic_error("objective_cross: triplet count mismatch");
  }
  return total;
}

double objective_balanced(const TripletMITensor& t, const std::vector<int>& a) {
  const int n = t.n;
  check_split(n, a);
  std::vector<int> b = complement(n, a);
  auto sum = [&](const std::vector<int>& from, const std::vector<int>& to) {
    double s = 0.0;
    for (int i : from) {
      for (int j : to) {
        if (j == i) continue;
        for (int k : to) {
          if (k == j || k == i) continue;
          s += t.at(i, j, k);
        }
      }
    }
    return s;
  };
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  const double cross_ab = sum(a, b), cross_ba = sum(b, a);
  return ratio(cross_ab, cross_ab + sum(a, a)) + ratio(cross_ba, cross_ba + sum(b, b));
}

double min_internal_mi(const TripletMITensor& t, const std::vector<int>& block) {
  double best = std::numeric_limits<double>::infinity();
  for (int i : block) {
    for (int j : block) {
      for (int k : block) {
        if (i == j || j == k || i == k) continue;
        best = std::min(best, t.at(i, j, k));
      }
    }
  }
  return best;
}

double objective_quad(const WeightedRankings& data, const std::vector<int>& a, double smoothing) {
  const int n = data.n;
  check_split(n, a);
  std::vector<int> b = complement(n, a);
  if (a.size() < 2 || b.size() < 2) {
    std::clog << "warning: quadruplet objective is empty when a block has fewer than two "
                 "items; returning 0\n";
    return 0.0;
  }
  const double total = data.total_weight();
  const double z = total + 4.0 * smoothing;
  double sum = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    for (std::size_t y = x + 1; y < a.size(); ++y) {
      for (std::size_t u = 0; u < b.size(); ++u) {
        for (std::size_t v = u + 1; v < b.size(); ++v) {
          double c[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
          for (std::size_t m = 0; m < data.rankings.size(); ++m) {
            const Ranking& s = data.rankings[m];
            c[s[a[x]] < s[a[y]]][s[b[u]] < s[b[v]]] += data.weights[m];
          }
          double p[2][2], px[2] = {0.0, 0.0}, py[2] = {0.0, 0.0};
          for (int e = 0; e < 2; ++e) {
            for (int f = 0; f < 2; ++f) {
              p[e][f] = (c[e][f] + smoothing) / z;
              px[e] += p[e][f];
              py[f] += p[e][f];
            }
          }
          double mi = 0.0;
          for (int e = 0; e < 2; ++e) {
            for (int f = 0; f < 2; ++f) mi += xlogx_ratio(p[e][f], px[e], py[f]);
          }
          sum += std::max(mi, 0.0);
        }
      }
    }
  }
  return sum;
}

double relative_rank_mi(const WeightedRankings& data, const std::vector<int>& a) {
  const int n = data.n;
  check_split(n, a);
  std::vector<int> b = complement(n, a);
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> joint;
  std::map<std::uint64_t, double> fa, fb;
  const double total = data.total_weight();
  for (std::size_t m = 0; m < data.rankings.size(); ++m) {
    std::uint64_t ia = rank_index(relative_rank_map(data.rankings[m], a));
    std::uint64_t ib = rank_index(relative_rank_map(data.rankings[m], b));
    const double w = data.weights[m] / total;
    joint[{ia, ib}] += w;
    fa[ia] += w;
    fb[ib] += w;
  }
  double mi = 0.0;
  for (const auto& [key, p] : joint) mi += xlogx_ratio(p, fa[key.first], fb[key.second]);
  return std::max(mi, 0.0);
}

// ---------------------------------------------------------------------------
// Search

std::string to_string(Objective o) { return o == Objective::kCross ? "cross" : "balanced"; }

std::string to_string(SearchMethod m) {
  return m == SearchMethod::kExhaustive ? "exhaustive" : "anchors";
}

PartitionResult exhaustive_partition(const TripletMITensor& t, std::optional<int> k,
                                     Objective objective, std::uint64_t budget) {
  const int n = t.n;
  if (n < 2) throw std::invalid_argument("exhaustive_partition: need at least two items");
  int lo = 1, hi = n / 2;
  if (k) {
    if (*k < 1 || *k >= n) throw std::invalid_argument("exhaustive_partition: need 1 <= k < n");
    lo = hi = *k;
  }
  std::uint64_t candidates = 0;
  for (int size = lo; size <= hi; ++size) candidates += binomial(n, size);
  if (candidates > budget) {
    throw std::length_error("exhaustive_partition: " + std::to_string(candidates) +
                            " candidate subsets exceed the budget of " + std::to_string(budget));
  }
  Best best;
  for (int size = lo; size <= hi; ++size) {
    std::vector<int> comb(size);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      best.offer(comb, score(t, comb, objective));
      int i = size - 1;
      while (i >= 0 && comb[i] == n - size + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < size; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  return PartitionResult{best.a, complement(n, best.a), best.value};
}

PartitionResult anchors_partition(const TripletMITensor& t, std::optional<int> k,
                                  Objective objective) {
  const int n = t.n;
  if (n < 3) throw std::invalid_argument("anchors_partition: need at least three items");
  if (k && (*k < 1 || *k >= n)) throw std::invalid_argument("anchors_partition: need 1 <= k < n");
  std::set<std::vector<int>> candidates;
  std::vector<int> others;
  for (int a1 = 0; a1 < n; ++a1) {
    for (int a2 = 0; a2 < n; ++a2) {
      if (a1 == a2) continue;
      others.clear();
      for (int x = 0; x < n; ++x) {
        if (x != a1 && x != a2) others.push_back(x);
      }
      std::stable_sort(others.begin(), others.end(), [&](int x, int y) {
        return t.at(x, a1, a2) < t.at(y, a1, a2);
      });
      for (int len = 1; len <= n - 2; ++len) {
        std::vector<int> low(others.begin(), others.begin() + len);
        std::sort(low.begin(), low.end());
        std::vector<int> high = complement(n, low);
        if (!k) {
          // Same orientation as exhaustive_partition: the smaller side, and
          // the lexicographically smaller one for an even split.
          candidates.insert(2 * len < n || (2 * len == n && low < high) ? low : high);
          continue;
        }
        if (static_cast<int>(low.size()) == *k) candidates.insert(low);
        if (static_cast<int>(high.size()) == *k) candidates.insert(high);
      }
    }
  }
  Best best;
  for (const auto& cand : candidates) best.offer(cand, score(t, cand, objective));
  return PartitionResult{best.a, complement(n, best.a), best.value};
}

// ---------------------------------------------------------------------------
// Hierarchies

namespace {

std::vector<int> lift(const std::vector<int>& local, const std::vector<int>& items) {
  std::vector<int> out;
  for (int x : local) out.push_back(items[x]);
  return out;
}

ItemTree learn_node(const WeightedRankings& data, const std::vector<int>& items,
                    const LearnOptions& opt, std::vector<SplitRecord>& splits) {
  const int m = static_cast<int>(items.size());
  if (m <= std::max(opt.leaf_cap, 1)) return ItemTree::leaf(items);
  PartitionResult split;
  const bool thin = opt.mode == LearnOptions::Mode::kThin;
  if (m == 2) {
    split = PartitionResult{{0}, {1}, 0.0};
  } else {
    WeightedRankings local = restrict_to(data, items);
    TripletMITensor t = estimate_triplet_mi(local, opt.smoothing);
    std::optional<int> k;
    if (thin) k = std::min(opt.k, m - 1);
    split = opt.method == SearchMethod::kExhaustive ? exhaustive_partition(t, k, *opt.objective)
                                                    : anchors_partition(t, k, *opt.objective);
  }
  std::vector<int> a = lift(split.a, items), b = lift(split.b, items);
  splits.push_back(SplitRecord{items, a, split.value});
  ItemTree left = thin ? ItemTree::leaf(a) : learn_node(data, a, opt, splits);
  ItemTree right = learn_node(data, b, opt, splits);
  return ItemTree::split(std::move(left), std::move(right));
}

}  // namespace

LearnedHierarchy learn_hierarchy(const WeightedRankings& data, const LearnOptions& options) {
  if (data.rankings.empty()) throw std::invalid_argument("learn_hierarchy: no data");
  if (options.leaf_cap < 1) throw std::invalid_argument("learn_hierarchy: leaf_cap must be >= 1");
  if (options.mode == LearnOptions::Mode::kThin && options.k < 1) {
    throw std::invalid_argument("learn_hierarchy: thin chains need k >= 1");
  }
  std::vector<int> all(data.n);
  std::iota(all.begin(), all.end(), 0);
  LearnedHierarchy out;
  out.options = options;
  if (!out.options.objective) {
    out.options.objective =
        options.mode == LearnOptions::Mode::kThin ? Objective::kCross : Objective::kBalanced;
  }
  out.tree = learn_node(data, all, out.options, out.splits).canonical();
  return out;
}

LearnedHierarchy learn_hierarchy(const DenseDistribution& h, const LearnOptions& options) {
  LearnOptions exact = options;
  if (!exact.smoothing) exact.smoothing = 0.0;
  return learn_hierarchy(h.support(), exact);
}

std::string to_string(Agreement a) {
  switch (a) {
    case Agreement::kExactTree:
      return "exact";
    case Agreement::kTopPartition:
      return "top";
    case Agreement::kLeafSets:
      return "leaf_sets";
  }
  return "unknown";
}

bool structure_agreement(const ItemTree& a, const ItemTree& b, Agreement measure) {
  switch (measure) {
    case Agreement::kExactTree:
      return a.canonical() == b.canonical();
    case Agreement::kTopPartition: {
      if (a.items != b.items || a.is_leaf() != b.is_leaf()) return false;
      if (a.is_leaf()) return true;
      std::set<std::vector<int>> sa{a.children[0].items, a.children[1].items};
      std::set<std::vector<int>> sb{b.children[0].items, b.children[1].items};
      return sa == sb;
    }
    case Agreement::kLeafSets: {
      auto la = a.leaf_sets(), lb = b.leaf_sets();
      std::sort(la.begin(), la.end());
      std::sort(lb.begin(), lb.end());
      return la == lb;
    }
  }
  return false;
}

bool structure_agreement(const LearnedHierarchy& a, const LearnedHierarchy& b, Agreement measure) {
  return structure_agreement(a.tree, b.tree, measure);
}

BootstrapReport bootstrap_stability(const SampleSet& samples, const BootstrapOptions& options,
                                    std::mt19937_64& rng) {
  if (options.resamples < 1) throw std::invalid_argument("bootstrap: need at least one resample");
  if (samples.empty()) throw std::invalid_argument("bootstrap: no data");
  const std::vector<Ranking> pool = samples.expanded();
  std::vector<std::int64_t> sizes = options.sizes;
  if (sizes.empty()) sizes.push_back(static_cast<std::int64_t>(pool.size()));
  for (std::int64_t size : sizes) {
    if (size < 1) throw std::invalid_argument("bootstrap: sizes must be positive");
    if (!options.with_replacement && size > static_cast<std::int64_t>(pool.size())) {
      throw std::invalid_argument("bootstrap: size exceeds the data without replacement");
    }
  }
  BootstrapReport report;
  report.resamples = options.resamples;
  const Agreement measures[] = {Agreement::kExactTree, Agreement::kTopPartition,
                                Agreement::kLeafSets};
  for (Objective objective : {Objective::kCross, Objective::kBalanced}) {
    LearnOptions opt = options.learn;
    opt.objective = objective;
    const ItemTree reference =
        learn_hierarchy(WeightedRankings::from_sequence(samples.n(), pool), opt).tree;
    for (std::int64_t size : sizes) {
      std::vector<int> hits(3 + options.predicates.size(), 0);
      for (int rep = 0; rep < options.resamples; ++rep) {
        std::vector<Ranking> draw;
        draw.reserve(static_cast<std::size_t>(size));
        if (options.with_replacement) {
          std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
          for (std::int64_t i = 0; i < size; ++i) draw.push_back(pool[pick(rng)]);
        } else {
          std::vector<Ranking> shuffled = pool;
          std::shuffle(shuffled.begin(), shuffled.end(), rng);
          draw.assign(shuffled.begin(), shuffled.begin() + size);
        }
        ItemTree tree = learn_hierarchy(WeightedRankings::from_sequence(samples.n(), draw), opt).tree;
        for (int m = 0; m < 3; ++m) hits[m] += structure_agreement(tree, reference, measures[m]);
        for (std::size_t p = 0; p < options.predicates.size(); ++p) {
          hits[3 + p] += options.predicates[p].test(tree) ? 1 : 0;
        }
      }
      for (std::size_t m = 0; m < hits.size(); ++m) {
        BootstrapRow row;
        row.size = size;
        row.resamples = options.resamples;
        row.objective = objective;
        row.measure = m < 3 ? to_string(measures[m]) : options.predicates[m - 3].name;
        row.fraction = static_cast<double>(hits[m]) / options.resamples;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

}  // namespace riffle
