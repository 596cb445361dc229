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

// Finding riffle independent splits from data with tripletwise mutual
// information, and building hierarchies by recursive splitting.

#ifndef RIFFLE_STRUCTURE_LEARNING_H_
#define RIFFLE_STRUCTURE_LEARNING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "riffle/dense_distribution.h"
#include "riffle/riffle_model.h"

namespace riffle {

// I(sigma(i); sigma(j) < sigma(k)) for ordered triplets of distinct items.
// Entries with repeated indices are zero and never summed.
struct TripletMITensor {
  int n = 0;
  double sample_weight = 0.0;
  double smoothing = 0.0;
  std::vector<double> values;  // n^3, index (i*n + j)*n + k.

  double at(int i, int j, int k) const { return values[(i * n + j) * n + k]; }
};

// Plug-in estimate from the n x 2 table of (sigma(i), [sigma(j) < sigma(k)])
// with `smoothing` added to every cell; natural log; values below 1e-13
// are set to zero. When
// unset the pseudocount is 1/m for total weight m.
TripletMITensor estimate_triplet_mi(const WeightedRankings& data,
                                    std::optional<double> smoothing = std::nullopt);
TripletMITensor estimate_triplet_mi(const SampleSet& samples,
                                    std::optional<double> smoothing = std::nullopt);
// Exact tensor of a distribution (no smoothing).
TripletMITensor estimate_triplet_mi(const DenseDistribution& h);

// Number of valid triplets (distinct indices) crossing A and B:
// k(n-k)(n-k-1) + (n-k)k(k-1) for |A| = k.
std::uint64_t cross_triplet_count(int n, int k);
double objective_cross(const TripletMITensor& t, const std::vector<int>& a);
// Normalized-cut variant; a 0/0 ratio contributes 0.
double objective_balanced(const TripletMITensor& t, const std::vector<int>& a);
// Smallest internal triplet value within `block` (+inf when it has < 3 items).
double min_internal_mi(const TripletMITensor& t, const std::vector<int>& block);

// I(sigma(i) < sigma(j); sigma(k) < sigma(l)) summed over unordered pairs
// {i,j} in A and {k,l} in B. Zero, with a warning on stderr, when either
// block has fewer than two items.
double objective_quad(const WeightedRankings& data, const std::vector<int>& a,
                      double smoothing = 0.0);
// Plug-in I(phi_A; phi_B) between the two relative rankings.
double relative_rank_mi(const WeightedRankings& data, const std::vector<int>& a);

enum class Objective { kCross, kBalanced };
enum class SearchMethod { kExhaustive, kAnchors };

std::string to_string(Objective o);
std::string to_string(SearchMethod m);

struct PartitionResult {
  std::vector<int> a;
  std::vector<int> b;
  double value = 0.0;
};

// Minimizes `objective` over subsets. With k set, over all k-subsets;
// otherwise over every subset with 1 <= |A| <= n/2. Ties resolve to the
// lexicographically smallest A. Throws std::length_error beyond `budget`
// candidates.
PartitionResult exhaustive_partition(const TripletMITensor& t, std::optional<int> k,
                                     Objective objective = Objective::kCross,
                                     std::uint64_t budget = 20'000'000ULL);

// Anchors search over every ordered anchor pair (a1, a2). The other items are
// sorted by I(x; a1 < a2); prefixes of that order (the low-information side)
// and their complements (the anchor side) are the candidates. Known k scores
// the size-k candidates with `objective`; unknown k scores all of them, each
// oriented with the smaller block as A.
PartitionResult anchors_partition(const TripletMITensor& t, std::optional<int> k,
                                  Objective objective = Objective::kCross);

struct LearnOptions {
  // Thin chains peel a block of size `k` at each split and recurse only into
  // the remainder; general mode searches every split size.
  enum class Mode { kThin, kGeneral };
  Mode mode = Mode::kGeneral;
  int k = 1;
  int leaf_cap = 2;
  // Unset: kCross in thin mode, kBalanced in general mode.
  std::optional<Objective> objective;
  SearchMethod method = SearchMethod::kAnchors;
  std::optional<double> smoothing;
};

struct SplitRecord {
  std::vector<int> items;
  std::vector<int> a;
  double value = 0.0;
};

struct LearnedHierarchy {
  ItemTree tree;  // Canonical.
  std::vector<SplitRecord> splits;  // Preorder.
  LearnOptions options;
};

// Top-down recursive splitting. Each node re-estimates the tensor from the
// relative rankings of its own items.
LearnedHierarchy learn_hierarchy(const WeightedRankings& data, const LearnOptions& options);
LearnedHierarchy learn_hierarchy(const DenseDistribution& h, const LearnOptions& options);

enum class Agreement { kExactTree, kTopPartition, kLeafSets };
std::string to_string(Agreement a);

bool structure_agreement(const ItemTree& a, const ItemTree& b, Agreement measure);
bool structure_agreement(const LearnedHierarchy& a, const LearnedHierarchy& b, Agreement measure);

struct NamedPredicate {
  std::string name;
  std::function<bool(const ItemTree&)> test;
};

struct BootstrapRow {
  std::int64_t size = 0;
  int resamples = 0;
  Objective objective = Objective::kCross;
  std::string measure;
  double fraction = 0.0;
};

struct BootstrapReport {
  int resamples = 0;
  std::vector<BootstrapRow> rows;
};

struct BootstrapOptions {
  int resamples = 200;
  std::vector<std::int64_t> sizes;
  LearnOptions learn;
  // Sampling with replacement; without it a resample of the full size is a
  // reordering of the data.
  bool with_replacement = true;
  std::vector<NamedPredicate> predicates;
};

// For each size and for both objectives, learns hierarchies on resampled data
// and reports the fraction agreeing with the full-data tree (exact, top and
// leaf-set agreement, then each named predicate).
BootstrapReport bootstrap_stability(const SampleSet& samples, const BootstrapOptions& options,
                                    std::mt19937_64& rng);

}  // namespace riffle

#endif  // RIFFLE_STRUCTURE_LEARNING_H_
