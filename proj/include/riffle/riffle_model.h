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

// Interleaving distributions and hierarchical riffle independent models.
//
// Bias orientation: the biased riffle deals the bottom card (rank n-1) first,
// taking it from the A pile with weight alpha*a and from the B pile with
// weight (1-alpha)*b, where a and b are the cards left in each pile. So
// alpha = 0 always yields the A-first interleaving and alpha = 1 the B-first
// one.

#ifndef RIFFLE_RIFFLE_MODEL_H_
#define RIFFLE_RIFFLE_MODEL_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "riffle/dense_distribution.h"
#include "riffle/permutation.h"

namespace riffle {

class InterleavingDistribution {
 public:
  enum class Kind { kTable, kBiased, kMixture };

  InterleavingDistribution() = default;
  // Table over enumerate_interleavings(p, q). Throws unless normalized.
  static InterleavingDistribution table(int p, int q, std::vector<double> probs);
  static InterleavingDistribution uniform(int p, int q);
  static InterleavingDistribution biased(int p, int q, double alpha);
  static InterleavingDistribution mixture(int p, int q, std::vector<double> weights,
                                          std::vector<double> alphas);

  Kind kind() const { return kind_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int n() const { return p_ + q_; }
  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  double prob(const Interleaving& tau) const { return probs_[tau.index()]; }
  double operator[](std::uint64_t index) const { return probs_[index]; }
  // Set for kBiased.
  double alpha() const { return alphas_.empty() ? 0.5 : alphas_[0]; }
  // Set for kMixture (and a single component for kBiased).
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& alphas() const { return alphas_; }

  double entropy() const;
  Interleaving draw(std::mt19937_64& rng) const;

 private:
  Kind kind_ = Kind::kTable;
  int p_ = 0;
  int q_ = 0;
  std::vector<double> probs_;
  std::vector<double> weights_;
  std::vector<double> alphas_;
  std::vector<double> cdf_;
};

// Table of m^alpha over Omega_{p,q}, built cell by cell over the (a, b)
// grid of remaining pile sizes.
std::vector<double> biased_riffle(int p, int q, double alpha);
// Probability of `tau` under the biased dealing process, evaluated by walking
// its block pattern from the bottom rank up.
double interleaving_probability(const Interleaving& tau, double alpha);
double log_interleaving_probability(const Interleaving& tau, double alpha);
// Simulates the dealing process.
Interleaving draw_interleaving(int p, int q, double alpha, std::mt19937_64& rng);

// Maximizer of sum_tau m(tau) log m^alpha(tau): grid search followed by a
// golden-section refinement to 1e-8.
double fit_alpha(const InterleavingDistribution& m);
double fit_alpha(int p, int q, const std::vector<double>& target);

struct MixtureFit {
  std::vector<double> weights;
  std::vector<double> alphas;
  // sum_tau m(tau) log(sum_c w_c m^{alpha_c}(tau)).
  double log_likelihood = 0.0;
  // Objective after each EM iteration of the winning restart.
  std::vector<double> trace;
};

// EM over mixtures of biased riffles. Components with alphas closer than 1e-3
// are merged, and a fit with fewer components is returned when it loses less
// than 1e-6 in log-likelihood.
MixtureFit fit_mixture_alphas(const InterleavingDistribution& m, int components = 2,
                              int restarts = 10, std::uint64_t seed = 0);

// Item tree: each node lists its (sorted, global) items and has zero or two
// children. children[0] plays the role of A at that split.
struct ItemTree {
  std::vector<int> items;
  std::vector<ItemTree> children;

  bool is_leaf() const { return children.empty(); }
  static ItemTree leaf(std::vector<int> items);
  static ItemTree split(ItemTree a, ItemTree b);
  std::vector<std::vector<int>> leaf_sets() const;
  // Children ordered by smallest item, recursively.
  ItemTree canonical() const;
  std::string to_string() const;
  friend bool operator==(const ItemTree&, const ItemTree&) = default;
};

struct ModelNode {
  std::vector<int> items;
  // Internal nodes: interleaving over (|children[0]|, |children[1]|).
  std::optional<InterleavingDistribution> interleaving;
  std::vector<ModelNode> children;
  // Leaves: relative ranking distribution over S_{|items|}.
  std::optional<DenseDistribution> factor;

  bool is_leaf() const { return children.empty(); }
  // Partition of this node's local indices into the two children.
  ItemPartition local_partition() const;

  static ModelNode leaf(std::vector<int> items, DenseDistribution factor);
  static ModelNode split(InterleavingDistribution m, ModelNode a, ModelNode b);
};

class HierarchicalModel {
 public:
  // Validates the tree: children partition their parent, the root covers
  // {0..n-1}, every table has the right size and is normalized.
  explicit HierarchicalModel(ModelNode root);

  // Two-leaf model on an arbitrary partition.
  static HierarchicalModel riffle(const ItemPartition& part, InterleavingDistribution m,
                                  DenseDistribution f, DenseDistribution g);

  int n() const { return n_; }
  const ModelNode& root() const { return root_; }
  ItemTree tree() const;

  double prob(const Ranking& s) const;
  double log_prob(const Ranking& s) const;
  DenseDistribution to_dense() const;
  Ranking sample(std::mt19937_64& rng) const;
  std::vector<Ranking> sample(std::mt19937_64& rng, std::int64_t count) const;

 private:
  int n_ = 0;
  ModelNode root_;
};

// Two-block model as a dense table.
DenseDistribution riffle_join(const InterleavingDistribution& m, const DenseDistribution& f,
                              const DenseDistribution& g, const ItemPartition& part);

struct RiffleSplit {
  InterleavingDistribution m;
  DenseDistribution f;
  DenseDistribution g;
};

// Maximum likelihood factors: normalized counts of interleavings and of the
// two relative rankings.
RiffleSplit riffle_split_mle(const WeightedRankings& data, const ItemPartition& part);
RiffleSplit riffle_split_mle(const SampleSet& samples, const ItemPartition& part);
RiffleSplit riffle_split_mle(const DenseDistribution& h, const ItemPartition& part);

enum class InterleavingFit { kTable, kBiased, kMixture };

// Fits every node of `tree` by maximum likelihood on the relative rankings of
// its items. `smoothing` is a pseudocount added to every leaf and table cell.
HierarchicalModel fit_model(const ItemTree& tree, const WeightedRankings& data,
                            double smoothing = 0.0, InterleavingFit kind = InterleavingFit::kTable);

// Factorwise pointwise product, renormalized. Both models must share the same
// tree (same item sets at every node).
HierarchicalModel condition(const HierarchicalModel& prior, const HierarchicalModel& likelihood);
// Observation sigma(i) < sigma(j) with reliability beta. Updates the leaf that
// contains both items; throws std::domain_error ("non-decomposable
// observation") when a split separates them.
HierarchicalModel condition_pairwise(const HierarchicalModel& prior, int i, int j, double beta);

// Mode of the model; ties resolve to the lexicographically smallest ranking.
Ranking map_assignment(const HierarchicalModel& model);
double model_entropy(const HierarchicalModel& model);

// Single-level form of a hierarchy: d leaf sets interleaved jointly. The
// joint interleaving is a table over label sequences: labels[r] is the leaf
// holding rank r.
struct DWayDecomposition {
  int n = 0;
  std::vector<std::vector<int>> leaf_sets;
  std::vector<std::pair<std::vector<int>, double>> interleavings;
  std::vector<DenseDistribution> factors;

  double prob(const Ranking& s) const;
  DenseDistribution to_dense() const;
};

DWayDecomposition flatten_to_dway(const HierarchicalModel& model);

// Chain in which each split peels `groups[i]` off the remaining items (the
// last group is the final leaf). Interleavings and factors are supplied in
// chain order.
HierarchicalModel thin_chain(const std::vector<std::vector<int>>& groups,
                             const std::vector<InterleavingDistribution>& interleavings,
                             const std::vector<DenseDistribution>& factors);

}  // namespace riffle

#endif  // RIFFLE_RIFFLE_MODEL_H_
