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

// Exact probability tables over S_n, indexed by rank_index. These are the
// brute-force reference every factored representation is checked against.

#ifndef RIFFLE_DENSE_DISTRIBUTION_H_
#define RIFFLE_DENSE_DISTRIBUTION_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "riffle/permutation.h"

namespace riffle {

// A multiset of rankings of a common size with positive integer counts.
class SampleSet {
 public:
  explicit SampleSet(int n) : n_(n) {}

  void add(const Ranking& s, std::int64_t count = 1);

  int n() const { return n_; }
  bool empty() const { return records_.empty(); }
  std::int64_t total() const { return total_; }
  const std::vector<std::pair<Ranking, std::int64_t>>& records() const { return records_; }
  // Expands counts into one entry per ballot, in record order.
  std::vector<Ranking> expanded() const;

 private:
  int n_;
  std::vector<std::pair<Ranking, std::int64_t>> records_;
  std::int64_t total_ = 0;
};

// Rankings with nonnegative real weights: the common input for estimators
// that accept either samples or an exact distribution.
struct WeightedRankings {
  int n = 0;
  std::vector<Ranking> rankings;
  std::vector<double> weights;

  double total_weight() const;
  static WeightedRankings from_samples(const SampleSet& samples);
  // Collapses repeated rankings into one weighted entry each.
  static WeightedRankings from_sequence(int n, const std::vector<Ranking>& rankings);
};

class DenseDistribution {
 public:
  enum class Normalization { kNormalized, kUnnormalized };

  DenseDistribution() = default;
  // Throws unless `probs` has n! nonnegative entries, summing to one within
  // 1e-12 when `mode` is kNormalized.
  DenseDistribution(int n, std::vector<double> probs,
                    Normalization mode = Normalization::kNormalized);

  static DenseDistribution uniform(int n);
  static DenseDistribution delta(const Ranking& s);
  // probs[sigma] proportional to count(sigma) + smoothing.
  static DenseDistribution from_samples(const SampleSet& samples, double smoothing = 0.0);
  static DenseDistribution from_weighted(const WeightedRankings& data, double smoothing = 0.0);
  // Normalizes nonnegative weights. Throws if they sum to zero.
  static DenseDistribution from_weights(int n, std::vector<double> weights);

  int n() const { return n_; }
  std::size_t size() const { return probs_.size(); }
  bool normalized() const { return mode_ == Normalization::kNormalized; }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::uint64_t index) const { return probs_[index]; }
  double prob(const Ranking& s) const { return probs_[rank_index(s)]; }
  double total() const;

  // Nonzero entries as weighted rankings.
  WeightedRankings support() const;
  // Lexicographically smallest argmax.
  Ranking mode() const;

 private:
  int n_ = 0;
  std::vector<double> probs_;
  Normalization mode_ = Normalization::kNormalized;
};

// D_KL(p || q) in nats; +infinity when supp(p) is not inside supp(q).
double kl_divergence(const DenseDistribution& p, const DenseDistribution& q);
double tv_distance(const DenseDistribution& p, const DenseDistribution& q);
double entropy(const DenseDistribution& h);

// M(rank, item) = h(sigma(item) = rank). Doubly stochastic for a normalized h.
using FirstOrderMatrix = Eigen::MatrixXd;

FirstOrderMatrix first_order_marginals(const DenseDistribution& h);
// Raw counts: M(rank, item) = number of ballots placing item at rank.
FirstOrderMatrix first_order_counts(const SampleSet& samples);

// Ordered k-tuples of distinct elements of {0..n-1}, in lexicographic order.
std::vector<std::vector<int>> ordered_tuples(int n, int k);
std::uint64_t tuple_index(int n, std::span<const int> tuple);

// Table over (item tuple, rank tuple) pairs: value(items, ranks) =
// h(sigma(items[t]) = ranks[t] for all t). Rows index rank tuples and columns
// index item tuples, both in ordered_tuples order.
struct KthOrderMarginals {
  int n = 0;
  int k = 0;
  Eigen::MatrixXd table;

  double at(std::span<const int> items, std::span<const int> ranks) const;
};

KthOrderMarginals kth_order_marginals(const DenseDistribution& h, int k);
// Same table for an arbitrary real function on S_n given by rank_index.
KthOrderMarginals kth_order_marginals(int n, const std::vector<double>& values, int k);
// Ballot counts in the same layout.
KthOrderMarginals kth_order_counts(const SampleSet& samples, int k);
// h(sigma(i) < sigma(j)).
double pairwise_marginal(const DenseDistribution& h, int i, int j);

// [m * h](sigma) = sum_pi m(pi) h(pi^{-1} sigma).
DenseDistribution convolve(const DenseDistribution& m, const DenseDistribution& h);
// Bayes rule: normalized pointwise product. Throws on zero evidence.
DenseDistribution pointwise_condition(const DenseDistribution& prior,
                                      const DenseDistribution& likelihood);
// Unnormalized likelihood: beta when sigma(i) < sigma(j), 1 - beta otherwise.
DenseDistribution pairwise_likelihood(int n, int i, int j, double beta);

}  // namespace riffle

#endif  // RIFFLE_DENSE_DISTRIBUTION_H_
