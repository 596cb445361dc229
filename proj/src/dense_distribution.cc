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

#include "riffle/dense_distribution.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace riffle {

void SampleSet::add(const Ranking& s, std::int64_t count) {
  if (s.size() != n_) {
    throw std::invalid_argument("SampleSet: ranking of size " + std::to_string(s.size()) +
                                " added to a set over " + std::to_string(n_) + " items");
  }
  if (count < 1) throw std::invalid_argument("SampleSet: counts must be positive");
  records_.emplace_back(s, count);
  total_ += count;
}

std::vector<Ranking> SampleSet::expanded() const {
  std::vector<Ranking> out;
  out.reserve(static_cast<std::size_t>(total_));
  for (const auto& [s, c] : records_) {
    for (std::int64_t i = 0; i < c; ++i) out.push_back(s);
  }
  return out;
}

double WeightedRankings::total_weight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

WeightedRankings WeightedRankings::from_samples(const SampleSet& samples) {
  WeightedRankings out;
  out.n = samples.n();
  for (const auto& [s, c] : samples.records()) {
    out.rankings.push_back(s);
    out.weights.push_back(static_cast<double>(c));
  }
  return out;
}

WeightedRankings WeightedRankings::from_sequence(int n, const std::vector<Ranking>& rankings) {
  std::map<Ranking, double> counts;
  for (const Ranking& s : rankings) counts[s] += 1.0;
  WeightedRankings out;
  out.n = n;
  for (const auto& [s, w] : counts) {
    out.rankings.push_back(s);
    out.weights.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------

DenseDistribution::DenseDistribution(int n, std::vector<double> probs, Normalization mode)
    : n_(n), probs_(std::move(probs)), mode_(mode) {
  check_dense_cap(n, "DenseDistribution");
  if (probs_.size() != factorial(n)) {
    throw std::invalid_argument("DenseDistribution: expected " + std::to_string(factorial(n)) +
                                " entries, got " + std::to_string(probs_.size()));
  }
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("DenseDistribution: entries must be finite and nonnegative");
    }
  }
  if (mode_ == Normalization::kNormalized && std::abs(total() - 1.0) > 1e-12) {
    throw std::invalid_argument("DenseDistribution: probabilities sum to " +
                                std::to_string(total()) + ", expected 1");
  }
}

DenseDistribution DenseDistribution::uniform(int n) {
  check_dense_cap(n, "uniform");
  std::uint64_t size = factorial(n);
  return DenseDistribution(n, std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

DenseDistribution DenseDistribution::delta(const Ranking& s) {
  check_dense_cap(s.size(), "delta");
  std::vector<double> p(factorial(s.size()), 0.0);
  p[rank_index(s)] = 1.0;
  return DenseDistribution(s.size(), std::move(p));
}

DenseDistribution DenseDistribution::from_weights(int n, std::vector<double> weights) {
  double t = 0.0;
  for (double w : weights) t += w;
  if (!(t > 0.0)) throw std::invalid_argument("from_weights: weights sum to zero");
  for (double& w : weights) w /= t;
  // Rounding can leave the sum a few ulps off; fold the residue into the
  // largest entry.
  double s = 0.0;
  for (double w : weights) s += w;
  auto it = std::max_element(weights.begin(), weights.end());
  *it += 1.0 - s;
  return DenseDistribution(n, std::move(weights));
}

DenseDistribution DenseDistribution::from_samples(const SampleSet& samples, double smoothing) {
  if (samples.empty()) throw std::invalid_argument("from_samples: empty sample set");
  return from_weighted(WeightedRankings::from_samples(samples), smoothing);
}

DenseDistribution DenseDistribution::from_weighted(const WeightedRankings& data,
                                                   double smoothing) {
  if (data.rankings.empty()) throw std::invalid_argument("from_weighted: empty data");
  if (smoothing < 0.0) throw std::invalid_argument("from_weighted: negative smoothing");
  check_dense_cap(data.n, "from_samples");
  std::vector<double> w(factorial(data.n), smoothing);
  for (std::size_t i = 0; i < data.rankings.size(); ++i) {
    w[rank_index(data.rankings[i])] += data.weights[i];
  }
  return from_weights(data.n, std::move(w));
}

double DenseDistribution::total() const {
  double t = 0.0;
  for (double p : probs_) t += p;
  return t;
}

WeightedRankings DenseDistribution::support() const {
  WeightedRankings out;
  out.n = n_;
  for (std::uint64_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > 0.0) {
      out.rankings.push_back(from_index(n_, i));
      out.weights.push_back(probs_[i]);
    }
  }
  return out;
}

Ranking DenseDistribution::mode() const {
  // Index order equals lexicographic order, so the first maximum is the
  // lexicographically smallest.
  auto it = std::max_element(probs_.begin(), probs_.end());
  return from_index(n_, static_cast<std::uint64_t>(it - probs_.begin()));
}

// ---------------------------------------------------------------------------

static void require_same_n(const DenseDistribution& a, const DenseDistribution& b,
                           const char* what) {
  if (a.n() != b.n()) {
    throw std::invalid_argument(std::string(what) + ": distributions over different n");
  }
}

double kl_divergence(const DenseDistribution& p, const DenseDistribution& q) {
  require_same_n(p, q, "kl_divergence");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(kl, 0.0);
}

double tv_distance(const DenseDistribution& p, const DenseDistribution& q) {
  require_same_n(p, q, "tv_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return 0.5 * d;
}

double entropy(const DenseDistribution& h) {
  double e = 0.0;
  for (double p : h.probs()) {
    if (p > 0.0) e -= p * std::log(p);
  }
  return e;
}

FirstOrderMatrix first_order_marginals(const DenseDistribution& h) {
  const int n = h.n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::uint64_t idx = 0; idx < h.size(); ++idx) {
    if (h[idx] == 0.0) continue;
    Ranking s = from_index(n, idx);
    for (int j = 0; j < n; ++j) m(s[j], j) += h[idx];
  }
  return m;
}

FirstOrderMatrix first_order_counts(const SampleSet& samples) {
  const int n = samples.n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [s, c] : samples.records()) {
    for (int j = 0; j < n; ++j) m(s[j], j) += static_cast<double>(c);
  }
  return m;
}

std::vector<std::vector<int>> ordered_tuples(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::vector<char> used(n, 0);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      cur.push_back(v);
      self(self);
      cur.pop_back();
      used[v] = 0;
    }
  };
  rec(rec);
  return out;
}

std::uint64_t tuple_index(int n, std::span<const int> tuple) {
  // Lexicographic index among ordered tuples of distinct values: a partial
  // Lehmer code.
  const int k = static_cast<int>(tuple.size());
  std::uint64_t idx = 0;
  std::vector<char> used(n, 0);
  for (int i = 0; i < k; ++i) {
    int smaller = 0;
    for (int v = 0; v < tuple[i]; ++v) smaller += used[v] ? 0 : 1;
    used[tuple[i]] = 1;
    // Number of completions of the remaining k-1-i slots.
    std::uint64_t tail = 1;
    for (int t = 0; t < k - 1 - i; ++t) tail *= static_cast<std::uint64_t>(n - 1 - i - t);
    idx += static_cast<std::uint64_t>(smaller) * tail;
  }
  return idx;
}

double KthOrderMarginals::at(std::span<const int> items, std::span<const int> ranks) const {
  return table(static_cast<Eigen::Index>(tuple_index(n, ranks)),
               static_cast<Eigen::Index>(tuple_index(n, items)));
}

KthOrderMarginals kth_order_marginals(int n, const std::vector<double>& values, int k) {
  if (k < 1 || k > n) {
    throw std::invalid_argument("kth_order_marginals: order " + std::to_string(k) +
                                " outside 1.." + std::to_string(n));
  }
  if (values.size() != factorial(n)) {
    throw std::invalid_argument("kth_order_marginals: expected n! values");
  }
  auto tuples = ordered_tuples(n, k);
  KthOrderMarginals out;
  out.n = n;
  out.k = k;
  out.table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tuples.size()),
                                    static_cast<Eigen::Index>(tuples.size()));
  std::vector<int> ranks(k);
  for (std::uint64_t idx = 0; idx < values.size(); ++idx) {
    if (values[idx] == 0.0) continue;
    Ranking s = from_index(n, idx);
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      for (int c = 0; c < k; ++c) ranks[c] = s[tuples[t][c]];
      out.table(static_cast<Eigen::Index>(tuple_index(n, ranks)), static_cast<Eigen::Index>(t)) +=
          values[idx];
    }
  }
  return out;
}

KthOrderMarginals kth_order_marginals(const DenseDistribution& h, int k) {
  return kth_order_marginals(h.n(), h.probs(), k);
}

KthOrderMarginals kth_order_counts(const SampleSet& samples, int k) {
  const int n = samples.n();
  if (k < 1 || k > n) {
    throw std::invalid_argument("kth_order_counts: order " + std::to_string(k) + " outside 1.." +
                                std::to_string(n));
  }
  auto tuples = ordered_tuples(n, k);
  if (tuples.size() > 5000) throw std::length_error("kth_order_counts: table too large");
  KthOrderMarginals out;
  out.n = n;
  out.k = k;
  out.table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tuples.size()),
                                    static_cast<Eigen::Index>(tuples.size()));
  std::vector<int> ranks(k);
  for (const auto& [s, c] : samples.records()) {
    for (std::size_t t = 0; t < tuples.size(); ++t) {
      for (int i = 0; i < k; ++i) ranks[i] = s[tuples[t][i]];
      out.table(static_cast<Eigen::Index>(tuple_index(n, ranks)), static_cast<Eigen::Index>(t)) +=
          static_cast<double>(c);
    }
  }
  return out;
}

double pairwise_marginal(const DenseDistribution& h, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= h.n() || j >= h.n()) {
    throw std::invalid_argument("pairwise_marginal: need two distinct valid items");
  }
  double p = 0.0;
  for (std::uint64_t idx = 0; idx < h.size(); ++idx) {
    if (h[idx] == 0.0) continue;
    Ranking s = from_index(h.n(), idx);
    if (s[i] < s[j]) p += h[idx];
  }
  return p;
}

DenseDistribution convolve(const DenseDistribution& m, const DenseDistribution& h) {
  require_same_n(m, h, "convolve");
  const int n = m.n();
  std::vector<Ranking> all = enumerate_sn(n);
  std::vector<double> out(all.size(), 0.0);
  for (std::size_t a = 0; a < all.size(); ++a) {
    if (m[a] == 0.0) continue;
    for (std::size_t b = 0; b < all.size(); ++b) {
      if (h[b] == 0.0) continue;
      // sigma = pi x with pi ~ m and x ~ h.
      out[rank_index(compose(all[a], all[b]))] += m[a] * h[b];
    }
  }
  auto mode = (m.normalized() && h.normalized()) ? DenseDistribution::Normalization::kNormalized
                                                 : DenseDistribution::Normalization::kUnnormalized;
  if (mode == DenseDistribution::Normalization::kNormalized) {
    return DenseDistribution::from_weights(n, std::move(out));
  }
  return DenseDistribution(n, std::move(out), mode);
}

DenseDistribution pointwise_condition(const DenseDistribution& prior,
                                      const DenseDistribution& likelihood) {
  require_same_n(prior, likelihood, "pointwise_condition");
  std::vector<double> w(prior.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = prior[i] * likelihood[i];
    total += w[i];
  }
  if (!(total > 0.0)) {
    throw std::domain_error("pointwise_condition: zero evidence (prior and likelihood disjoint)");
  }
  return DenseDistribution::from_weights(prior.n(), std::move(w));
}

DenseDistribution pairwise_likelihood(int n, int i, int j, double beta) {
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("pairwise_likelihood: beta in [0,1]");
  check_dense_cap(n, "pairwise_likelihood");
  std::vector<double> w(factorial(n));
  for (std::uint64_t idx = 0; idx < w.size(); ++idx) {
    Ranking s = from_index(n, idx);
    w[idx] = s[i] < s[j] ? beta : 1.0 - beta;
  }
  return DenseDistribution(n, std::move(w), DenseDistribution::Normalization::kUnnormalized);
}

}  // namespace riffle
