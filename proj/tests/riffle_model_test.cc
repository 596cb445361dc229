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
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "riffle/dense_distribution.h"
#include "riffle/riffle_model.h"

namespace riffle {
namespace {

DenseDistribution random_distribution(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(factorial(n));
  for (double& x : w) x = e(rng);
  return DenseDistribution::from_weights(n, w);
}

InterleavingDistribution random_interleaving(int p, int q, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(binomial(p + q, p));
  double total = 0.0;
  for (double& x : w) total += (x = e(rng));
  for (double& x : w) x /= total;
  double s = std::accumulate(w.begin(), w.end(), 0.0);
  w[0] += 1.0 - s;
  return InterleavingDistribution::table(p, q, w);
}

// Dealing oracle: walk ranks from the bottom up; with a cards of A and b of B
// left, rank r goes to A with probability alpha a / (alpha a + (1 - alpha) b).
double dealing_oracle(const std::vector<bool>& a_at_rank, double alpha) {
  int a = static_cast<int>(std::count(a_at_rank.begin(), a_at_rank.end(), true));
  int b = static_cast<int>(a_at_rank.size()) - a;
  double prob = 1.0;
  for (int r = static_cast<int>(a_at_rank.size()) - 1; r >= 0; --r) {
    const double wa = alpha * a, wb = (1.0 - alpha) * b;
    double pa;
    if (b == 0) {
      pa = 1.0;
    } else if (a == 0) {
      pa = 0.0;
    } else {
      pa = wa / (wa + wb);
    }
    if (a_at_rank[r]) {
      prob *= pa;
      --a;
    } else {
      prob *= 1.0 - pa;
      --b;
    }
  }
  return prob;
}

// Definition by convolution: h = m * (f . g) for a contiguous split, with
// f . g the distribution of sigma = (pi_p, pi_q + p).
DenseDistribution convolution_oracle(const InterleavingDistribution& m, const DenseDistribution& f,
                                     const DenseDistribution& g) {
  const int p = f.n(), q = g.n(), n = p + q;
  std::vector<double> fg(factorial(n), 0.0), mm(factorial(n), 0.0);
  for (const auto& a : enumerate_sn(p)) {
    for (const auto& b : enumerate_sn(q)) {
      std::vector<int> r(n);
      for (int i = 0; i < p; ++i) r[i] = a[i];
      for (int j = 0; j < q; ++j) r[p + j] = b[j] + p;
      fg[rank_index(Ranking(r))] = f.prob(a) * g.prob(b);
    }
  }
  for (const auto& tau : enumerate_interleavings(p, q)) mm[rank_index(tau.ranking())] = m.prob(tau);
  return convolve(DenseDistribution(n, mm), DenseDistribution(n, fg));
}

double max_abs_diff(const DenseDistribution& x, const DenseDistribution& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

HierarchicalModel random_fig_a_model(std::mt19937_64& rng) {
  // {C, P} | ({L, O} | {F, G}) with C, P, L, O, F, G = 0..5.
  ModelNode fruit = ModelNode::split(random_interleaving(2, 2, rng),
                                     ModelNode::leaf({2, 3}, random_distribution(2, rng)),
                                     ModelNode::leaf({4, 5}, random_distribution(2, rng)));
  return HierarchicalModel(ModelNode::split(random_interleaving(2, 4, rng),
                                            ModelNode::leaf({0, 1}, random_distribution(2, rng)),
                                            std::move(fruit)));
}

TEST_CASE("uniform interleavings") {
  auto u = InterleavingDistribution::uniform(2, 4);
  REQUIRE(u.size() == 15);
  for (double x : u.probs()) CHECK(x == doctest::Approx(1.0 / 15));
  auto one = InterleavingDistribution::uniform(1, 1);
  CHECK(one[0] == 0.5);
  CHECK(one[1] == 0.5);
  auto half = biased_riffle(2, 4, 0.5);
  for (std::size_t i = 0; i < half.size(); ++i) CHECK(half[i] == doctest::Approx(1.0 / 15));
}

TEST_CASE("biased riffle orientation on two cards") {
  // Ranks are dealt bottom up. With one card in each pile, the bottom card
  // comes from A with weight alpha, leaving A-first (the identity) with
  // probability 1 - alpha.
  for (double alpha : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    auto m = biased_riffle(1, 1, alpha);
    CHECK(m[Interleaving::a_first(1, 1).index()] == doctest::Approx(1.0 - alpha));
    CHECK(m[Interleaving::b_first(1, 1).index()] == doctest::Approx(alpha));
  }
  for (int p = 1; p <= 4; ++p) {
    for (int q = 1; q <= 4; ++q) {
      auto zero = biased_riffle(p, q, 0.0);
      auto one = biased_riffle(p, q, 1.0);
      CHECK(zero[Interleaving::a_first(p, q).index()] == 1.0);
      CHECK(one[Interleaving::b_first(p, q).index()] == 1.0);
    }
  }
}

TEST_CASE("biased riffle matches the dealing oracle") {
  for (int p = 1; p <= 5; ++p) {
    for (int q = 1; q <= 5; ++q) {
      for (int step = 0; step <= 10; ++step) {
        const double alpha = step / 10.0;
        auto m = biased_riffle(p, q, alpha);
        CHECK(std::accumulate(m.begin(), m.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& tau : enumerate_interleavings(p, q)) {
          const double want = dealing_oracle(tau.pattern(), alpha);
          CHECK(std::abs(m[tau.index()] - want) < 1e-12);
          CHECK(std::abs(interleaving_probability(tau, alpha) - want) < 1e-12);
        }
      }
    }
  }
  for (const auto& tau : enumerate_interleavings(2, 4)) {
    CHECK(interleaving_probability(tau, 0.5) == doctest::Approx(1.0 / 15));
  }
  CHECK_THROWS_AS(biased_riffle(2, 2, 1.5), std::invalid_argument);
  Interleaving t = Interleaving::from_index(2, 2, 3);
  CHECK(log_interleaving_probability(t, 0.25) ==
        doctest::Approx(std::log(dealing_oracle(t.pattern(), 0.25))));
}

TEST_CASE("draw_interleaving frequencies") {
  std::mt19937_64 rng(21);
  const int draws = 200000;
  auto m = biased_riffle(2, 2, 0.25);
  std::vector<int> hist(m.size(), 0);
  for (int i = 0; i < draws; ++i) ++hist[draw_interleaving(2, 2, 0.25, rng).index()];
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double sd = std::sqrt(m[i] * (1 - m[i]) / draws);
    CHECK(std::abs(hist[i] / double(draws) - m[i]) < 4 * sd + 1e-12);
  }
  auto table = random_interleaving(2, 3, rng);
  std::vector<int> h2(table.size(), 0);
  for (int i = 0; i < draws; ++i) ++h2[table.draw(rng).index()];
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double sd = std::sqrt(table[i] * (1 - table[i]) / draws);
    CHECK(std::abs(h2[i] / double(draws) - table[i]) < 4 * sd + 1e-12);
  }
}

TEST_CASE("two-leaf model equals the convolution definition") {
  std::mt19937_64 rng(31);
  for (int p = 1; p <= 5; ++p) {
    const int q = 6 - p;
    auto m = random_interleaving(p, q, rng);
    auto f = random_distribution(p, rng);
    auto g = random_distribution(q, rng);
    auto model = HierarchicalModel::riffle(ItemPartition::contiguous(p, q), m, f, g);
    DenseDistribution dense = model.to_dense();
    DenseDistribution oracle = convolution_oracle(m, f, g);
    CHECK(max_abs_diff(dense, oracle) < 1e-12);
    CHECK(max_abs_diff(riffle_join(m, f, g, ItemPartition::contiguous(p, q)), oracle) < 1e-12);
    for (std::uint64_t i = 0; i < dense.size(); i += 37) {
      const Ranking s = from_index(6, i);
      CHECK(model.prob(s) == doctest::Approx(oracle[i]).epsilon(1e-12));
      if (oracle[i] > 0) CHECK(model.log_prob(s) == doctest::Approx(std::log(oracle[i])));
    }
  }
}

TEST_CASE("log_prob of a single leaf and of zero probability") {
  std::mt19937_64 rng(2);
  auto h = random_distribution(4, rng);
  HierarchicalModel leaf(ModelNode::leaf({0, 1, 2, 3}, h));
  for (const auto& s : enumerate_sn(4)) CHECK(leaf.log_prob(s) == doctest::Approx(std::log(h.prob(s))));
  auto d = HierarchicalModel::riffle(ItemPartition(4, {1, 2}), InterleavingDistribution::biased(2, 2, 0.0),
                                     DenseDistribution::uniform(2), DenseDistribution::uniform(2));
  // Items 1 and 2 always hold the top two ranks.
  Ranking bad = Ranking::from_one_based({1, 2, 3, 4});
  CHECK(d.prob(bad) == 0.0);
  CHECK(std::isinf(d.log_prob(bad)));
  FirstOrderMatrix fo = first_order_marginals(d.to_dense());
  for (int item : {1, 2}) {
    for (int r = 2; r < 4; ++r) CHECK(fo(r, item) == 0.0);
  }
  CHECK_THROWS_AS(d.prob(Ranking::identity(5)), std::invalid_argument);
}

TEST_CASE("model validation") {
  auto f = DenseDistribution::uniform(2);
  CHECK_THROWS_AS(HierarchicalModel(ModelNode::split(InterleavingDistribution::uniform(2, 2),
                                                     ModelNode::leaf({0, 1}, f),
                                                     ModelNode::leaf({1, 2}, f))),
                  std::invalid_argument);
  CHECK_THROWS_AS(HierarchicalModel(ModelNode::split(InterleavingDistribution::uniform(2, 2),
                                                     ModelNode::leaf({0, 1}, f),
                                                     ModelNode::leaf({3, 4}, f))),
                  std::invalid_argument);
  CHECK_THROWS_AS(HierarchicalModel(ModelNode::split(InterleavingDistribution::uniform(1, 3),
                                                     ModelNode::leaf({0, 1}, f),
                                                     ModelNode::leaf({2, 3}, f))),
                  std::invalid_argument);
  CHECK_THROWS_AS(HierarchicalModel(ModelNode::leaf({0, 1, 2}, f)), std::invalid_argument);
}

TEST_CASE("sampling") {
  std::mt19937_64 rng(41);
  Ranking a = Ranking::from_one_based({2, 1}), b = Ranking::from_one_based({3, 1, 2});
  Interleaving tau = Interleaving::from_index(2, 3, 4);
  auto deltas = HierarchicalModel::riffle(
      ItemPartition(5, {0, 3}), InterleavingDistribution::table(2, 3, [&] {
        std::vector<double> w(10, 0.0);
        w[4] = 1.0;
        return w;
      }()),
      DenseDistribution::delta(a), DenseDistribution::delta(b));
  const Ranking expect = recompose(tau, a, b, ItemPartition(5, {0, 3}));
  for (const auto& s : deltas.sample(rng, 50)) CHECK(s == expect);

  // Uniform everywhere: chi-square over S_4, 23 degrees of freedom, critical
  // value 49.73 at p = 0.001.
  auto uni = HierarchicalModel::riffle(ItemPartition(4, {1, 3}), InterleavingDistribution::uniform(2, 2),
                                       DenseDistribution::uniform(2), DenseDistribution::uniform(2));
  const int draws = 100000;
  std::vector<int> hist(24, 0);
  for (const auto& s : uni.sample(rng, draws)) ++hist[rank_index(s)];
  double chi2 = 0.0;
  for (int c : hist) chi2 += (c - draws / 24.0) * (c - draws / 24.0) / (draws / 24.0);
  CHECK(chi2 < 49.73);

  // Three-level model on S_5: empirical frequencies within 3 sigma.
  ModelNode inner = ModelNode::split(random_interleaving(1, 2, rng),
                                     ModelNode::leaf({1}, DenseDistribution::uniform(1)),
                                     ModelNode::leaf({2, 4}, random_distribution(2, rng)));
  HierarchicalModel model(ModelNode::split(InterleavingDistribution::biased(2, 3, 0.3),
                                           ModelNode::leaf({0, 3}, random_distribution(2, rng)),
                                           std::move(inner)));
  DenseDistribution exact = model.to_dense();
  CHECK(std::abs(exact.total() - 1.0) < 1e-12);
  const int big = 1000000;
  std::vector<int> h5(120, 0);
  for (const auto& s : model.sample(rng, big)) ++h5[rank_index(s)];
  int outside = 0;
  double worst = 0.0;
  for (int i = 0; i < 120; ++i) {
    const double sd = std::sqrt(exact[i] * (1 - exact[i]) / big);
    const double z = sd > 0 ? std::abs(h5[i] / double(big) - exact[i]) / sd : 0.0;
    if (sd == 0) CHECK(h5[i] == 0);
    if (z > 3) ++outside;
    worst = std::max(worst, z);
  }
  // A correct sampler leaves a cell beyond 3 sigma with probability 0.0027,
  // so across 120 cells four or more such cells has probability below 1e-3,
  // as does any cell beyond 4.5 sigma.
  MESSAGE("cells beyond 3 sigma: " << outside << ", largest |z| " << worst);
  CHECK(outside <= 3);
  CHECK(worst < 4.5);
}

TEST_CASE("maximum likelihood split") {
  std::mt19937_64 rng(51);
  ItemPartition part(6, {1, 4});
  auto m = random_interleaving(2, 4, rng);
  auto f = random_distribution(2, rng);
  auto g = random_distribution(4, rng);
  DenseDistribution h = riffle_join(m, f, g, part);
  RiffleSplit s = riffle_split_mle(h, part);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(s.m[i] == doctest::Approx(m[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(s.f[i] == doctest::Approx(f[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(s.g[i] == doctest::Approx(g[i]).epsilon(1e-12));
  CHECK(kl_divergence(h, riffle_join(s.m, s.f, s.g, part)) < 1e-12);

  Ranking one = Ranking::from_one_based({4, 2, 6, 1, 3, 5});
  SampleSet single(6);
  single.add(one);
  RiffleSplit d = riffle_split_mle(single, part);
  Decomposition dec = decompose(one, part);
  CHECK(d.m.prob(dec.interleaving) == 1.0);
  CHECK(d.f.prob(dec.a) == 1.0);
  CHECK(d.g.prob(dec.b) == 1.0);
  CHECK_THROWS_AS(riffle_split_mle(SampleSet(6), part), std::invalid_argument);
}

TEST_CASE("uniform and delta factor over every partition") {
  for (const DenseDistribution& h :
       {DenseDistribution::uniform(5), DenseDistribution::delta(Ranking::from_one_based({3, 5, 1, 2, 4}))}) {
    for (unsigned mask = 1; mask + 1 < (1u << 5); ++mask) {
      std::vector<int> a;
      for (int i = 0; i < 5; ++i) {
        if (mask & (1u << i)) a.push_back(i);
      }
      ItemPartition part(5, a);
      RiffleSplit s = riffle_split_mle(h, part);
      CHECK(kl_divergence(h, riffle_join(s.m, s.f, s.g, part)) < 1e-12);
    }
  }
}

TEST_CASE("fit_alpha") {
  CHECK(fit_alpha(InterleavingDistribution::uniform(3, 3)) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(fit_alpha(InterleavingDistribution::biased(3, 3, 0.3)) - 0.3) < 1e-4);
  CHECK(std::abs(fit_alpha(InterleavingDistribution::biased(2, 5, 0.85)) - 0.85) < 1e-4);
  std::vector<double> delta(binomial(5, 2), 0.0);
  delta[Interleaving::a_first(2, 3).index()] = 1.0;
  CHECK(fit_alpha(2, 3, delta) == doctest::Approx(0.0).epsilon(1e-6));
  std::vector<double> bdelta(binomial(5, 2), 0.0);
  bdelta[Interleaving::b_first(2, 3).index()] = 1.0;
  CHECK(fit_alpha(2, 3, bdelta) == doctest::Approx(1.0).epsilon(1e-6));

  // Grid cross-check at resolution 1e-3.
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    auto m = random_interleaving(2, 3, rng);
    auto objective = [&](double a) {
      double s = 0.0;
      for (const auto& tau : enumerate_interleavings(2, 3)) {
        const double pt = dealing_oracle(tau.pattern(), a);
        if (m.prob(tau) > 0) s += m.prob(tau) * std::log(pt);
      }
      return s;
    };
    double best = 0.0, best_value = -INFINITY;
    for (int i = 0; i <= 1000; ++i) {
      const double v = objective(i / 1000.0);
      if (v > best_value) {
        best_value = v;
        best = i / 1000.0;
      }
    }
    const double fitted = fit_alpha(m);
    CHECK(std::abs(fitted - best) <= 1e-3);
    CHECK(objective(fitted) >= best_value - 1e-12);
  }
}

TEST_CASE("mixture of biased riffles") {
  auto single = InterleavingDistribution::biased(2, 3, 0.7);
  MixtureFit one = fit_mixture_alphas(single, 2);
  REQUIRE(!one.weights.empty());
  CHECK(one.weights[0] > 0.999);
  CHECK(std::abs(one.alphas[0] - 0.7) < 1e-3);

  auto hi = biased_riffle(2, 2, 0.8), lo = biased_riffle(2, 2, 0.2);
  std::vector<double> mix(hi.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.5 * hi[i] + 0.5 * lo[i];
  MixtureFit two = fit_mixture_alphas(InterleavingDistribution::table(2, 2, mix), 2);
  REQUIRE(two.alphas.size() == 2);
  std::vector<double> alphas = two.alphas;
  std::sort(alphas.begin(), alphas.end());
  CHECK(std::abs(alphas[0] - 0.2) < 0.05);
  CHECK(std::abs(alphas[1] - 0.8) < 0.05);
  for (std::size_t i = 1; i < two.trace.size(); ++i) CHECK(two.trace[i] >= two.trace[i - 1] - 1e-12);

  auto fitted = InterleavingDistribution::mixture(2, 2, two.weights, two.alphas);
  double ll = 0.0;
  for (std::size_t i = 0; i < mix.size(); ++i) ll += mix[i] * std::log(fitted[i]);
  CHECK(two.log_likelihood == doctest::Approx(ll).epsilon(1e-9));
  // Deterministic for a fixed seed.
  MixtureFit again = fit_mixture_alphas(InterleavingDistribution::table(2, 2, mix), 2);
  CHECK(again.alphas == two.alphas);
}

TEST_CASE("conditioning") {
  std::mt19937_64 rng(71);
  HierarchicalModel prior = random_fig_a_model(rng);
  ModelNode fruit = ModelNode::split(InterleavingDistribution::uniform(2, 2),
                                     ModelNode::leaf({2, 3}, DenseDistribution::uniform(2)),
                                     ModelNode::leaf({4, 5}, DenseDistribution::uniform(2)));
  HierarchicalModel flat(ModelNode::split(InterleavingDistribution::uniform(2, 4),
                                          ModelNode::leaf({0, 1}, DenseDistribution::uniform(2)),
                                          std::move(fruit)));
  CHECK(max_abs_diff(condition(prior, flat).to_dense(), prior.to_dense()) < 1e-12);

  HierarchicalModel like = random_fig_a_model(rng);
  DenseDistribution oracle = pointwise_condition(prior.to_dense(), like.to_dense());
  CHECK(max_abs_diff(condition(prior, like).to_dense(), oracle) < 1e-12);

  HierarchicalModel post = condition_pairwise(prior, 4, 5, 1.0);
  DenseDistribution pd = post.to_dense();
  CHECK(max_abs_diff(pd, pointwise_condition(prior.to_dense(), pairwise_likelihood(6, 4, 5, 1.0))) < 1e-12);
  for (const auto& s : enumerate_sn(6)) {
    if (s[4] > s[5]) CHECK(pd.prob(s) == 0.0);
  }
  HierarchicalModel soft = condition_pairwise(prior, 1, 0, 0.7);
  CHECK(max_abs_diff(soft.to_dense(),
                     pointwise_condition(prior.to_dense(), pairwise_likelihood(6, 1, 0, 0.7))) < 1e-12);
  CHECK_THROWS_AS(condition_pairwise(prior, 0, 4, 0.9), std::domain_error);
  CHECK_THROWS_AS(condition_pairwise(prior, 2, 4, 0.9), std::domain_error);
}

TEST_CASE("MAP and entropy") {
  Ranking a = Ranking::from_one_based({2, 1}), b = Ranking::from_one_based({1, 3, 2});
  std::vector<double> w(10, 0.0);
  w[7] = 1.0;
  auto deltas = HierarchicalModel::riffle(ItemPartition(5, {2, 4}), InterleavingDistribution::table(2, 3, w),
                                          DenseDistribution::delta(a), DenseDistribution::delta(b));
  CHECK(map_assignment(deltas) == deltas.to_dense().mode());
  CHECK(model_entropy(deltas) == 0.0);

  auto uni = HierarchicalModel::riffle(ItemPartition(5, {2, 4}), InterleavingDistribution::uniform(2, 3),
                                       DenseDistribution::uniform(2), DenseDistribution::uniform(3));
  CHECK(model_entropy(uni) == doctest::Approx(std::log(120.0)));
  CHECK(map_assignment(uni) == Ranking::identity(5));

  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 5; ++trial) {
    HierarchicalModel model = random_fig_a_model(rng);
    DenseDistribution dense = model.to_dense();
    CHECK(std::abs(model_entropy(model) - entropy(dense)) < 1e-10);
    CHECK(map_assignment(model) == dense.mode());
  }
}

TEST_CASE("flatten to a d-way decomposition") {
  std::mt19937_64 rng(91);
  auto two = HierarchicalModel::riffle(ItemPartition(4, {0, 2}), random_interleaving(2, 2, rng),
                                       random_distribution(2, rng), random_distribution(2, rng));
  DWayDecomposition d2 = flatten_to_dway(two);
  CHECK(d2.leaf_sets.size() == 2);
  CHECK(d2.interleavings.size() == 6);
  CHECK(max_abs_diff(d2.to_dense(), two.to_dense()) < 1e-12);

  HierarchicalModel fig = random_fig_a_model(rng);
  DWayDecomposition d3 = flatten_to_dway(fig);
  CHECK(d3.leaf_sets == std::vector<std::vector<int>>{{0, 1}, {2, 3}, {4, 5}});
  CHECK(d3.interleavings.size() == 90);
  CHECK(max_abs_diff(d3.to_dense(), fig.to_dense()) < 1e-12);

  std::vector<InterleavingDistribution> ms{InterleavingDistribution::biased(1, 3, 0.3),
                                           InterleavingDistribution::biased(1, 2, 0.6),
                                           InterleavingDistribution::biased(1, 1, 0.45)};
  std::vector<DenseDistribution> fs(4, DenseDistribution::uniform(1));
  HierarchicalModel chain = thin_chain({{2}, {0}, {3}, {1}}, ms, fs);
  CHECK(chain.tree().to_string() == "({3} | ({1} | ({4} | {2})))");
  DWayDecomposition d4 = flatten_to_dway(chain);
  CHECK(d4.leaf_sets.size() == 4);
  CHECK(d4.interleavings.size() == 24);
  CHECK(max_abs_diff(d4.to_dense(), chain.to_dense()) < 1e-12);
}

TEST_CASE("item trees") {
  ItemTree t = ItemTree::split(ItemTree::leaf({4, 1}), ItemTree::split(ItemTree::leaf({0}), ItemTree::leaf({3, 2})));
  CHECK(t.items == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(t.to_string() == "({2,5} | ({1} | {3,4}))");
  CHECK(t.canonical().to_string() == "(({1} | {3,4}) | {2,5})");
  CHECK(t.leaf_sets() == std::vector<std::vector<int>>{{1, 4}, {0}, {2, 3}});
  CHECK(t.canonical() == t.canonical().canonical());
}

TEST_CASE("fit_model recovers a riffle independent distribution") {
  std::mt19937_64 rng(101);
  HierarchicalModel truth = random_fig_a_model(rng);
  DenseDistribution h = truth.to_dense();
  HierarchicalModel fit = fit_model(truth.tree(), h.support());
  CHECK(kl_divergence(h, fit.to_dense()) < 1e-12);

  HierarchicalModel biased_truth = HierarchicalModel::riffle(
      ItemPartition(5, {1, 3}), InterleavingDistribution::biased(2, 3, 0.35),
      random_distribution(2, rng), random_distribution(3, rng));
  HierarchicalModel bfit = fit_model(biased_truth.tree(), biased_truth.to_dense().support(), 0.0,
                                     InterleavingFit::kBiased);
  REQUIRE(bfit.root().interleaving->kind() == InterleavingDistribution::Kind::kBiased);
  CHECK(std::abs(bfit.root().interleaving->alpha() - 0.35) < 1e-4);

  SampleSet s(5);
  s.add(Ranking::identity(5));
  HierarchicalModel smooth = fit_model(biased_truth.tree(), WeightedRankings::from_samples(s), 1.0);
  CHECK(smooth.prob(Ranking::from_one_based({5, 4, 3, 2, 1})) > 0.0);
}

}  // namespace
}  // namespace riffle
