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


#include "riffle/synth.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace riffle {

DenseDistribution random_factor(int k, std::mt19937_64& rng, double concentration) {
  if (concentration <= 0.0) throw std::invalid_argument("random_factor: concentration must be > 0");
  check_dense_cap(k, "random_factor");
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> w(factorial(k));
  double total = 0.0;
  for (double& x : w) {
    x = gamma(rng);
    total += x;
  }
  if (total <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0);
  }
  return DenseDistribution::from_weights(k, std::move(w));
}

double random_alpha(std::mt19937_64& rng, double lo, double hi) {
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0)) throw std::invalid_argument("random_alpha: bad range");
  std::uniform_real_distribution<double> u(lo, hi);
  const double a = u(rng);
  return std::bernoulli_distribution(0.5)(rng) ? a : 1.0 - a;
}

namespace {

ModelNode balanced_node(std::vector<int> items, const SynthSpec& spec, std::mt19937_64& rng) {
  std::sort(items.begin(), items.end());
  const int size = static_cast<int>(items.size());
  if (size <= spec.k) {
    return ModelNode::leaf(items, random_factor(size, rng, spec.concentration));
  }
  const int p = size / 2;
  std::vector<int> a, b;
  std::vector<int> order = items;
  std::shuffle(order.begin(), order.end(), rng);
  a.assign(order.begin(), order.begin() + p);
  b.assign(order.begin() + p, order.end());
  ModelNode na = balanced_node(std::move(a), spec, rng);
  ModelNode nb = balanced_node(std::move(b), spec, rng);
  auto m = InterleavingDistribution::biased(p, size - p,
                                            random_alpha(rng, spec.alpha_lo, spec.alpha_hi));
  return ModelNode::split(std::move(m), std::move(na), std::move(nb));
}

}  // namespace

HierarchicalModel random_model(const SynthSpec& spec, std::mt19937_64& rng) {
  if (spec.n < 2 || spec.k < 1 || spec.k >= spec.n) {
    throw std::invalid_argument("synth: need n >= 2 and 1 <= k < n");
  }
  std::vector<int> items(spec.n);
  std::iota(items.begin(), items.end(), 0);
  if (spec.shuffle_items) std::shuffle(items.begin(), items.end(), rng);

  if (spec.structure == SynthSpec::Structure::kBalanced) {
    return HierarchicalModel(balanced_node(items, spec, rng));
  }
  std::vector<std::vector<int>> groups;
  for (int start = 0; start < spec.n; start += spec.k) {
    const int end = std::min(spec.n, start + spec.k);
    std::vector<int> g(items.begin() + start, items.begin() + end);
    std::sort(g.begin(), g.end());
    groups.push_back(std::move(g));
  }
  std::vector<DenseDistribution> factors;
  for (const auto& g : groups) {
    factors.push_back(random_factor(static_cast<int>(g.size()), rng, spec.concentration));
  }
  std::vector<InterleavingDistribution> interleavings;
  int rest = spec.n;
  for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
    const int p = static_cast<int>(groups[i].size());
    rest -= p;
    interleavings.push_back(InterleavingDistribution::biased(
        p, rest, random_alpha(rng, spec.alpha_lo, spec.alpha_hi)));
  }
  return thin_chain(groups, interleavings, factors);
}

SynthResult synth(const SynthSpec& spec) {
  if (spec.m < 0) throw std::invalid_argument("synth: m must be >= 0");
  std::mt19937_64 rng(spec.seed);
  HierarchicalModel model = random_model(spec, rng);
  SampleSet samples(spec.n);
  for (const Ranking& s : model.sample(rng, spec.m)) samples.add(s);
  return {std::move(model), std::move(samples)};
}

SynthSpec::Structure parse_structure(const std::string& name) {
  if (name == "thin") return SynthSpec::Structure::kThin;
  if (name == "balanced") return SynthSpec::Structure::kBalanced;
  throw std::invalid_argument("unknown structure '" + name + "' (expected thin or balanced)");
}

}  // namespace riffle
