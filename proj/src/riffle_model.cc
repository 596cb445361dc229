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

#include "riffle/riffle_model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace riffle {
namespace {

constexpr std::uint64_t kInterleavingCap = 50'000'000ULL;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// A mixture with fewer components is kept when its log-likelihood is within
// this of the larger fit.
constexpr double kMixtureParsimony = 1e-6;

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("biased riffle: alpha must lie in [0,1], got " +
                                std::to_string(alpha));
  }
}

std::uint64_t checked_count(int p, int q) {
  if (p < 0 || q < 0) throw std::invalid_argument("interleaving sizes must be nonnegative");
  if (p + q > 62) throw std::length_error("interleaving table too large");
  std::uint64_t c = binomial(p + q, p);
  if (c > kInterleavingCap) {
    throw std::length_error("interleaving table C(" + std::to_string(p + q) + "," +
                            std::to_string(p) + ") exceeds the cap");
  }
  return c;
}

// Combinatorial index of a block pattern; agrees with Interleaving::index.
std::uint64_t pattern_index(const std::vector<bool>& pat, int p) {
  const int n = static_cast<int>(pat.size());
  std::uint64_t idx = 0;
  int i = 0;
  for (int v = 0; v < n && i < p; ++v) {
    if (pat[v]) {
      ++i;
    } else {
      idx += binomial(n - 1 - v, p - 1 - i);
    }
  }
  return idx;
}

std::vector<bool> index_pattern(int p, int q, std::uint64_t index) {
  const int n = p + q;
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
  return pat;
}

// Probabilities of dealing the bottom card from A or from B with a and b
// cards left.
std::pair<double, double> drop_weights(int a, int b, double alpha) {
  if (a == 0) return {0.0, 1.0};
  if (b == 0) return {1.0, 0.0};
  double wa = alpha * a;
  double wb = (1.0 - alpha) * b;
  return {wa / (wa + wb), wb / (wa + wb)};
}

std::vector<double> cumulative(const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  return cdf;
}

std::size_t draw_index(const std::vector<double>& cdf, std::mt19937_64& rng) {
  double u = std::uniform_real_distribution<double>(0.0, cdf.back())(rng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  return std::min(i, cdf.size() - 1);
}

std::vector<double> normalized(std::vector<double> w, const char* what) {
  double t = 0.0;
  for (double x : w) t += x;
  if (!(t > 0.0)) throw std::domain_error(std::string(what) + ": table has zero mass");
  for (double& x : w) x /= t;
  double s = 0.0;
  for (double x : w) s += x;
  *std::max_element(w.begin(), w.end()) += 1.0 - s;
  return w;
}

// Sufficient statistics of sum_tau target(tau) log m^alpha(tau): weights of
// A-drops and B-drops at each contested (a, b) cell.
struct DropStats {
  int p = 0, q = 0;
  std::vector<double> wa, wb;  // (p+1) x (q+1), row-major in a.

  double& at_a(int a, int b) { return wa[a * (q + 1) + b]; }
  double& at_b(int a, int b) { return wb[a * (q + 1) + b]; }

  double objective(double alpha) const {
    double total = 0.0;
    for (int a = 1; a <= p; ++a) {
      for (int b = 1; b <= q; ++b) {
        double ca = wa[a * (q + 1) + b];
        double cb = wb[a * (q + 1) + b];
        if (ca == 0.0 && cb == 0.0) continue;
        double xa = alpha * a, xb = (1.0 - alpha) * b;
        double lz = std::log(xa + xb);
        if (ca > 0.0) {
          if (xa == 0.0) return kNegInf;
          total += ca * (std::log(xa) - lz);
        }
        if (cb > 0.0) {
          if (xb == 0.0) return kNegInf;
          total += cb * (std::log(xb) - lz);
        }
      }
    }
    return total;
  }
};

DropStats drop_stats(int p, int q, const std::vector<double>& target) {
  DropStats st;
  st.p = p;
  st.q = q;
  st.wa.assign((p + 1) * (q + 1), 0.0);
  st.wb.assign((p + 1) * (q + 1), 0.0);
  for (std::uint64_t idx = 0; idx < target.size(); ++idx) {
    double w = target[idx];
    if (w <= 0.0) continue;
    std::vector<bool> pat = index_pattern(p, q, idx);
    int a = p, b = q;
    for (int r = p + q - 1; r >= 0 && a > 0 && b > 0; --r) {
      if (pat[r]) {
        st.at_a(a, b) += w;
        --a;
      } else {
        st.at_b(a, b) += w;
        --b;
      }
    }
  }
  return st;
}

double maximize_alpha(const DropStats& st) {
  constexpr int kGrid = 200;
  int best = 0;
  double best_val = kNegInf;
  for (int i = 0; i <= kGrid; ++i) {
    double v = st.objective(static_cast<double>(i) / kGrid);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(kGrid);
  double hi = std::min(kGrid, best + 1) / static_cast<double>(kGrid);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = st.objective(x1), f2 = st.objective(x2);
  while (hi - lo > 1e-8) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = st.objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = st.objective(x1);
    }
  }
  double alpha = 0.5 * (lo + hi);
  double val = st.objective(alpha);
  for (double edge : {0.0, 1.0}) {
    double v = st.objective(edge);
    if (v >= val) {
      val = v;
      alpha = edge;
    }
  }
  if (best_val > val) alpha = static_cast<double>(best) / kGrid;
  return alpha;
}

}  // namespace

// ---------------------------------------------------------------------------
// Interleaving distributions

std::vector<double> biased_riffle(int p, int q, double alpha) {
  check_alpha(alpha);
  checked_count(p, q);
  // cell[a][b] holds m^alpha over Omega_{a,b}. Row a is built from rows a and
  // a-1, so two rows suffice.
  std::vector<std::vector<double>> prev_row, row;
  for (int a = 0; a <= p; ++a) {
    row.assign(q + 1, {});
    for (int b = 0; b <= q; ++b) {
      if (a == 0 || b == 0) {
        row[b] = {1.0};
        continue;
      }
      auto [wa, wb] = drop_weights(a, b, alpha);
      std::vector<double> cell(binomial(a + b, a), 0.0);
      const std::vector<double>& from_a = prev_row[b];  // Omega_{a-1,b}
      for (std::uint64_t i = 0; i < from_a.size(); ++i) {
        if (from_a[i] == 0.0 || wa == 0.0) continue;
        std::vector<bool> pat = index_pattern(a - 1, b, i);
        pat.push_back(true);
        cell[pattern_index(pat, a)] += wa * from_a[i];
      }
      const std::vector<double>& from_b = row[b - 1];  // Omega_{a,b-1}
      for (std::uint64_t i = 0; i < from_b.size(); ++i) {
        if (from_b[i] == 0.0 || wb == 0.0) continue;
        std::vector<bool> pat = index_pattern(a, b - 1, i);
        pat.push_back(false);
        cell[pattern_index(pat, a)] += wb * from_b[i];
      }
      row[b] = std::move(cell);
    }
    prev_row = std::move(row);
  }
  return prev_row[q];
}

double interleaving_probability(const Interleaving& tau, double alpha) {
  check_alpha(alpha);
  std::vector<bool> pat = tau.pattern();
  int a = tau.p(), b = tau.q();
  double prob = 1.0;
  for (int r = tau.n() - 1; r >= 0; --r) {
    auto [wa, wb] = drop_weights(a, b, alpha);
    if (pat[r]) {
      prob *= wa;
      --a;
    } else {
      prob *= wb;
      --b;
    }
  }
  return prob;
}

double log_interleaving_probability(const Interleaving& tau, double alpha) {
  check_alpha(alpha);
  std::vector<bool> pat = tau.pattern();
  int a = tau.p(), b = tau.q();
  double lp = 0.0;
  for (int r = tau.n() - 1; r >= 0; --r) {
    auto [wa, wb] = drop_weights(a, b, alpha);
    double w = pat[r] ? wa : wb;
    if (w == 0.0) return kNegInf;
    lp += std::log(w);
    if (pat[r]) {
      --a;
    } else {
      --b;
    }
  }
  return lp;
}

Interleaving draw_interleaving(int p, int q, double alpha, std::mt19937_64& rng) {
  check_alpha(alpha);
  std::vector<bool> pat(p + q, false);
  int a = p, b = q;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = p + q - 1; r >= 0; --r) {
    auto [wa, wb] = drop_weights(a, b, alpha);
    (void)wb;
    bool from_a = (b == 0) || (a > 0 && unit(rng) < wa);
    pat[r] = from_a;
    if (from_a) {
      --a;
    } else {
      --b;
    }
  }
  return Interleaving::from_pattern(pat);
}

InterleavingDistribution InterleavingDistribution::table(int p, int q, std::vector<double> probs) {
  std::uint64_t count = checked_count(p, q);
  if (probs.size() != count) {
    throw std::invalid_argument("interleaving table for (" + std::to_string(p) + "," +
                                std::to_string(q) + ") needs " + std::to_string(count) +
                                " entries, got " + std::to_string(probs.size()));
  }
  double total = 0.0;
  for (double x : probs) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw std::invalid_argument("interleaving table entries must be finite and nonnegative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("interleaving table sums to " + std::to_string(total));
  }
  InterleavingDistribution d;
  d.kind_ = Kind::kTable;
  d.p_ = p;
  d.q_ = q;
  d.probs_ = std::move(probs);
  d.cdf_ = cumulative(d.probs_);
  return d;
}

InterleavingDistribution InterleavingDistribution::uniform(int p, int q) {
  std::uint64_t count = checked_count(p, q);
  return table(p, q, std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

InterleavingDistribution InterleavingDistribution::biased(int p, int q, double alpha) {
  InterleavingDistribution d = table(p, q, normalized(biased_riffle(p, q, alpha), "biased"));
  d.kind_ = Kind::kBiased;
  d.weights_ = {1.0};
  d.alphas_ = {alpha};
  return d;
}

InterleavingDistribution InterleavingDistribution::mixture(int p, int q,
                                                           std::vector<double> weights,
                                                           std::vector<double> alphas) {
  if (weights.empty() || weights.size() != alphas.size()) {
    throw std::invalid_argument("mixture: need matching nonempty weights and alphas");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: negative weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("mixture: weights must sum to 1");
  std::vector<double> probs(checked_count(p, q), 0.0);
  for (std::size_t c = 0; c < weights.size(); ++c) {
    std::vector<double> t = biased_riffle(p, q, alphas[c]);
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] += weights[c] * t[i];
  }
  InterleavingDistribution d = table(p, q, normalized(std::move(probs), "mixture"));
  d.kind_ = Kind::kMixture;
  d.weights_ = std::move(weights);
  d.alphas_ = std::move(alphas);
  return d;
}

double InterleavingDistribution::entropy() const {
  double e = 0.0;
  for (double x : probs_) {
    if (x > 0.0) e -= x * std::log(x);
  }
  return e;
}

Interleaving InterleavingDistribution::draw(std::mt19937_64& rng) const {
  if (kind_ == Kind::kBiased) return draw_interleaving(p_, q_, alphas_[0], rng);
  if (kind_ == Kind::kMixture) {
    std::size_t c = draw_index(cumulative(weights_), rng);
    return draw_interleaving(p_, q_, alphas_[c], rng);
  }
  return Interleaving::from_pattern(index_pattern(p_, q_, draw_index(cdf_, rng)));
}

double fit_alpha(int p, int q, const std::vector<double>& target) {
  if (target.size() != checked_count(p, q)) {
    throw std::invalid_argument("fit_alpha: table size mismatch");
  }
  return maximize_alpha(drop_stats(p, q, target));
}

double fit_alpha(const InterleavingDistribution& m) { return fit_alpha(m.p(), m.q(), m.probs()); }

namespace {

MixtureFit fit_mixture_fixed(const InterleavingDistribution& m, int components, int restarts,
                             std::uint64_t seed) {
  const int p = m.p(), q = m.q();
  const std::vector<double>& target = m.probs();
  const std::size_t size = target.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(0.05, 0.95);

  auto log_likelihood = [&](const std::vector<double>& mix) {
    double ll = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      if (target[i] <= 0.0) continue;
      if (mix[i] <= 0.0) return kNegInf;
      ll += target[i] * std::log(mix[i]);
    }
    return ll;
  };

  MixtureFit best;
  best.log_likelihood = kNegInf;
  for (int restart = 0; restart < restarts; ++restart) {
    std::vector<double> w(components, 1.0 / components), al(components);
    for (int c = 0; c < components; ++c) {
      al[c] = restart == 0 ? (c + 1.0) / (components + 1.0) : init(rng);
    }
    std::vector<std::vector<double>> tables(components);
    std::vector<double> mix(size);
    auto refresh = [&]() {
      std::fill(mix.begin(), mix.end(), 0.0);
      for (int c = 0; c < components; ++c) {
        tables[c] = biased_riffle(p, q, al[c]);
        for (std::size_t i = 0; i < size; ++i) mix[i] += w[c] * tables[c][i];
      }
    };
    refresh();
    double ll = log_likelihood(mix);
    std::vector<double> trace{ll};
    for (int iter = 0; iter < 2000; ++iter) {
      std::vector<double> new_w(components, 0.0), new_al = al;
      for (int c = 0; c < components; ++c) {
        std::vector<double> resp(size, 0.0);
        for (std::size_t i = 0; i < size; ++i) {
          if (target[i] > 0.0 && mix[i] > 0.0) resp[i] = target[i] * w[c] * tables[c][i] / mix[i];
          new_w[c] += resp[i];
        }
        DropStats st = drop_stats(p, q, resp);
        double cand = maximize_alpha(st);
        if (st.objective(cand) >= st.objective(al[c])) new_al[c] = cand;
      }
      double tw = 0.0;
      for (double x : new_w) tw += x;
      for (double& x : new_w) x /= tw;
      w = new_w;
      al = new_al;
      refresh();
      double next = log_likelihood(mix);
      trace.push_back(next);
      bool done = next - ll < 1e-9;
      ll = next;
      if (done) break;
    }
    if (ll > best.log_likelihood) {
      best.weights = w;
      best.alphas = al;
      best.log_likelihood = ll;
      best.trace = trace;
    }
  }

  // Merge components that landed on the same bias.
  std::vector<std::size_t> order(best.alphas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return best.alphas[x] < best.alphas[y]; });
  std::vector<double> mw, ma;
  for (std::size_t k : order) {
    if (!ma.empty() && std::abs(best.alphas[k] - ma.back()) < 1e-3) {
      double tot = mw.back() + best.weights[k];
      if (tot > 0.0) ma.back() = (ma.back() * mw.back() + best.alphas[k] * best.weights[k]) / tot;
      mw.back() = tot;
    } else {
      mw.push_back(best.weights[k]);
      ma.push_back(best.alphas[k]);
    }
  }
  // Heaviest component first.
  std::vector<std::size_t> by_weight(mw.size());
  for (std::size_t i = 0; i < by_weight.size(); ++i) by_weight[i] = i;
  std::stable_sort(by_weight.begin(), by_weight.end(),
                   [&](std::size_t x, std::size_t y) { return mw[x] > mw[y]; });
  best.weights.clear();
  best.alphas.clear();
  for (std::size_t k : by_weight) {
    best.weights.push_back(mw[k]);
    best.alphas.push_back(ma[k]);
  }
  return best;
}

}  // namespace

MixtureFit fit_mixture_alphas(const InterleavingDistribution& m, int components, int restarts,
                              std::uint64_t seed) {
  if (components < 1 || restarts < 1) {
    throw std::invalid_argument("fit_mixture_alphas: need at least one component and restart");
  }
  MixtureFit fit = fit_mixture_fixed(m, components, restarts, seed);
  if (components > 1) {
    MixtureFit smaller = fit_mixture_alphas(m, components - 1, restarts, seed);
    if (smaller.log_likelihood >= fit.log_likelihood - kMixtureParsimony) return smaller;
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Trees

ItemTree ItemTree::leaf(std::vector<int> items) {
  std::sort(items.begin(), items.end());
  return ItemTree{std::move(items), {}};
}

ItemTree ItemTree::split(ItemTree a, ItemTree b) {
  ItemTree t;
  std::merge(a.items.begin(), a.items.end(), b.items.begin(), b.items.end(),
             std::back_inserter(t.items));
  t.children.push_back(std::move(a));
  t.children.push_back(std::move(b));
  return t;
}

std::vector<std::vector<int>> ItemTree::leaf_sets() const {
  if (is_leaf()) return {items};
  std::vector<std::vector<int>> out = children[0].leaf_sets();
  for (auto& s : children[1].leaf_sets()) out.push_back(std::move(s));
  return out;
}

ItemTree ItemTree::canonical() const {
  if (is_leaf()) return *this;
  ItemTree a = children[0].canonical(), b = children[1].canonical();
  if (b.items.front() < a.items.front()) std::swap(a, b);
  ItemTree t;
  t.items = items;
  t.children = {std::move(a), std::move(b)};
  return t;
}

std::string ItemTree::to_string() const {
  if (is_leaf()) {
    std::string s = "{";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(items[i] + 1);
    }
    return s + "}";
  }
  return "(" + children[0].to_string() + " | " + children[1].to_string() + ")";
}

ItemPartition ModelNode::local_partition() const {
  std::vector<int> a;
  const std::vector<int>& ca = children[0].items;
  for (int i = 0; i < static_cast<int>(items.size()); ++i) {
    if (std::binary_search(ca.begin(), ca.end(), items[i])) a.push_back(i);
  }
  return ItemPartition(static_cast<int>(items.size()), std::move(a));
}

ModelNode ModelNode::leaf(std::vector<int> items, DenseDistribution factor) {
  ModelNode node;
  node.items = std::move(items);
  node.factor = std::move(factor);
  return node;
}

ModelNode ModelNode::split(InterleavingDistribution m, ModelNode a, ModelNode b) {
  ModelNode node;
  std::merge(a.items.begin(), a.items.end(), b.items.begin(), b.items.end(),
             std::back_inserter(node.items));
  node.interleaving = std::move(m);
  node.children.push_back(std::move(a));
  node.children.push_back(std::move(b));
  return node;
}

// ---------------------------------------------------------------------------
// Hierarchical models

namespace {

void validate(const ModelNode& node) {
  if (node.items.empty()) throw std::invalid_argument("model node with no items");
  if (!std::is_sorted(node.items.begin(), node.items.end()) ||
      std::adjacent_find(node.items.begin(), node.items.end()) != node.items.end()) {
    throw std::invalid_argument("model node items must be sorted and distinct");
  }
  const int k = static_cast<int>(node.items.size());
  if (node.is_leaf()) {
    if (!node.factor) throw std::invalid_argument("leaf node without a factor");
    if (node.factor->n() != k) {
      throw std::invalid_argument("leaf factor over S_" + std::to_string(node.factor->n()) +
                                  " attached to " + std::to_string(k) + " items");
    }
    if (!node.factor->normalized()) throw std::invalid_argument("leaf factor not normalized");
    return;
  }
  if (node.children.size() != 2) throw std::invalid_argument("internal node needs two children");
  if (!node.interleaving) throw std::invalid_argument("internal node without an interleaving");
  const auto& a = node.children[0].items;
  const auto& b = node.children[1].items;
  std::vector<int> merged;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
  if (merged != node.items) {
    throw std::invalid_argument("children do not partition their parent's items");
  }
  if (node.interleaving->p() != static_cast<int>(a.size()) ||
      node.interleaving->q() != static_cast<int>(b.size())) {
    throw std::invalid_argument("interleaving sizes do not match the children");
  }
  validate(node.children[0]);
  validate(node.children[1]);
}

double node_prob(const ModelNode& node, const Ranking& s) {
  if (node.is_leaf()) return node.factor->prob(s);
  Decomposition d = decompose(s, node.local_partition());
  double pm = node.interleaving->prob(d.interleaving);
  if (pm == 0.0) return 0.0;
  return pm * node_prob(node.children[0], d.a) * node_prob(node.children[1], d.b);
}

double node_log_prob(const ModelNode& node, const Ranking& s) {
  if (node.is_leaf()) {
    double p = node.factor->prob(s);
    return p > 0.0 ? std::log(p) : kNegInf;
  }
  Decomposition d = decompose(s, node.local_partition());
  double pm = node.interleaving->prob(d.interleaving);
  if (pm == 0.0) return kNegInf;
  return std::log(pm) + node_log_prob(node.children[0], d.a) +
         node_log_prob(node.children[1], d.b);
}

std::vector<double> node_dense(const ModelNode& node) {
  if (node.is_leaf()) return node.factor->probs();
  std::vector<double> f = node_dense(node.children[0]);
  std::vector<double> g = node_dense(node.children[1]);
  ItemPartition part = node.local_partition();
  const InterleavingDistribution& m = *node.interleaving;
  std::vector<Ranking> sp = enumerate_sn(part.p()), sq = enumerate_sn(part.q());
  std::vector<Interleaving> taus = enumerate_interleavings(part.p(), part.q());
  std::vector<double> h(factorial(part.n()), 0.0);
  for (std::size_t t = 0; t < taus.size(); ++t) {
    if (m[t] == 0.0) continue;
    for (std::size_t i = 0; i < sp.size(); ++i) {
      if (f[i] == 0.0) continue;
      double mf = m[t] * f[i];
      for (std::size_t j = 0; j < sq.size(); ++j) {
        if (g[j] == 0.0) continue;
        h[rank_index(recompose(taus[t], sp[i], sq[j], part))] += mf * g[j];
      }
    }
  }
  return h;
}

struct Sampler {
  std::vector<double> cdf;  // Leaf factor CDF.
  std::vector<Sampler> children;
};

Sampler build_sampler(const ModelNode& node) {
  Sampler s;
  if (node.is_leaf()) {
    s.cdf = cumulative(node.factor->probs());
  } else {
    s.children.push_back(build_sampler(node.children[0]));
    s.children.push_back(build_sampler(node.children[1]));
  }
  return s;
}

Ranking sample_node(const ModelNode& node, const Sampler& sampler, std::mt19937_64& rng) {
  if (node.is_leaf()) {
    return from_index(static_cast<int>(node.items.size()), draw_index(sampler.cdf, rng));
  }
  Ranking a = sample_node(node.children[0], sampler.children[0], rng);
  Ranking b = sample_node(node.children[1], sampler.children[1], rng);
  Interleaving tau = node.interleaving->draw(rng);
  return recompose(tau, a, b, node.local_partition());
}

ItemTree node_tree(const ModelNode& node) {
  if (node.is_leaf()) return ItemTree::leaf(node.items);
  return ItemTree::split(node_tree(node.children[0]), node_tree(node.children[1]));
}

}  // namespace

HierarchicalModel::HierarchicalModel(ModelNode root) : root_(std::move(root)) {
  validate(root_);
  n_ = static_cast<int>(root_.items.size());
  if (root_.items.front() != 0 || root_.items.back() != n_ - 1) {
    throw std::invalid_argument("model root must cover items 0..n-1");
  }
}

HierarchicalModel HierarchicalModel::riffle(const ItemPartition& part, InterleavingDistribution m,
                                            DenseDistribution f, DenseDistribution g) {
  return HierarchicalModel(ModelNode::split(std::move(m), ModelNode::leaf(part.a_items(), std::move(f)),
                                            ModelNode::leaf(part.b_items(), std::move(g))));
}

ItemTree HierarchicalModel::tree() const { return node_tree(root_); }

double HierarchicalModel::prob(const Ranking& s) const {
  if (s.size() != n_) throw std::invalid_argument("prob: ranking size mismatch");
  return node_prob(root_, s);
}

double HierarchicalModel::log_prob(const Ranking& s) const {
  if (s.size() != n_) throw std::invalid_argument("log_prob: ranking size mismatch");
  return node_log_prob(root_, s);
}

DenseDistribution HierarchicalModel::to_dense() const {
  check_dense_cap(n_, "to_dense");
  return DenseDistribution::from_weights(n_, node_dense(root_));
}

Ranking HierarchicalModel::sample(std::mt19937_64& rng) const { return sample(rng, 1).front(); }

std::vector<Ranking> HierarchicalModel::sample(std::mt19937_64& rng, std::int64_t count) const {
  Sampler sampler = build_sampler(root_);
  std::vector<Ranking> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(sample_node(root_, sampler, rng));
  return out;
}

DenseDistribution riffle_join(const InterleavingDistribution& m, const DenseDistribution& f,
                              const DenseDistribution& g, const ItemPartition& part) {
  return HierarchicalModel::riffle(part, m, f, g).to_dense();
}

// ---------------------------------------------------------------------------
// Estimation

RiffleSplit riffle_split_mle(const WeightedRankings& data, const ItemPartition& part) {
  if (data.rankings.empty()) throw std::invalid_argument("riffle_split_mle: empty input");
  if (data.n != part.n()) throw std::invalid_argument("riffle_split_mle: size mismatch");
  check_dense_cap(part.p(), "riffle_split_mle");
  check_dense_cap(part.q(), "riffle_split_mle");
  std::vector<double> m(checked_count(part.p(), part.q()), 0.0);
  std::vector<double> f(factorial(part.p()), 0.0), g(factorial(part.q()), 0.0);
  for (std::size_t i = 0; i < data.rankings.size(); ++i) {
    double w = data.weights[i];
    Decomposition d = decompose(data.rankings[i], part);
    m[d.interleaving.index()] += w;
    f[rank_index(d.a)] += w;
    g[rank_index(d.b)] += w;
  }
  return RiffleSplit{InterleavingDistribution::table(part.p(), part.q(), normalized(m, "split")),
                     DenseDistribution::from_weights(part.p(), std::move(f)),
                     DenseDistribution::from_weights(part.q(), std::move(g))};
}

RiffleSplit riffle_split_mle(const SampleSet& samples, const ItemPartition& part) {
  return riffle_split_mle(WeightedRankings::from_samples(samples), part);
}

RiffleSplit riffle_split_mle(const DenseDistribution& h, const ItemPartition& part) {
  return riffle_split_mle(h.support(), part);
}

namespace {

ModelNode fit_node(const ItemTree& tree, const WeightedRankings& data, double smoothing,
                   InterleavingFit kind) {
  const int k = static_cast<int>(tree.items.size());
  std::vector<Ranking> local;
  local.reserve(data.rankings.size());
  for (const Ranking& s : data.rankings) local.push_back(relative_rank_map(s, tree.items));
  if (tree.is_leaf()) {
    check_dense_cap(k, "fit_model leaf");
    std::vector<double> w(factorial(k), smoothing);
    for (std::size_t i = 0; i < local.size(); ++i) w[rank_index(local[i])] += data.weights[i];
    return ModelNode::leaf(tree.items, DenseDistribution::from_weights(k, std::move(w)));
  }
  std::vector<int> a;
  const auto& ca = tree.children[0].items;
  for (int i = 0; i < k; ++i) {
    if (std::binary_search(ca.begin(), ca.end(), tree.items[i])) a.push_back(i);
  }
  ItemPartition part(k, std::move(a));
  std::vector<double> counts(checked_count(part.p(), part.q()), smoothing);
  for (std::size_t i = 0; i < local.size(); ++i) {
    counts[interleaving_map(local[i], part).index()] += data.weights[i];
  }
  InterleavingDistribution table =
      InterleavingDistribution::table(part.p(), part.q(), normalized(counts, "fit_model"));
  InterleavingDistribution m = table;
  if (kind == InterleavingFit::kBiased) {
    m = InterleavingDistribution::biased(part.p(), part.q(), fit_alpha(table));
  } else if (kind == InterleavingFit::kMixture) {
    MixtureFit fit = fit_mixture_alphas(table);
    m = InterleavingDistribution::mixture(part.p(), part.q(), fit.weights, fit.alphas);
  }
  return ModelNode::split(std::move(m), fit_node(tree.children[0], data, smoothing, kind),
                          fit_node(tree.children[1], data, smoothing, kind));
}

}  // namespace

HierarchicalModel fit_model(const ItemTree& tree, const WeightedRankings& data, double smoothing,
                            InterleavingFit kind) {
  if (data.rankings.empty() && smoothing <= 0.0) {
    throw std::invalid_argument("fit_model: no data and no smoothing");
  }
  if (smoothing < 0.0) throw std::invalid_argument("fit_model: negative smoothing");
  return HierarchicalModel(fit_node(tree, data, smoothing, kind));
}

// ---------------------------------------------------------------------------
// Inference

namespace {

ModelNode condition_node(const ModelNode& prior, const ModelNode& like) {
  if (prior.items != like.items || prior.is_leaf() != like.is_leaf()) {
    throw std::invalid_argument("condition: likelihood does not share the prior's tree");
  }
  if (prior.is_leaf()) {
    return ModelNode::leaf(prior.items, pointwise_condition(*prior.factor, *like.factor));
  }
  const auto& mp = prior.interleaving->probs();
  const auto& ml = like.interleaving->probs();
  std::vector<double> w(mp.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = mp[i] * ml[i];
  InterleavingDistribution m = InterleavingDistribution::table(
      prior.interleaving->p(), prior.interleaving->q(), normalized(w, "condition"));
  return ModelNode::split(std::move(m), condition_node(prior.children[0], like.children[0]),
                          condition_node(prior.children[1], like.children[1]));
}

ModelNode condition_pairwise_node(const ModelNode& node, int i, int j, double beta) {
  if (node.is_leaf()) {
    auto li = std::lower_bound(node.items.begin(), node.items.end(), i) - node.items.begin();
    auto lj = std::lower_bound(node.items.begin(), node.items.end(), j) - node.items.begin();
    const int k = static_cast<int>(node.items.size());
    return ModelNode::leaf(node.items,
                           pointwise_condition(*node.factor, pairwise_likelihood(
                                                                 k, static_cast<int>(li),
                                                                 static_cast<int>(lj), beta)));
  }
  ModelNode out = node;
  for (int c = 0; c < 2; ++c) {
    const auto& ci = node.children[c].items;
    bool has_i = std::binary_search(ci.begin(), ci.end(), i);
    bool has_j = std::binary_search(ci.begin(), ci.end(), j);
    if (has_i && has_j) {
      out.children[c] = condition_pairwise_node(node.children[c], i, j, beta);
      return out;
    }
    if (has_i != has_j) {
      throw std::domain_error("non-decomposable observation: items " + std::to_string(i + 1) +
                              " and " + std::to_string(j + 1) +
                              " are separated by a split; use to_dense and pointwise_condition");
    }
  }
  throw std::logic_error("condition_pairwise: items missing from subtree");
}

constexpr std::size_t kMapCap = 100000;

std::vector<Ranking> node_argmaxes(const ModelNode& node) {
  auto tied = [](const std::vector<double>& probs) {
    double best = *std::max_element(probs.begin(), probs.end());
    std::vector<std::uint64_t> idx;
    for (std::uint64_t i = 0; i < probs.size(); ++i) {
      if (probs[i] >= best * (1.0 - 1e-12)) idx.push_back(i);
    }
    return idx;
  };
  const int k = static_cast<int>(node.items.size());
  std::vector<Ranking> out;
  if (node.is_leaf()) {
    for (std::uint64_t i : tied(node.factor->probs())) {
      out.push_back(from_index(k, i));
      if (out.size() >= kMapCap) break;
    }
    return out;
  }
  const InterleavingDistribution& m = *node.interleaving;
  std::vector<std::uint64_t> taus = tied(m.probs());
  std::vector<Ranking> a = node_argmaxes(node.children[0]);
  std::vector<Ranking> b = node_argmaxes(node.children[1]);
  if (taus.size() * a.size() * b.size() > kMapCap) {
    // Too many ties to enumerate; keep the first of each.
    taus.resize(1);
    a.resize(1);
    b.resize(1);
  }
  ItemPartition part = node.local_partition();
  for (std::uint64_t t : taus) {
    Interleaving tau = Interleaving::from_index(m.p(), m.q(), t);
    for (const Ranking& x : a) {
      for (const Ranking& y : b) out.push_back(recompose(tau, x, y, part));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double node_entropy(const ModelNode& node) {
  if (node.is_leaf()) return entropy(*node.factor);
  return node.interleaving->entropy() + node_entropy(node.children[0]) +
         node_entropy(node.children[1]);
}

}  // namespace

HierarchicalModel condition(const HierarchicalModel& prior, const HierarchicalModel& likelihood) {
  return HierarchicalModel(condition_node(prior.root(), likelihood.root()));
}

HierarchicalModel condition_pairwise(const HierarchicalModel& prior, int i, int j, double beta) {
  if (i == j || i < 0 || j < 0 || i >= prior.n() || j >= prior.n()) {
    throw std::invalid_argument("condition_pairwise: need two distinct valid items");
  }
  return HierarchicalModel(condition_pairwise_node(prior.root(), i, j, beta));
}

Ranking map_assignment(const HierarchicalModel& model) {
  return node_argmaxes(model.root()).front();
}

double model_entropy(const HierarchicalModel& model) { return node_entropy(model.root()); }

// ---------------------------------------------------------------------------
// d-way flattening

namespace {

struct Flat {
  std::vector<std::vector<int>> leaf_sets;
  std::map<std::vector<int>, double> table;
  std::vector<DenseDistribution> factors;
};

Flat flatten_node(const ModelNode& node) {
  Flat out;
  if (node.is_leaf()) {
    out.leaf_sets.push_back(node.items);
    out.table[std::vector<int>(node.items.size(), 0)] = 1.0;
    out.factors.push_back(*node.factor);
    return out;
  }
  Flat fa = flatten_node(node.children[0]);
  Flat fb = flatten_node(node.children[1]);
  const int offset = static_cast<int>(fa.leaf_sets.size());
  const InterleavingDistribution& m = *node.interleaving;
  // Multinomial count of label sequences at this node.
  double entries = 1.0;
  {
    int placed = 0;
    for (const auto& s : fa.leaf_sets) {
      placed += static_cast<int>(s.size());
      entries *= static_cast<double>(binomial(placed, static_cast<int>(s.size())));
    }
    for (const auto& s : fb.leaf_sets) {
      placed += static_cast<int>(s.size());
      entries *= static_cast<double>(binomial(placed, static_cast<int>(s.size())));
    }
  }
  if (entries > static_cast<double>(kInterleavingCap)) {
    throw std::length_error("flatten_to_dway: multi-way interleaving table exceeds the cap");
  }
  const int n = m.n();
  for (std::uint64_t t = 0; t < m.size(); ++t) {
    if (m[t] == 0.0) continue;
    std::vector<bool> pat = index_pattern(m.p(), m.q(), t);
    for (const auto& [sa, pa] : fa.table) {
      for (const auto& [sb, pb] : fb.table) {
        std::vector<int> seq(n);
        int ia = 0, ib = 0;
        for (int r = 0; r < n; ++r) seq[r] = pat[r] ? sa[ia++] : sb[ib++] + offset;
        out.table[seq] += m[t] * pa * pb;
      }
    }
  }
  out.leaf_sets = std::move(fa.leaf_sets);
  out.factors = std::move(fa.factors);
  for (auto& s : fb.leaf_sets) out.leaf_sets.push_back(std::move(s));
  for (auto& f : fb.factors) out.factors.push_back(std::move(f));
  return out;
}

}  // namespace

DWayDecomposition flatten_to_dway(const HierarchicalModel& model) {
  Flat flat = flatten_node(model.root());
  DWayDecomposition d;
  d.n = model.n();
  d.leaf_sets = std::move(flat.leaf_sets);
  d.factors = std::move(flat.factors);
  d.interleavings.assign(flat.table.begin(), flat.table.end());
  return d;
}

double DWayDecomposition::prob(const Ranking& s) const {
  if (s.size() != n) throw std::invalid_argument("DWayDecomposition::prob: size mismatch");
  std::vector<int> labels(n);
  for (std::size_t l = 0; l < leaf_sets.size(); ++l) {
    for (int item : leaf_sets[l]) labels[s[item]] = static_cast<int>(l);
  }
  auto it = std::lower_bound(
      interleavings.begin(), interleavings.end(), labels,
      [](const std::pair<std::vector<int>, double>& e, const std::vector<int>& key) {
        return e.first < key;
      });
  if (it == interleavings.end() || it->first != labels) return 0.0;
  double p = it->second;
  for (std::size_t l = 0; l < leaf_sets.size() && p > 0.0; ++l) {
    p *= factors[l].prob(relative_rank_map(s, leaf_sets[l]));
  }
  return p;
}

DenseDistribution DWayDecomposition::to_dense() const {
  check_dense_cap(n, "DWayDecomposition::to_dense");
  std::vector<double> h(factorial(n));
  for (std::uint64_t i = 0; i < h.size(); ++i) h[i] = prob(from_index(n, i));
  return DenseDistribution::from_weights(n, std::move(h));
}

HierarchicalModel thin_chain(const std::vector<std::vector<int>>& groups,
                             const std::vector<InterleavingDistribution>& interleavings,
                             const std::vector<DenseDistribution>& factors) {
  if (groups.size() < 2 || interleavings.size() + 1 != groups.size() ||
      factors.size() != groups.size()) {
    throw std::invalid_argument("thin_chain: need d >= 2 groups, d-1 interleavings, d factors");
  }
  ModelNode node = ModelNode::leaf(groups.back(), factors.back());
  for (std::size_t i = groups.size() - 1; i-- > 0;) {
    node = ModelNode::split(interleavings[i], ModelNode::leaf(groups[i], factors[i]),
                            std::move(node));
  }
  return HierarchicalModel(std::move(node));
}

}  // namespace riffle
