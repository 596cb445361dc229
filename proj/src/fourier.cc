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

#include "riffle/fourier.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace riffle {
namespace {

void partitions_rec(int remaining, int max_part, Partition& cur, std::vector<Partition>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions_rec(remaining - part, part, cur, out);
    cur.pop_back();
  }
}

// Standard tableaux as row words: word[k] is the row holding number k.
std::vector<std::vector<int>> standard_tableaux(const Partition& shape) {
  const int n = std::accumulate(shape.begin(), shape.end(), 0);
  std::vector<std::vector<int>> out;
  std::vector<int> word;
  std::vector<int> filled(shape.size(), 0);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(word.size()) == n) {
      out.push_back(word);
      return;
    }
    for (std::size_t r = 0; r < shape.size(); ++r) {
      if (filled[r] >= shape[r]) continue;
      if (r > 0 && filled[r - 1] <= filled[r]) continue;
      ++filled[r];
      word.push_back(static_cast<int>(r));
      self(self);
      word.pop_back();
      --filled[r];
    }
  };
  rec(rec);
  return out;
}

std::unique_ptr<Irrep> build_irrep(const Partition& shape) {
  auto rep = std::make_unique<Irrep>();
  rep->shape = shape;
  rep->n = std::accumulate(shape.begin(), shape.end(), 0);
  rep->tableaux = standard_tableaux(shape);
  rep->dim = static_cast<int>(rep->tableaux.size());
  const int n = rep->n, d = rep->dim;

  std::map<std::vector<int>, int> index;
  for (int t = 0; t < d; ++t) index[rep->tableaux[t]] = t;

  // Contents c = col - row of every number in every tableau.
  std::vector<std::vector<int>> content(d, std::vector<int>(n));
  for (int t = 0; t < d; ++t) {
    std::vector<int> len(shape.size(), 0);
    for (int k = 0; k < n; ++k) {
      int r = rep->tableaux[t][k];
      content[t][k] = len[r] - r;
      ++len[r];
    }
  }

  const int gens = std::max(n - 1, 0);
  rep->diag.assign(gens, std::vector<double>(d));
  rep->off.assign(gens, std::vector<double>(d, 0.0));
  rep->partner.assign(gens, std::vector<int>(d, -1));
  for (int k = 0; k < gens; ++k) {
    for (int t = 0; t < d; ++t) {
      const double r = content[t][k + 1] - content[t][k];
      rep->diag[k][t] = 1.0 / r;
      std::vector<int> swapped = rep->tableaux[t];
      std::swap(swapped[k], swapped[k + 1]);
      auto it = index.find(swapped);
      if (it != index.end() && swapped != rep->tableaux[t]) {
        rep->partner[k][t] = it->second;
        rep->off[k][t] = std::sqrt(1.0 - 1.0 / (r * r));
      }
    }
  }

  // Branching onto the shapes with one corner removed.
  rep->corner_row.assign(d, 0);
  rep->restricted_index.assign(d, 0);
  if (n >= 1) {
    std::map<int, std::map<std::vector<int>, int>> smaller;
    for (int t = 0; t < d; ++t) {
      int row = rep->tableaux[t][n - 1];
      rep->corner_row[t] = row;
      if (!smaller.count(row)) {
        Partition sub = shape;
        --sub[row];
        if (sub[row] == 0) sub.erase(sub.begin() + row);
        auto& idx = smaller[row];
        auto tabs = standard_tableaux(sub);
        for (int u = 0; u < static_cast<int>(tabs.size()); ++u) idx[tabs[u]] = u;
      }
      std::vector<int> word(rep->tableaux[t].begin(), rep->tableaux[t].end() - 1);
      rep->restricted_index[t] = smaller[row].at(word);
    }
  }
  return rep;
}

Partition remove_corner(const Partition& shape, int row) {
  Partition sub = shape;
  --sub[row];
  if (sub[row] == 0) sub.erase(sub.begin() + row);
  return sub;
}

// Adjacent-transposition walk over S_n (Steinhaus-Johnson-Trotter). Step t
// swaps positions swaps[t], swaps[t]+1 of the one-line ranking, i.e.
// sigma <- sigma s_k; indices[t] is rank_index of the t-th visited ranking.
struct Walk {
  std::vector<int> swaps;
  std::vector<std::uint64_t> indices;
};

const Walk& walk(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Walk>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (slot) return *slot;
  auto w = std::make_unique<Walk>();
  std::vector<int> perm(n), dir(n, -1);
  std::iota(perm.begin(), perm.end(), 0);
  w->indices.push_back(rank_index(Ranking(perm)));
  while (true) {
    int best_pos = -1;
    for (int i = 0; i < n; ++i) {
      int j = i + dir[perm[i]];
      if (j < 0 || j >= n || perm[j] > perm[i]) continue;
      if (best_pos < 0 || perm[i] > perm[best_pos]) best_pos = i;
    }
    if (best_pos < 0) break;
    int v = perm[best_pos];
    int j = best_pos + dir[v];
    std::swap(perm[best_pos], perm[j]);
    w->swaps.push_back(std::min(best_pos, j));
    w->indices.push_back(rank_index(Ranking(perm)));
    for (int u = v + 1; u < n; ++u) dir[u] = -dir[u];
  }
  slot = std::move(w);
  return *slot;
}

void check_fourier_cap(int n, const char* what) {
  if (n < 1 || n > kMaxFourierN) {
    throw std::length_error(std::string(what) + ": n=" + std::to_string(n) +
                            " outside the full-transform range 1.." +
                            std::to_string(kMaxFourierN));
  }
}

std::vector<Partition> levels_for(int n, std::optional<int> order) {
  return order ? marginal_levels(n, *order) : partitions_of(n);
}

// Branching-rule block embedding of coefficients on S_{n-1} into level
// `shape` of S_n; absent smaller levels embed as zero blocks.
Eigen::MatrixXd embed(const FourierCoefficients& small, const Irrep& rep) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(rep.dim, rep.dim);
  std::map<int, std::vector<int>> by_row;
  for (int t = 0; t < rep.dim; ++t) by_row[rep.corner_row[t]].push_back(t);
  for (const auto& [row, ts] : by_row) {
    const Eigen::MatrixXd* f = small.find(remove_corner(rep.shape, row));
    if (!f) continue;
    for (int t : ts) {
      for (int u : ts) e(t, u) = (*f)(rep.restricted_index[t], rep.restricted_index[u]);
    }
  }
  return e;
}

FourierCoefficients identity_coefficients(int n, std::optional<int> order) {
  FourierCoefficients f;
  f.n = n;
  f.truncation = order;
  for (const Partition& shape : levels_for(n, order)) {
    int d = irrep(shape).dim;
    f.levels.push_back({shape, Eigen::MatrixXd::Identity(d, d)});
  }
  return f;
}

FourierCoefficients rifflehat_biased(int p, int q, double alpha, std::optional<int> order) {
  if (p < 0 || q < 0 || p + q < 1) throw std::invalid_argument("rifflehat: bad pile sizes");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("rifflehat: alpha in [0,1]");
  if (!order && p + q > 10) {
    throw std::length_error("rifflehat: full coefficients limited to p+q <= 10; pass an order");
  }
  // cells[a][b] over S_{a+b}; row a only needs rows a and a-1.
  std::vector<FourierCoefficients> prev(q + 1), cur(q + 1);
  for (int a = 0; a <= p; ++a) {
    for (int b = 0; b <= q; ++b) {
      const int i = a + b;
      if (i == 0) continue;
      if (a == 0 || b == 0) {
        cur[b] = identity_coefficients(i, order);
        continue;
      }
      double wa = alpha * a, wb = (1.0 - alpha) * b;
      double z = wa + wb;
      wa /= z;
      wb /= z;
      FourierCoefficients cell;
      cell.n = i;
      cell.truncation = order;
      for (const Partition& shape : levels_for(i, order)) {
        const Irrep& rep = irrep(shape);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rep.dim, rep.dim);
        if (wa > 0.0) {
          // Bottom card from A: tau = tau' c with c = s_{i-2} ... s_{a-1}.
          Eigen::MatrixXd x = embed(prev[b], rep);
          for (int k = i - 2; k >= a - 1; --k) rep.right_multiply(x, k);
          m += wa * x;
        }
        if (wb > 0.0) m += wb * embed(cur[b - 1], rep);
        cell.levels.push_back({shape, std::move(m)});
      }
      cur[b] = std::move(cell);
    }
    std::swap(prev, cur);
  }
  return prev[q];
}

double scalar_level(const FourierCoefficients& f) {
  const Eigen::MatrixXd* s = f.find(Partition{f.n});
  if (!s) throw std::invalid_argument("coefficients lack the trivial level");
  return (*s)(0, 0);
}

FourierCoefficients normalize_by_scalar(FourierCoefficients f) {
  double z = scalar_level(f);
  if (z == 0.0) throw std::domain_error("split_fourier: zero mass on the subgroup");
  for (auto& level : f.levels) level.matrix /= z;
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<Partition> partitions_of(int n) {
  if (n < 0) throw std::invalid_argument("partitions_of: negative n");
  std::vector<Partition> out;
  Partition cur;
  partitions_rec(n, n, cur, out);
  return out;
}

std::vector<Partition> marginal_levels(int n, int k) {
  if (k < 0) throw std::invalid_argument("marginal_levels: negative order");
  std::vector<Partition> out;
  for (Partition& shape : partitions_of(n)) {
    if (shape[0] >= n - k) out.push_back(std::move(shape));
  }
  return out;
}

std::string partition_to_string(const Partition& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

Eigen::MatrixXd Irrep::generator(int k) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
  for (int t = 0; t < dim; ++t) {
    g(t, t) = diag[k][t];
    if (partner[k][t] >= 0) g(partner[k][t], t) = off[k][t];
  }
  return g;
}

void Irrep::right_multiply(Eigen::MatrixXd& m, int k) const {
  // Column t of M rho is diag_t M(:,t) + off_t M(:,partner_t); partners come
  // in pairs, so update each pair once.
  for (int t = 0; t < dim; ++t) {
    int u = partner[k][t];
    if (u < 0) {
      m.col(t) *= diag[k][t];
    } else if (t < u) {
      Eigen::VectorXd ct = m.col(t), cu = m.col(u);
      m.col(t) = diag[k][t] * ct + off[k][t] * cu;
      m.col(u) = diag[k][u] * cu + off[k][u] * ct;
    }
  }
}

void Irrep::left_multiply(Eigen::MatrixXd& m, int k) const {
  for (int t = 0; t < dim; ++t) {
    int u = partner[k][t];
    if (u < 0) {
      m.row(t) *= diag[k][t];
    } else if (t < u) {
      Eigen::RowVectorXd rt = m.row(t), ru = m.row(u);
      m.row(t) = diag[k][t] * rt + off[k][u] * ru;
      m.row(u) = diag[k][u] * ru + off[k][t] * rt;
    }
  }
}

const Irrep& irrep(const Partition& shape) {
  if (shape.empty() || !std::is_sorted(shape.rbegin(), shape.rend()) || shape.back() < 1) {
    throw std::invalid_argument("irrep: " + partition_to_string(shape) + " is not a partition");
  }
  static std::mutex mu;
  static std::map<Partition, std::unique_ptr<Irrep>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[shape];
  if (!slot) slot = build_irrep(shape);
  return *slot;
}

const IrrepTable& IrrepTable::get(int n) {
  if (n < 1 || n > kDefaultMaxDenseN) {
    throw std::length_error("IrrepTable: n outside 1.." + std::to_string(kDefaultMaxDenseN));
  }
  static std::mutex mu;
  static std::map<int, std::unique_ptr<IrrepTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::unique_ptr<IrrepTable>(new IrrepTable());
    slot->n_ = n;
    for (const Partition& shape : partitions_of(n)) slot->irreps_.push_back(&irrep(shape));
  }
  return *slot;
}

Eigen::MatrixXd yor_matrix(const Partition& shape, const Ranking& s) {
  const Irrep& rep = irrep(shape);
  if (rep.n != s.size()) throw std::invalid_argument("yor_matrix: size mismatch");
  // Sort s by right-multiplying with descents: s s_{j1} s_{j2} ... = e, so
  // s = ... s_{j2} s_{j1} and rho(s) accumulates by left multiplication.
  std::vector<int> r(s.ranks().begin(), s.ranks().end());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(rep.dim, rep.dim);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int k = 0; k + 1 < rep.n; ++k) {
      if (r[k] > r[k + 1]) {
        std::swap(r[k], r[k + 1]);
        rep.left_multiply(m, k);
        changed = true;
      }
    }
  }
  return m;
}

const Eigen::MatrixXd* FourierCoefficients::find(const Partition& shape) const {
  for (const auto& level : levels) {
    if (level.shape == shape) return &level.matrix;
  }
  return nullptr;
}

double FourierCoefficients::max_abs_diff(const FourierCoefficients& other) const {
  double worst = 0.0;
  for (const auto& level : levels) {
    const Eigen::MatrixXd* o = other.find(level.shape);
    double d = o ? (level.matrix - *o).cwiseAbs().maxCoeff() : level.matrix.cwiseAbs().maxCoeff();
    worst = std::max(worst, d);
  }
  for (const auto& level : other.levels) {
    if (!find(level.shape)) worst = std::max(worst, level.matrix.cwiseAbs().maxCoeff());
  }
  return worst;
}

void for_each_representation(
    const Partition& shape,
    const std::function<void(std::uint64_t, const Eigen::MatrixXd&)>& visit) {
  const Irrep& rep = irrep(shape);
  const Walk& w = walk(rep.n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(rep.dim, rep.dim);
  visit(w.indices[0], m);
  for (std::size_t t = 0; t < w.swaps.size(); ++t) {
    rep.right_multiply(m, w.swaps[t]);
    visit(w.indices[t + 1], m);
  }
}

FourierCoefficients fourier_transform(int n, const std::vector<double>& values,
                                      std::optional<int> order) {
  check_fourier_cap(n, "fourier_transform");
  if (values.size() != factorial(n)) {
    throw std::invalid_argument("fourier_transform: expected n! values");
  }
  FourierCoefficients f;
  f.n = n;
  f.truncation = order;
  for (const Partition& shape : levels_for(n, order)) {
    const int d = irrep(shape).dim;
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
    for_each_representation(shape, [&](std::uint64_t idx, const Eigen::MatrixXd& rho) {
      if (values[idx] != 0.0) acc.noalias() += values[idx] * rho;
    });
    f.levels.push_back({shape, std::move(acc)});
  }
  return f;
}

FourierCoefficients fourier_transform(const DenseDistribution& h, std::optional<int> order) {
  return fourier_transform(h.n(), h.probs(), order);
}

std::vector<double> inverse_fourier_values(const FourierCoefficients& f) {
  check_fourier_cap(f.n, "inverse_fourier_transform");
  std::vector<double> values(factorial(f.n), 0.0);
  const double nf = static_cast<double>(factorial(f.n));
  for (const auto& level : f.levels) {
    const Irrep& rep = irrep(level.shape);
    if (level.matrix.rows() != rep.dim || level.matrix.cols() != rep.dim) {
      throw std::invalid_argument("inverse_fourier_transform: level " +
                                  partition_to_string(level.shape) + " has the wrong shape");
    }
    const double scale = rep.dim / nf;
    for_each_representation(level.shape, [&](std::uint64_t idx, const Eigen::MatrixXd& rho) {
      values[idx] += scale * level.matrix.cwiseProduct(rho).sum();
    });
  }
  return values;
}

DenseDistribution inverse_fourier_transform(const FourierCoefficients& f) {
  std::vector<double> v = inverse_fourier_values(f);
  double total = 0.0;
  for (double& x : v) {
    if (x < -1e-10) {
      throw std::domain_error("inverse_fourier_transform: result has negative entries");
    }
    x = std::max(x, 0.0);
    total += x;
  }
  if (std::abs(total - 1.0) <= 1e-9) return DenseDistribution::from_weights(f.n, std::move(v));
  return DenseDistribution(f.n, std::move(v), DenseDistribution::Normalization::kUnnormalized);
}

FourierCoefficients convolve_fourier(const FourierCoefficients& f, const FourierCoefficients& g) {
  if (f.n != g.n || f.levels.size() != g.levels.size()) {
    throw std::invalid_argument("convolve_fourier: coefficient sets do not match");
  }
  FourierCoefficients out;
  out.n = f.n;
  out.truncation = f.truncation;
  for (std::size_t i = 0; i < f.levels.size(); ++i) {
    if (f.levels[i].shape != g.levels[i].shape ||
        f.levels[i].matrix.cols() != g.levels[i].matrix.rows()) {
      throw std::invalid_argument("convolve_fourier: level mismatch at " +
                                  partition_to_string(f.levels[i].shape));
    }
    out.levels.push_back({f.levels[i].shape, f.levels[i].matrix * g.levels[i].matrix});
  }
  return out;
}

FourierCoefficients dual_transpose(const FourierCoefficients& f) {
  FourierCoefficients out = f;
  for (auto& level : out.levels) level.matrix.transposeInPlace();
  return out;
}

FourierCoefficients truncate(const FourierCoefficients& f, int order) {
  FourierCoefficients out;
  out.n = f.n;
  out.truncation = order;
  std::string missing;
  for (const Partition& shape : marginal_levels(f.n, order)) {
    const Eigen::MatrixXd* m = f.find(shape);
    if (!m) {
      missing += (missing.empty() ? "" : ", ") + partition_to_string(shape);
      continue;
    }
    out.levels.push_back({shape, *m});
  }
  if (!missing.empty()) {
    throw std::invalid_argument("order-" + std::to_string(order) +
                                " coefficients need the missing levels " + missing);
  }
  return out;
}

KthOrderMarginals reconstruct_kth_order_marginals(const FourierCoefficients& f, int k) {
  // The marginal levels are orthogonal to every other level, so zero-filling
  // the rest and inverting leaves the order-k marginals intact.
  FourierCoefficients low = truncate(f, k);
  return kth_order_marginals(f.n, inverse_fourier_values(low), k);
}

FourierCoefficients rifflehat(int p, int q, double alpha, std::optional<int> order) {
  return rifflehat_biased(p, q, alpha, order);
}

FourierCoefficients rifflehat(const InterleavingDistribution& m, std::optional<int> order) {
  if (m.kind() == InterleavingDistribution::Kind::kTable) return interleaving_transform(m, order);
  FourierCoefficients out;
  for (std::size_t c = 0; c < m.alphas().size(); ++c) {
    FourierCoefficients part = rifflehat_biased(m.p(), m.q(), m.alphas()[c], order);
    if (c == 0) {
      out = part;
      for (auto& level : out.levels) level.matrix *= m.weights()[0];
    } else {
      for (std::size_t i = 0; i < out.levels.size(); ++i) {
        out.levels[i].matrix += m.weights()[c] * part.levels[i].matrix;
      }
    }
  }
  return out;
}

FourierCoefficients interleaving_transform(const InterleavingDistribution& m,
                                           std::optional<int> order) {
  const int n = m.n();
  check_fourier_cap(n, "interleaving_transform");
  std::vector<double> values(factorial(n), 0.0);
  for (std::uint64_t t = 0; t < m.size(); ++t) {
    values[rank_index(Interleaving::from_index(m.p(), m.q(), t).ranking())] = m[t];
  }
  return fourier_transform(n, values, order);
}

FourierCoefficients join_fourier(const FourierCoefficients& f, const FourierCoefficients& g) {
  const int p = f.n, q = g.n, n = p + q;
  check_fourier_cap(n, "join_fourier");
  std::vector<double> fv = inverse_fourier_values(f), gv = inverse_fourier_values(g);
  std::vector<Ranking> sp = enumerate_sn(p), sq = enumerate_sn(q);
  Interleaving first = Interleaving::a_first(p, q);
  std::vector<double> h(factorial(n), 0.0);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    if (fv[i] == 0.0) continue;
    for (std::size_t j = 0; j < sq.size(); ++j) {
      h[rank_index(recompose(first, sp[i], sq[j]))] = fv[i] * gv[j];
    }
  }
  std::optional<int> order;
  if (f.truncation && g.truncation) {
    order = std::min(*f.truncation, *g.truncation);
  } else if (f.truncation) {
    order = f.truncation;
  } else {
    order = g.truncation;
  }
  return fourier_transform(n, h, order);
}

FourierPair split_fourier(const FourierCoefficients& h, int p) {
  const int n = h.n, q = n - p;
  if (p < 1 || q < 1) throw std::invalid_argument("split_fourier: need 1 <= p < n");
  std::vector<double> hv = inverse_fourier_values(h);
  std::vector<Ranking> sp = enumerate_sn(p), sq = enumerate_sn(q);
  Interleaving first = Interleaving::a_first(p, q);
  std::vector<double> f(sp.size(), 0.0), g(sq.size(), 0.0);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    for (std::size_t j = 0; j < sq.size(); ++j) {
      double v = hv[rank_index(recompose(first, sp[i], sq[j]))];
      f[i] += v;
      g[j] += v;
    }
  }
  return FourierPair{normalize_by_scalar(fourier_transform(p, f, h.truncation)),
                     normalize_by_scalar(fourier_transform(q, g, h.truncation))};
}

FourierCoefficients riffle_join_fourier(const FourierCoefficients& f, const FourierCoefficients& g,
                                        const FourierCoefficients& m) {
  FourierCoefficients joint = join_fourier(f, g);
  if (m.n != joint.n) throw std::invalid_argument("riffle_join_fourier: size mismatch");
  for (auto& level : joint.levels) {
    const Eigen::MatrixXd* mm = m.find(level.shape);
    if (!mm) {
      throw std::invalid_argument("riffle_join_fourier: interleaving lacks level " +
                                  partition_to_string(level.shape));
    }
    level.matrix = (*mm) * level.matrix;
  }
  return joint;
}

FourierPair riffle_split_fourier(const FourierCoefficients& h, int p) {
  const int q = h.n - p;
  FourierCoefficients m = rifflehat(p, q, 0.5, h.truncation);
  FourierCoefficients deconv = h;
  for (auto& level : deconv.levels) {
    const Eigen::MatrixXd* mm = m.find(level.shape);
    level.matrix = mm->transpose() * level.matrix;
  }
  return split_fourier(deconv, p);
}

}  // namespace riffle
