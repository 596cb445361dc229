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

// Fourier analysis on S_n with Young's orthogonal representation.
//
// Transform: F_lambda = sum_sigma h(sigma) rho_lambda(sigma), no dimension
// scaling. Inverse: h(sigma) = (1/n!) sum_lambda d_lambda
// tr(F_lambda rho_lambda(sigma)^T). Under these conventions the transform of
// a convolution m * h is the per-level product m_hat h_hat.

#ifndef RIFFLE_FOURIER_H_
#define RIFFLE_FOURIER_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riffle/dense_distribution.h"
#include "riffle/permutation.h"
#include "riffle/riffle_model.h"

namespace riffle {

// Largest n for which full (all-level) transforms are computed.
inline constexpr int kMaxFourierN = 7;

// Integer partition, non-increasing parts.
using Partition = std::vector<int>;

// Partitions of n in lexicographically decreasing order: (n), (n-1,1),
// (n-2,2), (n-2,1,1), ...
std::vector<Partition> partitions_of(int n);
// Levels carrying the order-k marginals: lambda_1 >= n - k.
std::vector<Partition> marginal_levels(int n, int k);
std::string partition_to_string(const Partition& shape);

// One irreducible representation in Young's orthogonal form. The basis is the
// set of standard tableaux of `shape`; tableau t is stored as the row holding
// each number 0..n-1.
struct Irrep {
  Partition shape;
  int n = 0;
  int dim = 0;
  std::vector<std::vector<int>> tableaux;
  // rho(s_k) for the adjacent transposition (k, k+1): column t has `diag`
  // at row t and `off` at row `partner` (or no off-diagonal when -1).
  std::vector<std::vector<double>> diag;
  std::vector<std::vector<double>> off;
  std::vector<std::vector<int>> partner;
  // Branching: the row holding n-1 in tableau t and the index of the tableau
  // obtained by deleting it, within the irrep of the smaller shape.
  std::vector<int> corner_row;
  std::vector<int> restricted_index;

  Eigen::MatrixXd generator(int k) const;
  // M <- M rho(s_k) and M <- rho(s_k) M.
  void right_multiply(Eigen::MatrixXd& m, int k) const;
  void left_multiply(Eigen::MatrixXd& m, int k) const;
};

// Built once per shape and cached for the life of the process.
const Irrep& irrep(const Partition& shape);

class IrrepTable {
 public:
  static const IrrepTable& get(int n);

  int n() const { return n_; }
  const std::vector<const Irrep*>& irreps() const { return irreps_; }

 private:
  int n_ = 0;
  std::vector<const Irrep*> irreps_;
};

Eigen::MatrixXd yor_matrix(const Partition& shape, const Ranking& s);

struct FourierLevel {
  Partition shape;
  Eigen::MatrixXd matrix;
};

struct FourierCoefficients {
  int n = 0;
  std::vector<FourierLevel> levels;
  // Order s when only the levels of marginal_levels(n, s) are kept.
  std::optional<int> truncation;

  const Eigen::MatrixXd* find(const Partition& shape) const;
  // Largest entrywise difference over the levels of `this`; levels missing
  // from `other` count as zero.
  double max_abs_diff(const FourierCoefficients& other) const;
};

// Visits every sigma in S_n together with rho_shape(sigma), walking S_n by
// adjacent transpositions. `visit` receives rank_index(sigma).
void for_each_representation(const Partition& shape,
                             const std::function<void(std::uint64_t, const Eigen::MatrixXd&)>& visit);

// Transform of an arbitrary real function given by rank_index. With `order`
// set only marginal_levels(n, order) are computed.
FourierCoefficients fourier_transform(int n, const std::vector<double>& values,
                                      std::optional<int> order = std::nullopt);
FourierCoefficients fourier_transform(const DenseDistribution& h,
                                      std::optional<int> order = std::nullopt);
// Raw inverse; levels absent from F contribute zero.
std::vector<double> inverse_fourier_values(const FourierCoefficients& f);
// Inverse as a distribution. Throws std::domain_error if the result has
// entries below -1e-10.
DenseDistribution inverse_fourier_transform(const FourierCoefficients& f);

FourierCoefficients convolve_fourier(const FourierCoefficients& f, const FourierCoefficients& g);
FourierCoefficients dual_transpose(const FourierCoefficients& f);
// Keeps marginal_levels(n, order); throws naming any missing partition.
FourierCoefficients truncate(const FourierCoefficients& f, int order);
// Order-k marginals from coefficients that include marginal_levels(n, k).
KthOrderMarginals reconstruct_kth_order_marginals(const FourierCoefficients& f, int k);

// Transform of m^alpha_{p,q}, viewed as a distribution on S_{p+q}, by the
// Pascal-triangle recurrence over pile sizes.
FourierCoefficients rifflehat(int p, int q, double alpha, std::optional<int> order = std::nullopt);
// Same recurrence for an arbitrary mixture of biased riffles.
FourierCoefficients rifflehat(const InterleavingDistribution& m,
                              std::optional<int> order = std::nullopt);
// Direct transform of an interleaving table embedded in S_{p+q}.
FourierCoefficients interleaving_transform(const InterleavingDistribution& m,
                                           std::optional<int> order = std::nullopt);

// Transform of f.g supported on S_p x S_q (A-first interleaving). The result
// keeps the smaller truncation order of the two inputs.
FourierCoefficients join_fourier(const FourierCoefficients& f, const FourierCoefficients& g);
struct FourierPair {
  FourierCoefficients f;
  FourierCoefficients g;
};
// Marginals of the restriction to S_p x S_q, each normalized by its scalar
// level.
FourierPair split_fourier(const FourierCoefficients& h, int p);

// h_hat = m_hat (f.g)_hat, level by level.
FourierCoefficients riffle_join_fourier(const FourierCoefficients& f, const FourierCoefficients& g,
                                        const FourierCoefficients& m);
// Deconvolves with the dual of the uniform riffle and splits.
FourierPair riffle_split_fourier(const FourierCoefficients& h, int p);

}  // namespace riffle

#endif  // RIFFLE_FOURIER_H_
