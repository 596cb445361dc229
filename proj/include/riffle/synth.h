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


// Seeded random riffle independent models and samples drawn from them.

#ifndef RIFFLE_SYNTH_H_
#define RIFFLE_SYNTH_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "riffle/dense_distribution.h"
#include "riffle/riffle_model.h"

namespace riffle {

struct SynthSpec {
  // "thin": each split peels a block of `k` items off the rest.
  // "balanced": halves the item set until blocks have at most `k` items.
  enum class Structure { kThin, kBalanced };
  Structure structure = Structure::kThin;
  int n = 8;
  int k = 2;
  std::uint64_t seed = 0;
  std::int64_t m = 0;
  // Dirichlet concentration of the leaf factors; small values give peaked
  // factors.
  double concentration = 0.3;
  // Biased riffle parameters are drawn from [lo, hi] or [1-hi, 1-lo].
  double alpha_lo = 0.1;
  double alpha_hi = 0.35;
  // Random relabeling of the items, so blocks are not contiguous.
  bool shuffle_items = true;
};

struct SynthResult {
  HierarchicalModel model;
  SampleSet samples;
};

// Dirichlet(concentration) table over S_k.
DenseDistribution random_factor(int k, std::mt19937_64& rng, double concentration);
double random_alpha(std::mt19937_64& rng, double lo, double hi);

HierarchicalModel random_model(const SynthSpec& spec, std::mt19937_64& rng);

// Deterministic in spec.seed. m = 0 gives an empty sample set.
SynthResult synth(const SynthSpec& spec);

SynthSpec::Structure parse_structure(const std::string& name);

}  // namespace riffle

#endif  // RIFFLE_SYNTH_H_
