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

// File formats.
//
// Ranking files are line oriented. The first non-comment line is a header
//
//   n=5 notation=ordering counted=true
//
// where notation (ordering | ranking, default ordering) and counted (default
// false) are optional. Each following line holds one record of n 1-based
// integers, preceded by a positive count when counted=true. In ordering
// notation the record lists items from most to least preferred; in ranking
// notation entry j is the rank of item j. Lines starting with '#' and blank
// lines are ignored.
//
// Models and Fourier coefficients are JSON documents, see model_to_json and
// coefficients_to_json.

#ifndef RIFFLE_IO_H_
#define RIFFLE_IO_H_

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "riffle/dense_distribution.h"
#include "riffle/fourier.h"
#include "riffle/riffle_model.h"

namespace riffle {

enum class Notation { kOrdering, kRanking };

// Throws std::runtime_error with "<source>:<line>: <reason>" on malformed input.
SampleSet read_rankings(std::istream& in, const std::string& source = "<stream>");
SampleSet load_rankings(const std::string& path);
void write_rankings(std::ostream& out, const SampleSet& samples,
                    Notation notation = Notation::kOrdering, bool counted = true);
void save_rankings(const std::string& path, const SampleSet& samples,
                   Notation notation = Notation::kOrdering, bool counted = true);

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const HierarchicalModel& model);
HierarchicalModel model_from_json(const nlohmann::json& doc);
void save_model(const std::string& path, const HierarchicalModel& model);
HierarchicalModel load_model(const std::string& path);

nlohmann::json tree_to_json(const ItemTree& tree);
ItemTree tree_from_json(const nlohmann::json& doc);

// {"format": "riffle-fourier", "version": 1, "n": n, "truncation": k | null,
//  "levels": [{"partition": [...], "dimension": d, "matrix": [row-major]}]}
nlohmann::json coefficients_to_json(const FourierCoefficients& f);
FourierCoefficients coefficients_from_json(const nlohmann::json& doc);

}  // namespace riffle

#endif  // RIFFLE_IO_H_
