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

#include "riffle/io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace riffle {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, int line, const std::string& reason) {
  throw std::runtime_error(source + ":" + std::to_string(line) + ": " + reason);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool parse_int(const std::string& tok, long long& value) {
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  return ec == std::errc() && ptr == end;
}

struct Header {
  int n = 0;
  Notation notation = Notation::kOrdering;
  bool counted = false;
};

Header parse_header(const std::string& line, const std::string& source, int lineno) {
  Header h;
  bool have_n = false;
  for (const std::string& tok : split_ws(line)) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) fail(source, lineno, "malformed header field '" + tok + "'");
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "n") {
      long long n = 0;
      if (!parse_int(val, n) || n < 1 || n > 64) fail(source, lineno, "invalid n '" + val + "'");
      h.n = static_cast<int>(n);
      have_n = true;
    } else if (key == "notation") {
      if (val == "ordering") {
        h.notation = Notation::kOrdering;
      } else if (val == "ranking") {
        h.notation = Notation::kRanking;
      } else {
        fail(source, lineno, "unknown notation '" + val + "'");
      }
    } else if (key == "counted") {
      if (val != "true" && val != "false") fail(source, lineno, "counted must be true or false");
      h.counted = val == "true";
    } else {
      fail(source, lineno, "unknown header field '" + key + "'");
    }
  }
  if (!have_n) fail(source, lineno, "header must define n");
  return h;
}

}  // namespace

SampleSet read_rankings(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  std::optional<Header> header;
  std::optional<SampleSet> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header) {
      header = parse_header(line, source, lineno);
      out.emplace(header->n);
      continue;
    }
    std::vector<std::string> toks = split_ws(line);
    const std::size_t want = header->n + (header->counted ? 1 : 0);
    if (toks.size() != want) {
      fail(source, lineno, "expected " + std::to_string(want) + " fields, found " +
                               std::to_string(toks.size()));
    }
    long long count = 1;
    std::size_t pos = 0;
    if (header->counted) {
      if (!parse_int(toks[0], count) || count < 1) {
        fail(source, lineno, "count must be a positive integer, got '" + toks[0] + "'");
      }
      pos = 1;
    }
    std::vector<int> values;
    std::vector<char> seen(header->n + 1, 0);
    for (; pos < toks.size(); ++pos) {
      long long v = 0;
      if (!parse_int(toks[pos], v)) fail(source, lineno, "non-integer field '" + toks[pos] + "'");
      if (v < 1 || v > header->n) {
        fail(source, lineno, "value " + toks[pos] + " outside 1.." + std::to_string(header->n));
      }
      if (seen[v]) fail(source, lineno, "duplicate value " + std::to_string(v));
      seen[v] = 1;
      values.push_back(static_cast<int>(v) - 1);
    }
    Ranking s = header->notation == Notation::kOrdering ? Ranking::from_ordering(values)
                                                        : Ranking(values);
    out->add(s, count);
  }
  if (!header) throw std::runtime_error(source + ": missing header line");
  return std::move(*out);
}

SampleSet load_rankings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_rankings(in, path);
}

void write_rankings(std::ostream& out, const SampleSet& samples, Notation notation, bool counted) {
  out << "n=" << samples.n() << " notation="
      << (notation == Notation::kOrdering ? "ordering" : "ranking")
      << " counted=" << (counted ? "true" : "false") << "\n";
  for (const auto& [s, c] : samples.records()) {
    std::vector<int> v = notation == Notation::kOrdering ? s.ordering()
                                                         : std::vector<int>(s.ranks().begin(),
                                                                            s.ranks().end());
    const std::int64_t reps = counted ? 1 : c;
    for (std::int64_t r = 0; r < reps; ++r) {
      if (counted) out << c << " ";
      for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i] + 1;
      out << "\n";
    }
  }
}

void save_rankings(const std::string& path, const SampleSet& samples, Notation notation,
                   bool counted) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_rankings(out, samples, notation, counted);
  if (!out) throw std::runtime_error("error writing " + path);
}

// ---------------------------------------------------------------------------
// Models

namespace {

json items_json(const std::vector<int>& items) {
  json a = json::array();
  for (int x : items) a.push_back(x + 1);
  return a;
}

std::vector<int> items_from(const json& a) {
  if (!a.is_array()) throw std::runtime_error("model: items must be an array");
  std::vector<int> out;
  for (const auto& v : a) {
    if (!v.is_number_integer()) throw std::runtime_error("model: items must be integers");
    out.push_back(v.get<int>() - 1);
  }
  return out;
}

json interleaving_json(const InterleavingDistribution& m) {
  json j;
  j["p"] = m.p();
  j["q"] = m.q();
  switch (m.kind()) {
    case InterleavingDistribution::Kind::kTable:
      j["kind"] = "table";
      j["probs"] = m.probs();
      break;
    case InterleavingDistribution::Kind::kBiased:
      j["kind"] = "biased";
      j["alpha"] = m.alpha();
      break;
    case InterleavingDistribution::Kind::kMixture:
      j["kind"] = "mixture";
      j["weights"] = m.weights();
      j["alphas"] = m.alphas();
      break;
  }
  return j;
}

InterleavingDistribution interleaving_from(const json& j, int p, int q) {
  if (!j.is_object() || !j.contains("kind")) throw std::runtime_error("model: interleaving needs a kind");
  if (j.contains("p") && (j.at("p").get<int>() != p || j.at("q").get<int>() != q)) {
    throw std::runtime_error("model: interleaving sizes disagree with the children");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "table") return InterleavingDistribution::table(p, q, j.at("probs").get<std::vector<double>>());
  if (kind == "biased") return InterleavingDistribution::biased(p, q, j.at("alpha").get<double>());
  if (kind == "mixture") {
    return InterleavingDistribution::mixture(p, q, j.at("weights").get<std::vector<double>>(),
                                             j.at("alphas").get<std::vector<double>>());
  }
  throw std::runtime_error("model: unknown interleaving kind '" + kind + "'");
}

json node_json(const ModelNode& node) {
  json j;
  j["items"] = items_json(node.items);
  if (node.is_leaf()) {
    j["factor"] = {{"probs", node.factor->probs()}};
  } else {
    j["interleaving"] = interleaving_json(*node.interleaving);
    j["children"] = json::array({node_json(node.children[0]), node_json(node.children[1])});
  }
  return j;
}

ModelNode node_from(const json& j) {
  if (!j.is_object() || !j.contains("items")) throw std::runtime_error("model: node needs items");
  std::vector<int> items = items_from(j.at("items"));
  if (j.contains("children")) {
    const json& ch = j.at("children");
    if (!ch.is_array() || ch.size() != 2) throw std::runtime_error("model: nodes have two children");
    ModelNode a = node_from(ch[0]), b = node_from(ch[1]);
    InterleavingDistribution m = interleaving_from(j.at("interleaving"),
                                                   static_cast<int>(a.items.size()),
                                                   static_cast<int>(b.items.size()));
    ModelNode node = ModelNode::split(std::move(m), std::move(a), std::move(b));
    if (node.items != items) throw std::runtime_error("model: children do not cover the node items");
    return node;
  }
  if (!j.contains("factor")) throw std::runtime_error("model: leaf needs a factor");
  std::vector<double> probs = j.at("factor").at("probs").get<std::vector<double>>();
  return ModelNode::leaf(std::move(items),
                         DenseDistribution(static_cast<int>(j.at("items").size()), std::move(probs)));
}

}  // namespace

json model_to_json(const HierarchicalModel& model) {
  return json{{"format", "riffle-model"},
              {"version", kModelFormatVersion},
              {"n", model.n()},
              {"root", node_json(model.root())}};
}

HierarchicalModel model_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", "") != "riffle-model") {
      throw std::runtime_error("model: not a riffle-model document");
    }
    if (!doc.contains("version") || doc.at("version").get<int>() != kModelFormatVersion) {
      throw std::runtime_error("model: unsupported version " +
                               (doc.contains("version") ? doc.at("version").dump() : "none") +
                               ", expected " + std::to_string(kModelFormatVersion));
    }
    HierarchicalModel model(node_from(doc.at("root")));
    if (doc.contains("n") && doc.at("n").get<int>() != model.n()) {
      throw std::runtime_error("model: n disagrees with the root items");
    }
    return model;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model: schema violation: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("model: ") + e.what());
  }
}

void save_model(const std::string& path, const HierarchicalModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << model_to_json(model).dump(2) << "\n";
  if (!out) throw std::runtime_error("error writing " + path);
}

HierarchicalModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  return model_from_json(doc);
}

json tree_to_json(const ItemTree& tree) {
  json j;
  j["items"] = items_json(tree.items);
  if (!tree.is_leaf()) {
    j["children"] = json::array({tree_to_json(tree.children[0]), tree_to_json(tree.children[1])});
  }
  return j;
}

ItemTree tree_from_json(const json& doc) {
  try {
    if (doc.contains("children")) {
      const json& ch = doc.at("children");
      if (!ch.is_array() || ch.size() != 2) throw std::runtime_error("tree: nodes have two children");
      return ItemTree::split(tree_from_json(ch[0]), tree_from_json(ch[1]));
    }
    return ItemTree::leaf(items_from(doc.at("items")));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("tree: schema violation: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Fourier coefficients

json coefficients_to_json(const FourierCoefficients& f) {
  json levels = json::array();
  for (const auto& level : f.levels) {
    std::vector<double> flat;
    flat.reserve(level.matrix.size());
    for (Eigen::Index r = 0; r < level.matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < level.matrix.cols(); ++c) flat.push_back(level.matrix(r, c));
    }
    levels.push_back({{"partition", level.shape},
                      {"dimension", level.matrix.rows()},
                      {"matrix", flat}});
  }
  json doc{{"format", "riffle-fourier"}, {"version", 1}, {"n", f.n}, {"levels", levels}};
  doc["truncation"] = f.truncation ? json(*f.truncation) : json(nullptr);
  return doc;
}

FourierCoefficients coefficients_from_json(const json& doc) {
  try {
    if (doc.value("format", "") != "riffle-fourier" || doc.value("version", 0) != 1) {
      throw std::runtime_error("coefficients: not a version-1 riffle-fourier document");
    }
    FourierCoefficients f;
    f.n = doc.at("n").get<int>();
    if (!doc.at("truncation").is_null()) f.truncation = doc.at("truncation").get<int>();
    for (const auto& level : doc.at("levels")) {
      const int d = level.at("dimension").get<int>();
      std::vector<double> flat = level.at("matrix").get<std::vector<double>>();
      if (flat.size() != static_cast<std::size_t>(d) * d) {
        throw std::runtime_error("coefficients: matrix size disagrees with dimension");
      }
      Eigen::MatrixXd m(d, d);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) m(r, c) = flat[static_cast<std::size_t>(r) * d + c];
      }
      f.levels.push_back({level.at("partition").get<Partition>(), std::move(m)});
    }
    return f;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("coefficients: schema violation: ") + e.what());
  }
}

}  // namespace riffle
