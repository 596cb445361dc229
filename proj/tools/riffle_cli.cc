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


// Command line front end: structure learning, parameter fitting, evaluation,
// sampling, marginal tables, Fourier self-checks, bootstrap stability and
// synthetic data.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "riffle/dense_distribution.h"
#include "riffle/fourier.h"
#include "riffle/io.h"
#include "riffle/riffle_model.h"
#include "riffle/structure_learning.h"
#include "riffle/synth.h"

namespace {

using nlohmann::json;
using namespace riffle;

struct Output {
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file.is_open() ? file : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw std::runtime_error("write failed");
  }
  std::ofstream file;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
}

std::string tuple_label(const std::vector<int>& t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "-" : "") + std::to_string(t[i] + 1);
  return s;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return ss.str();
}

struct LearnFlags {
  std::optional<int> k;
  int leaf_cap = 2;
  std::string objective;
  std::string method = "anchors";

  void add(CLI::App* app) {
    app->add_option("--k", k, "Block size peeled at each split (thin chain); omit to search all sizes")
        ->check(CLI::PositiveNumber);
    app->add_option("--leaf-cap", leaf_cap, "Stop splitting at this many items")
        ->check(CLI::Range(1, 1000));
    app->add_option("--objective", objective, "Split objective (default cross with --k, else balanced)")
        ->check(CLI::IsMember({"cross", "balanced"}));
    app->add_option("--method", method, "Partition search")
        ->check(CLI::IsMember({"exhaustive", "anchors"}));
  }

  LearnOptions options() const {
    LearnOptions o;
    if (k) {
      o.mode = LearnOptions::Mode::kThin;
      o.k = *k;
    } else {
      o.mode = LearnOptions::Mode::kGeneral;
    }
    o.leaf_cap = leaf_cap;
    if (!objective.empty()) {
      o.objective = objective == "cross" ? Objective::kCross : Objective::kBalanced;
    }
    o.method = method == "exhaustive" ? SearchMethod::kExhaustive : SearchMethod::kAnchors;
    return o;
  }
};

json items_json(const std::vector<int>& items) {
  json a = json::array();
  for (int x : items) a.push_back(x + 1);
  return a;
}

int run_learn(const std::string& in, const LearnFlags& flags, const std::string& out) {
  SampleSet samples = load_rankings(in);
  LearnedHierarchy h = learn_hierarchy(WeightedRankings::from_samples(samples), flags.options());
  json splits = json::array();
  for (const auto& s : h.splits) {
    splits.push_back({{"items", items_json(s.items)}, {"a", items_json(s.a)}, {"value", s.value}});
  }
  json doc{{"format", "riffle-tree"},
           {"version", 1},
           {"n", samples.n()},
           {"objective", to_string(*h.options.objective)},
           {"method", to_string(h.options.method)},
           {"display", h.tree.to_string()},
           {"tree", tree_to_json(h.tree)},
           {"splits", splits}};
  Output o(out);
  o.stream() << doc.dump(2) << "\n";
  o.finish();
  return 0;
}

int run_fit(const std::string& in, const std::string& tree_path, const std::string& kind,
            double smoothing, const std::string& out) {
  SampleSet samples = load_rankings(in);
  json doc = load_json(tree_path);
  ItemTree tree = tree_from_json(doc.contains("tree") ? doc.at("tree") : doc);
  InterleavingFit fit = kind == "biased"    ? InterleavingFit::kBiased
                        : kind == "mixture" ? InterleavingFit::kMixture
                                            : InterleavingFit::kTable;
  HierarchicalModel model =
      fit_model(tree, WeightedRankings::from_samples(samples), smoothing, fit);
  Output o(out);
  o.stream() << model_to_json(model).dump(2) << "\n";
  o.finish();
  return 0;
}

int run_evaluate(const std::string& model_path, const std::string& test, const std::string& out) {
  HierarchicalModel model = load_model(model_path);
  SampleSet samples = load_rankings(test);
  if (samples.n() != model.n()) {
    throw std::runtime_error("model has " + std::to_string(model.n()) + " items, test data has " +
                             std::to_string(samples.n()));
  }
  if (samples.total() == 0) throw std::runtime_error(test + ": no records");
  double sum = 0.0;
  for (const auto& [s, c] : samples.records()) sum += static_cast<double>(c) * model.log_prob(s);
  Output o(out);
  o.stream() << "rankings,mean_log_likelihood\n"
             << samples.total() << "," << fmt(sum / static_cast<double>(samples.total())) << "\n";
  o.finish();
  return 0;
}

int run_sample(const std::string& model_path, std::int64_t m, std::uint64_t seed,
               const std::string& out) {
  HierarchicalModel model = load_model(model_path);
  std::mt19937_64 rng(seed);
  SampleSet samples(model.n());
  for (const Ranking& s : model.sample(rng, m)) samples.add(s);
  Output o(out);
  write_rankings(o.stream(), samples, Notation::kOrdering, false);
  o.finish();
  return 0;
}

int run_marginals(const std::string& in, int order, bool normalize, const std::string& out) {
  SampleSet samples = load_rankings(in);
  KthOrderMarginals t = kth_order_counts(samples, order);
  if (normalize) {
    if (samples.total() == 0) throw std::runtime_error(in + ": no records");
    t.table /= static_cast<double>(samples.total());
  }
  auto tuples = ordered_tuples(samples.n(), order);
  Output o(out);
  std::ostream& os = o.stream();
  os << (order == 1 ? "rank" : "ranks");
  for (const auto& items : tuples) os << ",item_" << tuple_label(items);
  os << "\n";
  for (std::size_t r = 0; r < tuples.size(); ++r) {
    os << tuple_label(tuples[r]);
    for (std::size_t c = 0; c < tuples.size(); ++c) {
      os << "," << fmt(t.table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    os << "\n";
  }
  o.finish();
  return 0;
}

int run_fourier_check(int n, double alpha, std::optional<int> order, const std::string& out) {
  if (n < 2) throw std::invalid_argument("--n must be at least 2");
  if (n > kMaxFourierN) {
    throw std::length_error("--n " + std::to_string(n) + " exceeds the Fourier cap " +
                            std::to_string(kMaxFourierN));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("--alpha must lie in [0, 1]");
  Output o(out);
  std::ostream& os = o.stream();
  os << "p,q,max_abs_diff\n";
  double worst = 0.0;
  for (int p = 1; p < n; ++p) {
    FourierCoefficients dp = rifflehat(p, n - p, alpha, order);
    FourierCoefficients direct =
        interleaving_transform(InterleavingDistribution::biased(p, n - p, alpha), order);
    const double d = dp.max_abs_diff(direct);
    worst = std::max(worst, d);
    os << p << "," << n - p << "," << fmt(d) << "\n";
  }
  os << "max_deviation," << fmt(worst) << "\n";
  o.finish();
  if (worst >= 1e-9) {
    std::cerr << "error: max deviation " << worst << " exceeds 1e-9\n";
    return 2;
  }
  return 0;
}

std::vector<std::int64_t> parse_sizes(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty() || v < 1) {
      throw std::invalid_argument("--sizes expects positive integers, got '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

int run_bootstrap(const std::string& in, int resamples, const std::string& sizes,
                  const LearnFlags& flags, bool without_replacement, std::uint64_t seed,
                  const std::string& out) {
  SampleSet samples = load_rankings(in);
  BootstrapOptions opts;
  opts.resamples = resamples;
  opts.sizes = sizes.empty() ? std::vector<std::int64_t>{samples.total()} : parse_sizes(sizes);
  opts.learn = flags.options();
  opts.with_replacement = !without_replacement;
  std::mt19937_64 rng(seed);
  BootstrapReport report = bootstrap_stability(samples, opts, rng);
  Output o(out);
  std::ostream& os = o.stream();
  os << "size,resamples,objective,measure,fraction\n";
  for (const auto& row : report.rows) {
    os << row.size << "," << row.resamples << "," << to_string(row.objective) << ","
       << row.measure << "," << fmt(row.fraction) << "\n";
  }
  o.finish();
  return 0;
}

int run_synth(const SynthSpec& spec, const std::string& out, const std::string& model_out) {
  SynthResult r = synth(spec);
  if (!model_out.empty()) save_model(model_out, r.model);
  Output o(out);
  write_rankings(o.stream(), r.samples, Notation::kOrdering, false);
  o.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riffle: riffled independence models over rankings"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string in, out, model_path, test_path, tree_path, sizes;
  std::string interleaving = "table", structure = "thin";
  std::uint64_t seed = 0;
  std::int64_t m = 1000;
  int order = 1, n = 5, resamples = 200;
  std::optional<int> fourier_order;
  double alpha = 0.5, smoothing = 0.0;
  bool normalize = false, without_replacement = false;
  LearnFlags learn;

  auto* learn_cmd = app.add_subcommand("learn-structure", "Learn a hierarchy from rankings (JSON)");
  learn_cmd->add_option("--in", in, "Ranking file")->required();
  learn_cmd->add_option("--out", out, "Output path (default stdout)");
  learn.add(learn_cmd);

  auto* fit_cmd = app.add_subcommand("fit-params", "Fit model parameters for a given tree (JSON)");
  fit_cmd->add_option("--in", in, "Ranking file")->required();
  fit_cmd->add_option("--tree", tree_path, "Tree JSON (learn-structure output)")->required();
  fit_cmd->add_option("--interleaving", interleaving, "Interleaving family")
      ->check(CLI::IsMember({"table", "biased", "mixture"}));
  fit_cmd->add_option("--smoothing", smoothing, "Pseudocount per table cell")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* eval_cmd = app.add_subcommand("evaluate", "Mean log-likelihood of test rankings (CSV)");
  eval_cmd->add_option("--model", model_path, "Model JSON")->required();
  eval_cmd->add_option("--test", test_path, "Ranking file")->required();
  eval_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* sample_cmd = app.add_subcommand("sample", "Draw rankings from a model");
  sample_cmd->add_option("--model", model_path, "Model JSON")->required();
  sample_cmd->add_option("--m", m, "Number of rankings")->check(CLI::NonNegativeNumber);
  sample_cmd->add_option("--seed", seed, "Random seed");
  sample_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* marg_cmd = app.add_subcommand("marginals", "Order-k marginal counts (CSV)");
  marg_cmd->add_option("--in", in, "Ranking file")->required();
  marg_cmd->add_option("--order", order, "Marginal order")->check(CLI::PositiveNumber);
  marg_cmd->add_flag("--normalize", normalize, "Divide by the number of rankings");
  marg_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* fc_cmd = app.add_subcommand("fourier-check",
                                    "Compare the recursive biased riffle transform with a direct one");
  fc_cmd->add_option("--n", n, "Number of items")->required();
  fc_cmd->add_option("--alpha", alpha, "Bias parameter");
  fc_cmd->add_option("--order", fourier_order, "Keep only marginal levels of this order");
  fc_cmd->add_option("--out", out, "Output path (default stdout)");

  auto* boot_cmd = app.add_subcommand("bootstrap", "Structure stability under resampling (CSV)");
  boot_cmd->add_option("--in", in, "Ranking file")->required();
  boot_cmd->add_option("--bootstrap-B", resamples, "Resamples per size")->check(CLI::PositiveNumber);
  boot_cmd->add_option("--sizes", sizes, "Comma separated sample sizes (default: data size)");
  boot_cmd->add_flag("--without-replacement", without_replacement, "Resample without replacement");
  boot_cmd->add_option("--seed", seed, "Random seed");
  boot_cmd->add_option("--out", out, "Output path (default stdout)");
  learn.add(boot_cmd);

  SynthSpec spec;
  std::string model_out;
  auto* synth_cmd = app.add_subcommand("synth", "Random riffle independent model and samples");
  synth_cmd->add_option("--structure", structure, "Tree shape")
      ->check(CLI::IsMember({"thin", "balanced"}));
  synth_cmd->add_option("--n", spec.n, "Number of items")->check(CLI::Range(2, 64));
  synth_cmd->add_option("--k", spec.k, "Thin block size or balanced leaf size")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--m", spec.m, "Number of rankings")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--seed", spec.seed, "Random seed");
  synth_cmd->add_option("--concentration", spec.concentration, "Dirichlet concentration of leaves")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", out, "Ranking output path (default stdout)");
  synth_cmd->add_option("--model-out", model_out, "Ground truth model JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*learn_cmd) return run_learn(in, learn, out);
    if (*fit_cmd) return run_fit(in, tree_path, interleaving, smoothing, out);
    if (*eval_cmd) return run_evaluate(model_path, test_path, out);
    if (*sample_cmd) return run_sample(model_path, m, seed, out);
    if (*marg_cmd) return run_marginals(in, order, normalize, out);
    if (*fc_cmd) return run_fourier_check(n, alpha, fourier_order, out);
    if (*boot_cmd) {
      return run_bootstrap(in, resamples, sizes, learn, without_replacement, seed, out);
    }
    if (*synth_cmd) {
      spec.structure = parse_structure(structure);
      return run_synth(spec, out, model_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
