// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "s2l/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "s2l/baselines.hpp"
#include "s2l/digest.hpp"
#include "s2l/error.hpp"
#include "s2l/kernels.hpp"
#include "s2l/kmeans.hpp"
#include "s2l/manifest.hpp"
#include "s2l/random.hpp"
#include "s2l/report.hpp"
#include "s2l/selection.hpp"
#include "s2l/synthgen.hpp"
#include "s2l/trajectory.hpp"

namespace s2l::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Usage problems found after parsing (conflicting or missing flags).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  int workers = 1;
  std::string isa = "auto";
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  auto* out = cmd->add_option("--out", c.out, "Output path");
  if (out_required) out->required();
  cmd->add_option("--workers", c.workers, "Worker threads (never changes results)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--isa", c.isa, "Kernel variant: auto|scalar|avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();
}

void apply_isa(const Common& c) {
  if (c.isa == "scalar") {
    kernels::set_active_isa(kernels::Isa::kScalar);
  } else if (c.isa == "avx2") {
    kernels::set_active_isa(kernels::Isa::kAvx2);
  } else {
    kernels::set_active_isa(kernels::detect_isa());
  }
}

TrajectoryFormat pick_format(const std::string& flag, const std::string& path) {
  return flag.empty() ? format_from_path(path) : parse_format(flag);
}

std::string features_digest(const FeatureMatrix& features) {
  std::ostringstream os;
  write_features_binary(features, os);
  Sha256 h;
  h.update(os.str());
  const auto d = h.finish();
  return to_hex(d);
}

std::string short_digest(const std::string& hex) { return hex.substr(0, 16); }

// ---- synth ----

struct SynthArgs {
  Common common;
  std::string templates;
  std::size_t length = 8;
  std::string format;
  std::string labels_out;
};

int do_synth(const SynthArgs& a, std::ostream& out) {
  const auto templates = load_templates(a.templates);
  const auto data = generate(templates, a.length, a.common.seed, a.common.workers);
  write_trajectories(data.store, a.common.out, pick_format(a.format, a.common.out));
  if (!a.labels_out.empty()) {
    std::ofstream lab(a.labels_out);
    if (!lab) throw IoError("cannot open '" + a.labels_out + "' for writing");
    lab << "id\tsource\ttemplate\n";
    for (std::size_t i = 0; i < data.store.size(); ++i) {
      lab << data.store.ids()[i] << '\t' << data.store.sources()[i] << '\t'
          << templates[data.labels[i]].name << '\n';
    }
  }
  ordered_json cfg;
  cfg["tool"] = "synth";
  cfg["length"] = a.length;
  cfg["seed"] = a.common.seed;
  const std::string digest = config_digest(cfg, store_digest(data.store));
  out << "synth: wrote " << data.store.size() << " trajectories (T=" << a.length << ", "
      << templates.size() << " templates) to " << a.common.out
      << " config_digest=" << short_digest(digest) << "\n";
  return kExitOk;
}

// ---- cluster ----

struct ClusterArgs {
  Common common;
  std::string traj;
  std::string format;
  std::size_t k = 100;
  std::size_t iters = 20;
  std::string normalize = "none";
};

int do_cluster(const ClusterArgs& a, std::ostream& out) {
  const auto store = load_trajectories(a.traj, pick_format(a.format, a.traj));
  KMeansOptions opts{a.k, a.iters, a.common.seed, parse_normalization(a.normalize),
                     a.common.workers};
  const auto model = kmeans_fit(store, opts);
  write_cluster_model(model, a.common.out);
  ordered_json cfg;
  cfg["tool"] = "cluster";
  cfg["k"] = a.k;
  cfg["iters"] = a.iters;
  cfg["seed"] = a.common.seed;
  cfg["normalize"] = a.normalize;
  const std::string digest = config_digest(cfg, store_digest(store));
  out << "cluster: k=" << model.k << " n=" << store.size() << " iters_run=" << model.iters_run
      << " objective=" << model.objective << " -> " << a.common.out
      << " config_digest=" << short_digest(digest) << "\n";
  return kExitOk;
}

// ---- select ----

struct SelectArgs {
  Common common;
  std::string traj;
  std::string format;
  std::string config;
  std::size_t budget = 0;
  std::size_t k = 100;
  std::size_t iters = 20;
  bool per_source = false;
  std::string normalize = "none";
  bool no_topup = false;
  std::string model_out;
};

int do_select(const SelectArgs& a, const CLI::App& cmd, std::ostream& out) {
  SelectionConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw IoError("cannot open '" + a.config + "' for reading");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw FormatError(a.config + ": " + e.what());
    }
    cfg.merge_json(j);
  }
  if (cmd.count("--budget")) cfg.budget = a.budget;
  if (cmd.count("--k")) cfg.k = a.k;
  if (cmd.count("--iters")) cfg.kmeans_iters = a.iters;
  if (cmd.count("--seed") || a.config.empty()) cfg.seed = a.common.seed;
  if (cmd.count("--per-source")) cfg.per_source = true;
  if (cmd.count("--normalize")) cfg.normalize = parse_normalization(a.normalize);
  if (cmd.count("--no-topup")) cfg.topup = false;
  if (cfg.budget == 0) throw UsageError("--budget is required (flag or config)");

  const auto store = load_trajectories(a.traj, pick_format(a.format, a.traj));
  const auto result = s2l_run(store, cfg, a.common.workers);
  write_manifest(result.manifest, a.common.out);
  if (!a.model_out.empty()) write_cluster_model(combined_model(result, store), a.model_out);
  out << "select: " << result.manifest.entries.size() << " of " << store.size()
      << " examples (budget=" << cfg.budget << ", k=" << cfg.k
      << ", per_source=" << (cfg.per_source ? "true" : "false") << ") -> " << a.common.out
      << " config_digest=" << short_digest(result.manifest.config_digest) << "\n";
  return kExitOk;
}

// ---- baseline ----

struct BaselineArgs {
  Common common;
  std::string method;
  std::string traj;
  std::string format;
  std::string features;
  std::size_t budget = 0;
  long early = 0;
  long late = -1;
  bool per_source = false;
};

std::vector<std::size_t> run_method(const BaselineArgs& a, const TrajectoryStore* store,
                                    const FeatureMatrix* features, std::size_t budget,
                                    std::uint64_t seed) {
  if (a.method == "random") {
    const std::size_t n = store ? store->size() : features->size();
    return random_select(n, budget, seed);
  }
  if (a.method == "facility-location") {
    return facility_location_select(*features, budget, a.common.workers).order;
  }
  const std::size_t t = store->length();
  const std::size_t late = a.late < 0 ? t - 1 : static_cast<std::size_t>(a.late);
  const auto early = static_cast<std::size_t>(a.early);
  if (a.method == "least-confidence") {
    return least_confidence_select(derive_scalar(*store, Stat::kConfidence, early, late), budget);
  }
  if (a.method == "middle-perplexity") {
    return middle_perplexity_select(derive_scalar(*store, Stat::kPerplexity, early, late), budget);
  }
  return high_learnability_select(derive_scalar(*store, Stat::kLearnability, early, late),
                                  budget);
}

int do_baseline(const BaselineArgs& a, std::ostream& out) {
  const bool fl = a.method == "facility-location";
  if (fl && a.features.empty()) throw UsageError("--features is required for facility-location");
  if (!fl && a.method != "random" && a.traj.empty()) {
    throw UsageError("--traj is required for " + a.method);
  }
  if (a.method == "random" && a.traj.empty() && a.features.empty()) {
    throw UsageError("random needs --traj or --features to know the example ids");
  }
  if (a.early < 0) throw UsageError("--early must be >= 0");

  std::optional<TrajectoryStore> store;
  std::optional<FeatureMatrix> features;
  if (!a.traj.empty()) store.emplace(load_trajectories(a.traj, pick_format(a.format, a.traj)));
  if (!a.features.empty()) features.emplace(load_features(a.features));

  // Example universe: the feature rows for facility location, else the store.
  const std::vector<std::string>& ids = (fl || !store) ? features->ids() : store->ids();
  std::map<std::string, std::string, std::less<>> source_of;
  if (store) {
    for (std::size_t i = 0; i < store->size(); ++i) source_of[store->ids()[i]] = store->sources()[i];
  }
  auto source_for = [&](const std::string& id) -> std::string {
    const auto it = source_of.find(id);
    return it == source_of.end() ? std::string() : it->second;
  };

  SelectionManifest manifest;
  manifest.tool = a.method;
  manifest.seed = a.common.seed;
  manifest.budget = a.budget;
  manifest.k = 0;
  ordered_json cfg;
  cfg["tool"] = a.method;
  cfg["budget"] = a.budget;
  cfg["seed"] = a.common.seed;
  cfg["early"] = a.early;
  cfg["late"] = a.late;
  cfg["per_source"] = a.per_source;
  std::string input = store ? store_digest(*store) : "";
  if (features) input += features_digest(*features);
  manifest.config_digest = config_digest(cfg, input);

  auto emit = [&](const std::vector<std::size_t>& picks, const std::vector<std::size_t>& rows) {
    for (std::size_t p : picks) {
      const std::string& id = ids[rows.empty() ? p : rows[p]];
      manifest.entries.push_back({id, source_for(id), -1, Round::kMain});
    }
  };

  if (!a.per_source) {
    emit(run_method(a, store ? &*store : nullptr, features ? &*features : nullptr, a.budget,
                    a.common.seed),
         {});
  } else {
    // Group the example universe by source tag, first appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>, std::less<>> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      auto src = source_for(ids[i]);
      auto [it, inserted] = groups.try_emplace(src);
      if (inserted) order.push_back(src);
      it->second.push_back(i);
    }
    std::vector<std::size_t> sizes;
    for (const auto& s : order) sizes.push_back(groups[s].size());
    const auto budgets = allocate_budgets(sizes, a.budget);
    for (std::size_t s = 0; s < order.size(); ++s) {
      if (budgets[s] == 0) continue;
      const auto& rows = groups[order[s]];
      const std::uint64_t seed = derive_seed(a.common.seed, order[s]);
      std::optional<TrajectoryStore> sub_store;
      std::optional<FeatureMatrix> sub_features;
      if (fl || !store) {
        std::vector<std::string> sub_ids;
        std::vector<float> values;
        for (std::size_t r : rows) {
          sub_ids.push_back(features->ids()[r]);
          const auto v = features->row(r);
          values.insert(values.end(), v.begin(), v.end());
        }
        sub_features.emplace(std::move(sub_ids), std::move(values), features->dim());
      } else {
        sub_store.emplace(select_rows(*store, rows));
      }
      emit(run_method(a, sub_store ? &*sub_store : nullptr,
                      sub_features ? &*sub_features : nullptr, budgets[s], seed),
           rows);
    }
  }
  write_manifest(manifest, a.common.out);
  out << "baseline " << a.method << ": " << manifest.entries.size() << " of " << ids.size()
      << " examples -> " << a.common.out
      << " config_digest=" << short_digest(manifest.config_digest) << "\n";
  return kExitOk;
}

// ---- report ----

struct ReportArgs {
  Common common;
  std::string model;
  std::string manifest;
  std::string traj;
  std::string format;
  bool text = false;
};

int do_report(const ReportArgs& a, std::ostream& out) {
  if (!a.manifest.empty() && a.traj.empty()) {
    throw UsageError("--manifest needs --traj for the full-dataset distribution");
  }
  const auto model = read_cluster_model(a.model);
  ordered_json doc;
  std::string text;
  const auto creport = cluster_report(model);
  doc["clusters"] = to_json(creport);
  text = render_text(creport);
  if (!a.manifest.empty()) {
    const auto store = load_trajectories(a.traj, pick_format(a.format, a.traj));
    const auto manifest = read_manifest(a.manifest);
    const auto sreport = selection_report(manifest, store, model);
    doc["selection"] = to_json(sreport);
    text += render_text(sreport);
  }
  const std::string body = a.text ? text : doc.dump(2) + "\n";
  if (a.common.out.empty()) {
    out << body;
  } else {
    std::ofstream f(a.common.out);
    if (!f) throw IoError("cannot open '" + a.common.out + "' for writing");
    f << body;
    out << "report: k=" << model.k << " n=" << model.assignments.size() << " -> "
        << a.common.out << "\n";
  }
  return kExitOk;
}

// ---- convert ----

struct ConvertArgs {
  Common common;
  std::string in;
  std::string from;
  std::string to;
};

int do_convert(const ConvertArgs& a, std::ostream& out) {
  const auto store = load_trajectories(a.in, pick_format(a.from, a.in));
  write_trajectories(store, a.common.out, pick_format(a.to, a.common.out));
  out << "convert: " << store.size() << " x " << store.length() << " " << a.in << " -> "
      << a.common.out << " input_digest=" << short_digest(store_digest(store)) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"s2l: select fine-tuning subsets from reference-model loss trajectories", "s2l"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic trajectory store");
  add_common(synth_cmd, synth.common, true);
  synth_cmd->add_option("--templates", synth.templates, "Template list JSON")->required();
  synth_cmd->add_option("--length", synth.length, "Checkpoints per trajectory (T)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--format", synth.format, "jsonl|binary (default: from extension)");
  synth_cmd->add_option("--labels-out", synth.labels_out, "Write ground-truth labels (TSV)");

  ClusterArgs cluster;
  auto* cluster_cmd = app.add_subcommand("cluster", "Fit k-means to loss trajectories");
  add_common(cluster_cmd, cluster.common, true);
  cluster_cmd->add_option("--traj", cluster.traj, "Trajectory file")->required();
  cluster_cmd->add_option("--format", cluster.format, "jsonl|binary (default: from extension)");
  cluster_cmd->add_option("--k", cluster.k, "Number of clusters")->capture_default_str();
  cluster_cmd->add_option("--iters", cluster.iters, "Lloyd iterations")->capture_default_str();
  cluster_cmd->add_option("--normalize", cluster.normalize, "none|zscore")
      ->check(CLI::IsMember({"none", "zscore"}))
      ->capture_default_str();

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("select", "Cluster trajectories and sample a subset");
  add_common(select_cmd, select.common, true);
  select_cmd->add_option("--traj", select.traj, "Trajectory file")->required();
  select_cmd->add_option("--format", select.format, "jsonl|binary (default: from extension)");
  select_cmd->add_option("--config", select.config, "SelectionConfig JSON; flags win");
  select_cmd->add_option("--budget", select.budget, "Examples to select (required)")
      ->check(CLI::PositiveNumber);
  select_cmd->add_option("--k", select.k, "Number of clusters")->capture_default_str();
  select_cmd->add_option("--iters", select.iters, "Lloyd iterations")->capture_default_str();
  select_cmd->add_flag("--per-source", select.per_source, "Cluster and sample each source");
  select_cmd->add_option("--normalize", select.normalize, "none|zscore")
      ->check(CLI::IsMember({"none", "zscore"}))
      ->capture_default_str();
  select_cmd->add_flag("--no-topup", select.no_topup, "Skip the residual-budget fill");
  select_cmd->add_option("--model-out", select.model_out, "Write the cluster model JSON");

  BaselineArgs baseline;
  auto* baseline_cmd = app.add_subcommand("baseline", "Run a one-shot baseline selector");
  add_common(baseline_cmd, baseline.common, true);
  baseline_cmd->add_option("--method", baseline.method, "Selector")
      ->required()
      ->check(CLI::IsMember({"random", "least-confidence", "middle-perplexity",
                             "high-learnability", "facility-location"}));
  baseline_cmd->add_option("--traj", baseline.traj, "Trajectory file (score-based methods)");
  baseline_cmd->add_option("--format", baseline.format, "jsonl|binary (default: from extension)");
  baseline_cmd->add_option("--features", baseline.features, "Feature file (facility-location)");
  baseline_cmd->add_option("--budget", baseline.budget, "Examples to select")
      ->required()
      ->check(CLI::PositiveNumber);
  baseline_cmd->add_option("--early", baseline.early, "Early checkpoint index (learnability)")
      ->capture_default_str();
  baseline_cmd->add_option("--late", baseline.late, "Late checkpoint index; -1 = last")
      ->capture_default_str();
  baseline_cmd->add_flag("--per-source", baseline.per_source, "Split budget across sources");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Cluster and selection diagnostics");
  add_common(report_cmd, report.common, false);
  report_cmd->add_option("--model", report.model, "Cluster model JSON")->required();
  report_cmd->add_option("--manifest", report.manifest, "Selection manifest");
  report_cmd->add_option("--traj", report.traj, "Trajectory file the model was fit on");
  report_cmd->add_option("--format", report.format, "jsonl|binary (default: from extension)");
  report_cmd->add_flag("--text", report.text, "Plain-text rendering instead of JSON");

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Transcode trajectory files");
  add_common(convert_cmd, convert.common, true);
  convert_cmd->add_option("--in", convert.in, "Input trajectory file")->required();
  convert_cmd->add_option("--from", convert.from, "jsonl|binary (default: from extension)");
  convert_cmd->add_option("--to", convert.to, "jsonl|binary (default: from extension)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) {
      apply_isa(synth.common);
      return do_synth(synth, out);
    }
    if (*cluster_cmd) {
      apply_isa(cluster.common);
      return do_cluster(cluster, out);
    }
    if (*select_cmd) {
      apply_isa(select.common);
      return do_select(select, *select_cmd, out);
    }
    if (*baseline_cmd) {
      apply_isa(baseline.common);
      return do_baseline(baseline, out);
    }
    if (*report_cmd) {
      apply_isa(report.common);
      return do_report(report, out);
    }
    apply_isa(convert.common);
    return do_convert(convert, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace s2l::cli
