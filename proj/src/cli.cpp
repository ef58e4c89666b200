#include "slnp/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "slnp/data_io.hpp"
#include "slnp/errors.hpp"
#include "slnp/eval.hpp"
#include "slnp/slnp.hpp"

namespace slnp {

namespace fs = std::filesystem;

std::vector<std::uint64_t> CliConfig::seeds() const {
  std::vector<std::uint64_t> out;
  out.reserve(seed_count);
  for (int i = 0; i < seed_count; ++i) out.push_back(seed_base + i);
  return out;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(part);
      part.clear();
    } else {
      part += ch;
    }
  }
  parts.push_back(part);
  return parts;
}

// "2,3,4" or "2..9" (inclusive).
std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  const std::size_t dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int v = lo; v <= hi; ++v) values.push_back(v);
    } else {
      for (const std::string& part : split(text, ','))
        if (!part.empty()) values.push_back(std::stoi(part));
    }
  } catch (const std::exception&) {
    throw UsageError("cannot parse value list '" + text + "'");
  }
  return values;
}

// Existing path as given, else under $SLNP_DATA_DIR, else as given (the
// loader reports the miss).
std::string resolve_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* root = std::getenv("SLNP_DATA_DIR")) {
    const fs::path candidate = fs::path(root) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

std::string find_idx_file(const fs::path& dir, const std::string& kind,
                          const std::string& suffix) {
  for (const char* sep : {"-", "."}) {
    const fs::path p = dir / ("train-" + kind + sep + suffix);
    if (fs::exists(p)) return p.string();
  }
  throw FileNotFound("no train-" + kind + "-" + suffix + " under " +
                     dir.string());
}

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "both") return OutputFormat::both;
  throw UsageError("unknown format '" + name + "' (expected csv, json, both)");
}

}  // namespace

LabeledDataset parse_dataset_spec(const std::string& spec) {
  const std::vector<std::string> tokens = split(spec, ':');
  const std::string& kind = tokens[0];

  if (kind == "toy") {
    int n = 100;
    double noise = 1.0;
    std::uint64_t seed = 0;
    if (tokens.size() > 1 && !tokens[1].empty()) {
      const std::vector<std::string> args = split(tokens[1], ',');
      try {
        if (args.size() > 0 && !args[0].empty()) n = std::stoi(args[0]);
        if (args.size() > 1) noise = std::stod(args[1]);
        if (args.size() > 2) seed = std::stoull(args[2]);
      } catch (const std::exception&) {
        throw UsageError("cannot parse toy spec '" + spec + "'");
      }
    }
    return synth_two_feature_toy(n, noise, seed);
  }

  if (kind == "csv") {
    if (tokens.size() < 2) throw UsageError("csv spec needs a path");
    const std::string label = tokens.size() > 2 ? tokens[2] : "label";
    return load_csv(resolve_path(tokens[1]), label);
  }

  if (kind == "idx") {
    if (tokens.size() < 2) throw UsageError("idx spec needs a directory");
    int pool = 1;
    if (tokens.size() > 2) {
      if (tokens[2].rfind("pool", 0) != 0)
        throw UsageError("unknown idx option '" + tokens[2] + "'");
      try {
        pool = std::stoi(tokens[2].substr(4));
      } catch (const std::exception&) {
        throw UsageError("cannot parse pooling factor in '" + tokens[2] + "'");
      }
    }
    const fs::path dir = resolve_path(tokens[1]);
    const std::string images = find_idx_file(dir, "images", "idx3-ubyte");
    const std::string labels = find_idx_file(dir, "labels", "idx1-ubyte");
    ImageShape shape;
    LabeledDataset ds = load_idx(images, labels, &shape);
    if (pool > 1) ds = pool_images(ds, shape, pool);
    return ds;
  }

  if (kind == "pgm") {
    if (tokens.size() < 2) throw UsageError("pgm spec needs a manifest path");
    std::optional<ImageShape> resize;
    if (tokens.size() > 2) {
      const std::vector<std::string> wh = split(tokens[2], 'x');
      if (wh.size() != 2)
        throw UsageError("pgm resize must look like WxH, got '" + tokens[2] + "'");
      try {
        resize = ImageShape{std::stoi(wh[1]), std::stoi(wh[0])};
      } catch (const std::exception&) {
        throw UsageError("cannot parse pgm resize '" + tokens[2] + "'");
      }
    }
    return load_pgm_manifest(parse_manifest(resolve_path(tokens[1])), resize);
  }

  throw UsageError("unknown dataset kind '" + kind +
                   "' (expected toy, csv, idx, or pgm)");
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

void emit_similarity_evolution(const TrainTrace& trace,
                               const std::string& out_path) {
  if (!trace.watch)
    throw NoWatchedSample("trace carries no watched similarity snapshots");
  const WatchTrace& watch = *trace.watch;

  std::ostringstream evo;
  evo << "iter,neighbor_index,similarity\n";
  for (std::size_t p = 0; p < watch.snapshots.size(); ++p)
    for (int j = 0; j < watch.snapshots[p].size(); ++j)
      evo << p << ',' << j << ',' << format_double(watch.snapshots[p][j]) << '\n';
  write_file_atomic(out_path, evo.str());

  std::ostringstream heat;
  heat << "neighbor_index,similarity\n";
  for (int j = 0; j < watch.heat_row.size(); ++j)
    heat << j << ',' << format_double(watch.heat_row[j]) << '\n';
  fs::path companion(out_path);
  const std::string stem = companion.stem().string() + "_heat";
  companion.replace_filename(stem + companion.extension().string());
  write_file_atomic(companion.string(), heat.str());
}

namespace {

void apply_json_config(CliConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("bad config " + path + ": " + e.what());
  }
  try {
    if (j.contains("dataset")) cfg.dataset = j["dataset"].get<std::string>();
    if (j.contains("methods")) {
      if (j["methods"].is_array())
        cfg.methods = j["methods"].get<std::vector<std::string>>();
      else
        cfg.methods = split(j["methods"].get<std::string>(), ',');
    }
    if (j.contains("k")) cfg.train.k = j["k"].get<int>();
    if (j.contains("d")) cfg.train.d = j["d"].get<int>();
    if (j.contains("d_pca")) {
      const int v = j["d_pca"].get<int>();
      cfg.train.d_pca = v > 0 ? std::optional<int>(v) : std::nullopt;
    }
    if (j.contains("n_per_class")) cfg.n_per_class = j["n_per_class"].get<int>();
    if (j.contains("seeds")) cfg.seed_count = j["seeds"].get<int>();
    if (j.contains("seed_base")) cfg.seed_base = j["seed_base"].get<std::uint64_t>();
    if (j.contains("max_iters")) cfg.train.max_iters = j["max_iters"].get<int>();
    if (j.contains("rel_tol")) cfg.train.rel_tol = j["rel_tol"].get<double>();
    if (j.contains("include_self"))
      cfg.train.include_self = j["include_self"].get<bool>();
    if (j.contains("ridge")) cfg.train.ridge = j["ridge"].get<double>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("format")) cfg.format = parse_format(j["format"].get<std::string>());
    if (j.contains("axis")) cfg.axis = j["axis"].get<std::string>();
    if (j.contains("values")) {
      if (j["values"].is_array())
        cfg.values = j["values"].get<std::vector<int>>();
      else
        cfg.values = parse_int_list(j["values"].get<std::string>());
    }
    if (j.contains("watch_class")) cfg.watch_class = j["watch_class"].get<int>();
    if (j.contains("watch_sample")) cfg.watch_sample = j["watch_sample"].get<int>();
    if (j.contains("noise_scale")) cfg.noise_scale = j["noise_scale"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("bad config value in " + path + ": " + e.what());
  }
}

void write_outputs(const CliConfig& cfg, const std::string& name,
                   const std::vector<ExperimentReport>& reports) {
  const fs::path dir(cfg.out_dir);
  if (cfg.format == OutputFormat::csv || cfg.format == OutputFormat::both)
    write_file_atomic((dir / (name + ".csv")).string(), reports_to_csv(reports));
  if (cfg.format == OutputFormat::json || cfg.format == OutputFormat::both)
    write_file_atomic((dir / (name + ".json")).string(), reports_to_json(reports));
}

void write_trace_outputs(const CliConfig& cfg, const TrainTrace& trace) {
  const fs::path dir(cfg.out_dir);
  if (cfg.format == OutputFormat::csv || cfg.format == OutputFormat::both)
    write_file_atomic((dir / "trace.csv").string(), trace_to_csv(trace));
  if (cfg.format == OutputFormat::json || cfg.format == OutputFormat::both)
    write_file_atomic((dir / "trace.json").string(), trace_to_json(trace));
}

ExperimentReport single_split_report(const CliConfig& cfg, Method method,
                                     const LabeledDataset& ds,
                                     TrainTrace* trace_out) {
  const std::uint64_t seed = cfg.seed_base;
  Split split = subsample_per_class(ds, cfg.n_per_class, seed);
  TrainConfig tc = cfg.train;
  tc.seed = seed;

  ProjectionModel model;
  if (method == Method::slnp && trace_out) {
    FitResult result = fit(split.train, tc);
    *trace_out = std::move(result.trace);
    model = std::move(result.model);
  } else {
    model = fit_method(split.train, method, tc);
  }

  ExperimentReport report;
  report.method = method_name(method);
  report.n_per_class = cfg.n_per_class;
  report.k = tc.k;
  report.d_pca = tc.d_pca.value_or(0);
  report.d = tc.d;
  report.seeds = {seed};
  const Eigen::MatrixXd train_emb = transform(model, split.train.features);
  const Eigen::MatrixXd test_emb = transform(model, split.test.features);
  const std::vector<int> predicted =
      knn_classify(train_emb, split.train.labels, test_emb);
  report.per_seed_rate = {recognition_rate(predicted, split.test.labels)};
  report.mean_rate = report.per_seed_rate[0];
  report.std_rate = 0;
  return report;
}

int cmd_train(const CliConfig& cfg) {
  const LabeledDataset ds = parse_dataset_spec(cfg.dataset);
  const Method method = parse_method(cfg.methods.at(0));
  TrainTrace trace;
  ExperimentReport report = single_split_report(
      cfg, method, ds, method == Method::slnp ? &trace : nullptr);
  if (method == Method::slnp) {
    write_trace_outputs(cfg, trace);
    report.trace_ref =
        (fs::path(cfg.out_dir) /
         (cfg.format == OutputFormat::json ? "trace.json" : "trace.csv"))
            .string();
  }
  write_outputs(cfg, "report", {report});
  std::cout << report.method << " rate " << format_double(report.mean_rate)
            << " (n_per_class " << cfg.n_per_class << ", seed " << cfg.seed_base
            << ")\n";
  return 0;
}

int cmd_compare(const CliConfig& cfg) {
  const LabeledDataset ds = parse_dataset_spec(cfg.dataset);
  std::vector<ExperimentReport> reports;
  for (const std::string& name : cfg.methods)
    reports.push_back(run_experiment(ds, parse_method(name), cfg.train,
                                     cfg.n_per_class, cfg.seeds()));
  write_outputs(cfg, "compare", reports);
  for (const auto& r : reports)
    std::cout << r.method << " mean " << format_double(r.mean_rate) << " std "
              << format_double(r.std_rate) << '\n';
  return 0;
}

int cmd_sweep(const CliConfig& cfg) {
  const LabeledDataset ds = parse_dataset_spec(cfg.dataset);
  const std::vector<ExperimentReport> reports =
      sweep(ds, parse_method(cfg.methods.at(0)), cfg.train, cfg.n_per_class,
            parse_sweep_axis(cfg.axis), cfg.values, cfg.seeds());
  write_outputs(cfg, "sweep", reports);
  for (const auto& r : reports)
    std::cout << r.method << " k=" << r.k << " d=" << r.d << " n="
              << r.n_per_class << " mean " << format_double(r.mean_rate) << '\n';
  return 0;
}

int cmd_trace(const CliConfig& cfg) {
  const LabeledDataset ds = parse_dataset_spec(cfg.dataset);
  if (parse_method(cfg.methods.at(0)) != Method::slnp)
    throw UsageError("trace applies to the slnp method only");
  Split split = subsample_per_class(ds, cfg.n_per_class, cfg.seed_base);
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed_base;
  const FitResult result =
      fit(split.train, tc, WatchSpec{cfg.watch_class, cfg.watch_sample});
  write_trace_outputs(cfg, result.trace);
  emit_similarity_evolution(
      result.trace,
      (fs::path(cfg.out_dir) / "similarity_evolution.csv").string());
  std::cout << "traced " << result.trace.records.size() << " iterations ("
            << (result.trace.converged ? "converged" : "max_iters reached")
            << ")\n";
  return 0;
}

int cmd_toy(const CliConfig& cfg) {
  const LabeledDataset ds =
      synth_two_feature_toy(cfg.n_per_class, cfg.noise_scale, cfg.seed_base);
  const std::string path = (fs::path(cfg.out_dir) / "toy.csv").string();
  write_file_atomic(path, dataset_to_csv(ds));
  std::cout << "wrote " << ds.size() << " samples to " << path << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CliConfig cfg;

  // The config file seeds the defaults; explicit flags then override it.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    try {
      if (arg == "--config" && i + 1 < argc)
        apply_json_config(cfg, argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0)
        apply_json_config(cfg, arg.substr(9));
    } catch (const UsageError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    } catch (const DataError& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }

  CLI::App app{"Supervised dimensionality reduction with jointly learned "
               "neighbor weights"};
  app.require_subcommand(1);

  std::string methods_arg, format_arg, values_arg, config_arg;
  int d_pca_arg = cfg.train.d_pca.value_or(0);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--dataset", cfg.dataset,
                    "Dataset spec: toy[:...], csv:path[:label], "
                    "idx:dir[:poolF], pgm:manifest[:WxH]");
    sub->add_option("--methods", methods_arg, "Comma list: slnp,pca,lda,lpp,lfda");
    sub->add_option("--k", cfg.train.k, "Neighbor count");
    sub->add_option("--d", cfg.train.d, "Embedded dimension");
    sub->add_option("--d-pca", d_pca_arg, "PCA pre-reduction dimension (0 = off)");
    sub->add_option("--n-per-class", cfg.n_per_class, "Training samples per class");
    sub->add_option("--seeds", cfg.seed_count, "Number of split seeds");
    sub->add_option("--seed-base", cfg.seed_base, "First split seed");
    sub->add_option("--max-iters", cfg.train.max_iters, "Training iteration cap");
    sub->add_option("--rel-tol", cfg.train.rel_tol, "Relative objective stop");
    sub->add_flag("--include-self,!--no-include-self", cfg.train.include_self,
                  "Count each sample among its own neighbor candidates");
    sub->add_option("--out", cfg.out_dir, "Output directory");
    sub->add_option("--format", format_arg, "csv, json, or both");
    sub->add_option("--config", config_arg, "JSON config file (flags override)");
    return sub;
  };

  add_common(app.add_subcommand("train", "Fit one method on one split"));
  add_common(app.add_subcommand("compare", "Run methods over seeded splits"));
  CLI::App* sweep_cmd =
      add_common(app.add_subcommand("sweep", "Vary one parameter"));
  sweep_cmd->add_option("--axis", cfg.axis, "k, d, or n-per-class");
  sweep_cmd->add_option("--values", values_arg, "Comma list or lo..hi range");
  CLI::App* trace_cmd = add_common(
      app.add_subcommand("trace", "Record per-iteration training state"));
  trace_cmd->add_option("--watch-class", cfg.watch_class,
                        "Class of the watched similarity row");
  trace_cmd->add_option("--watch-sample", cfg.watch_sample,
                        "Within-class sample of the watched row");
  CLI::App* toy_cmd = add_common(
      app.add_subcommand("toy", "Write the synthetic two-feature dataset"));
  toy_cmd->add_option("--noise", cfg.noise_scale, "Noise amplitude scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (!methods_arg.empty()) cfg.methods = split(methods_arg, ',');
    if (!format_arg.empty()) cfg.format = parse_format(format_arg);
    if (!values_arg.empty()) cfg.values = parse_int_list(values_arg);
    cfg.train.d_pca = d_pca_arg > 0 ? std::optional<int>(d_pca_arg) : std::nullopt;
    cfg.command = app.get_subcommands().at(0)->get_name();
    if (cfg.dataset.empty() && cfg.command != "toy")
      throw UsageError("--dataset is required");
    if (cfg.command == "sweep" && cfg.values.empty())
      throw UsageError("sweep needs --values");

    if (cfg.command == "train") return cmd_train(cfg);
    if (cfg.command == "compare") return cmd_compare(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    if (cfg.command == "trace") return cmd_trace(cfg);
    if (cfg.command == "toy") return cmd_toy(cfg);
    throw UsageError("unknown command " + cfg.command);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace slnp
